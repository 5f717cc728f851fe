"""Fock space over a graded Frobenius algebra.

States are exact sparse combinations of Nakajima monomials
``a_{-n_1}(e_{i_1}) ... a_{-n_k}(e_{i_k})|0>``.  A monomial is stored as a
sorted tuple of ``(mode, i)`` pairs with ``mode = -n < 0``, so the natural
tuple order lists larger ``n`` first and breaks ties by basis index.

Both sign conventions are supported:

* Hilbert:  ``[a_m(x), a_n(y)] = -m delta_{m,-n} <x, y>``
* Orbifold: ``[p_m(x), p_n(y)] = +m delta_{m,-n} <x, y>``
"""

from __future__ import annotations

import enum
import itertools
import re
from collections import Counter
from fractions import Fraction

from . import kernels
from .frobenius import AlgebraElement, GradedFrobeniusAlgebra, TensorElement
from .partitions import EmptyPartition, GeneralizedPartition, partitions
from .scalars import GaussianRational, demote, format_scalar, parse_scalar

__all__ = [
    "ArityMismatch",
    "CentralSign",
    "Commutator",
    "FockVector",
    "NotASubmonomial",
    "OperatorExpr",
    "Term",
    "a_lambda_tau",
    "apply_modes",
    "commutator",
    "cube_zero_mode",
    "fock_pair",
    "format_monomial",
    "format_vector",
    "monomial_age",
    "monomial_concat",
    "monomial_degree",
    "monomial_divide",
    "monomial_level",
    "monomial_pair",
    "mode_string_operator",
    "nakajima_basis",
    "parse_vector",
    "single_mode",
    "tau_commutator",
]


class CentralSign(enum.IntEnum):
    HILBERT = -1
    ORBIFOLD = 1

    @property
    def letter(self):
        return "a" if self is CentralSign.HILBERT else "p"

    @classmethod
    def parse(cls, text):
        key = str(text).lower()
        if key in ("hilbert", "qc", "quantum", "a"):
            return cls.HILBERT
        if key in ("orbifold", "orb", "p"):
            return cls.ORBIFOLD
        raise ValueError(f"unknown side {text!r}; use hilbert or orbifold")


class ArityMismatch(ValueError):
    pass


class NotASubmonomial(ValueError):
    pass


# -- monomials --------------------------------------------------------------


def monomial_level(mono) -> int:
    return -sum(m for m, _ in mono)


def monomial_age(mono) -> int:
    return sum(-m - 1 for m, _ in mono)


def monomial_degree(alg, mono) -> int:
    return sum(alg.degrees[i] + 2 * (-m - 1) for m, i in mono)


def _nakajima_basis(alg, level):
    out = []
    for lam in partitions(level):
        groups = Counter(lam)
        per_part = [
            list(itertools.combinations_with_replacement(range(alg.dim), mult))
            for part, mult in sorted(groups.items())
        ]
        parts = sorted(groups)
        for choice in itertools.product(*per_part):
            mono = []
            for part, idxs in zip(parts, choice):
                mono.extend((-part, i) for i in idxs)
            out.append(tuple(sorted(mono)))
    out.sort(key=lambda m: (monomial_degree(alg, m), m))
    return out


def nakajima_basis(alg, level, degree=None):
    """Canonical basis of the level-``level`` piece: ordered by cohomological
    degree, then by monomial tuple."""
    cache = alg.__dict__.setdefault("_nakajima_cache", {})
    basis = cache.get(level)
    if basis is None:
        basis = cache[level] = tuple(_nakajima_basis(alg, level))
    if degree is None:
        return basis
    return tuple(m for m in basis if monomial_degree(alg, m) == degree)


# -- vectors ---------------------------------------------------------------


def _clean(terms):
    return {k: v for k, v in terms.items() if v}


class FockVector:
    """Immutable sparse combination of Nakajima monomials."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg, terms=None):
        self.alg = alg
        self.terms = _clean(terms or {})

    @classmethod
    def _raw(cls, alg, terms):
        """Wrap an already pruned dict without copying."""
        v = object.__new__(cls)
        v.alg = alg
        v.terms = terms
        return v

    @classmethod
    def vacuum(cls, alg):
        return cls(alg, {(): Fraction(1)})

    @classmethod
    def monomial(cls, alg, factors, coef=1):
        """``factors`` is an iterable of ``(n, element)`` with ``n > 0`` meaning
        ``a_{-n}(element)``; elements are basis names or indices."""
        mono = tuple(sorted((-int(n), alg._index(b)) for n, b in factors))
        if any(m >= 0 for m, _ in mono):
            raise ValueError("creation factors need n > 0")
        return cls(alg, {mono: Fraction(coef) if isinstance(coef, int) else coef})

    def __repr__(self):
        return f"FockVector({format_vector(self)})"

    def __eq__(self, other):
        if isinstance(other, FockVector):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def items(self):
        return self.terms.items()

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return FockVector(self.alg, out)

    def __sub__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) - v
        return FockVector(self.alg, out)

    def __neg__(self):
        return FockVector._raw(self.alg, {k: -v for k, v in self.terms.items()})

    def __mul__(self, c):
        if isinstance(c, FockVector):
            return NotImplemented
        if not c:
            return FockVector._raw(self.alg, {})
        return FockVector._raw(self.alg, {k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, c):
        inv = Fraction(1) / c
        return FockVector(self.alg, {k: v * inv for k, v in self.terms.items()})

    def levels(self):
        return {monomial_level(m) for m in self.terms}

    @property
    def level(self):
        """Level of a level-homogeneous vector (``None`` if zero or mixed)."""
        lv = self.levels()
        return lv.pop() if len(lv) == 1 else None

    def degrees(self):
        return {monomial_degree(self.alg, m) for m in self.terms}

    @property
    def degree(self):
        d = self.degrees()
        return d.pop() if len(d) == 1 else None

    def coefficient(self, mono):
        return self.terms.get(mono, Fraction(0))


def _as_terms(v):
    return v.terms if isinstance(v, FockVector) else v


# -- operators ---------------------------------------------------------------


class Term:
    """``coef * a_{m_1} ... a_{m_k}(tensor)``.

    Either an explicit ``tensor`` or ``alpha`` (coefficient tuple) meaning
    ``tau_{k*} alpha`` is given; the latter enables the contraction kernel
    when the mode string is normal ordered.
    """

    __slots__ = ("coef", "modes", "alpha", "_tensor")

    def __init__(self, coef, modes, alpha=None, tensor=None):
        self.coef = demote(coef)
        self.modes = tuple(modes)
        if any(m == 0 for m in self.modes):
            raise ValueError("a_0 is identically zero and is not allowed in mode strings")
        if (alpha is None) == (tensor is None):
            raise ValueError("give exactly one of alpha and tensor")
        self.alpha = tuple(demote(c) for c in alpha) if alpha is not None else None
        if tensor is not None and tensor.arity != len(self.modes):
            raise ArityMismatch(
                f"tensor arity {tensor.arity} != mode string length {len(self.modes)}")
        self._tensor = tensor

    def tensor(self, alg):
        if self._tensor is None:
            self._tensor = TensorElement(
                alg, len(self.modes), alg.coproduct_coeffs(self.alpha, len(self.modes)))
        return self._tensor

    @property
    def is_normal_ordered(self):
        seen_annihilator = False
        for m in self.modes:
            if m > 0:
                seen_annihilator = True
            elif seen_annihilator:
                return False
        return True

    def scaled(self, c):
        if self.alpha is not None:
            return Term(self.coef * c, self.modes, alpha=self.alpha)
        return Term(self.coef * c, self.modes, tensor=self._tensor)

    def annihilation_total(self):
        return sum(m for m in self.modes if m > 0)

    def __repr__(self):
        return f"Term({self.coef}, {self.modes})"


def _can_act(modes, level):
    """False when the string provably kills every level-``level`` state:
    scanning right to left, an annihilator would exceed the level reached."""
    cur = level
    for m in reversed(modes):
        cur -= m
        if cur < 0:
            return False
    return True


def _kernel_form(term, sign):
    """Normal term tuple for :func:`kernels.apply_normal_terms`."""
    creations = tuple(m for m in term.modes if m < 0)
    counts = Counter(m for m in term.modes if m > 0)
    ann = []
    for m in sorted(counts):
        r = counts[m]
        factor = (int(sign) * m) ** r
        for k in range(2, r + 1):
            factor *= k
        ann.append((m, r, factor))
    return (term.coef, creations, tuple(ann), term.alpha)


class OperatorExpr:
    """A finite or locally finite sum of :class:`Term` s on one side.

    ``families`` are callables ``level -> list[Term]`` producing the terms
    that can act on a level-``level`` state (the locally finite part);
    ``terms`` act at every level.  Images of basis monomials are memoized,
    so repeated application is cheap.
    """

    def __init__(self, alg, sign, terms=(), families=(), label=""):
        self.alg = alg
        self.sign = CentralSign(sign)
        self.terms = tuple(terms)
        self.families = tuple(families)
        self.label = label
        self._level_cache = {}
        self._image_cache = {}

    def __repr__(self):
        return f"OperatorExpr({self.label or '...'}, side={self.sign.name.lower()})"

    def materialize(self, level):
        """``(normal kernel terms, general terms)`` acting at ``level``."""
        hit = self._level_cache.get(level)
        if hit is not None:
            return hit
        all_terms = list(self.terms)
        for fam in self.families:
            all_terms.extend(fam(level))
        normal, general = [], []
        for t in all_terms:
            if not t.coef or not _can_act(t.modes, level):
                continue
            if t.alpha is not None and t.is_normal_ordered and len(t.modes) > 1:
                normal.append(_kernel_form(t, self.sign))
            else:
                general.append(t)
        hit = (tuple(normal), tuple(general))
        self._level_cache[level] = hit
        return hit

    def term_list(self, level):
        out = list(self.terms)
        for fam in self.families:
            out.extend(fam(level))
        return out

    def _image(self, mono):
        hit = self._image_cache.get(mono)
        if hit is not None:
            return hit
        normal, general = self.materialize(monomial_level(mono))
        unit = {mono: 1}
        out = kernels.apply_normal_terms(normal, unit, self.alg) if normal else {}
        gram = self.alg.gram
        for t in general:
            part = kernels.apply_mode_string(
                t.coef, t.modes, t.tensor(self.alg).entries, unit, int(self.sign), gram)
            for k, v in part.items():
                nv = out.get(k, 0) + v
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
        self._image_cache[mono] = out
        return out

    def apply(self, v):
        terms = _as_terms(v)
        if len(terms) == 1:
            (mono, c), = terms.items()
            if c == 1:
                # cached images are never mutated, so they can be shared
                return FockVector._raw(self.alg, self._image(mono))
        out = {}
        for mono, c in terms.items():
            img = self._image(mono)
            if c == 1 and not out:
                out = dict(img)
                continue
            for k, w in img.items():
                nv = out.get(k, 0) + (w if c == 1 else c * w)
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
        return FockVector._raw(self.alg, out)

    __call__ = apply

    def scaled(self, c, label=None):
        fams = tuple(_ScaledFamily(f, c) for f in self.families)
        return OperatorExpr(
            self.alg, self.sign, tuple(t.scaled(c) for t in self.terms), fams,
            label or f"{c}*{self.label}")

    def __add__(self, other):
        if other.sign != self.sign or other.alg is not self.alg:
            raise ValueError("cannot add operators on different spaces")
        return OperatorExpr(
            self.alg, self.sign, self.terms + other.terms, self.families + other.families,
            f"{self.label} + {other.label}")

    def __neg__(self):
        return self.scaled(-1, f"-{self.label}")

    def __sub__(self, other):
        return self + (-other)


class _ScaledFamily:
    def __init__(self, family, c):
        self.family = family
        self.c = c

    def __call__(self, level):
        return [t.scaled(self.c) for t in self.family(level)]


def _elem(alg, a):
    return alg.element(a).coeffs


def apply_modes(sign, modes, tensor, v):
    """Apply ``a_{m_1} ... a_{m_k}(tensor)`` to ``v`` exactly."""
    sign = CentralSign(sign)
    modes = tuple(modes)
    if any(m == 0 for m in modes):
        raise ValueError("a_0 is identically zero and is not allowed in mode strings")
    if tensor.arity != len(modes):
        raise ArityMismatch(f"tensor arity {tensor.arity} != mode string length {len(modes)}")
    alg = tensor.alg
    out = kernels.apply_mode_string(
        Fraction(1), modes, tensor.entries, _as_terms(v), int(sign), alg.gram)
    return FockVector(alg, out)


def a_lambda_tau(sign, lam, alpha, alg=None):
    """``a_lambda(tau_* alpha)`` with the ascending Def.-style mode order."""
    if isinstance(lam, str):
        lam = GeneralizedPartition.parse(lam)
    elif not isinstance(lam, GeneralizedPartition):
        lam = GeneralizedPartition(lam)
    if lam.is_empty():
        raise EmptyPartition("a_lambda needs a nonempty generalized partition")
    alg = alg or alpha.alg
    return OperatorExpr(
        alg, sign, (Term(Fraction(1), lam.parts, alpha=_elem(alg, alpha)),),
        label=f"{CentralSign(sign).letter}_{lam}({alpha})")


def single_mode(sign, mode, alpha, alg=None):
    alg = alg or alpha.alg
    return OperatorExpr(
        alg, sign, (Term(Fraction(1), (mode,), alpha=_elem(alg, alpha)),),
        label=f"{CentralSign(sign).letter}_{mode}({alpha})")


class _CubeZeroFamily:
    """Ordered triples of nonzero modes summing to zero, normal ordered."""

    def __init__(self, alpha):
        self.alpha = alpha

    def __call__(self, level):
        counts = Counter()
        rng = [m for m in range(-2 * level, 2 * level + 1) if m]
        for m1 in rng:
            for m2 in rng:
                m3 = -m1 - m2
                if m3 == 0:
                    continue
                triple = (m1, m2, m3)
                if sum(m for m in triple if m > 0) > level:
                    continue
                # creations to the left of annihilations
                counts[tuple(sorted(triple, key=lambda m: (m > 0, m)))] += 1
        return [Term(Fraction(c), modes, alpha=self.alpha) for modes, c in sorted(counts.items())]


def cube_zero_mode(sign, alpha, alg=None):
    """``:a^3:_0(tau_{3*} alpha)`` (no ``-1/6`` prefactor)."""
    alg = alg or alpha.alg
    return OperatorExpr(
        alg, sign, families=(_CubeZeroFamily(_elem(alg, alpha)),),
        label=f":{CentralSign(sign).letter}^3:_0({alpha})")


def commutator(F, G, v):
    """``[F, G] v = F(G v) - G(F v)`` for any callables on states."""
    return F(G(v)) - G(F(v))


class Commutator:
    """The operator ``[F, G]`` as a callable on states."""

    def __init__(self, F, G):
        self.F = F
        self.G = G
        self._cache = {}

    def __call__(self, v):
        terms = _as_terms(v)
        alg = v.alg if isinstance(v, FockVector) else None
        out = None
        for mono, c in terms.items():
            img = self._cache.get(mono)
            if img is None:
                unit = FockVector(alg, {mono: Fraction(1)})
                img = self._cache[mono] = commutator(self.F, self.G, unit)
            out = img * c if out is None else out + img * c
        if out is None:
            return FockVector(alg, {})
        return out


def tau_commutator(sign, left, right, alg=None):
    """Closed-form ``[a_{n_1}...a_{n_k}(tau alpha), a_{m_1}...a_{m_s}(tau beta)]``.

    ``left = (modes, alpha)``, ``right = (modes, beta)``.  Every contraction
    ``n_t = -m_j`` contributes ``sign * n_t`` times the remaining string
    ``m_1..m_{j-1} n_(u != t) m_{j+1}..m_s`` with ``tau_{(k+s-2)*}(alpha beta)``.
    """
    sign = CentralSign(sign)
    ns, alpha = left
    ms, beta = right
    ns, ms = tuple(ns), tuple(ms)
    if not ns or not ms:
        raise ValueError("mode lists must be nonempty")
    alg = alg or alpha.alg
    ab = alg.mul_coeffs(_elem(alg, alpha), _elem(alg, beta))
    arity = len(ns) + len(ms) - 2
    tensor = TensorElement(alg, arity, alg.coproduct_coeffs(ab, arity))
    terms = []
    for t, n in enumerate(ns):
        for j, m in enumerate(ms):
            if n != -m:
                continue
            modes = ms[:j] + ns[:t] + ns[t + 1:] + ms[j + 1:]
            terms.append(Term(Fraction(int(sign) * n), modes, tensor=tensor))
    return OperatorExpr(alg, sign, terms, label=f"[{ns},{ms}]")


def mode_string_operator(sign, modes, alpha, alg=None):
    """``a_{m_1}...a_{m_k}(tau_{k*} alpha)`` in the given (possibly
    non-normal) order."""
    alg = alg or alpha.alg
    modes = tuple(modes)
    tensor = TensorElement(alg, len(modes), alg.coproduct_coeffs(_elem(alg, alpha), len(modes)))
    return OperatorExpr(alg, sign, (Term(Fraction(1), modes, tensor=tensor),), label=f"{modes}")


# -- pairing ------------------------------------------------------------------


def _adjoint_sign(sign, n):
    if sign == CentralSign.HILBERT:
        return -1 if n % 2 else 1
    return 1


def monomial_pair(sign, alg, left, right):
    """``<left|0>, right|0>>`` for two monomials."""
    if monomial_level(left) != monomial_level(right):
        return Fraction(0)
    if Counter(m for m, _ in left) != Counter(m for m, _ in right):
        return Fraction(0)
    cache = alg.__dict__.setdefault("_pair_cache", {})
    key = (int(sign), left, right)
    hit = cache.get(key)
    if hit is not None:
        return hit
    coef = Fraction(1)
    for m, _ in left:
        coef *= _adjoint_sign(sign, -m)
    modes = tuple(-m for m, _ in left)
    idx = tuple(i for _, i in left)
    out = kernels.apply_mode_string(coef, modes, {idx: Fraction(1)}, {right: Fraction(1)},
                                    int(sign), alg.gram)
    val = out.get((), Fraction(0))
    cache[key] = val
    return val


def fock_pair(sign, v, w):
    """Bilinear pairing with ``a_{-n}(b)^dagger = (-1)^n a_n(b)`` (Hilbert)
    or ``p_{-n}(b)^dagger = p_n(b)`` (orbifold)."""
    alg = v.alg
    total = Fraction(0)
    for m1, c1 in v.terms.items():
        for m2, c2 in w.terms.items():
            p = monomial_pair(sign, alg, m1, m2)
            if p:
                total = total + c1 * c2 * p
    return total


# -- Def.-style monomial operations --------------------------------------------


def _single(v):
    if len(v.terms) != 1:
        raise ValueError("expected a single monomial")
    return next(iter(v.terms.items()))


def monomial_concat(A, B):
    """``A o B``: juxtapose the creation factors (bilinear)."""
    out = {}
    for ma, ca in A.terms.items():
        for mb, cb in B.terms.items():
            key = tuple(sorted(ma + mb))
            out[key] = out.get(key, 0) + ca * cb
    return FockVector(A.alg, out)


def monomial_divide(A, B):
    """``A / B``: delete the factors of ``B`` from ``A``."""
    ma, ca = _single(A)
    mb, cb = _single(B)
    left = Counter(ma)
    left.subtract(Counter(mb))
    if any(v < 0 for v in left.values()):
        raise NotASubmonomial("divisor is not a sub-monomial")
    rest = tuple(sorted(left.elements()))
    return FockVector(A.alg, {rest: ca * (Fraction(1) / cb)})


# -- text syntax -------------------------------------------------------------

_FACTOR_RE = re.compile(r"([ap])\[\s*(-?\d+)\s*\]\(\s*([^)]*?)\s*\)")


def format_monomial(alg, mono, sign):
    letter = CentralSign(sign).letter
    if not mono:
        return "|0>"
    return " ".join(f"{letter}[{m}]({alg.names[i]})" for m, i in mono) + " |0>"


def format_vector(v, sign=CentralSign.HILBERT):
    if not v.terms:
        return "0"
    pieces = []
    for mono in sorted(v.terms):
        c = v.terms[mono]
        body = format_monomial(v.alg, mono, sign)
        if isinstance(c, GaussianRational):
            text = f"({format_scalar(c)})*{body}"
            pieces.append(("+", text))
            continue
        neg = c < 0
        mag = -c if neg else c
        text = body if mag == 1 else f"{format_scalar(mag)}*{body}"
        pieces.append(("-" if neg else "+", text))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for s, text in pieces[1:]:
        out += f" {s} {text}"
    return out


def _split_top(text):
    """Split at top-level ``+``/``-`` (outside brackets and parentheses)."""
    pieces, depth, start = [], 0, 0
    for pos, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch in "+-" and depth == 0 and pos > start:
            prev = text[start:pos].strip()
            if prev and not prev.endswith(("*", "/")):
                pieces.append(text[start:pos])
                start = pos
    pieces.append(text[start:])
    return [p.strip() for p in pieces if p.strip()]


def parse_vector(alg, text, sign=None):
    """Parse ``"2*a[-2](h) a[-1](x) |0> - a[-1](1)|0>"`` into a vector.

    The operator letter must match ``sign`` when it is given (``a`` for
    Hilbert, ``p`` for orbifold).
    """
    out = {}
    if text.strip() == "0":
        return FockVector(alg, out)
    for piece in _split_top(text):
        neg = piece.startswith("-")
        body = piece.lstrip("+-").strip()
        m = re.search(r"\|\s*0\s*>\s*$", body)
        if not m:
            raise ValueError(f"term {piece!r} must end with |0>")
        body = body[:m.start()].strip()
        first = _FACTOR_RE.search(body)
        coef_text = body[: first.start()] if first else body
        factors_text = body[first.start():] if first else ""
        coef_text = coef_text.strip().rstrip("*").strip()
        if coef_text.startswith("(") and coef_text.endswith(")"):
            coef_text = coef_text[1:-1]
        coef = parse_scalar(coef_text) if coef_text else Fraction(1)
        mono = []
        pos = 0
        for fm in _FACTOR_RE.finditer(factors_text):
            if factors_text[pos:fm.start()].strip():
                raise ValueError(f"cannot parse {factors_text[pos:fm.start()]!r}")
            pos = fm.end()
            letter, mode, name = fm.group(1), int(fm.group(2)), fm.group(3)
            if sign is not None and letter != CentralSign(sign).letter:
                raise ValueError(f"operator {letter!r} does not match side {CentralSign(sign).name.lower()}")
            if mode >= 0:
                raise ValueError("states are built from creation operators (negative modes)")
            mono.append((mode, alg._index(int(name) if name.isdigit() and name not in alg.names else name)))
        if factors_text[pos:].strip():
            raise ValueError(f"cannot parse {factors_text[pos:]!r}")
        key = tuple(sorted(mono))
        out[key] = out.get(key, 0) + (-coef if neg else coef)
    return FockVector(alg, out)
