"""Explicit operator families and classes on both Fock spaces.

Hilbert side (``a`` operators):

* :func:`lehn_g1` -- the first Chern character operator, including the
  canonical-class quadratic term; ``boundary`` is ``lehn_g1(1)``.
* :func:`gtilde_operator` / :func:`gtilde_class` -- the K-free operators
  and classes that generate the quantum-corrected ring.

Orbifold side (``p`` operators):

* :func:`ok_operator` / :func:`ok_class`.

All lambda-sums run over nonempty generalized partitions unless
``include_empty=True``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .fock import (
    CentralSign,
    Commutator,
    FockVector,
    OperatorExpr,
    Term,
    cube_zero_mode,
    monomial_level,
    nakajima_basis,
    single_mode,
)
from .linalg import IncrementalBasis, Inconsistent
from .partitions import GeneralizedPartition, generalized_partitions, partitions

__all__ = [
    "Inconsistent",
    "RankDeficient",
    "UniversalFit",
    "boundary",
    "curly_closed_form",
    "derivative_tower",
    "extract_universal_f",
    "gtilde_class",
    "gtilde_operator",
    "lehn_g1",
    "ok_class",
    "ok_operator",
    "orbifold_bracket_closed_form",
    "unit_class",
]

HILBERT = CentralSign.HILBERT
ORBIFOLD = CentralSign.ORBIFOLD


class RankDeficient(ArithmeticError):
    """The chosen models do not determine the universal coefficient."""


def _coeffs(alg, alpha):
    return alg.element(alpha).coeffs


class _LambdaFamily:
    """Terms ``weight(lambda) * a_lambda(tau_* alpha)`` over generalized
    partitions of fixed length and size, bounded by the input level."""

    def __init__(self, length, size, weight, alpha, include_empty=False, flip=None):
        self.length = length
        self.size = size
        self.weight = weight
        self.alpha = alpha
        self.include_empty = include_empty
        self.flip = flip

    def __call__(self, level):
        if self.length < 0 or not any(self.alpha):
            return []
        out = []
        for lam in generalized_partitions(self.length, self.size, level, self.include_empty):
            w = self.weight(lam)
            if self.flip is not None and lam == self.flip:
                w = -w
            if w:
                out.append(Term(Fraction(w), lam.parts, alpha=self.alpha))
        return out


# -- Hilbert side ----------------------------------------------------------------


class _QuadraticKFamily:
    """``-sum_{n>0} (n-1)/2 a_{-n} a_n (tau_{2*}(K alpha))``."""

    def __init__(self, alpha):
        self.alpha = alpha

    def __call__(self, level):
        if not any(self.alpha):
            return []
        return [Term(Fraction(-(n - 1), 2), (-n, n), alpha=self.alpha) for n in range(2, level + 1)]


@lru_cache(maxsize=None)
def _lehn_g1(alg, alpha):
    cube = cube_zero_mode(HILBERT, alpha, alg).scaled(Fraction(-1, 6))
    k_alpha = alg.mul_coeffs(alg._K, alpha)
    quad = OperatorExpr(alg, HILBERT, families=(_QuadraticKFamily(k_alpha),))
    op = cube + quad
    op.label = f"G1({alg.element(alpha)})"
    return op


def lehn_g1(alg, alpha):
    """The first Chern character operator with its canonical-class term."""
    return _lehn_g1(alg, _coeffs(alg, alpha))


def boundary(alg):
    """The boundary operator ``d = G_1(1)``."""
    return lehn_g1(alg, alg.one)


@lru_cache(maxsize=None)
def _gtilde(alg, k, alpha, include_empty, flip):
    e_alpha = alg.mul_coeffs(alg._e, alpha)
    first = _LambdaFamily(k + 2, 0, lambda lam: Fraction(-1, lam.factorial), alpha,
                          include_empty, flip)
    second = _LambdaFamily(
        k, 0, lambda lam: Fraction(lam.square_sum - 2, 24 * lam.factorial), e_alpha,
        include_empty)
    return OperatorExpr(alg, HILBERT, families=(first, second),
                        label=f"Gt{k}({alg.element(alpha)})")


def gtilde_operator(alg, k, alpha, include_empty=False, mutate=None):
    """K-free Chern character operator on the Hilbert side.

    ``mutate`` (a generalized partition) flips the sign of that single term
    of the leading sum; it exists for negative-control runs only.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if isinstance(mutate, str):
        mutate = GeneralizedPartition.parse(mutate)
    return _gtilde(alg, k, _coeffs(alg, alpha), include_empty, mutate)


# -- orbifold side ---------------------------------------------------------------


@lru_cache(maxsize=None)
def _ok(alg, k, alpha, include_empty):
    sgn = -1 if k % 2 else 1
    e_alpha = alg.mul_coeffs(alg._e, alpha)
    first = _LambdaFamily(k + 2, 0, lambda lam: Fraction(sgn, lam.factorial), alpha, include_empty)
    second = _LambdaFamily(
        k, 0, lambda lam: Fraction(sgn * (lam.square_sum - 2), 24 * lam.factorial), e_alpha,
        include_empty)
    return OperatorExpr(alg, ORBIFOLD, families=(first, second),
                        label=f"O{k}({alg.element(alpha)})")


def ok_operator(alg, k, alpha, include_empty=False):
    """Orbifold multiplication operator by ``O_k(alpha, n)``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return _ok(alg, k, _coeffs(alg, alpha), include_empty)


# -- derivative towers -----------------------------------------------------------


@lru_cache(maxsize=None)
def _curly_closed(sign, alg, m, alpha, k):
    e_alpha = alg.mul_coeffs(alg._e, alpha)
    lead = Fraction((-m) ** k * factorial(k)) if sign == HILBERT else Fraction(m ** k * factorial(k))
    esign = -1 if sign == HILBERT else 1
    first = _LambdaFamily(k + 1, m, lambda lam: lead / lam.factorial, alpha)
    second = _LambdaFamily(
        k - 1, m, lambda lam: esign * lead * Fraction(lam.square_sum - 1, 24 * lam.factorial),
        e_alpha)
    return OperatorExpr(alg, sign, families=(first, second),
                        label=f"{sign.letter}^{{{k}}}_{m}({alg.element(alpha)}) closed")


def curly_closed_form(sign, alg, m, alpha, k):
    """Closed form of the K-free derivative ``a^{k}_m(alpha)``.

    Hilbert:  ``(-m)^k k! (sum_{l=k+1,|l|=m} a_l(tau alpha)/l!
    - sum_{l=k-1,|l|=m} (s-1)/(24 l!) a_l(tau(e alpha)))``.
    Orbifold: ``m^k k! (sum ... + sum ...)`` with ``p`` operators; at
    ``m = -1`` this is ``k!`` times the bracket formula for ``O_k``.
    """
    if m == 0 or k < 0:
        raise ValueError("need m != 0 and k >= 0")
    return _curly_closed(CentralSign(sign), alg, m, _coeffs(alg, alpha), k)


def orbifold_bracket_closed_form(alg, k, gamma):
    """Right-hand side of ``[O_k(alpha), p_{-1}(beta)]`` with ``gamma = alpha beta``."""
    return curly_closed_form(ORBIFOLD, alg, -1, gamma, k).scaled(
        Fraction(1, factorial(k)), label=f"[O{k}, p-1]({alg.element(gamma)}) closed")


def _tower_base(sign, alg):
    if sign == HILBERT:
        return cube_zero_mode(HILBERT, alg.one, alg).scaled(Fraction(-1, 6), label="Gt1(1)")
    return ok_operator(alg, 1, alg.one)


@lru_cache(maxsize=None)
def _tower(sign, alg, mode, alpha, k, kind):
    if k == 0:
        return single_mode(sign, mode, alg.element(alpha), alg)
    if kind == "round":
        d = boundary(alg)
    else:
        d = _tower_base(sign, alg)
    return Commutator(d, _tower(sign, alg, mode, alpha, k - 1, kind))


def derivative_tower(sign, alg, mode, alpha, k, kind="curly"):
    """Iterated commutators ``f^{(k)} = [d, f^{(k-1)}]`` starting at ``a_mode(alpha)``.

    ``kind="round"`` uses the boundary operator ``d`` with its canonical
    class term (Hilbert side only); ``kind="curly"`` uses ``-1/6 :a^3:_0``
    (Hilbert) or ``O_1(1)`` (orbifold).
    """
    sign = CentralSign(sign)
    if kind not in ("round", "curly"):
        raise ValueError("kind must be 'round' or 'curly'")
    if kind == "round" and sign != HILBERT:
        raise ValueError("the round tower is defined on the Hilbert side")
    if k < 0:
        raise ValueError("k must be >= 0")
    return _tower(sign, alg, mode, _coeffs(alg, alpha), k, kind)


# -- classes ---------------------------------------------------------------------


def _ones(alg, r):
    """Monomial factors of ``a_{-1}(1)^r`` and the ``1/r!`` weight."""
    return ((-1, alg.unit),) * r, Fraction(1, factorial(r))


def unit_class(alg, n):
    """``1_{-n} = a_{-1}(1)^n |0> / n!`` (same on both sides)."""
    mono, w = _ones(alg, n)
    return FockVector(alg, {mono: w})


def _creation_state(alg, lam, alpha):
    """``a_{-lam}(tau_* alpha)|0>`` for an ordinary partition ``lam``."""
    out = {}
    modes = tuple(sorted(-p for p in lam))
    for idx, c in alg.coproduct_coeffs(alpha, len(lam)).items():
        key = tuple(sorted(zip(modes, idx)))
        out[key] = out.get(key, 0) + c
    return out


def _class(alg, k, alpha, n, lead_weight, e_weight):
    alpha = _coeffs(alg, alpha)
    e_alpha = alg.mul_coeffs(alg._e, alpha)
    out = {}
    for j in range(k + 1):
        r = n - j - 1
        if r < 0:
            continue
        ones, w1 = _ones(alg, r)
        for length, weight, a in ((k - j + 1, lead_weight, alpha), (k - j - 1, e_weight, e_alpha)):
            if length <= 0 or not any(a):
                continue
            for parts in partitions(j + 1, length):
                lam = GeneralizedPartition(parts)
                w = weight(lam)
                if not w:
                    continue
                for mono, c in _creation_state(alg, parts, a).items():
                    key = tuple(sorted(mono + ones))
                    out[key] = out.get(key, 0) + w * w1 * c
    return FockVector(alg, out)


def ok_class(alg, k, alpha, n):
    """The orbifold class ``O_k(alpha, n)`` by its explicit double sum."""
    sgn = -1 if k % 2 else 1
    return _class(
        alg, k, alpha, n,
        lambda lam: Fraction(sgn, lam.factorial * factorial(lam.size)),
        lambda lam: Fraction(sgn * (lam.size + lam.square_sum - 2),
                             24 * lam.factorial * factorial(lam.size)),
    )


def gtilde_class(alg, k, alpha, n):
    """The K-free class ``G~_k(alpha, n)`` by its explicit double sum."""
    return _class(
        alg, k, alpha, n,
        lambda lam: Fraction((-1) ** (lam.size - 1), lam.factorial * factorial(lam.size)),
        lambda lam: Fraction((-1) ** lam.size * (lam.size + lam.square_sum - 2),
                             24 * lam.factorial * factorial(lam.size)),
    )


# -- universal coefficients --------------------------------------------------------


@dataclass
class UniversalFit:
    """Result of fitting one universal coefficient ``f_eps(lambda)``."""

    k: int
    eps: str
    lam: GeneralizedPartition
    value: Fraction | None
    models: list[str]
    per_model: dict[str, Fraction] = field(default_factory=dict)
    rank: int = 0
    unknowns: int = 0
    all_values: dict[tuple[str, str], Fraction] = field(default_factory=dict)

    @property
    def empty(self):
        return self.unknowns == 0


_EPS_DEGREE = {"K": 2, "K2": 4}


def _eps_element(alg, eps):
    if eps == "K":
        return alg._K
    return alg.mul_coeffs(alg._K, alg._K)


def _admissible(k, eps, m, max_annihilation):
    length = k + 1 - _EPS_DEGREE[eps] // 2
    if length < 0:
        return []
    return generalized_partitions(length, m, max_annihilation)


def extract_universal_f(k, eps, lam, models, max_level=6):
    """Fit ``f_eps(lam)`` in the K-dependent part of ``a^{(k)}_m(alpha)``.

    Evaluates the round tower on every basis state (output level at most
    ``max_level``), subtracts the K-free closed form, and solves for all
    admissible ``f_eps'(lambda')`` with ``|lambda'| = m`` jointly over the
    models.  Each model that alone determines the unknowns must give the
    same values, else :class:`Inconsistent` is raised.
    """
    if eps not in _EPS_DEGREE:
        raise ValueError("eps must be 'K' or 'K2'")
    if isinstance(lam, str):
        lam = GeneralizedPartition.parse(lam)
    elif not isinstance(lam, GeneralizedPartition):
        lam = GeneralizedPartition(lam)
    m = lam.size
    if m == 0:
        raise ValueError("lambda must have nonzero size")
    names = [alg.name for alg in models]
    length = k + 1 - _EPS_DEGREE[eps] // 2
    if lam.length != length:
        if length <= 0 or lam.is_empty():
            return UniversalFit(k, eps, lam, None, names)
        raise ValueError(f"lambda must have length {length} for eps={eps}, k={k}")
    if len(models) < 1:
        raise RankDeficient("no models given")

    top_in = max_level + m if m < 0 else max_level
    top_in = max(top_in, 0)
    unknowns = [(e, mu) for e in ("K", "K2") for mu in _admissible(k, e, m, top_in)]
    if (eps, lam) not in unknowns:
        raise RankDeficient(f"{lam} is outside the evaluated level range")
    n_unknowns = len(unknowns)

    joint_cols = [dict() for _ in unknowns]
    joint_rhs = {}
    per_model = {}
    for mi, alg in enumerate(models):
        cols = [dict() for _ in unknowns]
        rhs = {}
        for ai in range(alg.dim):
            alpha = alg.basis_element(ai).coeffs
            tower = derivative_tower(HILBERT, alg, m, alpha, k, kind="round")
            closed = curly_closed_form(HILBERT, alg, m, alpha, k)
            ops = []
            for e, mu in unknowns:
                ea = alg.mul_coeffs(_eps_element(alg, e), alpha)
                ops.append(OperatorExpr(alg, HILBERT, (Term(Fraction(1, mu.factorial), mu.parts, alpha=ea),)))
            for level in range(top_in + 1):
                for mono in nakajima_basis(alg, level):
                    v = FockVector(alg, {mono: Fraction(1)})
                    rem = tower(v) - closed(v)
                    for key, c in rem.items():
                        rhs[(ai, mono, key)] = c
                    for col, op in zip(cols, ops):
                        for key, c in op(v).items():
                            col[(ai, mono, key)] = c
        for col, jcol in zip(cols, joint_cols):
            jcol.update({(mi,) + key: c for key, c in col.items()})
        joint_rhs.update({(mi,) + key: c for key, c in rhs.items()})
        basis = IncrementalBasis()
        for j, col in enumerate(cols):
            basis.add(col, j)
        if len(basis) == n_unknowns:
            try:
                sol = basis.express(rhs)
            except Inconsistent:
                raise Inconsistent(f"no universal value fits model {alg.name}") from None
            per_model[alg.name] = {u: sol.get(j, Fraction(0)) for j, u in enumerate(unknowns)}

    basis = IncrementalBasis()
    for j, col in enumerate(joint_cols):
        basis.add(col, j)
    rank = len(basis)
    if rank < n_unknowns:
        raise RankDeficient(f"models determine only {rank} of {n_unknowns} coefficients")
    try:
        sol = basis.express(joint_rhs)
    except Inconsistent:
        raise Inconsistent("no universal value fits all models jointly") from None
    values = {u: sol.get(j, Fraction(0)) for j, u in enumerate(unknowns)}
    for name, vals in per_model.items():
        if vals != values:
            raise Inconsistent(f"model {name} disagrees with the joint fit")
    return UniversalFit(
        k=k,
        eps=eps,
        lam=lam,
        value=values[(eps, lam)],
        models=names,
        per_model={name: vals[(eps, lam)] for name, vals in per_model.items()},
        rank=rank,
        unknowns=n_unknowns,
        all_values={(e, str(mu)): val for (e, mu), val in values.items()},
    )
