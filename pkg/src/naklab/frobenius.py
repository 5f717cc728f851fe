"""Graded Frobenius algebras given by explicit structure constants.

An algebra is a finite basis with even degrees, a multiplication table, a
counit ``T`` and the distinguished classes ``1``, ``x`` (point), ``K`` and
``e``.  Elements are stored densely as coefficient tuples since the
surface models used here have at most a handful of basis vectors.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from functools import cached_property

from .linalg import inverse_matrix
from .scalars import as_scalar, demote, format_scalar, parse_scalar

__all__ = [
    "AlgebraElement",
    "BadCounitSupport",
    "DegeneratePairing",
    "GradedFrobeniusAlgebra",
    "ModelError",
    "ModelParseError",
    "NonAssociative",
    "OddDegreeBasis",
    "TensorElement",
    "validate",
]


class ModelError(ValueError):
    """A violated algebra invariant."""

    kind = "ModelError"

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where

    def as_dict(self):
        return {"kind": self.kind, "message": str(self), "where": self.where}


class NonAssociative(ModelError):
    kind = "NonAssociative"


class NonCommutative(ModelError):
    kind = "NonCommutative"


class NotUnital(ModelError):
    kind = "NotUnital"


class DegreeViolation(ModelError):
    kind = "DegreeViolation"


class DegeneratePairing(ModelError):
    kind = "DegeneratePairing"


class OddDegreeBasis(ModelError):
    kind = "OddDegreeBasis"


class BadCounitSupport(ModelError):
    kind = "BadCounitSupport"


class BadPointClass(ModelError):
    kind = "BadPointClass"


class ModelParseError(ValueError):
    """The model file is not well-formed (bad JSON, names, or numbers)."""


class GradedFrobeniusAlgebra:
    """Immutable graded Frobenius algebra over the Gaussian rationals.

    ``mult`` maps ``(i, j)`` to a ``{k: coefficient}`` dict; absent pairs
    multiply to zero.  ``counit`` maps basis indices to ``T(e_k)``.
    """

    def __init__(self, name, basis, mult, counit, unit, point, K, e, top_degree=4):
        self.name = str(name)
        self.names = tuple(b[0] for b in basis)
        self.degrees = tuple(int(b[1]) for b in basis)
        if len(set(self.names)) != len(self.names):
            raise ModelParseError("duplicate basis names")
        self.dim = len(self.names)
        self.top_degree = int(top_degree)
        self.unit = self._index(unit)
        self.point = self._index(point)
        table = {}
        for (i, j), row in mult.items():
            clean = {self._index(k): as_scalar(c) for k, c in row.items() if c}
            if clean:
                table[self._index(i), self._index(j)] = clean
        self.mult = table
        self.counit = self._coeffs(counit)
        self._counit_fast = tuple(demote(c) for c in self.counit)
        self._K = self._coeffs(K)
        self._e = self._coeffs(e)
        # dense product table: _mul[i][j] is the coefficient tuple of e_i e_j
        zero = (0,) * self.dim
        dense = []
        for i in range(self.dim):
            row = []
            for j in range(self.dim):
                entry = table.get((i, j))
                if entry is None:
                    row.append(zero)
                else:
                    row.append(tuple(demote(entry.get(k, 0)) for k in range(self.dim)))
            dense.append(tuple(row))
        self._mul = tuple(dense)
        self._coproducts = {}
        self._creation_cache = {}

    def _index(self, key):
        if isinstance(key, int) and not isinstance(key, bool):
            if 0 <= key < self.dim:
                return key
            raise ModelParseError(f"basis index {key} out of range")
        try:
            return self.names.index(key)
        except ValueError:
            raise ModelParseError(f"unknown basis element {key!r}") from None

    def _coeffs(self, spec):
        if isinstance(spec, AlgebraElement):
            return spec.coeffs
        if isinstance(spec, (tuple, list)):
            if len(spec) != self.dim:
                raise ModelParseError("coefficient vector has wrong length")
            return tuple(as_scalar(c) for c in spec)
        out = [Fraction(0)] * self.dim
        for k, c in spec.items():
            out[self._index(k)] += as_scalar(c)
        return tuple(out)

    def __repr__(self):
        return f"GradedFrobeniusAlgebra({self.name!r}, dim={self.dim})"

    # identity semantics: algebras are shared, immutable fixtures
    __hash__ = object.__hash__

    # -- elements -----------------------------------------------------

    def element(self, spec) -> "AlgebraElement":
        """Build an element from a name, index, dict or coefficient list."""
        if isinstance(spec, AlgebraElement):
            return spec
        if isinstance(spec, (str, int)) and not isinstance(spec, bool):
            return self.basis_element(self._index(spec))
        return AlgebraElement(self, self._coeffs(spec))

    def basis_element(self, i) -> "AlgebraElement":
        c = [Fraction(0)] * self.dim
        c[i] = Fraction(1)
        return AlgebraElement(self, tuple(c))

    def basis(self):
        return [self.basis_element(i) for i in range(self.dim)]

    @property
    def one(self):
        return self.basis_element(self.unit)

    @property
    def x(self):
        return self.basis_element(self.point)

    @property
    def K(self):
        return AlgebraElement(self, self._K)

    @property
    def e(self):
        return AlgebraElement(self, self._e)

    @property
    def zero(self):
        return AlgebraElement(self, (Fraction(0),) * self.dim)

    # -- raw tuple kernels --------------------------------------------

    def mul_coeffs(self, a, b):
        out = [0] * self.dim
        mul = self._mul
        for i, ai in enumerate(a):
            if not ai:
                continue
            row = mul[i]
            for j, bj in enumerate(b):
                if not bj:
                    continue
                c = ai * bj
                for k, m in enumerate(row[j]):
                    if m:
                        out[k] += c * m
        return tuple(demote(c) for c in out)

    def mul_basis_coeffs(self, a, j):
        """``a * e_j`` on coefficient tuples."""
        out = [0] * self.dim
        mul = self._mul
        for i, ai in enumerate(a):
            if not ai:
                continue
            for k, m in enumerate(mul[i][j]):
                if m:
                    out[k] += ai * m
        return tuple(demote(c) for c in out)

    def counit_coeffs(self, a):
        total = 0
        for ai, t in zip(a, self._counit_fast):
            if ai and t:
                total += ai * t
        return demote(total) if total else Fraction(0)

    @cached_property
    def gram(self):
        """Pairing matrix ``<e_i, e_j> = T(e_i e_j)``."""
        return tuple(
            tuple(self.counit_coeffs(self._mul[i][j]) for j in range(self.dim))
            for i in range(self.dim)
        )

    @cached_property
    def gram_inverse(self):
        inv = inverse_matrix([list(r) for r in self.gram])
        if inv is None:
            raise DegeneratePairing("pairing matrix is singular", where=self.name)
        return tuple(tuple(demote(c) for c in r) for r in inv)

    @cached_property
    def dual_basis(self):
        """Coefficient tuples of ``e^j`` with ``<e_i, e^j> = delta_ij``."""
        inv = self.gram_inverse
        # e^j = sum_k inv[k][j] e_k since sum_k g[i][k] inv[k][j] = delta
        return tuple(tuple(inv[k][j] for k in range(self.dim)) for j in range(self.dim))

    def coproduct_coeffs(self, a, k):
        """Entries ``{index tuple: coefficient}`` of ``tau_{k*} a``.

        Uses ``tau_k(a) = sum_j tau_{k-1}(a e_j) (x) e^j``; ``k == 0`` gives
        ``{(): T(a)}``.
        """
        key = (a, k)
        hit = self._coproducts.get(key)
        if hit is not None:
            return hit
        if k == 0:
            t = self.counit_coeffs(a)
            out = {(): t} if t else {}
        elif k == 1:
            out = {(i,): demote(c) for i, c in enumerate(a) if c}
        else:
            acc = {}
            for j in range(self.dim):
                sub = self.coproduct_coeffs(self.mul_basis_coeffs(a, j), k - 1)
                if not sub:
                    continue
                dual = self.dual_basis[j]
                for idx, c in sub.items():
                    for l, d in enumerate(dual):
                        if d:
                            key2 = idx + (l,)
                            acc[key2] = acc.get(key2, 0) + c * d
            out = {i: demote(c) for i, c in acc.items() if c}
        self._coproducts[key] = out
        return out

    # -- element-level API ------------------------------------------------

    def multiply(self, a, b) -> "AlgebraElement":
        a, b = self.element(a), self.element(b)
        return AlgebraElement(self, self.mul_coeffs(a.coeffs, b.coeffs))

    def integrate(self, a):
        return self.counit_coeffs(self.element(a).coeffs)

    def pair(self, a, b):
        return self.integrate(self.multiply(a, b))

    def coproduct(self, a, k) -> "TensorElement":
        if k < 0:
            raise ValueError("coproduct arity must be >= 0")
        self.gram_inverse  # raises DegeneratePairing early
        a = self.element(a)
        return TensorElement(self, k, self.coproduct_coeffs(a.coeffs, k))

    # -- serialization ----------------------------------------------------

    def to_dict(self):
        def vec(coeffs):
            return {self.names[k]: format_scalar(c) for k, c in enumerate(coeffs) if c}

        mult = []
        for (i, j) in sorted(self.mult):
            row = self.mult[i, j]
            mult.append({
                "i": self.names[i],
                "j": self.names[j],
                "coeffs": {self.names[k]: format_scalar(row[k]) for k in sorted(row)},
            })
        return {
            "name": self.name,
            "top_degree": self.top_degree,
            "basis": [{"name": n, "degree": d} for n, d in zip(self.names, self.degrees)],
            "unit": self.names[self.unit],
            "point": self.names[self.point],
            "mult": mult,
            "counit": vec(self.counit),
            "K": vec(self._K),
            "e": vec(self._e),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ModelParseError("model must be a JSON object")
        try:
            basis = [(b["name"], b["degree"]) for b in data["basis"]]
            for name, deg in basis:
                if not isinstance(name, str) or not isinstance(deg, int):
                    raise ModelParseError(f"bad basis entry {name!r}: {deg!r}")
            mult = {}
            for entry in data.get("mult", []):
                key = (entry["i"], entry["j"])
                if key in mult:
                    raise ModelParseError(f"duplicate mult entry {key}")
                mult[key] = {k: _parse_num(v) for k, v in entry["coeffs"].items()}
            counit = {k: _parse_num(v) for k, v in data["counit"].items()}
            K = {k: _parse_num(v) for k, v in data.get("K", {}).items()}
            e = {k: _parse_num(v) for k, v in data.get("e", {}).items()}
            top = data.get("top_degree", 4)
            if not isinstance(top, int):
                raise ModelParseError("top_degree must be an integer")
            return cls(data["name"], basis, mult, counit, data["unit"], data["point"], K, e, top)
        except KeyError as exc:
            raise ModelParseError(f"missing field {exc.args[0]!r}") from None
        except (TypeError, AttributeError) as exc:
            raise ModelParseError(f"malformed model: {exc}") from None

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ModelParseError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def _parse_num(v):
    if isinstance(v, int) and not isinstance(v, bool):
        return Fraction(v)
    try:
        return parse_scalar(v)
    except ValueError as exc:
        raise ModelParseError(str(exc)) from None


class AlgebraElement:
    """An element of a :class:`GradedFrobeniusAlgebra` (dense coefficients)."""

    __slots__ = ("alg", "coeffs")

    def __init__(self, alg, coeffs):
        self.alg = alg
        self.coeffs = tuple(coeffs)

    def __repr__(self):
        return f"AlgebraElement({self})"

    def __str__(self):
        parts = []
        for name, c in zip(self.alg.names, self.coeffs):
            if c == 1:
                parts.append(name)
            elif c:
                parts.append(f"({format_scalar(c)})*{name}")
        return " + ".join(parts) if parts else "0"

    def __eq__(self, other):
        if isinstance(other, AlgebraElement):
            return self.alg is other.alg and self.coeffs == other.coeffs
        if other == 0:
            return not any(self.coeffs)
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return any(self.coeffs)

    def __add__(self, other):
        return AlgebraElement(self.alg, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        return AlgebraElement(self.alg, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return AlgebraElement(self.alg, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return AlgebraElement(self.alg, self.alg.mul_coeffs(self.coeffs, other.coeffs))
        return AlgebraElement(self.alg, tuple(a * other for a in self.coeffs))

    def __rmul__(self, other):
        return AlgebraElement(self.alg, tuple(other * a for a in self.coeffs))

    @property
    def degree(self):
        """Degree of a homogeneous element (``None`` for 0 or mixed)."""
        degs = {d for d, c in zip(self.alg.degrees, self.coeffs) if c}
        if len(degs) == 1:
            return degs.pop()
        return None


class TensorElement:
    """Sparse element of ``A^{(x) k}`` keyed by basis-index tuples."""

    __slots__ = ("alg", "arity", "entries")

    def __init__(self, alg, arity, entries):
        self.alg = alg
        self.arity = arity
        self.entries = {k: c for k, c in entries.items() if c}
        for k in self.entries:
            if len(k) != arity:
                raise ValueError("tensor entry of wrong arity")

    def __eq__(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.arity == other.arity and self.entries == other.entries

    def __repr__(self):
        return f"TensorElement(arity={self.arity}, terms={len(self.entries)})"

    def pair(self, elems):
        """``<t, b_1 (x) ... (x) b_k>`` with slotwise Frobenius pairing."""
        g = self.alg.gram
        vecs = [self.alg.element(b).coeffs for b in elems]
        total = Fraction(0)
        for idx, c in self.entries.items():
            term = c
            for slot, i in enumerate(idx):
                term = term * sum(g[i][j] * vecs[slot][j] for j in range(self.alg.dim))
                if not term:
                    break
            total += term
        return total

    def is_symmetric(self):
        for idx, c in self.entries.items():
            for perm in itertools.permutations(idx):
                if self.entries.get(perm, 0) != c:
                    return False
        return True

    def scalar(self):
        if self.arity != 0:
            raise ValueError("only arity-0 tensors are scalars")
        return self.entries.get((), Fraction(0))


def validate(alg: GradedFrobeniusAlgebra) -> list[ModelError]:
    """Check every algebra invariant exhaustively; ``[]`` means OK."""
    problems: list[ModelError] = []
    n = alg.dim
    for i, d in enumerate(alg.degrees):
        if d % 2 or d < 0 or d > alg.top_degree:
            problems.append(OddDegreeBasis(
                f"basis element {alg.names[i]!r} has degree {d}", where=alg.names[i]))
    for (i, j), row in alg.mult.items():
        for k in row:
            if alg.degrees[k] != alg.degrees[i] + alg.degrees[j]:
                problems.append(DegreeViolation(
                    f"{alg.names[i]}*{alg.names[j]} has a component on {alg.names[k]} "
                    f"of degree {alg.degrees[k]} != {alg.degrees[i] + alg.degrees[j]}",
                    where=[alg.names[i], alg.names[j], alg.names[k]]))
    basis = [alg.basis_element(i).coeffs for i in range(n)]
    for i in range(n):
        for j in range(n):
            if alg._mul[i][j] != alg._mul[j][i]:
                problems.append(NonCommutative(
                    f"{alg.names[i]}*{alg.names[j]} != {alg.names[j]}*{alg.names[i]}",
                    where=[alg.names[i], alg.names[j]]))
    for i, j, k in itertools.product(range(n), repeat=3):
        left = alg.mul_coeffs(alg._mul[i][j], basis[k])
        right = alg.mul_coeffs(basis[i], alg._mul[j][k])
        if left != right:
            problems.append(NonAssociative(
                f"({alg.names[i]}*{alg.names[j]})*{alg.names[k]} != "
                f"{alg.names[i]}*({alg.names[j]}*{alg.names[k]})",
                where=[alg.names[i], alg.names[j], alg.names[k]]))
    for j in range(n):
        if alg._mul[alg.unit][j] != basis[j] or alg._mul[j][alg.unit] != basis[j]:
            problems.append(NotUnital(
                f"unit {alg.names[alg.unit]!r} does not act as identity on {alg.names[j]!r}",
                where=alg.names[j]))
    for k, t in enumerate(alg.counit):
        if t and alg.degrees[k] != alg.top_degree:
            problems.append(BadCounitSupport(
                f"counit is nonzero on {alg.names[k]!r} of degree {alg.degrees[k]}",
                where=alg.names[k]))
    if alg.degrees[alg.point] != alg.top_degree or alg.counit[alg.point] != 1:
        problems.append(BadPointClass(
            f"point class {alg.names[alg.point]!r} must have top degree and T(x) = 1",
            where=alg.names[alg.point]))
    if inverse_matrix([list(r) for r in alg.gram]) is None:
        problems.append(DegeneratePairing(
            "pairing matrix T(e_i e_j) is singular", where=[list(map(format_scalar, r)) for r in alg.gram]))
    for label, vec, deg in (("K", alg._K, 2), ("e", alg._e, alg.top_degree)):
        for k, c in enumerate(vec):
            if c and alg.degrees[k] != deg:
                problems.append(DegreeViolation(
                    f"{label} has a component on {alg.names[k]!r} of degree {alg.degrees[k]}",
                    where=[label, alg.names[k]]))
    return problems

