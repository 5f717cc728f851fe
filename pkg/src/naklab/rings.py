"""The orbifold ring and the quantum-corrected ring at a fixed level ``n``.

Both rings are built the same way: the generator classes
``(k, e_i)`` with ``0 <= k <= n-1`` act on the level-``n`` Fock piece by
their multiplication operators (``O_k`` on the orbifold side, ``G~_k`` on
the Hilbert side).  Every Nakajima basis vector is then written as a
polynomial in generators applied to the unit class, by exact elimination
degree by degree.  A product ``v * w`` reduces ``v`` to such a polynomial
and applies the operators to ``w``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .fock import (
    CentralSign,
    FockVector,
    fock_pair,
    format_monomial,
    format_vector,
    monomial_age,
    monomial_degree,
    nakajima_basis,
)
from .linalg import IncrementalBasis
from .operators import gtilde_operator, ok_operator, unit_class
from .scalars import format_scalar, i_power, real_imag

__all__ = [
    "GenerationFailure",
    "NotReduced",
    "RingModel",
    "VerificationReport",
    "build_ring",
    "psi",
    "psi_inverse",
    "ring_product",
    "structure_constants",
    "structure_constants_csv",
    "structure_constants_json",
    "reduction_table_json",
    "triple_product",
    "verify_iso",
    "verify_pairing",
]


class GenerationFailure(ArithmeticError):
    """The generator monomials do not span some degree piece."""

    def __init__(self, degree, corank, side=None, n=None):
        self.degree = degree
        self.corank = corank
        super().__init__(
            f"generators fail to span degree {degree} (corank {corank}"
            + (f", side {side}, n={n}" if side is not None else "") + ")")


class NotReduced(KeyError):
    pass


def _side(side):
    if isinstance(side, str):
        return CentralSign.parse(side)
    return CentralSign(side)


@dataclass
class RingModel:
    side: CentralSign
    alg: object
    n: int
    generators: list
    operators: dict
    basis: tuple
    reduction: dict
    rank_certificate: dict
    _product_cache: dict = field(default_factory=dict, repr=False)

    def generator_degree(self, g):
        k, i = g
        return self.alg.degrees[i] + 2 * k

    def generator_name(self, g):
        k, i = g
        letter = "O" if self.side == CentralSign.ORBIFOLD else "Gt"
        return f"{letter}[{k}]({self.alg.names[i]})"

    def evaluate(self, word, v=None):
        """Apply the generator operators of ``word`` right to left, starting
        at ``v`` (default: the unit class)."""
        cur = unit_class(self.alg, self.n) if v is None else v
        for g in reversed(word):
            cur = self.operators[g](cur)
        return cur

    @property
    def unit(self):
        return unit_class(self.alg, self.n)

    def index(self, mono):
        return self._index_map[mono]

    @property
    def _index_map(self):
        m = self.__dict__.get("_imap")
        if m is None:
            m = self.__dict__["_imap"] = {mono: i for i, mono in enumerate(self.basis)}
        return m


def _generator_words(gens, degree_of, degree):
    """Multisets of generators of total ``degree``, by factor count then lex."""
    gens = sorted(gens)
    out = []

    def rec(start, left, count, word):
        if left == 0:
            if count == 0:
                out.append(tuple(word))
            return
        if count == 0:
            return
        for pos in range(start, len(gens)):
            g = gens[pos]
            d = degree_of(g)
            if d <= left:
                word.append(g)
                rec(pos, left - d, count - 1, word)
                word.pop()

    for count in range(0, degree // 2 + 1):
        start = len(out)
        rec(0, degree, count, [])
        yield from out[start:]


def build_ring(side, alg, n, mutate=None):
    """Build the ring at level ``n`` by constructive generator reduction.

    ``mutate`` is forwarded to the Hilbert-side operators (negative control).
    Raises :class:`GenerationFailure` when a degree piece is not spanned.
    """
    side = _side(side)
    if n < 1:
        raise ValueError("n must be >= 1")
    gens = []
    ops = {}
    for k in range(n):
        for i in range(alg.dim):
            if alg.degrees[i] + 2 * k == 0:
                continue  # the degree-0 generator is n times the unit
            g = (k, i)
            gens.append(g)
            alpha = alg.basis_element(i)
            if side == CentralSign.ORBIFOLD:
                ops[g] = ok_operator(alg, k, alpha)
            else:
                ops[g] = gtilde_operator(alg, k, alpha, mutate=mutate)

    def deg(g):
        return alg.degrees[g[1]] + 2 * g[0]

    basis = nakajima_basis(alg, n)
    by_degree = {}
    for mono in basis:
        by_degree.setdefault(monomial_degree(alg, mono), []).append(mono)

    unit = unit_class(alg, n)
    values = {(): unit}

    def value(word):
        hit = values.get(word)
        if hit is None:
            hit = values[word] = ops[word[0]](value(word[1:]))
        return hit

    reduction = {}
    certificate = {}
    for d in sorted(by_degree):
        target = len(by_degree[d])
        piece = set(by_degree[d])
        span = IncrementalBasis()
        tried = 0
        for word in _generator_words(gens, deg, d):
            tried += 1
            terms = value(word).terms
            if not piece.issuperset(terms):
                continue  # off-degree output cannot span this piece
            span.add(terms, word)
            if len(span) == target:
                break
        if len(span) < target:
            raise GenerationFailure(d, target - len(span), side.name.lower(), n)
        certificate[d] = {"rank": len(span), "words_tried": tried}
        for mono in by_degree[d]:
            reduction[mono] = span.express({mono: Fraction(1)})
    return RingModel(side, alg, n, gens, ops, basis, reduction, certificate)


def _reduce(R, v):
    poly = {}
    for mono, c in v.terms.items():
        red = R.reduction.get(mono)
        if red is None:
            raise NotReduced(f"{format_monomial(R.alg, mono, R.side)} is not a level-{R.n} basis monomial")
        for word, a in red.items():
            nv = poly.get(word, 0) + c * a
            if nv:
                poly[word] = nv
            else:
                poly.pop(word, None)
    return poly


def _basis_product(R, m1, m2):
    key = (m1, m2)
    hit = R._product_cache.get(key)
    if hit is None:
        w = FockVector(R.alg, {m2: Fraction(1)})
        out = FockVector(R.alg, {})
        for word, a in R.reduction[m1].items():
            out = out + R.evaluate(word, w) * a
        hit = R._product_cache[key] = out
    return hit


def ring_product(R, v, w):
    """``v * w`` in the ring ``R``."""
    for mono in w.terms:
        if mono not in R.reduction:
            raise NotReduced(f"{format_monomial(R.alg, mono, R.side)} is not a level-{R.n} basis monomial")
    _reduce(R, v)  # validates v
    out = {}
    for m1, c1 in v.terms.items():
        for m2, c2 in w.terms.items():
            for k, c in _basis_product(R, m1, m2).terms.items():
                nv = out.get(k, 0) + c1 * c2 * c
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
    return FockVector(R.alg, out)


def triple_product(R, v, w, u):
    """``<v * w, u>`` with the side's own pairing."""
    return fock_pair(R.side, ring_product(R, v, w), u)


# -- Psi -------------------------------------------------------------------------


def psi(v):
    """Orbifold to Hilbert: each monomial picks up ``i^(-age)``."""
    return FockVector(v.alg, {m: c * i_power(-monomial_age(m)) for m, c in v.terms.items()})


def psi_inverse(v):
    return FockVector(v.alg, {m: c * i_power(monomial_age(m)) for m, c in v.terms.items()})


# -- structure constants -----------------------------------------------------------


def structure_constants(R):
    """``{(i, j): {k: c}}`` over the canonical level-``n`` basis indices."""
    table = {}
    idx = R._index_map
    for i, m1 in enumerate(R.basis):
        for j, m2 in enumerate(R.basis):
            prod = _basis_product(R, m1, m2)
            if prod:
                table[i, j] = {idx[m]: c for m, c in sorted(prod.terms.items(), key=lambda t: idx[t[0]])}
    return table


def _as_list(rings):
    return list(rings) if isinstance(rings, (list, tuple)) else [rings]


def _global_rows(rings, tables=None):
    """Rows over the global basis: levels in increasing order, each level's
    canonical basis concatenated, so level 1 occupies the first indices."""
    rings = sorted(_as_list(rings), key=lambda R: R.n)
    offset = 0
    for pos, R in enumerate(rings):
        table = structure_constants(R) if tables is None else tables[pos]
        for (i, j) in sorted(table):
            for k, c in sorted(table[i, j].items()):
                re, im = real_imag(c)
                yield (monomial_degree(R.alg, R.basis[k]), offset + i, offset + j, offset + k, re, im)
        offset += len(R.basis)


def structure_constants_csv(rings, tables=None):
    """CSV ``degree,i,j,k,re,im`` for one ring or several levels of one side."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["degree", "i", "j", "k", "re", "im"])
    for d, i, j, k, re, im in _global_rows(rings, tables):
        w.writerow([d, i, j, k, format_scalar(re), format_scalar(im)])
    return buf.getvalue()


def structure_constants_json(rings, tables=None):
    rings = sorted(_as_list(rings), key=lambda R: R.n)
    first = rings[0]
    basis = []
    offset = 0
    for R in rings:
        for i, m in enumerate(R.basis):
            basis.append({"index": offset + i, "level": R.n,
                          "monomial": format_monomial(R.alg, m, R.side),
                          "degree": monomial_degree(R.alg, m)})
        offset += len(R.basis)
    doc = {
        "model": first.alg.name,
        "side": first.side.name.lower(),
        "levels": [R.n for R in rings],
        "basis": basis,
        "constants": [
            {"degree": d, "i": i, "j": j, "k": k, "re": format_scalar(re), "im": format_scalar(im)}
            for d, i, j, k, re, im in _global_rows(rings, tables)
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def reduction_table_json(R):
    entries = []
    for i, mono in enumerate(R.basis):
        poly = sorted(R.reduction[mono].items(), key=lambda t: (len(t[0]), t[0]))
        entries.append({
            "index": i,
            "monomial": format_monomial(R.alg, mono, R.side),
            "polynomial": [
                {"generators": [R.generator_name(g) for g in word], "coef": format_scalar(c)}
                for word, c in poly
            ],
        })
    doc = {"model": R.alg.name, "side": R.side.name.lower(), "n": R.n,
           "rank_certificate": {str(d): v for d, v in sorted(R.rank_certificate.items())},
           "reduction": entries}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# -- verification ------------------------------------------------------------------


@dataclass
class VerificationReport:
    suite: str
    checks: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def record(self, ok, inputs, expected=None, got=None):
        """Count one check; on failure store its details.  ``inputs`` may be
        a zero-argument callable returning ``(inputs, expected, got)`` so
        passing checks never pay for formatting."""
        self.checks += 1
        if not ok:
            if callable(inputs):
                inputs, expected, got = inputs()
            self.failures.append({"inputs": inputs, "expected": expected, "got": got})

    def merge(self, other):
        self.checks += other.checks
        self.failures.extend(other.failures)
        return self

    def as_dict(self):
        return {"suite": self.suite, "checks": self.checks, "passed": self.passed,
                "failures": self.failures}


def verify_iso(alg, n, mutate=None, stop_at_first=True):
    """``Psi(v *orb w) == Psi(v) *qc Psi(w)`` for all level-``n`` basis pairs."""
    report = VerificationReport("iso")
    orb = build_ring(CentralSign.ORBIFOLD, alg, n)
    qc = build_ring(CentralSign.HILBERT, alg, n, mutate=mutate)
    for m1 in orb.basis:
        v = FockVector(alg, {m1: Fraction(1)})
        for m2 in orb.basis:
            w = FockVector(alg, {m2: Fraction(1)})
            lhs = psi(ring_product(orb, v, w))
            rhs = ring_product(qc, psi(v), psi(w))
            ok = lhs == rhs
            report.record(ok, lambda: ({"model": alg.name, "n": n,
                 "v": format_vector(v, CentralSign.ORBIFOLD),
                 "w": format_vector(w, CentralSign.ORBIFOLD)}, format_vector(lhs), format_vector(rhs)))
            if not ok and stop_at_first:
                return report
    return report


def verify_pairing(alg, n):
    """Orbifold pairing equals the Hilbert pairing after ``Psi``, levels ``<= n``."""
    report = VerificationReport("pairing")
    for level in range(n + 1):
        basis = nakajima_basis(alg, level)
        for m1 in basis:
            v = FockVector(alg, {m1: Fraction(1)})
            for m2 in basis:
                w = FockVector(alg, {m2: Fraction(1)})
                a = fock_pair(CentralSign.ORBIFOLD, v, w)
                b = fock_pair(CentralSign.HILBERT, psi(v), psi(w))
                report.record(a == b, lambda: ({"model": alg.name, "level": level,
                               "v": format_vector(v, CentralSign.ORBIFOLD),
                               "w": format_vector(w, CentralSign.ORBIFOLD)}, format_scalar(a), format_scalar(b)))
    return report
