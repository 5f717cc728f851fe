from __future__ import annotations

import csv
import io
import json
import random
from fractions import Fraction

import pytest

import naklab.rings as rings_mod
from naklab.fock import CentralSign, FockVector, fock_pair
from naklab.operators import gtilde_class, ok_class
from naklab.rings import (
    GenerationFailure,
    NotReduced,
    build_ring,
    psi,
    psi_inverse,
    ring_product,
    structure_constants,
    structure_constants_csv,
    structure_constants_json,
    triple_product,
    verify_iso,
    verify_pairing,
)
from naklab.scalars import I

from conftest import HILBERT, ORBIFOLD, basis_states


@pytest.fixture(scope="module")
def rings_p2(P2):
    return {(side, n): build_ring(side, P2, n) for side in (ORBIFOLD, HILBERT) for n in (1, 2, 3)}


def test_level_one_is_identity(P2, rings_p2):
    for side in (ORBIFOLD, HILBERT):
        R = rings_p2[side, 1]
        for i, mono in enumerate(R.basis):
            assert mono == ((-1, i),)
            assert R.reduction[mono] == {((0, i),): 1} or (P2.degrees[i] == 0 and R.reduction[mono] == {(): 1})


def test_level_one_table_is_algebra_table(P2, rings_p2):
    for side in (ORBIFOLD, HILBERT):
        table = structure_constants(rings_p2[side, 1])
        for i in range(P2.dim):
            for j in range(P2.dim):
                want = {k: c for k, c in enumerate(P2.mul_basis_coeffs(P2.basis_element(i).coeffs, j)) if c}
                assert table.get((i, j), {}) == want


def test_a_minus_two_reduction(P2, rings_p2):
    R = rings_p2[HILBERT, 2]
    for i in range(P2.dim):
        mono = ((-2, i),)
        v = FockVector(P2, {mono: 1})
        assert v == gtilde_class(P2, 1, P2.basis_element(i), 2) * -2
        if P2.degrees[i] + 2 > 0:
            assert R.reduction[mono] == {((1, i),): -2}


def test_orbifold_product_example(P2, rings_p2):
    R = rings_p2[ORBIFOLD, 2]
    h = P2.element("h")
    v = FockVector.monomial(P2, [(2, "1")])
    assert ring_product(R, ok_class(P2, 0, h, 2), v) == FockVector.monomial(P2, [(2, "h")]) * 2


def test_unit_law(P2, rings_p2):
    for R in rings_p2.values():
        for w in basis_states(P2, R.n):
            assert ring_product(R, R.unit, w) == w
            assert ring_product(R, w, R.unit) == w


def test_commutative_and_associative(P2, rings_p2):
    rng = random.Random(3)
    for R in rings_p2.values():
        states = basis_states(P2, R.n)
        for _ in range(15):
            u, v, w = (rng.choice(states) for _ in range(3))
            assert ring_product(R, u, v) == ring_product(R, v, u)
            assert ring_product(R, ring_product(R, u, v), w) == ring_product(R, u, ring_product(R, v, w))


def test_expression_independence(P2, rings_p2):
    # evaluating two different generator words with equal classes gives equal products
    R = rings_p2[ORBIFOLD, 3]
    for mono in R.basis:
        v = FockVector(P2, {mono: 1})
        via_words = FockVector(P2, {})
        for word, c in R.reduction[mono].items():
            via_words = via_words + R.evaluate(word) * c
        assert via_words == v


def test_triple_symmetry(P2, rings_p2):
    rng = random.Random(5)
    R = rings_p2[HILBERT, 3]
    states = basis_states(P2, 3)
    for _ in range(10):
        a, b, c = (rng.choice(states) for _ in range(3))
        vals = {triple_product(R, x, y, z)
                for x, y, z in ((a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a))}
        assert len(vals) == 1
    for v in states[:5]:
        for w in states[:5]:
            assert triple_product(R, R.unit, v, w) == fock_pair(HILBERT, v, w)


def test_degree_additivity(P2, rings_p2):
    R = rings_p2[ORBIFOLD, 3]
    for v in basis_states(P2, 3):
        for w in basis_states(P2, 3):
            out = ring_product(R, v, w)
            for mono in out.terms:
                assert FockVector(P2, {mono: 1}).degree == v.degree + w.degree


def test_not_reduced(P2, rings_p2):
    R = rings_p2[ORBIFOLD, 2]
    with pytest.raises(NotReduced):
        ring_product(R, FockVector.monomial(P2, [(1, "h")]), R.unit)


def test_psi_examples(P2):
    v = FockVector.monomial(P2, [(1, "h"), (1, "h")])
    assert psi(v) == v
    w = FockVector.monomial(P2, [(2, "1")])
    assert psi(w) == w * (-I)
    assert psi_inverse(psi(w)) == w


def test_rank_certificate(P2, rings_p2):
    R = rings_p2[HILBERT, 3]
    total = sum(c["rank"] for c in R.rank_certificate.values())
    assert total == len(R.basis)


def test_generation_failure_is_loud(P2, monkeypatch):
    from naklab.operators import ok_operator

    def crippled(alg, k, alpha):
        return ok_operator(alg, 0, alg.one) if k else ok_operator(alg, k, alpha)

    monkeypatch.setattr(rings_mod, "ok_operator", crippled)
    with pytest.raises(GenerationFailure) as exc:
        build_ring(ORBIFOLD, P2, 2)
    assert exc.value.corank > 0


def test_iso_and_pairing(P2):
    assert verify_iso(P2, 2).passed
    assert verify_pairing(P2, 3).passed


def test_mutation_breaks_iso(P2):
    rep = verify_iso(P2, 2, mutate="(-2,2)")
    assert not rep.passed
    assert rep.failures[0]["inputs"]["n"] == 2


def test_csv_round_trip(P2, rings_p2):
    R1, R2 = rings_p2[ORBIFOLD, 1], rings_p2[ORBIFOLD, 2]
    text = structure_constants_csv([R2, R1])
    rows = list(csv.DictReader(io.StringIO(text)))
    t1 = structure_constants(R1)
    level1 = {(int(r["i"]), int(r["j"]), int(r["k"])): Fraction(r["re"])
              for r in rows if int(r["i"]) < len(R1.basis)}
    assert level1 == {(i, j, k): c for (i, j), col in t1.items() for k, c in col.items()}
    off = len(R1.basis)
    t2 = structure_constants(R2)
    level2 = {(int(r["i"]) - off, int(r["j"]) - off, int(r["k"]) - off): Fraction(r["re"]) + Fraction(r["im"]) * I
              for r in rows if int(r["i"]) >= off}
    assert level2 == {(i, j, k): c for (i, j), col in t2.items() for k, c in col.items()}
    assert text == structure_constants_csv([R1, R2])


def test_json_export(P2, rings_p2):
    doc = json.loads(structure_constants_json(rings_p2[HILBERT, 2]))
    assert doc["side"] == "hilbert" and doc["levels"] == [2]
    assert len(doc["basis"]) == len(rings_p2[HILBERT, 2].basis)


def test_transported_tables_agree(P2, rings_p2):
    orb, qc = rings_p2[ORBIFOLD, 3], rings_p2[HILBERT, 3]
    t_orb, t_qc = structure_constants(orb), structure_constants(qc)
    from naklab.fock import monomial_age
    from naklab.scalars import i_power
    age = [monomial_age(m) for m in orb.basis]
    moved = {key: {k: c * i_power(age[key[0]] + age[key[1]] - age[k]) for k, c in col.items()}
             for key, col in t_orb.items()}
    assert moved == t_qc


def test_side_parse(P2):
    assert build_ring("orbifold", P2, 1).side == CentralSign.ORBIFOLD
    with pytest.raises(ValueError):
        build_ring(ORBIFOLD, P2, 0)
