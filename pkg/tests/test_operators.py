from __future__ import annotations

from fractions import Fraction

import pytest

from naklab.fock import FockVector, commutator, cube_zero_mode, single_mode
from naklab.operators import (
    RankDeficient,
    boundary,
    curly_closed_form,
    derivative_tower,
    extract_universal_f,
    gtilde_class,
    gtilde_operator,
    lehn_g1,
    ok_class,
    ok_operator,
    unit_class,
)
from naklab.models import blowup, p1xp1, p2

from conftest import HILBERT, ORBIFOLD, basis_states, states_upto


def test_lehn_g1_without_canonical_class(K0):
    cube = cube_zero_mode(HILBERT, K0.one, K0).scaled(Fraction(-1, 6))
    g = boundary(K0)
    for v in states_upto(K0, 5):
        assert g(v) == cube(v)


def test_lehn_g1_kills_level_one(P2):
    for v in basis_states(P2, 1):
        assert boundary(P2)(v) == 0


def test_lehn_g1_k_term(P2):
    vac = FockVector.vacuum(P2)
    d = boundary(P2)
    for b in P2.basis():
        got = commutator(d, single_mode(HILBERT, -2, b, P2), vac)
        kb = P2.element(P2.mul_coeffs(P2._K, b.coeffs))
        k_term = single_mode(HILBERT, -2, kb, P2)(vac)
        cube_part = commutator(cube_zero_mode(HILBERT, P2.one, P2).scaled(Fraction(-1, 6)),
                               single_mode(HILBERT, -2, b, P2), vac)
        assert got - cube_part == k_term


def test_round_minus_curly_is_k_term(P2):
    for b in P2.basis():
        kb = P2.element(P2.mul_coeffs(P2._K, b.coeffs))
        rnd = derivative_tower(HILBERT, P2, -2, b, 1, kind="round")
        cur = derivative_tower(HILBERT, P2, -2, b, 1)
        k_term = single_mode(HILBERT, -2, kb, P2)
        for v in states_upto(P2, 3):
            assert rnd(v) - cur(v) == k_term(v)


def test_tower_zero_is_base_mode(P2):
    h = P2.element("h")
    for sign in (HILBERT, ORBIFOLD):
        t = derivative_tower(sign, P2, -3, h, 0)
        base = single_mode(sign, -3, h, P2)
        for v in states_upto(P2, 2):
            assert t(v) == base(v)


def test_round_tower_rejects_orbifold(P2):
    with pytest.raises(ValueError):
        derivative_tower(ORBIFOLD, P2, -1, P2.one, 1, kind="round")


@pytest.mark.parametrize("sign", [HILBERT, ORBIFOLD])
@pytest.mark.parametrize("m", [-2, -1, 1, 2])
@pytest.mark.parametrize("k", [0, 1, 2])
def test_closed_form_matches_tower(P1P1, sign, m, k):
    for a in P1P1.basis():
        closed = curly_closed_form(sign, P1P1, m, a, k)
        tower = derivative_tower(sign, P1P1, m, a, k)
        for v in states_upto(P1P1, 3):
            assert closed(v) == tower(v)


def test_closed_form_k0_is_mode(P2):
    h = P2.element("h")
    c = curly_closed_form(HILBERT, P2, -2, h, 0)
    for v in states_upto(P2, 3):
        assert c(v) == single_mode(HILBERT, -2, h, P2)(v)


def test_closed_form_rejects_zero_mode(P2):
    with pytest.raises(ValueError):
        curly_closed_form(HILBERT, P2, 0, P2.one, 1)


def test_ok_examples(P2):
    v = FockVector.monomial(P2, [(2, "1")])
    assert ok_operator(P2, 0, P2.element("h"))(v) == FockVector.monomial(P2, [(2, "h")]) * 2
    o0 = ok_operator(P2, 0, P2.one)
    g0 = gtilde_operator(P2, 0, P2.one)
    for w in states_upto(P2, 4):
        assert o0(w) == w * w.level
        assert g0(w) == w * w.level


def test_gtilde_one_examples(P2):
    v = FockVector.monomial(P2, [(1, "1"), (1, "1")])
    assert gtilde_operator(P2, 1, P2.one)(v) == -FockVector.monomial(P2, [(2, "1")])
    cube = cube_zero_mode(HILBERT, P2.one, P2).scaled(Fraction(-1, 6))
    g1 = gtilde_operator(P2, 1, P2.one)
    for w in states_upto(P2, 5):
        assert g1(w) == cube(w)


def test_ok_one_is_orbifold_cube(P2):
    # a length-one lambda cannot have size zero, so no e_X family appears at k = 1
    cube = cube_zero_mode(ORBIFOLD, P2.one, P2).scaled(Fraction(-1, 6))
    o1 = ok_operator(P2, 1, P2.one)
    for w in states_upto(P2, 5):
        assert o1(w) == cube(w)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_low_classes_closed_forms(P2, n):
    for a in P2.basis():
        if n >= 1:
            want0 = FockVector(P2, {tuple(sorted(m + ((-1, P2.basis().index(a)),))): c
                                    for m, c in unit_class(P2, n - 1).terms.items()})
            assert gtilde_class(P2, 0, a, n) == want0
            assert ok_class(P2, 0, a, n) == want0
        if n >= 2:
            want1 = FockVector(P2, {tuple(sorted(m + ((-2, P2.basis().index(a)),))): c * Fraction(-1, 2)
                                    for m, c in unit_class(P2, n - 2).terms.items()})
            assert gtilde_class(P2, 1, a, n) == want1
            assert ok_class(P2, 1, a, n) == want1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_class_operator_consistency(P1P1, n):
    u = unit_class(P1P1, n)
    for k in range(4):
        for a in P1P1.basis():
            assert ok_operator(P1P1, k, a)(u) == ok_class(P1P1, k, a, n)
            assert gtilde_operator(P1P1, k, a)(u) == gtilde_class(P1P1, k, a, n)


def test_degree_homogeneity(P2):
    # O_k(alpha) raises cohomological degree by 2k + deg(alpha)
    for k in range(3):
        for a in P2.basis():
            op = ok_operator(P2, k, a)
            for v in states_upto(P2, 4):
                out = op(v)
                for mono in out.terms:
                    w = FockVector(P2, {mono: 1})
                    assert w.degree == v.degree + 2 * k + a.degree


def test_mutation_changes_operator(P2):
    base = gtilde_operator(P2, 0, P2.one)
    mut = gtilde_operator(P2, 0, P2.one, mutate="(-2,2)")
    v = FockVector.monomial(P2, [(2, "1")])
    assert base(v) != mut(v)


def test_negative_k_rejected(P2):
    with pytest.raises(ValueError):
        ok_operator(P2, -1, P2.one)
    with pytest.raises(ValueError):
        gtilde_operator(P2, -1, P2.one)


def test_extract_f_k1():
    fit = extract_universal_f(1, "K", "(-3)", [p2(), blowup(1)], max_level=4)
    assert fit.value == 3
    assert set(fit.per_model) == {"P2", "Bl1P2"}


def test_extract_f_empty_k2():
    fit = extract_universal_f(1, "K2", "(-2)", [p2()])
    assert fit.empty and fit.value is None


def test_extract_f_matches_across_models():
    a = extract_universal_f(1, "K", "(-2)", [p2()], max_level=3)
    b = extract_universal_f(1, "K", "(-2)", [p1xp1()], max_level=3)
    assert a.value == b.value == 1


def test_extract_f_needs_models():
    with pytest.raises(RankDeficient):
        extract_universal_f(1, "K", "(-2)", [], max_level=3)
