from __future__ import annotations

import itertools
import json
from fractions import Fraction

import pytest

from naklab.frobenius import (
    DegeneratePairing,
    GradedFrobeniusAlgebra,
    ModelParseError,
    validate,
)
from naklab.models import BUILTIN_MODELS


def _model(**overrides):
    spec = dict(
        name="T",
        basis=[("1", 0), ("h", 2), ("x", 4)],
        mult={("1", "1"): {"1": 1}, ("1", "h"): {"h": 1}, ("h", "1"): {"h": 1},
              ("1", "x"): {"x": 1}, ("x", "1"): {"x": 1}, ("h", "h"): {"x": 1}},
        counit={"x": 1}, unit="1", point="x", K={"h": -3}, e={"x": 3},
    )
    spec.update(overrides)
    return GradedFrobeniusAlgebra(**spec)


@pytest.mark.parametrize("name", sorted(BUILTIN_MODELS))
def test_builtin_models_validate(name):
    assert validate(BUILTIN_MODELS[name]()) == []


def test_zero_counit_is_degenerate():
    kinds = {p.kind for p in validate(_model(counit={}))}
    assert "DegeneratePairing" in kinds


def test_idempotent_h_violates_degree():
    mult = dict(_model().mult)
    bad = {("1", "1"): {"1": 1}, ("1", "h"): {"h": 1}, ("h", "1"): {"h": 1},
           ("1", "x"): {"x": 1}, ("x", "1"): {"x": 1}, ("h", "h"): {"h": 1}}
    kinds = {p.kind for p in validate(_model(mult=bad))}
    assert kinds & {"DegreeViolation", "NonAssociative"}
    assert mult  # the fixture itself is untouched


def test_odd_degree_rejected():
    problems = validate(_model(basis=[("1", 0), ("h", 1), ("x", 4)]))
    odd = [p for p in problems if p.kind == "OddDegreeBasis"]
    assert odd and "h" in str(odd[0])


def test_gram_inverse_raises_on_degenerate_model():
    with pytest.raises(DegeneratePairing):
        _model(counit={}).gram_inverse


def test_multiply_examples(P2):
    h, one, x = P2.element("h"), P2.one, P2.x
    assert P2.multiply(h, h) == x
    assert P2.multiply(one, h) == h
    assert P2.multiply(x, h) == P2.zero


def test_pair_examples(P2):
    h = P2.element("h")
    assert P2.pair(h, h) == 1
    assert P2.pair(P2.one, P2.x) == 1
    assert P2.pair(P2.one, h) == 0


def test_coproduct_examples(P2):
    # independent oracle: solve <tau, b_i (x) b_j> = T(b_i b_j) by brute force
    assert P2.coproduct(P2.one, 2).entries == {(0, 2): 1, (1, 1): 1, (2, 0): 1}
    assert P2.coproduct(P2.x, 2).entries == {(2, 2): 1}
    h = P2.element("h")
    assert P2.coproduct(h, 1).entries == {(1,): 1}
    assert P2.coproduct(P2.x, 0).scalar() == 1
    assert P2.coproduct(h, 0).scalar() == 0


@pytest.mark.parametrize("name", ["p2", "p1xp1", "bl2", "k0"])
def test_coproduct_adjunction(name):
    alg = BUILTIN_MODELS[name]()
    basis = alg.basis()
    for k in (2, 3):
        for a in basis:
            tau = alg.coproduct(a, k)
            for bs in itertools.product(basis, repeat=k):
                prod = a
                for b in bs:
                    prod = alg.multiply(prod, b)
                assert tau.pair(bs) == alg.integrate(prod)


@pytest.mark.parametrize("name", ["p2", "p1xp1"])
def test_coassociativity(name):
    alg = BUILTIN_MODELS[name]()
    for a in alg.basis():
        for k in range(2, 6):
            prev = alg.coproduct(a, k - 1).entries
            # apply tau_2 to the first slot of tau_{k-1}
            expanded = {}
            for idx, c in prev.items():
                for (i, j), d in alg.coproduct(alg.basis_element(idx[0]), 2).entries.items():
                    key = (i, j) + idx[1:]
                    expanded[key] = expanded.get(key, 0) + c * d
            expanded = {k2: v for k2, v in expanded.items() if v}
            assert expanded == alg.coproduct(a, k).entries


def test_coproduct_symmetric(P1P1):
    for a in P1P1.basis():
        for k in (2, 3, 4):
            assert P1P1.coproduct(a, k).is_symmetric()


def test_dual_basis(P1P1):
    for i in range(P1P1.dim):
        for j in range(P1P1.dim):
            ej = P1P1.element(list(P1P1.dual_basis[j]))
            assert P1P1.pair(P1P1.basis_element(i), ej) == (1 if i == j else 0)


@pytest.mark.parametrize("name", sorted(BUILTIN_MODELS))
def test_json_round_trip_is_canonical(name):
    alg = BUILTIN_MODELS[name]()
    text = alg.to_json()
    again = GradedFrobeniusAlgebra.from_json(text)
    assert again.to_json() == text
    assert validate(again) == []


def test_malformed_json():
    with pytest.raises(ModelParseError):
        GradedFrobeniusAlgebra.from_json("{not json")
    with pytest.raises(ModelParseError):
        GradedFrobeniusAlgebra.from_json(json.dumps({"name": "x"}))


def test_rational_strings_are_reduced(P2):
    doc = json.loads(P2.to_json())
    assert doc["K"] == {"h": "-3"}
    half = _model(K={"h": Fraction(-6, 4)})
    assert json.loads(half.to_json())["K"] == {"h": "-3/2"}
