"""Built-in surface cohomology models.

All are even-graded with top degree 4:

* ``p2``      -- the projective plane: ``h^2 = x``, ``K = -3h``, ``e = 3x``
* ``p1xp1``   -- ``a^2 = b^2 = 0``, ``ab = x``, ``K = -2a - 2b``, ``e = 4x``
* ``blowup(r)`` -- the plane blown up at ``r`` points (``f1`` is ``r = 1``)
* ``k0``      -- a synthetic model with ``K = 0`` and ``e = 24x``
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .frobenius import GradedFrobeniusAlgebra

__all__ = ["BUILTIN_MODELS", "blowup", "get_model", "k0", "p1xp1", "p2"]


def _surface(name, h2_names, intersection, K, e_deg):
    """Surface with ``H^2`` basis ``h2_names`` and the given intersection
    form; ``e_deg`` is the Euler number."""
    names = ["1"] + list(h2_names) + ["x"]
    basis = [("1", 0)] + [(n, 2) for n in h2_names] + [("x", 4)]
    mult = {}
    for n in names:
        mult["1", n] = {n: 1}
        if n != "1":
            mult[n, "1"] = {n: 1}
    for i, a in enumerate(h2_names):
        for j, b in enumerate(h2_names):
            c = intersection[i][j]
            if c:
                mult[a, b] = {"x": c}
    return GradedFrobeniusAlgebra(
        name=name,
        basis=basis,
        mult=mult,
        counit={"x": 1},
        unit="1",
        point="x",
        K=K,
        e={"x": e_deg},
    )


@lru_cache(maxsize=None)
def p2():
    return _surface("P2", ["h"], [[1]], {"h": -3}, 3)


@lru_cache(maxsize=None)
def p1xp1():
    return _surface("P1xP1", ["a", "b"], [[0, 1], [1, 0]], {"a": -2, "b": -2}, 4)


@lru_cache(maxsize=None)
def blowup(r: int):
    """The plane blown up at ``r`` points: ``H^2 = -E_i^2 = x``."""
    h2 = ["H"] + [f"E{i}" for i in range(1, r + 1)]
    form = [[Fraction(0)] * (r + 1) for _ in range(r + 1)]
    form[0][0] = Fraction(1)
    for i in range(1, r + 1):
        form[i][i] = Fraction(-1)
    K = {"H": -3}
    K.update({f"E{i}": 1 for i in range(1, r + 1)})
    return _surface(f"Bl{r}P2", h2, form, K, 3 + r)


@lru_cache(maxsize=None)
def k0():
    return _surface("K0", ["h"], [[2]], {}, 24)


BUILTIN_MODELS = {
    "p2": p2,
    "p1xp1": p1xp1,
    "f1": lambda: blowup(1),
    "bl2": lambda: blowup(2),
    "k0": k0,
}


def get_model(name_or_path: str) -> GradedFrobeniusAlgebra:
    """A built-in model by name, otherwise a JSON model file path."""
    key = name_or_path.lower()
    if key in BUILTIN_MODELS:
        return BUILTIN_MODELS[key]()
    return GradedFrobeniusAlgebra.load(name_or_path)
