"""Verification suites behind ``naklab verify``.

Each suite splits into independent tasks keyed by a sortable tuple.  Tasks
run serially or on a process pool bounded by ``NAKLAB_WORKERS``; results are
merged in key order, so reports do not depend on scheduling.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from math import factorial

from .fock import (
    CentralSign,
    FockVector,
    apply_modes,
    commutator,
    format_vector,
    mode_string_operator,
    monomial_age,
    nakajima_basis,
    single_mode,
    tau_commutator,
)
from .frobenius import TensorElement
from .models import get_model
from .operators import (
    curly_closed_form,
    cube_zero_mode,
    derivative_tower,
    gtilde_class,
    gtilde_operator,
    ok_class,
    ok_operator,
    orbifold_bracket_closed_form,
    unit_class,
)
from .rings import VerificationReport, psi, psi_inverse, verify_iso, verify_pairing
from .scalars import format_scalar, i_power

__all__ = ["SUITES", "run_suite", "run_suites", "workers_from_env"]

HILBERT = CentralSign.HILBERT
ORBIFOLD = CentralSign.ORBIFOLD

MAX_MODE = 6
TAU_MAX_LEVEL = 5
TOWER_MAX_LEVEL = 5


def workers_from_env():
    try:
        return max(1, int(os.environ.get("NAKLAB_WORKERS", "1")))
    except ValueError:
        return 1


def _states(alg, level):
    return [FockVector(alg, {m: 1}) for m in nakajima_basis(alg, level)]


def _fmt(v, sign=HILBERT):
    return format_vector(v, sign) if isinstance(v, FockVector) else format_scalar(v)


# -- individual task bodies ----------------------------------------------------------


def _task_heisenberg(alg, level, seed):
    rep = VerificationReport("heisenberg")
    modes = [m for m in range(-MAX_MODE, MAX_MODE + 1) if m]
    for sign in (HILBERT, ORBIFOLD):
        ops = {(m, i): single_mode(sign, m, alg.basis_element(i), alg)
               for m in modes for i in range(alg.dim)}
        gram = alg.gram
        keys = list(ops)
        zero = FockVector(alg, {})
        for v in _states(alg, level):
            first = {key: ops[key](v) for key in keys}
            for (m, i) in keys:
                for (n, j) in keys:
                    a, b = first[n, j], first[m, i]
                    got = (ops[m, i](a) if a else a) - (ops[n, j](b) if b else b)
                    central = int(sign) * m * gram[i][j] if m == -n else 0
                    want = v * central if central else zero
                    rep.record(got == want, lambda: (
                        {"side": sign.name.lower(), "m": m, "n": n,
                         "i": alg.names[i], "j": alg.names[j], "state": _fmt(v, sign)},
                        _fmt(want, sign), _fmt(got, sign)))
    return rep


def _random_modes(rng, length):
    return tuple(rng.choice([m for m in range(-3, 4) if m]) for _ in range(length))


def _task_tau(alg, index, seed, samples):
    rep = VerificationReport("tau")
    rng = random.Random(f"{seed}:tau:{alg.name}:{index}")
    for s in range(samples):
        sign = rng.choice((HILBERT, ORBIFOLD))
        ns = _random_modes(rng, rng.randint(1, 3))
        ms = _random_modes(rng, rng.randint(1, 3))
        if rng.random() < 0.8 and -ns[0] not in ms:
            ms = (-ns[0],) + ms[1:]  # force at least one contraction most of the time
        a = alg.basis_element(rng.randrange(alg.dim))
        b = alg.basis_element(rng.randrange(alg.dim))
        F = mode_string_operator(sign, ns, a, alg)
        G = mode_string_operator(sign, ms, b, alg)
        closed = tau_commutator(sign, (ns, a), (ms, b), alg)
        for level in range(TAU_MAX_LEVEL + 1):
            for v in _states(alg, level):
                want = closed(v)
                got = commutator(F, G, v)
                rep.record(got == want, lambda: ({"side": sign.name.lower(), "left": list(ns), "right": list(ms),
                            "alpha": str(a), "beta": str(b), "state": _fmt(v, sign)}, _fmt(want, sign), _fmt(got, sign)))
    return rep


def _task_thm31iii(alg, k, max_level):
    rep = VerificationReport("thm31iii")
    for ai in range(alg.dim):
        a = alg.basis_element(ai)
        Ok = ok_operator(alg, k, a)
        for bi in range(alg.dim):
            b = alg.basis_element(bi)
            ab = alg.multiply(a, b)
            pb = single_mode(ORBIFOLD, -1, b, alg)
            tower = derivative_tower(ORBIFOLD, alg, -1, ab, k)
            closed = orbifold_bracket_closed_form(alg, k, ab)
            for level in range(max_level + 1):
                for v in _states(alg, level):
                    x = commutator(Ok, pb, v)
                    y = tower(v) / factorial(k)
                    z = closed(v)
                    rep.record(x == y == z, lambda: ({"k": k, "alpha": str(a), "beta": str(b),
                                "state": _fmt(v, ORBIFOLD)}, _fmt(z, ORBIFOLD), {"bracket": _fmt(x, ORBIFOLD), "tower": _fmt(y, ORBIFOLD)}))
    return rep


def _task_axiom_a2(alg, k, max_level):
    rep = VerificationReport("axiomA2")
    for ai in range(alg.dim):
        a = alg.basis_element(ai)
        Gk = gtilde_operator(alg, k, a)
        for bi in range(alg.dim):
            b = alg.basis_element(bi)
            ab = alg.multiply(a, b)
            ab1 = single_mode(HILBERT, -1, b, alg)
            closed = curly_closed_form(HILBERT, alg, -1, ab, k)
            tower = derivative_tower(HILBERT, alg, -1, ab, k)
            for level in range(max_level + 1):
                for v in _states(alg, level):
                    x = commutator(Gk, ab1, v)
                    y = closed(v) / factorial(k)
                    z = tower(v) / factorial(k)
                    rep.record(x == y == z, lambda: ({"k": k, "alpha": str(a), "beta": str(b), "state": _fmt(v)}, _fmt(y), {"bracket": _fmt(x), "tower": _fmt(z)}))
    if k == 1:
        # the two constructions of G~_1(1) coincide
        g = gtilde_operator(alg, 1, alg.one)
        c = cube_zero_mode(HILBERT, alg.one, alg).scaled(Fraction(-1, 6))
        for level in range(max_level + 2):
            for v in _states(alg, level):
                want, got = c(v), g(v)
                rep.record(want == got, lambda: ({"check": "cube-zero-mode", "state": _fmt(v)}, _fmt(want), _fmt(got)))
    return rep


def _task_classes(alg, n, max_k):
    rep = VerificationReport("classes")
    u = unit_class(alg, n)
    for k in range(max_k + 1):
        for ai in range(alg.dim):
            a = alg.basis_element(ai)
            inputs = {"n": n, "k": k, "alpha": str(a)}
            oc = ok_class(alg, k, a, n)
            got = ok_operator(alg, k, a)(u)
            rep.record(got == oc, lambda: (dict(inputs, check="O"), _fmt(oc, ORBIFOLD), _fmt(got, ORBIFOLD)))
            gc = gtilde_class(alg, k, a, n)
            got = gtilde_operator(alg, k, a)(u)
            rep.record(got == gc, lambda: (dict(inputs, check="Gt"), _fmt(gc), _fmt(got)))
            if k <= 1:
                # closed forms of the two lowest classes
                if k == 0:
                    want = FockVector(alg, {
                        tuple(sorted(m + ((-1, ai),))): c for m, c in unit_class(alg, n - 1).terms.items()})
                elif n >= 2:
                    want = FockVector(alg, {
                        tuple(sorted(m + ((-2, ai),))): c * Fraction(-1, 2)
                        for m, c in unit_class(alg, n - 2).terms.items()})
                else:
                    want = FockVector(alg, {})
                rep.record(gc == want, lambda: (dict(inputs, check="Gt-closed"), _fmt(want), _fmt(gc)))
                rep.record(oc == want, lambda: (dict(inputs, check="O-closed"), _fmt(want, ORBIFOLD), _fmt(oc, ORBIFOLD)))
    return rep


def _task_psi(alg, n):
    rep = VerificationReport("psi")
    for k in range(n):
        for ai in range(alg.dim):
            a = alg.basis_element(ai)
            lhs = psi(ok_class(alg, k, a, n) * i_power(k))
            rhs = gtilde_class(alg, k, a, n)
            rep.record(lhs == rhs, lambda: ({"n": n, "k": k, "alpha": str(a)}, _fmt(rhs), _fmt(lhs)))
    for v in _states(alg, n):
        back = psi_inverse(psi(v))
        w = psi(v)
        ok = back == v and w.level == v.level and w.degree == v.degree
        rep.record(ok, lambda: ({"n": n, "check": "round-trip", "state": _fmt(v, ORBIFOLD)}, _fmt(v, ORBIFOLD), _fmt(back, ORBIFOLD)))
    return rep


def _task_pairing(alg, n):
    return verify_pairing(alg, n)


def _task_iso(alg, n, mutate):
    return verify_iso(alg, n, mutate=mutate)


# -- task planning -------------------------------------------------------------------


def _plan(suite, model, max_n, max_k, seed, mutate, samples):
    if suite == "heisenberg":
        return [((suite, model, lv), ("heisenberg", model, (lv, seed))) for lv in range(max_n + 1)] \
            if max_n > 0 else []
    if suite == "tau":
        if max_n <= 0:
            return []
        chunks = 4
        per = max(1, samples // chunks)
        return [((suite, model, c), ("tau", model, (c, seed, per))) for c in range(chunks)]
    if suite == "thm31iii":
        return [((suite, model, k), ("thm31iii", model, (k, min(max_n, TOWER_MAX_LEVEL))))
                for k in range(max_k + 1)] if max_n > 0 else []
    if suite == "axiomA2":
        return [((suite, model, k), ("axiomA2", model, (k, min(max_n, TOWER_MAX_LEVEL))))
                for k in range(max_k + 1)] if max_n > 0 else []
    if suite == "classes":
        return [((suite, model, n), ("classes", model, (n, max_k))) for n in range(1, max_n + 1)]
    if suite == "psi":
        return [((suite, model, n), ("psi", model, (n,))) for n in range(1, max_n + 1)]
    if suite == "pairing":
        return [((suite, model), ("pairing", model, (max_n,)))] if max_n > 0 else []
    if suite == "iso":
        return [((suite, model, n), ("iso", model, (n, mutate))) for n in range(1, max_n + 1)]
    raise ValueError(f"unknown suite {suite!r}")


_BODIES = {
    "heisenberg": _task_heisenberg,
    "tau": _task_tau,
    "thm31iii": _task_thm31iii,
    "axiomA2": _task_axiom_a2,
    "classes": _task_classes,
    "psi": _task_psi,
    "pairing": _task_pairing,
    "iso": _task_iso,
}

SUITES = tuple(_BODIES)


def _run_task(spec):
    name, model, args = spec
    return _BODIES[name](get_model(model), *args)


def run_suite(suite, models, max_n, max_k=3, seed=0, mutate=None, samples=40, workers=None):
    """Run one suite over ``models`` (names or paths); returns a merged report."""
    tasks = []
    for model in models:
        tasks.extend(_plan(suite, model, max_n, max_k, seed, mutate, samples))
    tasks.sort(key=lambda t: t[0])
    workers = workers_from_env() if workers is None else workers
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_task, [spec for _, spec in tasks]))
    else:
        results = [_run_task(spec) for _, spec in tasks]
    report = VerificationReport(suite)
    for r in results:
        report.merge(r)
    return report


def run_suites(suites, models, max_n, max_k=3, seed=0, mutate=None, samples=40, workers=None):
    return [run_suite(s, models, max_n, max_k, seed, mutate, samples, workers) for s in suites]
