"""Compare the compiled and pure-Python Fock kernels on fixed workloads.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each workload calls the kernel functions directly on every level-``L``
basis monomial, so operator-level image caches do not hide kernel cost.
The two backends must return identical results; the script checks that.
"""

from __future__ import annotations

import argparse
import time
from fractions import Fraction

from naklab import _kernels_py
from naklab.fock import CentralSign, Term, _kernel_form, nakajima_basis
from naklab.models import p1xp1, p2
from naklab.operators import gtilde_operator, lehn_g1

try:
    from naklab import _kernels as _kernels_c
except ImportError:  # pragma: no cover
    _kernels_c = None


def _normal_workload(alg, level):
    op = gtilde_operator(alg, 2, alg.one) + lehn_g1(alg, alg.one)
    terms = [_kernel_form(t, op.sign) for t in op.term_list(level)
             if t.alpha is not None and t.is_normal_ordered]
    vecs = [{m: 1} for m in nakajima_basis(alg, level)]

    def run(mod):
        alg._creation_cache.clear()
        return [mod.apply_normal_terms(terms, v, alg) for v in vecs]

    return run


def _string_workload(alg, level):
    modes = (-2, 1, -1, 2)
    t = Term(Fraction(1), modes, alpha=alg.one.coeffs)
    entries = t.tensor(alg).entries
    vecs = [{m: 1} for m in nakajima_basis(alg, level)]

    def run(mod):
        return [mod.apply_mode_string(1, modes, entries, v, int(CentralSign.HILBERT), alg.gram)
                for v in vecs]

    return run


def _time(fn, mod, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(mod)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    workloads = [
        ("normal terms, P2, level 5", _normal_workload(p2(), 5)),
        ("normal terms, P1xP1, level 4", _normal_workload(p1xp1(), 4)),
        ("mode string, P2, level 6", _string_workload(p2(), 6)),
        ("mode string, P1xP1, level 5", _string_workload(p1xp1(), 5)),
    ]
    print(f"{'workload':32} {'python (s)':>11} {'cython (s)':>11} {'speedup':>8}")
    for name, fn in workloads:
        tp, outp = _time(fn, _kernels_py, args.repeat)
        if _kernels_c is None:
            print(f"{name:32} {tp:11.4f} {'n/a':>11} {'n/a':>8}")
            continue
        tc, outc = _time(fn, _kernels_c, args.repeat)
        if outp != outc:
            raise SystemExit(f"backends disagree on {name}")
        print(f"{name:32} {tp:11.4f} {tc:11.4f} {tp / tc:7.2f}x")


if __name__ == "__main__":
    main()
