# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twin of ``_kernels_py``; same signatures, same results.

Coefficients stay Python objects (ints, Fractions, Gaussian rationals), so
the gain comes from typed loop indices and fewer interpreter dispatches.
"""

from math import comb

__all__ = ["apply_normal_terms", "apply_mode_string", "matvec"]


cdef dict _counts(tuple monomial):
    cdef dict counts = {}
    for f in monomial:
        counts[f] = counts.get(f, 0) + 1
    return counts


cdef dict _by_mode(dict counts):
    cdef dict groups = {}
    cdef int mode
    for key, mu in counts.items():
        mode = key[0]
        groups.setdefault(-mode, []).append((key[1], mu))
    return groups


cdef dict _COMPOSITIONS = {}


cdef void _rec(tuple factors, Py_ssize_t pos, int left, list picks, object weight, list out):
    cdef int mu, t, i
    if left == 0:
        out.append((tuple(picks), weight))
        return
    if pos == len(factors):
        return
    i, mu = factors[pos]
    t = mu if mu < left else left
    while t >= 0:
        if t:
            picks.append((i, t))
        _rec(factors, pos + 1, left - t, picks, weight * comb(mu, t), out)
        if t:
            picks.pop()
        t -= 1


cdef list _compositions(tuple factors, int r):
    key = (factors, r)
    hit = _COMPOSITIONS.get(key)
    if hit is not None:
        return hit
    cdef list out = []
    _rec(factors, 0, r, [], 1, out)
    _COMPOSITIONS[key] = out
    return out


cdef tuple _creation_expansion(alg, tuple alpha, tuple creations):
    cdef dict cache = alg._creation_cache
    key = (alpha, creations)
    hit = cache.get(key)
    if hit is not None:
        return hit
    cdef dict out = {}
    for idx, c in alg.coproduct_coeffs(alpha, len(creations)).items():
        factors = tuple(sorted(zip(creations, idx)))
        out[factors] = out.get(factors, 0) + c
    res = tuple((f, c) for f, c in out.items() if c)
    cache[key] = res
    return res


cdef inline void _acc(dict out, key, value):
    nv = out.get(key, 0) + value
    if nv:
        out[key] = nv
    else:
        out.pop(key, None)


def apply_normal_terms(terms, vec, alg):
    """Apply a sum of normal-ordered ``tau_*`` terms to a sparse vector."""
    cdef dict out = {}
    cdef dict counts, groups, left
    cdef list branches, nxt, base
    cdef int mode, r, t, i
    mul_basis = alg.mul_basis_coeffs
    counit = alg.counit_coeffs
    for mono, v in vec.items():
        counts = _counts(mono)
        groups = _by_mode(counts)
        for coef, creations, annihilations, alpha in terms:
            branches = [(alpha, coef * v, ())]
            for mode, r, factor in annihilations:
                factors = groups.get(mode)
                if factors is None:
                    branches = []
                    break
                factors = tuple(factors)
                nxt = []
                for a, w, removed in branches:
                    for picks, weight in _compositions(factors, r):
                        a2 = a
                        rem = removed
                        for i, t in picks:
                            for _ in range(t):
                                a2 = mul_basis(a2, i)
                            rem = rem + ((-mode, i),) * t
                        if any(a2):
                            nxt.append((a2, w * weight * factor, rem))
                branches = nxt
                if not branches:
                    break
            for a, w, removed in branches:
                if removed:
                    left = dict(counts)
                    for f in removed:
                        left[f] -= 1
                    base = []
                    for f, mu in left.items():
                        if mu:
                            base.extend((f,) * mu)
                else:
                    base = list(mono)
                if not creations:
                    tval = counit(a)
                    if tval:
                        _acc(out, tuple(sorted(base)), w * tval)
                    continue
                for factors, c in _creation_expansion(alg, a, creations):
                    _acc(out, tuple(sorted(base + list(factors))), w * c)
    return out


cdef dict _apply_single(int mode, int i, dict vec, int sign, gram):
    cdef dict out = {}
    cdef set seen
    cdef Py_ssize_t pos
    cdef tuple mono, key
    if mode < 0:
        f = (mode, i)
        for mono, v in vec.items():
            _acc(out, tuple(sorted(mono + (f,))), v)
        return out
    row = gram[i]
    cdef int scale = sign * mode
    for mono, v in vec.items():
        seen = set()
        for pos in range(len(mono)):
            f = mono[pos]
            if f[0] != -mode or f in seen:
                continue
            seen.add(f)
            g = row[f[1]]
            if not g:
                continue
            mu = mono.count(f)
            key = mono[:pos] + mono[pos + 1:]
            _acc(out, key, v * mu * scale * g)
    return out


def apply_mode_string(coef, modes, entries, vec, int sign, gram):
    """Apply ``coef * a_{m_1} ... a_{m_k}`` with tensor ``entries`` to ``vec``,
    rightmost mode first."""
    cdef dict out = {}
    cdef dict cur
    cdef Py_ssize_t p, n = len(modes)
    for idx, c in entries.items():
        cur = {m: v * coef * c for m, v in vec.items()}
        p = n - 1
        while p >= 0:
            cur = _apply_single(modes[p], idx[p], cur, sign, gram)
            if not cur:
                break
            p -= 1
        for k, v in cur.items():
            _acc(out, k, v)
    return out


def matvec(columns, vec):
    """Sparse ``sum_k vec[k] * columns[k]``; missing columns are zero."""
    cdef dict out = {}
    for k, v in vec.items():
        col = columns.get(k)
        if not col:
            continue
        for r, c in col.items():
            _acc(out, r, v * c)
    return out
