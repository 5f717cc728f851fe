"""Pure-Python hot loops for Fock-space operator application.

Monomials are sorted tuples of creation factors ``(mode, i)`` with
``mode < 0`` and ``i`` a basis index.  A *normal term* is
``(coef, creations, annihilations, alpha)`` where ``creations`` is an
ascending tuple of negative modes, ``annihilations`` a tuple of
``(mode, count, factor)`` with ``factor = count! * (sign*mode)**count``, and
``alpha`` a coefficient tuple; it stands for
``coef * a_{c_1} ... a_{c_p} a_{m_1}^{r_1} ... (tau_* alpha)``.

The compiled twin in ``_kernels.pyx`` must stay behaviourally identical.
"""

from math import comb

__all__ = ["apply_normal_terms", "apply_mode_string", "matvec"]


def _counts(monomial):
    counts = {}
    for f in monomial:
        counts[f] = counts.get(f, 0) + 1
    return counts


def _by_mode(counts):
    groups = {}
    for (mode, i), mu in counts.items():
        groups.setdefault(-mode, []).append((i, mu))
    return groups


_COMPOSITIONS = {}


def _compositions(factors, r):
    """Ways to pick ``r`` of the listed factors: ``[(picks, weight)]`` with
    ``picks = ((i, t), ...)`` and ``weight = prod C(mu_i, t)``."""
    key = (factors, r)
    hit = _COMPOSITIONS.get(key)
    if hit is not None:
        return hit
    out = []

    def rec(pos, left, picks, weight):
        if left == 0:
            out.append((tuple(picks), weight))
            return
        if pos == len(factors):
            return
        i, mu = factors[pos]
        for t in range(min(mu, left), -1, -1):
            if t:
                picks.append((i, t))
            rec(pos + 1, left - t, picks, weight * comb(mu, t))
            if t:
                picks.pop()

    rec(0, r, [], 1)
    _COMPOSITIONS[key] = out
    return out


def _creation_expansion(alg, alpha, creations):
    """``{sorted factor tuple: coefficient}`` for ``a_{c_1}...a_{c_p}(tau_* alpha)``."""
    cache = alg._creation_cache
    key = (alpha, creations)
    hit = cache.get(key)
    if hit is not None:
        return hit
    out = {}
    for idx, c in alg.coproduct_coeffs(alpha, len(creations)).items():
        factors = tuple(sorted(zip(creations, idx)))
        out[factors] = out.get(factors, 0) + c
    out = tuple((f, c) for f, c in out.items() if c)
    cache[key] = out
    return out


def apply_normal_terms(terms, vec, alg):
    """Apply a sum of normal-ordered ``tau_*`` terms to a sparse vector."""
    out = {}
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
                    t = counit(a)
                    if t:
                        key = tuple(sorted(base))
                        nv = out.get(key, 0) + w * t
                        if nv:
                            out[key] = nv
                        else:
                            out.pop(key, None)
                    continue
                for factors, c in _creation_expansion(alg, a, creations):
                    key = tuple(sorted(base + list(factors)))
                    nv = out.get(key, 0) + w * c
                    if nv:
                        out[key] = nv
                    else:
                        out.pop(key, None)
    return out


def _apply_single(mode, i, vec, sign, gram):
    out = {}
    if mode < 0:
        f = (mode, i)
        for mono, v in vec.items():
            key = tuple(sorted(mono + (f,)))
            nv = out.get(key, 0) + v
            if nv:
                out[key] = nv
            else:
                out.pop(key, None)
        return out
    row = gram[i]
    scale = sign * mode
    for mono, v in vec.items():
        seen = set()
        for pos, f in enumerate(mono):
            if f[0] != -mode or f in seen:
                continue
            seen.add(f)
            g = row[f[1]]
            if not g:
                continue
            mu = mono.count(f)
            key = mono[:pos] + mono[pos + 1:]
            nv = out.get(key, 0) + v * mu * scale * g
            if nv:
                out[key] = nv
            else:
                out.pop(key, None)
    return out


def apply_mode_string(coef, modes, entries, vec, sign, gram):
    """Apply ``coef * a_{m_1} ... a_{m_k}`` (any order) with tensor
    ``entries`` ``{index tuple: c}`` to ``vec``, rightmost mode first."""
    out = {}
    for idx, c in entries.items():
        cur = {m: v * coef * c for m, v in vec.items()}
        for mode, i in zip(reversed(modes), reversed(idx)):
            cur = _apply_single(mode, i, cur, sign, gram)
            if not cur:
                break
        for k, v in cur.items():
            nv = out.get(k, 0) + v
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
    return out


def matvec(columns, vec):
    """Sparse ``sum_k vec[k] * columns[k]``; missing columns are zero."""
    out = {}
    for k, v in vec.items():
        col = columns.get(k)
        if not col:
            continue
        for r, c in col.items():
            nv = out.get(r, 0) + v * c
            if nv:
                out[r] = nv
            else:
                out.pop(r, None)
    return out
