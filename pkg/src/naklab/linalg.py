"""Exact sparse Gaussian elimination.

Vectors are dicts ``{key: scalar}`` with zero entries dropped; keys only
need to be hashable and sortable.  Scalars may be ints, Fractions or
:class:`~naklab.scalars.GaussianRational`.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = ["IncrementalBasis", "inverse_matrix", "rank", "solve", "Inconsistent"]


class Inconsistent(ArithmeticError):
    """The linear system has no solution."""


def _axpy(target, coef, source):
    """``target += coef * source`` in place, pruning zeros."""
    for k, v in source.items():
        nv = target.get(k, 0) + coef * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


class IncrementalBasis:
    """Row-reduce vectors one at a time, remembering how each pivot row was
    built from the inserted vectors.

    ``add(v, label)`` returns ``True`` iff ``v`` is independent of what was
    added before.  Once the span is complete, :meth:`express` writes any
    vector in the span as a combination of the accepted labels.
    """

    def __init__(self):
        self._rows = []  # (pivot key, reduced row, combination {label: c})
        self._pivots = {}
        self.labels = []

    def __len__(self):
        return len(self._rows)

    def _reduce(self, vec, combo):
        vec = dict(vec)
        for pivot, row, rcombo in self._rows:
            c = vec.get(pivot)
            if c:
                _axpy(vec, -c, row)
                _axpy(combo, -c, rcombo)
        return vec, combo

    def add(self, vec, label) -> bool:
        reduced, combo = self._reduce(vec, {label: Fraction(1)})
        if not reduced:
            return False
        pivot = min(reduced)
        inv = Fraction(1) / reduced[pivot]
        row = {k: v * inv for k, v in reduced.items()}
        combo = {k: v * inv for k, v in combo.items()}
        # keep earlier rows reduced against the new pivot (full RREF)
        for idx, (p, r, rc) in enumerate(self._rows):
            c = r.get(pivot)
            if c:
                _axpy(r, -c, row)
                _axpy(rc, -c, combo)
        self._rows.append((pivot, row, combo))
        self._pivots[pivot] = len(self._rows) - 1
        self.labels.append(label)
        return True

    def express(self, vec):
        """Coefficients ``{label: c}`` with ``sum c * v_label == vec``."""
        vec = dict(vec)
        out = {}
        for pivot, row, combo in self._rows:
            c = vec.get(pivot)
            if c:
                _axpy(vec, -c, row)
                _axpy(out, c, combo)
        if vec:
            raise Inconsistent("vector is not in the span")
        return out

    def contains(self, vec) -> bool:
        reduced, _ = self._reduce(vec, {})
        return not reduced


def rank(vectors) -> int:
    basis = IncrementalBasis()
    for i, v in enumerate(vectors):
        basis.add(v, i)
    return len(basis)


def solve(columns, rhs):
    """Solve ``sum_j x_j * columns[j] == rhs`` exactly.

    Returns ``(solution, rank)`` where ``solution`` maps column index to
    value for a particular solution (free variables set to 0).  Raises
    :class:`Inconsistent` if ``rhs`` is outside the column span.
    """
    basis = IncrementalBasis()
    for j, col in enumerate(columns):
        basis.add(col, j)
    coeffs = basis.express(rhs)
    return {j: c for j, c in coeffs.items() if c}, len(basis)


def inverse_matrix(rows):
    """Inverse of a square matrix given as a list of lists, or ``None``."""
    n = len(rows)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = Fraction(1) / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]
