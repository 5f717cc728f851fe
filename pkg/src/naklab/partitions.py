"""Generalized partitions: finite multisets of nonzero integers."""

from __future__ import annotations

import re
from collections import Counter
from functools import lru_cache
from math import factorial, prod

__all__ = [
    "EmptyPartition",
    "GeneralizedPartition",
    "generalized_partitions",
    "partitions",
]


class EmptyPartition(ValueError):
    pass


@lru_cache(maxsize=None)
def _partitions(n, max_part, length):
    """Partitions of ``n`` with parts <= ``max_part`` and exactly ``length``
    parts (``length=None``: any), as descending tuples."""
    if length is not None:
        if length == 0:
            return ((),) if n == 0 else ()
        if n < length or n > length * max_part:
            return ()
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, max_part), 0, -1):
        sub_len = None if length is None else length - 1
        for rest in _partitions(n - first, first, sub_len):
            out.append((first,) + rest)
    return tuple(out)


def partitions(n, length=None):
    """Ordinary partitions of ``n`` (descending tuples)."""
    if n < 0:
        return ()
    return _partitions(n, n, length)


class GeneralizedPartition:
    """Multiset of nonzero integer parts, kept in ascending order.

    Ascending order is also the operator order used for ``a_lambda``:
    ``... a_{-2}^{m_{-2}} a_{-1}^{m_{-1}} a_1^{m_1} a_2^{m_2} ...``.
    """

    __slots__ = ("parts",)

    def __init__(self, parts=()):
        parts = tuple(sorted(int(p) for p in parts))
        if any(p == 0 for p in parts):
            raise ValueError("generalized partitions have nonzero parts")
        self.parts = parts

    @classmethod
    def parse(cls, text: str) -> "GeneralizedPartition":
        """Parse ``"(-2,-1)"``, ``"-3"`` or ``"(1, 1, 2)"``."""
        body = text.strip()
        if body.startswith("(") and body.endswith(")"):
            body = body[1:-1]
        if not body.strip():
            return cls(())
        items = [t for t in re.split(r"[,\s]+", body.strip()) if t]
        try:
            return cls(int(t) for t in items)
        except ValueError:
            raise ValueError(f"cannot parse generalized partition {text!r}") from None

    def __repr__(self):
        return f"GeneralizedPartition({self.parts})"

    def __str__(self):
        return "(" + ",".join(str(p) for p in self.parts) + ")"

    def __eq__(self, other):
        return isinstance(other, GeneralizedPartition) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    @property
    def multiplicities(self) -> dict[int, int]:
        return dict(Counter(self.parts))

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def size(self) -> int:
        """``|lambda| = sum of parts``."""
        return sum(self.parts)

    @property
    def square_sum(self) -> int:
        """``s(lambda) = sum of squared parts``."""
        return sum(p * p for p in self.parts)

    @property
    def factorial(self) -> int:
        """``lambda^! = prod of multiplicity factorials``."""
        return prod(factorial(m) for m in Counter(self.parts).values())

    @property
    def creation_parts(self) -> tuple[int, ...]:
        """Moduli of the negative parts, descending."""
        return tuple(sorted((-p for p in self.parts if p < 0), reverse=True))

    @property
    def annihilation_parts(self) -> tuple[int, ...]:
        return tuple(sorted((p for p in self.parts if p > 0), reverse=True))

    def is_empty(self) -> bool:
        return not self.parts


def generalized_partitions(length, size, max_annihilation, include_empty=False):
    """All generalized partitions with ``length`` parts summing to ``size``
    whose positive parts add up to at most ``max_annihilation``.

    The bound makes the (otherwise infinite) family finite; it is the input
    level when the operator acts on a state, since annihilators with more
    total mode than the level kill it.
    """
    out = []
    for ann_total in range(0, max_annihilation + 1):
        cre_total = ann_total - size
        if cre_total < 0:
            continue
        for n_ann in range(0, length + 1):
            n_cre = length - n_ann
            for ann in partitions(ann_total, n_ann):
                for cre in partitions(cre_total, n_cre):
                    lam = GeneralizedPartition([-c for c in cre] + list(ann))
                    if lam.is_empty() and not include_empty:
                        continue
                    out.append(lam)
    return out
