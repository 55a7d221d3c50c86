"""Sparse exact linear algebra over Q.

Vectors are ``dict`` objects mapping a hashable, orderable column key to a
nonzero ``mpq``.  Elimination pivots on the largest key of each row, which
lines up with the monomial order used by the Groebner code.
"""

from __future__ import annotations

import heapq
from typing import Hashable, Iterable, Mapping

from gmpy2 import mpq

__all__ = ["Echelon", "rank", "kernel", "solve", "axpy"]


def axpy(y: dict, a, x: Mapping) -> None:
    """In place ``y += a*x``."""
    for k, c in x.items():
        v = y.get(k)
        if v is None:
            y[k] = a * c
        else:
            v += a * c
            if v:
                y[k] = v
            else:
                del y[k]


def _neg(k):
    if isinstance(k, tuple):
        return tuple(-x for x in k)
    return -k


class Echelon:
    """Incrementally maintained echelon form of a row space.

    With ``track=True`` every stored row remembers its expression as a
    combination of the rows passed to :meth:`add`, indexed by insertion
    number.  This gives kernels and solutions for free.
    """

    def __init__(self, track: bool = False):
        self.track = track
        self.pivots: dict[Hashable, tuple[dict, dict | None]] = {}
        self.count = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def _reduce(self, row: dict, combo: dict | None) -> tuple[dict, dict | None]:
        pivots = self.pivots
        if not pivots or not row:
            return row, combo
        # eliminating the pivot at key k only touches keys below k, so a
        # max-heap over the row's keys visits each candidate once
        heap = [_neg(k) for k in row if k in pivots]
        heapq.heapify(heap)
        queued = set(map(_neg, heap))
        while heap:
            k = _neg(heapq.heappop(heap))
            queued.discard(k)
            c = row.get(k)
            if c is None:
                continue
            prow, pcombo = pivots[k]
            a = -c / prow[k]
            for kk, cc in prow.items():
                v = row.get(kk)
                if v is None:
                    row[kk] = a * cc
                    if kk in pivots and kk not in queued:
                        queued.add(kk)
                        heapq.heappush(heap, _neg(kk))
                else:
                    v += a * cc
                    if v:
                        row[kk] = v
                    else:
                        del row[kk]
            if combo is not None and pcombo is not None:
                axpy(combo, a, pcombo)
        return row, combo

    def reduce(self, row: Mapping) -> dict:
        """Remainder of ``row`` modulo the stored span."""
        r, _ = self._reduce(dict(row), None)
        return r

    def contains(self, row: Mapping) -> bool:
        return not self.reduce(row)

    def add(self, row: Mapping) -> dict | None:
        """Insert a row.  Returns ``None`` if it was independent, otherwise
        the dependency (a combination of inserted rows summing to zero,
        tracked mode) or an empty dict (untracked mode)."""
        idx = self.count
        self.count += 1
        combo = {idx: mpq(1)} if self.track else None
        r, combo = self._reduce(dict(row), combo)
        if not r:
            return combo if combo is not None else {}
        self.pivots[max(r)] = (r, combo)
        return None

    def solve(self, row: Mapping) -> dict | None:
        """Coefficients ``c`` with ``sum c[i]*row_i == row``, or ``None``."""
        if not self.track:
            raise ValueError("solve needs a tracked echelon")
        r, combo = self._reduce(dict(row), {})
        if r:
            return None
        return {i: -c for i, c in combo.items()}


def rank(rows: Iterable[Mapping]) -> int:
    e = Echelon()
    for r in rows:
        e.add(r)
    return e.rank


def kernel(rows: list[Mapping]) -> list[dict]:
    """Basis of ``{c : sum c[i]*rows[i] == 0}`` as sparse dicts on row indices."""
    e = Echelon(track=True)
    out = []
    for r in rows:
        dep = e.add(r)
        if dep is not None:
            out.append(dep)
    return out


def solve(rows: list[Mapping], target: Mapping) -> dict | None:
    e = Echelon(track=True)
    for r in rows:
        e.add(r)
    return e.solve(target)
