"""Compensated, order-fixed accumulation of chunked term streams."""
from __future__ import annotations

import math
from itertools import chain
from typing import Iterable, Sequence

import numpy as np

# A chunk is (lo, hi, keys, terms): the nonzero terms attached to keys in
# [lo, hi), keys ascending.  Chunks arrive in ascending, non-overlapping order.
Chunk = tuple[int, int, np.ndarray, np.ndarray]


class Partials:
    """Running sum kept as non-overlapping partials (Shewchuk), exact until read."""

    def __init__(self):
        self._p: list[float] = []

    def add(self, x: float) -> None:
        i = 0
        for y in self._p:
            if abs(x) < abs(y):
                x, y = y, x
            hi = x + y
            lo = y - (hi - x)
            if lo:
                self._p[i] = lo
                i += 1
            x = hi
        self._p[i:] = [x]

    def value(self) -> float:
        return math.fsum(self._p)


def _add_piece(acc: Partials, terms) -> None:
    # fsum rounds once; its residuals carry the rest, so the piece enters acc
    # (practically) exactly and cut positions stop mattering.
    s = math.fsum(terms)
    acc.add(s)
    tail = (-s,)
    for _ in range(2):
        r = math.fsum(chain(terms, tail))
        if not r:
            return
        acc.add(r)
        tail += (-r,)


def checkpoint_sums(chunks: Iterable[Chunk], grid: Sequence[float]) -> list[float]:
    """Return ``sum(terms[key <= x])`` for every ``x`` in the ascending grid.

    Each chunk is cut at the checkpoints it straddles and every piece is
    folded, residuals included, into a running exact accumulator.  The result
    is therefore independent of chunking, worker count and grid layout.
    """
    grid = list(grid)
    out: list[float] = []
    acc = Partials()
    gi = 0
    for lo, hi, keys, terms in chunks:
        start = 0
        while gi < len(grid) and grid[gi] < hi:
            cut = int(np.searchsorted(keys, grid[gi], side="right"))
            _add_piece(acc, terms[start:cut])
            start = cut
            out.append(acc.value())
            gi += 1
        _add_piece(acc, terms[start:])
    total = acc.value()
    out.extend(total for _ in grid[gi:])
    return out


def checkpoint_counts(chunks: Iterable[Chunk], grid: Sequence[float]) -> list[int]:
    """Integer analogue of :func:`checkpoint_sums` for 0/1 term masks."""
    grid = list(grid)
    out: list[int] = []
    total = 0
    gi = 0
    for lo, hi, keys, terms in chunks:
        csum = np.cumsum(terms, dtype=np.int64)
        while gi < len(grid) and grid[gi] < hi:
            cut = int(np.searchsorted(keys, grid[gi], side="right"))
            out.append(total + (int(csum[cut - 1]) if cut else 0))
            gi += 1
        if csum.size:
            total += int(csum[-1])
    out.extend(total for _ in grid[gi:])
    return out


def class_sums(keys: np.ndarray, residues: np.ndarray, weights: np.ndarray,
               grid: Sequence[float], q: int) -> np.ndarray:
    """S[i, r] = sum of weights with key <= grid[i] and residue r, for all r mod q."""
    cuts = np.searchsorted(keys, np.asarray(grid, dtype=np.float64), side="right")
    out = np.zeros((len(cuts), q))
    prev = 0
    running = np.zeros(q)
    for i, c in enumerate(cuts):
        running = running + np.bincount(residues[prev:c], weights=weights[prev:c], minlength=q)
        out[i] = running
        prev = c
    return out
