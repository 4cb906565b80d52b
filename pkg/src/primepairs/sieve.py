"""
Prime tables, smallest-prime-factor windows and progression queries.

The prime table stores one bit per odd integer (bit ``i`` stands for
``2*i + 1``), packed little-endian into a ``uint8`` array, together with a
sparse index of cumulative prime counts for fast ``pi(x)`` queries.  Tables
are always built segment by segment; only the packed bits of the whole range
are ever resident.

Integer semantics are 64-bit throughout.  ``MAX_LIMIT`` (10**12) keeps every
product ``m*p + k`` used by the sums well inside ``int64`` and bounds the
table at 62.5 GB of bits; in practice memory is the binding ceiling (a
10**10 table takes 625 MB).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .errors import RangeError, UsageError

MAX_LIMIT = 10**12
SEGMENT_SIZE = 1 << 21          # odd numbers per construction segment
FACTOR_SEGMENT_SIZE = 1 << 22   # widest window factor_segment accepts
COUNT_BLOCK = 1 << 12           # bytes of packed bits per count_index entry
CHUNK_SIZE = 1 << 22            # integers per chunk when streaming primes

# odd multiples of these are removed by tiling a precomputed pattern
_PRESIEVE = (3, 5, 7, 11, 13)
_PRESIEVE_PERIOD = 3 * 5 * 7 * 11 * 13


def simple_primes(n: int) -> np.ndarray:
    """All primes <= n by a plain (unsegmented) sieve."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    s = np.ones(n + 1, dtype=bool)
    s[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if s[p]:
            s[p * p :: p] = False
    return np.flatnonzero(s).astype(np.int64)


def _presieve_pattern() -> np.ndarray:
    pat = np.ones(_PRESIEVE_PERIOD, dtype=bool)
    for p in _PRESIEVE:
        pat[p // 2 :: p] = False
    return pat


_PATTERN = _presieve_pattern()


def _sieve_odd_segment(lo: int, hi: int, sieving: np.ndarray) -> np.ndarray:
    """Primality of the odd numbers with indices in [lo, hi)."""
    off = lo % _PRESIEVE_PERIOD
    reps = (hi - lo + off) // _PRESIEVE_PERIOD + 1
    seg = np.tile(_PATTERN, reps)[off : off + hi - lo].copy()
    for p in sieving:
        p = int(p)
        start = (p * p) // 2
        if start >= hi:
            break
        if start < lo:
            start = lo + (start - lo) % p
        seg[start - lo :: p] = False
    if lo == 0:
        seg[0] = False
        for p in _PRESIEVE:
            if p // 2 < hi:
                seg[p // 2] = True
    return seg


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Packed primality bits over the odd integers up to ``limit``."""

    limit: int
    bits: np.ndarray = field(repr=False)
    count_index: np.ndarray = field(repr=False)

    @property
    def n_odd(self) -> int:
        return (self.limit + 1) // 2

    def is_prime(self, n: int) -> bool:
        n = int(n)
        if n > self.limit:
            raise RangeError(f"{n} exceeds table limit {self.limit}")
        if n < 2:
            return False
        if n % 2 == 0:
            return n == 2
        i = n >> 1
        return bool((self.bits[i >> 3] >> (i & 7)) & 1)

    def is_prime_array(self, n: np.ndarray) -> np.ndarray:
        n = np.asarray(n, dtype=np.int64)
        if n.size and int(n.max()) > self.limit:
            raise RangeError(f"{int(n.max())} exceeds table limit {self.limit}")
        odd = (n & 1).astype(bool) & (n > 2)
        out = n == 2
        i = n[odd] >> 1
        out[odd] = ((self.bits[i >> 3] >> (i & 7).astype(np.uint8)) & 1).astype(bool)
        return out

    def odd_flags(self, lo_idx: int, hi_idx: int) -> np.ndarray:
        """Unpacked bits for odd indices in [lo_idx, hi_idx)."""
        b0, b1 = lo_idx >> 3, (hi_idx + 7) >> 3
        flags = np.unpackbits(self.bits[b0:b1], bitorder="little").astype(bool)
        start = lo_idx - (b0 << 3)
        return flags[start : start + hi_idx - lo_idx]

    def primes(self, lo: int = 2, hi: int | None = None) -> np.ndarray:
        """Primes p with lo <= p <= hi (hi defaults to the limit), ascending."""
        hi = self.limit if hi is None else int(hi)
        if hi > self.limit:
            raise RangeError(f"{hi} exceeds table limit {self.limit}")
        lo = max(int(lo), 2)
        if hi < lo:
            return np.zeros(0, dtype=np.int64)
        i0 = lo // 2
        i1 = (hi - 1) // 2 + 1
        idx = np.flatnonzero(self.odd_flags(i0, i1)).astype(np.int64) + i0
        odd = 2 * idx + 1
        if lo <= 2 <= hi:
            return np.concatenate(([2], odd)).astype(np.int64)
        return odd

    def prime_chunks(self, x: int, lo: int = 2, size: int = CHUNK_SIZE) -> Iterator[tuple[int, int, np.ndarray]]:
        """Yield (a, b, primes in [a, b)) covering [lo, x] in ascending, fixed chunks."""
        x = int(x)
        if x > self.limit:
            raise RangeError(f"{x} exceeds table limit {self.limit}")
        a = max(int(lo), 2)
        while a <= x:
            b = min(a + size, x + 1)
            yield a, b, self.primes(a, b - 1)
            a = b


_POPCOUNT = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint8)


def _count_index(bits: np.ndarray) -> np.ndarray:
    nblocks = (bits.size + COUNT_BLOCK - 1) // COUNT_BLOCK
    per_block = np.zeros(nblocks, dtype=np.int64)
    step = 256  # blocks per pass, bounds the temporary
    for b0 in range(0, nblocks, step):
        b1 = min(b0 + step, nblocks)
        raw = bits[b0 * COUNT_BLOCK : b1 * COUNT_BLOCK]
        padded = np.zeros((b1 - b0) * COUNT_BLOCK, dtype=np.uint8)
        padded[: raw.size] = raw
        per_block[b0:b1] = _POPCOUNT[padded].reshape(b1 - b0, COUNT_BLOCK).sum(axis=1, dtype=np.int64)
    index = np.zeros(nblocks + 1, dtype=np.int64)
    np.cumsum(per_block, out=index[1:])
    return index


def _check_limit(limit: int) -> int:
    try:
        limit = int(limit)
    except (TypeError, ValueError):
        raise UsageError(f"limit must be an integer, got {limit!r}") from None
    if not 2 <= limit <= MAX_LIMIT:
        raise UsageError(f"limit must lie in [2, {MAX_LIMIT}], got {limit}")
    return limit


def build_prime_table(limit: int, segment_size: int = SEGMENT_SIZE, workers: int = 1) -> PrimeTable:
    """Segmented odd-only sieve up to ``limit`` (inclusive).

    ``segment_size`` counts odd numbers per segment and is rounded up to a
    multiple of 8 so packed segments concatenate on byte boundaries.
    Segments may be sieved by several threads; they are joined in segment
    order, so the table is identical for any worker count.
    """
    limit = _check_limit(limit)
    segment_size = max(8, -(-int(segment_size) // 8) * 8)
    n_odd = (limit + 1) // 2
    sieving = simple_primes(math.isqrt(limit))
    sieving = sieving[sieving > _PRESIEVE[-1]]
    bounds = [(lo, min(lo + segment_size, n_odd)) for lo in range(0, n_odd, segment_size)]

    def work(b: tuple[int, int]) -> np.ndarray:
        return np.packbits(_sieve_odd_segment(b[0], b[1], sieving), bitorder="little")

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(work, bounds))
    else:
        parts = [work(b) for b in bounds]
    bits = np.concatenate(parts) if parts else np.zeros(0, dtype=np.uint8)
    return PrimeTable(limit, bits, _count_index(bits))


def build_prime_table_monolithic(limit: int) -> PrimeTable:
    """Whole-range odd-only sieve; reference for the segmented builder."""
    limit = _check_limit(limit)
    n_odd = (limit + 1) // 2
    flags = np.ones(n_odd, dtype=bool)
    flags[0] = False
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if flags[i]:
            p = 2 * i + 1
            flags[(p * p) // 2 :: p] = False
    bits = np.packbits(flags, bitorder="little")
    return PrimeTable(limit, bits, _count_index(bits))


def prime_count(table: PrimeTable, x: int) -> int:
    """pi(x), exact."""
    x = int(x)
    if x > table.limit:
        raise RangeError(f"x={x} exceeds table limit {table.limit}")
    if x < 2:
        return 0
    nbits = (x - 1) // 2 + 1
    block = nbits // (8 * COUNT_BLOCK)
    start = block * 8 * COUNT_BLOCK
    rest = int(table.odd_flags(start, nbits).sum()) if nbits > start else 0
    return 1 + int(table.count_index[block]) + rest


@dataclass(frozen=True)
class APClass:
    """Reduced residue class ``a mod q``; ``a`` is normalised into [1, q]."""

    a: int
    q: int

    def __post_init__(self):
        a, q = int(self.a), int(self.q)
        if q < 1:
            raise UsageError(f"modulus must be >= 1, got {q}")
        if math.gcd(a, q) != 1:
            raise UsageError(f"gcd({a}, {q}) != 1")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "a", a % q or q)


def primes_in_ap(table: PrimeTable, x: int, ap: APClass) -> np.ndarray:
    """Primes p <= x with p = a (mod q), ascending.  The count is ``len``."""
    x = int(x)
    if x > table.limit:
        raise RangeError(f"x={x} exceeds table limit {table.limit}")
    if ap.q == 1:
        return table.primes(2, x)
    start = ap.a
    if ap.q % 2 == 0 or start % 2 == 1:
        cand = np.arange(start, x + 1, ap.q, dtype=np.int64)
        return cand[table.is_prime_array(cand)]
    # only the odd members can be prime (besides 2 itself)
    odd_start = start + ap.q
    cand = np.arange(odd_start, x + 1, 2 * ap.q, dtype=np.int64)
    found = cand[table.is_prime_array(cand)]
    if start == 2 and x >= 2:
        found = np.concatenate(([2], found)).astype(np.int64)
    return found


def least_prime_in_ap(ap: APClass, cap_exponent: float = 6.0, table: PrimeTable | None = None) -> int | None:
    """Least prime ``p = a (mod q)`` with ``p < q**cap_exponent``.

    Returns ``None`` when no such prime exists below the cap (the
    Linnik-cap-exceeded outcome).  ``table`` is searched first; beyond it the
    search sieves its own, geometrically growing tables.
    """
    bound = ap.q ** cap_exponent
    hi = 1 << 16
    if table is not None:
        found = primes_in_ap(table, table.limit, ap)
        if found.size:
            p = int(found[0])
            return p if p < bound else None
        hi = table.limit * 8
    hi = max(hi, 16 * ap.q)
    while True:
        top = int(min(hi, math.ceil(bound) - 1, MAX_LIMIT))
        if top < 2:
            return None
        found = primes_in_ap(build_prime_table(top), top, ap)
        if found.size:
            return int(found[0])
        if top >= math.ceil(bound) - 1 or top >= MAX_LIMIT:
            return None
        hi *= 8


def least_primes_mod(q: int, table: PrimeTable, cap_exponent: float = 6.0) -> dict[int, int | None]:
    """Least prime in every reduced class mod q (a in [1, q]) at once."""
    q = int(q)
    reduced = [a for a in range(1, q + 1) if math.gcd(a, q) == 1]
    out: dict[int, int | None] = {}
    hits: dict[int, int] = {}
    # least primes sit far below the table limit for almost every class
    upto = min(table.limit, max(1 << 12, 64 * q))
    while True:
        primes = table.primes(2, upto)
        res = primes % q
        res[res == 0] = q
        classes, first = np.unique(res, return_index=True)
        hits = dict(zip(classes.tolist(), primes[first].tolist()))
        if upto >= table.limit or all(a in hits for a in reduced):
            break
        upto = min(table.limit, upto * 8)
    bound = q ** cap_exponent
    for a in reduced:
        p = hits.get(a)
        if p is None:
            out[a] = least_prime_in_ap(APClass(a, q), cap_exponent)
        else:
            out[a] = p if p < bound else None
    return out


def prime_powers(table: PrimeTable, x: int, proper: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Prime powers n <= x (exponent >= 2 if ``proper``) and their bases, sorted by n."""
    x = int(x)
    root = math.isqrt(x)
    if root > table.limit or (not proper and x > table.limit):
        raise RangeError(f"x={x} needs a table to {x if not proper else root}, have {table.limit}")
    ns: list[np.ndarray] = []
    bases: list[np.ndarray] = []
    if not proper:
        ps = table.primes(2, x)
        ns.append(ps)
        bases.append(ps)
    base = table.primes(2, root)
    power = base * base
    while base.size:
        keep = power <= x
        base, power = base[keep], power[keep]
        ns.append(power.copy())
        bases.append(base.copy())
        # guard the next multiplication against int64 overflow
        ok = power <= x // np.maximum(base, 1)
        base, power = base[ok], power[ok] * base[ok]
    n = np.concatenate(ns) if ns else np.zeros(0, dtype=np.int64)
    b = np.concatenate(bases) if bases else np.zeros(0, dtype=np.int64)
    order = np.argsort(n, kind="stable")
    return n[order], b[order]


@dataclass(frozen=True, eq=False)
class FactorSegment:
    """Factorisation data for every integer in the window [lo, hi).

    ``spf`` holds the least prime factor and ``remaining`` the cofactor left
    after removing every power of it.  ``mu``, ``phi`` and ``omega`` (number
    of distinct prime factors) come out of the same sieve pass.
    """

    lo: int
    hi: int
    spf: np.ndarray = field(repr=False)
    remaining: np.ndarray = field(repr=False)
    mu: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    omega: np.ndarray = field(repr=False)

    @property
    def n(self) -> np.ndarray:
        return np.arange(self.lo, self.hi, dtype=np.int64)

    def is_prime_power(self) -> np.ndarray:
        return self.omega == 1

    def von_mangoldt(self) -> np.ndarray:
        out = np.zeros(self.hi - self.lo)
        pp = self.omega == 1
        out[pp] = np.log(self.spf[pp].astype(np.float64))
        return out


def factor_segment(lo: int, hi: int, max_size: int = FACTOR_SEGMENT_SIZE,
                   sieving: np.ndarray | None = None) -> FactorSegment:
    """Sieve [lo, hi) with the primes up to sqrt(hi - 1)."""
    lo, hi = int(lo), int(hi)
    if lo < 2 or hi <= lo:
        raise UsageError(f"need 2 <= lo < hi, got [{lo}, {hi})")
    if hi - lo > max_size:
        raise UsageError(f"window of {hi - lo} exceeds segment size {max_size}")
    if hi - 1 > MAX_LIMIT:
        raise UsageError(f"hi={hi} exceeds {MAX_LIMIT}")
    size = hi - lo
    root = math.isqrt(hi - 1)
    if sieving is None:
        sieving = simple_primes(root)
    n = np.arange(lo, hi, dtype=np.int64)
    cof = n.copy()
    spf = np.zeros(size, dtype=np.int64)
    remaining = np.zeros(size, dtype=np.int64)
    mu = np.ones(size, dtype=np.int8)
    phi = np.ones(size, dtype=np.int64)
    omega = np.zeros(size, dtype=np.int8)
    for p in sieving:
        p = int(p)
        if p > root:
            break
        s = (-lo) % p
        if s >= size:
            continue
        fresh = spf[s::p] == 0
        cof[s::p] //= p
        phi[s::p] *= p - 1
        mu[s::p] *= -1
        omega[s::p] += 1
        pk = p * p
        while pk <= hi - 1:
            s2 = (-lo) % pk
            if s2 < size:
                cof[s2::pk] //= p
                phi[s2::pk] *= p
                if pk == p * p:
                    mu[s2::pk] = 0
            pk *= p
        view = spf[s::p]
        view[fresh] = p
        rview = remaining[s::p]
        rview[fresh] = cof[s::p][fresh]
    big = cof > 1
    mu[big] *= -1
    phi[big] *= cof[big] - 1
    omega[big] += 1
    lone = big & (spf == 0)
    spf[lone] = cof[lone]
    remaining[lone] = 1
    return FactorSegment(lo, hi, spf, remaining, mu, phi, omega)


def factor_windows(lo: int, hi: int, size: int = 1 << 20) -> Iterator[FactorSegment]:
    """Consecutive FactorSegments covering [lo, hi) in fixed-size windows."""
    lo = max(int(lo), 2)
    sieving = simple_primes(math.isqrt(max(int(hi) - 1, 2)))
    a = lo
    while a < hi:
        b = min(a + size, int(hi))
        yield factor_segment(a, b, max_size=max(size, FACTOR_SEGMENT_SIZE), sieving=sieving)
        a = b
