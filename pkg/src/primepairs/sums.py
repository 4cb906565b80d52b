"""
Finite sums over primes, prime powers and squarefree moduli.

Every sum comes in two shapes: a ``*_trace`` function evaluating it at each
point of an ascending grid (returning a :class:`SumTrace`) and a scalar
function evaluating it at a single ``x``.  Terms are streamed in ascending,
fixed-size chunks and accumulated with :mod:`primepairs._accum`, so values
are reproducible bit for bit.

Lambda(m*p + k) is read off the prime table (primes) and a sorted list of
proper prime powers; no real-valued Lambda table is ever materialised.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from ._accum import Partials, checkpoint_counts, checkpoint_sums, class_sums
from .arith import evaluate
from .asymptotic import log_integral, zeta_and_deriv
from .errors import ParityWarning, RangeError, UsageError
from .sieve import (APClass, PrimeTable, factor_windows, least_prime_in_ap,
                    prime_powers)
from .trace import Checkpoint, SumTrace


@dataclass(frozen=True)
class LinearForm:
    """The map p -> m*p + k with m >= 1, k != 0 and gcd(m, k) = 1."""

    m: int
    k: int

    def __post_init__(self):
        m, k = int(self.m), int(self.k)
        if m < 1:
            raise UsageError(f"m must be >= 1, got {m}")
        if k == 0:
            raise UsageError("k must be nonzero")
        if math.gcd(m, k) != 1:
            raise UsageError(f"gcd(m, k) = gcd({m}, {k}) != 1")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "k", k)

    @property
    def parity_admissible(self) -> bool:
        return (self.m + self.k) % 2 == 1

    def __call__(self, p):
        return self.m * p + self.k

    def warn_if_degenerate(self) -> None:
        if not self.parity_admissible:
            warnings.warn(
                f"form ({self.m},{self.k}): m + k is even, so m*p + k is even for every odd p",
                ParityWarning, stacklevel=3)


def _grid(grid) -> list[int]:
    g = sorted({int(x) for x in grid})
    if not g:
        raise UsageError("empty grid")
    return g


def _need(table: PrimeTable, top: int, what: str = "x") -> None:
    if top > table.limit:
        raise RangeError(f"{what}={top} exceeds table limit {table.limit}")


class _Lambda:
    """Lambda(v) for arrays of integers v <= vmax."""

    def __init__(self, table: PrimeTable, vmax: int):
        _need(table, vmax, "m*x+k")
        self.table = table
        self.pp, self.base = prime_powers(table, max(vmax, 4), proper=True)

    def __call__(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        out = np.zeros(v.shape)
        ok = v >= 2
        vv = v[ok]
        sub = np.zeros(vv.shape)
        prime = self.table.is_prime_array(vv)
        sub[prime] = np.log(vv[prime].astype(np.float64))
        if self.pp.size:
            idx = np.minimum(np.searchsorted(self.pp, vv), self.pp.size - 1)
            hit = self.pp[idx] == vv
            sub[hit] = np.log(self.base[idx[hit]].astype(np.float64))
        out[ok] = sub
        return out

    def is_proper_power(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64)
        if not self.pp.size:
            return np.zeros(v.shape, dtype=bool)
        idx = np.minimum(np.searchsorted(self.pp, v), self.pp.size - 1)
        return self.pp[idx] == v


def _trace(grid: list[int], values: Sequence[float], meta: dict, main=None) -> SumTrace:
    cps = []
    for i, (x, v) in enumerate(zip(grid, values)):
        mn = None if main is None else main(x)
        cps.append(Checkpoint(x, v, mn, None if mn is None else v - mn))
    return SumTrace(cps, meta)


# ---------------------------------------------------------------------------
# Mertens-type sums in a progression


@dataclass(frozen=True)
class MertensResult:
    value: float
    main: float | None = None
    residual: float | None = None


WEIGHTS = ("reciprocal", "log_over_p")


def mertens_ap_trace(table: PrimeTable, grid, ap: APClass, weight: str = "reciprocal") -> SumTrace:
    """sum over p <= x, p = a (mod q) of 1/p or log(p)/p.

    For the reciprocal weight the main term is
    ``log log x / phi(q) + 1 / p(a, q)`` with p(a, q) the least prime in the class.
    """
    if weight not in WEIGHTS:
        raise UsageError(f"weight must be one of {WEIGHTS}, got {weight!r}")
    grid = _grid(grid)
    _need(table, grid[-1])

    def chunks():
        for a, b, ps in table.prime_chunks(grid[-1]):
            sel = ps[ps % ap.q == ap.a % ap.q]
            pf = sel.astype(np.float64)
            yield a, b, sel, (1.0 / pf if weight == "reciprocal" else np.log(pf) / pf)

    values = checkpoint_sums(chunks(), grid)
    main = None
    if weight == "reciprocal":
        phi = evaluate(ap.q).phi
        least = least_prime_in_ap(ap, table=table)
        inv = 1.0 / least if least else 0.0

        def main(x):
            return math.log(math.log(x)) / phi + inv if x >= 3 else None

    meta = {"op": "mertens_ap", "a": ap.a, "q": ap.q, "weight": weight}
    return _trace(grid, values, meta, main)


def mertens_ap(table: PrimeTable, x: int, ap: APClass, weight: str = "reciprocal") -> MertensResult:
    c = mertens_ap_trace(table, [x], ap, weight).last
    return MertensResult(c.value, c.main, c.residual)


# ---------------------------------------------------------------------------
# sums over p of Lambda(m p + k)


def _pair_chunks(table: PrimeTable, xmax: int, form: LinearForm, fn, lo: int = 2) -> Iterator:
    lam = _Lambda(table, form(xmax))
    for a, b, ps in table.prime_chunks(xmax, lo=lo):
        L = lam(form(ps))
        nz = L != 0
        yield a, b, ps[nz], fn(ps[nz], L[nz])


def pair_weighted_trace(table: PrimeTable, grid, form: LinearForm) -> SumTrace:
    """sum over p <= x of Lambda(m p + k) / p."""
    grid = _grid(grid)
    _need(table, grid[-1])
    form.warn_if_degenerate()
    values = checkpoint_sums(_pair_chunks(table, grid[-1], form, lambda p, L: L / p), grid)
    return _trace(grid, values, {"op": "pair_weighted", "m": form.m, "k": form.k})


def pair_weighted_sum(table: PrimeTable, x: int, form: LinearForm) -> float:
    return pair_weighted_trace(table, [x], form).last.value


def lambda_pair_trace(table: PrimeTable, grid, form: LinearForm) -> SumTrace:
    """sum over p <= x of Lambda(m p + k); main term li(x)."""
    grid = _grid(grid)
    _need(table, grid[-1])
    form.warn_if_degenerate()
    values = checkpoint_sums(_pair_chunks(table, grid[-1], form, lambda p, L: L), grid)
    return _trace(grid, values, {"op": "lambda_pair", "m": form.m, "k": form.k},
                  lambda x: log_integral(x) if x >= 2 else None)


def lambda_pair_sum(table: PrimeTable, x: int, form: LinearForm) -> float:
    return lambda_pair_trace(table, [x], form).last.value


def pair_count_trace(table: PrimeTable, grid, form: LinearForm) -> SumTrace:
    """Number of primes p with m p + k prime and m p + k <= x."""
    grid = _grid(grid)
    _need(table, grid[-1])
    form.warn_if_degenerate()
    pmax = (grid[-1] - form.k) // form.m

    def chunks():
        if pmax < 2:
            return
        for a, b, ps in table.prime_chunks(pmax):
            v = form(ps)
            hit = np.zeros(v.shape, dtype=bool)
            ok = v >= 2
            hit[ok] = table.is_prime_array(v[ok])
            yield form(a), form(b), v[hit], np.ones(int(hit.sum()), dtype=np.int64)

    values = checkpoint_counts(chunks(), grid)
    return _trace(grid, values, {"op": "pair_count", "m": form.m, "k": form.k})


def pair_count(table: PrimeTable, x: int, form: LinearForm) -> int:
    return int(pair_count_trace(table, [x], form).last.value)


def prime_power_pair_trace(table: PrimeTable, grid, form: LinearForm, weight: str = "reciprocal",
                           tail_from: int | None = None) -> SumTrace:
    """Sum of Lambda(m p + k) over primes p with m p + k a prime power of exponent >= 2.

    ``reciprocal`` weights each term by 1/p and runs over p <= x;
    ``unweighted`` runs over m p + k <= x.  ``tail_from`` keeps only p > tail_from.
    """
    if weight not in ("reciprocal", "unweighted"):
        raise UsageError(f"weight must be 'reciprocal' or 'unweighted', got {weight!r}")
    grid = _grid(grid)
    _need(table, grid[-1])
    xmax = grid[-1]
    vmax = form(xmax) if weight == "reciprocal" else xmax
    Q, base = prime_powers(table, max(vmax, 4), proper=True)
    p, rem = np.divmod(Q - form.k, form.m)
    ok = (rem == 0) & (p >= 2) & (p <= xmax)
    Q, base, p = Q[ok], base[ok], p[ok]
    ok = table.is_prime_array(p)
    if tail_from is not None:
        ok &= p > int(tail_from)
    Q, base, p = Q[ok], base[ok], p[ok]
    L = np.log(base.astype(np.float64))
    if weight == "reciprocal":
        order = np.argsort(p, kind="stable")
        keys, terms = p[order], (L / p)[order]
    else:
        keys, terms = Q, L
    values = checkpoint_sums([(2, xmax + 1, keys, terms)], grid)
    meta = {"op": "prime_power_pair", "m": form.m, "k": form.k, "weight": weight, "tail_from": tail_from}
    return _trace(grid, values, meta)


def prime_power_pair_sum(table: PrimeTable, x: int, form: LinearForm, weight: str = "reciprocal",
                         tail_from: int | None = None) -> float:
    return prime_power_pair_trace(table, [x], form, weight, tail_from).last.value


@dataclass(frozen=True)
class TailResult:
    total: float
    pair_part: float
    power_part: float


def chebyshev_tail(table: PrimeTable, x0: int, x: int, form: LinearForm) -> TailResult:
    """sum over x0 < p <= x of Lambda(m p + k) / p, split by whether m p + k is prime."""
    x0, x = int(x0), int(x)
    if x0 > x:
        raise UsageError(f"need x0 <= x, got x0={x0}, x={x}")
    if x0 == x:
        return TailResult(0.0, 0.0, 0.0)
    _need(table, x)
    lam = _Lambda(table, form(x))
    pair, power = Partials(), Partials()
    for a, b, ps in table.prime_chunks(x, lo=x0 + 1):
        v = form(ps)
        L = lam(v)
        pp = lam.is_proper_power(v)
        pair.add(math.fsum(L[~pp] / ps[~pp]))
        power.add(math.fsum(L[pp] / ps[pp]))
    total = Partials()
    total.add(pair.value())
    total.add(power.value())
    return TailResult(total.value(), pair.value(), power.value())


# ---------------------------------------------------------------------------
# the Mobius-inverted double sum


@dataclass(frozen=True)
class InversionResult:
    value: float
    ledger: dict[int, float] = field(repr=False)   # d -> sum of 1/p over p <= x with d | m p + k
    restricted: bool = False

    def contribution(self, d: int) -> float:
        return -evaluate(d).mu * math.log(d) * self.ledger.get(d, 0.0) if d > 1 else 0.0


def _squarefree_moduli(dmax: int, form: LinearForm, restricted: bool):
    """(d, mu(d)) for squarefree d <= dmax that can divide some m p + k."""
    yield 1, 1
    if dmax < 2:
        return
    for seg in factor_windows(2, dmax + 1):
        d = seg.n
        keep = seg.mu != 0
        keep &= np.gcd(d, form.m) == 1
        if restricted:
            keep &= np.gcd(d, abs(form.k)) == 1
        for dd, mu in zip(d[keep].tolist(), seg.mu[keep].tolist()):
            yield dd, mu


def _inversion_terms(table: PrimeTable, x: int, form: LinearForm, restricted: bool):
    """Yield (d, mu(d), indices into primes<=x of p with d | m p + k)."""
    ps = table.primes(2, x)
    dmax = form(x)
    for d, mu in _squarefree_moduli(dmax, form, restricted):
        if d == 1:
            yield d, mu, np.arange(ps.size), ps
            continue
        r = (-form.k * pow(form.m, -1, d)) % d
        yield d, mu, np.flatnonzero(ps % d == r), ps


def inversion_decomposition(table: PrimeTable, x: int, form: LinearForm, restricted: bool = False) -> InversionResult:
    """-sum over squarefree d <= m x + k of mu(d) log d * sum_{p <= x, d | m p + k} 1/p.

    ``restricted`` additionally requires gcd(k, d) = 1.  Without it the
    result equals :func:`pair_weighted_sum` exactly (Mobius inversion); with
    it the terms of primes p dividing k drop out.
    """
    x = int(x)
    _need(table, form(x), "m*x+k")
    form.warn_if_degenerate()
    ledger: dict[int, float] = {}
    terms: list[float] = []
    for d, mu, idx, ps in _inversion_terms(table, x, form, restricted):
        if not idx.size:
            continue
        inner = math.fsum(1.0 / ps[idx])
        ledger[d] = inner
        if d > 1:
            terms.append(-mu * math.log(d) * inner)
    return InversionResult(math.fsum(terms), ledger, restricted)


def inversion_profile(table: PrimeTable, x: int, form: LinearForm, restricted: bool = False,
                      exclude: Sequence[int] = ()) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Both sides of the inversion identity at every prime x' <= x.

    Returns (primes, direct, inverted): ``direct`` is the running sum of
    Lambda(m p + k)/p and ``inverted`` the running value of the double sum,
    whose per-d contributions are binned by prime before accumulation.
    Primes in ``exclude`` are dropped from both sides.
    """
    x = int(x)
    _need(table, form(x), "m*x+k")
    ps = table.primes(2, x)
    keep = ~np.isin(ps, np.asarray(exclude, dtype=np.int64))
    lam = _Lambda(table, form(x))
    direct = np.cumsum(np.where(keep, lam(form(ps)) / ps, 0.0))
    bins = np.zeros(ps.size)
    for d, mu, idx, _ in _inversion_terms(table, x, form, restricted):
        if d == 1 or not idx.size:
            continue
        idx = idx[keep[idx]]
        bins[idx] += -mu * math.log(d) / ps[idx]
    return ps, direct, np.cumsum(bins)


# ---------------------------------------------------------------------------
# twisted Mobius sums


@dataclass(frozen=True)
class MobiusSumResult:
    value: float
    target: float | None = None
    gap: float | None = None


def _mobius_target(s: float, log_power: int, conditioned: bool) -> float | None:
    if conditioned or log_power != 1:
        return None
    if s == 1:
        return -1.0
    if s > 1:
        z, dz = zeta_and_deriv(s)
        return dz / z**2
    return None


def twisted_mobius_trace(grid, s: float = 1.0, log_power: int = 1, coprime_to: int | None = None,
                         residue: APClass | None = None) -> SumTrace:
    """sum over n <= x of mu(n) (log n)^log_power / n^s, optionally restricted.

    ``coprime_to=q`` keeps gcd(n, q) = 1; ``residue=APClass(a, q)`` keeps
    n = a (mod q).  Main term (when known) is the limit: zeta'(s)/zeta(s)^2
    for s > 1 and -1 for s = 1, both with log_power 1 and no restriction.
    """
    if isinstance(s, complex):
        raise UsageError("complex s is not supported")
    s = float(s)
    if not 0.5 <= s <= 4:
        raise UsageError(f"s must lie in [1/2, 4], got {s}")
    if log_power not in (1, 2):
        raise UsageError(f"log_power must be 1 or 2, got {log_power}")
    grid = _grid(grid)

    def chunks():
        for seg in factor_windows(2, grid[-1] + 1):
            n = seg.n
            keep = seg.mu != 0
            if coprime_to is not None:
                keep &= np.gcd(n, int(coprime_to)) == 1
            if residue is not None:
                keep &= n % residue.q == residue.a % residue.q
            nk = n[keep]
            nf = nk.astype(np.float64)
            t = seg.mu[keep] * np.log(nf) ** log_power / nf**s
            yield seg.lo, seg.hi, nk, t

    values = checkpoint_sums(chunks(), grid)
    target = _mobius_target(s, log_power, coprime_to is not None or residue is not None)
    meta = {"op": "twisted_mobius", "s": s, "log_power": log_power, "coprime_to": coprime_to,
            "residue": None if residue is None else [residue.a, residue.q]}
    return _trace(grid, values, meta, None if target is None else (lambda x: target))


def twisted_mobius_sum(x: int, s: float = 1.0, log_power: int = 1, coprime_to: int | None = None,
                       residue: APClass | None = None) -> MobiusSumResult:
    c = twisted_mobius_trace([x], s, log_power, coprime_to, residue).last
    return MobiusSumResult(c.value, c.main, c.residual)


# ---------------------------------------------------------------------------
# Chebyshev sums in progressions and the Lambda * Lambda series


def psi_class_table(table: PrimeTable, grid, q: int) -> np.ndarray:
    """psi(x, q, r) for every grid x (rows) and residue r mod q (columns)."""
    grid = _grid(grid)
    _need(table, grid[-1])
    n, base = prime_powers(table, grid[-1])
    return class_sums(n, n % q, np.log(base.astype(np.float64)), grid, q)


def psi_ap_trace(table: PrimeTable, grid, q: int, a: int) -> SumTrace:
    """psi(x, q, a) with main term x / phi(q)."""
    ap = APClass(a, q)
    grid = _grid(grid)
    _need(table, grid[-1])
    n, base = prime_powers(table, grid[-1])
    sel = n % ap.q == ap.a % ap.q
    values = checkpoint_sums([(2, grid[-1] + 1, n[sel], np.log(base[sel].astype(np.float64)))], grid)
    phi = evaluate(ap.q).phi
    return _trace(grid, values, {"op": "psi_ap", "a": ap.a, "q": ap.q}, lambda x: x / phi)


def psi_ap(table: PrimeTable, x: int, q: int, a: int) -> float:
    return psi_ap_trace(table, [x], q, a).last.value


def pi_ap_trace(table: PrimeTable, grid, q: int, a: int) -> SumTrace:
    """pi(x, q, a) with main term li(x) / phi(q)."""
    ap = APClass(a, q)
    grid = _grid(grid)
    _need(table, grid[-1])

    def chunks():
        for lo, hi, ps in table.prime_chunks(grid[-1]):
            sel = ps[ps % ap.q == ap.a % ap.q]
            yield lo, hi, sel, np.ones(sel.size, dtype=np.int64)

    values = checkpoint_counts(chunks(), grid)
    phi = evaluate(ap.q).phi
    return _trace(grid, values, {"op": "pi_ap", "a": ap.a, "q": ap.q},
                  lambda x: log_integral(x) / phi if x >= 2 else None)


def pi_ap(table: PrimeTable, x: int, q: int, a: int) -> int:
    return int(pi_ap_trace(table, [x], q, a).last.value)


def hl_partial_trace(table: PrimeTable, grid, form: LinearForm, s: float = 1.0) -> SumTrace:
    """sum over n <= x of Lambda(n) Lambda(m n + k) / n^s, real s >= 1."""
    if isinstance(s, complex):
        raise UsageError("complex s is not supported")
    s = float(s)
    if s < 1:
        raise UsageError(f"s must be >= 1, got {s}")
    grid = _grid(grid)
    _need(table, grid[-1])
    form.warn_if_degenerate()
    n, base = prime_powers(table, grid[-1])
    lam = _Lambda(table, form(grid[-1]))
    L2 = lam(form(n))
    nz = L2 != 0
    nf = n[nz].astype(np.float64)
    terms = np.log(base[nz].astype(np.float64)) * L2[nz] / nf**s
    values = checkpoint_sums([(1, grid[-1] + 1, n[nz], terms)], grid)
    return _trace(grid, values, {"op": "hl_partial", "m": form.m, "k": form.k, "s": s})


def hl_partial_sum(table: PrimeTable, x: int, form: LinearForm, s: float = 1.0) -> float:
    return hl_partial_trace(table, [x], form, s).last.value


def vonmangoldt_dirichlet_trace(table: PrimeTable, grid, sigma: float) -> SumTrace:
    """sum over n <= x of Lambda(n) / n^sigma, main term -zeta'(sigma)/zeta(sigma)."""
    sigma = float(sigma)
    if sigma <= 1:
        raise UsageError(f"sigma must exceed 1, got {sigma}")
    grid = _grid(grid)
    _need(table, grid[-1])
    n, base = prime_powers(table, grid[-1])
    terms = np.log(base.astype(np.float64)) / n.astype(np.float64) ** sigma
    values = checkpoint_sums([(1, grid[-1] + 1, n, terms)], grid)
    z, dz = zeta_and_deriv(sigma)
    return _trace(grid, values, {"op": "vonmangoldt_dirichlet", "sigma": sigma}, lambda x: -dz / z)


def restricted_mobius_trace(grid, form: LinearForm, s: float, log_power: int) -> SumTrace:
    """sum over d <= m x + k with gcd(k m, d) = 1 of mu(d) (log d)^log_power / d^s, indexed by x."""
    grid = _grid(grid)
    inner = twisted_mobius_trace([form(x) for x in grid], s, log_power, coprime_to=abs(form.m * form.k))
    cps = [Checkpoint(x, c.value) for x, c in zip(grid, inner.checkpoints)]
    meta = {"op": "restricted_mobius", "m": form.m, "k": form.k, "s": s, "log_power": log_power}
    return SumTrace(cps, meta)


SCANS = {
    "mertens-ap": mertens_ap_trace,
    "pair-weighted": pair_weighted_trace,
    "lambda-pair": lambda_pair_trace,
    "pair-count": pair_count_trace,
    "prime-power-pair": prime_power_pair_trace,
    "psi-ap": psi_ap_trace,
    "pi-ap": pi_ap_trace,
    "hl-partial": hl_partial_trace,
    "twisted-mobius": twisted_mobius_trace,
    "vonmangoldt-dirichlet": vonmangoldt_dirichlet_trace,
    "restricted-mobius": restricted_mobius_trace,
}
