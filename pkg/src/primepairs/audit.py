"""
Claim auditor: one executable check per registered claim, deterministic reports.

Each check returns a :class:`ClaimVerdict` whose status is one of

* ``exact-pass``: an identity holds to rounding at every tested point;
* ``bounded-pass``: an inequality holds, or an O-bound's implied-constant
  envelope is finite and stable over the top two decades of x;
* ``trend-consistent``: an asymptotic's fitted constant agrees with its target;
* ``counterexample``: a violated statement, with a re-checkable witness;
* ``report-only``: data without a verdict (sign-change claims, unstable
  envelopes, asymptotics that disagree with their target at desk scale).
"""
from __future__ import annotations

import csv
import io
import json
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from enum import Enum
from functools import lru_cache
from typing import Any, Callable

import numpy as np

from . import __version__
from ._accum import class_sums
from .arith import bulk, evaluate, factorize
from .asymptotic import fit, montgomery_track, sign_changes, singular_series, zeta_and_deriv
from .dirichlet import character_group, nonprincipal_character_sum, psi_all_characters, psi_ap_via_characters
from .errors import UsageError
from .sieve import APClass, PrimeTable, build_prime_table, least_prime_in_ap, least_primes_mod
from .sums import (LinearForm, inversion_decomposition, inversion_profile, lambda_pair_trace,
                   pair_count_trace, pair_weighted_sum, pair_weighted_trace, prime_power_pair_sum,
                   prime_power_pair_trace, psi_ap, twisted_mobius_trace, vonmangoldt_dirichlet_trace)
from .trace import Checkpoint, SumTrace, fmt, geometric_grid

SCHEMA_VERSION = "1"
HEADROOM = 1024          # table slack above the grid so m x + k stays in range
STABILITY = 0.5          # max relative drift of an envelope over the top two decades
TREND_TOLERANCE = 0.25   # fitted constant vs target


class Status(str, Enum):
    EXACT_PASS = "exact-pass"
    BOUNDED_PASS = "bounded-pass"
    TREND_CONSISTENT = "trend-consistent"
    COUNTEREXAMPLE = "counterexample"
    REPORT_ONLY = "report-only"


@dataclass
class ClaimVerdict:
    claim_id: str
    paper_ref: str
    params: dict
    status: Status
    witness: dict | None = None
    checkpoints: list[Checkpoint] = field(default_factory=list)
    fits: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class AuditConfig:
    limit: int = 10**7
    grid_lo: int = 10**4
    grid_ratio: float = 10**0.5
    dense_ratio: float = 10**0.125
    q_max: int = 100
    k_max: int = 20
    inversion_x: int = 10**4
    totient_d_max: int = 100
    least_prime_q_max: int = 1000
    cap_exponent: float = 6.0
    decomposition_x: int = 10**5
    twisted_q_max: int = 30
    claims: tuple[str, ...] | None = None
    exclude: tuple[str, ...] = ()
    overrides: dict = field(default_factory=dict, hash=False)
    workers: int = 1

    def __post_init__(self):
        if int(self.limit) < 10 * int(self.grid_lo):
            raise UsageError(f"limit must be at least 10 * grid_lo = {10 * int(self.grid_lo)}")
        if self.grid_ratio <= 1 or self.dense_ratio <= 1:
            raise UsageError("grid ratios must exceed 1")
        unknown = set(self.claims or ()) | set(self.exclude) | set(self.overrides)
        unknown -= set(REGISTRY)
        if unknown:
            raise UsageError(f"unknown claim ids: {sorted(unknown)}")

    def echo(self) -> dict:
        # worker count is excluded: reports must not depend on it
        out = {f.name: getattr(self, f.name) for f in fields(self) if f.name != "workers"}
        out["claims"] = list(self.claims) if self.claims is not None else None
        out["exclude"] = list(self.exclude)
        return out

    def selected(self) -> list[str]:
        ids = list(REGISTRY) if self.claims is None else [c for c in REGISTRY if c in self.claims]
        return [c for c in ids if c not in self.exclude]


@dataclass
class AuditReport:
    tool_version: str
    config: dict
    claims: list[ClaimVerdict]
    schema_version: str = SCHEMA_VERSION

    def verdict(self, claim_id: str) -> ClaimVerdict:
        for v in self.claims:
            if v.claim_id == claim_id:
                return v
        raise KeyError(claim_id)

    @property
    def exact_failures(self) -> list[str]:
        return [v.claim_id for v in self.claims if v.claim_id in EXACT_CLAIMS and v.status != Status.EXACT_PASS]


# ---------------------------------------------------------------------------
# shared state of one audit run


class _Context:
    def __init__(self, config: AuditConfig):
        self.config = config
        self._lock = threading.Lock()
        self._cache: dict = {}
        self._locks: dict = {}
        self._table: PrimeTable | None = None

    @property
    def table(self) -> PrimeTable:
        with self._lock:
            if self._table is None:
                self._table = build_prime_table(int(self.config.limit) + HEADROOM, workers=self.config.workers)
            return self._table

    @property
    def grid(self) -> list[int]:
        c = self.config
        return geometric_grid(c.grid_lo, c.limit, c.grid_ratio)

    @property
    def dense_grid(self) -> list[int]:
        c = self.config
        return sorted(set(geometric_grid(c.grid_lo, c.limit, c.dense_ratio)) | set(self.grid))

    def get(self, key, compute: Callable[[], Any]):
        """Compute once per key; concurrent callers of the same key wait for the first."""
        with self._lock:
            lock = self._locks.setdefault(key, threading.Lock())
        with lock:
            if key not in self._cache:
                self._cache[key] = compute()
            return self._cache[key]

    def coprime_mobius(self, f: LinearForm, s: float, log_power: int, xs) -> list[float]:
        """sum over d <= m x + k, gcd(d, m k) = 1 of mu(d) (log d)^lp / d^s for each x in xs.

        Forms sharing the radical of m k share one pass, evaluated at every
        endpoint the configured forms and grids need.
        """
        rad = _radical(f.m * f.k)

        def compute():
            c = self.config
            forms = [g for g in _forms({"forms": [[1, k] for k in range(2, c.k_max + 1, 2)]})
                     if _radical(g.m * g.k) == rad]
            ends = sorted({g(x) for g in forms for x in self.dense_grid})
            if not ends:
                return {}
            tr = twisted_mobius_trace(ends, s, log_power, coprime_to=rad)
            return dict(zip(ends, tr.values.tolist()))

        known = self.get(("coprime_mobius", rad, s, log_power), compute)
        ends = [f(x) for x in xs]
        if all(e in known for e in ends):
            return [known[e] for e in ends]
        uniq = sorted(set(ends))
        vals = dict(zip(uniq, twisted_mobius_trace(uniq, s, log_power, coprime_to=rad).values.tolist()))
        return [vals[e] for e in ends]

    def mobius_trace(self, grid: list[int], s: float) -> SumTrace:
        return self.get(("mobius", tuple(grid), s), lambda: twisted_mobius_trace(grid, s, 1))


def _grid(p: dict) -> list[int]:
    lo, hi, ratio = p["grid"]
    return geometric_grid(lo, hi, ratio)


def _forms(p: dict) -> list[LinearForm]:
    return [LinearForm(m, k) for m, k in p["forms"]]


def _radical(n: int) -> int:
    r = 1
    for p, _ in factorize(abs(n)):
        r *= p
    return r


@lru_cache(maxsize=None)
def _singular(m: int, k: int) -> float:
    return singular_series(LinearForm(m, k), cutoff=10**7)


def _label(f: LinearForm) -> str:
    return f"({f.m},{f.k})"


def _envelope(xs, ratios, upper: bool = True) -> dict:
    """Implied-constant envelope: running max of |ratio| (or running min of ratio for lower bounds).

    Stable when it moves by less than STABILITY (relative) across the top
    two decades of the grid.
    """
    xs = np.asarray(xs, dtype=np.float64)
    r = np.asarray(ratios, dtype=np.float64)
    if r.size == 0 or not np.all(np.isfinite(r)):
        return {"envelope": math.inf, "window_start": math.inf, "stable": False}
    E = np.maximum.accumulate(np.abs(r)) if upper else np.minimum.accumulate(r)
    start = E[int(np.searchsorted(xs, xs[-1] / 100))]
    end = E[-1]
    if upper:
        stable = end == 0 or (end - start) / end < STABILITY
    else:
        stable = end > 0 and (start - end) / start < STABILITY
    return {"envelope": float(end), "window_start": float(start), "stable": bool(stable)}


def _envelope_status(env: dict) -> Status:
    return Status.BOUNDED_PASS if env["stable"] else Status.REPORT_ONLY


def _trend(c: float, target: float) -> bool:
    return target != 0 and math.isfinite(c) and abs(c - target) / abs(target) <= TREND_TOLERANCE


# ---------------------------------------------------------------------------
# checks


def _c02(ctx: _Context, p: dict) -> ClaimVerdict:
    T, G = ctx.table, _grid(p)
    ps = T.primes(2, G[-1])
    w = np.log(ps.astype(np.float64)) / ps
    worst = np.full(len(G), math.inf)
    worst_class = [None] * len(G)
    for q in range(1, p["q_max"] + 1):
        S = class_sums(ps, ps % q, w, G, q)
        red = [a for a in range(q) if math.gcd(a, q) == 1]
        ratio = S[:, red] / np.log(np.asarray(G, dtype=np.float64))[:, None]
        j = ratio.argmin(axis=1)
        for i in range(len(G)):
            if ratio[i, j[i]] < worst[i]:
                worst[i] = ratio[i, j[i]]
                worst_class[i] = (red[j[i]] or q, q)
    env = _envelope(G, worst, upper=False)
    cps = [Checkpoint(x, float(v)) for x, v in zip(G, worst)]
    a, q = worst_class[-1]
    notes = [f"value = min over classes a mod q, q <= {p['q_max']}, of the sum divided by log x",
             f"lower-constant envelope c = {fmt(env['envelope'])} (window start {fmt(env['window_start'])}), "
             f"attained by a={a}, q={q} at x={G[-1]}"]
    return ClaimVerdict("C-02", "", p, _envelope_status(env), None, cps, [], notes)


def _c04(ctx: _Context, p: dict) -> ClaimVerdict:
    T, x = ctx.table, p["x"]
    witness = None
    worst = 0.0
    notes = []
    cps: list[Checkpoint] = []
    sample = geometric_grid(10, x, math.sqrt(10))
    for f in _forms(p):
        ps, direct, inv = inversion_profile(T, x, f)
        dev = np.abs(direct - inv) / np.maximum(np.abs(direct), 1.0)
        worst = max(worst, float(dev.max(initial=0.0)))
        bad = np.flatnonzero(dev > 1e-9)
        if bad.size and witness is None:
            i = int(bad[0])
            witness = {"x": int(ps[i]), "m": f.m, "k": f.k, "direct": float(direct[i]), "inverted": float(inv[i])}
        if f.k == 2:
            for g in sample:
                i = int(np.searchsorted(ps, g, side="right")) - 1
                if i >= 0:
                    cps.append(Checkpoint(g, float(direct[i]), float(inv[i]), float(direct[i] - inv[i])))
        r = inversion_decomposition(T, x, f, restricted=True).value
        kp = [q for q, _ in factorize(f.k)]
        _, d2, i2 = inversion_profile(T, x, f, restricted=True, exclude=kp)
        _, d3, _ = inversion_profile(T, x, f, exclude=kp)
        notes.append(f"form {_label(f)}: restricted value {fmt(r)} vs unrestricted {fmt(float(direct[-1]))}; "
                     f"with primes dividing k removed, restricted matches the direct sum to "
                     f"{fmt(float(np.abs(d2 - i2).max(initial=0.0)))} and the unrestricted direct sum to "
                     f"{fmt(float(np.abs(d2 - d3).max(initial=0.0)))}")
    notes.insert(0, f"max relative deviation over every prime x' <= {x} and all forms: {fmt(worst)}")
    status = Status.EXACT_PASS if witness is None else Status.COUNTEREXAMPLE
    return ClaimVerdict("C-04", "", p, status, witness, cps, [], notes)


def _totient_rows(d_max: int):
    _, _, phi = bulk(1, d_max + 1)
    d = np.arange(2, d_max + 1)
    return d, phi[1:], d / np.log(d.astype(np.float64))


def _c05l(ctx: _Context, p: dict) -> ClaimVerdict:
    d, phi, lower = _totient_rows(p["d_max"])
    bad = np.flatnonzero(phi <= lower)
    cps = [Checkpoint(int(a), int(b), float(c), float(b - c)) for a, b, c in zip(d, phi, lower)]
    notes = ["d = 1 is excluded: d / log d is undefined there"]
    if bad.size:
        i = int(bad[0])
        witness = {"d": int(d[i]), "phi": int(phi[i]), "lower_bound": float(lower[i])}
        notes.append(f"{bad.size} of {d.size} values of d violate the lower bound; largest violating d = {int(d[bad[-1]])}")
        return ClaimVerdict("C-05L", "", p, Status.COUNTEREXAMPLE, witness, cps, [], notes)
    return ClaimVerdict("C-05L", "", p, Status.BOUNDED_PASS, None, cps, [], notes)


def _c05u(ctx: _Context, p: dict) -> ClaimVerdict:
    d, phi, _ = _totient_rows(p["d_max"])
    bad = np.flatnonzero(phi >= d)
    cps = [Checkpoint(int(a), int(b), int(a), int(b - a)) for a, b in zip(d, phi)]
    notes = ["d = 1 is excluded: phi(1) = 1 = d"]
    if bad.size:
        i = int(bad[0])
        return ClaimVerdict("C-05U", "", p, Status.COUNTEREXAMPLE, {"d": int(d[i]), "phi": int(phi[i])}, cps, [], notes)
    return ClaimVerdict("C-05U", "", p, Status.BOUNDED_PASS, None, cps, [], notes)


def _c06(ctx: _Context, p: dict) -> ClaimVerdict:
    T, cap = ctx.table, p["cap_exponent"]
    cps = []
    witness = None
    best = (0.0, None)
    below = 0
    below_example = None
    total = 0
    for q in range(2, p["q_max"] + 1):
        least = least_primes_mod(q, T, cap)
        top = 0.0
        for a, pr in least.items():
            total += 1
            if pr is None:
                if witness is None:
                    witness = {"a": a, "q": q, "cap_exponent": cap}
                continue
            ratio = math.log(pr) / math.log(q)
            top = max(top, ratio)
            if ratio > best[0]:
                best = (ratio, (a, q, pr))
            if pr < q:
                below += 1
                if below_example is None:
                    below_example = (a, q, pr)
        cps.append(Checkpoint(q, top))
    a, q, pr = best[1]
    notes = [f"max observed log p(a,q) / log q = {fmt(best[0])} at a={a}, q={q}, p={pr} (cap exponent {fmt(cap)})",
             f"{total} reduced classes scanned"]
    if below:
        a, q, pr = below_example
        notes.append(f"lower bound q <= p(a,q) fails for {below} classes, e.g. a={a}, q={q}, p={pr}")
    status = Status.COUNTEREXAMPLE if witness else Status.BOUNDED_PASS
    return ClaimVerdict("C-06", "", p, status, witness, cps, [], notes)


def _c08(ctx: _Context, p: dict) -> ClaimVerdict:
    T, G = ctx.table, _grid(p)
    fits, notes, cps = [], [], []
    ok = True
    for f in _forms(p):
        tr = pair_weighted_trace(T, G, f)
        c0 = [-v for v in ctx.coprime_mobius(f, 1.0, 2, G)]
        fr = fit(tr, "loglog", (G[0], G[-1]))
        d = fr.to_dict() | {"series": _label(f), "target": c0[-1]}
        fits.append(d)
        ok &= _trend(fr.c, c0[-1])
        if f.k == 2:
            for x, v, c in zip(G, tr.values, c0):
                main = c * math.log(math.log(x))
                cps.append(Checkpoint(x, float(v), main, float(v) - main))
        notes.append(f"form {_label(f)}: fitted c = {fmt(fr.c)}, mobius constant c0 = {fmt(c0[-1])}, "
                     f"singular series = {fmt(_singular(f.m, f.k))}")
    status = Status.TREND_CONSISTENT if ok else Status.REPORT_ONLY
    return ClaimVerdict("C-08", "", p, status, None, cps, fits, notes)


def _c10(ctx: _Context, p: dict) -> ClaimVerdict:
    G = _grid(p)
    notes, cps = [], []
    for f in _forms(p):
        xs = sorted(set(geometric_grid(*p["grid"][:2], p["dense_ratio"])) | set(G))
        tr = SumTrace([Checkpoint(x, v) for x, v in zip(xs, ctx.coprime_mobius(f, 1.0, 2, xs))])
        sc = sign_changes(tr)
        if f.k == 2:
            cps = tr.checkpoints
        notes.append(f"form {_label(f)}: {len(sc)} sign changes on {len(tr)} checkpoints; "
                     f"range [{fmt(float(tr.values.min()))}, {fmt(float(tr.values.max()))}]")
    return ClaimVerdict("C-10", "", p, Status.REPORT_ONLY, None, cps, [], notes)


def _c13(ctx: _Context, p: dict) -> ClaimVerdict:
    T, G = ctx.table, _grid(p)
    witness, notes, cps = None, [], []
    for sigma in p["sigmas"]:
        tr = vonmangoldt_dirichlet_trace(T, G, sigma)
        limit = tr.last.main
        over = [c for c in tr.checkpoints if c.value > limit]
        if over and witness is None:
            witness = {"sigma": sigma, "x": int(over[0].x), "partial": over[0].value, "limit": limit}
        if not cps:
            cps = tr.checkpoints
        notes.append(f"sigma={fmt(sigma)}: partial sum at x={G[-1]} is {fmt(tr.last.value)}, limit {fmt(limit)}")
    notes.append("partial sums are nondecreasing in x, so the bound at the last checkpoint covers every smaller x")
    status = Status.COUNTEREXAMPLE if witness else Status.BOUNDED_PASS
    return ClaimVerdict("C-13", "", p, status, witness, cps, [], notes)


def _c14(ctx: _Context, p: dict) -> ClaimVerdict:
    T, G = ctx.table, _grid(p)
    fits, notes, cps = [], [], []
    ok = True
    for f in _forms(p):
        tr = pair_weighted_trace(T, G, f)
        fr = fit(tr, "loglog", (G[0], G[-1]))
        target = _singular(f.m, f.k)
        fits.append(fr.to_dict() | {"series": _label(f), "target": target})
        ok &= _trend(fr.c, target)
        if f.k == 2:
            pred = fr.predict(tr.xs)
            cps = [Checkpoint(c.x, c.value, float(m), float(c.value - m)) for c, m in zip(tr.checkpoints, pred)]
        notes.append(f"form {_label(f)}: fitted c = {fmt(fr.c)}, singular series {fmt(target)}")
    notes.append("target constant is the Hardy-Littlewood singular series, external to the audited text")
    status = Status.TREND_CONSISTENT if ok else Status.REPORT_ONLY
    return ClaimVerdict("C-14", "", p, status, None, cps, fits, notes)


def _c18(ctx: _Context, p: dict) -> ClaimVerdict:
    T, G = ctx.table, _grid(p)
    fits, notes, cps = [], [], []
    stable = True
    for f in _forms(p):
        tr = pair_count_trace(T, G, f)
        xs = tr.xs
        ratio = tr.values * np.log(xs) ** 2 / xs
        lo = _envelope(xs, ratio, upper=False)
        hi = _envelope(xs, ratio, upper=True)
        stable &= lo["stable"] and hi["stable"]
        fr = fit(tr, "x_log2", (G[0], G[-1]))
        fits.append(fr.to_dict() | {"series": _label(f), "target": _singular(f.m, f.k)})
        if f.k == 2:
            pred = fr.predict(xs)
            cps = [Checkpoint(c.x, c.value, float(m), float(c.value - m)) for c, m in zip(tr.checkpoints, pred)]
        notes.append(f"form {_label(f)}: a >= {fmt(lo['envelope'])}, b <= {fmt(hi['envelope'])}, "
                     f"fitted c = {fmt(fr.c)}")
    return ClaimVerdict("C-18", "", p, Status.BOUNDED_PASS if stable else Status.REPORT_ONLY, None, cps, fits, notes)


def _c22(ctx: _Context, p: dict) -> ClaimVerdict:
    T, G = ctx.table, _grid(p)
    ps = T.primes(2, G[-1])
    w = 1.0 / ps
    loglog = np.log(np.log(np.asarray(G, dtype=np.float64)))
    worst = np.zeros(len(G))
    where = [None] * len(G)
    for q in range(2, p["q_max"] + 1):
        phi = evaluate(q).phi
        S = class_sums(ps, ps % q, w, G, q)
        least = least_primes_mod(q, T)
        shape = math.log(2 * q) / phi
        for a in range(1, q):
            if math.gcd(a, q) != 1:
                continue
            main = loglog / phi + 1.0 / least[a]
            r = np.abs(S[:, a] - main) / shape
            for i in np.flatnonzero(r > worst):
                worst[i] = r[i]
                where[i] = (a, q)
    env = _envelope(G, worst)
    cps = [Checkpoint(x, float(v)) for x, v in zip(G, worst)]
    a, q = where[-1]
    notes = [f"value = max over 1 <= a < q <= {p['q_max']} of |sum - main| / (log 2q / phi(q))",
             f"implied-constant envelope {fmt(env['envelope'])} (window start {fmt(env['window_start'])}), "
             f"worst class a={a}, q={q} at x={G[-1]}",
             f"the error constant is unspecified; stability threshold {STABILITY} is a design choice"]
    return ClaimVerdict("C-22", "", p, _envelope_status(env), None, cps, [], notes)


def _c23(ctx: _Context, p: dict) -> ClaimVerdict:
    T, G = ctx.table, _grid(p)
    notes, cps = [], []
    stable = True
    for f in _forms(p):
        tr = prime_power_pair_trace(T, G, f, "reciprocal")
        v = tr.values
        xs = tr.xs[:-1]
        ratio = np.abs(v[-1] - v[:-1]) * np.sqrt(xs)
        env = _envelope(xs, ratio)
        stable &= env["stable"]
        if f.k == 2:
            cps = [Checkpoint(c.x, c.value, float(v[-1]), c.value - float(v[-1])) for c in tr.checkpoints]
            tail = prime_power_pair_sum(T, G[-1], f, "reciprocal", tail_from=G[-1] // 100)
            notes.append(f"form {_label(f)}: tail over {G[-1] // 100} < p <= {G[-1]} is {fmt(tail)}")
        notes.append(f"form {_label(f)}: c0 estimate {fmt(float(v[-1]))}, "
                     f"envelope of |S(x_max) - S(x)| x^(1/2) = {fmt(env['envelope'])}")
    return ClaimVerdict("C-23", "", p, Status.BOUNDED_PASS if stable else Status.REPORT_ONLY, None, cps, [], notes)


def _c25(ctx: _Context, p: dict) -> ClaimVerdict:
    notes, cps = [], []
    stable = True
    G = _grid(p)
    for s in p["s_values"]:
        tr = ctx.mobius_trace(G, s)
        xs = tr.xs
        gap = np.array([c.residual for c in tr.checkpoints])
        env = _envelope(xs, gap / xs ** (1 - s))
        stable &= env["stable"]
        if not cps:
            cps = tr.checkpoints
        notes.append(f"s={fmt(s)}: gap at x={int(xs[-1])} is {fmt(float(gap[-1]))}, target {fmt(tr.last.main)}, "
                     f"envelope of |gap| / x^(1-s) = {fmt(env['envelope'])}")
    x = G[-1]
    q = p["variant_q"]
    for a in (1, q - 1):
        v = twisted_mobius_trace([x], 1.0, 1, residue=APClass(a, q)).last.value
        notes.append(f"residue variant a={a}, q={q}, s=1: partial sum {fmt(v)} (limit constant not evaluated)")
    v = twisted_mobius_trace([x], 1.0, 1, coprime_to=q).last.value
    notes.append(f"coprime variant q={q}, s=1: partial sum {fmt(v)} (limit constant not evaluated)")
    return ClaimVerdict("C-25", "", p, Status.BOUNDED_PASS if stable else Status.REPORT_ONLY, None, cps, [], notes)


def _c29(ctx: _Context, p: dict) -> ClaimVerdict:
    tr = ctx.mobius_trace(_grid(p), 1.0)
    gap = tr.last.residual
    notes = [f"partial sum at x={int(tr.last.x)} is {fmt(tr.last.value)}, distance {fmt(abs(gap))} from -1 "
             f"(tolerance {fmt(p['tolerance'])})",
             "the L-function constant is not evaluated"]
    status = Status.TREND_CONSISTENT if abs(gap) <= p["tolerance"] else Status.REPORT_ONLY
    return ClaimVerdict("C-29", "", p, status, None, tr.checkpoints, [], notes)


def _c31(ctx: _Context, p: dict) -> ClaimVerdict:
    T, G = ctx.table, _grid(p)
    fits, notes, cps = [], [], []
    ok = True
    for f in _forms(p):
        tr = lambda_pair_trace(T, G, f)
        fr = fit(tr, "li", (G[0], G[-1]))
        target = _singular(f.m, f.k)
        ratios = np.array([c.value / c.main for c in tr.checkpoints])
        top = ratios[tr.xs >= G[-1] / 100]
        ok &= fr.c > 0 and bool(np.all(np.abs(top - target) <= TREND_TOLERANCE * target))
        c0 = -ctx.coprime_mobius(f, 1.0, 2, [G[-1]])[0]
        fits.append(fr.to_dict() | {"series": _label(f), "target": target})
        if f.k == 2:
            cps = tr.checkpoints
            xs = sorted(set(geometric_grid(*p["grid"][:2], p["dense_ratio"])) | set(G))
            inv = SumTrace([Checkpoint(x, v) for x, v in zip(xs, ctx.coprime_mobius(f, 0.5, 1, xs))])
            notes.append(f"form {_label(f)}: sum of mu(d) log d / d^(1/2) over gcd(km, d) = 1 has "
                         f"{len(sign_changes(inv))} sign changes on {len(inv)} checkpoints, "
                         f"range [{fmt(float(inv.values.min()))}, {fmt(float(inv.values.max()))}]")
        notes.append(f"form {_label(f)}: sum / li(x) at x={G[-1]} is {fmt(float(ratios[-1]))}, fitted c = {fmt(fr.c)}, "
                     f"mobius constant c0 = {fmt(c0)}, singular series {fmt(target)}")
    status = Status.TREND_CONSISTENT if ok else Status.REPORT_ONLY
    return ClaimVerdict("C-31", "", p, status, None, cps, fits, notes)


def _c40(ctx: _Context, p: dict) -> ClaimVerdict:
    G = _grid(p)
    tr = montgomery_track(ctx.table, G, range(2, p["q_max"] + 1), "all")
    worst = {x: 0.0 for x in G}
    for r in tr.rows:
        worst[r.x] = max(worst[r.x], abs(r.normalized))
    vals = [worst[x] for x in G]
    env = _envelope(G, vals)
    summary = tr.summary()
    qmax = max(summary, key=lambda q: (summary[q], -q))
    notes = [f"value = max over q <= {p['q_max']} and reduced a of |psi - x/phi(q)| (q/x)^(1/2); epsilon taken as 0",
             f"envelope {fmt(env['envelope'])} (window start {fmt(env['window_start'])}); "
             f"largest per-modulus maximum {fmt(summary[qmax])} at q={qmax}"]
    cps = [Checkpoint(x, v) for x, v in zip(G, vals)]
    return ClaimVerdict("C-40", "", p, _envelope_status(env), None, cps, [], notes)


def _c42(ctx: _Context, p: dict) -> ClaimVerdict:
    T = ctx.table
    x = min(p["x"], ctx.config.limit)
    total = psi_ap(T, x, 1, 1)
    witness, cps = None, []
    worst = 0.0
    noncyclic = 0
    mismatched = 0
    exceeds = 0
    for q in range(1, p["q_max"] + 1):
        g = character_group(q)
        noncyclic += len(g.generators) > 1
        qworst = 0.0
        for a in range(1, q + 1):
            if math.gcd(a, q) != 1:
                continue
            direct = psi_ap(T, x, q, a)
            via = psi_ap_via_characters(x, q, a, T)
            dev = abs(direct - via) / total
            qworst = max(qworst, dev)
            if dev > 1e-9 and witness is None:
                witness = {"x": x, "q": q, "a": a, "direct": direct, "via_characters": via}
            s = nonprincipal_character_sum(q, a)
            expected = g.phi * (a % q == 1 % q) - 1
            mismatched += s != expected
            exceeds += abs(s) > math.sqrt(q) * math.log(q) if q > 1 else 0
        worst = max(worst, qworst)
        cps.append(Checkpoint(q, qworst))
    notes = [f"x = {x}; value = max over reduced a of |direct - decomposed| / psi(x) for each q",
             f"max relative deviation {fmt(worst)}",
             f"nonprincipal character sums equal phi(q)[a = 1] - 1 exactly in all but {mismatched} classes; "
             f"{exceeds} classes exceed q^(1/2) log q",
             f"{noncyclic} moduli have non-cyclic unit groups and need more than one generator"]
    status = Status.EXACT_PASS if witness is None and mismatched == 0 else Status.COUNTEREXAMPLE
    return ClaimVerdict("C-42", "", p, status, witness, cps, [], notes)


def _c45(ctx: _Context, p: dict) -> ClaimVerdict:
    T, G = ctx.table, _grid(p)
    vals = []
    for x in G:
        w = 0.0
        for q in range(3, p["q_max"] + 1):
            _, psis = psi_all_characters(T, x, q)
            e0 = np.zeros(psis.size)
            e0[0] = x
            shape = math.sqrt(x) * math.log(x) * math.log(q * x)
            w = max(w, float(np.abs(psis - e0).max()) / shape)
        vals.append(w)
    env = _envelope(G, vals)
    notes = [f"value = max over 3 <= q <= {p['q_max']} and characters of |psi(x, chi) - E0 x| / (x^(1/2) log x log qx)",
             f"envelope {fmt(env['envelope'])} (window start {fmt(env['window_start'])})"]
    cps = [Checkpoint(x, v) for x, v in zip(G, vals)]
    return ClaimVerdict("C-45", "", p, _envelope_status(env), None, cps, [], notes)


def _c46(ctx: _Context, p: dict) -> ClaimVerdict:
    T, G = ctx.table, _grid(p)
    notes, fits, cps = [], [], []
    stable = True
    for f in _forms(p):
        tr = prime_power_pair_trace(T, G, f, "unweighted")
        xs = tr.xs
        ratio = tr.values / np.sqrt(xs)
        env = _envelope(xs, ratio)
        stable &= env["stable"]
        c = float(np.dot(tr.values, np.sqrt(xs)) / xs.sum())  # least squares through the origin
        fits.append({"model": "sqrt", "c": c, "series": _label(f)})
        if f.k == 2:
            cps = [Checkpoint(cp.x, cp.value, c * math.sqrt(cp.x), cp.value - c * math.sqrt(cp.x)) for cp in tr.checkpoints]
        notes.append(f"form {_label(f)}: envelope of sum / x^(1/2) = {fmt(env['envelope'])} "
                     f"(window start {fmt(env['window_start'])})")
    return ClaimVerdict("C-46", "", p, Status.BOUNDED_PASS if stable else Status.REPORT_ONLY, None, cps, fits, notes)


@dataclass(frozen=True)
class _Claim:
    ref: str
    anchor: str
    check: Callable[[_Context, dict], ClaimVerdict]
    defaults: Callable[[AuditConfig], dict]


def _forms_param(c: AuditConfig) -> dict:
    return {"grid": [c.grid_lo, c.limit, c.grid_ratio], "forms": [[1, k] for k in range(2, c.k_max + 1, 2)]}


REGISTRY: dict[str, _Claim] = {
    "C-02": _Claim("Eq. (2)", "Σ log p/p > c log x", _c02,
                   lambda c: {"grid": [c.grid_lo, c.limit, c.grid_ratio], "q_max": c.q_max}),
    "C-04": _Claim("Eq. (4)", "Σ (1/p) Λ(p+2a) = −Σ μ(d) log d", _c04,
                   lambda c: {"x": min(c.inversion_x, c.limit), "forms": _forms_param(c)["forms"]}),
    "C-05L": _Claim("Eq. (5)", "d/log d < φ(d)", _c05l, lambda c: {"d_max": c.totient_d_max}),
    "C-05U": _Claim("Eq. (5)", "φ(d) < d", _c05u, lambda c: {"d_max": c.totient_d_max}),
    "C-06": _Claim("Eq. (6)", "p(2a,d) < d^6", _c06,
                   lambda c: {"q_max": c.least_prime_q_max, "cap_exponent": c.cap_exponent}),
    "C-08": _Claim("Eq. (8)", "c_0 log log x + o(log log x)", _c08, _forms_param),
    "C-10": _Claim("Eq. (10)", "Σ μ(d) log²d/d = Ω±(x^{−1/2+ε})", _c10,
                   lambda c: _forms_param(c) | {"dense_ratio": c.dense_ratio}),
    "C-13": _Claim("Eq. (13)", "Σ Λ(n)/n^σ < ∞, σ > 1", _c13,
                   lambda c: {"grid": [c.grid_lo, c.limit, c.grid_ratio], "sigmas": [1.5, 2.0, 3.0]}),
    "C-14": _Claim("Eq. (14)", "∼ c log log x", _c14, _forms_param),
    "C-18": _Claim("Eq. (18)", "a x/log²x ≤ π_f(x) ≤ b x/log²x", _c18, _forms_param),
    "C-22": _Claim("Thm 3", "log log x/φ(q) + 1/p(a,q)", _c22,
                   lambda c: {"grid": [c.grid_lo, c.limit, c.grid_ratio], "q_max": c.q_max}),
    "C-23": _Claim("Lemma 4", "≤ c_0 + O(x^{−1/2+ε})", _c23, _forms_param),
    "C-25": _Claim("Lemma 5", "ζ′(s)/ζ(s)² + O(…)", _c25,
                   lambda c: {"grid": [c.grid_lo, c.limit, c.grid_ratio], "s_values": [1.0, 2.0], "variant_q": 4}),
    "C-29": _Claim("Eq. (29)", "ζ′(1)/ζ(1)² = −1", _c29,
                   lambda c: {"grid": [c.grid_lo, c.limit, c.grid_ratio], "tolerance": 0.1}),
    "C-31": _Claim("Thm 6", "≥ c_0 li(x) + o(li(x))", _c31,
                   lambda c: _forms_param(c) | {"dense_ratio": c.dense_ratio}),
    "C-40": _Claim("Conj. 7", "x/φ(q) + O(x^{1/2+ε}/q^{1/2})", _c40,
                   lambda c: {"grid": [c.grid_lo, c.limit, c.grid_ratio], "q_max": c.q_max}),
    "C-42": _Claim("Eq. (42)", "ψ(x,q,a) = (1/φ(q)) Σ χ̄(a) ψ(x,χ)", _c42,
                   lambda c: {"x": c.decomposition_x, "q_max": c.q_max}),
    "C-45": _Claim("Thm 9", "E_0(χ)x + O(x^{1/2} log x log qx)", _c45,
                   lambda c: {"grid": [c.grid_lo, c.limit, c.grid_ratio], "q_max": c.twisted_q_max}),
    "C-46": _Claim("Lemma 10", "≤ c x^{1/2+ε}", _c46, _forms_param),
}

EXACT_CLAIMS = ("C-04", "C-42")


def _params(claim_id: str, config: AuditConfig, params: dict | None) -> dict:
    p = REGISTRY[claim_id].defaults(config)
    p.update(config.overrides.get(claim_id, {}))
    if params:
        unknown = set(params) - set(p)
        if unknown:
            raise UsageError(f"{claim_id}: unknown parameters {sorted(unknown)}")
        p.update(params)
    return p


def _run(ctx: _Context, claim_id: str, params: dict | None = None) -> ClaimVerdict:
    claim = REGISTRY[claim_id]
    p = _params(claim_id, ctx.config, params)
    ref = f"{claim.ref}: {claim.anchor}"
    try:
        v = claim.check(ctx, p)
    except Exception as e:  # per-claim failures become findings, not crashes
        return ClaimVerdict(claim_id, ref, p, Status.REPORT_ONLY, None, [], [], [f"error: {type(e).__name__}: {e}"])
    v.paper_ref = ref
    return v


def run_claim(claim_id: str, params: dict | None = None, config: AuditConfig | None = None) -> ClaimVerdict:
    """Run one registered check; ``params`` override its defaults."""
    if claim_id not in REGISTRY:
        raise UsageError(f"unknown claim {claim_id!r}; registered: {', '.join(REGISTRY)}")
    config = config or AuditConfig()
    _params(claim_id, config, params)  # validate before any work
    return _run(_Context(config), claim_id, params)


def run_all(config: AuditConfig | None = None) -> AuditReport:
    """Every selected claim, concurrently, assembled in registry order."""
    config = config or AuditConfig()
    ctx = _Context(config)
    ids = config.selected()
    ctx.table  # build once, before the workers start
    with ThreadPoolExecutor(max_workers=max(1, int(config.workers))) as pool:
        verdicts = list(pool.map(lambda c: _run(ctx, c), ids))
    return AuditReport(__version__, config.echo(), verdicts)


# ---------------------------------------------------------------------------
# serialization


def _clean(v):
    """Floats to 12 significant digits; non-finite floats become strings."""
    if isinstance(v, Enum):
        return v.value
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return str(v)
        r = float(f"{v:.12g}")
        return int(r) if r.is_integer() and abs(r) < 1e15 else r
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


def _verdict_dict(v: ClaimVerdict) -> dict:
    d = {"claim_id": v.claim_id, "paper_ref": v.paper_ref, "params": v.params, "status": v.status}
    if v.witness is not None:
        d["witness"] = v.witness
    d["checkpoints"] = [{"x": c.x, "value": c.value, "main": c.main, "residual": c.residual} for c in v.checkpoints]
    d["fits"] = v.fits
    d["notes"] = v.notes
    return _clean(d)


def report_dict(report: AuditReport) -> dict:
    return {"schema_version": report.schema_version, "tool_version": report.tool_version,
            "config": _clean(report.config), "claims": [_verdict_dict(v) for v in report.claims]}


def _markdown(report: AuditReport) -> str:
    out = [f"# Claim audit", "", f"tool version {report.tool_version}, schema {report.schema_version}", ""]
    out += ["| claim | ref | status |", "|---|---|---|"]
    out += [f"| {v.claim_id} | {v.paper_ref} | {v.status.value} |" for v in report.claims]
    for v in report.claims:
        d = _verdict_dict(v)
        out += ["", f"## {v.claim_id}: {v.status.value}", "", f"Reference: {v.paper_ref}", "",
                f"Parameters: `{json.dumps(d['params'], ensure_ascii=False)}`", ""]
        if v.witness is not None:
            out += [f"Witness: `{json.dumps(d['witness'], ensure_ascii=False)}`", ""]
        out += [f"- {n}" for n in v.notes]
        if v.checkpoints:
            out += ["", "| x | value | main | residual |", "|---|---|---|---|"]
            out += [f"| {fmt(c.x)} | {fmt(c.value)} | {fmt(c.main)} | {fmt(c.residual)} |" for c in v.checkpoints]
        if v.fits:
            out += ["", "Fits:", ""]
            out += [f"- `{json.dumps(f, ensure_ascii=False)}`" for f in d["fits"]]
    return "\n".join(out) + "\n"


def _csv(report: AuditReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["claim_id", "x", "value", "main", "residual", "status"])
    for v in report.claims:
        for c in v.checkpoints:
            w.writerow([v.claim_id, fmt(c.x), fmt(c.value), fmt(c.main), fmt(c.residual), v.status.value])
    return buf.getvalue()


FORMATS = ("json", "csv", "markdown")


def render(report: AuditReport, format: str = "json") -> bytes:
    if format == "json":
        text = json.dumps(report_dict(report), indent=2, ensure_ascii=False, allow_nan=False) + "\n"
    elif format == "csv":
        text = _csv(report)
    elif format == "markdown":
        text = _markdown(report)
    else:
        raise UsageError(f"unknown format {format!r}; choose from {FORMATS}")
    return text.encode("utf-8")


def _num(v):
    return float(v) if isinstance(v, str) else v


def load_report(data: bytes | str) -> AuditReport:
    """Parse a JSON report produced by :func:`render`."""
    try:
        d = json.loads(data)
        claims = [ClaimVerdict(c["claim_id"], c["paper_ref"], c["params"], Status(c["status"]), c.get("witness"),
                               [Checkpoint(_num(k["x"]), _num(k["value"]), _num(k["main"]), _num(k["residual"]))
                                for k in c["checkpoints"]],
                               c["fits"], c["notes"])
                  for c in d["claims"]]
        return AuditReport(d["tool_version"], d["config"], claims, d["schema_version"])
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"malformed report: {e}") from e


# ---------------------------------------------------------------------------
# witnesses


def recheck_witness(verdict: ClaimVerdict) -> bool:
    """Re-evaluate a counterexample witness with one standalone call; True if the violation reproduces."""
    w = verdict.witness
    if verdict.status != Status.COUNTEREXAMPLE or w is None:
        raise UsageError(f"{verdict.claim_id} has no counterexample witness")
    cid = verdict.claim_id
    if cid == "C-05L":
        return evaluate(w["d"]).phi <= w["d"] / math.log(w["d"])
    if cid == "C-05U":
        return evaluate(w["d"]).phi >= w["d"]
    if cid == "C-06":
        return least_prime_in_ap(APClass(w["a"], w["q"]), w["cap_exponent"]) is None
    if cid == "C-13":
        z, dz = zeta_and_deriv(w["sigma"])
        tr = vonmangoldt_dirichlet_trace(build_prime_table(w["x"]), [w["x"]], w["sigma"])
        return tr.last.value > -dz / z
    if cid == "C-04":
        f = LinearForm(w["m"], w["k"])
        T = build_prime_table(f(w["x"]))
        a = pair_weighted_sum(T, w["x"], f)
        b = inversion_decomposition(T, w["x"], f).value
        return abs(a - b) > 1e-9 * max(abs(a), 1.0)
    if cid == "C-42":
        T = build_prime_table(w["x"])
        a = psi_ap(T, w["x"], w["q"], w["a"])
        b = psi_ap_via_characters(w["x"], w["q"], w["a"], T)
        return abs(a - b) > 1e-9 * psi_ap(T, w["x"], 1, 1)
    raise UsageError(f"no witness re-check for {cid}")
