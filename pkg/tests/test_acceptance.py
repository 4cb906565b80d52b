"""Acceptance criteria, one PASS/FAIL line each (see the summary section of the pytest run)."""
import math
import os
import time

import numpy as np
import pytest

import oracles
from primepairs.arith import vonmangoldt_via_divisors
from primepairs.asymptotic import fit, singular_series, zeta_and_deriv
from primepairs.audit import AuditConfig, Status, render, run_all
from primepairs.dirichlet import (as_integer, character_group, cyclotomic_sum, nonprincipal_character_sum,
                                  psi_ap_via_characters)
from primepairs.sieve import build_prime_table, prime_count, prime_powers
from primepairs.sums import (LinearForm, inversion_decomposition, inversion_profile, pair_count, pair_count_trace,
                             pair_weighted_sum, pair_weighted_trace, prime_power_pair_sum, prime_power_pair_trace,
                             psi_ap, twisted_mobius_sum)
from primepairs.trace import geometric_grid

pytestmark = pytest.mark.slow

TWIN = LinearForm(1, 2)
BIG = 10**9


@pytest.fixture(scope="module")
def big():
    t = time.perf_counter()
    table = build_prime_table(BIG + 1024, workers=4)
    return table, time.perf_counter() - t


@pytest.fixture(scope="module")
def audits():
    t = time.perf_counter()
    first = run_all(AuditConfig(workers=1))
    elapsed = time.perf_counter() - t
    second = run_all(AuditConfig(workers=1))
    wide = run_all(AuditConfig(workers=4))
    return first, elapsed, [render(r, "json") for r in (first, second, wide)]


def test_inversion_identity(record):
    t = time.perf_counter()
    table = build_prime_table(10 * 10**4 + 20)
    worst = 0.0
    for k in (2, 4, 6, 8, 10):
        f = LinearForm(1, k)
        primes, direct, inverted = inversion_profile(table, 10**4, f)
        # relative to max(|value|, 1): the sum is exactly 0 at x = 2 when 2 + k is not a prime power
        worst = max(worst, float(np.max(np.abs(direct - inverted) / np.maximum(np.abs(direct), 1.0))))
        # the literal entry point agrees with the profile at scattered x
        for x in (2, 97, 1000, 7919, 10**4):
            i = int(np.searchsorted(primes, x, side="right")) - 1
            lit = inversion_decomposition(table, x, f).value
            ref = pair_weighted_sum(table, x, f)
            worst = max(worst, abs(lit - ref) / max(abs(ref), 1.0), abs(lit - inverted[i]) / max(abs(ref), 1.0))
    elapsed = time.perf_counter() - t
    ok = record("inversion identity, every prime x <= 1e4, k in 2..10",
                worst <= 1e-9 and elapsed < 5, f"max rel dev {worst:.2e}, {elapsed:.2f} s (< 5 s)")
    assert ok


def test_divisor_identity(record):
    spf = oracles.spf_table(10**5)
    worst = max(abs(vonmangoldt_via_divisors(n) - oracles.lam_from_spf(spf, n)) for n in range(1, 10**5 + 1))
    ok = record("Lambda(n) = -sum mu(d) log d for n <= 1e5", worst <= 1e-10, f"max dev {worst:.2e}")
    assert ok


def test_sieve_oracles(record):
    flags = oracles.sieve(10**6 + 2)
    pi_oracle = sum(flags[: 10**6 + 1])
    twins_oracle = sum(1 for p in range(2, 10**6 + 1) if flags[p] and flags[p + 2])
    spot = all(oracles.is_prime(p) and oracles.is_prime(p + 2) for p in (3, 5, 11, 999959))
    table = build_prime_table(10**6 + 2)
    pi, twins = prime_count(table, 10**6), pair_count(table, 10**6, TWIN)
    ok = record("pi(1e6) = 78498 and twin count 8169 vs simple-sieve oracle",
                pi == pi_oracle == 78498 and twins == twins_oracle == 8169 and spot,
                f"pi {pi}/{pi_oracle}, pairs {twins}/{twins_oracle}")
    assert ok


def test_character_algebra(record):
    orth1 = orth2 = True
    for q in range(1, 201):
        g = character_group(q)
        E = g.value_exponents()[:, g.units]
        vals = [as_integer(v) for v in cyclotomic_sum(E, g.exponent)]
        orth1 &= vals[0] == g.phi and all(v == 0 for v in vals[1:])
        D = (E.T[:, None, :] - E.T[None, :, :]) % g.exponent
        S = cyclotomic_sum(D.reshape(-1, E.shape[0]), g.exponent)
        want = np.zeros_like(S)
        want[:, 0] = np.eye(len(g.units), dtype=np.int64).ravel() * g.phi
        orth2 &= bool(np.array_equal(S, want))
    nonprincipal = all(nonprincipal_character_sum(q, a) == character_group(q).phi * (a % q == 1 % q) - 1
                       for q in range(1, 201) for a in character_group(q).units)
    table = build_prime_table(10**5)
    psi_x = psi_ap(table, 10**5, 1, 1)
    worst = max(abs(psi_ap_via_characters(10**5, q, a, table) - psi_ap(table, 10**5, q, a)) / psi_x
                for q in range(1, 51) for a in range(1, q + 1) if math.gcd(a, q) == 1)
    ok = record("character orthogonality (q <= 200), decomposition (q <= 50), nonprincipal sums",
                orth1 and orth2 and nonprincipal and worst <= 1e-9,
                f"orth1 {orth1}, orth2 {orth2}, nonprincipal {nonprincipal}, decomposition dev {worst:.2e} psi(x)")
    assert ok


def test_mobius_constants(record):
    t = time.perf_counter()
    s1 = twisted_mobius_sum(10**7, 1.0).value
    s2 = twisted_mobius_sum(10**7, 2.0).value
    elapsed = time.perf_counter() - t
    z, dz = zeta_and_deriv(2.0)
    target = dz / z**2
    ok = record("sum mu(n) log n / n^s to 1e7: s=1 near -1, s=2 near zeta'/zeta^2",
                abs(s1 + 1) <= 0.1 and abs(s2 - target) <= 1e-3 and elapsed < 60,
                f"s=1 {s1:.6f}, s=2 {s2:.9f} vs {target:.9f}, {elapsed:.1f} s")
    assert ok


@pytest.mark.parametrize("sigma", [1.5, 2.0, 3.0])
def test_vonmangoldt_series_below_limit(record, sigma):
    table = build_prime_table(10**7)
    n, base = prime_powers(table, 10**7)
    running = np.cumsum(np.log(base.astype(np.float64)) / n.astype(np.float64) ** sigma)
    z, dz = zeta_and_deriv(sigma)
    limit = -dz / z
    # positive terms: the sup over x <= 1e7 is the last partial sum
    ok = record(f"sum Lambda(n)/n^{sigma} <= -zeta'/zeta for all x <= 1e7",
                bool(np.all(running <= limit)), f"max {running.max():.9f} vs {limit:.9f}")
    assert ok


def test_pair_trend(record, big):
    table, _ = big
    grid = geometric_grid(1e5, 1e8, 10**0.25)
    target = singular_series(TWIN)
    c14 = fit(pair_weighted_trace(table, grid, TWIN), "loglog", (1e5, 1e8)).c
    c18 = fit(pair_count_trace(table, grid, TWIN), "x_log2", (1e5, 1e8)).c
    rel14, rel18 = abs(c14 - target) / target, abs(c18 - target) / target
    ok = record("pair-sum trend constants within 25% of the singular series",
                rel14 <= 0.25 and rel18 <= 0.25,
                f"target {target:.6f}; loglog c {c14:.4f} ({rel14:.1%}); x/log^2 c {c18:.4f} ({rel18:.1%})")
    assert ok


def test_prime_power_pairs(record, big):
    table, _ = big
    a, b = prime_power_pair_sum(table, 10**7, TWIN), prime_power_pair_sum(table, BIG, TWIN)
    drift = abs(b - a) / b
    grid = geometric_grid(1e4, BIG, 10**0.5)
    tr = prime_power_pair_trace(table, grid, TWIN, "unweighted")
    xs, vals = tr.xs, tr.values
    c = float(np.dot(vals, np.sqrt(xs)) / xs.sum())
    env = np.maximum.accumulate(vals / np.sqrt(xs))
    start = env[int(np.searchsorted(xs, xs[-1] / 100))]
    env_drift = (env[-1] - start) / env[-1]
    ok = record("reciprocal prime-power pair sum settles; unweighted sum is O(x^1/2)",
                drift < 0.01 and env_drift < 0.5,
                f"1e7 {a:.6f} vs 1e9 {b:.6f} ({drift:.3%}); c {c:.4f}; envelope drift {env_drift:.1%}")
    assert ok


def test_audit_integrity(record, audits):
    report, _, blobs = audits
    v05 = report.verdict("C-05L")
    statuses = (v05.status == Status.COUNTEREXAMPLE and (v05.witness or {}).get("d") == 2
                and report.verdict("C-04").status == Status.EXACT_PASS
                and report.verdict("C-42").status == Status.EXACT_PASS)
    identical = blobs[0] == blobs[1] == blobs[2]
    ok = record("default audit: C-05L witness d=2, C-04/C-42 exact, byte-identical reruns",
                statuses and identical,
                f"C-05L {v05.status.value} d={(v05.witness or {}).get('d')}, C-04 {report.verdict('C-04').status.value}, "
                f"C-42 {report.verdict('C-42').status.value}, identical {identical}")
    assert ok


def test_performance(record, big, audits):
    _, sieve_s = big
    _, audit_s, _ = audits
    ok = record("sieve to 1e9 <= 60 s and default audit <= 300 s",
                sieve_s <= 60 and audit_s <= 300,
                f"sieve {sieve_s:.1f} s, audit {audit_s:.1f} s, {os.cpu_count()} core(s)")
    assert ok
