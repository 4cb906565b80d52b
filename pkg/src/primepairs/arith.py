"""Mobius, von Mangoldt and Euler totient: point values, bulk values, divisor identities."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .sieve import factor_windows, simple_primes

_SMALL = simple_primes(1 << 16).tolist()


@dataclass(frozen=True)
class ArithValue:
    n: int
    mu: int
    lambda_: float
    phi: int


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorisation of n >= 1 as ascending (p, e) pairs, by trial division."""
    n = int(n)
    if n < 1:
        raise UsageError(f"n must be >= 1, got {n}")
    out = []
    for p in _SMALL:
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    else:
        # n may still carry two factors above the table of small primes
        p = _SMALL[-1] + 2
        while p * p <= n:
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                out.append((p, e))
            p += 2
    if n > 1:
        out.append((n, 1))
    return out


def evaluate(n: int) -> ArithValue:
    """mu(n), Lambda(n) and phi(n) from a single factorisation."""
    f = factorize(n)
    mu = 0 if any(e > 1 for _, e in f) else (-1) ** len(f)
    lam = math.log(f[0][0]) if len(f) == 1 else 0.0
    phi = 1
    for p, e in f:
        phi *= (p - 1) * p ** (e - 1)
    return ArithValue(int(n), mu, lam, phi)


def divisors(n: int) -> list[tuple[int, tuple[int, ...]]]:
    """All divisors d of n with their exponent vectors, lexicographic in the exponents."""
    f = factorize(n)
    out = []
    for exps in itertools.product(*(range(e + 1) for _, e in f)):
        d = 1
        for (p, _), a in zip(f, exps):
            d *= p**a
        out.append((d, exps))
    return out


def vonmangoldt_via_divisors(n: int) -> float:
    """``-sum_{d | n} mu(d) log d``, evaluated term by term over every divisor."""
    terms = []
    for d, exps in divisors(n):
        mu = 0 if any(a > 1 for a in exps) else (-1) ** sum(exps)
        terms.append(-mu * math.log(d))
    return math.fsum(terms)


def bulk(lo: int, hi: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Arrays (mu, Lambda, phi) for every n in [lo, hi), lo >= 1."""
    lo, hi = int(lo), int(hi)
    if lo < 1 or hi <= lo:
        raise UsageError(f"need 1 <= lo < hi, got [{lo}, {hi})")
    mus, lams, phis = [], [], []
    if lo == 1:
        mus.append(np.ones(1, dtype=np.int8))
        lams.append(np.zeros(1))
        phis.append(np.ones(1, dtype=np.int64))
    for seg in factor_windows(max(lo, 2), hi):
        mus.append(seg.mu)
        lams.append(seg.von_mangoldt())
        phis.append(seg.phi)
    return np.concatenate(mus), np.concatenate(lams), np.concatenate(phis)


@dataclass(frozen=True)
class DivisorIdentityReport:
    n_max: int
    log_max_deviation: float
    mobius_ok: bool
    totient_ok: bool

    @property
    def ok(self) -> bool:
        return self.mobius_ok and self.totient_ok


def divisor_identity_suite(n_max: int) -> DivisorIdentityReport:
    """Check the three divisor-sum identities for every n <= n_max.

    sum_{d|n} Lambda(d) = log n, sum_{d|n} mu(d) = [n = 1] and
    sum_{d|n} phi(d) = n, each accumulated over multiples of d.
    """
    n_max = int(n_max)
    if n_max < 1:
        raise UsageError(f"n_max must be >= 1, got {n_max}")
    mu, lam, phi = bulk(1, n_max + 1)
    lam_acc = np.zeros(n_max + 1)
    mu_acc = np.zeros(n_max + 1, dtype=np.int64)
    phi_acc = np.zeros(n_max + 1, dtype=np.int64)
    for d in range(1, n_max + 1):
        mu_acc[d::d] += mu[d - 1]
        phi_acc[d::d] += phi[d - 1]
        if lam[d - 1]:
            lam_acc[d::d] += lam[d - 1]
    n = np.arange(1, n_max + 1)
    dev = float(np.max(np.abs(lam_acc[1:] - np.log(n))))
    expected_mu = (n == 1).astype(np.int64)
    return DivisorIdentityReport(
        n_max,
        dev,
        bool(np.array_equal(mu_acc[1:], expected_mu)),
        bool(np.array_equal(phi_acc[1:], n)),
    )
