"""Reference analytic quantities and trend analysis of checkpointed sums."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, NamedTuple

import numpy as np
from scipy.special import expi

from .errors import ParityWarning, UsageError
from .sieve import PrimeTable, simple_primes
from .trace import SumTrace


def log_integral(x: float) -> float:
    """li(x) = Ei(log x) for x >= 2 (scipy's exponential integral)."""
    x = float(x)
    if not x >= 2:
        raise UsageError(f"li(x) is only supported for x >= 2, got {x}")
    return float(expi(math.log(x)))


@lru_cache(maxsize=None)
def _bernoulli(n: int) -> Fraction:
    # B_1 = -1/2 convention; only even indices are used
    b = [Fraction(1)]
    for m in range(1, n + 1):
        b.append(-sum(math.comb(m + 1, j) * b[j] for j in range(m)) / (m + 1))
    return b[n]


_EM_N = 20      # terms summed directly
_EM_TERMS = 12  # Bernoulli correction terms


def zeta_and_deriv(s: float) -> tuple[float, float]:
    """zeta(s) and zeta'(s) for real s > 1 by Euler-Maclaurin summation.

    With 20 direct terms and 12 Bernoulli corrections the truncation error is
    below 1e-15 relative for 1 < s <= 30.
    """
    s = float(s)
    if not s > 1:
        raise UsageError(f"zeta_and_deriv needs s > 1, got {s}")
    N = _EM_N
    n = np.arange(1, N, dtype=np.float64)
    logs = np.log(n)
    powers = n**-s
    z = [math.fsum(powers)]
    dz = [-math.fsum(logs * powers)]
    logN = math.log(N)
    z.append(N ** (1 - s) / (s - 1))
    dz.append(N ** (1 - s) * (-logN / (s - 1) - 1 / (s - 1) ** 2))
    z.append(N**-s / 2)
    dz.append(-logN * N**-s / 2)
    rising = 1.0       # s (s+1) ... (s + 2j - 2)
    rising_log = 0.0   # sum of 1 / (s + i) over the same factors
    for j in range(1, _EM_TERMS + 1):
        if j == 1:
            rising, rising_log = s, 1 / s
        else:
            for i in (2 * j - 3, 2 * j - 2):
                rising *= s + i
                rising_log += 1 / (s + i)
        coef = float(_bernoulli(2 * j)) / math.factorial(2 * j)
        term = coef * rising * N ** (-s - 2 * j + 1)
        z.append(term)
        dz.append(term * (rising_log - logN))
    return math.fsum(z), math.fsum(dz)


# ---------------------------------------------------------------------------
# Hardy-Littlewood singular series


def singular_series(form, cutoff: int = 10**7) -> float:
    """Euler product over p <= cutoff of (1 - nu(p)/p) / (1 - 1/p)^2.

    nu(p) counts the roots of n (m n + k) mod p.  The omitted factors all
    lie in [1 - 1/(p-1)^2, 1], so the truncated value overshoots the full
    product by at most a factor 1 / (1 - 1/(cutoff - 1)); see
    :func:`singular_series_tail_bound`.  Forms with ``m + k`` even return 0.
    """
    cutoff = int(cutoff)
    if cutoff < 1000:
        raise UsageError(f"cutoff must be >= 1000, got {cutoff}")
    m, k = form.m, form.k
    if (m + k) % 2 == 0:
        warnings.warn(f"form ({m},{k}) has m + k even: no prime pairs beyond p = 2", ParityWarning, stacklevel=2)
        return 0.0
    # m + k odd makes 2 divide m*k, so p = 2 always takes the nu = 1 branch
    ps = simple_primes(cutoff)[1:]
    logs = np.concatenate(([math.log(2.0)], np.log1p(-1.0 / (ps - 1.0) ** 2)))
    ps = np.concatenate(([2], ps))
    divides = (abs(m * k) % ps) == 0
    logs[divides] = -np.log1p(-1.0 / ps[divides])  # nu = 1: factor p / (p - 1)
    return math.exp(math.fsum(logs))


def singular_series_tail_bound(cutoff: int) -> float:
    """Relative bound on the omitted factors: sum over n > cutoff of 1/(n-1)^2 <= 1/(cutoff-1)."""
    return 1.0 / (int(cutoff) - 1)


# ---------------------------------------------------------------------------
# fits


MODELS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "loglog": lambda x: np.log(np.log(x)),
    "x_log2": lambda x: x / np.log(x) ** 2,
    "li": lambda x: np.array([log_integral(v) for v in x]),
}


@dataclass(frozen=True)
class FitResult:
    """Least-squares fit value ~ c * f(x) + b over a window of checkpoints."""

    model: str
    c: float
    b: float
    rms_residual: float
    window: tuple[float, float]
    n_points: int = 0

    def predict(self, x) -> np.ndarray:
        return self.c * MODELS[self.model](np.asarray(x, dtype=np.float64)) + self.b

    def to_dict(self) -> dict:
        return {"model": self.model, "c": self.c, "b": self.b, "rms_residual": self.rms_residual,
                "window": list(self.window), "n_points": self.n_points}


def fit(trace: SumTrace, model: str, window: tuple[float, float] = (1e3, math.inf)) -> FitResult:
    """Fit ``value = c * f(x) + b`` where f is the named model's shape."""
    if model not in MODELS:
        raise UsageError(f"unknown model {model!r}; choose from {sorted(MODELS)}")
    xs, ys = trace.xs, trace.values
    sel = (xs >= window[0]) & (xs <= window[1])
    xs, ys = xs[sel], ys[sel]
    if xs.size < 4:
        raise UsageError(f"fit needs >= 4 checkpoints in window {window}, got {xs.size}")
    f = MODELS[model](xs)
    if np.ptp(f) == 0:
        raise UsageError("degenerate fit window")
    A = np.column_stack([f, np.ones_like(f)])
    (c, b), *_ = np.linalg.lstsq(A, ys, rcond=None)
    rms = float(np.sqrt(np.mean((A @ np.array([c, b]) - ys) ** 2)))
    return FitResult(model, float(c), float(b), rms, (float(xs[0]), float(xs[-1])), int(xs.size))


def sign_changes(trace: SumTrace) -> list[tuple[float, float]]:
    """Consecutive checkpoint pairs whose values have strictly opposite signs."""
    out = []
    cps = trace.checkpoints
    for a, b in zip(cps, cps[1:]):
        if a.value * b.value < 0:
            out.append((a.x, b.x))
    return out


# ---------------------------------------------------------------------------
# normalized errors for psi(x, q, a)


class MontgomeryRow(NamedTuple):
    x: int
    q: int
    a: int
    psi: float
    main: float
    normalized: float


@dataclass
class NormalizedErrorTrace:
    rows: list[MontgomeryRow]
    meta: dict = field(default_factory=dict)

    def summary(self) -> dict[int, float]:
        """max |normalized error| per modulus."""
        out: dict[int, float] = {}
        for r in self.rows:
            out[r.q] = max(out.get(r.q, 0.0), abs(r.normalized))
        return out


def _residues(q: int, a_rule) -> list[int]:
    reduced = [a for a in range(1, q + 1) if math.gcd(a, q) == 1]
    if a_rule == "all":
        return reduced
    if a_rule == "one":
        return [1]
    if callable(a_rule):
        chosen = [int(a) for a in a_rule(q)]
        bad = [a for a in chosen if math.gcd(a, q) != 1]
        if bad:
            raise UsageError(f"residues {bad} are not reduced mod {q}")
        return chosen
    raise UsageError(f"a_rule must be 'all', 'one' or a callable, got {a_rule!r}")


def montgomery_track(table: PrimeTable, grid: Iterable[int], q_range: Iterable[int],
                     a_rule="all") -> NormalizedErrorTrace:
    """(psi(x, q, a) - x/phi(q)) * sqrt(q / x) at every grid point, modulus and residue."""
    from .arith import evaluate
    from .sums import psi_class_table

    grid = sorted(int(x) for x in grid)
    rows: list[MontgomeryRow] = []
    qs = [int(q) for q in q_range]
    if any(q < 1 for q in qs):
        raise UsageError("moduli must be >= 1")
    for q in qs:
        phi = evaluate(q).phi
        S = psi_class_table(table, grid, q)
        for a in _residues(q, a_rule):
            for i, x in enumerate(grid):
                psi = float(S[i, a % q])
                main = x / phi
                rows.append(MontgomeryRow(x, q, a, psi, main, (psi - main) * math.sqrt(q / x)))
    return NormalizedErrorTrace(rows, {"grid": grid, "q": qs, "a_rule": a_rule if isinstance(a_rule, str) else "custom"})
