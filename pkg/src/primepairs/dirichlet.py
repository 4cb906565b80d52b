"""
Dirichlet characters mod q with exact values.

A character value is a root of unity ``e(t) = exp(2*pi*i*t)`` and is carried
as the integer numerator of ``t`` over the group exponent ``N``.  Sums of
character values are reduced exactly in ``Z[zeta_N]`` (integer coefficient
vectors modulo the cyclotomic polynomial) and only turned into complex
floats when a weighted aggregate is requested.

The unit group is split by the Chinese remainder theorem: an odd prime power
contributes one cyclic factor generated by its least primitive root, ``2^e``
contributes ``{-1, 5}`` (``e >= 3``) or ``{-1}`` (``e = 2``).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterator

import numpy as np

from .arith import factorize
from .errors import RangeError, UsageError
from .sieve import PrimeTable, build_prime_table, prime_powers

MAX_MODULUS = 10**6


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def _least_primitive_root(p: int, e: int) -> int:
    pe = p**e
    order = (p - 1) * p ** (e - 1)
    factors = [r for r, _ in factorize(order)]
    g = 2
    while True:
        if g % p and all(pow(g, order // r, pe) != 1 for r in factors):
            return g
        g += 1


def _crt_lift(residue: int, pe: int, q: int) -> int:
    """The element = residue (mod pe) and = 1 (mod q / pe)."""
    rest = q // pe
    if rest == 1:
        return residue % q
    # x = residue + pe * t, x = 1 mod rest
    t = ((1 - residue) * pow(pe, -1, rest)) % rest
    return (residue + pe * t) % q


@dataclass(frozen=True, eq=False)
class CharacterGroup:
    """The dual of (Z/qZ)^*.

    ``generators`` lists ``(g, order)`` with ``g`` lifted to Z/qZ;
    ``exponent_table[n]`` is the discrete-log vector of ``n`` (``-1`` rows
    for non-units).
    """

    q: int
    generators: list[tuple[int, int]]
    exponent_table: np.ndarray = field(repr=False)

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(o for _, o in self.generators)

    @property
    def exponent(self) -> int:
        """Group exponent N; every character value is an N-th root of unity."""
        return _lcm(self.orders)

    @property
    def phi(self) -> int:
        return math.prod(self.orders)

    @property
    def units(self) -> np.ndarray:
        return np.flatnonzero(self.is_unit_mask())

    def is_unit_mask(self) -> np.ndarray:
        return np.gcd(np.arange(self.q), self.q) == 1

    def __len__(self) -> int:
        return self.phi

    def __iter__(self) -> Iterator["Character"]:
        for idx in itertools.product(*(range(o) for o in self.orders)):
            yield Character(self, idx)

    def principal(self) -> "Character":
        return Character(self, (0,) * len(self.generators))

    def index_matrix(self) -> np.ndarray:
        """Index vectors of every character, one row each, in iteration order."""
        rows = list(itertools.product(*(range(o) for o in self.orders)))
        return np.array(rows, dtype=np.int64).reshape(len(rows), len(self.generators))

    def value_exponents(self) -> np.ndarray:
        """Matrix E[c, n] of exponent numerators (mod N) of character c at n mod q.

        Non-units get ``-1``.  The array is shared; do not modify it.
        """
        return self._value_exponents

    @cached_property
    def _value_exponents(self) -> np.ndarray:
        N = self.exponent
        unit = self.is_unit_mask()
        if not self.generators:
            out = np.zeros((1, self.q), dtype=np.int64)
            out[:, ~unit] = -1
            return out
        scale = np.array([N // o for o in self.orders], dtype=np.int64)
        logs = np.where(self.exponent_table >= 0, self.exponent_table, 0) * scale
        out = (self.index_matrix() @ logs.T) % N
        out[:, ~unit] = -1
        return out


@lru_cache(maxsize=256)
def character_group(q: int) -> CharacterGroup:
    q = int(q)
    if q < 1:
        raise UsageError(f"modulus must be >= 1, got {q}")
    if q > MAX_MODULUS:
        raise UsageError(f"modulus {q} exceeds {MAX_MODULUS}")
    n = np.arange(q, dtype=np.int64)
    generators: list[tuple[int, int]] = []
    columns: list[np.ndarray] = []
    for p, e in factorize(q) if q > 1 else []:
        pe = p**e
        r = n % pe
        if p == 2:
            if e == 1:
                continue
            sign = np.full(pe, -1, dtype=np.int64)
            five = np.full(pe, -1, dtype=np.int64)
            val = 1
            for j in range(pe // 4):
                sign[val], five[val] = 0, j
                sign[pe - val], five[pe - val] = 1, j
                val = val * 5 % pe
            generators.append((_crt_lift(pe - 1, pe, q), 2))
            columns.append(sign[r])
            if e >= 3:
                generators.append((_crt_lift(5, pe, q), pe // 4))
                columns.append(five[r])
        else:
            g = _least_primitive_root(p, e)
            order = pe - pe // p
            dlog = np.full(pe, -1, dtype=np.int64)
            val = 1
            for j in range(order):
                dlog[val] = j
                val = val * g % pe
            generators.append((_crt_lift(g, pe, q), order))
            columns.append(dlog[r])
    if columns:
        table = np.stack(columns, axis=1)
        # a factor 2^1 has no column, so units are decided by gcd, not by the columns
        table[np.gcd(n, q) != 1] = -1
    else:
        table = np.zeros((q, 0), dtype=np.int64)
    return CharacterGroup(q, generators, table)


@dataclass(frozen=True, eq=False)
class Character:
    group: CharacterGroup
    index: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(u) % o for u, o in zip(self.index, self.group.orders))
        if len(idx) != len(self.group.orders):
            raise UsageError(f"index needs {len(self.group.orders)} entries")
        object.__setattr__(self, "index", idx)

    def __eq__(self, other):
        return isinstance(other, Character) and self.group.q == other.group.q and self.index == other.index

    def __hash__(self):
        return hash((self.group.q, self.index))

    @property
    def is_principal(self) -> bool:
        return not any(self.index)

    def conjugate(self) -> "Character":
        return Character(self.group, tuple(-u for u in self.index))

    def exponent(self, n: int) -> int | None:
        """Numerator k (over the group exponent) of chi(n) = e(k/N), or None when chi(n) = 0."""
        g = self.group
        row = g.exponent_table[int(n) % g.q]
        if g.generators and row[0] < 0:
            return None
        if not g.generators and math.gcd(int(n), g.q) != 1:
            return None
        N = g.exponent
        return int(sum(u * int(e) * (N // o) for u, e, o in zip(self.index, row, g.orders)) % N)

    def __call__(self, n: int) -> complex:
        k = self.exponent(n)
        if k is None:
            return 0j
        return _root(k, self.group.exponent)


def _root(k: int, N: int) -> complex:
    # exact values on the axes keep small cases free of rounding noise
    k %= N
    if 4 * k % N == 0:
        return (1 + 0j, 1j, -1 + 0j, -1j)[4 * k // N]
    t = 2 * math.pi * k / N
    return complex(math.cos(t), math.sin(t))


def evaluate_character(chi: Character, n: int) -> Fraction | None:
    """chi(n) as the fraction t in [0, 1) with chi(n) = exp(2*pi*i*t); None when chi(n) = 0."""
    if int(n) < 1:
        raise UsageError(f"n must be >= 1, got {n}")
    k = chi.exponent(n)
    return None if k is None else Fraction(k, chi.group.exponent)


# ---------------------------------------------------------------------------
# exact arithmetic in Z[zeta_N]


@lru_cache(maxsize=None)
def cyclotomic_polynomial(N: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_N, lowest degree first."""
    num = [-1] + [0] * (N - 1) + [1]  # X^N - 1
    for d in range(1, N):
        if N % d == 0:
            num = _divide_exact(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


def _divide_exact(num: list[int], den: list[int]) -> list[int]:
    num = num[:]
    out = [0] * (len(num) - len(den) + 1)
    lead = den[-1]
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1] // lead
        out[i] = c
        for j, dc in enumerate(den):
            num[i + j] -= c * dc
    if any(num):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def _reduction_matrix(N: int) -> np.ndarray:
    """Row k holds X^k mod Phi_N in the power basis."""
    phi = list(cyclotomic_polynomial(N))
    deg = len(phi) - 1
    rows = np.zeros((N, deg), dtype=np.int64)
    cur = [0] * deg
    cur[0] = 1
    for k in range(N):
        rows[k] = cur
        # multiply by X and reduce by the monic Phi_N
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * pc for c, pc in zip(cur, phi[:-1])]
    return rows


def cyclotomic_sum(exponents: np.ndarray, N: int) -> np.ndarray:
    """Exact value of sum_j e(exponents[j] / N) as an integer vector in Z[zeta_N].

    ``exponents`` may be 2-D; rows are summed independently.  Entries equal
    to ``-1`` stand for zero terms and are skipped.  The zero vector means
    the sum is exactly 0; ``[c, 0, ..., 0]`` means it equals the integer c.
    """
    e = np.atleast_2d(np.asarray(exponents, dtype=np.int64))
    rows = e.shape[0]
    shifted = np.where(e < 0, N, e % N)
    flat = (np.arange(rows, dtype=np.int64)[:, None] * (N + 1) + shifted).ravel()
    counts = np.bincount(flat, minlength=rows * (N + 1)).reshape(rows, N + 1)
    out = counts[:, :N] @ _reduction_matrix(N)
    return out[0] if np.ndim(exponents) == 1 else out


def as_integer(vec: np.ndarray) -> int | None:
    """The rational integer an exact cyclotomic vector represents, or None."""
    vec = np.asarray(vec)
    if vec.size and np.any(vec[1:]):
        return None
    return int(vec[0]) if vec.size else 0


# ---------------------------------------------------------------------------
# twisted sums


@dataclass(frozen=True)
class TwistedPsi:
    x: int
    chi: Character
    value: complex


def _class_weights(table: PrimeTable, x: int, q: int) -> np.ndarray:
    """W[r] = sum of Lambda(n) over prime powers n <= x with n = r (mod q)."""
    n, base = prime_powers(table, x)
    return np.bincount(n % q, weights=np.log(base.astype(np.float64)), minlength=q)


def _aggregate(exps: np.ndarray, weights: np.ndarray, N: int) -> complex:
    """sum_r weights[r] e(exps[r] / N), grouping by exponent class first."""
    ok = exps >= 0
    w = np.bincount(exps[ok], weights=weights[ok], minlength=N)
    roots = _roots(N)
    return complex(math.fsum(w * roots.real), math.fsum(w * roots.imag))


@lru_cache(maxsize=None)
def _roots(N: int) -> np.ndarray:
    return np.array([_root(k, N) for k in range(N)])


def psi_twisted(table: PrimeTable, x: int, chi: Character) -> TwistedPsi:
    """psi(x, chi) = sum over prime powers n <= x of chi(n) Lambda(n)."""
    x = int(x)
    if x > table.limit:
        raise RangeError(f"x={x} exceeds table limit {table.limit}")
    g = chi.group
    if x < 2:
        return TwistedPsi(x, chi, 0j)
    n, base = prime_powers(table, x)
    row = g.value_exponents()[_row_of(chi)]
    exps = row[n % g.q]
    value = _aggregate(exps, np.log(base.astype(np.float64)), g.exponent)
    return TwistedPsi(x, chi, value)


def _row_of(chi: Character) -> int:
    idx = 0
    for u, o in zip(chi.index, chi.group.orders):
        idx = idx * o + u
    return idx


def psi_all_characters(table: PrimeTable, x: int, q: int) -> tuple[CharacterGroup, np.ndarray]:
    """psi(x, chi) for every chi mod q, in the group's iteration order."""
    g = character_group(q)
    x = int(x)
    if x > table.limit:
        raise RangeError(f"x={x} exceeds table limit {table.limit}")
    if x < 2:
        return g, np.zeros(g.phi, dtype=complex)
    W = _class_weights(table, x, q)
    E = g.value_exponents()
    return g, np.array([_aggregate(row, W, g.exponent) for row in E])


def psi_ap_via_characters(x: int, q: int, a: int, table: PrimeTable | None = None) -> float:
    """psi(x, q, a) rebuilt as (1/phi(q)) * sum_chi conj(chi(a)) psi(x, chi)."""
    q, a, x = int(q), int(a), int(x)
    if math.gcd(a, q) != 1:
        raise UsageError(f"gcd({a}, {q}) != 1")
    if table is None:
        table = build_prime_table(max(x, 2))
    g, psis = psi_all_characters(table, x, q)
    N = g.exponent
    col = g.value_exponents()[:, a % q]
    conj = _roots(N)[(-col) % N]
    total = complex(math.fsum((conj * psis).real), math.fsum((conj * psis).imag)) / g.phi
    scale = max(1.0, float(np.abs(psis).max(initial=0.0)))
    if abs(total.imag) > 1e-9 * scale:
        raise ArithmeticError(f"imaginary residue {total.imag} in character decomposition")
    return total.real


def nonprincipal_character_sum(q: int, a: int) -> complex:
    """sum over chi != chi_0 mod q of conj(chi(a)), summed exactly."""
    q, a = int(q), int(a)
    if math.gcd(a, q) != 1:
        raise UsageError(f"gcd({a}, {q}) != 1")
    g = character_group(q)
    col = g.value_exponents()[1:, a % q]  # row 0 is the principal character
    conj = (-col) % g.exponent
    exact = cyclotomic_sum(conj, g.exponent)
    n = as_integer(exact)
    if n is not None:
        return complex(n, 0)
    return complex((exact * _roots(g.exponent)[: exact.size]).sum())
