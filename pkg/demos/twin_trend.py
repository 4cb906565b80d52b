"""Weighted twin-prime sum against c log log x, with the singular-series constant for scale."""
import sys

from primepairs.asymptotic import fit, singular_series
from primepairs.sieve import build_prime_table
from primepairs.sums import LinearForm, pair_count_trace, pair_weighted_trace
from primepairs.trace import geometric_grid

top = int(float(sys.argv[1])) if len(sys.argv) > 1 else 10**8
form = LinearForm(1, 2)
table = build_prime_table(top + 2)
grid = geometric_grid(1e5, top, 10**0.25)

weighted = fit(pair_weighted_trace(table, grid, form), "loglog", (1e5, top))
counted = fit(pair_count_trace(table, grid, form), "x_log2", (1e5, top))
print(f"singular series     {singular_series(form):.6f}")
print(f"log log x fit       c = {weighted.c:.4f}, b = {weighted.b:.4f}")
print(f"x / log^2 x fit     c = {counted.c:.4f}, b = {counted.b:.1f}")
