"""psi(x; q, a) rebuilt from the twisted sums psi(x, chi) for every character mod q."""
import math
import sys

from primepairs.dirichlet import character_group, psi_ap_via_characters
from primepairs.sieve import build_prime_table
from primepairs.sums import psi_ap

q = int(sys.argv[1]) if len(sys.argv) > 1 else 12
x = 10**5
table = build_prime_table(x)
g = character_group(q)
print(f"q = {q}: {g.phi} characters, exponent {g.exponent}, generators {g.generators}")
for a in range(1, q):
    if math.gcd(a, q) == 1:
        direct = psi_ap(table, x, q, a)
        print(f"a = {a:3d}   direct {direct:14.6f}   via characters {psi_ap_via_characters(x, q, a, table):14.6f}")
