"""Prime sieves, arithmetic functions, character sums and a claim auditor for prime-pair sums."""
__version__ = "0.1.0"

from .errors import ParityWarning, RangeError, UsageError
from .sieve import APClass, PrimeTable, build_prime_table, least_prime_in_ap, prime_count, primes_in_ap
from .arith import evaluate, factorize, vonmangoldt_via_divisors
from .dirichlet import Character, character_group, psi_ap_via_characters, psi_twisted
from .trace import Checkpoint, SumTrace, geometric_grid
from .sums import (LinearForm, chebyshev_tail, hl_partial_sum, inversion_decomposition, lambda_pair_sum,
                   mertens_ap, pair_count, pair_weighted_sum, pi_ap, prime_power_pair_sum, psi_ap,
                   twisted_mobius_sum)
from .asymptotic import fit, log_integral, montgomery_track, sign_changes, singular_series, zeta_and_deriv
from .audit import AuditConfig, AuditReport, ClaimVerdict, Status, render, run_all, run_claim

__all__ = [n for n in dir() if not n.startswith("_")]
