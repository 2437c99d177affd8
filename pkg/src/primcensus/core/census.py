"""
Prime census engine for the progression a mod q.

The range is cut into fixed-length segments (census_config.segment_size)
that do not depend on the worker count. Each segment is sieved, filtered to
the class, and every prime p has p-1 factored from a shared smallest-factor
table. Segment tallies are combined in segment order: counts add, floating
sums are reduced with math.fsum over the per-segment values, so output is
identical for any number of workers.

Intervals are half-open, (x, 2x], so dyadic blocks partition exactly.
Primes dividing u are skipped for the indicator and reported separately.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from ..exceptions import DomainError
from ..utils.config_loader import config_value
from ..utils.parallel import map_ordered
from .models import (
    BrunTitchmarshCheck,
    CensusResult,
    ErrorTermBoundCheck,
    IntervalDecomposition,
    ResidueClass,
)
from .ntheory import euler_phi, factorize, primes_between, smallest_factor_sieve

logger = logging.getLogger(__name__)


@dataclass
class SegmentTally:
    """Per-segment partial results; floats are already fsum-reduced within the segment."""
    pi: int = 0
    pi_u: int = 0
    skipped: int = 0
    ratio_sum: float = 0.0
    over_p_sum: float = 0.0
    main_sum: float = 0.0
    error_sum: float = 0.0
    main_exact: Optional[Fraction] = None
    error_exact: Optional[Fraction] = None


@dataclass
class CensusTotals:
    pi: int = 0
    pi_u: int = 0
    skipped: int = 0
    ratio_parts: List[float] = field(default_factory=list)
    over_p_parts: List[float] = field(default_factory=list)
    main_parts: List[float] = field(default_factory=list)
    error_parts: List[float] = field(default_factory=list)
    main_exact: Fraction = Fraction(0)
    error_exact: Fraction = Fraction(0)

    def add(self, tally: SegmentTally) -> None:
        self.pi += tally.pi
        self.pi_u += tally.pi_u
        self.skipped += tally.skipped
        self.ratio_parts.append(tally.ratio_sum)
        self.over_p_parts.append(tally.over_p_sum)
        self.main_parts.append(tally.main_sum)
        self.error_parts.append(tally.error_sum)
        if tally.main_exact is not None:
            self.main_exact += tally.main_exact
            self.error_exact += tally.error_exact


def _segment_bounds(lo: int, hi: int) -> List[Tuple[int, int]]:
    """Consecutive half-open blocks (a, b] covering (lo, hi]."""
    size = int(config_value('census_config', 'segment_size', 131072))
    bounds = []
    start = lo
    while start < hi:
        end = min(start + size, hi)
        bounds.append((start, end))
        start = end
    return bounds


def _tally_segment(
    lo: int,
    hi: int,
    q: int,
    a: int,
    u: Optional[int],
    table_limit: int,
    exact: bool,
) -> SegmentTally:
    """Census of primes p in (lo, hi] with p = a mod q.

    With ``u`` None only the class count and totient sums are taken.
    """
    primes = primes_between(lo, hi)
    primes = primes[primes % q == a]
    tally = SegmentTally(pi=int(len(primes)))
    if exact:
        tally.main_exact = Fraction(0)
        tally.error_exact = Fraction(0)
    if tally.pi == 0:
        return tally

    table = smallest_factor_sieve(table_limit)
    ratio_terms, over_p_terms, main_terms, error_terms = [], [], [], []
    for value in primes:
        p = int(value)
        pairs = table.factor_pairs(p - 1)
        phi = 1
        for r, e in pairs:
            phi *= (r - 1) * r ** (e - 1)
        ratio_terms.append(phi / (p - 1))
        over_p_terms.append(phi / p)
        if u is None:
            continue

        base = u % p
        if base == 0:
            tally.skipped += 1
            continue
        is_root = all(pow(base, (p - 1) // r, p) != 1 for r, _ in pairs)
        tally.pi_u += is_root
        main_terms.append(phi / p)
        # sum over coprime n of (p [tau^n = u] - 1) / p
        error_terms.append((p * is_root - phi) / p)
        if exact:
            tally.main_exact += Fraction(phi, p)
            tally.error_exact += Fraction(p * is_root - phi, p)

    tally.ratio_sum = math.fsum(ratio_terms)
    tally.over_p_sum = math.fsum(over_p_terms)
    tally.main_sum = math.fsum(main_terms)
    tally.error_sum = math.fsum(error_terms)
    return tally


def _run_census(
    lo: int,
    hi: int,
    cls: ResidueClass,
    u: Optional[int],
    exact: bool = False,
    workers: int = 1,
) -> CensusTotals:
    bounds = _segment_bounds(lo, hi)
    tasks = [(a, b, cls.q, cls.a, u, hi, exact) for a, b in bounds]
    logger.debug(f"Census over ({lo}, {hi}] in {len(tasks)} segments, workers={workers}")
    totals = CensusTotals()
    for tally in map_ordered(_tally_segment, tasks, workers):
        totals.add(tally)
    return totals


def _require_limit(x: int, minimum: int = 2) -> None:
    if x < minimum:
        raise DomainError(f'x must be >= {minimum}, got {x}')


def _require_base(u: int) -> None:
    if u == 0:
        raise DomainError('u must be nonzero')


def _warn_degenerate_base(u: int) -> None:
    if u in (1, -1):
        logger.warning(f"u={u} is a primitive root only for p <= 3; pi_u will be tiny")
    elif u > 0 and math.isqrt(u) ** 2 == u:
        logger.warning(f"u={u} is a perfect square and never a primitive root mod an odd prime")


# ==============================================================================
# Public API
# ==============================================================================

def count_primes_ap(x: int, cls: ResidueClass) -> int:
    """#{p <= x : p = a mod q}."""
    _require_limit(x)
    total = 0
    for lo, hi in _segment_bounds(1, x):
        primes = primes_between(lo, hi)
        total += int(np.count_nonzero(primes % cls.q == cls.a))
    return total


def count_pr_primes(x: int, cls: ResidueClass, u: int, workers: int = 1) -> CensusResult:
    """
    Count primes p <= x in the class and those with u as a primitive root.

    Both totient sums are taken over every prime in the class; primes
    dividing u are left out of pi_u and counted in ``skipped``.

    Args:
        x: Upper limit, inclusive; at least 2.
        cls: Residue class a mod q.
        u: Nonzero base; squares and -1 log a warning and count nothing.
        workers: Processes for the segment fan-out. Results do not depend on it.

    Returns:
        CensusResult with pi, pi_u, skipped and both totient sums.

    Raises:
        DomainError: x < 2 or u == 0.
    """
    _require_limit(x)
    _require_base(u)
    _warn_degenerate_base(u)

    logger.info(f"Census x={x} class {cls.a} mod {cls.q} u={u}")
    totals = _run_census(1, x, cls, u, workers=workers)
    result = CensusResult(
        x=x,
        cls=cls,
        u=u,
        pi=totals.pi,
        pi_u=totals.pi_u,
        sum_phi_ratio=math.fsum(totals.ratio_parts),
        sum_phi_over_p=math.fsum(totals.over_p_parts),
        skipped=totals.skipped,
    )
    logger.info(f"Census done: pi={result.pi} pi_u={result.pi_u} skipped={result.skipped}")
    return result


def totient_ratio_sum(x: int, cls: ResidueClass, workers: int = 1) -> float:
    """sum over p <= x, p = a mod q, of phi(p-1)/(p-1)."""
    _require_limit(x)
    return math.fsum(_run_census(1, x, cls, None, workers=workers).ratio_parts)


def totient_over_p_sum(x: int, cls: ResidueClass, workers: int = 1) -> float:
    """sum over p <= x, p = a mod q, of phi(p-1)/p."""
    _require_limit(x)
    return math.fsum(_run_census(1, x, cls, None, workers=workers).over_p_parts)


def interval_decomposition(
    x: int,
    cls: ResidueClass,
    u: int,
    exact: bool = False,
    workers: int = 1,
) -> IntervalDecomposition:
    """
    Split the indicator sum over p in (x, 2x] into M(x) + E(x).

    M(x) = sum phi(p-1)/p and E(x) = sum (p [u primitive] - phi(p-1))/p over
    the same primes, both summed term by term.

    Args:
        x: Lower end of the block, exclusive; at least 2.
        cls: Residue class a mod q.
        u: Nonzero base.
        exact: Also accumulate both terms as Fractions.
        workers: Processes for the segment fan-out.

    Returns:
        IntervalDecomposition whose ``residual`` is psi_sum - M - E.

    Raises:
        DomainError: x < 2 or u == 0.
    """
    _require_limit(x)
    _require_base(u)
    totals = _run_census(x, 2 * x, cls, u, exact=exact, workers=workers)
    return IntervalDecomposition(
        x=x,
        cls=cls,
        u=u,
        prime_count=totals.pi - totals.skipped,
        psi_sum=totals.pi_u,
        main_term=math.fsum(totals.main_parts),
        error_term=math.fsum(totals.error_parts),
        main_term_exact=totals.main_exact if exact else None,
        error_term_exact=totals.error_exact if exact else None,
    )


def dyadic_census(
    x0: int,
    blocks: int,
    cls: ResidueClass,
    u: int,
    workers: int = 1,
) -> List[IntervalDecomposition]:
    """Decompositions over (x0 2^i, x0 2^(i+1)] for i < blocks."""
    if blocks < 1:
        raise DomainError(f'blocks must be >= 1, got {blocks}')
    return [
        interval_decomposition(x0 * 2 ** i, cls, u, workers=workers)
        for i in range(blocks)
    ]


def brun_titchmarsh_check(x: int, cls: ResidueClass) -> BrunTitchmarshCheck:
    """pi(2x; q, a) - pi(x; q, a) against 3x / (phi(q) ln x)."""
    _require_limit(x, 3)
    lhs = count_primes_ap(2 * x, cls) - count_primes_ap(x, cls)
    rhs = 3 * x / (euler_phi(factorize(cls.q)) * math.log(x))
    return BrunTitchmarshCheck(x=x, cls=cls, lhs=lhs, rhs=rhs, satisfied=lhs <= rhs)


def error_term_bound_check(
    x: int,
    cls: ResidueClass,
    u: int,
    epsilon: Optional[float] = None,
    workers: int = 1,
) -> ErrorTermBoundCheck:
    """|E(x)| over (x, 2x] against x^(1-eps) / (phi(q) ln x).

    ``trivial_bound`` is M(x), which |E(x)| never exceeds by more than the
    indicator count. A bound that fails is reported, not raised.

    Args:
        epsilon: Exponent saving; numerics_config.default_epsilon when None.

    Raises:
        DomainError: epsilon outside (0, 1), x < 2 or u == 0.
    """
    if epsilon is None:
        epsilon = float(config_value('numerics_config', 'default_epsilon', 1 / 16 - 1e-3))
    if not 0 < epsilon < 1:
        raise DomainError(f'epsilon must lie in (0, 1), got {epsilon}')
    decomposition = interval_decomposition(x, cls, u, workers=workers)
    observed = abs(decomposition.error_term)
    claimed = x ** (1 - epsilon) / (euler_phi(factorize(cls.q)) * math.log(x))
    ratio = observed / claimed
    return ErrorTermBoundCheck(
        x=x,
        cls=cls,
        u=u,
        epsilon=epsilon,
        observed=observed,
        trivial_bound=decomposition.main_term,
        claimed_bound=claimed,
        ratio=ratio,
        satisfied=ratio <= 1,
    )
