"""
Exact integer number theory: sieving, factorization, totients, Moebius,
multiplicative orders and primitive roots.

Everything here is a pure function of its arguments. Cached tables are
returned as read-only numpy arrays or tuples so they can be shared.
"""

import logging
import math
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import DomainError
from ..utils.config_loader import config_value
from .models import Factorization, PrimeRecord

logger = logging.getLogger(__name__)

# Moduli up to 2**62; factorize accepts the full unsigned 64-bit range.
MAX_MODULUS = 2 ** 62
MAX_FACTOR_INPUT = 2 ** 64 - 1

# Default for census_config.trial_division_limit
TRIAL_DIVISION_LIMIT = 1_000_000

# Deterministic Miller-Rabin bases, valid for n < 3.3e24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_DEFAULT_SEGMENT = 1 << 18


# ==============================================================================
# Sieving
# ==============================================================================

def _simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def _sieve_window(low: int, high: int, base: np.ndarray) -> np.ndarray:
    """Primes in [low, high) using base primes up to sqrt(high)."""
    low = max(low, 2)
    if high <= low:
        return np.array([], dtype=np.int64)
    mask = np.ones(high - low, dtype=bool)
    for p in base:
        p = int(p)
        p2 = p * p
        if p2 >= high:
            break
        start = max(p2, ((low + p - 1) // p) * p)
        mask[start - low::p] = False
    return (np.flatnonzero(mask) + low).astype(np.int64)


def sieve_primes(limit: int, segment_hint: Optional[int] = None) -> np.ndarray:
    """Ascending primes <= limit, sieved in segments of ``segment_hint`` integers.

    Raises:
        DomainError: if limit < 2.
    """
    if limit < 2:
        raise DomainError(f'sieve limit must be >= 2, got {limit}')
    if segment_hint is not None and segment_hint < 1:
        raise DomainError(f'segment_hint must be positive, got {segment_hint}')

    span = segment_hint or _DEFAULT_SEGMENT
    base = _simple_sieve(math.isqrt(limit) + 1)
    pieces = []
    low = 2
    while low <= limit:
        high = min(low + span, limit + 1)
        pieces.append(_sieve_window(low, high, base))
        low = high
    return np.concatenate(pieces) if pieces else np.array([], dtype=np.int64)


def primes_between(lo: int, hi: int) -> np.ndarray:
    """Primes p with lo < p <= hi."""
    if hi < 2 or hi <= lo:
        return np.array([], dtype=np.int64)
    base = _simple_sieve(math.isqrt(hi) + 1)
    return _sieve_window(lo + 1, hi + 1, base)


@lru_cache(maxsize=4)
def _trial_primes(limit: int) -> Tuple[int, ...]:
    return tuple(int(p) for p in _simple_sieve(limit))


class SmallestFactorSieve:
    """Smallest-prime-factor table for 2 <= n <= limit.

    ``factor(n)`` peels off the smallest factor repeatedly, so each
    factorization costs O(log n) table lookups.
    """

    def __init__(self, limit: int):
        if limit < 2:
            raise DomainError(f'smallest-factor table limit must be >= 2, got {limit}')
        self.limit = limit
        spf = np.zeros(limit + 1, dtype=np.int64)
        for p in range(2, math.isqrt(limit) + 1):
            if spf[p] == 0:
                window = spf[p * p::p]
                window[window == 0] = p
        unset = np.flatnonzero(spf == 0)
        spf[unset] = unset
        spf.setflags(write=False)
        self._spf = spf
        logger.debug(f"Built smallest-factor table up to {limit}")

    def factor_pairs(self, n: int) -> List[Tuple[int, int]]:
        """(prime, exponent) pairs of n, ascending."""
        if not 1 <= n <= self.limit:
            raise DomainError(f'{n} outside smallest-factor table range [1, {self.limit}]')
        pairs: List[Tuple[int, int]] = []
        spf = self._spf
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            pairs.append((p, e))
        return pairs

    def factor(self, n: int) -> Factorization:
        return Factorization(factors=tuple(self.factor_pairs(n)))


@lru_cache(maxsize=2)
def smallest_factor_sieve(limit: int) -> SmallestFactorSieve:
    """Shared table; one per process and limit."""
    return SmallestFactorSieve(limit)


# ==============================================================================
# Primality and factorization
# ==============================================================================

def is_probable_prime(n: int) -> bool:
    """Deterministic strong-pseudoprime test for the 64-bit range."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p

    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1

    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _rho_split(n: int) -> int:
    """A nontrivial factor of odd composite n.

    Floyd cycle detection on x -> x^2 + c with x0 = 2, trying c = 1, 2, ...
    in order, so the result is reproducible.
    """
    for c in range(1, 64):
        slow = fast = 2
        product = 1
        while True:
            slow = (slow * slow + c) % n
            fast = (fast * fast + c) % n
            fast = (fast * fast + c) % n
            product = product * abs(slow - fast) % n
            if slow == fast:
                break
            g = math.gcd(product, n)
            if 1 < g < n:
                return g
            if g == n:
                break
    raise DomainError(f'failed to split composite {n}')


def _collect_large_factors(n: int, found: Dict[int, int]) -> None:
    if n == 1:
        return
    if is_probable_prime(n):
        found[n] = found.get(n, 0) + 1
        return
    d = _rho_split(n)
    _collect_large_factors(d, found)
    _collect_large_factors(n // d, found)


def factorize(n: int) -> Factorization:
    """Factorization of 1 <= n < 2**64.

    Trial division by primes up to census_config.trial_division_limit
    (10^6 by default), then a deterministic rho split of whatever cofactor
    remains.

    Raises:
        DomainError: n < 1 or n outside the 64-bit range.
    """
    if n < 1:
        raise DomainError(f'cannot factorize {n}; n must be >= 1')
    if n > MAX_FACTOR_INPUT:
        raise DomainError(f'{n} exceeds the 64-bit working range')

    found: Dict[int, int] = {}
    remaining = n
    limit = int(config_value('census_config', 'trial_division_limit', TRIAL_DIVISION_LIMIT))
    for p in _trial_primes(max(2, limit)):
        if p * p > remaining:
            break
        if remaining % p == 0:
            e = 0
            while remaining % p == 0:
                remaining //= p
                e += 1
            found[p] = e

    if remaining > 1:
        _collect_large_factors(remaining, found)

    return Factorization(factors=tuple(sorted(found.items())))


# ==============================================================================
# Arithmetic functions
# ==============================================================================

def euler_phi(f: Factorization) -> int:
    phi = 1
    for p, e in f.factors:
        phi *= (p - 1) * p ** (e - 1)
    return phi


def mobius(f: Factorization) -> int:
    if any(e >= 2 for _, e in f.factors):
        return 0
    return -1 if len(f.factors) % 2 else 1


def squarefree_divisors(f: Factorization) -> List[int]:
    """Ascending squarefree divisors, the support of mu(d) for d | n."""
    divisors = [1]
    for p in f.primes:
        divisors += [d * p for d in divisors]
    return sorted(divisors)


def pow_mod(base: int, exp: int, modulus: int) -> int:
    if modulus < 2:
        raise DomainError(f'modulus must be >= 2, got {modulus}')
    if exp < 0:
        raise DomainError(f'exponent must be >= 0, got {exp}')
    return pow(base, exp, modulus)


# ==============================================================================
# Orders and primitive roots
# ==============================================================================

@lru_cache(maxsize=4096)
def _checked_prime(p: int) -> int:
    if not is_probable_prime(p):
        raise DomainError(f'{p} is not prime')
    if p > MAX_MODULUS:
        raise DomainError(f'prime {p} exceeds the working modulus range 2**62')
    return p


@lru_cache(maxsize=4096)
def p_minus_1_factorization(p: int) -> Factorization:
    """Factorization of p - 1 for a prime p, cached."""
    _checked_prime(p)
    return factorize(p - 1)


def multiplicative_order(u: int, p: int) -> int:
    """Least k >= 1 with u^k = 1 mod p.

    Starts from p - 1 and divides out each prime factor while the power
    stays 1.

    Raises:
        DomainError: p not prime, or p | u.
    """
    _checked_prime(p)
    u %= p
    if u == 0:
        raise DomainError(f'{p} divides u; the order is undefined')

    order = p - 1
    for r, e in p_minus_1_factorization(p).factors:
        for _ in range(e):
            if pow(u, order // r, p) == 1:
                order //= r
            else:
                break
    return order


def _passes_divisor_test(u: int, p: int, primes: Sequence[int]) -> bool:
    return all(pow(u, (p - 1) // r, p) != 1 for r in primes)


def is_primitive_root(u: int, p: int) -> bool:
    """True iff u^((p-1)/r) != 1 mod p for every prime r | p-1."""
    _checked_prime(p)
    u %= p
    if u == 0:
        return False
    return _passes_divisor_test(u, p, p_minus_1_factorization(p).primes)


@lru_cache(maxsize=4096)
def smallest_primitive_root(p: int) -> int:
    _checked_prime(p)
    primes = p_minus_1_factorization(p).primes
    tau = 1
    while not _passes_divisor_test(tau, p, primes):
        tau += 1
    return tau


def primitive_roots(p: int) -> List[int]:
    """All primitive roots mod p, ascending: tau^n for gcd(n, p-1) = 1."""
    tau = smallest_primitive_root(p)
    return sorted(pow(tau, int(n), p) for n in coprime_indices(p - 1))


# ==============================================================================
# Cached index tables
# ==============================================================================

@lru_cache(maxsize=256)
def coprime_indices(m: int) -> np.ndarray:
    """n in [1, m] with gcd(n, m) = 1."""
    if m < 1:
        raise DomainError(f'm must be >= 1, got {m}')
    n = np.arange(1, m + 1, dtype=np.int64)
    out = n[np.gcd(n, m) == 1]
    out.setflags(write=False)
    return out


def require_primitive_root(tau: int, p: int) -> None:
    if not is_primitive_root(tau, p):
        raise DomainError(f'tau={tau} is not a primitive root mod {p}')


@lru_cache(maxsize=256)
def power_residues(tau: int, p: int) -> np.ndarray:
    """``table[n] = tau^n mod p`` for n = 0 .. p-1; exact integer arithmetic."""
    require_primitive_root(tau, p)
    table = np.empty(p, dtype=np.int64)
    value = 1
    for n in range(p):
        table[n] = value
        value = value * tau % p
    table.setflags(write=False)
    return table


# ==============================================================================
# Prime records
# ==============================================================================

def prime_record(p: int) -> PrimeRecord:
    factors = p_minus_1_factorization(p)
    return PrimeRecord(
        p=p,
        p_minus_1_factors=factors,
        phi_p_minus_1=euler_phi(factors),
        tau=smallest_primitive_root(p),
    )


def prime_table(limit: int) -> List[PrimeRecord]:
    """PrimeRecords for every prime <= limit."""
    records = [prime_record(int(p)) for p in sieve_primes(limit)]
    logger.info(f"Built {len(records)} prime records up to {limit}")
    return records
