"""
Density constants, the logarithmic integral, and empirical densities.
"""

import logging
import math
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import integrate

from ..exceptions import DomainError
from ..utils.config_loader import config_value
from .models import CensusResult, DensityConstant, DensityEstimate, ResidueClass
from .ntheory import euler_phi, factorize, sieve_primes

logger = logging.getLogger(__name__)


@lru_cache(maxsize=4)
def _log_factors(P: int) -> tuple:
    """(primes <= P, log(1 - 1/(p(p-1))) per prime)."""
    primes = sieve_primes(P)
    p = primes.astype(np.float64)
    logs = np.log1p(-1.0 / (p * (p - 1.0)))
    primes.setflags(write=False)
    logs.setflags(write=False)
    return primes, logs


def truncated_Aq(q: int, a: int, P: Optional[int] = None) -> DensityConstant:
    """Truncated Euler product for primes p = a mod q.

        prod_{p | gcd(a-1, q)} (1 - 1/p) * prod_{p <= P, p does not divide q} (1 - 1/(p(p-1)))

    gcd(0, q) = q, so a = 1 takes the first product over every prime dividing q.
    The omitted log-factors sum to less than sum_{n > P} 1/(n(n-1)) = 1/P,
    which is reported as the relative tail bound.

    Args:
        q: Modulus, at least 1.
        a: Residue coprime to q.
        P: Truncation point; density_config.truncation_P when None.

    Returns:
        DensityConstant carrying the value and tail_bound = 1/P.

    Raises:
        DomainError: gcd(a, q) != 1 or P < 2.
    """
    if P is None:
        P = int(config_value('density_config', 'truncation_P', 1_000_000))
    if P < 2:
        raise DomainError(f'truncation limit P must be >= 2, got {P}')
    cls = ResidueClass.build(q, a)

    first = 1.0
    shared = math.gcd(cls.a - 1, cls.q)
    for r in factorize(shared).primes:
        first *= 1.0 - 1.0 / r

    primes, logs = _log_factors(P)
    keep = cls.q % primes != 0
    second = math.exp(math.fsum(logs[keep]))

    value = first * second
    logger.debug(f"A_q for {cls.a} mod {cls.q} at P={P}: {value:.10g}")
    return DensityConstant(q=cls.q, a=cls.a, truncation_P=P, value=value, tail_bound=1.0 / P)


def _inverse_log(t: float) -> float:
    return 1.0 / math.log(t)


def log_integral(x: float) -> float:
    """li(x) = integral from 2 to x of dt / ln t.

    The range is cut at powers of 10 and each piece integrated with
    scipy.integrate.quad; the pieces are summed with math.fsum.

    Raises:
        DomainError: x < 2.
    """
    if not x >= 2:
        raise DomainError(f'log_integral needs x >= 2, got {x}')
    if x == 2:
        return 0.0

    epsabs = float(config_value('numerics_config', 'li_epsabs', 1e-9))
    limit = int(config_value('numerics_config', 'li_limit', 500))

    cuts = [2.0]
    edge = 10.0
    while edge < x:
        cuts.append(edge)
        edge *= 10.0
    cuts.append(float(x))

    pieces = []
    for lo, hi in zip(cuts, cuts[1:]):
        value, _ = integrate.quad(_inverse_log, lo, hi, epsabs=epsabs, epsrel=1e-12, limit=limit)
        pieces.append(value)
    return math.fsum(pieces)


def li_difference(x: float) -> float:
    """li(2x) - li(x), the main-term scale of a dyadic block (x, 2x]."""
    return log_integral(2 * x) - log_integral(x)


def predicted_count(x: float, q: int, a: int, P: Optional[int] = None) -> float:
    """A_q li(x) / phi(q)."""
    constant = truncated_Aq(q, a, P)
    return constant.value * log_integral(x) / euler_phi(factorize(constant.q))


def empirical_density(census: CensusResult, P: Optional[int] = None) -> DensityEstimate:
    """delta_hat = pi_u / pi and a_u_hat = delta_hat phi(q) / A_q.

    a_u_hat is an estimate of the correction factor only.

    Raises:
        DomainError: the census found no primes in the class.
    """
    if census.pi == 0:
        raise DomainError(
            f'no primes <= {census.x} in {census.cls.a} mod {census.cls.q}; density undefined'
        )
    constant = truncated_Aq(census.cls.q, census.cls.a, P)
    delta_hat = census.pi_u / census.pi
    a_u_hat = delta_hat * euler_phi(factorize(census.cls.q)) / constant.value
    return DensityEstimate(
        x=census.x,
        q=census.cls.q,
        a=census.cls.a,
        u=census.u,
        delta_hat=delta_hat,
        a_u_hat=a_u_hat,
        A_q=constant.value,
    )
