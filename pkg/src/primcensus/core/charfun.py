"""
Indicator of primitive elements mod p, three ways.

    psi_divisor         classical test u^((p-1)/r) != 1 for every prime r | p-1
    psi_expsum_exact    the double exponential sum with its inner character
                        sum collapsed exactly (p when tau^n = u, else 0)
    psi_expsum_numeric  the same double sum evaluated literally in floating point

All three must agree; ``evaluate_psi`` cross-checks them for one (u, p).
"""

import logging
import math
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from ..exceptions import DomainError, ResourceError, VerificationError
from ..utils.config_loader import config_value
from .models import PsiEvaluation, PsiMethod
from .ntheory import (
    coprime_indices,
    is_primitive_root,
    power_residues,
    smallest_primitive_root,
)

logger = logging.getLogger(__name__)

# Rows of the (n, k) phase matrix evaluated per block in the numeric sum
_ROW_BLOCK = 256


@lru_cache(maxsize=64)
def _unit_roots(p: int) -> Tuple[np.ndarray, np.ndarray]:
    """cos and sin of 2 pi j / p for j = 0 .. p-1, indexed by the reduced numerator."""
    angles = (2.0 * math.pi / p) * np.arange(p, dtype=np.float64)
    cos_table, sin_table = np.cos(angles), np.sin(angles)
    cos_table.setflags(write=False)
    sin_table.setflags(write=False)
    return cos_table, sin_table


def _reduce_nonzero(u: int, p: int) -> int:
    r = u % p
    if r == 0:
        raise DomainError(f'u={u} is divisible by p={p}; the indicator is defined for nonzero u only')
    return r


def psi_divisor(u: int, p: int) -> int:
    """1 if u is a primitive root mod p, else 0."""
    r = _reduce_nonzero(u, p)
    return int(is_primitive_root(r, p))


def psi_expsum_exact(u: int, p: int, tau: int) -> int:
    """Count coprime indices n in [1, p-1] with tau^n = u mod p.

    The inner sum over k of e^(2 pi i (tau^n - u) k / p) is p when
    tau^n = u and 0 otherwise, so the double sum divided by p is a count.
    The powers tau^n are distinct, so the count is 0 or 1.

    Raises:
        DomainError: u divisible by p, or tau not a primitive root mod p.
    """
    r = _reduce_nonzero(u, p)
    powers = power_residues(tau, p)
    indices = coprime_indices(p - 1)
    count = int(np.count_nonzero(powers[indices] == r))
    if count > 1:
        raise VerificationError('psi_count', f'{count} coprime indices hit u={r} mod {p}')
    return count


def psi_expsum_numeric(
    u: int,
    p: int,
    tau: int,
    ceiling: Optional[int] = None,
    allow_large: bool = False,
) -> float:
    """The double sum (1/p) sum_n sum_k e^(2 pi i (tau^n - u) k / p) in floating point.

    n runs over [1, p-1] coprime to p-1 and k over [0, p-1]. Phases are reduced
    mod p as integers and looked up in a table of the p-th roots of unity.
    Each row over k is reduced by numpy (pairwise summation); the row
    partials are combined with math.fsum.

    Raises:
        ResourceError: p above ``ceiling`` (default numerics_config.numeric_psi_ceiling)
            and ``allow_large`` not set.
    """
    if ceiling is None:
        ceiling = int(config_value('numerics_config', 'numeric_psi_ceiling', 5000))
    if p > ceiling and not allow_large:
        raise ResourceError(
            f'numeric indicator sum for p={p} exceeds the ceiling {ceiling}; '
            'pass allow_large to override'
        )
    r = _reduce_nonzero(u, p)
    powers = power_residues(tau, p)
    indices = coprime_indices(p - 1)

    shifts = (powers[indices] - r) % p
    k = np.arange(p, dtype=np.int64)
    cos_table, sin_table = _unit_roots(p)
    re_parts, im_parts = [], []
    for start in range(0, len(shifts), _ROW_BLOCK):
        block = shifts[start:start + _ROW_BLOCK]
        phases = np.outer(block, k) % p
        re_parts.extend(cos_table[phases].sum(axis=1).tolist())
        im_parts.extend(sin_table[phases].sum(axis=1).tolist())

    real = math.fsum(re_parts) / p
    imag = math.fsum(im_parts) / p
    tolerance = float(config_value('numerics_config', 'psi_tolerance', 1e-6))
    if abs(imag) >= tolerance:
        raise VerificationError('psi_numeric_real', f'imaginary part {imag:.3e} for u={r}, p={p}')
    return real


def evaluate_psi(
    u: int,
    p: int,
    tau: Optional[int] = None,
    method: PsiMethod = PsiMethod.EXPSUM_EXACT,
    ceiling: Optional[int] = None,
    allow_large: bool = False,
) -> PsiEvaluation:
    """Evaluate the indicator by ``method``.

    The numeric method also computes the exact value, so the returned
    PsiEvaluation checks their agreement on construction.
    """
    if tau is None:
        tau = smallest_primitive_root(p)
    if method == PsiMethod.DIVISOR:
        return PsiEvaluation(p=p, u=u % p, tau=tau, value_exact=psi_divisor(u, p), method=method)

    exact = psi_expsum_exact(u, p, tau)
    numeric = None
    if method == PsiMethod.EXPSUM_NUMERIC:
        numeric = psi_expsum_numeric(u, p, tau, ceiling=ceiling, allow_large=allow_large)
    try:
        return PsiEvaluation(p=p, u=u % p, tau=tau, value_exact=exact, value_numeric=numeric, method=method)
    except ValueError as e:
        raise VerificationError('psi_numeric_agreement', str(e)) from e


def indicator_count(p: int, tau: Optional[int] = None) -> int:
    """Sum of the indicator over u in [1, p-1]; equals phi(p-1)."""
    if tau is None:
        tau = smallest_primitive_root(p)
    return sum(psi_expsum_exact(u, p, tau) for u in range(1, p))
