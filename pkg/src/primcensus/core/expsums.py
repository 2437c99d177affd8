"""
Exponential sums over F_p and probes of the estimates claimed for them.

Evaluators:
    exp_sum_coprime      sum over coprime n of e(s tau^n / p)
    exp_sum_prefix       sum over n <= x of e(s tau^n / p)
    lagrange_resolvent   sum_j omega^(-tj) zeta^(s tau^j)
    coprime_unity_sum    sum over coprime n of omega^(tn), a Ramanujan sum
    unity_sum_mobius     the same sum by inclusion-exclusion over d | p-1
    ramanujan_sum        closed form mu(m/g) phi(m) / phi(m/g)

Every phase is reduced as an exact integer numerator over p, p-1 or
p(p-1) before the exponential is taken; real and imaginary parts are
summed in index order with math.fsum.

Probes record observed magnitudes against a bound with implied constant 1.
They report ratios and never raise on a ratio above 1.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import DomainError
from ..utils.config_loader import config_value
from ..utils.parallel import chunked, map_ordered
from .models import ComplexValue, ProbeKind, ProbeReport, ProbeSample
from .ntheory import (
    coprime_indices,
    euler_phi,
    factorize,
    is_probable_prime,
    mobius,
    power_residues,
    require_primitive_root,
    smallest_primitive_root,
    squarefree_divisors,
)

logger = logging.getLogger(__name__)


def _unit_sum(numerators: np.ndarray, modulus: int) -> complex:
    """sum of e^(2 pi i m / modulus) over the integer numerators m."""
    if len(numerators) == 0:
        return 0j
    angles = (2.0 * math.pi / modulus) * (numerators % modulus)
    return complex(math.fsum(np.cos(angles)), math.fsum(np.sin(angles)))


def _require_prime(p: int) -> None:
    if not is_probable_prime(p):
        raise DomainError(f'p={p} is not prime')


def _require_range(name: str, value: int, lo: int, hi: int) -> None:
    if not lo <= value <= hi:
        raise DomainError(f'{name}={value} outside [{lo}, {hi}]')


# ==============================================================================
# Evaluators
# ==============================================================================

def exp_sum_coprime(s: int, p: int, tau: int) -> ComplexValue:
    """sum over n in [1, p-1], gcd(n, p-1) = 1, of e^(2 pi i s tau^n / p)."""
    _require_range('s', s, 0, p - 1)
    powers = power_residues(tau, p)
    indices = coprime_indices(p - 1)
    return ComplexValue.from_complex(_unit_sum(s * powers[indices], p))


def exp_sum_prefix(s: int, p: int, tau: int, x: int) -> ComplexValue:
    """sum_{n=1}^{x} e^(2 pi i s tau^n / p)."""
    powers = power_residues(tau, p)
    _require_range('x', x, 1, p - 1)
    _require_range('s', s, 1, p - 1)
    return ComplexValue.from_complex(_unit_sum(s * powers[1:x + 1], p))


def lagrange_resolvent(t: int, s: int, p: int, tau: int) -> ComplexValue:
    """sum_{j=0}^{p-2} omega^(-tj) zeta^(s tau^j), omega = e(1/(p-1)), zeta = e(1/p).

    The combined phase is (s tau^j (p-1) - (tj mod p-1) p) / (p(p-1)).
    """
    powers = power_residues(tau, p)
    _require_range('t', t, 0, p - 2)
    _require_range('s', s, 1, p - 1)
    j = np.arange(p - 1, dtype=np.int64)
    numerators = (s * powers[:p - 1] % p) * (p - 1) - ((t * j) % (p - 1)) * p
    return ComplexValue.from_complex(_unit_sum(numerators, p * (p - 1)))


def coprime_unity_sum(t: int, p: int) -> ComplexValue:
    """sum over n in [1, p-1], gcd(n, p-1) = 1, of e^(2 pi i t n / (p-1))."""
    _require_prime(p)
    _require_range('t', t, 0, max(0, p - 2))
    indices = coprime_indices(p - 1)
    return ComplexValue.from_complex(_unit_sum(t * indices, p - 1))


def unity_sum_mobius(t: int, p: int) -> ComplexValue:
    """sum_{d | p-1} mu(d) sum_{m=1}^{(p-1)/d} omega^(t d m).

    Inclusion-exclusion form of coprime_unity_sum; only squarefree d contribute.
    """
    _require_prime(p)
    _require_range('t', t, 0, max(0, p - 2))
    m = p - 1
    total_re: List[float] = []
    total_im: List[float] = []
    for d in squarefree_divisors(factorize(m)):
        sign = mobius(factorize(d))
        inner = _unit_sum(t * d * np.arange(1, m // d + 1, dtype=np.int64), m)
        total_re.append(sign * inner.real)
        total_im.append(sign * inner.imag)
    return ComplexValue(re=math.fsum(total_re), im=math.fsum(total_im))


def ramanujan_sum(m: int, t: int) -> int:
    """c_m(t) = mu(m/g) phi(m) / phi(m/g) with g = gcd(t, m)."""
    if m < 1:
        raise DomainError(f'm must be >= 1, got {m}')
    if t < 0:
        raise DomainError(f't must be >= 0, got {t}')
    g = math.gcd(t, m)
    reduced = factorize(m // g)
    return mobius(reduced) * euler_phi(factorize(m)) // euler_phi(reduced)


def primitive_root_image(s: int, p: int, tau: int) -> List[int]:
    """Sorted residues s tau^n mod p over n coprime to p-1.

    For s not divisible by p this is s times the set of primitive roots,
    so it always has phi(p-1) elements.
    """
    if s % p == 0:
        raise DomainError(f's={s} is divisible by p={p}')
    powers = power_residues(tau, p)
    indices = coprime_indices(p - 1)
    return sorted(int(v) for v in (s % p) * powers[indices] % p)


# ==============================================================================
# Probes
# ==============================================================================

def _sample(params: Tuple[int, ...], observed: float, bound: float) -> ProbeSample:
    return ProbeSample(params=params, observed=observed, bound=bound, ratio=observed / bound)


def _lemma31_chunk(p: int, tau: int, bound: float, s_values: Sequence[int]) -> List[ProbeSample]:
    return [_sample((s,), exp_sum_coprime(s, p, tau).magnitude, bound) for s in s_values]


def _lemma32_chunk(p: int, tau: int, bound: float, s_values: Sequence[int]) -> List[ProbeSample]:
    base = complex(exp_sum_coprime(1, p, tau))
    return [
        _sample((s,), abs(complex(exp_sum_coprime(s, p, tau)) - base), bound)
        for s in s_values
    ]


def _lemma33_chunk(p: int, t_values: Sequence[int]) -> List[ProbeSample]:
    log_p = math.log(p)
    return [
        _sample((t,), coprime_unity_sum(t, p).magnitude, (p - 1) * log_p / t)
        for t in t_values
    ]


def _prefix_peak(s: int, p: int, tau: int) -> Tuple[int, float]:
    """(x, |S_x|) maximizing the prefix magnitude over x in [1, p-1], first x on ties.

    The running prefix uses Neumaier compensation on each component.
    """
    powers = power_residues(tau, p)
    angles = (2.0 * math.pi / p) * (s * powers[1:p] % p)
    cos_v = np.cos(angles)
    sin_v = np.sin(angles)

    best_x, best = 1, -1.0
    re = re_c = im = im_c = 0.0
    for i in range(p - 1):
        a = float(cos_v[i])
        t = re + a
        re_c += (re - t) + a if abs(re) >= abs(a) else (a - t) + re
        re = t
        b = float(sin_v[i])
        t = im + b
        im_c += (im - t) + b if abs(im) >= abs(b) else (b - t) + im
        im = t
        magnitude = math.hypot(re + re_c, im + im_c)
        if magnitude > best:
            best_x, best = i + 1, magnitude
    return best_x, best


def _thm32_chunk(p: int, tau: int, bound: float, s_values: Sequence[int]) -> List[ProbeSample]:
    samples = []
    for s in s_values:
        x, peak = _prefix_peak(s, p, tau)
        samples.append(_sample((s, x), peak, bound))
    return samples


def _merge_chunks(
    p: int,
    kind: ProbeKind,
    func,
    fixed: Tuple,
    values: List[int],
    workers: int,
    epsilon: Optional[float] = None,
) -> ProbeReport:
    size = int(config_value('probe_config', 'chunk_size', 64))
    tasks = [fixed + (list(chunk),) for chunk in chunked(values, size)]
    report = ProbeReport.from_samples(p, kind, [], epsilon)
    for part in map_ordered(func, tasks, workers):
        report = report.merge(ProbeReport.from_samples(p, kind, part, epsilon))
    logger.info(
        f"Probe {kind.value} p={p}: {len(report.samples)} samples, "
        f"max_ratio={report.max_ratio:.6g}, {len(report.violations)} violations"
    )
    return report


def probe_lemma31(p: int, tau: int, epsilon: Optional[float] = None, workers: int = 1) -> ProbeReport:
    """|exp_sum_coprime(s)| against p^(1-eps) for every s in [1, p-1] coprime to p-1."""
    if epsilon is None:
        epsilon = float(config_value('numerics_config', 'default_epsilon', 1 / 16 - 1e-3))
    if not 0 < epsilon < 1:
        raise DomainError(f'epsilon must lie in (0, 1), got {epsilon}')
    require_primitive_root(tau, p)
    s_values = [int(s) for s in coprime_indices(p - 1)]
    bound = p ** (1 - epsilon)
    return _merge_chunks(p, ProbeKind.LEMMA31, _lemma31_chunk, (p, tau, bound), s_values, workers, epsilon)


def probe_lemma32(p: int, tau: int, workers: int = 1) -> ProbeReport:
    """|S(s) - S(1)| against p^(1/2) (ln p)^2 for every s in [1, p-1]."""
    require_primitive_root(tau, p)
    bound = math.sqrt(p) * math.log(p) ** 2
    return _merge_chunks(p, ProbeKind.LEMMA32, _lemma32_chunk, (p, tau, bound), list(range(1, p)), workers)


def probe_lemma33(p: int, workers: int = 1) -> ProbeReport:
    """|coprime_unity_sum(t)| against (p-1) ln p / t for every t in [1, p-2]."""
    _require_prime(p)
    if p < 5:
        raise DomainError(f'unity-sum probe needs p >= 5, got {p}')
    return _merge_chunks(p, ProbeKind.LEMMA33, _lemma33_chunk, (p,), list(range(1, p - 1)), workers)


def stride_samples(p: int, s_samples: int) -> List[int]:
    """``s_samples`` values of s spread evenly over [1, p-1]; all of them if fewer exist."""
    if s_samples < 1:
        raise DomainError(f's_samples must be positive, got {s_samples}')
    if s_samples >= p - 1:
        return list(range(1, p))
    return sorted({1 + (i * (p - 1)) // s_samples for i in range(s_samples)})


def probe_thm32(p: int, tau: int, s_samples: Optional[int] = None, workers: int = 1) -> ProbeReport:
    """Peak prefix magnitude over x in [1, p-1] against p^(1/2) ln p, per sampled s.

    Sample parameters are (s, x) with x the prefix length attaining the peak.
    """
    if s_samples is None:
        s_samples = int(config_value('probe_config', 'default_s_samples', 32))
    require_primitive_root(tau, p)
    bound = math.sqrt(p) * math.log(p)
    return _merge_chunks(
        p, ProbeKind.THM32, _thm32_chunk, (p, tau, bound), stride_samples(p, s_samples), workers
    )


def run_probe(
    kind: ProbeKind,
    p: int,
    tau: Optional[int] = None,
    epsilon: Optional[float] = None,
    s_samples: Optional[int] = None,
    workers: int = 1,
) -> ProbeReport:
    """Dispatch by probe kind; tau defaults to the least primitive root.

    Args:
        kind: Which bound to scan.
        p: Prime modulus.
        tau: Primitive root mod p; ignored by the unity-sum scan.
        epsilon: Exponent saving for the coprime-sum scan.
        s_samples: Number of s values for the prefix-peak scan.
        workers: Processes for the parameter fan-out.

    Returns:
        ProbeReport with every sample, the peak ratio and the violations.

    Raises:
        DomainError: p not prime, tau not a primitive root mod p, or a bad epsilon.
    """
    if kind == ProbeKind.LEMMA33:
        return probe_lemma33(p, workers=workers)
    if tau is None:
        tau = smallest_primitive_root(p)
    if kind == ProbeKind.LEMMA31:
        return probe_lemma31(p, tau, epsilon, workers=workers)
    if kind == ProbeKind.LEMMA32:
        return probe_lemma32(p, tau, workers=workers)
    return probe_thm32(p, tau, s_samples, workers=workers)


def resolvent_inversion(s: int, n: int, p: int, tau: int) -> Tuple[complex, complex]:
    """Both sides of (p-1) e(s tau^n / p) = sum_t resolvent(t, s) omega^(tn)."""
    powers = power_residues(tau, p)
    lhs = (p - 1) * _unit_sum(np.array([s * int(powers[n % (p - 1)])], dtype=np.int64), p)
    terms = [
        complex(lagrange_resolvent(t, s, p, tau))
        * _unit_sum(np.array([(t * n) % (p - 1)], dtype=np.int64), p - 1)
        for t in range(p - 1)
    ]
    rhs = complex(math.fsum(z.real for z in terms), math.fsum(z.imag for z in terms))
    return lhs, rhs
