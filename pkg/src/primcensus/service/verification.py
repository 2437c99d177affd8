"""
Invariant suites for the ``verify`` command.

Each suite checks one identity or inequality over a range of inputs and
returns the number of cases it checked. The first failing case raises
VerificationError naming the suite, so ``run_suites`` fails fast.
Limits come from verify_config and can be overridden per call.
"""

import logging
import math
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy import integrate, special

from ..core import census, charfun, density, expsums, ntheory
from ..core.models import ResidueClass
from ..exceptions import DomainError, VerificationError
from ..utils.config_loader import ConfigLoader

logger = logging.getLogger(__name__)

Limits = Dict[str, Any]

# integral from 2 to 10^6 of dt / ln t
LI_MILLION = 78626.50


def _check(name: str, condition: bool, detail: str) -> None:
    if not condition:
        raise VerificationError(name, detail)


def _primes(limit: int, start: int = 2) -> Iterable[int]:
    return (int(p) for p in ntheory.sieve_primes(limit) if p >= start)


def _totient_table(limit: int) -> np.ndarray:
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi


# ==============================================================================
# ntheory-core
# ==============================================================================

def primitive_root_tests(limits: Limits) -> int:
    """Divisor test, order test and primitive-root count agree for p <= charfun_limit."""
    name = 'primitive_root_tests'
    cases = 0
    for p in _primes(limits['charfun_limit']):
        roots = 0
        for u in range(1, p):
            by_order = ntheory.multiplicative_order(u, p) == p - 1
            _check(name, ntheory.is_primitive_root(u, p) == by_order, f'u={u}, p={p}')
            roots += by_order
            cases += 1
        phi = ntheory.euler_phi(ntheory.factorize(p - 1))
        _check(name, roots == phi, f'p={p}: {roots} primitive roots, phi(p-1)={phi}')
    return cases


def totient_brute_force(limits: Limits) -> int:
    """euler_phi(factorize(n)) matches a totient sieve, and a gcd count for small n."""
    name = 'totient_brute_force'
    limit = limits['totient_limit']
    gcd_limit = limits.get('totient_gcd_limit', 1000)
    table = _totient_table(limit)
    for n in range(1, limit + 1):
        phi = ntheory.euler_phi(ntheory.factorize(n))
        _check(name, phi == int(table[n]), f'phi({n})={phi}, sieve {int(table[n])}')
        if n <= gcd_limit:
            m = np.arange(1, n + 1)
            count = int(np.count_nonzero(np.gcd(m, n) == 1))
            _check(name, phi == count, f'phi({n})={phi}, gcd count {count}')
    return limit


def factorize_left_inverse(limits: Limits) -> int:
    """factorize(n) multiplies back to n for every n <= factorize_limit."""
    name = 'factorize_left_inverse'
    limit = limits['factorize_limit']
    for n in range(1, limit + 1):
        value = ntheory.factorize(n).value
        _check(name, value == n, f'factorization of {n} multiplies to {value}')
    return limit


def primitive_root_image(limits: Limits) -> int:
    """s tau^n over n coprime to p-1 hits phi(p-1) distinct residues for every s."""
    name = 'primitive_root_image'
    cases = 0
    for p in _primes(limits['image_limit'], start=3):
        tau = ntheory.smallest_primitive_root(p)
        phi = ntheory.euler_phi(ntheory.factorize(p - 1))
        roots = sorted(ntheory.primitive_roots(p))
        for s in range(1, p):
            image = expsums.primitive_root_image(s, p, tau)
            _check(name, len(set(image)) == phi, f's={s}, p={p}: {len(set(image))} residues, phi(p-1)={phi}')
            if s == 1:
                _check(name, image == roots, f'p={p}: image of 1 is not the primitive roots')
            cases += 1
    return cases


# ==============================================================================
# charfun
# ==============================================================================

def indicator_equivalence(limits: Limits) -> int:
    """Divisor test equals the collapsed double sum; the literal sum agrees for small p."""
    name = 'indicator_equivalence'
    tolerance = limits.get('psi_tolerance', 1e-6)
    cases = 0
    for p in _primes(limits['charfun_limit']):
        tau = ntheory.smallest_primitive_root(p)
        total = 0
        for u in range(1, p):
            exact = charfun.psi_expsum_exact(u, p, tau)
            _check(name, charfun.psi_divisor(u, p) == exact, f'u={u}, p={p}')
            if p <= limits['numeric_limit']:
                numeric = charfun.psi_expsum_numeric(u, p, tau)
                _check(name, abs(numeric - exact) < tolerance, f'u={u}, p={p}: numeric {numeric}')
            total += exact
            cases += 1
        phi = ntheory.euler_phi(ntheory.factorize(p - 1))
        _check(name, total == phi, f'p={p}: indicator sums to {total}, phi(p-1)={phi}')
    return cases


def tau_independence(limits: Limits) -> int:
    """The collapsed indicator does not depend on which primitive root is used."""
    name = 'tau_independence'
    cases = 0
    for p in _primes(limits['tau_independence_limit']):
        tau = ntheory.smallest_primitive_root(p)
        reference = [charfun.psi_expsum_exact(u, p, tau) for u in range(1, p)]
        for other in ntheory.primitive_roots(p):
            values = [charfun.psi_expsum_exact(u, p, other) for u in range(1, p)]
            _check(name, values == reference, f'p={p}, tau={other}')
            cases += 1
    return cases


# ==============================================================================
# expsums
# ==============================================================================

def gauss_magnitude(limits: Limits) -> int:
    """|resolvent(t, s)| = sqrt(p) for t in [1, p-2], s in [1, p-1]."""
    name = 'gauss_magnitude'
    tolerance = limits.get('psi_tolerance', 1e-6)
    cases = 0
    for p in _primes(limits['gauss_limit'], start=5):
        tau = ntheory.smallest_primitive_root(p)
        root_p = math.sqrt(p)
        for t in range(1, p - 1):
            for s in range(1, p):
                magnitude = expsums.lagrange_resolvent(t, s, p, tau).magnitude
                _check(name, abs(magnitude - root_p) < tolerance, f't={t}, s={s}, p={p}: {magnitude}')
                cases += 1
    return cases


def resolvent_inversion(limits: Limits) -> int:
    """Summing the resolvents against omega^(tn) recovers (p-1) e(s tau^n / p)."""
    name = 'resolvent_inversion'
    tolerance = limits.get('psi_tolerance', 1e-6)
    cases = 0
    for p in _primes(limits['resolvent_limit'], start=3):
        tau = ntheory.smallest_primitive_root(p)
        for s in range(1, p):
            for n in range(p - 1):
                lhs, rhs = expsums.resolvent_inversion(s, n, p, tau)
                _check(
                    name,
                    abs(lhs.real - rhs.real) < tolerance and abs(lhs.imag - rhs.imag) < tolerance,
                    f's={s}, n={n}, p={p}: {lhs} vs {rhs}',
                )
                cases += 1
    return cases


def complete_sum(limits: Limits) -> int:
    """The prefix sum over all of [1, p-1] is -1."""
    name = 'complete_sum'
    tolerance = limits.get('complete_sum_tolerance', 1e-9)
    cases = 0
    for p in _primes(limits['complete_sum_limit'], start=3):
        tau = ntheory.smallest_primitive_root(p)
        for s in range(1, p):
            z = complex(expsums.exp_sum_prefix(s, p, tau, p - 1))
            _check(name, abs(z + 1) < tolerance, f's={s}, p={p}: {z}')
            cases += 1
    return cases


def ramanujan_closed_form(limits: Limits) -> int:
    """coprime_unity_sum is real and equals the Ramanujan closed form."""
    name = 'ramanujan_closed_form'
    tolerance = limits.get('complete_sum_tolerance', 1e-9)
    cases = 0
    for p in _primes(limits['ramanujan_limit'], start=3):
        for t in range(0, p - 1):
            z = expsums.coprime_unity_sum(t, p)
            expected = expsums.ramanujan_sum(p - 1, t)
            _check(name, abs(z.im) < tolerance, f't={t}, p={p}: imaginary part {z.im}')
            _check(name, round(z.re) == expected, f't={t}, p={p}: {z.re} vs c={expected}')
            cases += 1
    return cases


def unity_sum_probe(limits: Limits) -> int:
    """The unity-sum probe flags t=15 at p=31 and nothing at p=13."""
    name = 'unity_sum_probe'
    flagged = expsums.probe_lemma33(31)
    _check(name, (15,) in flagged.violations, f'p=31 violations {flagged.violations}')
    clean = expsums.probe_lemma33(13)
    _check(name, not clean.violations, f'p=13 violations {clean.violations}')
    return 2


# ==============================================================================
# density
# ==============================================================================

def monotone_tail(limits: Limits) -> int:
    """A_q is nonincreasing in P and each step is within value/P1."""
    name = 'monotone_tail'
    truncations = sorted(limits['tail_truncations'])
    cases = 0
    for q, a in ((1, 0), (2, 1), (3, 1), (3, 2), (4, 3)):
        values = [density.truncated_Aq(q, a, P) for P in truncations]
        for small, large in zip(values, values[1:]):
            _check(name, large.value <= small.value, f'q={q}, a={a}: value grew past P={small.truncation_P}')
            _check(
                name,
                small.value - large.value <= small.value * small.tail_bound,
                f'q={q}, a={a}: drop beyond the tail bound at P={small.truncation_P}',
            )
            cases += 1
    return cases


def li_asymptote(limits: Limits) -> int:
    """|li(x) - x/ln x| <= 3x/(ln x)^2, and li is additive over [x, y]."""
    name = 'li_asymptote'
    points = limits['li_asymptote_points']
    for x in points:
        gap = abs(density.log_integral(x) - x / math.log(x))
        _check(name, gap <= 3 * x / math.log(x) ** 2, f'x={x}: gap {gap}')
    for x, y in zip(points, points[1:]):
        middle, _ = integrate.quad(lambda t: 1.0 / math.log(t), x, y, epsabs=1e-9, epsrel=1e-12, limit=500)
        drift = abs(density.log_integral(x) + middle - density.log_integral(y))
        _check(name, drift < 2e-6, f'additivity over [{x}, {y}] off by {drift}')
    return 2 * len(points) - 1


def li_accuracy(limits: Limits) -> int:
    """li(x) matches Ei(ln x) - Ei(ln 2) to relative li_tolerance, and li(10^6) is 78626.50."""
    name = 'li_accuracy'
    tolerance = limits['li_tolerance']
    points = limits['li_accuracy_points']
    for x in points:
        value = density.log_integral(x)
        expected = float(special.expi(math.log(x)) - special.expi(math.log(2)))
        _check(name, abs(value - expected) <= tolerance * expected, f'x={x}: {value} vs Ei oracle {expected}')
    anchor = density.log_integral(10 ** 6)
    _check(name, abs(anchor - LI_MILLION) < 1e-2, f'li(10^6) = {anchor}, expected {LI_MILLION}')
    return len(points) + 1


# ==============================================================================
# census
# ==============================================================================

def decomposition_exactness(limits: Limits) -> int:
    """psi_sum = main_term + error_term, in floating point and as Fractions."""
    name = 'decomposition_exactness'
    rng = np.random.default_rng(limits['seed'])
    trials = limits['decomposition_trials']
    done = 0
    while done < trials:
        x = int(rng.integers(2, limits['decomposition_max_x'] + 1))
        q = int(rng.integers(1, limits['decomposition_max_q'] + 1))
        a = int(rng.integers(0, q))
        u = int(rng.integers(-limits['decomposition_max_u'], limits['decomposition_max_u'] + 1))
        if u == 0 or math.gcd(a, q) != 1 and q > 1:
            continue
        d = census.interval_decomposition(x, ResidueClass.build(q, a), u, exact=True)
        _check(name, abs(d.residual) < 1e-9, f'x={x}, q={q}, a={a}, u={u}: residual {d.residual}')
        _check(
            name,
            d.main_term_exact + d.error_term_exact == d.psi_sum,
            f'x={x}, q={q}, a={a}, u={u}: rational identity fails',
        )
        _check(name, d.psi_sum <= d.prime_count, f'x={x}, q={q}, a={a}, u={u}: psi_sum above prime count')
        done += 1
    return trials


def class_partition(limits: Limits) -> int:
    """Class counts over all a coprime to q add up to pi(x) minus the primes dividing q."""
    name = 'class_partition'
    x = limits['partition_limit']
    total = census.count_primes_ap(x, ResidueClass.build(1, 0))
    for q in range(1, limits['partition_max_q'] + 1):
        classes = [a for a in range(q) if math.gcd(a, q) == 1] if q > 1 else [0]
        summed = sum(census.count_primes_ap(x, ResidueClass.build(q, a)) for a in classes)
        dividing = len(ntheory.factorize(q).primes)
        _check(name, summed == total - dividing, f'q={q}: classes sum to {summed}, expected {total - dividing}')
    return limits['partition_max_q']


def brun_titchmarsh(limits: Limits) -> int:
    """The interval count never exceeds 3x/(phi(q) ln x)."""
    name = 'brun_titchmarsh'
    cases = 0
    for x in limits['brun_titchmarsh_limits']:
        for q in limits['brun_titchmarsh_moduli']:
            classes = [a for a in range(q) if math.gcd(a, q) == 1] if q > 1 else [0]
            for a in classes:
                check = census.brun_titchmarsh_check(x, ResidueClass.build(q, a))
                _check(name, check.satisfied, f'x={x}, q={q}, a={a}: {check.lhs} > {check.rhs}')
                cases += 1
    return cases


def dyadic_consistency(limits: Limits) -> int:
    """Each block of dyadic_census matches the difference of the cumulative counts."""
    name = 'dyadic_consistency'
    x0, blocks = limits['dyadic_x0'], limits['dyadic_blocks']
    cases = 0
    for q, a in ((1, 0), (3, 2), (4, 1)):
        cls = ResidueClass.build(q, a)
        decompositions = census.dyadic_census(x0, blocks, cls, 2)
        edges = [x0 * 2 ** i for i in range(blocks + 1)]
        counts = [census.count_pr_primes(x, cls, 2) for x in edges]
        for d, lower, upper in zip(decompositions, counts, counts[1:]):
            expected = (upper.pi - upper.skipped) - (lower.pi - lower.skipped)
            _check(name, d.prime_count == expected, f'q={q}, a={a}, x={d.x}: {d.prime_count} vs {expected}')
            _check(
                name,
                d.psi_sum == upper.pi_u - lower.pi_u,
                f'q={q}, a={a}, x={d.x}: psi_sum {d.psi_sum} vs {upper.pi_u - lower.pi_u}',
            )
            cases += 1
        total = sum(d.prime_count for d in decompositions)
        span = census.count_primes_ap(edges[-1], cls) - census.count_primes_ap(x0, cls)
        _check(name, total == span, f'q={q}, a={a}: blocks cover {total} primes, range has {span}')
    return cases


def artin_density(limits: Limits) -> int:
    """pi_u / pi for u = 2 among odd primes is within artin_tolerance of A_2."""
    name = 'artin_density'
    cls = ResidueClass.build(2, 1)
    result = census.count_pr_primes(limits['artin_density_limit'], cls, 2)
    constant = density.truncated_Aq(cls.q, cls.a)
    gap = abs(result.pi_u / result.pi - constant.value)
    _check(name, gap < limits['artin_tolerance'], f'x={result.x}: pi_u/pi off A_2 by {gap}')
    return 1


def totient_trend(limits: Limits) -> int:
    """sum phi(p-1)/p approaches A_q li(x)/phi(q) as x grows, for q = 2 and q = 3."""
    name = 'totient_trend'
    points = sorted(limits['totient_trend_points'])
    tolerance = limits['totient_trend_tolerance']
    cases = 0
    for q, a in ((2, 1), (3, 1), (3, 2)):
        cls = ResidueClass.build(q, a)
        errors = []
        for x in points:
            predicted = density.predicted_count(x, q, a)
            errors.append(abs(census.totient_over_p_sum(x, cls) - predicted) / predicted)
        _check(name, errors[-1] < tolerance, f'q={q}, a={a}, x={points[-1]}: relative error {errors[-1]:.4f}')
        _check(name, errors[-1] < errors[0], f'q={q}, a={a}: error grew from {errors[0]:.4f} to {errors[-1]:.4f}')
        cases += 1
    return cases


def worker_determinism(limits: Limits) -> int:
    """The census serializes identically for every worker count."""
    name = 'worker_determinism'
    cls = ResidueClass.build(2, 1)
    workers = limits['determinism_workers']
    dumps = [
        census.count_pr_primes(limits['determinism_limit'], cls, 2, workers=w).model_dump_json()
        for w in workers
    ]
    for w, dump in zip(workers[1:], dumps[1:]):
        _check(name, dump == dumps[0], f'workers={w} differs from workers={workers[0]}')
    return len(workers)


SUITES: Dict[str, Callable[[Limits], int]] = {
    'primitive_root_tests': primitive_root_tests,
    'totient_brute_force': totient_brute_force,
    'factorize_left_inverse': factorize_left_inverse,
    'primitive_root_image': primitive_root_image,
    'indicator_equivalence': indicator_equivalence,
    'tau_independence': tau_independence,
    'gauss_magnitude': gauss_magnitude,
    'resolvent_inversion': resolvent_inversion,
    'complete_sum': complete_sum,
    'ramanujan_closed_form': ramanujan_closed_form,
    'unity_sum_probe': unity_sum_probe,
    'monotone_tail': monotone_tail,
    'li_asymptote': li_asymptote,
    'li_accuracy': li_accuracy,
    'decomposition_exactness': decomposition_exactness,
    'class_partition': class_partition,
    'brun_titchmarsh': brun_titchmarsh,
    'dyadic_consistency': dyadic_consistency,
    'artin_density': artin_density,
    'totient_trend': totient_trend,
    'worker_determinism': worker_determinism,
}


def default_limits() -> Limits:
    limits: Limits = dict(ConfigLoader.get_verify_config())
    numerics = ConfigLoader.get_numerics_config()
    for key in ('psi_tolerance', 'complete_sum_tolerance'):
        if key in numerics:
            limits[key] = numerics[key]
    limits.pop('description', None)
    return limits


def run_suites(names: Optional[List[str]] = None, overrides: Optional[Limits] = None) -> List[Tuple[str, int]]:
    """Run the named suites in the order given; all of them, in registry order, by default.

    Args:
        names: Suite names from SUITES; empty or None runs every suite.
        overrides: Limits that replace the verify_config values for this call.

    Returns:
        (suite name, cases checked) pairs in run order.

    Raises:
        DomainError: an unknown suite name.
        VerificationError: the first failing invariant.
    """
    selected = list(SUITES) if not names else names
    unknown = [n for n in selected if n not in SUITES]
    if unknown:
        raise DomainError(f"unknown verification suite(s): {', '.join(unknown)}")

    limits = default_limits()
    limits.update(overrides or {})
    results = []
    for name in selected:
        logger.info(f"Verifying {name}")
        cases = SUITES[name](limits)
        logger.info(f"{name}: {cases} cases ok")
        results.append((name, cases))
    return results
