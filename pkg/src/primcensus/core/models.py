"""
Pydantic Domain Models
======================

Immutable value types shared by the number-theory engines.

Models:
    Factorization       : prime/exponent pairs of a positive integer
    PrimeRecord         : a prime with the factorization of p-1, phi(p-1) and its least primitive root
    PsiMethod           : evaluation strategy for the primitive-element indicator
    PsiEvaluation       : one evaluation of the indicator, exact and/or numeric
    ComplexValue        : a finite complex number
    ProbeKind           : which exponential-sum estimate a probe checks
    ProbeSample         : one observation against a claimed bound
    ProbeReport         : all observations for one prime
    DensityConstant     : truncated Euler product with its tail bound
    ResidueClass        : the progression a mod q
    CensusResult        : prime counts and totient sums up to x
    DensityEstimate     : empirical density and correction-factor estimate
    IntervalDecomposition: main/error split of the indicator sum over (x, 2x]
    BrunTitchmarshCheck : interval count against 3x/(phi(q) log x)
    ErrorTermBoundCheck : |E(x)| against the claimed x^(1-eps)/(phi(q) log x)
"""

import math
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..exceptions import DomainError


# ==============================================================================
# ntheory-core
# ==============================================================================

class Factorization(BaseModel):
    """Prime factorization, primes strictly ascending. The empty list factors 1."""
    model_config = ConfigDict(frozen=True)

    factors: Tuple[Tuple[int, int], ...] = Field(default=(), description="(prime, exponent) pairs")

    @field_validator('factors')
    @classmethod
    def factors_must_be_valid(cls, v: Tuple[Tuple[int, int], ...]) -> Tuple[Tuple[int, int], ...]:
        from .ntheory import is_probable_prime

        previous = 1
        for prime, exponent in v:
            if exponent < 1:
                raise ValueError(f'exponent of {prime} must be >= 1, got {exponent}')
            if prime <= previous:
                raise ValueError('primes must be strictly increasing')
            if not is_probable_prime(prime):
                raise ValueError(f'{prime} is not prime')
            previous = prime
        return v

    @property
    def value(self) -> int:
        """The factored integer."""
        return math.prod(prime ** exponent for prime, exponent in self.factors)

    @property
    def primes(self) -> List[int]:
        return [prime for prime, _ in self.factors]

    def as_dict(self) -> dict:
        return dict(self.factors)


class PrimeRecord(BaseModel):
    """A prime p with the data every downstream sum needs."""
    model_config = ConfigDict(frozen=True)

    p: int = Field(ge=2)
    p_minus_1_factors: Factorization
    phi_p_minus_1: int = Field(ge=1, description="Euler totient of p-1")
    tau: int = Field(ge=1, description="least primitive root mod p")

    @model_validator(mode='after')
    def record_must_be_consistent(self) -> 'PrimeRecord':
        from .ntheory import euler_phi, is_primitive_root, is_probable_prime

        if not is_probable_prime(self.p):
            raise ValueError(f'{self.p} is not prime')
        if self.p_minus_1_factors.value != self.p - 1:
            raise ValueError(f'factors multiply to {self.p_minus_1_factors.value}, expected {self.p - 1}')
        if euler_phi(self.p_minus_1_factors) != self.phi_p_minus_1:
            raise ValueError(f'phi(p-1) mismatch for p={self.p}')
        if not 1 <= self.tau <= max(1, self.p - 1):
            raise ValueError(f'tau={self.tau} outside [1, p-1]')
        if not is_primitive_root(self.tau, self.p):
            raise ValueError(f'tau={self.tau} is not a primitive root mod {self.p}')
        return self


# ==============================================================================
# charfun
# ==============================================================================

class PsiMethod(str, Enum):
    """How the primitive-element indicator was evaluated."""
    DIVISOR = "divisor"
    EXPSUM_EXACT = "expsum_exact"
    EXPSUM_NUMERIC = "expsum_numeric"


class PsiEvaluation(BaseModel):
    """One evaluation of the indicator of primitive elements mod p."""
    model_config = ConfigDict(frozen=True)

    p: int
    u: int
    tau: int
    value_exact: Optional[int] = None
    value_numeric: Optional[float] = None
    method: PsiMethod

    @field_validator('value_exact')
    @classmethod
    def value_exact_must_be_indicator(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v not in (0, 1):
            raise ValueError('value_exact must be 0 or 1')
        return v

    @model_validator(mode='after')
    def values_must_agree(self) -> 'PsiEvaluation':
        if self.value_exact is not None and self.value_numeric is not None:
            if abs(self.value_numeric - self.value_exact) >= 1e-6:
                raise ValueError(
                    f'numeric value {self.value_numeric} disagrees with exact value {self.value_exact}'
                )
        return self


# ==============================================================================
# expsums
# ==============================================================================

class ComplexValue(BaseModel):
    """A finite complex number."""
    model_config = ConfigDict(frozen=True)

    re: float
    im: float

    @field_validator('re', 'im')
    @classmethod
    def component_must_be_finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError('components must be finite')
        return v

    @property
    def magnitude(self) -> float:
        return math.hypot(self.re, self.im)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def from_complex(cls, z: complex) -> 'ComplexValue':
        return cls(re=z.real, im=z.imag)


class ProbeKind(str, Enum):
    """Which exponential-sum estimate a probe checks."""
    LEMMA31 = "lemma31"   # coprime-index sum against p^(1-eps)
    LEMMA32 = "lemma32"   # s-independence against p^(1/2) log^2 p
    LEMMA33 = "lemma33"   # coprime unity sum against (p-1) log p / t
    THM32 = "thm32"       # incomplete sum against p^(1/2) log p


PROBE_PARAM_NAMES = {
    ProbeKind.LEMMA31: ("s",),
    ProbeKind.LEMMA32: ("s",),
    ProbeKind.LEMMA33: ("t",),
    ProbeKind.THM32: ("s", "x"),
}


class ProbeSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    params: Tuple[int, ...]
    observed: float = Field(ge=0)
    bound: float = Field(gt=0)
    ratio: float = Field(ge=0)

    @property
    def violation(self) -> bool:
        return self.ratio > 1


class ProbeReport(BaseModel):
    """Observed magnitudes against a claimed bound for one prime."""
    model_config = ConfigDict(frozen=True)

    p: int
    kind: ProbeKind
    samples: Tuple[ProbeSample, ...] = ()
    max_ratio: float = 0.0
    violations: Tuple[Tuple[int, ...], ...] = ()
    epsilon: Optional[float] = None

    @model_validator(mode='after')
    def summary_must_match_samples(self) -> 'ProbeReport':
        expected_max = max((s.ratio for s in self.samples), default=0.0)
        if self.max_ratio != expected_max:
            raise ValueError(f'max_ratio {self.max_ratio} != max over samples {expected_max}')
        expected_violations = tuple(s.params for s in self.samples if s.violation)
        if tuple(sorted(self.violations)) != tuple(sorted(expected_violations)):
            raise ValueError('violations must be exactly the samples with ratio > 1')
        return self

    @classmethod
    def from_samples(
        cls,
        p: int,
        kind: ProbeKind,
        samples: List[ProbeSample],
        epsilon: Optional[float] = None,
    ) -> 'ProbeReport':
        ordered = tuple(sorted(samples, key=lambda s: s.params))
        return cls(
            p=p,
            kind=kind,
            samples=ordered,
            max_ratio=max((s.ratio for s in ordered), default=0.0),
            violations=tuple(s.params for s in ordered if s.violation),
            epsilon=epsilon,
        )

    def merge(self, other: 'ProbeReport') -> 'ProbeReport':
        """Combine two partial scans of the same prime and kind.

        Samples are re-sorted by parameter, so the merge is associative and
        commutative and the result does not depend on how the scan was split.
        """
        if (self.p, self.kind, self.epsilon) != (other.p, other.kind, other.epsilon):
            raise DomainError(
                f'cannot merge probe reports for ({self.p}, {self.kind.value}) and ({other.p}, {other.kind.value})'
            )
        return ProbeReport.from_samples(
            self.p, self.kind, list(self.samples) + list(other.samples), self.epsilon
        )


# ==============================================================================
# density
# ==============================================================================

class DensityConstant(BaseModel):
    """Truncated Euler product for the progression a mod q."""
    model_config = ConfigDict(frozen=True)

    q: int = Field(ge=1)
    a: int
    truncation_P: int = Field(ge=2, description="largest prime bound included")
    value: float = Field(gt=0, le=1)
    tail_bound: float = Field(ge=0, description="bound on relative truncation error")


class DensityEstimate(BaseModel):
    """Empirical density of primes with primitive root u in a progression."""
    model_config = ConfigDict(frozen=True)

    x: int
    q: int
    a: int
    u: int
    delta_hat: float = Field(ge=0, le=1)
    a_u_hat: float = Field(ge=0, description="estimate only; the correction factor has no closed form here")
    A_q: float


# ==============================================================================
# census
# ==============================================================================

class ResidueClass(BaseModel):
    """The progression a mod q. For q = 1 the only class is a = 0."""
    model_config = ConfigDict(frozen=True)

    q: int = Field(ge=1)
    a: int = Field(ge=0)

    @model_validator(mode='after')
    def class_must_be_reduced_and_coprime(self) -> 'ResidueClass':
        if self.a >= self.q:
            raise ValueError(f'a={self.a} must satisfy 0 <= a < q={self.q}')
        if self.q > 1 and math.gcd(self.a, self.q) != 1:
            raise ValueError(f'gcd(a={self.a}, q={self.q}) must be 1')
        return self

    @classmethod
    def build(cls, q: int, a: int) -> 'ResidueClass':
        """Reduce ``a`` mod ``q`` and validate, raising DomainError on failure."""
        if q < 1:
            raise DomainError(f'modulus q must be >= 1, got {q}')
        try:
            return cls(q=q, a=a % q)
        except ValueError as e:
            raise DomainError(f'invalid residue class {a} mod {q}: {e}') from e

    def contains(self, n: int) -> bool:
        return n % self.q == self.a


class CensusResult(BaseModel):
    """Counts and totient sums over primes p <= x in the class a mod q."""
    model_config = ConfigDict(frozen=True)

    x: int
    cls: ResidueClass
    u: int
    pi: int = Field(ge=0)
    pi_u: int = Field(ge=0)
    sum_phi_ratio: float = Field(ge=0, description="sum of phi(p-1)/(p-1)")
    sum_phi_over_p: float = Field(ge=0, description="sum of phi(p-1)/p")
    skipped: int = Field(ge=0, description="primes dividing u, excluded from pi_u")

    @model_validator(mode='after')
    def pi_u_must_not_exceed_pi(self) -> 'CensusResult':
        if self.pi_u + self.skipped > self.pi:
            raise ValueError(f'pi_u={self.pi_u} plus skipped={self.skipped} exceeds pi={self.pi}')
        return self


class IntervalDecomposition(BaseModel):
    """Indicator sum over (x, 2x] split into main and error terms."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    x: int
    cls: ResidueClass
    u: int
    prime_count: int = Field(ge=0, description="primes in (x, 2x] in the class, p not dividing u")
    psi_sum: int = Field(ge=0)
    main_term: float
    error_term: float
    main_term_exact: Optional[Fraction] = None
    error_term_exact: Optional[Fraction] = None

    @property
    def residual(self) -> float:
        return self.psi_sum - self.main_term - self.error_term


class BrunTitchmarshCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: int
    cls: ResidueClass
    lhs: int
    rhs: float
    satisfied: bool


class ErrorTermBoundCheck(BaseModel):
    """|E(x)| against the trivial bound and the claimed power saving."""
    model_config = ConfigDict(frozen=True)

    x: int
    cls: ResidueClass
    u: int
    epsilon: float
    observed: float
    trivial_bound: float
    claimed_bound: float
    ratio: float
    satisfied: bool
