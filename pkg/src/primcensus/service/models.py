"""
Pydantic Data Models for the Service Layer
==========================================

Models:
    Command         : CLI command enum
    OutputFormat    : csv / json / table
    RunConfig       : one validated command invocation
    PrimeCacheEntry : one row of the prime cache
"""

import re
from enum import Enum
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.models import Factorization, PrimeRecord, ProbeKind


class Command(str, Enum):
    CENSUS = "census"
    DENSITY = "density"
    DECOMPOSE = "decompose"
    PROBE = "probe"
    VERIFY = "verify"
    REPORT = "report"
    PRIMES = "primes"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"
    TABLE = "table"


# Parameters each command cannot run without
REQUIRED_PARAMS = {
    Command.CENSUS: ("x", "u"),
    Command.DENSITY: (),
    Command.DECOMPOSE: ("x", "u"),
    Command.PROBE: ("p", "kind"),
    Command.VERIFY: (),
    Command.REPORT: ("x", "u"),
    Command.PRIMES: ("x",),
}


class RunConfig(BaseModel):
    """A single command invocation with its parameters.

    ``b`` and ``c`` are report annotations only; nothing is computed from them
    except the q <= (ln x)^c advisory.
    """
    model_config = ConfigDict(
        json_schema_extra={
            "example": {"command": "census", "x": 100, "q": 2, "a": 1, "u": 2, "output_format": "json"}
        }
    )

    command: Command
    x: Optional[int] = Field(default=None, description="census limit or interval lower endpoint")
    q: int = Field(default=1, ge=1)
    a: Optional[int] = Field(default=None, description="residue; defaults to 0 when q = 1")
    u: Optional[int] = None
    p: Optional[int] = Field(default=None, ge=2, description="prime for probes")
    tau: Optional[int] = Field(default=None, ge=1, description="primitive root for probes")
    kind: Optional[ProbeKind] = None
    epsilon: Optional[float] = Field(default=None, gt=0, lt=1)
    s_samples: Optional[int] = Field(default=None, ge=1)
    truncation_P: Optional[int] = Field(default=None, ge=2)
    blocks: int = Field(default=1, ge=1, description="dyadic blocks for decompose")
    exact: bool = False
    workers: Optional[int] = Field(default=None, ge=1)
    cache_path: Optional[Path] = None
    output_format: OutputFormat = OutputFormat.TABLE
    suites: Optional[List[str]] = None
    b: Optional[float] = None
    c: Optional[float] = Field(default=None, gt=0)

    @field_validator('x')
    @classmethod
    def x_must_be_at_least_two(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 2:
            raise ValueError(f'x must be >= 2, got {v}')
        return v

    @field_validator('u')
    @classmethod
    def u_must_be_nonzero(cls, v: Optional[int]) -> Optional[int]:
        if v == 0:
            raise ValueError('u must be nonzero')
        return v

    @model_validator(mode='after')
    def params_must_match_command(self) -> 'RunConfig':
        missing = [name for name in REQUIRED_PARAMS[self.command] if getattr(self, name) is None]
        if missing:
            raise ValueError(f"command '{self.command.value}' requires {', '.join('--' + m for m in missing)}")
        if self.a is None:
            if self.q != 1 and self.command in (Command.CENSUS, Command.DENSITY, Command.DECOMPOSE, Command.REPORT):
                raise ValueError(f'--a is required when q={self.q}')
            self.a = 0
        if self.command == Command.REPORT and self.x < 4:
            raise ValueError('report needs x >= 4 so that x/2 >= 2')
        if self.b is not None and self.c is not None and not self.b > self.c + 1:
            raise ValueError(f'annotation constants need b > c + 1, got b={self.b}, c={self.c}')
        return self


_FACTOR_TOKEN = re.compile(r'^(\d+)(?:\^(\d+))?$')


def flatten_factors(f: Factorization) -> str:
    """``2^2;5`` style; the empty string for 1."""
    return ';'.join(f'{p}^{e}' if e > 1 else str(p) for p, e in f.factors)


def parse_factors(text: str) -> Factorization:
    pairs = []
    for token in filter(None, text.split(';')):
        match = _FACTOR_TOKEN.match(token.strip())
        if match is None:
            raise ValueError(f'malformed factor token {token!r}')
        pairs.append((int(match.group(1)), int(match.group(2) or 1)))
    return Factorization(factors=tuple(pairs))


class PrimeCacheEntry(BaseModel):
    """Flattened PrimeRecord as stored in the cache CSV."""
    model_config = ConfigDict(frozen=True)

    p: int
    tau: int
    phi_p_minus_1: int
    p_minus_1_factors: str = Field(description="';'-separated prime^exp list")

    @model_validator(mode='after')
    def entry_must_be_valid_record(self) -> 'PrimeCacheEntry':
        self.to_record()
        return self

    def to_record(self) -> PrimeRecord:
        return PrimeRecord(
            p=self.p,
            p_minus_1_factors=parse_factors(self.p_minus_1_factors),
            phi_p_minus_1=self.phi_p_minus_1,
            tau=self.tau,
        )

    @classmethod
    def from_record(cls, record: PrimeRecord) -> 'PrimeCacheEntry':
        return cls(
            p=record.p,
            tau=record.tau,
            phi_p_minus_1=record.phi_p_minus_1,
            p_minus_1_factors=flatten_factors(record.p_minus_1_factors),
        )
