"""
Census Service Module
=====================

Service layer wrapper that executes one validated RunConfig:

1. Resolve the worker count (flag > PRIMCENSUS_WORKERS > Config.yml > 1)
2. Build the residue class and dispatch to the engine for the command
3. Flatten results through OutputAdapter and write them to the sink
4. Map errors to exit codes

Usage:
    config = RunConfig(command="census", x=100, q=2, a=1, u=2, output_format="json")
    exit_code = run(config, sys.stdout)
"""

import logging
import math
from typing import Any, Dict, List, Optional, TextIO

from .. import env_config
from ..core import census, density, expsums, ntheory
from ..core.models import ResidueClass
from ..exceptions import DomainError, PrimCensusError, exit_code_for
from ..utils.config_loader import ConfigLoader
from .adapter import OutputAdapter
from .cache import cache_read, cache_write
from .models import Command, PrimeCacheEntry, RunConfig
from .verification import run_suites

logger = logging.getLogger(__name__)


def resolve_workers(flag: Optional[int]) -> int:
    """Worker count by precedence: flag, then environment, then Config.yml, then 1."""
    if flag is not None:
        return flag
    if env_config.PRIMCENSUS_WORKERS:
        try:
            workers = int(env_config.PRIMCENSUS_WORKERS)
        except ValueError as e:
            raise DomainError(f'PRIMCENSUS_WORKERS must be an integer, got {env_config.PRIMCENSUS_WORKERS!r}') from e
        if workers < 1:
            raise DomainError(f'PRIMCENSUS_WORKERS must be >= 1, got {workers}')
        return workers
    return max(1, int(ConfigLoader.get_census_config().get('workers', 1)))


def q_advisory(x: int, q: int, power: Optional[float] = None) -> Optional[str]:
    """A warning message when q exceeds (ln x)^power, else None."""
    if power is None:
        power = float(ConfigLoader.get_census_config().get('q_advisory_power', 3))
    ceiling = math.log(x) ** power
    if q > ceiling:
        return f'q={q} exceeds (ln x)^{power:g} = {ceiling:.1f}; the error terms are vacuous in this regime'
    return None


class CensusService:
    """Executes commands and renders their results."""

    def __init__(self, adapter: Optional[OutputAdapter] = None):
        self.adapter = adapter or OutputAdapter()

    def execute(self, config: RunConfig) -> str:
        """
        Run one command and render its result.

        Args:
            config: Validated run configuration; ``config.command`` picks the handler.

        Returns:
            The rendered csv, json or table text, ready to write to stdout.

        Raises:
            DomainError: Input outside an engine's domain.
            DataError: A corrupt prime cache.
            ResourceError: A ceiling exceeded or a cache that cannot be read or written.
            VerificationError: A failing suite under ``verify``.
        """
        workers = resolve_workers(config.workers)
        logger.info(f"Running {config.command.value} with {workers} worker(s)")
        handler = {
            Command.CENSUS: self._census,
            Command.DENSITY: self._density,
            Command.DECOMPOSE: self._decompose,
            Command.PROBE: self._probe,
            Command.VERIFY: self._verify,
            Command.REPORT: self._report,
            Command.PRIMES: self._primes,
        }[config.command]
        return handler(config, workers)

    # ------------------------------------------------------------------
    # Commands
    # ------------------------------------------------------------------

    def _census(self, config: RunConfig, workers: int) -> str:
        cls = ResidueClass.build(config.q, config.a)
        result = census.count_pr_primes(config.x, cls, config.u, workers=workers)
        estimate = density.empirical_density(result, config.truncation_P) if result.pi else None
        rows = self.adapter.census_rows(result, estimate)
        return self.adapter.render(rows, OutputAdapter.CENSUS_COLUMNS, config.output_format, single=True)

    def _density(self, config: RunConfig, workers: int) -> str:
        constant = density.truncated_Aq(config.q, config.a, config.truncation_P)
        rows = self.adapter.density_rows(constant)
        return self.adapter.render(rows, OutputAdapter.DENSITY_COLUMNS, config.output_format, single=True)

    def _decompose(self, config: RunConfig, workers: int) -> str:
        cls = ResidueClass.build(config.q, config.a)
        if config.blocks > 1:
            blocks = census.dyadic_census(config.x, config.blocks, cls, config.u, workers=workers)
        else:
            blocks = [census.interval_decomposition(config.x, cls, config.u, exact=config.exact, workers=workers)]
        rows = self.adapter.decomposition_rows(blocks)
        return self.adapter.render(
            rows, OutputAdapter.DECOMPOSE_COLUMNS, config.output_format, single=len(rows) == 1
        )

    def _probe(self, config: RunConfig, workers: int) -> str:
        report = expsums.run_probe(
            config.kind,
            config.p,
            tau=config.tau,
            epsilon=config.epsilon,
            s_samples=config.s_samples,
            workers=workers,
        )
        rows = self.adapter.probe_rows(report)
        return self.adapter.render(rows, OutputAdapter.PROBE_COLUMNS, config.output_format)

    def _verify(self, config: RunConfig, workers: int) -> str:
        results = run_suites(config.suites)
        rows = self.adapter.verify_rows(results)
        return self.adapter.render(rows, OutputAdapter.VERIFY_COLUMNS, config.output_format)

    def _report(self, config: RunConfig, workers: int) -> str:
        cls = ResidueClass.build(config.q, config.a)
        x, half = config.x, config.x // 2

        result = census.count_pr_primes(x, cls, config.u, workers=workers)
        estimate = density.empirical_density(result, config.truncation_P) if result.pi else None
        constant = density.truncated_Aq(cls.q, cls.a, config.truncation_P)
        li_x = density.log_integral(x)
        bt = census.brun_titchmarsh_check(max(half, 3), cls)
        decomposition = census.interval_decomposition(half, cls, config.u, workers=workers)
        bound_check = census.error_term_bound_check(half, cls, config.u, config.epsilon, workers=workers)

        annotations: Dict[str, Any] = {
            'predicted_count': density.predicted_count(x, cls.q, cls.a, config.truncation_P),
            'q_within_advisory': q_advisory(x, cls.q, config.c) is None,
        }
        if config.b is not None:
            annotations['b'] = config.b
        if config.c is not None:
            annotations['c'] = config.c

        sections = self.adapter.report_sections(
            result, estimate, constant, li_x, bt, decomposition, bound_check, annotations
        )
        return self.adapter.render_sections(sections, config.output_format)

    def _primes(self, config: RunConfig, workers: int) -> str:
        entries: List[PrimeCacheEntry]
        if config.cache_path is not None and config.cache_path.exists():
            entries = [e for e in cache_read(config.cache_path) if e.p <= config.x]
            if not entries or entries[-1].p < int(ntheory.sieve_primes(config.x)[-1]):
                entries = self._build_entries(config)
        else:
            entries = self._build_entries(config)
        rows = self.adapter.primes_rows(entries)
        return self.adapter.render(rows, OutputAdapter.PRIMES_COLUMNS, config.output_format)

    def _build_entries(self, config: RunConfig) -> List[PrimeCacheEntry]:
        entries = [PrimeCacheEntry.from_record(r) for r in ntheory.prime_table(config.x)]
        if config.cache_path is not None:
            cache_write(entries, config.cache_path)
        return entries


def run(config: RunConfig, sink: TextIO, service: Optional[CensusService] = None) -> int:
    """Execute ``config``, write the result to ``sink`` and return the exit code.

    Errors are logged and mapped: DomainError/DataError 1, ResourceError 2,
    VerificationError 3. Nothing is written to ``sink`` on failure.

    Args:
        config: Validated run configuration.
        sink: Text stream for the rendered output.
        service: Service to run with; a default CensusService otherwise.

    Returns:
        0 on success, else the exit code for the error raised.
    """
    service = service or CensusService()
    try:
        output = service.execute(config)
    except PrimCensusError as e:
        code = exit_code_for(e)
        logger.error(f"{config.command.value} failed ({type(e).__name__}): {e}")
        return code
    sink.write(output)
    return 0
