"""
primcensus command-line entry point.

    python -m primcensus census --x 100 --q 2 --a 1 --u 2 --format json
    python -m primcensus density --q 2 --a 1 --P 1000000
    python -m primcensus probe --kind lemma33 --p 31
    python -m primcensus verify --suite ramanujan_closed_form

Results go to stdout (or --output); logs go to stderr.
Exit codes: 0 ok, 1 domain/data error, 2 resource error, 3 failed
verification, 64 usage error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from . import env_config
from .core.models import ProbeKind
from .exceptions import EXIT_USAGE
from .service.census_service import q_advisory, run
from .service.models import Command, OutputFormat, RunConfig
from .utils.config_loader import ConfigLoader

logger = logging.getLogger(__name__)


class UsageExitParser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 64 on unparseable flags."""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f'{self.prog}: error: {message}\n')


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--x', type=int, help='census limit, or lower endpoint of (x, 2x]')
    common.add_argument('--q', type=int, default=1, help='modulus of the progression')
    common.add_argument('--a', type=int, help='residue class; defaults to 0 when q = 1')
    common.add_argument('--u', type=int, help='fixed base whose primitive-root primes are counted')
    common.add_argument('--P', dest='truncation_P', type=int, help='Euler-product truncation')
    common.add_argument('--epsilon', type=float, help='exponent saving for probe and error-term bounds')
    common.add_argument('--workers', type=int, help='worker processes (beats PRIMCENSUS_WORKERS)')
    common.add_argument('--format', dest='output_format', choices=[f.value for f in OutputFormat])
    common.add_argument('--output', type=Path, help='write results here instead of stdout')
    common.add_argument('--log-level', help='DEBUG, INFO, WARNING, ...')

    parser = UsageExitParser(
        prog='primcensus',
        description='Primes in arithmetic progressions with a fixed primitive root.',
    )
    sub = parser.add_subparsers(dest='command', required=True)

    sub.add_parser('census', parents=[common], help='pi(x; q, a) and pi_u(x; q, a) with densities')
    sub.add_parser('density', parents=[common], help='truncated density constant A_q')

    decompose = sub.add_parser('decompose', parents=[common], help='M(x) + E(x) over (x, 2x]')
    decompose.add_argument('--blocks', type=int, default=1, help='consecutive dyadic blocks from x')
    decompose.add_argument('--exact', action='store_true', help='also accumulate the terms as fractions')

    probe = sub.add_parser('probe', parents=[common], help='exponential-sum bound probes')
    probe.add_argument('--kind', choices=[k.value for k in ProbeKind], required=True)
    probe.add_argument('--p', type=int, required=True)
    probe.add_argument('--tau', type=int, help='primitive root; defaults to the least one')
    probe.add_argument('--s-samples', dest='s_samples', type=int)

    verify = sub.add_parser('verify', parents=[common], help='run invariant suites')
    verify.add_argument('--suite', dest='suites', action='append', help='suite name; repeatable')

    report = sub.add_parser('report', parents=[common], help='combined desk report for (x, q, a, u)')
    report.add_argument('--b', type=float, help='annotation constant b (b > c + 1)')
    report.add_argument('--c', type=float, help='annotation constant c; sets the q advisory power')

    primes = sub.add_parser('primes', parents=[common], help='prime records up to x, through the cache')
    primes.add_argument('--cache', dest='cache_path', type=Path)

    return parser


def configure_logging(flag: Optional[str]) -> None:
    logging_config = ConfigLoader.get_logging_config()
    level = flag or env_config.PRIMCENSUS_LOG_LEVEL or logging_config.get('level', 'INFO')
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format=logging_config.get('format', '%(asctime)s - %(name)s - %(levelname)s - %(message)s'),
        stream=sys.stderr,
        force=True,
    )


def to_run_config(args: argparse.Namespace) -> RunConfig:
    fields = {
        key: value
        for key, value in vars(args).items()
        if key not in ('output', 'log_level') and value is not None
    }
    if 'output_format' not in fields:
        fields['output_format'] = ConfigLoader.get_output_config().get('default_format', 'table')
    return RunConfig(**fields)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)

    try:
        config = to_run_config(args)
    except ValidationError as e:
        for error in e.errors():
            location = '.'.join(str(part) for part in error['loc'])
            print(f"primcensus: error: {location + ': ' if location else ''}{error['msg']}", file=sys.stderr)
        return EXIT_USAGE

    if config.x is not None and config.command in (Command.CENSUS, Command.DECOMPOSE, Command.REPORT):
        advisory = q_advisory(config.x, config.q, config.c)
        if advisory:
            logger.warning(advisory)

    if args.output is None:
        return run(config, sys.stdout)
    try:
        with open(args.output, 'w', encoding='utf-8', newline='\n') as sink:
            return run(config, sink)
    except OSError as e:
        logger.error(f"Cannot write {args.output}: {e}")
        return 2


if __name__ == '__main__':
    sys.exit(main())
