"""
OutputAdapter: converts engine results into csv / json / table text.

Every command result is first flattened into rows (ordered dicts with a
fixed column list), then rendered:

    csv    header row, reals with 10 significant digits, booleans true/false
    json   same field names, native numbers; one object for single-row
           commands, a list otherwise
    table  pandas ``to_string`` of the csv values

Rendering is a pure function of the rows, so identical results give
byte-identical output whatever the worker count.
"""

import json
import logging
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from ..core.models import (
    PROBE_PARAM_NAMES,
    BrunTitchmarshCheck,
    CensusResult,
    DensityConstant,
    DensityEstimate,
    ErrorTermBoundCheck,
    IntervalDecomposition,
    ProbeReport,
)
from ..utils.config_loader import config_value
from .models import OutputFormat, PrimeCacheEntry

logger = logging.getLogger(__name__)

Row = Dict[str, Any]


class OutputAdapter:
    """Flattens results to rows and renders them."""

    CENSUS_COLUMNS = ['x', 'q', 'a', 'u', 'pi', 'pi_u', 'delta_hat', 'A_q', 'a_u_hat', 'skipped']
    PROBE_COLUMNS = ['p', 'kind', 'param', 'observed', 'bound', 'ratio', 'violation']
    DENSITY_COLUMNS = ['q', 'a', 'truncation_P', 'value', 'tail_bound']
    DECOMPOSE_COLUMNS = ['x', 'q', 'a', 'u', 'prime_count', 'psi_sum', 'main_term', 'error_term', 'residual']
    VERIFY_COLUMNS = ['invariant', 'cases', 'status']
    PRIMES_COLUMNS = ['p', 'tau', 'phi', 'factors']

    def __init__(self, digits: Optional[int] = None):
        self.digits = digits or int(config_value('output_config', 'significant_digits', 10))

    # ------------------------------------------------------------------
    # Row builders
    # ------------------------------------------------------------------

    def census_rows(self, census: CensusResult, density: Optional[DensityEstimate]) -> List[Row]:
        return [{
            'x': census.x,
            'q': census.cls.q,
            'a': census.cls.a,
            'u': census.u,
            'pi': census.pi,
            'pi_u': census.pi_u,
            'delta_hat': self._real(density.delta_hat) if density else None,
            'A_q': self._real(density.A_q) if density else None,
            'a_u_hat': self._real(density.a_u_hat) if density else None,
            'skipped': census.skipped,
        }]

    def probe_rows(self, report: ProbeReport) -> List[Row]:
        names = PROBE_PARAM_NAMES[report.kind]
        return [
            {
                'p': report.p,
                'kind': report.kind.value,
                'param': ';'.join(f'{n}={v}' for n, v in zip(names, sample.params)),
                'observed': self._real(sample.observed),
                'bound': self._real(sample.bound),
                'ratio': self._real(sample.ratio),
                'violation': sample.violation,
            }
            for sample in report.samples
        ]

    def density_rows(self, constant: DensityConstant) -> List[Row]:
        return [{
            'q': constant.q,
            'a': constant.a,
            'truncation_P': constant.truncation_P,
            'value': self._real(constant.value),
            'tail_bound': self._real(constant.tail_bound),
        }]

    def decomposition_rows(self, blocks: Sequence[IntervalDecomposition]) -> List[Row]:
        return [
            {
                'x': d.x,
                'q': d.cls.q,
                'a': d.cls.a,
                'u': d.u,
                'prime_count': d.prime_count,
                'psi_sum': d.psi_sum,
                'main_term': self._real(d.main_term),
                'error_term': self._real(d.error_term),
                'residual': self._real(d.residual),
            }
            for d in blocks
        ]

    def verify_rows(self, results: Sequence[tuple]) -> List[Row]:
        return [{'invariant': name, 'cases': cases, 'status': 'ok'} for name, cases in results]

    def primes_rows(self, entries: Sequence[PrimeCacheEntry]) -> List[Row]:
        return [
            {'p': e.p, 'tau': e.tau, 'phi': e.phi_p_minus_1, 'factors': e.p_minus_1_factors}
            for e in entries
        ]

    def report_sections(
        self,
        census: CensusResult,
        density: Optional[DensityEstimate],
        constant: DensityConstant,
        li_x: float,
        brun_titchmarsh: BrunTitchmarshCheck,
        decomposition: IntervalDecomposition,
        bound_check: ErrorTermBoundCheck,
        annotations: Dict[str, Any],
    ) -> Dict[str, Row]:
        return {
            'census': self.census_rows(census, density)[0],
            'density': {
                **self.density_rows(constant)[0],
                'li_x': self._real(li_x),
            },
            'brun_titchmarsh': {
                'x': brun_titchmarsh.x,
                'lhs': brun_titchmarsh.lhs,
                'rhs': self._real(brun_titchmarsh.rhs),
                'satisfied': brun_titchmarsh.satisfied,
            },
            'decomposition': self.decomposition_rows([decomposition])[0],
            'error_term': {
                'x': bound_check.x,
                'epsilon': self._real(bound_check.epsilon),
                'observed': self._real(bound_check.observed),
                'trivial_bound': self._real(bound_check.trivial_bound),
                'claimed_bound': self._real(bound_check.claimed_bound),
                'ratio': self._real(bound_check.ratio),
                'satisfied': bound_check.satisfied,
            },
            'annotations': {k: self._real(v) if isinstance(v, float) else v for k, v in annotations.items()},
        }

    # ------------------------------------------------------------------
    # Rendering
    # ------------------------------------------------------------------

    def render(self, rows: List[Row], columns: List[str], fmt: OutputFormat, single: bool = False) -> str:
        if fmt == OutputFormat.JSON:
            payload: Any = rows[0] if single and rows else rows
            return json.dumps(payload, indent=2) + '\n'
        df = self._frame(rows, columns)
        if fmt == OutputFormat.CSV:
            return df.to_csv(index=False, lineterminator='\n')
        if df.empty:
            return ' '.join(columns) + '\n'
        return df.to_string(index=False) + '\n'

    def render_sections(self, sections: Dict[str, Row], fmt: OutputFormat) -> str:
        if fmt == OutputFormat.JSON:
            return json.dumps(sections, indent=2) + '\n'
        if fmt == OutputFormat.CSV:
            rows = [
                {'section': name, 'field': key, 'value': value}
                for name, fields in sections.items()
                for key, value in fields.items()
            ]
            return self._frame(rows, ['section', 'field', 'value']).to_csv(index=False, lineterminator='\n')

        blocks = []
        for name, fields in sections.items():
            df = self._frame([{'field': k, 'value': v} for k, v in fields.items()], ['field', 'value'])
            blocks.append(f'[{name}]\n' + df.to_string(index=False))
        return '\n\n'.join(blocks) + '\n'

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    def _real(self, value: float) -> float:
        """Round to the configured significant digits (round-half-even on the decimal expansion)."""
        return float(format(value, f'.{self.digits}g'))

    def _cell(self, value: Any) -> str:
        if value is None:
            return ''
        if isinstance(value, bool):
            return 'true' if value else 'false'
        if isinstance(value, float):
            return format(value, f'.{self.digits}g')
        return str(value)

    def _frame(self, rows: List[Row], columns: List[str]) -> pd.DataFrame:
        return pd.DataFrame(
            [[self._cell(row.get(c)) for c in columns] for row in rows],
            columns=columns,
            dtype=str,
        )
