"""
Prime cache: PrimeRecords persisted as plain CSV.

Columns are ``p,tau,phi,factors``; ``factors`` is the factorization of p-1
as a ``;``-separated list of ``prime^exp`` (exponent 1 omitted, empty for p=2).
Rows are validated on read and reported by 1-based data-row number.
"""

import logging
from pathlib import Path
from typing import List, Sequence, Union

import pandas as pd
from pydantic import ValidationError

from ..core.models import PrimeRecord
from ..exceptions import DataError, ResourceError
from .models import PrimeCacheEntry

logger = logging.getLogger(__name__)

CACHE_COLUMNS = ['p', 'tau', 'phi', 'factors']


def cache_write(entries: Sequence[Union[PrimeCacheEntry, PrimeRecord]], path: Union[str, Path]) -> Path:
    """Write entries to ``path`` in the order given.

    Args:
        entries: Cache entries or prime records; records are converted.
        path: Target CSV file, overwritten.

    Returns:
        The path written.

    Raises:
        ResourceError: the file cannot be written.
    """
    path = Path(path)
    rows = []
    for entry in entries:
        if isinstance(entry, PrimeRecord):
            entry = PrimeCacheEntry.from_record(entry)
        rows.append([entry.p, entry.tau, entry.phi_p_minus_1, entry.p_minus_1_factors])

    df = pd.DataFrame(rows, columns=CACHE_COLUMNS)
    try:
        df.to_csv(path, index=False, lineterminator='\n')
    except OSError as e:
        raise ResourceError(f"failed to write prime cache {path}: {e}") from e
    logger.info(f"Wrote {len(df)} prime records to {path}")
    return path


def cache_read(path: Union[str, Path]) -> List[PrimeCacheEntry]:
    """Read and validate a prime cache.

    An empty file reads as no entries.

    Raises:
        ResourceError: the file cannot be opened.
        DataError: a row is malformed or violates the PrimeRecord invariants.
    """
    path = Path(path)
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        logger.warning(f"Prime cache {path} is empty")
        return []
    except pd.errors.ParserError as e:
        raise DataError(f"unparseable prime cache {path}: {e}") from e
    except OSError as e:
        raise ResourceError(f"failed to read prime cache {path}: {e}") from e

    if list(df.columns) != CACHE_COLUMNS:
        raise DataError(f"expected columns {','.join(CACHE_COLUMNS)}, got {','.join(map(str, df.columns))}")

    entries = []
    for row_number, row in enumerate(df.itertuples(index=False), start=1):
        try:
            entries.append(PrimeCacheEntry(
                p=int(row.p),
                tau=int(row.tau),
                phi_p_minus_1=int(row.phi),
                p_minus_1_factors=row.factors,
            ))
        except ValidationError as e:
            raise DataError(e.errors()[0]["msg"], row=row_number) from e
        except ValueError as e:
            raise DataError(str(e), row=row_number) from e

    logger.info(f"Read {len(entries)} prime records from {path}")
    return entries
