"""
Dataset and report files.

Dataset layout:

    # foldkit v1 pL=<int> pR=<int> response=<cont|cat>
    y,x_1,...,x_{pL*pR}

one row per item, predictors in vec (column-major) order, floats with 17
significant digits.
"""

import json
import logging
import re
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
import pandas as pd

from foldkit.core.exceptions import DatasetParseError, StorageError
from foldkit.core.utils import atomic_write_text
from foldkit.linalg.tensor_ops import mat_batch
from foldkit.moments.schemas import SampleSet

logger = logging.getLogger(__name__)

HEADER_PATTERN = re.compile(r"^#\s*foldkit\s+v1\s+pL=(\d+)\s+pR=(\d+)\s+response=(cont|cat)\s*$")
RESPONSE_CODES = {"cont": "continuous", "cat": "categorical"}
FLOAT_FORMAT = "%.17g"


def _read_text(path: Union[str, Path]) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise StorageError(f"cannot read {path}: {e}") from e


def read_dataset(path: Union[str, Path]) -> SampleSet:
    """
    Parse a dataset file into a SampleSet.

    Raises:
        DatasetParseError: Bad header, wrong field count or a non-numeric field (with line and column)
        StorageError: The file cannot be read
    """
    lines = _read_text(path).splitlines()
    if not lines:
        raise DatasetParseError("empty dataset file", line=1)

    header = HEADER_PATTERN.match(lines[0].strip())
    if header is None:
        raise DatasetParseError(
            "header must read '# foldkit v1 pL=<int> pR=<int> response=<cont|cat>'", line=1, column=1
        )
    pl, pr = int(header.group(1)), int(header.group(2))
    response_kind = RESPONSE_CODES[header.group(3)]
    width = 1 + pl * pr

    rows = []
    for line_no, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != width:
            column = min(len(fields), width) + 1
            raise DatasetParseError(f"row has {len(fields)} fields, expected {width}", line=line_no, column=column)
        rows.append(fields)
    if len(rows) < 2:
        raise DatasetParseError(f"dataset needs at least 2 rows, found {len(rows)}", line=len(lines))

    raw = pd.DataFrame(rows, dtype=str)
    values = raw.apply(lambda col: pd.to_numeric(col.str.strip(), errors="coerce"))
    bad = ~np.isfinite(values.to_numpy(dtype=float))
    if bad.any():
        row, column = np.argwhere(bad)[0]
        raise DatasetParseError(
            f"field '{raw.iat[row, column]}' is not a finite number", line=int(row) + 2, column=int(column) + 1
        )

    data = values.to_numpy(dtype=float)
    logger.info(f"📥 Read {data.shape[0]} items ({pl}x{pr}, {response_kind}) from {path}")
    return SampleSet(X=mat_batch(data[:, 1:], pl), y=data[:, 0], response_kind=response_kind)


def dataset_text(samples: SampleSet) -> str:
    code = "cat" if samples.response_kind == "categorical" else "cont"
    frame = pd.DataFrame(np.column_stack([samples.y, samples.vectors()]))
    body = frame.to_csv(header=False, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return f"# foldkit v1 pL={samples.pl} pR={samples.pr} response={code}\n{body}"


def write_dataset(samples: SampleSet, path: Union[str, Path]) -> Path:
    """Write a SampleSet atomically in the dataset layout."""
    return atomic_write_text(path, dataset_text(samples))


def read_json(path: Union[str, Path]) -> Any:
    """
    Raises:
        DatasetParseError: Invalid JSON (with line and column)
    """
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DatasetParseError(f"invalid JSON in {path}: {e.msg}", line=e.lineno, column=e.colno) from e


def json_text(payload: Any) -> str:
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def write_json(payload: Any, path: Optional[Union[str, Path]] = None) -> Optional[Path]:
    """Write JSON to `path` atomically, or to stdout when no path is given."""
    text = json_text(payload)
    if path is None:
        print(text, end="")
        return None
    return atomic_write_text(path, text)


def write_frame(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    """Write a DataFrame as CSV (17 significant digits) atomically."""
    return atomic_write_text(path, frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n"))
