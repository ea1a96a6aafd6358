"""Writers for tabular results (delimited text and JSON)."""

from __future__ import annotations

import json
import sys
from collections.abc import Mapping
from pathlib import Path
from typing import Any, TextIO

import numpy as np
import pandas as pd

from .config import get_settings
from .errors import InputFormatError, ParameterError

FORMATS = ("csv", "json")


def _jsonable(value: Any) -> Any:
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return str(value)


def render_table(
    frame: pd.DataFrame,
    fmt: str = "csv",
    meta: Mapping[str, Any] | None = None,
    precision: int | None = None,
) -> str:
    """Render ``frame`` as CSV (header row included) or as a JSON document.

    The JSON document is ``{"meta": {...}, "rows": [...]}``; missing values
    become ``null`` in JSON and empty fields in CSV.
    """
    if fmt not in FORMATS:
        raise ParameterError(f"output format must be one of {FORMATS}, got {fmt!r}")
    digits = get_settings().precision if precision is None else precision
    if fmt == "csv":
        return str(frame.to_csv(index=False, float_format=f"%.{digits}f", lineterminator="\n"))
    rounded = frame.copy()
    for column in rounded.columns:
        if pd.api.types.is_float_dtype(rounded[column]):
            rounded[column] = rounded[column].round(digits)
    rows = json.loads(rounded.to_json(orient="records", double_precision=15))
    payload = {"meta": _jsonable(dict(meta or {})), "rows": rows}
    return json.dumps(payload, indent=2) + "\n"


def write_table(
    frame: pd.DataFrame,
    target: str | Path | TextIO | None = None,
    fmt: str = "csv",
    meta: Mapping[str, Any] | None = None,
    precision: int | None = None,
) -> None:
    """Write ``frame`` to a path, an open stream, or standard output when ``target`` is None."""
    text = render_table(frame, fmt=fmt, meta=meta, precision=precision)
    if target is None:
        sys.stdout.write(text)
    elif isinstance(target, (str, Path)):
        try:
            Path(target).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise InputFormatError(f"cannot write {target}: {exc}") from exc
    else:
        target.write(text)


def read_table(source: str | Path | TextIO, required: tuple[str, ...]) -> pd.DataFrame:
    """Read a delimited file and check that it has the ``required`` header columns."""
    try:
        frame = pd.read_csv(source, dtype=str, keep_default_na=False, skipinitialspace=True)
    except FileNotFoundError as exc:
        raise InputFormatError(f"no such file: {source}") from exc
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise InputFormatError(f"cannot read {source}: {exc}") from exc
    frame.columns = [str(c).strip() for c in frame.columns]
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise InputFormatError(
            f"{source}: missing column(s) {', '.join(missing)}; "
            f"expected header {','.join(required)}"
        )
    return frame
