"""Shared helpers for the simulator.

Provides:
- Logging setup (console plus optional activity log file)
- Integer math used by round-count formulas and set systems
- Tabular export (CSV / Excel) through pandas
- JSON helpers for stats records

Note:
- Excel export needs openpyxl. If it is not installed a clear error is raised.
"""

from __future__ import annotations

import json
import logging
import math
from pathlib import Path
from typing import Any, Sequence

import pandas as pd

import config
from errors import GraphIoError

# Excel (optional)
try:
    import openpyxl  # type: ignore  # noqa: F401

    OPENPYXL_AVAILABLE = True
except Exception:
    OPENPYXL_AVAILABLE = False


LOG_FORMAT = "%(asctime)s [%(levelname)-8s] [%(name)s] %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


# ------------------------------------------------------------
# 1) Logging
# ------------------------------------------------------------


def setup_logging(verbose: bool = False, log_file: str | Path | None = None) -> None:
    """Configure the root logger.

    Args:
        verbose: DEBUG level when true, INFO otherwise.
        log_file: optional activity log; ``"default"`` selects ``logs/activity.log``.
    """

    handlers: list[logging.Handler] = [logging.StreamHandler()]
    if log_file is not None:
        path = config.get_activity_log_path() if str(log_file) == "default" else Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(path, encoding="utf-8"))

    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=LOG_FORMAT,
        datefmt=LOG_DATE_FORMAT,
        handlers=handlers,
        force=True,
    )


# ------------------------------------------------------------
# 2) Integer math
# ------------------------------------------------------------


def ceil_log2(x: float) -> int:
    """Return ceil(log2 x) for x >= 1, and 0 below that."""

    if x <= 1:
        return 0
    if isinstance(x, int) or float(x).is_integer():
        return (int(x) - 1).bit_length()
    return math.ceil(math.log2(x))


def word_bits(n: int) -> int:
    """Bits of one vertex ID in an n-vertex clique (at least 1)."""

    return max(1, ceil_log2(n))


def is_prime(x: int) -> bool:
    if x < 2:
        return False
    if x % 2 == 0:
        return x == 2
    f = 3
    while f * f <= x:
        if x % f == 0:
            return False
        f += 2
    return True


def next_prime(x: int) -> int:
    """Smallest prime >= x."""

    c = max(2, x)
    while not is_prime(c):
        c += 1
    return c


def iroot_ceil(m: int, k: int) -> int:
    """Smallest integer r with r**k >= m."""

    if m <= 1:
        return 1
    r = max(1, int(round(m ** (1.0 / k))))
    while r**k < m:
        r += 1
    while r > 1 and (r - 1) ** k >= m:
        r -= 1
    return r


# ------------------------------------------------------------
# 3) Export
# ------------------------------------------------------------


def export_table(rows: Sequence[dict[str, Any]], columns: Sequence[str], filename: str | Path) -> Path:
    """Write rows to CSV or XLSX depending on the file suffix.

    Args:
        rows: one dict per row; missing keys become empty cells.
        columns: column order (the header is always written).
        filename: ``.csv`` or ``.xlsx`` path.

    Example:
        >>> export_table([{"n": 8}], ["n"], "out.csv")
    """

    path = Path(filename)
    df = pd.DataFrame(list(rows), columns=list(columns))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if path.suffix.lower() == ".xlsx":
            if not OPENPYXL_AVAILABLE:
                raise RuntimeError("Excel export requires openpyxl")
            with pd.ExcelWriter(path, engine="openpyxl") as writer:
                df.to_excel(writer, index=False, sheet_name="Runs")
        else:
            df.to_csv(path, index=False)
    except OSError as e:
        raise GraphIoError(f"cannot write {path}: {e}") from e
    return path


def append_csv_row(row: dict[str, Any], columns: Sequence[str], filename: str | Path) -> None:
    """Append one row, writing the header first when the file is new."""

    path = Path(filename)
    df = pd.DataFrame([row], columns=list(columns))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        new = not path.exists() or path.stat().st_size == 0
        df.to_csv(path, mode="a", header=new, index=False)
    except OSError as e:
        raise GraphIoError(f"cannot write {path}: {e}") from e


def write_json(data: dict[str, Any], filename: str | Path) -> None:
    path = Path(filename)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as e:
        raise GraphIoError(f"cannot write {path}: {e}") from e