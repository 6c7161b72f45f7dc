"""Application configuration for the Congested Clique simulator.

This module centralizes:
- Model constants (message budget, Lenzen charge, round cap)
- Algorithm defaults
- Output schemas (CSV columns, stats fields)
- Filesystem paths and exit codes

All paths are based on the application root directory and are created on demand.
"""

from __future__ import annotations

from pathlib import Path

# ------------------------------
# Application Settings
# ------------------------------

APP_NAME: str = "cliquesim"
VERSION: str = "1.0.0"

# ------------------------------
# Paths Configuration
# ------------------------------

BASE_DIR: Path = Path(__file__).resolve().parent

DATA_DIR: Path = BASE_DIR / "data"
LOGS_DIR: Path = BASE_DIR / "logs"
RESULTS_DIR: Path = DATA_DIR / "results"

RESULTS_DB_NAME: str = "runs.db"
ACTIVITY_LOG_NAME: str = "activity.log"

DATETIME_FORMAT: str = "%Y-%m-%d %H:%M:%S"

# ------------------------------
# Round Model
# ------------------------------

# Per-message budget is C_MSG * ceil(log2 n) bits: two IDs plus a tag.
C_MSG: int = 4

# Rounds charged for one invocation of Lenzen's routing scheme.
LENZEN_CHARGE: int = 2

# Protocols abort after ROUND_CAP_FACTOR * n rounds.
ROUND_CAP_FACTOR: int = 64

# ------------------------------
# Algorithm Defaults
# ------------------------------

# Residual graphs handed to Sparse-Partition may hold at most C_SPARSE * n edges.
C_SPARSE: int = 8

# Epsilon used inside H-partitions; decoupled from palette exponents.
EPS_H: float = 2.0

DEFAULT_EPS: float = 2.0

# Exhaustive Nash-Williams oracle limit (2^14 subsets).
EXACT_ARBORICITY_MAX_N: int = 14

ALGORITHMS: tuple[str, ...] = (
    "forest-decomp",
    "color-a2",
    "color-a2eps",
    "color-a1eps",
    "color-oa",
    "mis",
    "universal",
)

GRAPH_FAMILIES: tuple[str, ...] = (
    "forest_union",
    "grid",
    "cycle",
    "star",
    "complete",
    "random_degenerate",
)

MIS_SPLITS: tuple[str, ...] = ("recursive", "sqrt")

# ------------------------------
# Output Schemas
# ------------------------------

BENCH_COLUMNS: list[str] = [
    "algorithm",
    "n",
    "m",
    "a",
    "eps",
    "p",
    "k",
    "t",
    "rounds",
    "lenzen_calls",
    "palette_or_mis",
    "verified",
]

STATS_FIELDS: list[str] = [
    "algorithm",
    "n",
    "m",
    "a",
    "rounds",
    "lenzen_calls",
    "total_bits",
    "max_message_bits",
    "palette_or_mis",
]

# ------------------------------
# Exit Codes
# ------------------------------

EXIT_OK: int = 0
EXIT_VERIFY_FAILED: int = 1
EXIT_INVALID_INPUT: int = 2
EXIT_PROTOCOL_VIOLATION: int = 3


def init_directories() -> None:
    """Create all necessary application directories.

    This function is safe to call multiple times.
    """

    DATA_DIR.mkdir(parents=True, exist_ok=True)
    RESULTS_DIR.mkdir(parents=True, exist_ok=True)
    LOGS_DIR.mkdir(parents=True, exist_ok=True)


def get_results_db_path() -> Path:
    """Return the default path of the SQLite run history."""

    DATA_DIR.mkdir(parents=True, exist_ok=True)
    return DATA_DIR / RESULTS_DB_NAME


def get_activity_log_path() -> Path:
    """Return the activity log path, creating the logs directory."""

    LOGS_DIR.mkdir(parents=True, exist_ok=True)
    return LOGS_DIR / ACTIVITY_LOG_NAME
