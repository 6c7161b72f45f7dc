"""SQLite run history for cliquesim.

One table, ``runs``, holds a row per algorithm execution: the parameters, the
round accounting and whether the oracle accepted the output.

Key features:
- Parameterized queries only
- sqlite3.Row so SELECT queries return dictionaries
- Timestamps stored as text in config.DATETIME_FORMAT
"""

from __future__ import annotations

import json
import logging
import sqlite3
from contextlib import closing, contextmanager
from datetime import datetime
from pathlib import Path
from typing import Any, Iterator, Optional

import pandas as pd

import config
from errors import GraphIoError
from utils import export_table

logger = logging.getLogger(__name__)

RUN_COLUMNS: list[str] = [
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
    "total_bits",
    "max_message_bits",
    "palette_or_mis",
    "verified",
]


def _now_dt_str() -> str:
    return datetime.now().strftime(config.DATETIME_FORMAT)


def _row_to_dict(row: sqlite3.Row | None) -> dict[str, Any] | None:
    if row is None:
        return None
    return dict(row)


class ResultsDatabase:
    """Run history stored in a single SQLite file."""

    def __init__(self, db_path: str | Path | None = None) -> None:
        if db_path is None:
            config.init_directories()
            db_path = config.get_results_db_path()
        self.db_path = Path(db_path)
        self.create_tables()

    # ------------------------------
    # Connection Methods
    # ------------------------------

    def get_connection(self) -> sqlite3.Connection:
        try:
            conn = sqlite3.connect(str(self.db_path))
        except sqlite3.Error as e:
            raise GraphIoError(f"cannot open results database {self.db_path}: {e}") from e
        conn.row_factory = sqlite3.Row
        return conn

    @contextmanager
    def session(self) -> Iterator[sqlite3.Connection]:
        """Connection that commits on success and is always closed."""

        with closing(self.get_connection()) as conn, conn:
            yield conn

    def create_tables(self) -> None:
        with self.session() as conn:
            conn.execute(
                """
                CREATE TABLE IF NOT EXISTS runs (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    algorithm TEXT NOT NULL,
                    n INTEGER NOT NULL,
                    m INTEGER NOT NULL,
                    a REAL,
                    eps REAL,
                    p INTEGER,
                    k INTEGER,
                    t INTEGER,
                    rounds INTEGER NOT NULL,
                    lenzen_calls INTEGER DEFAULT 0,
                    total_bits INTEGER DEFAULT 0,
                    max_message_bits INTEGER DEFAULT 0,
                    palette_or_mis INTEGER,
                    verified INTEGER DEFAULT 0,
                    stats_json TEXT,
                    created_at TEXT
                )
                """
            )
            conn.execute("CREATE INDEX IF NOT EXISTS idx_runs_algorithm ON runs(algorithm)")

    # ------------------------------
    # Runs
    # ------------------------------

    def record_run(self, record: dict[str, Any], stats: dict[str, Any] | None = None) -> int:
        """Insert one run; missing columns are stored as NULL. Returns the row id."""

        values = [record.get(c) for c in RUN_COLUMNS]
        values[RUN_COLUMNS.index("verified")] = int(bool(record.get("verified")))
        payload = json.dumps(stats or {}, sort_keys=True, default=str)
        placeholders = ", ".join("?" for _ in range(len(RUN_COLUMNS) + 2))
        with self.session() as conn:
            cur = conn.execute(
                f"INSERT INTO runs ({', '.join(RUN_COLUMNS)}, stats_json, created_at) VALUES ({placeholders})",
                (*values, payload, _now_dt_str()),
            )
            run_id = int(cur.lastrowid)
        logger.debug("recorded run %d (%s, n=%s)", run_id, record.get("algorithm"), record.get("n"))
        return run_id

    def get_run(self, run_id: int) -> dict[str, Any] | None:
        """One run with its stats decoded, or None."""

        with self.session() as conn:
            row = conn.execute("SELECT * FROM runs WHERE id = ?", (run_id,)).fetchone()
        out = _row_to_dict(row)
        if out is not None:
            out["stats"] = json.loads(out.pop("stats_json") or "{}")
        return out

    def list_runs(self, algorithm: Optional[str] = None, limit: Optional[int] = None) -> list[dict[str, Any]]:
        query = "SELECT * FROM runs"
        params: list[Any] = []
        if algorithm:
            query += " WHERE algorithm = ?"
            params.append(algorithm)
        query += " ORDER BY id"
        if limit:
            query += " LIMIT ?"
            params.append(int(limit))
        with self.session() as conn:
            rows = conn.execute(query, params).fetchall()
        return [dict(r) for r in rows]

    def count_runs(self) -> int:
        with self.session() as conn:
            return int(conn.execute("SELECT COUNT(*) FROM runs").fetchone()[0])

    def to_dataframe(self, algorithm: Optional[str] = None) -> pd.DataFrame:
        rows = self.list_runs(algorithm)
        return pd.DataFrame(rows, columns=["id", *RUN_COLUMNS, "stats_json", "created_at"])

    def export_runs(self, filename: str | Path, algorithm: Optional[str] = None) -> Path:
        """Write the run history to .csv or .xlsx."""

        df = self.to_dataframe(algorithm).drop(columns=["stats_json"])
        return export_table(df.to_dict("records"), ["id", *RUN_COLUMNS, "created_at"], filename)
