"""SQLite run history."""

from __future__ import annotations

import sqlite3

import pandas as pd
import pytest

import config
import database
from database import RUN_COLUMNS, ResultsDatabase


@pytest.fixture
def db(tmp_path):
    return ResultsDatabase(tmp_path / "runs.db")


def record(**overrides):
    row = {
        "algorithm": "forest-decomp",
        "n": 64,
        "m": 120,
        "a": 2.0,
        "eps": 2.0,
        "rounds": 7,
        "lenzen_calls": 1,
        "palette_or_mis": 8,
        "verified": True,
    }
    row.update(overrides)
    return row


class TestResultsDatabase:
    def test_record_and_get(self, db):
        run_id = db.record_run(record(), {"peeling_rounds": 2})
        row = db.get_run(run_id)
        assert row["algorithm"] == "forest-decomp"
        assert row["verified"] == 1
        assert row["p"] is None
        assert row["stats"] == {"peeling_rounds": 2}
        assert row["created_at"]

    def test_missing_run(self, db):
        assert db.get_run(999) is None

    def test_list_filters_and_limits(self, db):
        db.record_run(record())
        db.record_run(record(algorithm="mis", verified=False))
        db.record_run(record(algorithm="mis"))
        assert db.count_runs() == 3
        mis_rows = db.list_runs("mis")
        assert [r["verified"] for r in mis_rows] == [0, 1]
        assert len(db.list_runs(limit=2)) == 2

    def test_dataframe_columns(self, db):
        db.record_run(record())
        df = db.to_dataframe()
        assert isinstance(df, pd.DataFrame)
        assert list(df.columns[1 : 1 + len(RUN_COLUMNS)]) == RUN_COLUMNS
        assert df.loc[0, "rounds"] == 7

    def test_export_csv(self, db, tmp_path):
        db.record_run(record())
        db.record_run(record(algorithm="color-a2", palette_or_mis=65))
        path = db.export_runs(tmp_path / "out" / "runs.csv", algorithm="color-a2")
        df = pd.read_csv(path)
        assert len(df) == 1
        assert df.loc[0, "palette_or_mis"] == 65

    def test_every_connection_is_closed(self, tmp_path, monkeypatch):
        opened = []
        connect = sqlite3.connect

        def tracking_connect(*args, **kwargs):
            conn = connect(*args, **kwargs)
            opened.append(conn)
            return conn

        monkeypatch.setattr(database.sqlite3, "connect", tracking_connect)
        db = ResultsDatabase(tmp_path / "closed.db")
        run_id = db.record_run(record())
        db.get_run(run_id)
        db.list_runs()
        db.count_runs()
        assert len(opened) == 5
        for conn in opened:
            with pytest.raises(sqlite3.ProgrammingError):
                conn.execute("SELECT 1")

    def test_failed_insert_rolls_back(self, db):
        with pytest.raises(sqlite3.Error):
            db.record_run(record(n=None))
        assert db.count_runs() == 0

    def test_default_location_under_data_dir(self):
        db = ResultsDatabase()
        assert db.db_path == config.DATA_DIR / config.RESULTS_DB_NAME
        assert db.db_path.exists()
