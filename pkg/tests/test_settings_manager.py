"""RunConfig files and the SettingsManager cache."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import config
from errors import InvalidParameters, ParseError
from settings_manager import RunConfig, SettingsManager, parse_key_values

safe_text = st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789_./-", max_size=20)
positive = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False, allow_infinity=False)


class TestRunConfig:
    @settings(max_examples=100, deadline=None)
    @given(
        algorithm=st.sampled_from(config.ALGORITHMS),
        graph=safe_text,
        n=st.integers(1, 10_000),
        seed=st.integers(0, 2**63),
        a=st.none() | positive,
        eps=positive,
        p=st.none() | st.integers(2, 50),
        t=st.none() | st.integers(1, 50),
        split=st.sampled_from(config.MIS_SPLITS),
    )
    def test_text_round_trip(self, algorithm, graph, n, seed, a, eps, p, t, split):
        cfg = RunConfig(algorithm=algorithm, graph=graph, n=n, seed=seed, a=a, eps=eps, p=p, t=t, split=split)
        assert RunConfig.from_text(cfg.to_text()) == cfg

    def test_none_written_as_empty_value(self):
        text = RunConfig(a=None).to_text()
        assert "a=\n" in text

    def test_unknown_key_rejected(self):
        with pytest.raises(ParseError):
            RunConfig.from_text("colour=red\n")

    def test_bad_number_rejected(self):
        with pytest.raises(ParseError):
            RunConfig.from_text("n=sixty\n")

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"algorithm": "bfs"},
            {"split": "thirds"},
            {"eps": 0.0},
            {"eps_h": -1.0},
            {"workers": 0},
            {"algorithm": "color-a2", "p": 7},
            {"algorithm": "mis", "split": "recursive", "t": 3},
            {"algorithm": "forest-decomp", "t": 2},
        ],
    )
    def test_validate(self, kwargs):
        with pytest.raises(InvalidParameters):
            RunConfig(**kwargs).validate()


class TestParseKeyValues:
    def test_comments_and_blanks(self):
        text = "# sweep\n\nn = 32\nalgorithm=mis\ngraph=a=b.txt\n"
        assert parse_key_values(text) == {"n": "32", "algorithm": "mis", "graph": "a=b.txt"}

    def test_line_without_equals(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_key_values("n=4\nbroken\n")


class TestSettingsManager:
    def test_categories_and_flat_keys(self, tmp_path):
        path = tmp_path / "cliquesim.conf"
        path.write_text("algorithm=mis\nn=40\nbench.jobs=4\nbench.out=sweep.csv\n", encoding="utf-8")
        sm = SettingsManager(path)
        assert sm.get_category("bench") == {"jobs": "4", "out": "sweep.csv"}
        assert sm.get_int("bench", "jobs") == 4
        assert sm.get_float("", "n") == 40.0
        assert sm.get("bench", "missing", "x") == "x"
        assert sm.flat() == {"algorithm": "mis", "n": "40"}

    def test_run_config_overrides(self, tmp_path):
        path = tmp_path / "cliquesim.conf"
        path.write_text("algorithm=mis\nn=40\nsplit=recursive\n", encoding="utf-8")
        cfg = SettingsManager(path).run_config(n=100, a=None)
        assert cfg.algorithm == "mis"
        assert cfg.n == 100
        assert cfg.split == "recursive"

    def test_save_and_reload(self, tmp_path):
        sm = SettingsManager(tmp_path / "new.conf")
        sm.set("", "eps", 0.5)
        sm.set("bench", "jobs", 2)
        sm.save()
        again = SettingsManager(tmp_path / "new.conf")
        assert again.get_float("", "eps") == 0.5
        assert again.get_int("bench", "jobs") == 2

    def test_integer_lists_and_bad_values(self, tmp_path):
        path = tmp_path / "bench.conf"
        path.write_text("bench.n=16, 32 64\nbench.jobs=four\n", encoding="utf-8")
        sm = SettingsManager(path)
        assert sm.get_ints("bench", "n", []) == [16, 32, 64]
        assert sm.get_ints("bench", "seeds", [0]) == [0]
        with pytest.raises(ParseError, match="bench.jobs"):
            sm.get_int("bench", "jobs")

    def test_stored_run_config_reloads_identically(self, tmp_path):
        cfg = RunConfig(algorithm="color-oa", family="cycle", n=30, a=16.0, p=7, eps_h=1.5)
        sm = SettingsManager()
        sm.store_run_config(cfg)
        sm.save(tmp_path / "run.conf")
        assert SettingsManager(tmp_path / "run.conf").run_config() == cfg

    def test_save_without_path(self):
        with pytest.raises(InvalidParameters):
            SettingsManager().save()
