import pytest

from slotopt.bench import (
    ExperimentConfig, QueryRecord, aggregate, csv_columns, format_duration, render_tables,
    rows_from_csv, rows_to_csv, run_bench, run_queries,
)
from slotopt.instances import ConfigError

ONE_CELL = dict(setups=("I",), scenarios=("non-optimized",), vehicles=(3,), fills=(0.9,),
                instances=2, pool=200, probes=2)


def test_one_cell_gives_one_row():
    rows = run_bench(ExperimentConfig(**ONE_CELL))
    assert len(rows) == 1
    row = rows[0]
    assert (row.setup, row.scenario, row.vehicles, row.fill, row.queries) == ("I", "non-optimized", 3, 0.9, 4)
    assert all(row.combined >= v for v in row.slots.values())


def test_combined_is_union():
    config = ExperimentConfig(**ONE_CELL)
    for r in run_queries(config):
        assert r.combined >= max(r.slots.values())
        assert r.combined <= r.n_windows
        assert r.combined <= sum(r.slots.values())


def test_csv_columns_and_round_trip():
    config = ExperimentConfig(**ONE_CELL)
    rows = run_bench(config)
    text = rows_to_csv(rows)
    header = text.splitlines()[0].split(",")
    assert header == csv_columns()
    assert {"avg_p_hat", "time_simple", "time_tsptw", "time_ans", "slots_simple",
            "slots_tsptw", "slots_ans", "slots_combined"} <= set(header)
    back = rows_from_csv(text)
    assert rows_to_csv(back) == text


def test_report_text_has_every_row_kind():
    rec = QueryRecord("II", "optimized", 20, 0.85, 0, 0, 600, {"simple": 8, "tsptw": 9, "ans": 10},
                      {"simple": 0.001, "tsptw": 144.469, "ans": 1.308}, 10, 10)
    config = ExperimentConfig(setups=("II",), scenarios=("optimized",), vehicles=(20,), fills=(0.85,))
    text = render_tables(aggregate(config, [rec]))
    for label in ("Avg. p-hat", "Run time simple", "Run time tsptw", "Run time ans",
                  "Slots simple", "Slots tsptw", "Slots ans", "Slots combined"):
        assert label in text
    assert "2:24.469" in text and "1.308" in text and ".001" in text


def test_duration_format():
    assert format_duration(0.0012) == ".001"
    assert format_duration(1.3084) == "1.308"
    assert format_duration(144.469) == "2:24.469"
    assert format_duration(0) == ".000"


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(setups=("IV",))
    with pytest.raises(ConfigError):
        ExperimentConfig(methods=("milp",))
    with pytest.raises(ConfigError):
        ExperimentConfig(fills=(1.5,))
    full = ExperimentConfig.full()
    assert full.instances == 100 and full.vehicles == (20, 40, 60) and full.pool == 5000
    assert ExperimentConfig().instances == 10 and ExperimentConfig().vehicles == (5, 10)


def test_parallel_matches_serial():
    base = ExperimentConfig(**ONE_CELL)
    serial = rows_to_csv(run_bench(base), timings=False)
    parallel = rows_to_csv(run_bench(ExperimentConfig(**ONE_CELL, jobs=2)), timings=False)
    assert serial == parallel
