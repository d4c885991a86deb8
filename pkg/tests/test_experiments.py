import json
import math
import random

import pytest

from camw import cli
from camw.domain import QueueModel, Scheduler, TieBreak
from camw.experiments import (
    ROW_COLUMNS,
    SUMMARY_COLUMNS,
    ConfigError,
    MissingPresetData,
    Verdict,
    check_acceptance,
    check_queue2_averages,
    derive_seed,
    parse_config,
    preset_spec,
    read_summary,
    render_csv,
    run_scenarios,
    summarize,
)

MINIMAL = {"model": "QueueI", "lambda1": 0.18, "lambda2": 0.12, "rho": 0.7, "horizon": 500, "seed": 3}


def small(**extra):
    return parse_config(json.dumps({**MINIMAL, **extra}))


def test_minimal_config_gets_defaults():
    spec = small()
    assert spec.base.n == 2
    assert spec.base.tie_break is TieBreak.LOWEST_PHASE_INDEX
    assert spec.base.estimator_params().p1 == pytest.approx(0.6)
    assert spec.rhos == (0.7,) and spec.replications == 1


def test_rate_overflow_is_rejected():
    with pytest.raises(ConfigError, match="λ1\\+λ2 exceeds 1"):
        parse_config(json.dumps({**MINIMAL, "lambda1": 0.8, "lambda2": 0.4}))


@pytest.mark.parametrize(
    "patch, field",
    [
        ({"colour": 1}, "colour"),
        ({"rho": 1.5}, "rho"),
        ({"n": 0}, "'n'"),
        ({"model": "QueueIII"}, "model"),
        ({"prior": [0.3, 0.3]}, "prior"),
    ],
)
def test_config_errors_name_the_field(patch, field):
    with pytest.raises(ConfigError, match=field):
        small(**patch)


def test_syntax_errors_report_line():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config('{"model": "QueueI",\n "lambda1": }')


def test_fig5_preset():
    spec = preset_spec("fig5")
    assert (spec.base.lambda1, spec.base.lambda2, spec.base.n) == (0.18, 0.12, 2)
    assert spec.rhos == (0.4, 0.7, 1.0)
    assert spec.schedulers == (Scheduler.CAMW, Scheduler.MAX_WEIGHT)
    assert spec.replications >= 10


def test_load_sweeps_split_classes():
    spec = preset_spec("fig6")
    for l1, l2 in spec.class_rates():
        assert l1 == pytest.approx(1.5 * l2)
    assert all(l1 == pytest.approx(l2) for l1, l2 in preset_spec("fig8").class_rates())
    assert preset_spec("fig7").base.model is QueueModel.QUEUE_II


def test_explicit_rho_narrows_preset():
    assert parse_config("", preset="fig7", rho=0.9).rhos == (0.9,)


def test_seeds_are_distinct_and_scheduler_free():
    spec = parse_config(json.dumps({**MINIMAL, "rhos": [0.1, 0.5], "replications": 3, "schedulers": ["CAMW", "MaxWeight"]}))
    seeds = {(k.rho, k.replicate): k.seed for k, _ in spec.runs()}
    assert len(set(seeds.values())) == 6
    by_sched = {}
    for k, _ in spec.runs():
        by_sched.setdefault((k.rho, k.replicate), set()).add(k.seed)
    assert all(len(s) == 1 for s in by_sched.values())
    assert derive_seed(0, 0.1, 0.2, 0.2, 0) != derive_seed(1, 0.1, 0.2, 0.2, 0)


def test_rows_and_summary_shape():
    output = run_scenarios(small(horizon=250))
    assert [r["slot"] for r in output.rows] == [100, 200, 250]
    assert output.rows_csv().splitlines()[0] == ",".join(ROW_COLUMNS)
    assert output.summary_csv().splitlines()[0] == ",".join(SUMMARY_COLUMNS)
    # a single replicate has no spread
    row = output.summary_csv().splitlines()[1].split(",")
    assert row[SUMMARY_COLUMNS.index("mean_queue_std")] == ""


def test_csv_is_byte_identical():
    spec = small(replications=2, schedulers=["CAMW", "MaxWeight"])
    assert run_scenarios(spec).rows_csv().encode() == run_scenarios(spec).rows_csv().encode()
    assert "\r" not in run_scenarios(spec).summary_csv()


def test_summary_is_permutation_invariant():
    results = run_scenarios(small(replications=4)).results
    shuffled = results[:]
    random.Random(0).shuffle(shuffled)
    assert render_csv(summarize(results), SUMMARY_COLUMNS) == render_csv(summarize(shuffled), SUMMARY_COLUMNS)


def test_writes_rows_summary_and_traces(tmp_path):
    out = tmp_path / "nested" / "runs.csv"
    run_scenarios(small(horizon=120), out=out, trace=True, write=True)
    assert out.exists() and (tmp_path / "nested" / "runs_summary.csv").exists()
    traces = list((tmp_path / "nested" / "runs_traces").iterdir())
    assert len(traces) == 1 and len(traces[0].read_text().splitlines()) == 121
    rows = read_summary(tmp_path / "nested" / "runs_summary.csv")
    assert rows[0]["replications"] == 1 and math.isnan(rows[0]["mean_queue_std"])


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="cannot write"):
        run_scenarios(small(horizon=10), out=blocker / "runs.csv", write=True)


def fake_fig7(camw9):
    base = {"preset": "fig7", "model": "QueueII", "lambda1": 0.2, "lambda2": 0.2, "n": 2, "replications": 10}
    values = {("MaxWeight", 0.1): 10.5, ("MaxWeight", 0.9): 10.5, ("CAMW", 0.1): 9.0, ("CAMW", 0.9): camw9}
    return [{**base, "scheduler": s, "rho": r, "mean_queue": q} for (s, r), q in values.items()]


def test_queue2_check_flags_ordering_violation():
    assert check_queue2_averages(fake_fig7(4.4)).passed
    bad = check_queue2_averages(fake_fig7(11.0))
    assert not bad.passed and "violated" in bad.line()


def test_missing_preset_data():
    with pytest.raises(MissingPresetData):
        check_acceptance(fake_fig7(4.4), [])


def test_oracle_failure_is_flagged():
    class Report:
        name, passed = "oracle", False

        def line(self):
            return "[FAIL] oracle"

    with pytest.raises(MissingPresetData):
        check_acceptance([], [Report()])
    assert Verdict("oracle", False).line().startswith("[FAIL]")


# --- command line ------------------------------------------------------------

def test_cli_run_prints_summary(tmp_path, capsys):
    config = tmp_path / "scenario.json"
    config.write_text(json.dumps({**MINIMAL, "horizon": 200}), encoding="utf-8")
    code = cli.main(["run", "--config", str(config), "--seed", "5", "--out", str(tmp_path / "o.csv")])
    assert code == 0
    assert capsys.readouterr().out.startswith("preset,scheduler")
    assert (tmp_path / "o_summary.csv").exists()


def test_cli_default_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("CAMW_OUTPUT_DIR", str(tmp_path))
    config = tmp_path / "s.json"
    config.write_text(json.dumps({**MINIMAL, "horizon": 50, "name": "tiny"}))
    assert cli.main(["run", "--config", str(config)]) == 0
    assert (tmp_path / "tiny.csv").exists()


def test_cli_config_error_exit_code(tmp_path, capsys):
    config = tmp_path / "bad.json"
    config.write_text(json.dumps({**MINIMAL, "lambda1": 0.8, "lambda2": 0.4}))
    assert cli.main(["run", "--config", str(config)]) == 2
    assert "exceeds 1" in capsys.readouterr().err


def test_cli_accept_without_presets(tmp_path):
    output = run_scenarios(small(horizon=50), out=tmp_path / "x.csv", write=True)
    assert output.summary
    assert cli.main(["accept", "--in", str(tmp_path / "x_summary.csv"), "--skip-oracles"]) == 2


def test_cli_verify(capsys):
    assert cli.main(["verify"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 3 and all(line.startswith("[PASS]") for line in lines)
