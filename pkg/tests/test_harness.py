import json
import math
from pathlib import Path

import pytest
from sqlalchemy.pool import StaticPool
from sqlmodel import Session, SQLModel, create_engine, select

from app.core.errors import ConfigError
from app.harness.config_file import build_config, merge_layers, parse_config_text
from app.harness.experiment import (
    attack_contrast,
    reduced_message_count,
    run_experiment,
    run_trials,
    summary_path_for,
    sweep,
    trace_experiment_trial,
)
from app.harness.presets import preset
from app.harness.statistics import (
    calibrated_threshold,
    load_pilot,
    prefix_suffix_ok,
    push_sound,
    read_records,
    read_trace,
    standard_error,
    summarize,
    verify_summary,
)
from app.harness.trial import SKIPPED, build_codebook_for, run_trial
from app.models.channel_models import TRACE_COLUMNS
from app.models.experiment_models import (
    CSV_COLUMNS,
    ExperimentConfig,
    ExperimentRun,
    TrialRecord,
)


def small(**overrides) -> ExperimentConfig:
    values = dict(n=64, p=0.25, epsilon=0.15, num_messages=16, trials=12, seed=3)
    values.update(overrides)
    return ExperimentConfig(**values)


# ── config ──


def test_config_defaults_and_seed():
    config = small()
    assert config.effective_code_seed == 3
    assert small(code_seed=9).effective_code_seed == 9
    assert config.code_epsilon() == 0.15


@pytest.mark.parametrize(
    "bad",
    [
        {"strategy": "bogus"},
        {"strategy": "random"},
        {"strategy": "prefix", "strategy_params": {"q": 0.5}},
        {"kind": "attack", "p": 0.3, "delta": 0.3},
        {"kind": "attack"},
        {"epsilon": -0.1},
        {"trials": 0},
        {"colour": "blue"},
    ],
)
def test_invalid_configs(bad):
    with pytest.raises(ConfigError):
        build_config({"n": 64, "p": 0.25}, bad)


def test_attack_code_epsilon():
    config = build_config(preset("attack"))
    assert config.code_epsilon() == pytest.approx(0.25)
    assert config.strategy_params["upper"] == 8


def test_config_file_layers():
    file_layer = parse_config_text(
        """
        # small random run
        n=64
        p=0.3
        messages=8
        strategy=random
        strategy.q=0.5
        """
    )
    config = build_config(preset("stochastic"), file_layer, {"p": 0.2, "trials": None})
    assert config.n == 64
    assert config.p == 0.2
    assert config.num_messages == 8
    assert config.trials == 500
    assert config.strategy == "random"
    assert config.strategy_params == {"q": 0.5}


def test_switching_strategy_drops_old_params():
    merged = merge_layers(preset("attack"), {"strategy": "prefix"})
    assert "strategy_params" not in merged
    assert build_config(merged).strategy == "prefix"


def test_config_text_errors():
    with pytest.raises(ConfigError):
        parse_config_text("n 64")
    with pytest.raises(ConfigError):
        parse_config_text("=3")
    with pytest.raises(ConfigError):
        preset("nope")


# ── trials ──


def test_trial_replays_in_isolation():
    config = small()
    cb = build_codebook_for(config)
    records = run_trials(cb, config)
    assert [r.trial_id for r in records] == list(range(12))
    assert run_trial(cb, config, 7) == records[7]


def test_experiment_is_deterministic():
    a = run_experiment(small(strategy="random", strategy_params={"q": 0.3}))
    b = run_experiment(small(strategy="random", strategy_params={"q": 0.3}))
    assert a.records == b.records
    assert a.summary == b.summary


def test_seed_changes_records():
    a = run_experiment(small())
    b = run_experiment(small(seed=4, code_seed=3))
    assert [r.message for r in a.records] != [r.message for r in b.records]


def test_parallel_matches_sequential():
    config = small(trials=8)
    assert run_experiment(config).records == run_experiment(small(trials=8, workers=2)).records


def test_zero_noise_decodes_every_trial():
    config = ExperimentConfig(
        n=1024, p=0.25, epsilon=0.15, num_messages=8, trials=20, zero_noise=True
    )
    out = run_experiment(config)
    assert all(r.noise_weight == 0 for r in out.records)
    assert out.summary.successes == 20
    assert out.summary.success_rate == 1.0
    assert out.summary.outcome_counts == {"correct": 20}
    assert out.summary.max_list_size == 1


STRATEGY_GRID = [
    ("null", {}),
    ("prefix", {}),
    ("random", {"q": 0.3}),
    ("random", {"q": 1.0}),
    ("wait_push", {"wait1_length": 8, "upper": 8, "lower": 2}),
]


@pytest.mark.slow
def test_budget_and_prefix_suffix_hold_over_ten_thousand_trials():
    total = 0
    for i, (strategy, params) in enumerate(STRATEGY_GRID):
        for encoder in ("stochastic", "deterministic"):
            config = small(
                n=128,
                trials=1000,
                seed=10 + i,
                strategy=strategy,
                strategy_params=params,
                delta=0.1,
                encoder_kind=encoder,
                decode=False,
            )
            out = run_experiment(config)
            s = out.summary
            total += s.trials
            assert s.max_erasures <= s.budget
            assert s.prefix_suffix_violations == 0
            assert all(r.tau is not None for r in out.records)
            if strategy != "wait_push":
                assert s.overrides == 0
    assert total == 10_000


def test_prefix_strategy_spends_whole_budget():
    out = run_experiment(small(n=256, trials=5))
    assert {r.erasures_used for r in out.records} == {64}
    # tau = budget + tau target
    assert {r.tau for r in out.records} == {64 + 173}


def test_deterministic_encoder_has_no_noise_column():
    out = run_experiment(small(encoder_kind="deterministic", trials=3))
    assert all(r.noise_weight is None for r in out.records)
    assert out.summary.mean_noise_weight is None


# ── records & summaries ──


def _record(**overrides) -> TrialRecord:
    values = dict(
        trial_id=0,
        message=3,
        noise_weight=2,
        erasures_used=4,
        tau=10,
        list_size=1,
        outcome="3",
        suffix_unerased=5,
        consistent_codewords=1,
    )
    values.update(overrides)
    return TrialRecord(**values)


def test_record_row_format():
    row = _record(attack_success=True, wall_time=0.25).to_row()
    assert len(row) == len(CSV_COLUMNS)
    as_dict = dict(zip(CSV_COLUMNS, row))
    assert as_dict["attack_success"] == "1"
    assert as_dict["wall_time"] == "0.250000"
    assert as_dict["plausible_message"] == ""
    assert as_dict["outcome"] == "3"


def test_summary_counts():
    records = [
        _record(trial_id=0),
        _record(trial_id=1, outcome="2"),
        _record(trial_id=2, outcome="error_no_condorcet"),
        _record(trial_id=3, outcome=SKIPPED, list_size=None),
    ]
    s = summarize(
        records, kind="simulate", n=16, p=0.25, epsilon=0.25, num_messages=4, budget=4
    )
    assert s.trials == 4
    assert s.decoded_trials == 3
    assert s.successes == 1
    assert s.success_rate == pytest.approx(1 / 3)
    assert s.outcome_counts == {
        "correct": 1,
        "error_no_condorcet": 1,
        SKIPPED: 1,
        "wrong": 1,
    }
    assert s.success_se == pytest.approx(standard_error(1, 3))


def test_prefix_suffix_check():
    assert prefix_suffix_ok(_record(tau=14, suffix_unerased=2), n=16, epsilon=0.25)
    assert not prefix_suffix_ok(_record(tau=15, suffix_unerased=1), n=16, epsilon=0.25)
    assert not prefix_suffix_ok(_record(tau=None), n=16, epsilon=0.25)


def test_push_soundness_rule():
    base = dict(attack_phase_reached="push", noise_weight=None, plausible_message=2)
    assert not push_sound(_record(consistent_codewords=1, **base))
    assert push_sound(_record(consistent_codewords=2, **base))
    assert push_sound(_record(consistent_codewords=1, budget_overrides=1, **base))
    assert push_sound(_record(consistent_codewords=1, attack_phase_reached="error1"))


def test_csv_output_and_verification(tmp_path):
    csv_path = tmp_path / "runs" / "sim.csv"
    out = run_experiment(small(output_path=str(csv_path)))
    assert out.csv_path == csv_path
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "# erasim-records schema=1"
    assert lines[1] == ",".join(CSV_COLUMNS)
    assert len(lines) == 2 + 12
    assert read_records(csv_path) == out.records
    assert verify_summary(csv_path, summary_path_for(csv_path)) == []


def test_csv_is_byte_identical_across_runs(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_experiment(small(output_path=str(a)))
    run_experiment(small(output_path=str(b)))
    assert a.read_bytes() == b.read_bytes()


def test_tampered_summary_is_caught(tmp_path):
    csv_path = tmp_path / "sim.csv"
    run_experiment(small(output_path=str(csv_path)))
    summary_path = summary_path_for(csv_path)
    data = json.loads(summary_path.read_text())
    data["successes"] += 1
    summary_path.write_text(json.dumps(data))
    assert verify_summary(csv_path, summary_path) == ["successes"]


def test_unwritable_output_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ConfigError):
        run_experiment(small(output_path=str(blocker / "sim.csv")))


def test_runs_are_stored():
    engine = create_engine(
        "sqlite://", connect_args={"check_same_thread": False}, poolclass=StaticPool
    )
    SQLModel.metadata.create_all(engine)
    with Session(engine) as session:
        out = run_experiment(small(trials=3), session=session, persist=True)
        run = session.exec(select(ExperimentRun)).one()
    assert out.run_id == run.id
    assert run.kind == "simulate"
    assert json.loads(run.summary_json)["trials"] == 3


# ── sweep ──


def test_sweep(tmp_path):
    csv_path = tmp_path / "sweep.csv"
    points = sweep(small(trials=4, output_path=str(csv_path)), "p", [0.2, 0.25])
    assert [p.value for p in points] == [0.2, 0.25]
    assert [p.seed for p in points] == [3, 4]
    assert [p.summary.p for p in points] == [0.2, 0.25]
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "# erasim-sweep schema=1 axis=p"
    assert lines[1].startswith("p,trial_id,")
    assert len(lines) == 2 + 8
    assert len(json.loads(summary_path_for(csv_path).read_text())) == 2


def test_sweep_integer_axis():
    points = sweep(small(trials=2), "num_messages", [4, 8])
    assert [p.summary.num_messages for p in points] == [4, 8]


def test_sweep_rejects_unknown_axis():
    with pytest.raises(ConfigError):
        sweep(small(), "trials", [1, 2])
    with pytest.raises(ConfigError):
        sweep(small(), "p", [])


# ── attack ──


@pytest.mark.slow
def test_attack_preset_is_sound():
    config = build_config(preset("attack"))
    assert config.trials == 1000
    out = run_experiment(config)
    s = out.summary
    assert s.decoded_trials == 0
    assert s.outcome_counts == {SKIPPED: 1000}
    assert s.max_erasures <= s.budget
    assert s.push_soundness_violations == 0
    assert "push" in s.phase_histogram
    assert s.attack_successes > 0
    assert all(r.noise_weight is None for r in out.records)


def test_reduced_message_count():
    assert reduced_message_count(256, 0.1, 20) == 16
    assert reduced_message_count(4, 0.1, 64) == 2


def test_attack_contrast_separates_rates(tmp_path):
    config = ExperimentConfig(
        kind="attack",
        n=20,
        p=0.35,
        delta=0.1,
        strategy="wait_push",
        strategy_params={"upper": 4, "lower": 2},
        encoder_kind="deterministic",
        decode=False,
        trials=400,
        output_path=str(tmp_path / "attack.csv"),
    )
    report = attack_contrast(config)
    assert report.full_messages == 256
    assert report.reduced_messages == 16
    assert report.full.attack_success_rate > report.reduced.attack_success_rate
    assert report.separation_se >= 3
    assert (tmp_path / "attack.full.csv").exists()
    assert (tmp_path / "attack.reduced.csv").exists()


# ── trace ──


def test_trace_replays_one_trial(tmp_path):
    config = build_config(preset("attack"), {"trials": 40})
    cb = build_codebook_for(config)
    path = tmp_path / "trace" / "t7.csv"
    record = trace_experiment_trial(config, 7, path, cb=cb)
    assert record == run_trial(cb, config, 7)

    lines = path.read_text().splitlines()
    assert lines[0] == "# erasim-trace schema=1 trial_id=7"
    assert lines[1] == ",".join(TRACE_COLUMNS)
    rows = read_trace(path)
    assert [int(r["t"]) for r in rows] == list(range(1, config.n + 1))
    assert sum(r["decision"] == "erase" for r in rows) == record.erasures_used
    assert sum(r["overridden"] == "1" for r in rows) == record.budget_overrides
    assert rows[0]["phase"] == "wait1"
    assert all(r["surviving"] != "" for r in rows)


def test_trace_rejects_unknown_trial(tmp_path):
    with pytest.raises(ConfigError):
        trace_experiment_trial(small(trials=3), 3, tmp_path / "t.csv")


# ── stochastic-code trend ──

PILOT = Path(__file__).parent / "fixtures" / "pilot_stochastic.json"
TREND_STRATEGIES = [("prefix", {}), ("random", {"q": 0.3})]


def test_calibrated_threshold():
    adjusted = 102 / 104
    expected = 1.0 - 3 * math.sqrt(adjusted * (1 - adjusted) / 100)
    assert calibrated_threshold(100, 100) == pytest.approx(expected)
    assert 0.95 < calibrated_threshold(100, 100) < 1.0
    assert calibrated_threshold(90, 100) < 0.9
    with pytest.raises(ConfigError):
        calibrated_threshold(0, 0)


def test_pilot_matches_stochastic_preset():
    pilot = load_pilot(PILOT)
    stochastic = preset("stochastic")
    assert (pilot.p, pilot.epsilon, pilot.num_messages) == (
        stochastic["p"],
        stochastic["epsilon"],
        stochastic["num_messages"],
    )
    for strategy, params in TREND_STRATEGIES:
        for n in (512, 1024, 2048):
            assert pilot.cell(strategy, n).strategy_params == params


def test_bad_pilot_file(tmp_path):
    path = tmp_path / "pilot.json"
    path.write_text('{"p": 0.25}')
    with pytest.raises(ConfigError):
        load_pilot(path)


def _preset_run(strategy, params, **overrides):
    layer = {"strategy": strategy, "strategy_params": params, **overrides}
    return run_experiment(build_config(preset("stochastic"), layer)).summary


@pytest.mark.slow
@pytest.mark.parametrize("strategy, params", TREND_STRATEGIES)
def test_stochastic_preset_meets_pilot_threshold(strategy, params):
    cell = load_pilot(PILOT).cell(strategy, 1024)
    threshold = calibrated_threshold(cell.successes, cell.trials)
    s = _preset_run(strategy, params)
    assert (s.n, s.trials, s.decoded_trials) == (1024, 500, 500)
    assert s.overrides == 0
    assert s.success_rate >= threshold


@pytest.mark.slow
@pytest.mark.parametrize("strategy, params", TREND_STRATEGIES)
def test_success_does_not_fall_with_blocklength(strategy, params):
    short = _preset_run(strategy, params, n=512)
    long = _preset_run(strategy, params, n=2048)
    spread = math.hypot(short.success_se, long.success_se)
    assert long.success_rate >= short.success_rate - 2 * spread
