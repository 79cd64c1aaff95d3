import json

import pytest

from kairosis import cli
from kairosis.synthetic import spec_to_json
from test_synthetic import two_regime_spec

FORECASTS = """question_id,timestamp,probability
qa,2020-01-02T00:00:00Z,0.2
qa,2020-01-03T00:00:00Z,0.4
qa,2020-01-04T00:00:00Z,0.9
"""

QUESTIONS = """question_id,open_time,close_time,resolution
qa,2020-01-01T00:00:00Z,2020-01-09T00:00:00Z,1
"""


@pytest.fixture
def corpus(tmp_path):
    f = tmp_path / "forecasts.csv"
    q = tmp_path / "questions.csv"
    f.write_text(FORECASTS)
    q.write_text(QUESTIONS)
    return f, q


def run(*argv):
    return cli.run([str(a) for a in argv])


# --- aggregate -------------------------------------------------------------------


def test_aggregate_uniform_median_prints_value(corpus, capsys):
    f, _ = corpus
    code = run(
        "aggregate",
        "--forecasts", f,
        "--question", "qa",
        "--at", "2020-01-09T00:00:00Z",
        "--weighting", "uniform",
    )
    assert code == 0
    out = capsys.readouterr().out
    assert out == "0.4\n"


def test_aggregate_respects_cutoff(corpus, capsys):
    f, _ = corpus
    code = run(
        "aggregate",
        "--forecasts", f,
        "--question", "qa",
        "--at", "2020-01-02T00:00:00Z",
        "--weighting", "uniform",
    )
    assert code == 0
    assert capsys.readouterr().out == "0.2\n"


def test_aggregate_writes_artifacts(corpus, tmp_path, capsys):
    f, q = corpus
    out = tmp_path / "artifacts"
    code = run(
        "aggregate",
        "--forecasts", f,
        "--questions", q,
        "--question", "qa",
        "--at", "2020-01-09T00:00:00Z",
        "--weighting", "kairosis",
        "--out", out,
    )
    assert code == 0
    capsys.readouterr()
    names = sorted(p.name for p in out.iterdir())
    assert names == ["posterior_qa.csv", "weights_qa.csv"]
    weight_lines = (out / "weights_qa.csv").read_text().strip().splitlines()
    assert weight_lines[0] == "index,timestamp,weight"
    assert len(weight_lines) == 4
    post_lines = (out / "posterior_qa.csv").read_text().strip().splitlines()
    assert float(post_lines[-1].split(",")[2]) == pytest.approx(1.0, abs=1e-12)


def test_aggregate_uniform_skips_posterior_artifact(corpus, tmp_path, capsys):
    f, _ = corpus
    out = tmp_path / "artifacts"
    code = run(
        "aggregate",
        "--forecasts", f,
        "--question", "qa",
        "--at", "2020-01-09T00:00:00Z",
        "--weighting", "uniform",
        "--out", out,
    )
    assert code == 0
    capsys.readouterr()
    assert sorted(p.name for p in out.iterdir()) == ["weights_qa.csv"]


def test_aggregate_unknown_question_is_domain_error(corpus, capsys):
    f, _ = corpus
    code = run(
        "aggregate",
        "--forecasts", f,
        "--question", "nope",
        "--at", "2020-01-09T00:00:00Z",
    )
    assert code == cli.EXIT_DOMAIN
    assert capsys.readouterr().out == ""


def test_aggregate_before_first_forecast_is_domain_error(corpus):
    f, q = corpus
    code = run(
        "aggregate",
        "--forecasts", f,
        "--questions", q,
        "--question", "qa",
        "--at", "2020-01-01T06:00:00Z",
    )
    assert code == cli.EXIT_DOMAIN


def test_aggregate_cutoff_outside_window_is_file_error(corpus):
    f, q = corpus
    code = run(
        "aggregate",
        "--forecasts", f,
        "--questions", q,
        "--question", "qa",
        "--at", "2021-06-01T00:00:00Z",
    )
    assert code == cli.EXIT_FILE


def test_missing_file_is_file_error(tmp_path):
    code = run(
        "aggregate",
        "--forecasts", tmp_path / "absent.csv",
        "--question", "qa",
        "--at", "2020-01-02T00:00:00Z",
    )
    assert code == cli.EXIT_FILE


def test_malformed_probability_is_file_error(tmp_path):
    f = tmp_path / "f.csv"
    f.write_text("question_id,timestamp,probability\nqa,2020-01-02T00:00:00Z,1.2\n")
    code = run(
        "aggregate",
        "--forecasts", f,
        "--question", "qa",
        "--at", "2020-01-02T00:00:00Z",
    )
    assert code == cli.EXIT_FILE


def test_bad_usage_is_usage_error(corpus, capsys):
    f, _ = corpus
    assert run("aggregate", "--forecasts", f) == cli.EXIT_USAGE
    assert run("nonsense") == cli.EXIT_USAGE
    assert (
        run(
            "aggregate",
            "--forecasts", f,
            "--question", "qa",
            "--at", "2020-01-02T00:00:00Z",
            "--p", "0",
        )
        == cli.EXIT_USAGE
    )
    capsys.readouterr()


def test_fraction_p_flag(corpus, capsys):
    f, _ = corpus
    code = run(
        "aggregate",
        "--forecasts", f,
        "--question", "qa",
        "--at", "2020-01-09T00:00:00Z",
        "--weighting", "kairosis",
        "--p", "1/6",
        "--bins", "3",
    )
    assert code == 0
    value = float(capsys.readouterr().out)
    assert 0.0 <= value <= 1.0


# --- synth / backtest / sweep pipeline ----------------------------------------------


@pytest.fixture
def synth_corpus(tmp_path):
    spec_path = tmp_path / "spec.json"
    specs = [
        spec_to_json(two_regime_spec(question_id="qa", seed=11)),
        spec_to_json(two_regime_spec(question_id="qb", seed=12)),
    ]
    spec_path.write_text(json.dumps(specs))
    out = tmp_path / "corpus"
    assert run("synth", "--spec", spec_path, "--out", out) == 0
    return out


def test_synth_writes_corpus(synth_corpus):
    names = sorted(p.name for p in synth_corpus.iterdir())
    assert names == ["forecasts.csv", "questions.csv", "truth.csv"]
    truth = (synth_corpus / "truth.csv").read_text().strip().splitlines()
    assert truth == ["question_id,changepoints", "qa,121", "qb,121"]


def test_synth_is_deterministic(tmp_path, synth_corpus):
    spec_path = tmp_path / "spec2.json"
    spec_path.write_text(
        json.dumps(
            [
                spec_to_json(two_regime_spec(question_id="qa", seed=11)),
                spec_to_json(two_regime_spec(question_id="qb", seed=12)),
            ]
        )
    )
    out = tmp_path / "corpus2"
    assert run("synth", "--spec", spec_path, "--out", out) == 0
    for name in ("forecasts.csv", "questions.csv", "truth.csv"):
        assert (out / name).read_bytes() == (synth_corpus / name).read_bytes()


def test_synth_seed_override_changes_streams(tmp_path):
    spec_path = tmp_path / "spec.json"
    spec = two_regime_spec(question_id="qa", seed=11)
    # draw within-bin noise so the seed actually matters
    spec_obj = spec_to_json(spec)
    for regime in spec_obj["regimes"]:
        regime["within_bin"] = "uniform"
    spec_path.write_text(json.dumps([spec_obj]))
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert run("synth", "--spec", spec_path, "--out", a) == 0
    assert run("synth", "--spec", spec_path, "--out", b, "--seed", "999") == 0
    assert (a / "forecasts.csv").read_bytes() != (b / "forecasts.csv").read_bytes()


def test_synth_bad_spec_is_file_error(tmp_path):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps({"regimes": []}))
    assert run("synth", "--spec", spec_path, "--out", tmp_path / "o") == cli.EXIT_FILE


def test_backtest_writes_scores(tmp_path, synth_corpus):
    out = tmp_path / "scores"
    code = run(
        "backtest",
        "--forecasts", synth_corpus / "forecasts.csv",
        "--questions", synth_corpus / "questions.csv",
        "--out", out,
    )
    assert code == 0
    lines = (out / "scores.csv").read_text().strip().splitlines()
    assert lines[0] == "method,brier_unweighted,brier_weighted,log_unweighted,log_weighted"
    assert len(lines) == 1 + 8
    benchmark_rows = [l for l in lines if l.startswith("uniform+median,")]
    assert len(benchmark_rows) == 1
    assert benchmark_rows[0].split(",")[1:] == ["0", "0", "0", "0"]
    payload = json.loads((out / "scores.json").read_text())
    assert payload["benchmark"] == "uniform+median"
    assert payload["n_questions"] == 2


def test_sweep_emits_sorted_grid(tmp_path, synth_corpus):
    out = tmp_path / "sweep"
    code = run(
        "sweep",
        "--forecasts", synth_corpus / "forecasts.csv",
        "--questions", synth_corpus / "questions.csv",
        "--out", out,
        "--p-grid", "1/6,1/2,1/24",
    )
    assert code == 0
    lines = (out / "sweep.csv").read_text().strip().splitlines()
    assert lines[0] == "p,mean_brier"
    ps = [float(l.split(",")[0]) for l in lines[1:]]
    assert ps == sorted(ps) and len(ps) == 3
    losses = [float(l.split(",")[1]) for l in lines[1:]]
    assert all(0.0 <= loss <= 1.0 for loss in losses)


def test_sweep_log_grid(tmp_path, synth_corpus):
    out = tmp_path / "sweep"
    code = run(
        "sweep",
        "--forecasts", synth_corpus / "forecasts.csv",
        "--questions", synth_corpus / "questions.csv",
        "--out", out,
        "--p-grid", "log:0.01:0.5:5",
    )
    assert code == 0
    lines = (out / "sweep.csv").read_text().strip().splitlines()
    assert len(lines) == 6
    ps = [float(l.split(",")[0]) for l in lines[1:]]
    assert ps[0] == pytest.approx(0.01)
    assert ps[-1] == pytest.approx(0.5)


def test_sweep_bad_grid_is_usage_error(tmp_path, synth_corpus):
    code = run(
        "sweep",
        "--forecasts", synth_corpus / "forecasts.csv",
        "--questions", synth_corpus / "questions.csv",
        "--out", tmp_path / "o",
        "--p-grid", "0,0.5",
    )
    assert code == cli.EXIT_USAGE


def test_backtest_unresolved_corpus_is_domain_error(tmp_path):
    f = tmp_path / "f.csv"
    q = tmp_path / "q.csv"
    f.write_text(
        "question_id,timestamp,probability\nqa,2020-01-02T00:00:00Z,0.5\n"
    )
    q.write_text(
        "question_id,open_time,close_time,resolution\n"
        "qa,2020-01-01T00:00:00Z,2020-01-05T00:00:00Z,unresolved\n"
    )
    code = run(
        "backtest", "--forecasts", f, "--questions", q, "--out", tmp_path / "o"
    )
    assert code == cli.EXIT_DOMAIN
