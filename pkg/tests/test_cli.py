import json

from fpplab.cli import EXIT_INVARIANT, EXIT_OK, EXIT_USAGE, main
from fpplab.experiments import EXPERIMENTS


def write(tmp_path, text):
    p = tmp_path / "run.cfg"
    p.write_text(text)
    return str(p)


def test_run_writes_outputs(tmp_path, capsys):
    cfg = write(tmp_path, "dist = exponential\nrate = 1.0\nseed = 42\nreplicates = 8\nn_values = 8, 16\n")
    out = tmp_path / "out"
    assert main(["midpoint", "--config", cfg, "--out", str(out)]) == EXIT_OK
    assert {p.name for p in out.iterdir()} == {"report.json", "samples.csv", "plot.svg"}
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["seed_base"] == 42
    assert {"git", "timestamp"} <= report["provenance"].keys()


def test_no_plot(tmp_path):
    cfg = write(tmp_path, "replicates = 3\nn_values = 8\n")
    out = tmp_path / "o"
    assert main(["midpoint", "--config", cfg, "--out", str(out), "--no-plot"]) == EXIT_OK
    assert not (out / "plot.svg").exists()


def test_usage_errors(tmp_path):
    cfg = write(tmp_path, "replicates = 3\n")
    assert main(["midpoint", "--config", str(tmp_path / "missing"), "--out", str(tmp_path)]) == EXIT_USAGE
    assert main(["midpoint", "--config", write(tmp_path, "bogus = 1"), "--out", str(tmp_path)]) == EXIT_USAGE
    try:
        main(["nope", "--config", cfg, "--out", str(tmp_path)])
    except SystemExit as exc:
        assert exc.code == EXIT_USAGE
    else:
        raise AssertionError("argparse should exit")


def test_invariant_violation_exit_code(tmp_path, monkeypatch):
    from fpplab import experiments

    real = experiments.EXPERIMENTS["midpoint"]

    def broken(cfg):
        rep = real(cfg)
        rep.invariants["replicate_determinism"] = False
        return rep

    monkeypatch.setitem(EXPERIMENTS, "midpoint", broken)
    cfg = write(tmp_path, "replicates = 2\nn_values = 4\n")
    assert main(["midpoint", "--config", cfg, "--out", str(tmp_path / "o")]) == EXIT_INVARIANT
