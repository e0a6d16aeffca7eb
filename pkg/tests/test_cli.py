import pytest

from mimodeploy import cli
from mimodeploy.results import read_results_csv

SMALL = """[scenario]
n_antennas = 64
n_users = 4
pairs_per_ring = 4
n_aod_draws = 500
n_trials = 3
label = small
"""


@pytest.fixture
def small_cfg(tmp_path):
    path = tmp_path / "small.ini"
    path.write_text(SMALL)
    return path


def test_validate_defaults(tmp_path, capsys):
    path = tmp_path / "defaults.ini"
    path.write_text("[scenario]\n")
    assert cli.main(["validate", "--config", str(path)]) == 0
    assert "ok" in capsys.readouterr().out


def test_run_byte_identical(tmp_path, small_cfg):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        assert cli.main(["run", "--config", str(small_cfg), "--out", str(out),
                         "--seed", "7"]) == 0
    assert a.read_bytes() == b.read_bytes()
    samples, _ = read_results_csv(a)
    assert len(samples[("small", "", "mf_sinr")]) == 12


def test_run_seed_and_trials_override(tmp_path, small_cfg):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    cli.main(["run", "--config", str(small_cfg), "--out", str(a), "--seed", "1",
              "--trials", "2"])
    cli.main(["run", "--config", str(small_cfg), "--out", str(b), "--seed", "2",
              "--trials", "2"])
    assert a.read_bytes() != b.read_bytes()
    assert len(read_results_csv(a)[0][("small", "", "zf_snr")]) == 8


def test_run_jsonl(tmp_path, small_cfg):
    out = tmp_path / "r.jsonl"
    assert cli.main(["run", "--config", str(small_cfg), "--out", str(out),
                     "--format", "jsonl"]) == 0
    assert out.read_text().count("\n") == 2 * 12 + 6


def test_sweep_clusters(tmp_path, small_cfg):
    out = tmp_path / "s.csv"
    assert cli.main(["sweep", "--config", str(small_cfg), "--axis", "n_clusters",
                     "--values", "1,2,4", "--out", str(out), "--trials", "1"]) == 0
    samples, _ = read_results_csv(out)
    labels = {k[0] for k in samples}
    assert labels == {"n_clusters=1", "n_clusters=2", "n_clusters=4"}
    assert {k[1] for k in samples} == {"1", "2", "4"}


def test_sweep_from_config_section(tmp_path):
    path = tmp_path / "sw.ini"
    path.write_text(SMALL + "\n[sweep]\naxis = xi\nvalues = 1.0, 0.5\n")
    out = tmp_path / "s.csv"
    assert cli.main(["sweep", "--config", str(path), "--out", str(out)]) == 0
    assert {k[0] for k in read_results_csv(out)[0]} == {"xi=1.0", "xi=0.5"}


def test_usage_errors(tmp_path, small_cfg, capsys):
    assert cli.main([]) == 1
    assert cli.main(["frobnicate"]) == 1
    assert cli.main(["run", "--config", str(small_cfg)]) == 1
    assert cli.main(["sweep", "--config", str(small_cfg), "--axis", "xi",
                     "--out", str(tmp_path / "x.csv")]) == 1
    assert cli.main(["run", "--config", str(small_cfg), "--out", str(tmp_path / "x"),
                     "--workers", "0"]) == 1
    assert capsys.readouterr().err


def test_config_error_exit(tmp_path, capsys):
    path = tmp_path / "bad.ini"
    path.write_text("[scenario]\nn_antennas = 255\nn_clusters = 2\n")
    assert cli.main(["validate", "--config", str(path)]) == 2
    err = capsys.readouterr().err
    assert "n_antennas" in err and "line 2" in err
    assert cli.main(["validate", "--config", str(tmp_path / "missing.ini")]) == 2


def test_bad_sweep_value_is_config_error(tmp_path, small_cfg):
    assert cli.main(["sweep", "--config", str(small_cfg), "--axis", "n_clusters",
                     "--values", "3", "--out", str(tmp_path / "s.csv")]) == 2


def test_runtime_error_exit(tmp_path, small_cfg, capsys):
    out = tmp_path / "missing_dir" / "r.csv"
    assert cli.main(["run", "--config", str(small_cfg), "--out", str(out)]) == 3
    assert "runtime error" in capsys.readouterr().err
