import dataclasses
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mimodeploy import config as cf
from mimodeploy import montecarlo as mc
from mimodeploy import results as rs
from mimodeploy.errors import ConfigError


def test_empty_file_defaults(tmp_path):
    path = tmp_path / "empty.ini"
    path.write_text("")
    cfg = cf.parse_config(path)
    assert cfg.transmit_snr_db == 10.0 and cfg.rho == pytest.approx(10.0)
    assert cfg.shadowing_sd_db == 8.0
    assert cfg.pathloss_exponent == 4.0
    assert cfg.max_link_gain_db == 25.0
    assert cfg.system_frequency_hz == 2.6e9
    assert cfg.xpol_parameter == 0.01
    assert cfg.wavelength == pytest.approx(299_792_458 / 2.6e9)
    assert cfg.array_dimension == pytest.approx(2 * cfg.wavelength)
    assert cfg.wavenumber == pytest.approx(2 * np.pi / cfg.wavelength)
    assert (cfg.n_antennas, cfg.pairs_per_ring) == (256, 8)


def test_divisibility_error_has_key_and_line():
    text = "[scenario]\nn_antennas = 255\nn_clusters = 2\n"
    with pytest.raises(ConfigError) as info:
        cf.loads(text)
    assert info.value.key == "n_antennas" and info.value.line == 2
    assert "divisible" in str(info.value)


def test_unknown_key_located():
    with pytest.raises(ConfigError) as info:
        cf.loads("[scenario]\nn_users = 4\n\nbogus = 1\n")
    assert info.value.key == "bogus" and info.value.line == 4


def test_type_mismatch_located():
    with pytest.raises(ConfigError) as info:
        cf.loads("[scenario]\nn_users = four\n")
    assert info.value.key == "n_users" and info.value.line == 2
    assert "expected int" in str(info.value)


def test_unknown_section():
    with pytest.raises(ConfigError, match="unknown section"):
        cf.loads("[scenario]\n[plots]\nx = 1\n")


def test_malformed():
    with pytest.raises(ConfigError):
        cf.loads("n_users = 4\n")


def test_keys_case_insensitive_values_kept():
    cfg, _ = cf.loads("[scenario]\nTopology = cylindrical\nlabel = Run A\n")
    assert cfg.topology == "cylindrical" and cfg.label == "Run A"


def test_sweep_section():
    cfg, sw = cf.loads("[scenario]\n[sweep]\naxis = n_clusters\nvalues = 1, 2,4\n")
    assert sw == cf.SweepSpec("n_clusters", (1, 2, 4))
    _, sw = cf.loads("[sweep]\naxis = topology\nvalues = ura, cylindrical\n")
    assert sw.values == ("ura", "cylindrical")


def test_sweep_section_errors():
    with pytest.raises(ConfigError, match="valid axes"):
        cf.loads("[sweep]\naxis = power\nvalues = 1\n")
    with pytest.raises(ConfigError) as info:
        cf.loads("[sweep]\naxis = xi\nvalues = 1, x\n")
    assert info.value.line == 3


def test_unreadable_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        cf.parse_config(tmp_path / "missing.ini")


configs = st.builds(
    lambda n, k, topo, xi, kf, seed, snr, mode, label: mc.ScenarioConfig(
        n_antennas=64 * n, n_users=k, n_clusters=n, topology=topo, csi_accuracy=xi,
        k_factor=kf, master_seed=seed, transmit_snr_db=snr, correlation_mode=mode,
        label=label),
    st.sampled_from([1, 2, 4]), st.integers(1, 16),
    st.sampled_from(["ura", "cylindrical"]), st.floats(0.0, 1.0),
    st.floats(0.0, 50.0), st.integers(0, 2 ** 63), st.floats(-20.0, 40.0),
    st.sampled_from(["correlated", "iid"]),
    st.text(st.characters(whitelist_categories=("L", "N")), min_size=1, max_size=12),
)


@settings(max_examples=60, deadline=None)
@given(cfg=configs)
def test_write_parse_roundtrip(cfg):
    got, sweep = cf.loads(cf.dumps(cfg))
    assert got == cfg and sweep is None


def test_roundtrip_with_sweep(tmp_path):
    cfg = mc.ScenarioConfig(csi_accuracy=0.3)
    sw = cf.SweepSpec("xi", (1.0, 0.5))
    cf.write_config(cfg, tmp_path / "c.ini", sw)
    assert cf.load_config(tmp_path / "c.ini") == (cfg, sw)


# result tables

@pytest.fixture(scope="module")
def one_trial():
    cfg = mc.ScenarioConfig(n_antennas=32, n_users=8, n_aod_draws=500, label="t")
    return mc.run_experiment(cfg, n_trials=1)


def test_row_counts(tmp_path, one_trial):
    path = tmp_path / "out.csv"
    rs.emit_results(one_trial, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "scenario,axis_value,metric,sample_db"
    body = lines[1:]
    summaries = [l for l in body if "summary=true" in l]
    assert len(body) - len(summaries) == 16
    assert len(summaries) == 2 * len(rs.SUMMARY_PERCENTILES)
    assert path.read_bytes().endswith(b"\n")


def test_csv_parse_back(tmp_path, one_trial):
    path = tmp_path / "out.csv"
    rs.emit_results(one_trial, path)
    samples, summaries = rs.read_results_csv(path)
    for metric in rs.METRICS:
        want = [float(f"{x:.6g}") for x in one_trial.cdf(metric).sorted_samples]
        assert samples[("t", "", metric)] == want
        med = summaries[("t", "", metric, 0.5)]
        assert med == float(f"{one_trial.cdf(metric).median:.6g}")


def test_empty_results_refused(tmp_path):
    with pytest.raises(ValueError, match="empty"):
        rs.emit_results([], tmp_path / "x.csv")


def test_unknown_format(one_trial):
    with pytest.raises(ValueError):
        rs.render(one_trial, "parquet")


def test_unwritable_path(tmp_path, one_trial):
    with pytest.raises(OSError):
        rs.emit_results(one_trial, tmp_path / "no" / "such" / "dir.csv")


def test_jsonl(tmp_path, one_trial):
    path = tmp_path / "out.jsonl"
    rs.emit_results([("t", 2, one_trial)], path, "jsonl")
    rows = [json.loads(l) for l in path.read_text().splitlines()]
    assert len(rows) == 16 + 6
    assert set(rows[0]) == {"scenario", "axis_value", "metric", "sample_db",
                            "summary", "percentile"}
    assert rows[0]["axis_value"] == "2" and rows[-1]["summary"] is True


def test_non_finite_serialization():
    cfg = mc.ScenarioConfig(n_antennas=32, n_users=2, n_aod_draws=10, label="x")
    trial = mc.TrialResult(
        mc.pc.MetricVector(np.array([1.0, 2.0]), "mf_sinr"),
        mc.pc.MetricVector(np.array([-np.inf, 3.0]), "zf_snr"), 0, 0, 1)
    res = mc.pool_trials(cfg, [trial])
    assert "zf_snr,-inf" in rs.render(res)
    rows = [json.loads(l) for l in rs.render(res, "jsonl").splitlines()]
    assert any(r["sample_db"] is None for r in rows)


def test_split_metric():
    assert rs.split_metric("mf_sinr") == ("mf_sinr", None)
    assert rs.split_metric(rs.summary_metric("zf_snr", 0.9)) == ("zf_snr", 0.9)
