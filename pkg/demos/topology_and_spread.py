"""URA against the cylindrical array, and the effect of wider angle spreads."""
from mimodeploy import ScenarioConfig, run_experiment

for topology in ("ura", "cylindrical"):
    for mult in (0.125, 1.0, 8.0):
        cfg = ScenarioConfig(topology=topology, spread_multiplier=mult, n_trials=150)
        res = run_experiment(cfg)
        cdf = res.mf_cdf
        print(f"{topology:12s} x{mult:<6g} MF p10/p50/p90 = "
              f"{cdf.percentile(0.1):7.2f} {cdf.median:7.2f} {cdf.percentile(0.9):7.2f} dB")
