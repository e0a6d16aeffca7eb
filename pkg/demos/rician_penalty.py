"""A LOS component makes user channels alike, and MF pays for it."""
from mimodeploy import ScenarioConfig, sweep

base = ScenarioConfig(correlation_mode="iid", n_trials=200)
for point in sweep(base, "k_factor", [0.0, 0.5, 2.0, 10.0]):
    res = point.result
    print(f"K_f={point.value:<5g} median MF {res.mf_cdf.median:7.2f} dB   "
          f"median ZF {res.zf_cdf.median:7.2f} dB")
