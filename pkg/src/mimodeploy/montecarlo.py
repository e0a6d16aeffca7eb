"""Scenario configuration, seeded trials, pooled CDFs and parameter sweeps."""

from __future__ import annotations

import dataclasses
import functools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import channel as ch
from . import geometry as geo
from . import precoding as pc
from .errors import ConfigError, RankDeficiencyError, TrialError

SPEED_OF_LIGHT = 299_792_458.0

TOPOLOGIES = tuple(t.value for t in geo.ArrayTopology)
CORRELATION_MODES = ("correlated", "iid")
AOD_ROWS = ("auto", "nlos", "los")

# stage tags for per-trial random streams
STAGES = {"drop": 1, "shadow": 2, "fading": 3, "csi": 4, "aod": 5}

SWEEP_AXES = {
    "xi": "csi_accuracy",
    "spread_multiplier": "spread_multiplier",
    "n_clusters": "n_clusters",
    "k_factor": "k_factor",
    "topology": "topology",
    "correlation_mode": "correlation_mode",
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Every knob of one simulated scenario.

    Quantities are held in the units of the system parameter table (dB,
    degrees, Hz); linear values are exposed as properties. Field names are
    the configuration-file keys.
    """

    n_antennas: int = 256
    n_users: int = 8
    n_clusters: int = 1
    topology: str = "ura"
    pairs_per_ring: int = 8
    array_dimension_wavelengths: float = 2.0
    system_frequency_hz: float = 2.6e9
    transmit_snr_db: float = 10.0
    shadowing_sd_db: float = 8.0
    pathloss_exponent: float = 4.0
    max_link_gain_db: float = 25.0
    xpol_parameter: float = 0.01
    csi_accuracy: float = 1.0
    k_factor: float = 0.0
    correlation_mode: str = "correlated"
    azimuth_aod_pdf: str = "wrapped_gaussian"
    zenith_aod_pdf: str = "laplacian"
    aod_row: str = "auto"
    nlos_mean_azimuth_aod_deg: float = 74.13
    nlos_mean_zenith_aod_deg: float = 18.20
    nlos_azimuth_aod_sd_deg: float = 1.29
    nlos_zenith_aod_sd_deg: float = 1.45
    los_mean_azimuth_aod_deg: float = 64.57
    los_mean_zenith_aod_deg: float = 8.91
    los_azimuth_aod_sd_deg: float = 1.58
    los_zenith_aod_sd_deg: float = 1.45
    spread_multiplier: float = 1.0
    region_radius_m: float = 1000.0
    exclusion_radius_m: float = 50.0
    n_aod_draws: int = 10_000
    n_trials: int = 500
    fading_draws_per_drop: int = 1
    master_seed: int = 0
    label: str = "scenario"

    def __post_init__(self):
        def bad(key, msg):
            raise ConfigError(msg, key=key)

        for key in ("n_antennas", "n_users", "n_clusters", "pairs_per_ring",
                    "n_aod_draws", "n_trials", "fading_draws_per_drop"):
            v = getattr(self, key)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                bad(key, f"must be a positive integer, got {v!r}")
        if not isinstance(self.master_seed, (int, np.integer)) or isinstance(self.master_seed, bool) \
                or not 0 <= self.master_seed < 2 ** 64:
            bad("master_seed", "must be an unsigned 64-bit integer")
        if self.n_antennas % (2 * self.n_clusters):
            bad("n_antennas", f"M={self.n_antennas} is not divisible by 2N="
                f"{2 * self.n_clusters} (each cluster holds whole x-pol pairs)")
        if (self.n_antennas // (2 * self.n_clusters)) % self.pairs_per_ring:
            bad("pairs_per_ring", f"{self.n_antennas // (2 * self.n_clusters)} pairs "
                f"per cluster do not fill rings of {self.pairs_per_ring}")
        if not self.n_users < self.n_antennas:
            bad("n_users", f"need K < M, got K={self.n_users}, M={self.n_antennas}")
        if self.topology not in TOPOLOGIES:
            bad("topology", f"must be one of {TOPOLOGIES}, got {self.topology!r}")
        if self.correlation_mode not in CORRELATION_MODES:
            bad("correlation_mode", f"must be one of {CORRELATION_MODES}")
        if self.aod_row not in AOD_ROWS:
            bad("aod_row", f"must be one of {AOD_ROWS}")
        if self.azimuth_aod_pdf not in ch.AZIMUTH_PDFS:
            bad("azimuth_aod_pdf", f"must be one of {ch.AZIMUTH_PDFS}")
        if self.zenith_aod_pdf not in ch.ZENITH_PDFS:
            bad("zenith_aod_pdf", f"must be one of {ch.ZENITH_PDFS}")
        if not 0.0 <= self.csi_accuracy <= 1.0:
            bad("csi_accuracy", "must lie in [0, 1]")
        if not 0.0 <= self.xpol_parameter <= 1.0:
            bad("xpol_parameter", "must lie in [0, 1]")
        if not self.k_factor >= 0:
            bad("k_factor", "must be non-negative")
        for key in ("array_dimension_wavelengths", "system_frequency_hz",
                    "pathloss_exponent", "spread_multiplier"):
            if not getattr(self, key) > 0:
                bad(key, "must be positive")
        for key in ("shadowing_sd_db", "nlos_azimuth_aod_sd_deg", "nlos_zenith_aod_sd_deg",
                    "los_azimuth_aod_sd_deg", "los_zenith_aod_sd_deg"):
            if not getattr(self, key) >= 0:
                bad(key, "must be non-negative")
        if not 0 < self.exclusion_radius_m < self.region_radius_m:
            bad("exclusion_radius_m", "need 0 < exclusion_radius_m < region_radius_m")

    # derived quantities

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.system_frequency_hz

    @property
    def wavenumber(self):
        return 2.0 * np.pi / self.wavelength

    @property
    def array_dimension(self):
        return self.array_dimension_wavelengths * self.wavelength

    @property
    def rho(self):
        return 10.0 ** (self.transmit_snr_db / 10.0)

    @property
    def elements_per_cluster(self):
        return self.n_antennas // self.n_clusters

    @property
    def rings_per_cluster(self):
        return self.n_antennas // (2 * self.n_clusters * self.pairs_per_ring)

    @property
    def uses_los_row(self):
        if self.aod_row == "auto":
            return self.k_factor > 0
        return self.aod_row == "los"

    @property
    def aod(self) -> ch.AodSpec:
        p = "los" if self.uses_los_row else "nlos"
        return ch.AodSpec(
            getattr(self, f"{p}_mean_azimuth_aod_deg"),
            getattr(self, f"{p}_mean_zenith_aod_deg"),
            getattr(self, f"{p}_azimuth_aod_sd_deg"),
            getattr(self, f"{p}_zenith_aod_sd_deg"),
            azimuth_pdf=self.azimuth_aod_pdf,
            zenith_pdf=self.zenith_aod_pdf,
            spread_multiplier=self.spread_multiplier,
            los=self.uses_los_row,
        )

    @property
    def link_gain_spec(self):
        return ch.LinkGainSpec(self.shadowing_sd_db, self.pathloss_exponent,
                               self.max_link_gain_db)

    @property
    def rician(self):
        return ch.RicianSpec(self.k_factor)

    @property
    def region(self):
        return geo.CoverageRegion(self.region_radius_m, self.exclusion_radius_m)

    @property
    def transmit(self):
        return pc.TransmitConfig(self.rho, self.n_users, self.n_antennas)

    def layout(self) -> geo.ElementLayout:
        return geo.build_layout(self.topology, self.rings_per_cluster,
                                self.pairs_per_ring, self.array_dimension)


def stage_rng(master_seed, stage, trial_index=None):
    """Independent generator for one (trial, stage), insensitive to execution order."""
    key = (STAGES[stage],) if trial_index is None else (int(trial_index), STAGES[stage])
    return np.random.default_rng(np.random.SeedSequence(int(master_seed), spawn_key=key))


@functools.lru_cache(maxsize=64)
def _cached_correlation(layout_key, aod, wavenumber, n_mc, delta, seed):
    topology, p_pairs, q_pairs, l = layout_key
    layout = geo.build_layout(topology, q_pairs, p_pairs, l)
    r = ch.build_correlation(layout, aod, n_mc, stage_rng(seed, "aod"), wavenumber)
    return ch.apply_xpol(r, delta)


def scenario_correlation(cfg: ScenarioConfig) -> ch.CorrelationMatrix:
    """The per-cluster ``R_t`` for ``cfg``, computed once per geometry and AOD spec."""
    if cfg.correlation_mode == "iid":
        return ch.CorrelationMatrix.identity(cfg.elements_per_cluster)
    return _cached_correlation(cfg.layout().key(), cfg.aod, cfg.wavenumber,
                               cfg.n_aod_draws, cfg.xpol_parameter, cfg.master_seed)


def correlation_cache_info():
    return _cached_correlation.cache_info()


def clear_correlation_cache():
    _cached_correlation.cache_clear()


@dataclass(frozen=True, eq=False)
class TrialResult:
    mf_sinr: pc.MetricVector
    zf_snr: pc.MetricVector
    trial_index: int
    seed: int
    zf_rank_deficient: int = 0


def run_trial(cfg: ScenarioConfig, trial_index: int) -> TrialResult:
    """One drop: users, link gains, fading, CSI corruption, both metrics.

    With ``fading_draws_per_drop > 1`` the metric vectors hold ``K`` values per
    fading draw, draw-major. A ZF Gram matrix beyond the condition limit
    yields ``-inf`` dB for that draw (the ZF SNR tends to zero) and is
    counted in ``zf_rank_deficient``.
    """
    try:
        return _run_trial(cfg, trial_index)
    except Exception as exc:
        raise TrialError(f"trial {trial_index} of '{cfg.label}' "
                         f"(seed {cfg.master_seed}) failed: {exc}") from exc


@dataclass(frozen=True, eq=False)
class TrialRealization:
    """Everything random in one drop: gains, correlation and the channel pairs."""

    beta: ch.LinkGainMatrix
    corr: ch.CorrelationMatrix
    channels: list  # [(ChannelMatrix G, ChannelMatrix G_hat)] per fading draw


def trial_realization(cfg: ScenarioConfig, trial_index: int) -> TrialRealization:
    """Draw the drop, link gains, fading and CSI error of one trial.

    Each stage reads its own stream, so e.g. changing ``csi_accuracy`` leaves
    ``G`` untouched and changing ``n_clusters`` reuses the same fading numbers.
    """
    seed = cfg.master_seed
    clusters = geo.place_clusters(cfg.n_clusters, cfg.region)
    users = geo.drop_users(cfg.n_users, cfg.region, clusters,
                           stage_rng(seed, "drop", trial_index))
    beta = ch.link_gains(clusters, users, cfg.link_gain_spec,
                         stage_rng(seed, "shadow", trial_index))
    corr = scenario_correlation(cfg)
    rician = cfg.rician
    fading_rng = stage_rng(seed, "fading", trial_index)
    csi_rng = stage_rng(seed, "csi", trial_index)
    channels = []
    for _ in range(cfg.fading_draws_per_drop):
        blocks = ch.draw_fading(cfg.n_clusters, cfg.n_users,
                                cfg.elements_per_cluster, rician, fading_rng)
        g = ch.assemble_channel(beta, corr, blocks, rician)
        channels.append((g, ch.corrupt_csi(g, cfg.csi_accuracy, csi_rng)))
    return TrialRealization(beta, corr, channels)


def _run_trial(cfg, trial_index):
    real = trial_realization(cfg, trial_index)
    tx = cfg.transmit
    xi = cfg.csi_accuracy
    P = [ch.error_covariance(real.beta.beta[:, i], real.corr, cfg.k_factor)
         for i in range(cfg.n_users)]
    mf, zf = [], []
    deficient = 0
    for _, g_hat in real.channels:
        mf.append(pc.mf_expected_sinr(g_hat.g, P, xi, tx).values)
        try:
            gamma_zf = pc.zf_normalization(g_hat.g)
        except RankDeficiencyError:
            deficient += 1
            zf.append(np.full(cfg.n_users, -np.inf))
        else:
            zf.append(pc.zf_expected_snr(gamma_zf, P, xi, tx).values)
    return TrialResult(pc.MetricVector(np.concatenate(mf), "mf_sinr"),
                       pc.MetricVector(np.concatenate(zf), "zf_snr"),
                       int(trial_index), int(cfg.master_seed), deficient)


class EmpiricalCdf:
    """Sorted pool of per-user metric samples (dB)."""

    def __init__(self, samples):
        self.sorted_samples = np.sort(np.asarray(samples, dtype=float).ravel())

    @property
    def n(self):
        return self.sorted_samples.size

    def percentile(self, p):
        return percentile(self, p)

    @property
    def median(self):
        return percentile(self, 0.5)

    def evaluate(self, x):
        """Fraction of samples ``<= x``."""
        return np.searchsorted(self.sorted_samples, x, side="right") / self.n


def percentile(cdf: EmpiricalCdf, p: float) -> float:
    """Linearly interpolated order statistic at fraction ``p`` (numpy's default rule)."""
    if cdf.n == 0:
        raise ValueError("percentile of an empty CDF")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    s = cdf.sorted_samples
    pos = p * (cdf.n - 1)
    lo = int(np.floor(pos))
    hi = min(lo + 1, cdf.n - 1)
    frac = pos - lo
    if frac == 0.0 or s[lo] == s[hi] or np.isneginf(s[lo]):
        return float(s[lo])
    return float(s[lo] + frac * (s[hi] - s[lo]))


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    config: ScenarioConfig
    trials: list
    mf_cdf: EmpiricalCdf
    zf_cdf: EmpiricalCdf

    @property
    def zf_rank_deficient(self):
        return sum(t.zf_rank_deficient for t in self.trials)

    def cdf(self, metric):
        return {"mf_sinr": self.mf_cdf, "zf_snr": self.zf_cdf}[metric]


def _trial_batch(cfg, indices):
    return [run_trial(cfg, i) for i in indices]


def run_experiment(cfg: ScenarioConfig, n_trials: Optional[int] = None,
                   workers: int = 1) -> ExperimentResult:
    """Run trials ``0 .. n_trials-1`` and pool per-user samples into CDFs.

    Results do not depend on ``workers``: each trial seeds itself from
    ``(master_seed, trial_index)`` and the pooled output is ordered by index.
    """
    n_trials = cfg.n_trials if n_trials is None else n_trials
    if int(n_trials) != n_trials or n_trials < 1:
        raise ValueError("n_trials must be a positive integer")
    indices = list(range(int(n_trials)))
    if workers <= 1:
        trials = _trial_batch(cfg, indices)
    else:
        chunks = [indices[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_trial_batch, [cfg] * len(chunks), chunks))
        trials = sorted((t for part in parts for t in part),
                        key=lambda t: t.trial_index)
    return pool_trials(cfg, trials)


def pool_trials(cfg, trials) -> ExperimentResult:
    trials = sorted(trials, key=lambda t: t.trial_index)
    mf = EmpiricalCdf(np.concatenate([t.mf_sinr.values for t in trials]))
    zf = EmpiricalCdf(np.concatenate([t.zf_snr.values for t in trials]))
    return ExperimentResult(cfg, trials, mf, zf)


@dataclass(frozen=True, eq=False)
class SweepPoint:
    axis: str
    value: object
    result: ExperimentResult


def sweep_config(base: ScenarioConfig, axis: str, value) -> ScenarioConfig:
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; valid axes: "
                         f"{', '.join(sorted(SWEEP_AXES))}")
    return dataclasses.replace(base, **{SWEEP_AXES[axis]: value},
                               label=f"{axis}={value}")


def sweep(base: ScenarioConfig, axis: str, values, n_trials=None,
          workers: int = 1) -> list:
    """One experiment per value of ``axis``, all sharing ``base.master_seed``.

    Sharing the seed means every point sees the same user drops, shadowing
    and fading streams, so differences between points come from the swept
    parameter alone.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; valid axes: "
                         f"{', '.join(sorted(SWEEP_AXES))}")
    points = []
    for value in values:
        cfg = sweep_config(base, axis, value)
        points.append(SweepPoint(axis, value, run_experiment(cfg, n_trials, workers)))
    return points
