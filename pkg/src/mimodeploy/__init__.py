"""Monte Carlo simulation of MF and ZF precoding in massive MU-MIMO downlinks.

Covers spatially correlated cross-polarized URA and cylindrical arrays,
distributed antenna clusters, imperfect CSI and Rician fading.
"""

from .errors import ConfigError, DegenerateInputError, RankDeficiencyError, TrialError
from .geometry import (ArrayTopology, ClusterLayout, CoverageRegion, ElementLayout,
                       UserDrop, build_cylinder, build_layout, build_ura,
                       drop_users, place_clusters)
from .channel import (AodSpec, ChannelMatrix, CorrelationMatrix, ErrorCovariance,
                      LinkGainMatrix, LinkGainSpec, RicianSpec, apply_xpol,
                      assemble_channel, build_correlation, corrupt_csi,
                      draw_fading, error_covariance, fading_block, link_gains,
                      phase_shift, psd_sqrt, sample_aod)
from .precoding import (MetricVector, PrecoderKind, TransmitConfig,
                        empirical_sinr_oracle, mf_expected_sinr, mf_normalization,
                        mf_precode, simulate_received, zf_expected_snr,
                        zf_normalization, zf_precode)
from .montecarlo import (EmpiricalCdf, ExperimentResult, ScenarioConfig, TrialResult,
                         percentile, run_experiment, run_trial, scenario_correlation,
                         sweep, sweep_config)
from .config import parse_config, write_config
from .results import emit_results

__version__ = "0.1.0"
