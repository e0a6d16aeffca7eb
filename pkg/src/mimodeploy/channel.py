"""Block channel synthesis for distributed, correlated, cross-polarized arrays.

The channel to user ``k`` from cluster ``n`` is

    g_{n,k} = sqrt(beta_{n,k}) * R_t^{1/2} @ h_{n,k}

where ``R_t`` is the x-pol correlation of one cluster (shared by all
clusters), ``beta`` holds the large-scale link gains and ``h`` is Rician
fading with an all-ones LOS component.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import block_diag

from .geometry import ClusterLayout, ElementLayout, UserDrop

AZIMUTH_PDFS = ("wrapped_gaussian",)
ZENITH_PDFS = ("laplacian",)

# eigenvalues in [-PSD_TOL, 0) are treated as round-off and clamped
PSD_TOL = 1e-10


@dataclass(frozen=True)
class AodSpec:
    """Angle-of-departure statistics, angles in degrees.

    ``sd_*`` are the nominal spreads; the effective standard deviation is
    ``sd * spread_multiplier``.
    """

    mean_azimuth: float
    mean_zenith: float
    sd_azimuth: float
    sd_zenith: float
    azimuth_pdf: str = "wrapped_gaussian"
    zenith_pdf: str = "laplacian"
    spread_multiplier: float = 1.0
    los: bool = False

    def __post_init__(self):
        if self.sd_azimuth < 0 or self.sd_zenith < 0:
            raise ValueError("AOD spreads must be non-negative")
        if not self.spread_multiplier > 0:
            raise ValueError("spread_multiplier must be positive")
        if self.azimuth_pdf not in AZIMUTH_PDFS:
            raise ValueError(f"unsupported azimuth pdf {self.azimuth_pdf!r}")
        if self.zenith_pdf not in ZENITH_PDFS:
            raise ValueError(f"unsupported zenith pdf {self.zenith_pdf!r}")

    @classmethod
    def nlos(cls, spread_multiplier=1.0):
        return cls(74.13, 18.20, 1.29, 1.45, spread_multiplier=spread_multiplier)

    @classmethod
    def los_row(cls, spread_multiplier=1.0):
        return cls(64.57, 8.91, 1.58, 1.45, spread_multiplier=spread_multiplier,
                   los=True)

    @property
    def azimuth_sd_rad(self):
        return np.deg2rad(self.sd_azimuth * self.spread_multiplier)

    @property
    def zenith_sd_rad(self):
        return np.deg2rad(self.sd_zenith * self.spread_multiplier)


def wrap_angle(x):
    """Map angles onto (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2.0 * np.pi)


def sample_aod(spec: AodSpec, rng: np.random.Generator, size=None):
    """Draw AOD offsets ``(dphi, dtheta)`` in radians.

    The azimuth offset is a zero-mean Gaussian wrapped onto (-pi, pi]. The
    zenith offset is Laplacian with scale ``sd / sqrt(2)`` so that its
    standard deviation equals the requested spread.
    """
    dphi = wrap_angle(rng.normal(0.0, spec.azimuth_sd_rad, size))
    dtheta = rng.laplace(0.0, spec.zenith_sd_rad / np.sqrt(2.0), size)
    return dphi, dtheta


def phase_shift(d_p, d_q, dphi, dtheta, spec: AodSpec, k: float):
    """Azimuth and zenith phase shifts of an element relative to the reference.

    ``Phi = k d_p cos(phi + dphi) sin(theta + dtheta)`` and
    ``Theta = k d_q cos(theta + dtheta)``, with ``phi``, ``theta`` the mean
    angles of ``spec``. Broadcasts over all array arguments.
    """
    if not k > 0:
        raise ValueError("wavenumber must be positive")
    az = np.deg2rad(spec.mean_azimuth) + np.asarray(dphi)
    zen = np.deg2rad(spec.mean_zenith) + np.asarray(dtheta)
    big_phi = k * np.asarray(d_p) * np.cos(az) * np.sin(zen)
    big_theta = k * np.asarray(d_q) * np.cos(zen)
    return big_phi, big_theta


def element_distances(layout: ElementLayout):
    """Azimuth-plane and vertical distances of each pair position from the reference.

    The reference is pair position 0. ``d_p`` is the Euclidean distance in
    the x-y plane (the chord, for a cylinder) and ``d_q`` the height offset.
    """
    rel = layout.pair_positions - layout.pair_positions[0]
    return np.hypot(rel[:, 0], rel[:, 1]), rel[:, 2]


def build_correlation(layout: ElementLayout, spec: AodSpec, n_mc: int,
                      rng: np.random.Generator, k: float) -> np.ndarray:
    """Co-polarized correlation ``R = E[a a^H]`` averaged over ``n_mc`` AOD draws.

    ``a_m = exp(-j (Phi_m + Theta_m))`` is the steering phase of element
    ``m``, with the phase shifts of :func:`phase_shift` evaluated at the
    distances from :func:`element_distances`. The average is taken over the
    distinct pair positions and then expanded so both members of an x-pol
    pair get the same rows. The diagonal is exactly one and the result is
    exactly Hermitian.
    """
    if int(n_mc) != n_mc or n_mc < 1:
        raise ValueError(f"n_mc must be a positive integer, got {n_mc}")
    dphi, dtheta = sample_aod(spec, rng, int(n_mc))
    d_p, d_q = element_distances(layout)
    big_phi, big_theta = phase_shift(d_p[None, :], d_q[None, :], dphi[:, None],
                                     dtheta[:, None], spec, k)
    a = np.exp(-1j * (big_phi + big_theta))
    r_pos = (a.T @ a.conj()) / n_mc
    r_pos = 0.5 * (r_pos + r_pos.conj().T)
    np.fill_diagonal(r_pos, 1.0)
    return np.kron(r_pos, np.ones((2, 2)))


def psd_sqrt(r: np.ndarray, tol: float = PSD_TOL) -> np.ndarray:
    """Hermitian PSD square root via eigendecomposition.

    Eigenvalues in ``[-tol, 0)`` are clamped to zero; anything more negative
    raises, because it means ``r`` is not a correlation matrix.
    """
    w, v = np.linalg.eigh(r)
    if w.min() < -tol:
        raise ValueError(
            f"matrix is not positive semidefinite (min eigenvalue {w.min():.3e})"
        )
    w = np.clip(w, 0.0, None)
    s = (v * np.sqrt(w)) @ v.conj().T
    return 0.5 * (s + s.conj().T)


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """Per-cluster transmit correlation ``R_t`` with its cached square root."""

    r_t: np.ndarray
    sqrt: np.ndarray
    delta: float

    @classmethod
    def from_matrix(cls, r_t, delta=1.0):
        r_t = np.asarray(r_t, dtype=complex)
        return cls(r_t, psd_sqrt(r_t), float(delta))

    @classmethod
    def identity(cls, m):
        eye = np.eye(m, dtype=complex)
        return cls(eye, eye.copy(), 0.0)

    @property
    def size(self):
        return self.r_t.shape[0]


def xpol_matrix(m: int, delta: float) -> np.ndarray:
    """``1_{m/2} (x) [[1, sqrt(delta)], [sqrt(delta), 1]]``."""
    if m % 2:
        raise ValueError(f"x-pol arrays need an even element count, got {m}")
    s = np.sqrt(delta)
    return np.kron(np.ones((m // 2, m // 2)), np.array([[1.0, s], [s, 1.0]]))


def apply_xpol(r: np.ndarray, delta: float) -> CorrelationMatrix:
    """Hadamard product of the co-pol correlation with the x-pol coupling matrix."""
    r = np.asarray(r)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise ValueError("correlation matrix must be square")
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"x-pol parameter must lie in [0, 1], got {delta}")
    r_t = xpol_matrix(r.shape[0], delta) * r
    return CorrelationMatrix.from_matrix(r_t, delta)


@dataclass(frozen=True)
class LinkGainSpec:
    shadow_sd_db: float = 8.0
    pathloss_exponent: float = 4.0
    beta_max_db: float = 25.0

    def __post_init__(self):
        if self.shadow_sd_db < 0:
            raise ValueError("shadowing SD must be non-negative")
        if not self.pathloss_exponent > 0:
            raise ValueError("path-loss exponent must be positive")


@dataclass(frozen=True, eq=False)
class LinkGainMatrix:
    beta: np.ndarray  # (N, K) linear
    normalizer_db: float = 0.0

    @property
    def n_clusters(self):
        return self.beta.shape[0]

    @property
    def n_users(self):
        return self.beta.shape[1]


def link_gains(clusters: ClusterLayout, users: UserDrop, spec: LinkGainSpec,
               rng: np.random.Generator) -> LinkGainMatrix:
    """Path loss ``A L d^-gamma`` with log-normal shadowing, normalized so max(beta) = beta_max.

    Shadowing is drawn in the dB domain as ``N(0, shadow_sd_db^2)``, one
    value per (cluster, user) link.
    """
    d = users.distances(clusters)
    if np.any(d <= 0):
        raise ValueError("link distance must be positive")
    shadow_db = rng.normal(0.0, spec.shadow_sd_db, d.shape)
    gain_db = shadow_db - 10.0 * spec.pathloss_exponent * np.log10(d)
    peak = gain_db.max()
    beta = 10.0 ** ((gain_db - peak) / 10.0) * 10.0 ** (spec.beta_max_db / 10.0)
    return LinkGainMatrix(beta, spec.beta_max_db - peak)


@dataclass(frozen=True)
class RicianSpec:
    k_factor: float = 0.0

    def __post_init__(self):
        if not self.k_factor >= 0:
            raise ValueError(f"K-factor must be non-negative, got {self.k_factor}")

    @property
    def nlos_weight(self):
        if np.isinf(self.k_factor):
            return 0.0
        return np.sqrt(1.0 / (self.k_factor + 1.0))

    @property
    def los_weight(self):
        if np.isinf(self.k_factor):
            return 1.0
        return np.sqrt(self.k_factor / (self.k_factor + 1.0))


def fading_block(m_per_cluster: int, spec: RicianSpec,
                 rng: np.random.Generator) -> np.ndarray:
    """One Rician fading vector with an all-ones LOS term and CN(0, 1) scatter."""
    if int(m_per_cluster) != m_per_cluster or m_per_cluster < 1:
        raise ValueError("m_per_cluster must be a positive integer")
    z = rng.standard_normal((int(m_per_cluster), 2))
    nlos = (z[:, 0] + 1j * z[:, 1]) / np.sqrt(2.0)
    return spec.nlos_weight * nlos + spec.los_weight


def draw_fading(n_clusters, n_users, m_per_cluster, spec: RicianSpec,
                rng: np.random.Generator) -> np.ndarray:
    """Fading blocks of shape (N, K, M/N).

    Blocks are drawn user by user, then cluster by cluster, so a given user's
    concatenated blocks consume the same random stream whatever N is.
    """
    blocks = np.empty((n_clusters, n_users, m_per_cluster), dtype=complex)
    for k in range(n_users):
        for n in range(n_clusters):
            blocks[n, k] = fading_block(m_per_cluster, spec, rng)
    return blocks


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    """The M x K block channel together with what generated it."""

    g: np.ndarray
    beta: LinkGainMatrix
    corr: CorrelationMatrix
    rician: RicianSpec = field(default_factory=RicianSpec)
    blocks: Optional[np.ndarray] = None

    @property
    def n_clusters(self):
        return self.beta.n_clusters

    @property
    def m_per_cluster(self):
        return self.corr.size

    def block(self, n, k):
        m = self.m_per_cluster
        return self.g[n * m:(n + 1) * m, k]


def assemble_channel(beta: LinkGainMatrix, corr: CorrelationMatrix,
                     blocks: np.ndarray,
                     rician: Optional[RicianSpec] = None) -> ChannelMatrix:
    """Stack ``sqrt(beta[n, k]) * R_t^{1/2} @ blocks[n, k]`` into G."""
    blocks = np.asarray(blocks)
    n, k = beta.beta.shape
    m = corr.size
    if blocks.shape != (n, k, m):
        raise ValueError(
            f"fading blocks have shape {blocks.shape}, expected {(n, k, m)}"
        )
    g = np.empty((n * m, k), dtype=complex)
    amp = np.sqrt(beta.beta)
    for c in range(n):
        g[c * m:(c + 1) * m] = (corr.sqrt @ blocks[c].T) * amp[c]
    return ChannelMatrix(g, beta, corr, rician or RicianSpec(), blocks)


def corrupt_csi(channel: ChannelMatrix, xi: float,
                rng: np.random.Generator) -> ChannelMatrix:
    """Estimated channel ``xi G + sqrt(1 - xi^2) E``.

    ``E`` reuses the link gains, correlation and Rician K-factor of
    ``channel`` with fresh fast fading.
    """
    if not 0.0 <= xi <= 1.0:
        raise ValueError(f"CSI accuracy must lie in [0, 1], got {xi}")
    if xi == 1.0:
        return ChannelMatrix(channel.g.copy(), channel.beta, channel.corr,
                             channel.rician)
    n, k = channel.beta.beta.shape
    e_blocks = draw_fading(n, k, channel.m_per_cluster, channel.rician, rng)
    e = assemble_channel(channel.beta, channel.corr, e_blocks, channel.rician)
    g_hat = xi * channel.g + np.sqrt(1.0 - xi * xi) * e.g
    return ChannelMatrix(g_hat, channel.beta, channel.corr, channel.rician)


@dataclass(frozen=True, eq=False)
class ErrorCovariance:
    """``P_i = E[e_i^* e_i^T]`` for one user.

    ``conj(P_i)`` is the block-diagonal scatter part, block ``n`` equal to
    ``beta[n] * base``, plus ``mean mean^H`` when the fading has a LOS term.
    With Rayleigh fading ``base = R_t`` and ``mean`` is None.
    """

    beta: np.ndarray  # (N,)
    base: np.ndarray  # (m, m) Hermitian
    mean: Optional[np.ndarray] = None  # (N*m,) E[e_i]

    @property
    def trace(self):
        t = float(np.sum(self.beta) * np.trace(self.base).real)
        if self.mean is not None:
            t += float(np.vdot(self.mean, self.mean).real)
        return t

    def matrix(self):
        p = block_diag(*[b * self.base for b in self.beta]).astype(complex)
        if self.mean is not None:
            p += np.outer(self.mean, self.mean.conj())
        return p.conj()

    def mean_forms(self, v):
        """``|mean^H v|^2`` per column of ``v`` (zeros without a LOS term)."""
        v = np.asarray(v)
        if self.mean is None:
            return np.zeros(v.shape[1:]) if v.ndim > 1 else 0.0
        return np.abs(self.mean.conj() @ v) ** 2

    def quad(self, v):
        """``v^T P v^*`` for a vector, or per column of a matrix."""
        v = np.asarray(v)
        single = v.ndim == 1
        if single:
            v = v[:, None]
        out = self.beta @ block_forms(self.base, v) + self.mean_forms(v)
        return out[0] if single else out


def block_forms(base, v):
    """``v_n^H base v_n`` for every cluster block ``n`` and column, shape (N, cols)."""
    m = base.shape[0]
    vb = v.reshape(-1, m, v.shape[-1])
    return np.sum(vb.conj() * (base @ vb), axis=1).real


def error_covariance(beta_col, corr: CorrelationMatrix,
                     k_factor: float = 0.0) -> ErrorCovariance:
    """CSI-error covariance for one user.

    With ``k_factor = 0`` the matrix is block-diagonal with blocks
    ``beta_col[n] * conj(R_t)`` and its trace is ``(M/N) * sum(beta_col)``.
    A positive K-factor scales the scatter part by ``1/(K_f + 1)`` and adds
    the outer product of the LOS mean that ``E`` shares with ``G``.
    """
    beta_col = np.asarray(beta_col, dtype=float)
    if k_factor == 0:
        return ErrorCovariance(beta_col, corr.r_t)
    rician = RicianSpec(k_factor)
    scatter = corr.sqrt @ corr.sqrt.conj().T
    los = corr.sqrt @ np.ones(corr.size)
    mean = rician.los_weight * np.concatenate([np.sqrt(b) * los for b in beta_col])
    return ErrorCovariance(beta_col, rician.nlos_weight ** 2 * scatter, mean)
