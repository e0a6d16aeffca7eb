"""Matched-filter and zero-forcing precoders and their expected per-user metrics.

Conventions: ``G`` is M x K with one column per user, the received vector is
``y = sqrt(rho) G^T x + n`` with unit-variance noise, and the symbol vector
``q`` has ``E||q||^2 = 1`` (per-symbol variance ``1/K``). All internal math
is linear; dB only appears in :class:`MetricVector`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .channel import block_forms
from .errors import DegenerateInputError, RankDeficiencyError

COND_LIMIT = 1e12


class PrecoderKind(enum.Enum):
    MF = "mf"
    ZF = "zf"


@dataclass(frozen=True)
class TransmitConfig:
    """Transmit SNR ``rho`` (linear), user count ``K`` and antenna count ``M``."""

    rho: float
    K: int
    M: int

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError(f"transmit SNR must be positive, got {self.rho}")
        if self.K < 1 or self.K > self.M:
            raise ValueError(f"need 1 <= K <= M, got K={self.K}, M={self.M}")

    @classmethod
    def from_db(cls, rho_db, K, M):
        return cls(10.0 ** (rho_db / 10.0), K, M)


def to_db(x):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(x, dtype=float))


@dataclass(frozen=True, eq=False)
class MetricVector:
    values: np.ndarray  # dB, one per user
    kind: str  # "mf_sinr" or "zf_snr"

    @property
    def linear(self):
        return 10.0 ** (self.values / 10.0)

    def __len__(self):
        return len(self.values)


def gram(g_hat):
    """``G^T G^*`` (K x K, Hermitian)."""
    g_hat = np.asarray(g_hat)
    return g_hat.T @ g_hat.conj()


def mf_normalization(g_hat) -> float:
    g_hat = np.asarray(g_hat)
    k = g_hat.shape[1]
    gamma = float(np.sum(np.abs(g_hat) ** 2)) / k
    if not gamma > 0:
        raise DegenerateInputError("channel estimate is identically zero")
    return gamma


def gram_inverse(g_hat, cond_limit=COND_LIMIT):
    """Inverse of the Gram matrix via Cholesky, refusing ill-conditioned input.

    Raises
    ------
    RankDeficiencyError
        If the condition number exceeds ``cond_limit`` (or the Gram matrix
        is singular, reported as an infinite condition number).
    """
    w = gram(g_hat)
    w = 0.5 * (w + w.conj().T)
    ev = np.linalg.eigvalsh(w)
    if ev[-1] <= 0:
        raise DegenerateInputError("channel estimate is identically zero")
    cond = np.inf if ev[0] <= 0 else ev[-1] / ev[0]
    if cond > cond_limit:
        raise RankDeficiencyError(cond, cond_limit)
    factor = cho_factor(w, lower=True)
    inv = cho_solve(factor, np.eye(w.shape[0], dtype=w.dtype))
    return 0.5 * (inv + inv.conj().T)


def zf_normalization(g_hat, cond_limit=COND_LIMIT) -> float:
    inv = gram_inverse(g_hat, cond_limit)
    return float(np.trace(inv).real) / inv.shape[0]


def mf_matrix(g_hat):
    """Precoding matrix ``F`` with ``x = F q`` for the MF precoder."""
    g_hat = np.asarray(g_hat)
    return g_hat.conj() / np.sqrt(mf_normalization(g_hat))


def zf_matrix(g_hat, cond_limit=COND_LIMIT):
    g_hat = np.asarray(g_hat)
    inv = gram_inverse(g_hat, cond_limit)
    gamma = float(np.trace(inv).real) / inv.shape[0]
    return (g_hat.conj() @ inv) / np.sqrt(gamma)


def precoding_matrix(g_hat, kind):
    kind = PrecoderKind(kind)
    return mf_matrix(g_hat) if kind is PrecoderKind.MF else zf_matrix(g_hat)


def mf_precode(g_hat, q):
    return mf_matrix(g_hat) @ np.asarray(q)


def zf_precode(g_hat, q):
    return zf_matrix(g_hat) @ np.asarray(q)


def _check_dims(g_hat, P, cfg):
    m, k = g_hat.shape
    if k != cfg.K or m != cfg.M:
        raise ValueError(
            f"channel is {m} x {k} but config has M={cfg.M}, K={cfg.K}"
        )
    if len(P) != k:
        raise ValueError(f"expected {k} error covariances, got {len(P)}")


def mf_expected_sinr(g_hat, P, xi, cfg: TransmitConfig) -> MetricVector:
    """Approximate expected MF SINR per user under imperfect CSI.

    Parameters
    ----------
    g_hat : ndarray, shape (M, K)
        Estimated channel.
    P : sequence of ErrorCovariance
        One per user.
    xi : float
        CSI accuracy.
    cfg : TransmitConfig

    Returns
    -------
    MetricVector
        ``kind="mf_sinr"``, values in dB.
    """
    g_hat = np.asarray(g_hat)
    _check_dims(g_hat, P, cfg)
    scale = cfg.rho / (cfg.K * mf_normalization(g_hat))
    coherent = np.abs(gram(g_hat)) ** 2  # [i, k] = |g_i^T g_k^*|^2
    # leak[i, k] = g_k^T P_i g_k^*; users normally share one base block
    forms = {}
    rows = []
    for p in P:
        key = id(p.base)
        if key not in forms:
            forms[key] = block_forms(p.base, g_hat)
        rows.append(p.beta @ forms[key] + p.mean_forms(g_hat))
    leak = np.stack(rows)
    terms = xi ** 2 * coherent + (1.0 - xi ** 2) * leak
    signal = np.diag(terms).copy()
    interference = terms.sum(axis=1) - signal
    sinr = scale * signal / (scale * interference + 1.0)
    return MetricVector(to_db(sinr), "mf_sinr")


def zf_expected_snr(gamma_zf, P, xi, cfg: TransmitConfig) -> MetricVector:
    """Approximate expected ZF SNR per user; only ``trace(P_i)`` enters."""
    if not gamma_zf > 0:
        raise ValueError("gamma_zf must be positive")
    traces = np.array([p.trace for p in P], dtype=float)
    snr = (cfg.rho / (cfg.K * gamma_zf)) * xi ** 2 \
        / (cfg.rho * (1.0 - xi ** 2) * traces + 1.0)
    return MetricVector(to_db(snr), "zf_snr")


def simulate_received(g, x, rho, rng: np.random.Generator):
    """``sqrt(rho) G^T x + n`` with i.i.d. CN(0, 1) noise.

    ``x`` may be a single vector or an M x n_draws matrix of vectors.
    """
    g = np.asarray(g)
    x = np.asarray(x)
    s = np.sqrt(rho) * (g.T @ x)
    z = rng.standard_normal(s.shape + (2,))
    n = (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)
    return s + n


def link_powers(g, g_hat, kind, cfg: TransmitConfig, n_draws: int,
                rng: np.random.Generator):
    """Desired, interference and noise power per user from simulated transmissions.

    Symbols are i.i.d. CN(0, 1/K). The received samples come from
    :func:`simulate_received`; the desired part of user ``i`` is its own
    symbol times the effective gain, the interference part is the rest of
    the noiseless signal, and the noise is whatever remains of ``y``.

    Returns
    -------
    desired, interference, noise : ndarray, shape (K,)
    """
    if int(n_draws) != n_draws or n_draws < 1:
        raise ValueError("n_draws must be a positive integer")
    g = np.asarray(g)
    k = g.shape[1]
    f = precoding_matrix(g_hat, kind)
    z = rng.standard_normal((k, int(n_draws), 2))
    q = (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0 * k)
    x = f @ q
    y = simulate_received(g, x, cfg.rho, rng)
    t = np.sqrt(cfg.rho) * (g.T @ f)
    clean = t @ q
    desired = np.diag(t)[:, None] * q
    interference = clean - desired
    noise = y - clean
    return (np.mean(np.abs(desired) ** 2, axis=1),
            np.mean(np.abs(interference) ** 2, axis=1),
            np.mean(np.abs(noise) ** 2, axis=1))


def empirical_sinr_oracle(g, g_hat, kind, cfg: TransmitConfig, n_draws: int,
                          rng: np.random.Generator) -> MetricVector:
    """Per-user SINR (dB) measured from simulated link-level transmissions."""
    desired, interference, noise = link_powers(g, g_hat, kind, cfg, n_draws, rng)
    kind = PrecoderKind(kind)
    label = "mf_sinr" if kind is PrecoderKind.MF else "zf_snr"
    return MetricVector(to_db(desired / (interference + noise)), label)
