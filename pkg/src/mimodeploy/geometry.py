"""Antenna element layouts, cluster placement and user drops.

Element ordering is position-major: elements ``2*j`` and ``2*j + 1`` are the
two polarizations of the x-pol pair at position ``j``. Positions are ordered
ring by ring along the vertical axis, ``j = q * p_pairs + p``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class ArrayTopology(enum.Enum):
    URA = "ura"
    CYLINDRICAL = "cylindrical"


@dataclass(frozen=True)
class ElementLayout:
    """3D positions and polarization tags for the elements of one cluster.

    Attributes
    ----------
    positions : ndarray, shape (2*P*Q, 3)
        Element coordinates in meters. x-pol partners share a row value.
    pol : ndarray of int, shape (2*P*Q,)
        Polarization index, alternating 0, 1.
    p_pairs, q_pairs : int
        Pair counts in the azimuth plane and along the vertical axis.
    l : float
        Array dimension in meters.
    topology : ArrayTopology
    """

    positions: np.ndarray
    pol: np.ndarray
    p_pairs: int
    q_pairs: int
    l: float
    topology: ArrayTopology

    @property
    def n_elements(self):
        return self.positions.shape[0]

    @property
    def pair_positions(self):
        """One row per x-pol pair, shape (P*Q, 3)."""
        return self.positions[::2]

    def key(self):
        """Hashable identity used for correlation caching."""
        return (self.topology.value, self.p_pairs, self.q_pairs, float(self.l))


@dataclass(frozen=True)
class CoverageRegion:
    radius: float = 1000.0
    exclusion_radius: float = 50.0

    def __post_init__(self):
        if not 0 < self.exclusion_radius < self.radius:
            raise ValueError(
                "coverage region needs 0 < exclusion_radius < radius, got "
                f"exclusion_radius={self.exclusion_radius}, radius={self.radius}"
            )


@dataclass(frozen=True)
class ClusterLayout:
    centers: np.ndarray  # (N, 2) meters

    @property
    def n_clusters(self):
        return self.centers.shape[0]


@dataclass(frozen=True)
class UserDrop:
    positions: np.ndarray  # (K, 2) meters

    @property
    def n_users(self):
        return self.positions.shape[0]

    def distances(self, clusters: ClusterLayout) -> np.ndarray:
        """Link distances, shape (N, K)."""
        diff = clusters.centers[:, None, :] - self.positions[None, :, :]
        return np.linalg.norm(diff, axis=-1)


def _check_counts(q_pairs, p_pairs, l):
    if int(q_pairs) != q_pairs or int(p_pairs) != p_pairs:
        raise ValueError("pair counts must be integers")
    if q_pairs < 1 or p_pairs < 1:
        raise ValueError(f"pair counts must be >= 1, got q={q_pairs}, p={p_pairs}")
    if not l > 0:
        raise ValueError(f"array dimension must be positive, got {l}")


def _expand_pairs(pair_positions):
    positions = np.repeat(pair_positions, 2, axis=0)
    pol = np.tile(np.array([0, 1]), pair_positions.shape[0])
    return positions, pol


def build_ura(q_pairs: int, p_pairs: int, l: float) -> ElementLayout:
    """Planar array in the x-z plane with spacing ``l/p_pairs`` by ``l/q_pairs``.

    The first pair sits at the origin. Spacing is ``l / count`` so a 16 x 8
    pair grid in ``l = 2 wavelengths`` gives lambda/8 vertical and lambda/4
    horizontal spacing.
    """
    _check_counts(q_pairs, p_pairs, l)
    q, p = np.meshgrid(np.arange(q_pairs), np.arange(p_pairs), indexing="ij")
    x = p.ravel() * (l / p_pairs)
    z = q.ravel() * (l / q_pairs)
    pairs = np.column_stack([x, np.zeros_like(x), z])
    positions, pol = _expand_pairs(pairs)
    return ElementLayout(positions, pol, int(p_pairs), int(q_pairs), float(l),
                         ArrayTopology.URA)


def build_cylinder(q_pairs: int, p_pairs: int, l: float) -> ElementLayout:
    """URA wrapped onto a cylinder of circumference ``l``.

    Columns sit at angles ``2*pi*p/p_pairs`` on a ring of radius ``l/(2*pi)``;
    rings are stacked along z with spacing ``l/q_pairs``.
    """
    _check_counts(q_pairs, p_pairs, l)
    q, p = np.meshgrid(np.arange(q_pairs), np.arange(p_pairs), indexing="ij")
    radius = l / (2.0 * np.pi)
    angle = 2.0 * np.pi * p.ravel() / p_pairs
    pairs = np.column_stack([
        radius * np.cos(angle),
        radius * np.sin(angle),
        q.ravel() * (l / q_pairs),
    ])
    positions, pol = _expand_pairs(pairs)
    return ElementLayout(positions, pol, int(p_pairs), int(q_pairs), float(l),
                         ArrayTopology.CYLINDRICAL)


def build_layout(topology, q_pairs, p_pairs, l) -> ElementLayout:
    topology = ArrayTopology(topology)
    if topology is ArrayTopology.URA:
        return build_ura(q_pairs, p_pairs, l)
    return build_cylinder(q_pairs, p_pairs, l)


def place_clusters(n_clusters: int, region: CoverageRegion) -> ClusterLayout:
    """Single cluster at the center, otherwise ``n_clusters`` equally spaced on the boundary."""
    if int(n_clusters) != n_clusters or n_clusters < 1:
        raise ValueError(f"n_clusters must be a positive integer, got {n_clusters}")
    if n_clusters == 1:
        return ClusterLayout(np.zeros((1, 2)))
    angle = 2.0 * np.pi * np.arange(n_clusters) / n_clusters
    centers = region.radius * np.column_stack([np.cos(angle), np.sin(angle)])
    return ClusterLayout(centers)


def drop_users(k: int, region: CoverageRegion, clusters: ClusterLayout,
               rng: np.random.Generator, max_batches: int = 10_000) -> UserDrop:
    """Drop ``k`` users uniformly over the disk, at least ``exclusion_radius`` from every cluster.

    Candidates are generated in batches and accepted in draw order, so the
    result depends only on the generator state.
    """
    if int(k) != k or k < 1:
        raise ValueError(f"user count must be a positive integer, got {k}")
    if not 0 < region.exclusion_radius < region.radius:
        raise ValueError("infeasible coverage region")
    accepted = []
    n_have = 0
    batch = max(2 * k, 16)
    for _ in range(max_batches):
        u = rng.random((batch, 2))
        r = region.radius * np.sqrt(u[:, 0])
        a = 2.0 * np.pi * u[:, 1]
        cand = np.column_stack([r * np.cos(a), r * np.sin(a)])
        d = np.linalg.norm(cand[:, None, :] - clusters.centers[None, :, :], axis=-1)
        ok = cand[d.min(axis=1) >= region.exclusion_radius]
        accepted.append(ok)
        n_have += ok.shape[0]
        if n_have >= k:
            return UserDrop(np.concatenate(accepted)[:k])
    raise ValueError("could not place users: exclusion zones cover the region")
