import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mimodeploy.geometry import (ArrayTopology, CoverageRegion, build_cylinder,
                                 build_ura, drop_users, place_clusters)

from conftest import WAVELENGTH as LAM


def unique_rows(a):
    return np.unique(np.round(a, 12), axis=0)


def test_ura_default_spacing():
    lay = build_ura(16, 8, 2 * LAM)
    assert lay.n_elements == 256
    pts = lay.pair_positions
    xs = np.unique(np.round(pts[:, 0], 12))
    zs = np.unique(np.round(pts[:, 2], 12))
    assert np.allclose(np.diff(xs), LAM / 4)
    assert np.allclose(np.diff(zs), LAM / 8)
    assert np.all(pts[:, 1] == 0)


def test_ura_single_pair_at_origin():
    lay = build_ura(1, 1, 0.3)
    assert lay.n_elements == 2
    assert np.all(lay.positions == 0)
    assert list(lay.pol) == [0, 1]


def test_ura_two_by_two():
    lay = build_ura(2, 2, 2 * LAM)
    assert lay.n_elements == 8
    grid = unique_rows(lay.positions)
    assert len(grid) == 4
    expected = np.array([[0, 0, 0], [LAM, 0, 0], [0, 0, LAM], [LAM, 0, LAM]])
    assert np.allclose(np.sort(grid, axis=0), np.sort(expected, axis=0))


def test_cylinder_default_layout():
    lay = build_cylinder(16, 8, 2 * LAM)
    pts = lay.pair_positions
    r = np.hypot(pts[:, 0], pts[:, 1])
    assert np.allclose(r, LAM / np.pi, rtol=1e-12)
    ang = np.unique(np.round(np.degrees(np.arctan2(pts[:, 1], pts[:, 0])) % 360, 9))
    assert np.allclose(ang, np.arange(0, 360, 45))


def test_cylinder_single_pair():
    lay = build_cylinder(1, 1, 1.0)
    assert lay.n_elements == 2
    assert np.array_equal(lay.positions[0], lay.positions[1])


def test_cylinder_four_columns_unit_radius():
    lay = build_cylinder(1, 4, 2 * np.pi)
    expected = np.array([[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]], float)
    assert np.allclose(lay.pair_positions, expected, atol=1e-12)


@pytest.mark.parametrize("builder", [build_ura, build_cylinder])
@pytest.mark.parametrize("args", [(0, 2, 1.0), (2, 0, 1.0), (2, 2, 0.0), (2, 2, -1.0)])
def test_invalid_arguments(builder, args):
    with pytest.raises(ValueError):
        builder(*args)


@settings(max_examples=40, deadline=None)
@given(q=st.integers(1, 12), p=st.integers(1, 12), l=st.floats(0.01, 10.0))
def test_layout_invariants(q, p, l):
    for lay in (build_ura(q, p, l), build_cylinder(q, p, l)):
        assert lay.n_elements == 2 * p * q
        assert np.array_equal(lay.positions[0::2], lay.positions[1::2])
        assert np.all(lay.pol[0::2] == 0) and np.all(lay.pol[1::2] == 1)
    ura = build_ura(q, p, l).positions
    assert np.all(ura[:, 1] == 0)
    assert ura[:, 0].min() >= 0 and ura[:, 0].max() <= l
    assert ura[:, 2].min() >= 0 and ura[:, 2].max() <= l
    cyl = build_cylinder(q, p, l).positions
    r2 = cyl[:, 0] ** 2 + cyl[:, 1] ** 2
    assert np.allclose(r2, (l / (2 * np.pi)) ** 2, rtol=1e-12, atol=0)


@settings(max_examples=20, deadline=None)
@given(q=st.integers(1, 10), l=st.floats(0.01, 10.0))
def test_single_column_cylinder_is_translated_ura(q, l):
    ura = build_ura(q, 1, l).positions
    cyl = build_cylinder(q, 1, l).positions
    shift = cyl[0] - ura[0]
    assert np.allclose(cyl - shift, ura, atol=1e-12)


def test_topology_enum():
    assert ArrayTopology("ura") is ArrayTopology.URA
    assert build_cylinder(2, 2, 1.0).topology is ArrayTopology.CYLINDRICAL


def test_place_clusters():
    assert np.array_equal(place_clusters(1, CoverageRegion(1000, 50)).centers, [[0, 0]])
    c4 = place_clusters(4, CoverageRegion(1000, 50)).centers
    assert np.allclose(c4, [[1000, 0], [0, 1000], [-1000, 0], [0, -1000]], atol=1e-9)
    c2 = place_clusters(2, CoverageRegion(500, 50)).centers
    assert np.allclose(c2, [[500, 0], [-500, 0]], atol=1e-9)
    with pytest.raises(ValueError):
        place_clusters(0, CoverageRegion())


def test_region_validation():
    with pytest.raises(ValueError):
        CoverageRegion(100, 100)
    with pytest.raises(ValueError):
        CoverageRegion(100, 0)


def test_drop_deterministic():
    region = CoverageRegion()
    cl = place_clusters(4, region)
    a = drop_users(32, region, cl, np.random.default_rng(5))
    b = drop_users(32, region, cl, np.random.default_rng(5))
    assert np.array_equal(a.positions, b.positions)


def test_drop_radial_law():
    # area-uniform on the annulus 50 <= r <= 1000: F(r) = (r^2 - a^2) / (R^2 - a^2)
    region = CoverageRegion(1000.0, 50.0)
    cl = place_clusters(1, region)
    drop = drop_users(1000, region, cl, np.random.default_rng(11))
    r = np.sort(np.linalg.norm(drop.positions, axis=1))
    law = (r ** 2 - 50.0 ** 2) / (1000.0 ** 2 - 50.0 ** 2)
    n = len(r)
    ks = max(np.max(np.arange(1, n + 1) / n - law), np.max(law - np.arange(n) / n))
    assert ks < 0.05


@pytest.mark.parametrize("n", [1, 2, 4])
def test_drop_distance_window(n):
    region = CoverageRegion()
    cl = place_clusters(n, region)
    drop = drop_users(500, region, cl, np.random.default_rng(n))
    d = drop.distances(cl)
    assert d.shape == (n, 500)
    assert np.all(d.min(axis=0) >= 50)
    assert np.all(np.linalg.norm(drop.positions, axis=1) <= 1000)
    if n == 1:
        assert np.all((d >= 50) & (d <= 1000))


def test_drop_rejects_bad_count():
    region = CoverageRegion()
    with pytest.raises(ValueError):
        drop_users(0, region, place_clusters(1, region), np.random.default_rng(0))
