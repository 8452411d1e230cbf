import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperlat import (
    PointConfiguration,
    WindowTooSmall,
    campbell_check,
    depalmize,
    lattice_configuration,
    perturb_palm_lattice,
    perturb_point_set,
    poisson_configuration,
)
from hyperlat.pointproc import TEST_FUNCTIONS, translated
from hyperlat.tableio import read_points, write_points

from conftest import mc_mean


def test_palm_contains_origin_exactly(key):
    cfg = perturb_palm_lattice(0.25, 500, key)
    assert np.any(cfg.points == 0.0)
    assert len(cfg) == 1001
    assert np.all(np.diff(cfg.points) >= 0)


def test_palm_deterministic(key):
    a = perturb_palm_lattice(0.3, 128, key)
    b = perturb_palm_lattice(0.3, 128, key)
    assert np.array_equal(a.points, b.points)


def test_palm_mean_count_is_window_length(key):
    # Mean count in [-r, r] with r = N/4 approximates 2r at 5 standard errors.
    h, N, M = 0.25, 2**15, 2000
    r = N / 4.0
    counts = np.empty(M)
    for m in range(M):
        pts = perturb_palm_lattice(h, N, key.child(m)).points
        counts[m] = np.searchsorted(pts, r, "right") - np.searchsorted(pts, -r, "left")
    est, se = mc_mean(counts)
    assert abs(est - 2 * r) < 5 * se


def test_perturb_point_set_origin_only(key):
    base = PointConfiguration(points=np.array([0.0]), kind="palm", meta={})
    out = perturb_point_set(base, 0.25, key)
    assert np.array_equal(out.points, [0.0])


def test_perturb_point_set_single_gaussian_marginal(key):
    base = PointConfiguration(points=np.array([0.0, 5.0]), kind="palm", meta={})
    M = 20000
    second = np.empty(M)
    for m in range(M):
        second[m] = perturb_point_set(base, 0.25, key.child(m)).points[-1]
    est, se = mc_mean(second)
    assert abs(est - 5.0) < 5 * se
    vest, vse = mc_mean((second - 5.0) ** 2)
    assert abs(vest - 5.0**0.5) < 5 * vse


def test_perturb_point_set_lattice_path_matches_lattice_sampler(key):
    # Counting statistics agree between the two constructions.
    h, N, M = 0.25, 256, 600
    r = N / 4.0
    base = lattice_configuration(N)
    c1 = np.empty(M)
    c2 = np.empty(M)
    for m in range(M):
        p1 = perturb_point_set(base, h, key.child(m)).points
        p2 = perturb_palm_lattice(h, N, key.child(M + m)).points
        c1[m] = np.searchsorted(p1, r, "right") - np.searchsorted(p1, -r, "left")
        c2[m] = np.searchsorted(p2, r, "right") - np.searchsorted(p2, -r, "left")
    m1, s1 = mc_mean(c1)
    m2, s2 = mc_mean(c2)
    assert abs(m1 - m2) < 5 * np.hypot(s1, s2)
    v1, vs1 = mc_mean((c1 - m1) ** 2)
    v2, vs2 = mc_mean((c2 - m2) ** 2)
    assert abs(v1 - v2) < 5 * np.hypot(vs1, vs2)


def test_depalmize_preserves_gaps(key):
    cfg = perturb_palm_lattice(0.25, 512, key)
    out = depalmize(cfg, 128.0, key.child(1))
    scale = np.abs(cfg.points).max() + 128.0
    assert np.max(np.abs(np.diff(out.points) - np.diff(cfg.points))) <= 8 * np.finfo(float).eps * scale
    assert out.kind == "stationarized"
    assert out.meta["shift_halfwidth"] == 128.0


def test_depalmize_is_translation(key):
    cfg = perturb_palm_lattice(0.25, 64, key)
    out = depalmize(cfg, 16.0, key.child(1))
    u = out.meta["shift"]
    assert abs(u) <= 16.0
    assert np.array_equal(out.points, cfg.points + u)


def test_depalmize_origin_generically_absent(key):
    for i in range(20):
        out = depalmize(perturb_palm_lattice(0.25, 64, key.child(i)), 16.0, key.child(100 + i))
        assert not np.any(out.points == 0.0)


def test_depalmize_window_guard(key):
    cfg = perturb_palm_lattice(0.25, 64, key)
    with pytest.raises(WindowTooSmall):
        depalmize(cfg, cfg.extent / 2.0, key.child(1))


def test_mean_nearest_neighbour_gap_is_unit(key):
    gaps = []
    for m in range(200):
        cfg = depalmize(perturb_palm_lattice(0.25, 512, key.child(m)), 128.0, key.child(5000 + m))
        gaps.append(np.diff(cfg.points).mean())
    est, se = mc_mean(np.asarray(gaps))
    assert abs(est - 1.0) < 5 * se


def test_stationarized_intensity(key):
    # Mean count in [0, r], r = N/8, after a shift of halfwidth N/4.
    N, M = 2**12, 1000
    r = N / 8.0
    counts = np.empty(M)
    for m in range(M):
        sub = key.child(m)
        cfg = depalmize(perturb_palm_lattice(0.25, N, sub.child(0)), N / 4.0, sub.child(1))
        pts = cfg.points
        counts[m] = np.searchsorted(pts, r, "right") - np.searchsorted(pts, 0.0, "left")
    est, se = mc_mean(counts)
    assert abs(est - r) < 5 * se


def test_lattice_and_poisson_generators(key):
    lat = lattice_configuration(16)
    assert np.array_equal(lat.points, np.arange(-16.0, 17.0))
    pois = poisson_configuration(500.0, key)
    est = len(pois) / 1000.0
    assert abs(est - 1.0) < 5 * np.sqrt(1000.0) / 1000.0


def test_configuration_validation():
    with pytest.raises(ValueError):
        PointConfiguration(points=np.array([1.0, 0.5]), kind="palm", meta={})
    with pytest.raises(ValueError):
        PointConfiguration(points=np.array([1.0, 2.0]), kind="palm", meta={})  # no origin
    with pytest.raises(ValueError):
        PointConfiguration(points=np.array([0.0]), kind="banana", meta={})


@given(st.integers(min_value=1, max_value=64), st.integers(min_value=0, max_value=1000))
def test_constructors_sorted(N, idx):
    from hyperlat import StreamKey

    cfg = perturb_palm_lattice(0.5, N, StreamKey(17).child(idx))
    assert np.all(np.diff(cfg.points) >= 0)
    assert len(cfg) == 2 * N + 1


# -- Campbell check ---------------------------------------------------------


def test_campbell_constant_function(key):
    res = campbell_check(0.25, 256, 100, "one", key)
    assert res.lhs == 1.0
    assert abs(res.z) <= 4.0


@pytest.mark.parametrize("fn", ["count_pm2", "empty_halfgap"])
def test_campbell_zscore_small(fn, key):
    res = campbell_check(0.25, 2**10, 800, fn, key)
    assert abs(res.z) <= 4.0, res


def test_campbell_unknown_function(key):
    with pytest.raises(ValueError):
        campbell_check(0.25, 64, 10, "nope", key)


def test_test_function_library():
    pts = np.array([-3.0, -1.5, 0.0, 0.7, 2.5])
    assert TEST_FUNCTIONS["count_pm2"](pts) == 3.0
    assert TEST_FUNCTIONS["empty_halfgap"](pts) == 1.0
    assert TEST_FUNCTIONS["empty_halfgap"](np.array([-1.0, 0.0, 0.3])) == 0.0


# -- serialization ----------------------------------------------------------


def test_points_roundtrip(tmp_path, key):
    cfg = perturb_palm_lattice(0.25, 100, key)
    path = tmp_path / "pts.csv"
    write_points(path, cfg.points, {"kind": "points", "h": 0.25, "n": 200})
    meta, pts = read_points(path)
    assert np.array_equal(pts, cfg.points)
    assert meta["kind"] == "points"
    assert float(meta["h"]) == 0.25


def test_translated_helper(key):
    cfg = depalmize(perturb_palm_lattice(0.25, 32, key), 8.0, key.child(1))
    out = translated(cfg, 2.5)
    assert np.array_equal(out.points, cfg.points + 2.5)
