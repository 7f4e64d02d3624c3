import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from horolab import ConvergenceError, EuclideanBall, Polydisc, PreconditionError, SlitDisc, UnitDisc, make_backend, square
from horolab.geodesics import (
    Path,
    certify_landing,
    cluster_points,
    cluster_set,
    convex_quasi_geodesic_point,
    fit_quasi_geodesic_constants,
    geodesic_ray,
    geodesic_segment,
    oscillating_polydisc_ray,
    sigma_path,
    surrogate_segment,
)
from horolab.horospheres import IN, horofunction_bounds, probe_points

EXACT = [make_backend(UnitDisc()), make_backend(EuclideanBall(2)), make_backend(Polydisc(2)), make_backend(SlitDisc())]


@pytest.mark.parametrize("be", EXACT, ids=[b.label for b in EXACT])
def test_segments_are_certified_geodesics(be):
    P = be.domain.sample_interior(20, seed=7)
    for z, w in zip(P[0::2], P[1::2]):
        path = geodesic_segment(be, z, w)
        assert path.kind_claim == "geodesic"
        assert path.certify_geodesic(pairs=200, seed=1) <= 1e-6
        assert path.length == pytest.approx(float(be.values(z, w)[0]), rel=1e-9)


@pytest.mark.parametrize("be", EXACT, ids=[b.label for b in EXACT])
def test_rays_are_certified_and_land(be):
    dom = be.domain
    o = dom.sample_interior(1, seed=2)[0] * 0.5
    for x in dom.sample_boundary(4, seed=3):
        ray = geodesic_ray(be, o, x, T_max=8.0)
        assert ray.certify_geodesic(pairs=200) <= 1e-6
        assert ray.diagnostics["landed"]


@given(st.complex_numbers(max_magnitude=0.8), st.floats(0, 2 * math.pi), st.floats(0.5, 6.0))
def test_ray_agrees_with_segment(o, angle, T):
    be = make_backend(UnitDisc())
    x = UnitDisc().boundary_point(np.exp(1j * angle))
    ray = geodesic_ray(be, o, x, T_max=8.0)
    end = ray.at(np.array([T]))[0]
    seg = geodesic_segment(be, o, end)
    t = np.linspace(0, seg.ts[-1], 25)
    assert seg.ts[-1] == pytest.approx(T, abs=1e-8)
    assert np.max(np.abs(ray.at(t) - seg.at(t))) < 1e-8


def test_disc_ray_closed_form():
    # from 0 toward 1 the unit-speed ray is tanh(t)
    be = make_backend(UnitDisc())
    ray = geodesic_ray(be, 0.0, UnitDisc().boundary_point(1.0), T_max=4.0, n=9)
    assert np.allclose(ray.points[:, 0], np.tanh(ray.ts), atol=1e-14)


def _near_samples(y, depth=20):
    return probe_points(y, depth)[-6:]


@pytest.mark.parametrize("be", [make_backend(UnitDisc()), make_backend(Polydisc(2))], ids=["disc", "bidisc"])
def test_cluster_points_lie_in_big_horosphere_closures(be):
    dom = be.domain
    o = np.zeros(dom.dim)
    for x in dom.sample_boundary(3, seed=5):
        ray = geodesic_ray(be, o, x, T_max=12.0)
        for y, _ in cluster_set(ray):
            b = horofunction_bounds(be, o, _near_samples(y), x)
            for R in (0.25, 1.0, 4.0):
                assert np.all(b.classify(R, "big") == IN)


def test_oscillating_ray_cluster_set_is_a_segment():
    be = make_backend(Polydisc(2))
    ray = oscillating_polydisc_ray(be, T_max=16.0)
    # tail points on the fiber {1} x [-1/2, 1/2]
    clusters = cluster_set(ray, tol=0.05)
    second = sorted(float(bp.coords[1].real) for bp, _ in clusters)
    assert len(clusters) >= 5
    assert second[0] < -0.4 and second[-1] > 0.4
    assert not certify_landing(ray, Polydisc(2).boundary_point([1.0, 0.0]))
    x = Polydisc(2).boundary_point([1.0, 0.0])
    for y, _ in clusters:
        b = horofunction_bounds(be, np.zeros(2), _near_samples(y), x)
        for R in (0.25, 1.0, 4.0):
            assert np.all(b.classify(R, "big") == IN)


def test_oscillating_ray_limits():
    be = make_backend(Polydisc(2))
    with pytest.raises(PreconditionError):
        oscillating_polydisc_ray(be, amplitude=0.7)
    with pytest.raises(PreconditionError):
        oscillating_polydisc_ray(make_backend(UnitDisc()))


@pytest.mark.parametrize("dom", [UnitDisc(), square(), EuclideanBall(2)], ids=["disc", "square", "ball"])
def test_sigma_stays_inside(dom):
    o = np.zeros(dom.dim)
    for x in dom.sample_boundary(5, seed=1):
        t = np.linspace(0, 12, 200)
        P = convex_quasi_geodesic_point(dom, o, x, t)
        assert np.all(dom.contains_many(P))


def test_sigma_needs_convexity():
    dom = SlitDisc()
    with pytest.raises(PreconditionError):
        convex_quasi_geodesic_point(dom, -0.5, dom.boundary_point(-1.0), 1.0)


def test_disc_sigma_fit():
    be = make_backend(UnitDisc())
    path = sigma_path(be, 0.0, UnitDisc().boundary_point(1.0), T=5.0, n=41)
    fit = fit_quasi_geodesic_constants(path)
    assert fit.alpha == 1.0
    assert fit.beta <= 0.5 * math.log(2) + 1e-6


def test_disc_sigma_fit_is_stable_under_refinement():
    be = make_backend(UnitDisc())
    x = UnitDisc().boundary_point(1j)
    fits = [fit_quasi_geodesic_constants(sigma_path(be, 0.0, x, T=5.0, n=n)) for n in (41, 81)]
    assert abs(fits[1].alpha - fits[0].alpha) / fits[0].alpha < 0.05
    assert abs(fits[1].beta - fits[0].beta) < 0.05 * max(fits[0].beta, 1.0)


def test_fit_needs_samples():
    be = make_backend(UnitDisc())
    path = sigma_path(be, 0.0, UnitDisc().boundary_point(1.0), T=1.0, n=5)
    with pytest.raises(PreconditionError):
        fit_quasi_geodesic_constants(path)


def test_fit_rejects_non_quasi_geodesics():
    be = make_backend(UnitDisc())
    # a curve that stalls: distances stop growing while the parameter keeps going
    ts = np.linspace(0, 10, 30)
    pts = 0.5 * np.tanh(ts)
    with pytest.raises(ConvergenceError):
        fit_quasi_geodesic_constants(Path(ts, pts, be), alpha_max=3.0)


def test_surrogate_segment_on_the_square():
    be = make_backend(square(), "GridSurrogate", h=0.05)
    path = surrogate_segment(be, -0.5 + 0j, 0.5 + 0.2j)
    assert path.points[0, 0] == pytest.approx(-0.5) and path.points[-1, 0] == pytest.approx(0.5 + 0.2j)
    assert path.diagnostics["converged"]
    assert path.length <= path.diagnostics["graph_length"] + 1e-12
    assert path.kind_claim == "quasi_geodesic" and path.alpha >= 1.0


def test_segment_errors():
    be = make_backend(UnitDisc())
    with pytest.raises(PreconditionError):
        geodesic_segment(be, 0.1, 0.1)
    with pytest.raises(PreconditionError):
        geodesic_ray(be, 0.0, UnitDisc().boundary_point(1.0), T_max=20.0)
    with pytest.raises(PreconditionError):
        geodesic_ray(make_backend(square(), h=0.1), 0.0, square().edge_midpoint(0))
    with pytest.raises(PreconditionError):
        Path(np.array([0.0, 0.0]), np.array([0.0, 0.1]), be)


def test_greedy_clustering():
    P = np.array([[0.0], [1e-4], [1.0], [1.0 + 1e-4], [0.0]], complex)
    groups = cluster_points(P, 1e-3)
    assert [c for _, c in groups] == [3, 2]
