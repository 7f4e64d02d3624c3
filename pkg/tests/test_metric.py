import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from horolab import (
    DimensionError,
    EuclideanBall,
    HalfDisc,
    NotInteriorError,
    Polydisc,
    PreconditionError,
    SlitDisc,
    UnitDisc,
    distance,
    make_backend,
    square,
)
from horolab import conformal
from horolab.metric import (
    kobayashi_ball_contains,
    localization_gap,
    mercer_constant_fit,
    nikolov_andreev_fit,
)

from conftest import random_disc_points

HALF_LOG3 = 0.5493061443340549  # 1/2 log 3 = artanh(1/2)


def _triples(dom, n, seed):
    P = dom.sample_interior(3 * n, seed)
    # keep away from the boundary so float rounding stays far below the tolerance
    P = P[dom.delta_many(P) > 1e-3]
    P = P[: len(P) // 3 * 3]
    return P[0::3], P[1::3], P[2::3]


EXACT = [
    make_backend(UnitDisc()),
    make_backend(EuclideanBall(2)),
    make_backend(Polydisc(2)),
    make_backend(SlitDisc()),
    make_backend(HalfDisc()),
]


@pytest.mark.parametrize("be", EXACT, ids=[b.label for b in EXACT])
def test_metric_axioms_on_random_triples(be):
    Z, W, V = _triples(be.domain, 10_000, seed=5)
    zw, e1 = be.values(Z, W)
    wz, _ = be.values(W, Z)
    zv, e2 = be.values(Z, V)
    vw, e3 = be.values(V, W)
    zz, _ = be.values(Z, Z)
    assert len(zw) >= 9_000
    assert np.array_equal(zw, wz)
    assert np.all(zz == 0)
    assert np.all(zw > 0)
    assert np.all(zw <= zv + vw + e1 + e2 + e3 + 1e-9)


def test_disc_closed_values():
    be = make_backend(UnitDisc())
    assert distance(be, 0, 0.5).value == pytest.approx(HALF_LOG3, abs=1e-15)
    # artanh of the pseudo-distance |1 / (1 - 1/4)| composed: 2 artanh(1/2) = log 3
    assert distance(be, -0.5, 0.5).value == pytest.approx(1.0986122886681098, abs=1e-14)


def test_ball_and_polydisc_closed_values():
    ball = make_backend(EuclideanBall(2))
    assert distance(ball, [0, 0], [0.3, 0.4j]).value == pytest.approx(HALF_LOG3, abs=1e-14)
    bi = make_backend(Polydisc(2))
    assert distance(bi, [0, 0], [0.5, 0.2]).value == pytest.approx(HALF_LOG3, abs=1e-15)
    # the ball on a complex line through 0 is a disc
    assert distance(ball, [0.1, 0.1], [0.3, 0.3]).value == pytest.approx(
        float(make_backend(UnitDisc()).values(0.1 * math.sqrt(2), 0.3 * math.sqrt(2))[0]), abs=1e-12
    )


def test_slit_pole_maps_to_origin():
    # i*sqrt(3 - 2*sqrt2) = i(sqrt2 - 1); its Joukowski image is i; Cayley sends i to 0
    # 3 - 2*sqrt2 loses two digits to cancellation in double precision
    assert conformal.SLIT_POLE == pytest.approx(-0.1715728752538099, abs=1e-15)
    assert abs(complex(conformal.slit_to_disc(conformal.SLIT_POLE))) < 1e-15
    assert abs(complex(conformal.half_disc_to_disc(1j * (math.sqrt(2) - 1)))) < 1e-15


def test_slit_pullback_distance_from_pole():
    be = make_backend(SlitDisc())
    w = complex(conformal.disc_to_slit(0.5j))
    assert distance(be, conformal.SLIT_POLE, w).value == pytest.approx(HALF_LOG3, abs=1e-12)


@given(
    st.complex_numbers(max_magnitude=0.9),
    st.complex_numbers(max_magnitude=0.9),
    st.complex_numbers(max_magnitude=0.9),
    st.floats(0, 2 * math.pi),
)
def test_disc_distance_is_mobius_invariant(u, v, a, theta):
    be = make_backend(UnitDisc())
    d0, _ = be.values(u, v)
    d1, _ = be.values(conformal.mobius(u, a, theta), conformal.mobius(v, a, theta))
    assert d1 == pytest.approx(d0, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("map_id", ["slit_disc", "half_disc"])
def test_pullback_invariant_under_disc_automorphisms(rng, map_id):
    m = conformal.pullback_map(map_id)
    be = make_backend(m.source)
    worst = 0.0
    for _ in range(1000):
        u, v = random_disc_points(rng, 2, 0.8)
        a = random_disc_points(rng, 1, 0.8)[0]
        theta = rng.uniform(0, 2 * np.pi)
        z, w = m.inverse(u), m.inverse(v)
        gz, gw = m.inverse(conformal.mobius(u, a, theta)), m.inverse(conformal.mobius(v, a, theta))
        d0, _ = be.values(z, w)
        d1, _ = be.values(gz, gw)
        worst = max(worst, abs(float(d1 - d0)))
    assert worst < 1e-10


def test_pullback_round_trip(rng):
    for map_id in ("slit_disc", "half_disc"):
        m = conformal.pullback_map(map_id)
        z = m.source.sample_interior(2000, seed=1)[:, 0]
        assert np.max(np.abs(m.inverse(m.forward(z)) - z)) < 1e-10


@pytest.mark.parametrize("small", [SlitDisc(), HalfDisc()], ids=["slit", "half"])
def test_inclusion_monotonicity(small):
    """A smaller domain has the larger distance."""
    disc = make_backend(UnitDisc())
    be = make_backend(small)
    Z, W, _ = _triples(small, 2000, seed=9)
    fit = localization_gap(disc, be, Z, W)
    assert fit.details["violations"] == 0
    assert fit.details["min_gap"] >= -1e-9


def test_ball_inside_bidisc_monotonicity():
    ball = make_backend(EuclideanBall(2))
    bi = make_backend(Polydisc(2))
    Z, W, _ = _triples(ball.domain, 2000, seed=2)
    fit = localization_gap(bi, ball, Z, W)
    assert fit.details["violations"] == 0


def test_surrogate_is_comparable_on_the_disc():
    disc = UnitDisc()
    Z, W, _ = _triples(disc, 60, seed=4)
    keep = (disc.delta_many(Z) > 0.02) & (disc.delta_many(W) > 0.02)
    Z, W = Z[keep], W[keep]
    sur = make_backend(disc, "GridSurrogate", h=0.01)
    v, e = sur.values(Z, W)
    exact, _ = make_backend(disc).values(Z, W)
    ratio = v / exact
    assert np.all(ratio >= 0.25) and np.all(ratio <= 4.0)
    assert sur.comparability == 4.0


@pytest.mark.slow
def test_surrogate_refinement_is_cauchy():
    disc = UnitDisc()
    Z = disc.sample_interior(30, seed=1) * 0.5
    W = disc.sample_interior(30, seed=2) * 0.5
    vals = [make_backend(disc, "GridSurrogate", h=h).values(Z, W)[0] for h in (0.01, 0.005, 0.0025)]
    diffs = [float(np.max(np.abs(b - a))) for a, b in zip(vals, vals[1:])]
    assert diffs[1] < diffs[0]
    assert diffs[-1] < 5e-3


def test_surrogate_handles_a_single_close_pair():
    # one pair of query points within two cells of each other
    sur = make_backend(UnitDisc(), "GridSurrogate", h=0.01)
    v, _ = sur.values(np.array([0.1, 0.5]), np.array([0.105, -0.5]))
    assert np.all(np.isfinite(v)) and v[0] < v[1]


def test_surrogate_grid_too_coarse():
    from horolab import GridResolutionError

    sur = make_backend(UnitDisc(), "GridSurrogate", h=0.05)
    with pytest.raises(GridResolutionError):
        sur.values(0.99, 0.0)


def test_distance_contract_errors():
    be = make_backend(Polydisc(2))
    with pytest.raises(DimensionError):
        distance(be, [0, 0, 0], [0, 0])
    with pytest.raises(NotInteriorError):
        distance(make_backend(UnitDisc()), 0, 1.2)
    with pytest.raises(NotInteriorError):
        distance(make_backend(SlitDisc()), -0.5, 0.5)
    with pytest.raises(PreconditionError):
        make_backend(UnitDisc(), "Hyperbolic")
    with pytest.raises(PreconditionError):
        make_backend(UnitDisc(), "ConformalPullback")
    with pytest.raises(PreconditionError):
        make_backend(Polydisc(2), "GridSurrogate")


def test_default_backends():
    assert make_backend(UnitDisc()).mode == "ExactDisc"
    assert make_backend(SlitDisc()).label == "ConformalPullback(slit_disc)"
    assert make_backend(square()).mode == "GridSurrogate"
    assert make_backend(square(), h=0.05).to_json()["comparability"] == 4.0


def test_kobayashi_ball_membership():
    be = make_backend(UnitDisc())
    assert kobayashi_ball_contains(be, 0, HALF_LOG3 + 1e-9, 0.5)
    assert not kobayashi_ball_contains(be, 0, HALF_LOG3 - 1e-9, 0.5)


def test_mercer_constant_on_the_disc(rng):
    be = make_backend(UnitDisc())
    depth = 10 ** rng.uniform(-8, -0.05, 400)
    W = (1 - depth) * np.exp(2j * np.pi * rng.uniform(0, 1, 400))
    fit = mercer_constant_fit(be, 0, W)
    # k(0, w) - 1/2 log(1/(1-|w|)) = 1/2 log(1 + |w|) lies in [0, 1/2 log 2]
    assert -1e-9 <= fit.value <= 0.5 * math.log(2)
    assert fit.stable


def test_nikolov_andreev_on_a_patch(rng):
    be = make_backend(UnitDisc())
    x = UnitDisc().boundary_point(1.0)

    def patch(n):
        r = 0.2 * np.sqrt(rng.uniform(0, 1, n))
        P = 1 + r * np.exp(1j * rng.uniform(0.5 * np.pi, 1.5 * np.pi, n))
        return P[np.abs(P) < 1]

    Z, W = patch(600), patch(600)
    n = min(len(Z), len(W))
    fit = nikolov_andreev_fit(be, x, 0.2, Z[:n], W[:n])
    assert np.isfinite(fit.value) and fit.value > 0
    assert fit.details["ratio"] < 1.1
    with pytest.raises(PreconditionError):
        nikolov_andreev_fit(be, x, 0.2, np.array([0.0]), np.array([0.1]))


def test_mercer_needs_convex_domain():
    with pytest.raises(PreconditionError):
        mercer_constant_fit(make_backend(SlitDisc()), -0.5, np.array([0.2j]))
