import math

import numpy as np
import pytest

from horolab import BranchCutError, PreconditionError, SlitDisc, UnitDisc, make_backend
from horolab import conformal
from horolab import horospheres as hs
from horolab.extension import (
    boundary_cluster_set,
    disc_pole_radius,
    extension_verdict,
    horosphere_pushforward_check,
    jordan_dichotomy_report,
    metrically_regular_probe,
)
from horolab.gromov import gromov_products

from conftest import random_disc_points

DISC = UnitDisc()
SLIT = SlitDisc()
QUARTER_PREIMAGES = ((9 + 40j) / 41, (9 - 40j) / 41)  # Cayley images of the Joukowski values -+5/4


def test_slit_preimages_of_a_quarter():
    above, below = conformal.slit_preimages(0.25)
    assert above == pytest.approx(QUARTER_PREIMAGES[0], abs=1e-15)
    assert below == pytest.approx(QUARTER_PREIMAGES[1], abs=1e-15)
    for p in (above, below):
        assert complex(conformal.disc_to_slit(p)) == pytest.approx(0.25, abs=1e-12)
    with pytest.raises(PreconditionError):
        conformal.slit_preimages(1.5)


def test_psi_sends_origin_to_the_pole():
    assert complex(conformal.disc_to_slit(0j)) == pytest.approx(conformal.SLIT_POLE, abs=1e-15)


def test_slit_boundary_values_need_a_side():
    phi = conformal.slit_disc_to_disc()
    with pytest.raises(BranchCutError):
        conformal.slit_lift(np.array([0.5 + 0j]))
    up = phi.boundary_value(SLIT.boundary_point(0.25, "above"))
    down = phi.boundary_value(SLIT.boundary_point(0.25, "below"))
    got = sorted([complex(up), complex(down)], key=lambda z: z.imag)
    assert got == pytest.approx([QUARTER_PREIMAGES[1], QUARTER_PREIMAGES[0]], abs=1e-9)


def test_half_disc_boundary_map_has_no_value_at_the_origin():
    half = conformal.half_disc_map()
    with pytest.raises(BranchCutError):
        half.boundary_forward(0j)


def test_automorphisms_extend_homeomorphically():
    rng = np.random.default_rng(1)
    for _ in range(3):
        a = random_disc_points(rng, 1, 0.6)[0]
        m = conformal.disc_automorphism(a, rng.uniform(0, 2 * np.pi))
        rep = extension_verdict(m, DISC.sample_boundary(16, 2), DISC.sample_boundary(16, 3))
        assert rep.verdict == "ExtendsHomeomorphically"
        assert all(len(r) == 4 for r in rep.correspondence_rows())


def test_half_disc_map_extends_homeomorphically():
    m = conformal.half_disc_map()
    rep = extension_verdict(m, m.source.sample_boundary(24, 6), DISC.sample_boundary(24, 7))
    assert rep.verdict == "ExtendsHomeomorphically"


def test_psi_glues_two_preimages():
    psi = conformal.slit_disc_riemann_map()
    pre = [DISC.boundary_point(p) for p in QUARTER_PREIMAGES]
    quarter = SLIT.siblings(SLIT.boundary_point(0.25, "above"))
    rep = extension_verdict(psi, DISC.sample_boundary(12, 1) + pre, SLIT.sample_boundary(8, 2) + quarter)
    assert rep.verdict == "ExtendsContinuouslyOnly"
    w = [w for w in rep.witnesses if w["kind"] == "shared_image" and abs(complex(*w["value"]) - 0.25) < 1e-9]
    assert w
    got = sorted((complex(*q) for q in w[0]["preimages"]), key=lambda z: z.imag)
    assert got[0] == pytest.approx(QUARTER_PREIMAGES[1], abs=1e-3)
    assert got[1] == pytest.approx(QUARTER_PREIMAGES[0], abs=1e-3)


def test_inverse_cluster_duality_on_the_slit():
    """Two sources hit 1/4, so the inverse cluster set there has two points."""
    phi = conformal.slit_disc_to_disc()
    cs = boundary_cluster_set(phi, SLIT.boundary_point(0.25, "above"))
    assert len(cs.points) == 2 and not cs.inconclusive
    one_side = boundary_cluster_set(phi, SLIT.boundary_point(0.25, "above"), both_sides=False)
    assert one_side.singleton


def test_phi_has_no_continuous_extension_at_a_slit_point():
    phi = conformal.slit_disc_to_disc()
    rep = extension_verdict(phi, SLIT.siblings(SLIT.boundary_point(0.5, "above")), DISC.sample_boundary(8, 1))
    assert rep.verdict == "NoContinuousExtension"
    assert rep.to_json()["multi_forward"] == 1


def _transport_case(rng):
    phi = conformal.slit_disc_to_disc()
    o, z = conformal.disc_to_slit(random_disc_points(rng, 2, 0.8))
    angle = rng.uniform(0.2, 2 * np.pi - 0.2)
    return phi, complex(o), complex(z), SLIT.boundary_point(np.exp(1j * angle))


def test_lab_quantities_are_invariant_under_transport():
    rng = np.random.default_rng(11)
    be = make_backend(SLIT)
    disc_be = make_backend(DISC)
    for _ in range(200):
        phi, o, z, x = _transport_case(rng)
        fo, fz, xi = complex(phi.forward(o)), complex(phi.forward(z)), phi.boundary_value(x)
        est = hs.horofunction_interval(be, o, z, x)
        exact = float(hs.disc_horofunction_exact(fz, xi) - hs.disc_horofunction_exact(fo, xi))
        assert abs(est.hi - exact) <= est.err + 1e-3
        w = complex(conformal.disc_to_slit(random_disc_points(rng, 1, 0.9)[0]))
        g, e = gromov_products(be, o, z, w)
        gd, _ = gromov_products(disc_be, fo, fz, complex(phi.forward(w)))
        assert abs(float(g) - float(gd)) <= float(e) + 1e-9
        R = math.exp(rng.uniform(-1, 1))
        v = hs.horosphere_membership(be, o, x, R, z, "big")
        if v.status != "Undetermined":
            assert (v.status == "In") == (exact < 0.5 * math.log(R))


def test_disc_pole_radius():
    # moving the pole to o rescales the radius by exp(2 h_0(o, xi))
    assert disc_pole_radius(0.0, 1.0, 2.0) == pytest.approx(2.0)
    assert disc_pole_radius(0.5, 1.0, 1.0) == pytest.approx(1 / 3)


def test_pushforward_under_an_automorphism():
    m = conformal.disc_automorphism(0.3 + 0.2j, 0.4)
    be = make_backend(DISC)
    x = DISC.boundary_point(np.exp(1.1j))
    Z = DISC.sample_interior(1000, 4)
    for flavor in ("big", "small"):
        rep = horosphere_pushforward_check(be, m, 0.1j, x, (0.5, 1.0, 2.0), Z, flavor)
        assert rep.passed and rep.counts["in"] > 0


def test_pushforward_of_the_slit_map():
    phi = conformal.slit_disc_to_disc()
    be = make_backend(SLIT)
    x = SLIT.boundary_point(np.exp(2.0j))
    Z = hs.slit_scan_grid(30, 30)
    rep = horosphere_pushforward_check(be, phi, conformal.SLIT_POLE, x, (0.5, 1.0, 2.0), Z)
    assert rep.passed and rep.counts["in"] > 0


def test_pushforward_notes_vacuous_checks():
    m = conformal.disc_automorphism(0.0, 0.0)
    be = make_backend(DISC)
    rep = horosphere_pushforward_check(be, m, 0.0, DISC.boundary_point(1.0), (1e-6,), np.array([-0.5, 0.5j]))
    assert rep.counts["in"] == 0 and rep.notes


def test_metric_regularity_on_the_disc():
    be = make_backend(DISC)
    pairs = [(1.0, 1j), (1.0, -1.0)]
    rep = metrically_regular_probe(be, pairs, (0.2, 0.5, 0.7), raster=200)
    assert rep.passed and rep.counts["max_limit_spread"] < 1e-6
    with pytest.raises(PreconditionError):
        metrically_regular_probe(be, [(1.0, 1.0)], (0.5,), raster=50)
    with pytest.raises(PreconditionError):
        metrically_regular_probe(make_backend(SLIT), pairs, (0.5,))


def test_dichotomy_horns():
    phi = conformal.slit_disc_to_disc()
    rep = jordan_dichotomy_report(phi, SLIT.sample_boundary(12, 3), DISC.sample_boundary(12, 4), make_backend(SLIT),
                                  prefer=0.5)
    assert rep.horn == 2
    assert rep.witness["R"] < rep.witness["R_empirical"]
    half = conformal.half_disc_map()
    assert jordan_dichotomy_report(half, half.source.sample_boundary(16, 1), DISC.sample_boundary(16, 2)).horn == 1
