"""Acceptance suite: one PASS/FAIL line per reproducible claim at the pinned seed.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines.
"""

import math

import pytest

from horolab import claims

HALF_LOG3 = 0.5493061443340549
HALF_LOG2 = 0.5 * math.log(2)

# independent checks on the reported metrics, beyond the claim's own verdict
EXTRA = {
    "disc-horofunction-closed-form": lambda m: m["max_abs_error"] < 1e-3 and m["samples"] >= 100,
    "disc-horoball-geometry": lambda m: m["mismatched_pixels"] == 0,
    "horosphere-axioms": lambda m: m["violations"] == 0,
    "polydisc-shilov-dichotomy": lambda m: m["shilov_extra"] == 0 and m["face_extra"] > 0,
    "visibility-singleton-trace": lambda m: m["failures"] == 0,
    "emptiness-threshold": lambda m: abs(m["M"] - HALF_LOG3) < 1e-6 and abs(m["R_threshold"] - 1 / 3) < 1e-6,
    "slit-small-empty": lambda m: m["grid"] >= 10_000 and m["R_empirical"] > 0.9,
    "convex-quasi-geodesic": lambda m: m["disc_alpha"] == 1.0 and m["disc_beta"] <= HALF_LOG2 + 1e-6,
    "gromov-witness": lambda m: m["verdicts"] == "In/In/In",
    "polydisc-nonvisibility": lambda m: m["bidisc"] == "DivergenceEvidence" and m["disc"] == "BoundedEvidence",
    "lattice-delta-growth": lambda m: m["delta_W4"] < m["delta_W8"] < m["delta_W16"],
    "slit-extension-dichotomy": lambda m: (m["slit_psi"], m["slit_phi"]) == ("ExtendsContinuouslyOnly",
                                                                           "NoContinuousExtension"),
    "pushforward-inclusions": lambda m: m["violations"] == 0 and m["in_samples"] > 0,
    "mercer-dini-bounds": lambda m: -1e-9 <= m["mercer_C"] <= HALF_LOG2,
}


def test_every_claim_has_a_check():
    assert sorted(EXTRA) == sorted(claims.known_ids())
    assert len(EXTRA) == 14


@pytest.mark.parametrize("claim_id", claims.known_ids())
def test_claim(claim_id):
    res = claims.reproduce(claim_id)
    ok = res.passed and EXTRA[claim_id](res.metrics)
    line = res.summary()
    print("\n" + ("PASS" if ok else "FAIL") + line[4:])
    assert res.passed, line
    assert EXTRA[claim_id](res.metrics), line
