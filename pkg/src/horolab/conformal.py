"""Closed-form conformal maps between the disc and the planar model domains.

Each map to the disc comes with an accurate ``1 - |f|^2`` evaluator so that
pulled-back distances keep full relative precision near the boundary.

Branch conventions
------------------
* ``cayley(s) = (s - i)/(s + i)`` sends the upper half-plane onto the disc.
* ``joukowski(z) = -(z + 1/z)/2`` sends the upper half-disc onto the upper
  half-plane; its inverse takes the root of ``z^2 + 2 s z + 1`` inside the disc.
* The slit disc ``D minus [0, 1)`` is opened by ``w -> i*sqrt(-w)`` with the
  principal square root, whose cut ``-w in (-1, 0]`` is exactly the slit.  A
  slit point ``t`` seen from above lifts to ``+sqrt(t)``, from below to
  ``-sqrt(t)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .domains import BoundaryPoint, Domain, HalfDisc, SlitDisc, UnitDisc
from .errors import BranchCutError, PreconditionError

SQRT2 = np.sqrt(2.0)
SLIT_POLE = -(3.0 - 2.0 * SQRT2)


def disc_defect(u) -> np.ndarray:
    """``1 - |u|^2`` evaluated as ``(1 - |u|)(1 + |u|)``."""
    r = np.abs(u)
    return (1.0 - r) * (1.0 + r)


def cayley(s):
    s = np.asarray(s, complex)
    return (s - 1j) / (s + 1j)


def cayley_inverse(u):
    u = np.asarray(u, complex)
    return 1j * (1.0 + u) / (1.0 - u)


def cayley_defect(s):
    s = np.asarray(s, complex)
    return 4.0 * s.imag / np.abs(s + 1j) ** 2


def joukowski(z):
    z = np.asarray(z, complex)
    return -0.5 * (z + 1.0 / z)


def joukowski_imag(z):
    """Imaginary part of ``joukowski(z)`` without cancellation."""
    z = np.asarray(z, complex)
    r = np.abs(z)
    return z.imag * (1.0 - r) * (1.0 + r) / (2.0 * r * r)


def joukowski_inverse(s):
    """Root of ``z^2 + 2 s z + 1 = 0`` of modulus at most one (upper half on ties)."""
    s = np.asarray(s, complex)
    q = np.sqrt(s * s - 1.0)
    a, b = -s - q, -s + q
    big = np.where(np.abs(a) >= np.abs(b), a, b)
    small = 1.0 / big
    tie = np.abs(np.abs(big) - 1.0) <= 1e-12
    # on the unit circle both roots have modulus one; keep the upper one
    return np.where(tie & (small.imag < 0), big, small)


def half_disc_to_disc(z):
    """Upper half-disc onto the unit disc."""
    return cayley(joukowski(z))


def half_disc_to_disc_defect(z):
    j = joukowski(z)
    return 4.0 * joukowski_imag(z) / np.abs(j + 1j) ** 2


def disc_to_half_disc(u):
    return joukowski_inverse(cayley_inverse(u))


def slit_lift(w, side: str | None = None):
    """``i*sqrt(-w)``; on the slit itself ``side`` picks the boundary value."""
    w = np.asarray(w, complex)
    on_slit = (w.imag == 0) & (w.real >= 0)
    if np.any(on_slit):
        if side is None:
            raise BranchCutError("slit points need a side ('above' or 'below')")
        root = np.sqrt(np.abs(w.real))
        lifted = np.where(on_slit, root if side == "above" else -root, 1j * np.sqrt(-w))
        return lifted.astype(complex)
    return 1j * np.sqrt(-w)


def slit_to_disc(w, side: str | None = None):
    """Riemann map of the slit disc onto the disc (the inverse of ``disc_to_slit``)."""
    return half_disc_to_disc(slit_lift(w, side))


def slit_to_disc_defect(w):
    return half_disc_to_disc_defect(slit_lift(w))


def disc_to_slit(u):
    z = disc_to_half_disc(u)
    return z * z


def mobius(u, a: complex, theta: float = 0.0):
    """Disc automorphism ``e^{i theta} (u - a)/(1 - conj(a) u)``."""
    u = np.asarray(u, complex)
    return np.exp(1j * theta) * (u - a) / (1.0 - np.conj(a) * u)


def mobius_defect(u, a: complex):
    u = np.asarray(u, complex)
    return disc_defect(a) * disc_defect(u) / np.abs(1.0 - np.conj(a) * u) ** 2


def mobius_inverse(v, a: complex, theta: float = 0.0):
    v = np.asarray(v, complex) * np.exp(-1j * theta)
    return (v + a) / (1.0 + np.conj(a) * v)


@dataclass(frozen=True)
class MapDescriptor:
    """A biholomorphism ``source -> target`` with its inverse.

    ``boundary_forward`` evaluates the continuous extension at a boundary point
    of the source where it exists (side tags select one-sided limits).
    ``to_disc_defect`` is set when the target is the unit disc.
    """

    name: str
    source: Domain
    target: Domain
    forward: Callable
    inverse: Callable
    boundary_forward: Callable | None = None
    boundary_inverse: Callable | None = None
    to_disc_defect: Callable | None = None
    branch_cut: str = ""
    cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __call__(self, z):
        return self.forward(z)

    def inverted(self) -> "MapDescriptor":
        return MapDescriptor(
            name=f"{self.name}^-1",
            source=self.target,
            target=self.source,
            forward=self.inverse,
            inverse=self.forward,
            boundary_forward=self.boundary_inverse,
            boundary_inverse=self.boundary_forward,
            to_disc_defect=None,
            branch_cut=self.branch_cut,
        )

    def boundary_value(self, x: BoundaryPoint) -> complex:
        key = (complex(x.coords[0]), x.side_tag)
        if key not in self.cache:
            if self.boundary_forward is None:
                raise PreconditionError(f"{self.name} has no closed-form boundary extension")
            self.cache[key] = complex(self.boundary_forward(complex(x.coords[0]), x.side_tag))
        return self.cache[key]


def disc_automorphism(a: complex = 0.0, theta: float = 0.0) -> MapDescriptor:
    if abs(a) >= 1:
        raise PreconditionError("automorphism parameter must lie in the disc")
    disc = UnitDisc()
    return MapDescriptor(
        name=f"mobius(a={complex(a):.6g},theta={theta:.6g})",
        source=disc,
        target=disc,
        forward=lambda u: mobius(u, a, theta),
        inverse=lambda v: mobius_inverse(v, a, theta),
        boundary_forward=lambda u, side=None: complex(mobius(u, a, theta)),
        boundary_inverse=lambda v, side=None: complex(mobius_inverse(v, a, theta)),
        to_disc_defect=lambda u: mobius_defect(u, a),
        branch_cut="none",
    )


def _half_disc_boundary(z, side=None):
    if abs(z) < 1e-300:
        raise BranchCutError("the half-disc map has no finite value at 0")
    return complex(half_disc_to_disc(z))


def half_disc_map() -> MapDescriptor:
    """Upper half-disc onto the disc; both boundary maps are continuous."""
    return MapDescriptor(
        name="half_disc",
        source=HalfDisc(),
        target=UnitDisc(),
        forward=half_disc_to_disc,
        inverse=disc_to_half_disc,
        boundary_forward=_half_disc_boundary,
        boundary_inverse=lambda u, side=None: complex(disc_to_half_disc(u)),
        to_disc_defect=half_disc_to_disc_defect,
        branch_cut="joukowski inverse takes the root inside the unit disc",
    )


def _slit_boundary(w, side=None):
    if abs(w) < 1e-300:
        return complex(half_disc_to_disc(1e-300j))
    return complex(slit_to_disc(w, side))


def slit_disc_to_disc() -> MapDescriptor:
    """The map ``phi`` from the slit disc onto the disc."""
    return MapDescriptor(
        name="slit_phi",
        source=SlitDisc(),
        target=UnitDisc(),
        forward=slit_to_disc,
        inverse=disc_to_slit,
        boundary_forward=_slit_boundary,
        boundary_inverse=lambda u, side=None: complex(disc_to_slit(u)),
        to_disc_defect=slit_to_disc_defect,
        branch_cut="principal sqrt of -w; cut along the slit [0, 1)",
    )


def slit_disc_riemann_map() -> MapDescriptor:
    """``psi``: disc onto the slit disc with ``psi(0) = -(3 - 2*sqrt(2))``."""
    m = slit_disc_to_disc().inverted()
    return MapDescriptor(
        name="slit_psi",
        source=m.source,
        target=m.target,
        forward=m.forward,
        inverse=m.inverse,
        boundary_forward=m.boundary_forward,
        boundary_inverse=m.boundary_inverse,
        branch_cut=m.branch_cut,
    )


def slit_preimages(t: float) -> tuple[complex, complex]:
    """The two unimodular points that ``psi`` sends to the slit point ``t``."""
    if not 0 < t < 1:
        raise PreconditionError("slit points lie in (0, 1)")
    r = np.sqrt(t)
    return complex(half_disc_to_disc(r)), complex(half_disc_to_disc(-r))


PULLBACK_MAPS = {"slit_disc": slit_disc_to_disc, "half_disc": half_disc_map}


def pullback_map(map_id: str) -> MapDescriptor:
    try:
        return PULLBACK_MAPS[map_id]()
    except KeyError:
        raise PreconditionError(f"unknown map id {map_id!r}; known: {sorted(PULLBACK_MAPS)}") from None
