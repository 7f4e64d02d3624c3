"""Static SVG rasters of horosphere membership for planar domains."""

from __future__ import annotations

import datetime as _dt

import numpy as np

from .domains import BoundaryPoint, ConvexPolygon, Domain, EuclideanBall, HalfDisc, SlitDisc
from .errors import PreconditionError
from .horospheres import IN, OUT, horofunction_bounds
from .metric import MetricBackend
from .surrogate import planar_delta, planar_inside

FILLS = {IN: "#2f6db5", OUT: "#eeeeee", 0: "#e8a33d"}
OUTSIDE_FILL = "#ffffff"
SIZE = 480
CHUNK = 20_000


def membership_raster(backend: MetricBackend, o, x: BoundaryPoint, R: float, flavor: str, resolution: int,
                      both_sides: bool | None = None) -> tuple[np.ndarray, tuple]:
    """Verdict codes on a ``resolution x resolution`` pixel grid over the bounding box.

    Pixels outside the domain hold ``None``-like code 2; for surrogate
    backends, pixels closer to the boundary than the grid spacing are left
    Undetermined.
    """
    dom = backend.domain
    if not dom.planar:
        raise PreconditionError("rasters need a planar domain")
    if int(resolution) < 1:
        raise PreconditionError("resolution must be a positive integer")
    n = int(resolution)
    if both_sides is None:
        both_sides = x.side_tag is not None
    x0, x1, y0, y1 = dom.bbox()
    xs = x0 + (np.arange(n) + 0.5) * (x1 - x0) / n
    ys = y1 - (np.arange(n) + 0.5) * (y1 - y0) / n
    P = (xs[None, :] + 1j * ys[:, None]).ravel()
    codes = np.full(P.shape, 2, int)
    inside = planar_inside(dom, P)
    if backend.mode == "GridSurrogate":
        usable = inside & (planar_delta(dom, np.where(inside, P, 0)) >= backend.h)
        codes[inside & ~usable] = 0
        inside = usable
    idx = np.flatnonzero(inside)
    for start in range(0, len(idx), CHUNK):
        sel = idx[start : start + CHUNK]
        b = horofunction_bounds(backend, o, P[sel], x, both_sides=both_sides)
        codes[sel] = b.classify(R, flavor)
    return codes.reshape(n, n), (x0, x1, y0, y1)


def _boundary_overlay(dom: Domain, to_px) -> list[str]:
    stroke = 'fill="none" stroke="#222222" stroke-width="1.5"'
    if isinstance(dom, (EuclideanBall, SlitDisc, HalfDisc)):
        c = to_px(0j)
        r = to_px(1 + 0j)[0] - c[0]
        out = []
        if isinstance(dom, HalfDisc):
            a, b = to_px(1 + 0j), to_px(-1 + 0j)
            out.append(f'<path d="M {a[0]:.2f} {a[1]:.2f} A {r:.2f} {r:.2f} 0 0 0 {b[0]:.2f} {b[1]:.2f} Z" {stroke}/>')
            return out
        out.append(f'<circle cx="{c[0]:.2f}" cy="{c[1]:.2f}" r="{r:.2f}" {stroke}/>')
        if isinstance(dom, SlitDisc):
            a = to_px(1 + 0j)
            out.append(f'<line x1="{c[0]:.2f}" y1="{c[1]:.2f}" x2="{a[0]:.2f}" y2="{a[1]:.2f}" {stroke}/>')
        return out
    if isinstance(dom, ConvexPolygon):
        pts = " ".join(f"{p[0]:.2f},{p[1]:.2f}" for p in (to_px(v) for v in dom._v))
        return [f'<polygon points="{pts}" {stroke}/>']
    return []


def raster_svg(codes: np.ndarray, box: tuple, dom: Domain, x: BoundaryPoint, title: str = "",
               timestamp: bool = False, marks=()) -> str:
    """SVG 1.1 document: one rect per horizontal run of equal verdicts, boundary and a cross at ``x``.

    ``marks`` are extra planar points drawn as small dots.
    """
    n = codes.shape[0]
    x0, x1, y0, y1 = box
    cell = SIZE / n

    def to_px(z):
        z = complex(z)
        return (z.real - x0) / (x1 - x0) * SIZE, (y1 - z.imag) / (y1 - y0) * SIZE

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
    ]
    if title:
        parts.append(f"<title>{title}</title>")
    if timestamp:
        parts.append(f"<metadata>{_dt.datetime.now(_dt.timezone.utc).isoformat()}</metadata>")
    parts.append(f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="{OUTSIDE_FILL}"/>')
    for i in range(n):
        row = codes[i]
        j = 0
        while j < n:
            k = j
            while k + 1 < n and row[k + 1] == row[j]:
                k += 1
            if row[j] in FILLS:
                parts.append(f'<rect x="{j * cell:.3f}" y="{i * cell:.3f}" width="{(k - j + 1) * cell:.3f}" '
                             f'height="{cell:.3f}" fill="{FILLS[row[j]]}"/>')
            j = k + 1
    parts.extend(_boundary_overlay(dom, to_px))
    cx, cy = to_px(x.coords[0])
    parts.append(f'<path d="M {cx - 6:.2f} {cy - 6:.2f} L {cx + 6:.2f} {cy + 6:.2f} M {cx - 6:.2f} {cy + 6:.2f} '
                 f'L {cx + 6:.2f} {cy - 6:.2f}" stroke="#c0392b" stroke-width="2"/>')
    for m in marks:
        mx, my = to_px(m)
        parts.append(f'<circle cx="{mx:.2f}" cy="{my:.2f}" r="3" fill="#c0392b"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_horosphere_raster(backend: MetricBackend, o, x: BoundaryPoint, R: float, flavor: str = "small",
                             resolution: int = 200, both_sides: bool | None = None, timestamp: bool = False) -> str:
    codes, box = membership_raster(backend, o, x, R, flavor, resolution, both_sides)
    title = f"{flavor} horosphere at {x.label()}, R={R:g}, {backend.label}"
    return raster_svg(codes, box, backend.domain, x, title, timestamp)


def raster_counts(codes: np.ndarray) -> dict:
    return {"in": int(np.sum(codes == IN)), "out": int(np.sum(codes == OUT)), "undetermined": int(np.sum(codes == 0)),
            "outside": int(np.sum(codes == 2))}
