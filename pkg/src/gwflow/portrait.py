"""Static SVG phase portraits of the ``(phi, psi)`` vector field.

Arrows of fixed pixel length are sampled on a uniform grid over the
admissible cone ``phi > |psi|``; grid points where the field vanishes get a
dot marker instead (fixed points).  The invariant axis ``psi = 0`` is
highlighted and requested trajectories are overlaid as polylines.  Output
is plain SVG 1.1 text and is byte-identical for identical inputs.
"""

from __future__ import annotations

import math

from .flows import RangeExceededError, field_phase, rhs_phase
from .integrate import IntegratorConfig, integrate

__all__ = ["render_portrait"]

_WIDTH = 800
_HEIGHT = 560
_MARGIN = 40.0
_ARROW_LEN = 11.0
_FIXED_POINT_SPEED = 1e-9


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_portrait(
    n: int,
    phi_range: tuple[float, float],
    psi_range: tuple[float, float],
    grid: tuple[int, int] = (15, 9),
    starts: tuple[tuple[float, float], ...] = (),
    traj_t_max: float = 20.0,
) -> str:
    """Render the vector field of the slice system as a standalone SVG."""
    phi_min, phi_max = phi_range
    psi_min, psi_max = psi_range
    if not (phi_max > phi_min and psi_max > psi_min):
        raise ValueError(f"empty bounding box {phi_range} x {psi_range}")
    border = 0.0 if psi_min <= 0.0 <= psi_max else min(abs(psi_min), abs(psi_max))
    if phi_max <= border:
        raise ValueError(
            f"bounding box {phi_range} x {psi_range} contains no admissible point"
        )
    nx, ny = grid
    if nx < 2 or ny < 1:
        raise ValueError(f"grid must be at least 2x1, got {grid}")

    sx = (_WIDTH - 2 * _MARGIN) / (phi_max - phi_min)
    sy = (_HEIGHT - 2 * _MARGIN) / (psi_max - psi_min)

    def to_px(phi: float, psi: float) -> tuple[float, float]:
        return (
            _MARGIN + (phi - phi_min) * sx,
            _HEIGHT - _MARGIN - (psi - psi_min) * sy,
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
    ]

    # admissible-cone boundary phi = |psi|, clipped to the box
    boundary = []
    for sign in (1.0, -1.0):
        seg = _clip_line_to_box(sign, phi_min, phi_max, psi_min, psi_max)
        if seg is not None:
            (p0, q0), (p1, q1) = seg
            x0, y0 = to_px(p0, q0)
            x1, y1 = to_px(p1, q1)
            boundary.append(
                f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" y2="{_fmt(y1)}" '
                f'stroke="#999999" stroke-width="1" stroke-dasharray="6,4"/>'
            )
    if boundary:
        parts.append('<g id="boundary">')
        parts.extend(boundary)
        parts.append("</g>")

    if psi_min <= 0.0 <= psi_max:
        x0, y0 = to_px(max(phi_min, 0.0), 0.0)
        x1, y1 = to_px(phi_max, 0.0)
        parts.append(
            f'<g id="axis"><line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" '
            f'y2="{_fmt(y1)}" stroke="#0066cc" stroke-width="2"/></g>'
        )

    arrows = []
    markers = []
    for j in range(ny):
        psi = psi_min if ny == 1 else psi_min + j * (psi_max - psi_min) / (ny - 1)
        for i in range(nx):
            phi = phi_min + i * (phi_max - phi_min) / (nx - 1)
            if phi - abs(psi) <= 1e-9:
                continue
            try:
                dphi, dpsi = rhs_phase(n, phi, psi)
            except (RangeExceededError, ValueError):
                continue
            cx, cy = to_px(phi, psi)
            ux, uy = dphi * sx, -dpsi * sy
            speed = math.hypot(ux, uy)
            if math.hypot(dphi, dpsi) < _FIXED_POINT_SPEED:
                markers.append(
                    f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="3.5" fill="#cc3300"/>'
                )
                continue
            ux, uy = ux / speed, uy / speed
            half = _ARROW_LEN / 2.0
            x0, y0 = cx - ux * half, cy - uy * half
            x1, y1 = cx + ux * half, cy + uy * half
            arrows.append(
                f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" y2="{_fmt(y1)}" '
                f'stroke="#555555" stroke-width="1"/>'
            )
            # arrowhead: two barbs at the tip
            bx, by = -ux * 3.5, -uy * 3.5
            px, py = -uy * 2.0, ux * 2.0
            arrows.append(
                f'<path d="M {_fmt(x1)} {_fmt(y1)} L {_fmt(x1 + bx + px)} {_fmt(y1 + by + py)} '
                f'L {_fmt(x1 + bx - px)} {_fmt(y1 + by - py)} Z" fill="#555555"/>'
            )
    parts.append('<g id="vectors">')
    parts.extend(arrows)
    parts.append("</g>")
    if markers:
        parts.append('<g id="fixed-points">')
        parts.extend(markers)
        parts.append("</g>")

    if starts:
        parts.append('<g id="trajectories">')
        for phi0, psi0 in starts:
            points = _trajectory_points(n, phi0, psi0, traj_t_max, phi_min, phi_max, psi_min, psi_max)
            if len(points) >= 2:
                coords = " ".join(f"{_fmt(to_px(p, q)[0])},{_fmt(to_px(p, q)[1])}" for p, q in points)
                parts.append(
                    f'<polyline points="{coords}" fill="none" stroke="#cc3300" stroke-width="1.5"/>'
                )
        parts.append("</g>")

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _clip_line_to_box(sign, phi_min, phi_max, psi_min, psi_max):
    # the ray psi = sign*phi, phi >= 0, clipped to the box
    lo = max(phi_min, 0.0, min(sign * psi_min, sign * psi_max))
    hi = min(phi_max, max(sign * psi_min, sign * psi_max))
    if hi <= lo:
        return None
    return (lo, sign * lo), (hi, sign * hi)


def _trajectory_points(n, phi0, psi0, t_max, phi_min, phi_max, psi_min, psi_max):
    if not phi0 > abs(psi0):
        return []
    cfg = IntegratorConfig(t_max=t_max, rel_tol=1e-8, abs_tol=1e-10, max_steps=20_000)
    traj = integrate(field_phase(n), [phi0, psi0], cfg)
    points = []
    for phi, psi in traj.y:
        points.append((float(phi), float(psi)))
        if not (phi_min <= phi <= phi_max and psi_min <= psi <= psi_max):
            break
    return points
