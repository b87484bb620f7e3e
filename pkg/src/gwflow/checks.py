"""Cross-consistency checks between the independent formulations.

Each check compares two routes to the same quantity on a grid of admissible
states: the coordinate maps must invert each other, the eigenvalue formulas
in the two coordinate systems must agree, the three right-hand sides must be
images of one another under the coordinate maps, and the volume must stay
constant along integrated full-system trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spaces
from .flows import field_full, rhs_full, rhs_phase, rhs_reduced_x, submersion_fixed_points
from .integrate import IntegratorConfig, integrate
from .spaces import Metric, PhasePoint, from_phase, make_pn, to_phase, volume, x3_from_volume_one

__all__ = ["CheckResult", "run_invariant_checks", "phase_grid"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    n: int
    passed: bool
    detail: str


def phase_grid(n_points: int = 20, phi_lo: float = 1.0, phi_hi: float = 5.0,
               ratio: float = 0.85):
    """Admissible ``(phi, psi)`` grid: ``psi = u * phi`` for ``|u| <= ratio``."""
    phis = np.linspace(phi_lo, phi_hi, n_points)
    us = np.linspace(-ratio, ratio, n_points)
    return [(float(p), float(u * p)) for p in phis for u in us]


def _close(a: float, b: float, rtol: float, atol: float) -> bool:
    return abs(a - b) <= atol + rtol * max(abs(a), abs(b))


def _check_round_trip(n: int) -> CheckResult:
    worst = 0.0
    for x1 in np.geomspace(0.2, 5.0, 12):
        for x2 in np.geomspace(0.2, 5.0, 12):
            p = to_phase(n, float(x1), float(x2))
            y1, y2, _ = from_phase(p)
            worst = max(worst, abs(y1 - x1) / x1, abs(y2 - x2) / x2)
    return CheckResult("coordinate-round-trip", n, worst < 1e-14, f"max rel error {worst:.2e}")


def _check_spectrum_agreement(n: int) -> CheckResult:
    space = make_pn(n)
    worst = 0.0
    ok = True
    for phi, psi in phase_grid():
        p = PhasePoint(phi, psi, n)
        sp_phase = spaces.ricci_phase(p)
        sp_x = spaces.ricci_coefficients(space, Metric(*from_phase(p)))
        for a, b in zip(sp_phase.values, sp_x.values):
            worst = max(worst, abs(a - b) / max(abs(a), abs(b), 1e-2))
            if not _close(a, b, 1e-12, 1e-14):
                ok = False
    return CheckResult("spectrum-agreement", n, ok, f"max rel deviation {worst:.2e}")


def _check_rhs_consistency(n: int) -> CheckResult:
    space = make_pn(n)
    ok = True
    worst = 0.0
    for phi, psi in phase_grid():
        x1 = 0.5 * (phi + psi)
        x2 = 0.5 * (phi - psi)
        x3 = x3_from_volume_one(n, x1, x2)
        dx_full = rhs_full(space, x1, x2, x3)
        dx_red = rhs_reduced_x(n, x1, x2)
        d_phase = rhs_phase(n, phi, psi)
        pairs = [
            (dx_full[0], dx_red[0]),
            (dx_full[1], dx_red[1]),
            (d_phase[0], dx_red[0] + dx_red[1]),
            (d_phase[1], dx_red[0] - dx_red[1]),
        ]
        for a, b in pairs:
            worst = max(worst, abs(a - b) / max(abs(a), abs(b), 1.0))
            if not _close(a, b, 1e-10, 1e-12):
                ok = False
    return CheckResult("rhs-consistency", n, ok, f"max rel deviation {worst:.2e}")


def _check_volume_conservation(n: int) -> CheckResult:
    space = make_pn(n)
    phi0 = 1.1 * submersion_fixed_points(n)[0]
    x = phi0 / 2
    y0 = [x, x, x3_from_volume_one(n, x, x)]
    cfg = IntegratorConfig(t_max=5.0)
    traj = integrate(field_full(space), y0, cfg)
    drift = max(abs(volume(space, Metric(*state)) - 1.0) for state in traj.y)
    return CheckResult("volume-conservation", n, drift < 1e-8, f"max |V-1| = {drift:.2e}")


def run_invariant_checks(n_max: int = 6) -> list[CheckResult]:
    """All consistency checks for every ``n`` from 2 to ``n_max``."""
    if not (isinstance(n_max, int) and n_max >= 2):
        raise ValueError(f"n_max must be an integer >= 2, got {n_max!r}")
    results = []
    for n in range(2, n_max + 1):
        results.append(_check_round_trip(n))
        results.append(_check_spectrum_agreement(n))
        results.append(_check_rhs_consistency(n))
        results.append(_check_volume_conservation(n))
    return results
