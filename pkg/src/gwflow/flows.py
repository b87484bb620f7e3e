"""Right-hand sides of the volume-normalized Ricci flow on ``P_n``.

Four equivalent formulations are implemented independently of each other so
they can cross-check the transcription:

* :func:`rhs_full` -- generic blockwise flow in ``(x1, x2, x3)``, derived
  from the Ricci eigenvalue formula; works on any three-summand space.
* :func:`rhs_reduced_x` -- the two-equation system in ``(x1, x2)`` on the
  unit-volume slice of ``P_n``, with ``x3`` eliminated.
* :func:`rhs_phase` -- the same system in ``(phi, psi)`` coordinates.
* :func:`rhs_submersion` -- the restriction to the invariant axis
  ``psi = 0``.

:func:`rhs_reparam` rescales time so that ``phi' = 1`` identically, which
turns finite-time blow-up of the original system into linear growth
``phi(t) = t + phi(0)``.

All phase-side functions guard the powers ``(phi**2 - psi**2)**n`` against
leaving the representable range and raise :class:`RangeExceededError`
instead of returning infinities; long runs deliberately drive ``phi`` to
infinity and integration must stop cleanly.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable

import numpy as np

from .spaces import GWSpace, _require_n, _ricci_values

__all__ = [
    "RangeExceededError",
    "InadmissibleStateError",
    "ReparamInvalidError",
    "rhs_full",
    "rhs_reduced_x",
    "rhs_phase",
    "rhs_submersion",
    "rhs_reparam",
    "submersion_fixed_points",
    "field_full",
    "field_reduced",
    "field_phase",
    "field_reparam",
    "field_submersion",
]

RANGE_LIMIT = 1e280
_X_LIMIT = 1e140  # per-factor bound keeping x_i/(x_j*x_k) within range


class RangeExceededError(ArithmeticError):
    """A guarded power left the representable range; integration should stop."""


class InadmissibleStateError(ValueError):
    """The state violates the domain (``x_i > 0``, ``phi > |psi|``).

    Raised by the right-hand sides; the integrator treats it as a trial
    step that overshot the domain boundary and retries with a smaller step.
    """


class ReparamInvalidError(ValueError):
    """The unit-speed time change requires ``phi' > 0`` at the given point."""


@lru_cache(maxsize=None)
def _phase_bounds(n: int) -> tuple[float, float]:
    # (phi**2 - psi**2)**n must stay within [1/RANGE_LIMIT, RANGE_LIMIT]
    return RANGE_LIMIT ** (-1.0 / n), RANGE_LIMIT ** (1.0 / n)


def _checked_p2(n: int, phi: float, psi: float) -> float:
    if not phi > abs(psi):
        raise InadmissibleStateError(f"inadmissible phase point (phi={phi}, psi={psi})")
    p2 = phi * phi - psi * psi
    lo, hi = _phase_bounds(n)
    if phi * phi > hi or p2 < lo:
        raise RangeExceededError(
            f"(phi^2 - psi^2)^{n} outside representable range at phi={phi}, psi={psi}"
        )
    return p2


def rhs_full(
    space: GWSpace, x1: float, x2: float, x3: float, normalized: bool = True
) -> tuple[float, float, float]:
    """Blockwise flow ``x_i' = -2 r_i x_i + (2 S / d) x_i`` (volume-normalized).

    With ``normalized=False`` the trace term is dropped, giving the plain
    flow ``x_i' = -2 r_i x_i``; no long-run claims are attached to it.
    """
    for x in (x1, x2, x3):
        if not x > 0:
            raise InadmissibleStateError(
                f"scale factors must be positive, got ({x1}, {x2}, {x3})"
            )
        if x > _X_LIMIT or x < 1.0 / _X_LIMIT:
            raise RangeExceededError(f"scale factor {x} outside guarded range")
    r1, r2, r3 = _ricci_values(space, x1, x2, x3)
    if normalized:
        s = space.d1 * r1 + space.d2 * r2 + space.d3 * r3
        trace = 2.0 * s / space.d
    else:
        trace = 0.0
    return (
        (-2.0 * r1 + trace) * x1,
        (-2.0 * r2 + trace) * x2,
        (-2.0 * r3 + trace) * x3,
    )


def rhs_reduced_x(n: int, x1: float, x2: float) -> tuple[float, float]:
    """The two-equation system on the unit-volume slice of ``P_n``."""
    _require_n(n)
    if not (x1 > 0 and x2 > 0):
        raise InadmissibleStateError(f"x1, x2 must be positive, got ({x1}, {x2})")
    lo, hi = _phase_bounds(n)
    prod = x1 * x2
    if max(x1, x2) ** 2 > hi or prod < lo:
        raise RangeExceededError(f"powers of ({x1}, {x2}) outside guarded range")
    inv_pow = 1.0 / prod ** n
    t12 = x1 ** n * x2 ** (n - 2)
    t21 = x1 ** (n - 2) * x2 ** n
    # grouping (t12 + t21) keeps the x1 <-> x2 exchange symmetry bit-exact
    b = (
        2 * (n + 2) * (1.0 / x1 + 1.0 / x2 + prod ** (n - 1) / (n - 1))
        - (t12 + t21)
        - inv_pow
    ) * (n - 1) / (2 * (n + 2) * (2 * n - 1))
    dx1 = -1.0 - x1 / (2 * (n + 2)) * (t12 - t21 - inv_pow) + x1 * b
    dx2 = -1.0 - x2 / (2 * (n + 2)) * (-t12 + t21 - inv_pow) + x2 * b
    return dx1, dx2


def rhs_phase(n: int, phi: float, psi: float) -> tuple[float, float]:
    """The slice system in ``(phi, psi)`` coordinates.

    ``dphi`` is even in ``psi``; ``dpsi`` carries an overall factor ``psi``,
    so the axis ``psi = 0`` is invariant and the sign of ``psi`` is preserved.
    """
    _require_n(n)
    p2 = _checked_p2(n, phi, psi)
    pow4 = 4.0 ** (n - 1)
    q = (n + 2) * (2 * n - 1)
    dphi = (
        -2.0
        + p2 ** (n - 2) / (pow4 * q) * (3 * phi ** 3 - (6 * n - 1) * phi * psi * psi)
        + 4.0 ** n * n * phi / (2 * q * p2 ** n)
        + (n - 1) / (2 * n - 1) * (4 * phi * phi / p2)
    )
    bracket = (
        p2 ** (n - 2) / (pow4 * q) * ((-4 * n + 5) * phi * phi - (2 * n + 1) * psi * psi)
        + 4.0 ** n * n / (2 * q * p2 ** n)
        + (n - 1) / (2 * n - 1) * (4 * phi / p2)
    )
    return dphi, psi * bracket


def rhs_submersion(n: int, phi: float) -> float:
    """Axis restriction: the scalar speed of ``phi`` on the locus ``psi = 0``."""
    _require_n(n)
    if not phi > 0:
        raise InadmissibleStateError(f"phi must be positive, got {phi}")
    _checked_p2(n, phi, 0.0)
    u = phi ** (2 * n - 1)
    return (
        -2.0 + 3 * u / (4.0 ** (n - 1) * (n + 2)) + 4.0 ** n * n / (2 * (n + 2) * u)
    ) / (2 * n - 1)


def rhs_reparam(n: int, phi: float, psi: float) -> tuple[float, float]:
    """Unit-speed system ``(1, dpsi/dphi)``.

    Only defined where the original ``phi`` speed is positive; elsewhere the
    time change does not exist and :class:`ReparamInvalidError` is raised.
    """
    dphi, dpsi = rhs_phase(n, phi, psi)
    if not dphi > 0:
        raise ReparamInvalidError(
            f"phi' = {dphi} <= 0 at (phi={phi}, psi={psi}); reparametrization undefined"
        )
    return 1.0, dpsi / dphi


def submersion_fixed_points(n: int) -> tuple[float, float]:
    """The two roots of the axis equation, in increasing order.

    In ``u = phi**(2n-1)`` the axis speed is a shifted sum ``c1*u + c2/u - c``,
    so the roots solve a quadratic; both correspond to fixed points of the
    full slice system (the axis is invariant).  The discriminant
    ``1 - 6n/(n+2)**2`` is positive for every ``n >= 2``.
    """
    _require_n(n)
    disc = 1.0 - 6.0 * n / (n + 2) ** 2
    base = 4.0 ** (n - 1) * (n + 2) / 3.0
    u_minus = base * (1.0 - math.sqrt(disc))
    u_plus = base * (1.0 + math.sqrt(disc))
    e = 1.0 / (2 * n - 1)
    return u_minus ** e, u_plus ** e


def field_full(space: GWSpace, normalized: bool = True) -> Callable[[float, np.ndarray], np.ndarray]:
    """Integrator-ready vector field for :func:`rhs_full` (state ``[x1, x2, x3]``)."""

    def f(t: float, y: np.ndarray) -> np.ndarray:
        return np.array(rhs_full(space, y[0], y[1], y[2], normalized=normalized))

    return f


def field_reduced(n: int) -> Callable[[float, np.ndarray], np.ndarray]:
    """Vector field for :func:`rhs_reduced_x` (state ``[x1, x2]``)."""

    def f(t: float, y: np.ndarray) -> np.ndarray:
        return np.array(rhs_reduced_x(n, y[0], y[1]))

    return f


def field_phase(n: int) -> Callable[[float, np.ndarray], np.ndarray]:
    """Vector field for :func:`rhs_phase` (state ``[phi, psi]``)."""

    def f(t: float, y: np.ndarray) -> np.ndarray:
        return np.array(rhs_phase(n, y[0], y[1]))

    return f


def field_reparam(n: int) -> Callable[[float, np.ndarray], np.ndarray]:
    """Vector field for :func:`rhs_reparam` (state ``[phi, psi]``)."""

    def f(t: float, y: np.ndarray) -> np.ndarray:
        return np.array(rhs_reparam(n, y[0], y[1]))

    return f


def field_submersion(n: int) -> Callable[[float, np.ndarray], np.ndarray]:
    """Vector field for :func:`rhs_submersion` (state ``[phi]``)."""

    def f(t: float, y: np.ndarray) -> np.ndarray:
        return np.array([rhs_submersion(n, y[0])])

    return f
