"""The long-time flow experiment and its asymptotic diagnostics.

A run starts at ``(phi, psi) = (N, -epsilon)`` -- a slightly asymmetric
perturbation of a fast-expanding locus point -- and integrates the
unit-speed system while watching the Ricci eigenvalues, the sign of
``psi``, and the two divergence functionals ``psi * phi**(2n-2)`` and
``r1 * phi``.  The report records when eigenvalues turn negative, the
final count of negative Ricci eigenvalues, the measured late-time decay
slope of ``psi`` against its predicted value ``(-4n+5)/3``, and whether
the integrated decay bound and divergence thresholds were met.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .flows import field_reparam, rhs_phase, rhs_reparam, rhs_submersion
from .integrate import IntegratorConfig, Monitor, Termination, Trajectory, integrate
from .spaces import (
    GWSpace,
    Metric,
    RicciSpectrum,
    _phase_ricci_values,
    make_pn,
    negative_count,
    smallest_k_positive,
    volume,
)

__all__ = [
    "BadInitialDataError",
    "ExperimentConfig",
    "ExperimentReport",
    "default_initial_phi",
    "run_theorem_experiment",
    "asymptotic_slope",
    "decay_bound_check",
    "divergence_check",
    "positivity_timeline",
]

_DEFAULT_PHI_CANDIDATES = (4.0, 6.0, 8.0, 10.0, 15.0, 20.0, 30.0)
_DECAY_SLACK = 1e-9


class BadInitialDataError(ValueError):
    """The starting point does not realize the experiment's assumptions."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one experiment run.

    ``N`` is the initial ``phi``; ``None`` selects the smallest candidate for
    which the axis speed is at least 1.1 and the initial spectrum is
    positive (see :func:`default_initial_phi`).  ``epsilon`` is the initial
    ``|psi|`` (the run starts at ``psi = -epsilon``); ``epsilon = 0`` is the
    degenerate on-axis run used as a control.
    """

    n: int
    N: float | None = None
    epsilon: float = 1e-3
    t_max: float = 1e4
    psi_phi_threshold: float = -1e3
    r1_phi_threshold: float = -1e2
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12

    def __post_init__(self) -> None:
        if not (isinstance(self.n, int) and self.n >= 2):
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if self.epsilon < 0:
            raise ValueError(f"epsilon must be nonnegative, got {self.epsilon}")
        if self.N is not None:
            if not self.N > 0:
                raise ValueError(f"N must be positive, got {self.N}")
            if not self.N > self.epsilon:
                raise ValueError(f"need N > epsilon, got N={self.N}, epsilon={self.epsilon}")
        if not self.t_max > 0:
            raise ValueError(f"t_max must be positive, got {self.t_max}")


@dataclass(frozen=True)
class ExperimentReport:
    """Outcome of :func:`run_theorem_experiment`."""

    n: int
    N: float
    epsilon: float
    t_r1_negative: float | None
    t_r2_negative: float | None
    final_negative_count: int
    expected_negative_count: int
    initial_spectrum: RicciSpectrum
    final_spectrum: RicciSpectrum
    phi_prime_gt_1: bool
    psi_prime_gt_0: bool
    slope_estimate: float | None
    slope_target: float
    decay_bound_holds: bool
    decay_t0: float | None
    divergence_psi_phi_pow: bool
    divergence_r1_phi: bool
    termination: Termination

    def to_json_dict(self) -> dict:
        """The machine-readable report (schema used by the CLI)."""
        return {
            "n": self.n,
            "N": self.N,
            "epsilon": self.epsilon,
            "t_r1_negative": self.t_r1_negative,
            "t_r2_negative": self.t_r2_negative,
            "final_negative_count": self.final_negative_count,
            "expected_negative_count": self.expected_negative_count,
            "slope_estimate": self.slope_estimate,
            "slope_target": self.slope_target,
            "decay_bound_holds": self.decay_bound_holds,
            "divergence": {
                "psi_phi_pow": self.divergence_psi_phi_pow,
                "r1_phi": self.divergence_r1_phi,
            },
            "monotonicity": {
                "phi_prime_gt_1": self.phi_prime_gt_1,
                "psi_prime_gt_0": self.psi_prime_gt_0,
            },
            "termination": self.termination.value,
        }


def default_initial_phi(n: int, epsilon: float = 1e-3) -> float:
    """Smallest candidate ``N`` with axis speed >= 1.1 and a positive
    spectrum at ``(N, -epsilon)``.

    Makes the otherwise loose requirement "initial ``phi`` large" concrete
    and reproducible.
    """
    for cand in _DEFAULT_PHI_CANDIDATES:
        if rhs_submersion(n, cand) < 1.1:
            continue
        if min(_phase_ricci_values(n, cand, -epsilon)) > 0:
            return cand
    raise BadInitialDataError(
        f"no candidate in {_DEFAULT_PHI_CANDIDATES} gives a positive initial "
        f"spectrum for n={n}, epsilon={epsilon}; reduce epsilon"
    )


def _spectrum_at(space: GWSpace, n: int, phi: float, psi: float) -> RicciSpectrum:
    r1, r2, r3 = _phase_ricci_values(n, phi, psi)
    return RicciSpectrum.from_eigenvalues(r1, r2, r3, *space.dims)


def _metric_at(n: int, phi: float, psi: float) -> Metric:
    x1 = 0.5 * (phi + psi)
    x2 = 0.5 * (phi - psi)
    return Metric(x1, x2, (x1 * x2) ** (-(n - 1)))


def run_theorem_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Integrate the unit-speed system from ``(N, -epsilon)`` and report.

    Raises :class:`BadInitialDataError` when the initial spectrum has a
    nonpositive eigenvalue or the starting ``phi`` speed is not above 1
    (either way ``N`` does not realize the "large initial phi" setup).
    The run ends at ``t_max``, on a range guard, or once the eigenvalue
    sign changes and both divergence thresholds have all been observed.
    """
    n = cfg.n
    space = make_pn(n)
    N = cfg.N if cfg.N is not None else default_initial_phi(n, cfg.epsilon)
    psi0 = -cfg.epsilon

    initial_spectrum = _spectrum_at(space, n, N, psi0)
    if min(initial_spectrum.values) <= 0:
        raise BadInitialDataError(
            f"initial spectrum {initial_spectrum.values} not positive at "
            f"(phi={N}, psi={psi0}); N is too small for the setup"
        )
    dphi0, _ = rhs_phase(n, N, psi0)
    if dphi0 <= 1.0:
        raise BadInitialDataError(
            f"initial phi speed {dphi0} <= 1 at phi={N}; N is not large enough"
        )

    pow_exp = 2 * n - 2

    def r_val(i: int):
        def fn(t: float, y: np.ndarray) -> float:
            return _phase_ricci_values(n, y[0], y[1])[i]

        return fn

    def psi_phi_pow(t: float, y: np.ndarray) -> float:
        return y[1] * y[0] ** pow_exp

    def r1_phi(t: float, y: np.ndarray) -> float:
        return _phase_ricci_values(n, y[0], y[1])[0] * y[0]

    def all_conditions(t: float, y: np.ndarray) -> float:
        r1, r2, _ = _phase_ricci_values(n, y[0], y[1])
        return max(
            r1,
            r2,
            psi_phi_pow(t, y) - cfg.psi_phi_threshold,
            r1_phi(t, y) - cfg.r1_phi_threshold,
        )

    def diagnostics(t: float, y: np.ndarray) -> Mapping[str, float]:
        phi, psi = y
        spec = _spectrum_at(space, n, phi, psi)
        return {
            "phi": phi,
            "psi": psi,
            "r1": spec.r1,
            "r2": spec.r2,
            "r3": spec.r3,
            "S": spec.scalar,
            "V": volume(space, _metric_at(n, phi, psi)),
            "neg_count": float(negative_count(spec)),
            "psi_phi_pow": psi_phi_pow(t, y),
            "r1_phi": r1_phi(t, y),
        }

    monitors = [
        Monitor("r1", r_val(0)),
        Monitor("r2", r_val(1)),
        Monitor("r3", r_val(2)),
        Monitor("psi", lambda t, y: y[1]),
        Monitor("psi_phi_pow", psi_phi_pow, level=cfg.psi_phi_threshold, kind="threshold"),
        Monitor("r1_phi", r1_phi, level=cfg.r1_phi_threshold, kind="threshold"),
        Monitor("all_negative_conditions", all_conditions, kind="stop"),
    ]
    config = IntegratorConfig(t_max=cfg.t_max, rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol)
    traj = integrate(field_reparam(n), [N, psi0], config, monitors, diagnostics)

    ev_r1 = traj.first_event("r1")
    ev_r2 = traj.first_event("r2")
    final_spectrum = _spectrum_at(space, n, traj.y[-1, 0], traj.y[-1, 1])

    # monotonicity of the original-time system, sampled along the run
    dphi_min = math.inf
    dpsi_min = math.inf
    for phi, psi in traj.y:
        dphi, dpsi = rhs_phase(n, phi, psi)
        dphi_min = min(dphi_min, dphi)
        dpsi_min = min(dpsi_min, dpsi)

    if np.all(traj.y[:, 1] < 0):
        slope = asymptotic_slope(traj, n)
    else:
        slope = None
    decay_holds, decay_t0 = decay_bound_check(traj, n)
    divergence = divergence_check(traj, n, cfg.psi_phi_threshold, cfg.r1_phi_threshold)

    return ExperimentReport(
        n=n,
        N=N,
        epsilon=cfg.epsilon,
        t_r1_negative=ev_r1.t if ev_r1 else None,
        t_r2_negative=ev_r2.t if ev_r2 else None,
        final_negative_count=negative_count(final_spectrum),
        expected_negative_count=8 * n - 8,
        initial_spectrum=initial_spectrum,
        final_spectrum=final_spectrum,
        phi_prime_gt_1=bool(dphi_min > 1.0),
        psi_prime_gt_0=bool(dpsi_min > 0.0),
        slope_estimate=slope,
        slope_target=(-4 * n + 5) / 3.0,
        decay_bound_holds=decay_holds,
        decay_t0=decay_t0,
        divergence_psi_phi_pow=divergence["psi_phi_pow"],
        divergence_r1_phi=divergence["r1_phi"],
        termination=traj.termination,
    )


def asymptotic_slope(trajectory: Trajectory, n: int) -> float:
    """The quotient ``psi' * phi / psi`` (unit-speed time) at the last sample.

    Requires ``psi`` nonvanishing along the trajectory; converges to
    ``(-4n+5)/3`` as ``phi`` grows.
    """
    psi = trajectory.y[:, 1]
    if np.any(psi == 0):
        raise ValueError("psi vanishes along the trajectory; slope undefined")
    phi_end, psi_end = trajectory.y[-1]
    _, dpsi = rhs_reparam(n, phi_end, psi_end)
    return dpsi * phi_end / psi_end


def decay_bound_check(trajectory: Trajectory, n: int) -> tuple[bool, float | None]:
    """Check that ``psi * phi**eta`` with ``eta = 4n/3 - 1`` eventually
    decreases monotonically.

    Scans for the first sample index from which the sequence is
    nonincreasing (per-step slack ``1e-9``) through the end; the check
    passes when that index lies before the final 10% of samples.  Returns
    ``(holds, t0)`` with ``t0`` the onset time, or ``(False, None)``.
    """
    eta = 4 * n / 3.0 - 1.0
    phi = trajectory.y[:, 0]
    psi = trajectory.y[:, 1]
    seq = psi * phi ** eta
    if seq.size < 2:
        return False, None
    violations = np.nonzero(np.diff(seq) > _DECAY_SLACK)[0]
    k0 = int(violations[-1]) + 1 if violations.size else 0
    if k0 < 0.9 * seq.size:
        return True, float(trajectory.t[k0])
    return False, None


def divergence_check(
    trajectory: Trajectory,
    n: int,
    psi_phi_threshold: float = -1e3,
    r1_phi_threshold: float = -1e2,
) -> dict[str, bool]:
    """Whether the two divergence functionals dipped below their thresholds
    at any sample."""
    phi = trajectory.y[:, 0]
    psi = trajectory.y[:, 1]
    psi_phi = psi * phi ** (2 * n - 2)
    r1 = np.array([_phase_ricci_values(n, p, q)[0] for p, q in trajectory.y])
    return {
        "psi_phi_pow": bool(np.any(psi_phi < psi_phi_threshold)),
        "r1_phi": bool(np.any(r1 * phi < r1_phi_threshold)),
    }


def positivity_timeline(
    trajectory: Trajectory, space: GWSpace
) -> list[tuple[float, int, int | None]]:
    """Per-sample ``(t, negative_count, smallest k with a k-positive Ricci
    tensor)``; the last entry is ``None`` when no ``k <= d`` works.

    Requires the eigenvalues ``r1, r2, r3`` among the trajectory
    diagnostics.
    """
    diag = trajectory.diagnostics
    if not all(key in diag for key in ("r1", "r2", "r3")):
        raise ValueError("trajectory diagnostics must include r1, r2, r3")
    out = []
    for t, r1, r2, r3 in zip(trajectory.t, diag["r1"], diag["r2"], diag["r3"]):
        spec = RicciSpectrum.from_eigenvalues(r1, r2, r3, *space.dims)
        out.append((float(t), negative_count(spec), smallest_k_positive(spec)))
    return out
