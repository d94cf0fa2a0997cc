"""Independent numerical cross-check: fixed-step RK4 on the raw flow.

The integrator never touches the spectral machinery.  It probes the
right-hand side at basis states to recover the (exactly affine) field on
(f11, f12, f21) and then applies the classical 4th-order step; on an affine
field the step is itself affine, so it is precomputed once and iterated,
which reproduces the literal RK4 sequence up to rounding at a fraction of
the cost.  Trace is never renormalized: drift is a measured diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .generator import rhs
from .model import SystemSpec, as_density, coords, det2, from_coords

DEFAULT_DT = 1e-3


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step configuration; dt must clear the stability gate
    dt <= 0.1 / max(||H||, c^2 ||l||^2) for the system it is used with."""

    dt: float
    t_end: float
    record_stride: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ConfigError("dt must be positive and finite")
        if not (math.isfinite(self.t_end) and self.t_end > 0.0):
            raise ConfigError("t_end must be positive and finite")
        if self.record_stride < 1:
            raise ConfigError("record_stride must be >= 1")


def stiffness_scale(spec: SystemSpec) -> float:
    """max(||H||, c^2 ||l||^2) in the operator norm."""
    h_norm = float(np.linalg.norm(spec.hamiltonian.matrix, ord=2))
    l_norm = float(np.linalg.norm(spec.lindblad.small_l(), ord=2))
    return max(h_norm, spec.c * spec.c * l_norm * l_norm)


def _affine_field(spec: SystemSpec) -> tuple[np.ndarray, np.ndarray]:
    """Recover x' = M x + q on (f11, f12, f21) from rhs probes alone."""

    def probe(x: np.ndarray) -> np.ndarray:
        # rhs is linear in rho (no conjugation), so non-Hermitian probes are fine.
        return coords(rhs(spec, from_coords(x)))

    zero = np.zeros(3, dtype=complex)
    q = probe(zero)
    cols = []
    for i in range(3):
        e = np.zeros(3, dtype=complex)
        e[i] = 1.0
        cols.append(probe(e) - q)
    return np.column_stack(cols), q


def _step_maps(m: np.ndarray, q: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """One classical RK4 step of an affine field, as x -> P x + r."""
    eye = np.eye(3, dtype=complex)
    m2 = m @ m
    m3 = m2 @ m
    m4 = m3 @ m
    p = eye + dt * m + dt**2 / 2.0 * m2 + dt**3 / 6.0 * m3 + dt**4 / 24.0 * m4
    r = dt * (eye + dt / 2.0 * m + dt**2 / 6.0 * m2 + dt**3 / 24.0 * m3) @ q
    return p, r


def _check_gate(spec: SystemSpec, dt: float) -> None:
    scale = stiffness_scale(spec)
    if scale > 0.0 and dt > 0.1 / scale:
        raise ConfigError(
            f"dt = {dt:g} violates the stability gate 0.1 / {scale:g}"
        )


def integrate(
    spec: SystemSpec, rho0, cfg: IntegratorConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate the flow; returns (times, states) at the recorded strides."""
    _check_gate(spec, cfg.dt)
    rho0 = as_density(rho0)
    m, q = _affine_field(spec)
    p, r = _step_maps(m, q, cfg.dt)
    n_steps = max(1, int(round(cfg.t_end / cfg.dt)))
    x = coords(rho0)
    times = [0.0]
    states = [from_coords(x)]
    for k in range(1, n_steps + 1):
        x = p @ x + r
        if k % cfg.record_stride == 0 or k == n_steps:
            times.append(k * cfg.dt)
            states.append(from_coords(x))
    return np.array(times), np.array(states)


@dataclass(frozen=True, eq=False)
class Converged:
    rho: np.ndarray
    t: float


@dataclass(frozen=True)
class NotConverged:
    reason: str


def pointer_numeric(
    spec: SystemSpec,
    rho0,
    tol: float = 1e-8,
    window: float | None = None,
    t_cap: float | None = None,
    dt: float | None = None,
) -> Converged | NotConverged:
    """Late-time state by brute-force integration.

    Converged when the state moves less than tol over a window of length
    5 / c^2; a time cap turns slow or oscillatory dynamics into
    ``NotConverged``.
    """
    rho0 = as_density(rho0)
    c2 = spec.c * spec.c
    if window is None:
        window = 5.0 / c2 if c2 > 0 else 5.0
    if t_cap is None:
        t_cap = 80.0 * window
    scale = stiffness_scale(spec)
    if dt is None:
        dt = min(1e-2, 0.05 / scale) if scale > 0 else 1e-2
    _check_gate(spec, dt)

    m, q = _affine_field(spec)
    p, r = _step_maps(m, q, dt)
    steps_per_window = max(1, int(round(window / dt)))
    x = coords(rho0)
    snapshot = x.copy()
    t = 0.0
    while t < t_cap:
        for _ in range(steps_per_window):
            x = p @ x + r
        t += steps_per_window * dt
        if float(np.linalg.norm(x - snapshot)) < tol:
            return Converged(rho=from_coords(x), t=t)
        snapshot = x.copy()
    return NotConverged(reason=f"no settling within t = {t_cap:g}")


def det_scan(rho_fn, t_grid, t_tol: float = 1e-8, det_tol: float = 1e-12):
    """Earliest time from which det rho(t) stays nonnegative on the grid.

    Returns 0.0 when the determinant never goes negative, None when it is
    still negative at the end of the horizon, and otherwise the crossing
    time refined by bisection to t_tol.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    dets = np.array([det2(rho_fn(t)) for t in t_grid])
    neg = dets < -det_tol
    if not np.any(neg):
        return 0.0
    last_neg = int(np.max(np.nonzero(neg)[0]))
    if last_neg == len(t_grid) - 1:
        return None
    lo, hi = float(t_grid[last_neg]), float(t_grid[last_neg + 1])
    while hi - lo > t_tol:
        mid = 0.5 * (lo + hi)
        if det2(rho_fn(mid)) < -det_tol:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
