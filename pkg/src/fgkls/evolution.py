"""Assembly and evaluation of the full analytic solution.

rho(t) is the stationary part plus a sum of modes, each an exponential in
the decay rate times (for coinciding roots) a polynomial in t, with
matrix-valued amplitudes fitted to the initial state.  The module also
reduces single-real-mode solutions to the compact polar form and computes
the time from which such a solution is a valid (positive) density matrix.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import InternalError, NotReducibleError
from .model import as_density, coords, det2, direction_matrix, from_coords, min_eig2
from .pointer import compute_pointer, representative
from .spectral import ModeDecomposition, spectrum
from .model import SystemSpec


@dataclass(frozen=True, eq=False)
class AnalyticSolution:
    """Closed-form trajectory: pointer part plus fitted modes.

    ``amplitudes`` has one entry per chain vector, flattened across modes in
    order; chain vector j of a mode contributes amplitude * exp(rate t)
    times t^(j-i)/ (j-i)! down its chain.
    """

    spec: SystemSpec
    pointer_part: np.ndarray
    modes: ModeDecomposition
    amplitudes: np.ndarray

    def chain_vectors(self) -> list[np.ndarray]:
        return [v for mode in self.modes.modes for v in mode.vectors]


def solve_ivp(spec: SystemSpec, rho0) -> AnalyticSolution:
    """Fit the analytic solution to an initial density matrix.

    The pointer part is the attracting state when it is unique and a family
    representative otherwise (the zero-mode amplitude then absorbs the
    family freedom); amplitudes solve the 3x3 system stacking all chain
    vectors at t = 0 against the initial deviation.
    """
    rho0 = as_density(rho0)
    ptr = compute_pointer(spec)
    pointer_part = representative(ptr)
    md = spectrum(spec)

    cols = [v for mode in md.modes for v in mode.vectors]
    fit = np.column_stack(cols)
    dev = coords(rho0) - coords(pointer_part)
    try:
        amps = np.linalg.solve(fit, dev)
    except np.linalg.LinAlgError as exc:
        raise InternalError("mode vectors do not span the deviation") from exc
    if not np.all(np.isfinite(amps.view(float))):
        raise InternalError("amplitude fit produced non-finite values")
    resid = float(np.linalg.norm(fit @ amps - dev))
    if resid > 1e-9 * max(1.0, float(np.linalg.norm(dev))):
        raise InternalError(f"amplitude fit residual {resid:.3e}")
    return AnalyticSolution(
        spec=spec, pointer_part=pointer_part, modes=md, amplitudes=amps
    )


def _coords_at(sol: AnalyticSolution, ts: np.ndarray) -> np.ndarray:
    """Coordinates (f11, f12, f21) on a time grid, shape (len(ts), 3)."""
    out = np.tile(coords(sol.pointer_part), (len(ts), 1))
    idx = 0
    for mode in sol.modes.modes:
        k = len(mode.vectors)
        amps = sol.amplitudes[idx : idx + k]
        idx += k
        phase = np.exp(mode.rate * ts)  # |exp| <= 1 for this flow
        for i, v in enumerate(mode.vectors):
            # weight_i(t) = sum_{j >= i} a_j t^(j-i) / (j-i)!
            w = np.zeros(len(ts), dtype=complex)
            for j in range(i, k):
                w += amps[j] * ts ** (j - i) / math.factorial(j - i)
            out += (phase * w)[:, None] * v[None, :]
    return out


def rho_at(sol: AnalyticSolution, t: float) -> np.ndarray:
    """Density matrix at one time (Hermitian, unit trace; positivity is the
    positivity window's business)."""
    x = _coords_at(sol, np.array([float(t)]))[0]
    return from_coords(x)


def trajectory(sol: AnalyticSolution, ts) -> np.ndarray:
    """Stack of density matrices on a grid, shape (len(ts), 2, 2)."""
    ts = np.asarray(ts, dtype=float)
    xs = _coords_at(sol, ts)
    out = np.empty((len(ts), 2, 2), dtype=complex)
    out[:, 0, 0] = xs[:, 0]
    out[:, 0, 1] = xs[:, 1]
    out[:, 1, 0] = xs[:, 2]
    out[:, 1, 1] = 1.0 - xs[:, 0]
    return out


def sample_diagnostics(rho: np.ndarray, tol: float = 1e-10) -> tuple[float, float, bool]:
    """(det, min eigenvalue, physical flag) for one trajectory sample."""
    d = det2(rho)
    me = min_eig2(rho)
    return d, me, bool(me >= -tol)


@dataclass(frozen=True, eq=False)
class SingleModeReduction:
    """Polar data of a solution with one real decaying mode excited:

        rho(t) = pointer + sign * w * exp(s3 c^2 t) * [[h, p e^{i beta/2}],
                                                       [p e^{-i beta/2}, -h]]

    with w, h, p >= 0, h^2 + p^2 = 1 folded into w, and s3 the rescaled
    decay rate.  Constant (zero-mode) contributions are folded into
    ``pointer`` before reduction.
    """

    w: float
    sign: int
    h: float
    p: float
    beta: float
    s3: float
    pointer: np.ndarray


@dataclass(frozen=True)
class TimeWindow:
    """Times t >= t_min where the solution is a valid density matrix."""

    t_min: float
    valid: bool


def single_mode_reduction(sol: AnalyticSolution, tol: float = 1e-10) -> SingleModeReduction:
    """Reduce to the one-real-mode polar form.

    Raises ``NotReducibleError`` when any oscillatory mode, polynomial
    (chain) term, or second distinct decay rate carries amplitude above
    tolerance.
    """
    c = sol.spec.c
    scale = c * c if c > 0 else 1.0
    zthr = 1e-12 * max(1.0, scale)

    pointer_eff = np.array(sol.pointer_part, dtype=complex)
    excited: list[tuple[complex, np.ndarray]] = []
    amp_scale = max([1.0] + [abs(a) for a in sol.amplitudes])
    tol_abs = tol * amp_scale

    idx = 0
    for mode in sol.modes.modes:
        k = len(mode.vectors)
        amps = sol.amplitudes[idx : idx + k]
        idx += k
        rate = mode.rate
        is_zero = abs(rate) <= zthr
        for j in range(k):
            if abs(amps[j]) <= tol_abs:
                continue
            if j > 0:
                raise NotReducibleError("polynomial (coinciding-root) term is excited")
            if is_zero:
                pointer_eff = pointer_eff + amps[0] * direction_matrix(mode.vectors[0])
            elif abs(rate.imag) > zthr:
                raise NotReducibleError("complex-pair amplitude exceeds tolerance")
            else:
                excited.append((rate, amps[0] * direction_matrix(mode.vectors[0])))

    if not excited:
        s3 = 0.0
        for mode in sol.modes.modes:
            if abs(mode.rate.imag) <= zthr and mode.rate.real < -zthr:
                s3 = mode.rate.real / scale
                break
        return SingleModeReduction(
            w=0.0, sign=1, h=0.0, p=0.0, beta=0.0, s3=s3, pointer=pointer_eff
        )

    rate0 = excited[0][0]
    if any(abs(r - rate0) > 1e-8 * max(1.0, abs(r), abs(rate0)) for r, _ in excited[1:]):
        raise NotReducibleError("two distinct real decay rates are excited")
    combined = sum(v for _, v in excited)
    if float(np.linalg.norm(combined - combined.conj().T)) > 1e-9 * float(
        np.linalg.norm(combined)
    ):
        raise InternalError("excited real mode is not Hermitian")
    combined = (combined + combined.conj().T) / 2.0

    h_signed = float(combined[0, 0].real)
    off = complex(combined[0, 1])
    norm = math.hypot(h_signed, abs(off))
    if h_signed != 0.0:
        sigma = 1 if h_signed > 0 else -1
    elif off.real != 0.0:
        sigma = 1 if off.real > 0 else -1
    else:
        sigma = 1 if off.imag >= 0 else -1
    h = (sigma * h_signed) / norm
    off_c = sigma * off / norm
    p = abs(off_c)
    beta = 2.0 * cmath.phase(off_c) if p > 1e-15 else 0.0
    return SingleModeReduction(
        w=norm,
        sign=sigma,
        h=h,
        p=p,
        beta=beta,
        s3=rate0.real / scale,
        pointer=pointer_eff,
    )


def reconstructed_mode_matrix(red: SingleModeReduction) -> np.ndarray:
    """sign * w * [[h, p e^{i beta/2}], [p e^{-i beta/2}, -h]]."""
    off = red.p * cmath.exp(0.5j * red.beta)
    m0 = np.array([[red.h, off], [np.conj(off), -red.h]], dtype=complex)
    return red.sign * red.w * m0


def positivity_window(red: SingleModeReduction, pointer: np.ndarray, c: float) -> TimeWindow:
    """Earliest time from which the reduced solution is positive.

    det rho(t) is a downward parabola in x = sign * w * exp(s3 c^2 t); its
    roots straddle zero whenever the pointer itself is positive, and the
    window follows from inverting the exponential against the relevant
    root.
    """
    if red.w <= 1e-14:
        return TimeWindow(t_min=0.0, valid=True)
    if not (red.s3 < 0.0):
        raise NotReducibleError("positivity window needs a decaying mode (s3 < 0)")
    if c <= 0.0:
        raise NotReducibleError("positivity window needs c > 0")
    n2 = red.h * red.h + red.p * red.p
    if n2 <= 1e-28:
        return TimeWindow(t_min=0.0, valid=True)
    phase = cmath.exp(0.5j * red.beta)
    lin = red.h * float((pointer[1, 1] - pointer[0, 0]).real) - 2.0 * red.p * float(
        (phase * pointer[1, 0]).real
    )
    const = det2(pointer)
    disc = lin * lin + 4.0 * n2 * const
    if disc < 0.0:
        return TimeWindow(t_min=math.inf, valid=False)
    root = math.sqrt(disc)
    x_hi = (lin + root) / (2.0 * n2)
    x_lo = (lin - root) / (2.0 * n2)
    limit = x_hi if red.sign > 0 else -x_lo
    if limit <= 0.0:
        return TimeWindow(t_min=math.inf, valid=False)
    if red.w <= limit:
        return TimeWindow(t_min=0.0, valid=True)
    t_min = math.log(red.w / limit) / (-red.s3 * c * c)
    return TimeWindow(t_min=t_min, valid=True)
