"""Stationary states (pointers) of the two-level master equation.

The stationary set of the affine flow on (f11, f12, f21) is a point, a
line, or a higher-dimensional family depending on the Lindblad shape:

* diagonal L splits four ways on eps_21 and lambda1 - lambda2,
* Jordan L always has a single closed-form pointer (c > 0),
* general L goes through the numeric 3x3 solve with nullspace extraction.

c = 0 means closed Liouville dynamics: stationary states exist but nothing
is attracting, reported as ``NoAttractor``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .generator import build_generator, rhs
from .model import (
    DiagonalL,
    JordanL,
    SystemSpec,
    det2,
    direction_matrix,
    from_coords,
)
from .numerics import COINCIDENCE_RTOL

_IDENTITY_HALF = np.eye(2, dtype=complex) / 2.0


@dataclass(frozen=True, eq=False)
class UniquePointer:
    """Single attracting stationary state."""

    rho: np.ndarray
    label: str = "unique"


@dataclass(frozen=True)
class DiagonalFamily:
    """Every diagonal unit-trace matrix is stationary; f11 is free."""

    label: str = "diagonal family"

    def rho(self, f11: float) -> np.ndarray:
        return np.diag([complex(f11), complex(1.0 - f11)])

    @property
    def base(self) -> np.ndarray:
        return _IDENTITY_HALF.copy()

    @property
    def directions(self) -> tuple[np.ndarray, ...]:
        return (np.diag([1.0 + 0j, -1.0 + 0j]),)


@dataclass(frozen=True, eq=False)
class FullFamily:
    """Stationary family with two or three free real parameters.

    ``base + sum_i x_i * directions[i]`` is stationary for all real x_i;
    the canonical branch (every unit-trace matrix stationary) carries all
    three traceless Hermitian directions.
    """

    base: np.ndarray
    directions: tuple[np.ndarray, ...]
    label: str = "arbitrary unit-trace family"

    def rho(self, *coords: float) -> np.ndarray:
        out = np.array(self.base, dtype=complex)
        for x, d in zip(coords, self.directions):
            out = out + float(x) * d
        return out

    @classmethod
    def whole_state_space(cls) -> "FullFamily":
        dirs = (
            np.diag([1.0 + 0j, -1.0 + 0j]),
            np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
            np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
        )
        return cls(base=_IDENTITY_HALF.copy(), directions=dirs)


@dataclass(frozen=True, eq=False)
class LineFamily:
    """One-real-parameter stationary family rho(x) = base + x * direction."""

    base: np.ndarray
    direction: np.ndarray
    label: str = "one-parameter family"

    def rho(self, x: float) -> np.ndarray:
        return self.base + float(x) * self.direction

    def physical_interval(self) -> tuple[float, float]:
        """Range of x with det rho(x) >= 0 (positivity of the representative)."""
        # det(base + x dir) is a downward parabola in x for traceless dir.
        b = self.base
        d = self.direction
        a2 = -float(det2(d))  # det of traceless Hermitian dir is <= 0
        a1 = float((b[0, 0] * d[1, 1] + d[0, 0] * b[1, 1] - b[0, 1] * d[1, 0] - d[0, 1] * b[1, 0]).real)
        a0 = float(det2(b))
        if a2 <= 0.0:
            return (0.0, 0.0)
        disc = a1 * a1 + 4.0 * a2 * a0
        if disc < 0.0:
            return (0.0, 0.0)
        root = float(np.sqrt(disc))
        return ((a1 - root) / (2.0 * a2), (a1 + root) / (2.0 * a2))


@dataclass(frozen=True)
class NoAttractor:
    reason: str
    label: str = "no attractor"


PointerResult = UniquePointer | DiagonalFamily | FullFamily | LineFamily | NoAttractor


def _is_negligible(value: complex, *scales: float) -> bool:
    return abs(value) < COINCIDENCE_RTOL * max(1.0, *scales)


def _conj_mirror(x: np.ndarray) -> np.ndarray:
    """Antilinear symmetry of the coordinate system: (f11, f12, f21) ->
    (conj f11, conj f21, conj f12); fixed points are Hermitian matrices."""
    return np.array([np.conj(x[0]), np.conj(x[2]), np.conj(x[1])], dtype=complex)


def _hermitian_directions(nullvecs: tuple[np.ndarray, ...]) -> list[np.ndarray]:
    """Real basis of the Hermitian slice of a conjugation-closed nullspace."""
    reals = []
    for v in nullvecs:
        for w in (0.5 * (v + _conj_mirror(v)), 0.5j * (v - _conj_mirror(v))):
            reals.append([w[0].real, w[1].real, w[1].imag])
    if not reals:
        return []
    arr = np.array(reals, dtype=float)
    u, s, vh = np.linalg.svd(arr)
    tol = 1e-10 * max(1.0, float(s[0]) if s.size else 0.0)
    rank = int(np.sum(s > tol))
    out = []
    for i in range(rank):
        a, x, y = vh[i]
        vec = np.array([a, x + 1j * y, x - 1j * y], dtype=complex)
        out.append(direction_matrix(vec))
    return out


def _general_pointer(spec: SystemSpec) -> PointerResult:
    gen = build_generator(spec)
    result = numerics.solve3(gen.matrix, -gen.inhom)
    if isinstance(result, numerics.UniqueSolution):
        x = result.x
        x = 0.5 * (x + _conj_mirror(x))
        return UniquePointer(from_coords(x), label="general numeric")
    if isinstance(result, numerics.Inconsistent):
        return NoAttractor("stationary system numerically inconsistent")
    x = 0.5 * (result.particular + _conj_mirror(result.particular))
    base = from_coords(x)
    dirs = _hermitian_directions(result.nullspace)
    if len(dirs) == 0:
        return UniquePointer(base, label="general numeric")
    if len(dirs) == 1:
        return LineFamily(base=base, direction=dirs[0])
    return FullFamily(base=base, directions=tuple(dirs))


def compute_pointer(spec: SystemSpec) -> PointerResult:
    """Stationary-state classification for a system specification.

    Diagonal form follows the four-way case split on eps_21 and
    lambda1 - lambda2; Jordan form evaluates the closed-form pointer;
    general form solves the 3x3 stationary system numerically.
    """
    h = spec.hamiltonian.matrix
    c = spec.c
    if c == 0.0:
        return NoAttractor("closed system (c = 0): Liouville evolution has no attractor")

    form = spec.lindblad
    hscale = float(np.linalg.norm(h))

    if isinstance(form, DiagonalL):
        lam1, lam2 = form.lambda1, form.lambda2
        eps21 = h[1, 0]
        lam_equal = _is_negligible(lam1 - lam2, abs(lam1), abs(lam2))
        eps21_zero = _is_negligible(eps21, hscale)
        if not eps21_zero and not lam_equal:
            return UniquePointer(_IDENTITY_HALF.copy(), label="maximally mixed")
        if eps21_zero:
            c2 = c * c
            bval = (
                -1j * spec.hamiltonian.gap / c2
                + lam1 * np.conj(lam2)
                - 0.5 * (abs(lam1) ** 2 + abs(lam2) ** 2)
            )
            if _is_negligible(bval, hscale / c2, abs(lam1) ** 2, abs(lam2) ** 2):
                return FullFamily.whole_state_space()
            return DiagonalFamily()
        # lambda1 == lambda2 with eps21 != 0: one-parameter family unless the
        # levels are degenerate, which needs the general nullspace route.
        gap = spec.hamiltonian.gap
        if not _is_negligible(gap, hscale):
            direction = np.array(
                [[1.0, 2.0 * h[0, 1] / gap], [2.0 * h[1, 0] / gap, -1.0]],
                dtype=complex,
            )
            return LineFamily(base=_IDENTITY_HALF.copy(), direction=direction)
        return _general_pointer(spec)

    if isinstance(form, JordanL):
        c2 = c * c
        a = 1j * h[1, 0] / c2 + 0.5 * form.lam
        b = -0.5 - 1j * spec.hamiltonian.gap / c2
        denom = 2.0 * abs(a) ** 2 + abs(b) ** 2
        rho = (
            np.array(
                [
                    [abs(a) ** 2 + abs(b) ** 2, np.conj(a) * np.conj(b)],
                    [a * b, abs(a) ** 2],
                ],
                dtype=complex,
            )
            / denom
        )
        label = "Jordan unique"
        if _is_negligible(h[0, 1], hscale) and _is_negligible(spec.hamiltonian.gap, hscale):
            label = "degenerate-H Jordan"
        return UniquePointer(rho, label=label)

    return _general_pointer(spec)


def pointer_residual(spec: SystemSpec, rho: np.ndarray) -> float:
    """Frobenius norm of the flow at rho; zero iff rho is stationary."""
    return float(np.linalg.norm(rhs(spec, rho)))


def representative(result: PointerResult) -> np.ndarray:
    """A stationary matrix standing in for the result (I/2 when nothing
    is attracting: it commutes with everything and is dissipation-free
    at c = 0)."""
    if isinstance(result, UniquePointer):
        return np.array(result.rho)
    if isinstance(result, (FullFamily, LineFamily)):
        return np.array(result.base)
    if isinstance(result, DiagonalFamily):
        return result.base
    return _IDENTITY_HALF.copy()
