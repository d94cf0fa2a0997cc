"""Domain types for a driven two-level open system.

A system is a Hermitian Hamiltonian plus a single Lindblad operator
L = c * l with real coupling c >= 0.  The small matrix l is carried in one
of three shapes: diagonal, Jordan block (lambda * I + sigma_plus), or a
general 2x2.  ``canonicalize`` reduces a raw l to one of the first two
whenever a unitary change of basis can do it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .numerics import COINCIDENCE_RTOL, schur2

SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)

HERMITICITY_ATOL = 1e-14
NORMALITY_RTOL = 1e-10


def _finite_matrix(m, shape=(2, 2)) -> np.ndarray:
    arr = np.array(m, dtype=complex)
    if arr.shape != shape:
        raise InputError(f"expected shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr.view(float))):
        raise InputError("non-finite matrix entries")
    return arr


def _finite_complex(z, name: str) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InputError(f"non-finite {name}")
    return z


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """2x2 Hermitian Hamiltonian (hbar = 1), symmetrized on construction."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _finite_matrix(self.matrix)
        scale = max(1.0, float(np.linalg.norm(m)))
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_ATOL * scale:
            raise InputError("Hamiltonian is not Hermitian")
        object.__setattr__(self, "matrix", _frozen((m + m.conj().T) / 2.0))

    @property
    def gap(self) -> float:
        """Level splitting eps_11 - eps_22."""
        return float(self.matrix[0, 0].real - self.matrix[1, 1].real)

    @property
    def is_diagonal(self) -> bool:
        scale = max(1.0, float(np.linalg.norm(self.matrix)))
        return abs(self.matrix[0, 1]) <= 1e-12 * scale

    @classmethod
    def diagonal(cls, e1: float, e2: float) -> "Hamiltonian":
        return cls(np.diag([complex(e1), complex(e2)]))

    @classmethod
    def zero(cls) -> "Hamiltonian":
        return cls(np.zeros((2, 2), dtype=complex))


def _check_coupling(c: float) -> float:
    c = float(c)
    if not math.isfinite(c) or c < 0.0:
        raise InputError("coupling c must be finite and >= 0")
    return c


@dataclass(frozen=True)
class DiagonalL:
    """Diagonal Lindblad shape: L = c * diag(lambda1, lambda2)."""

    lambda1: complex
    lambda2: complex
    c: float

    def __post_init__(self):
        object.__setattr__(self, "lambda1", _finite_complex(self.lambda1, "lambda1"))
        object.__setattr__(self, "lambda2", _finite_complex(self.lambda2, "lambda2"))
        object.__setattr__(self, "c", _check_coupling(self.c))

    def small_l(self) -> np.ndarray:
        return np.diag([self.lambda1, self.lambda2]).astype(complex)


@dataclass(frozen=True)
class JordanL:
    """Jordan-block Lindblad shape: L = c * (lam * I + sigma_plus)."""

    lam: complex
    c: float

    def __post_init__(self):
        object.__setattr__(self, "lam", _finite_complex(self.lam, "lambda"))
        object.__setattr__(self, "c", _check_coupling(self.c))

    def small_l(self) -> np.ndarray:
        return np.array([[self.lam, 1.0], [0.0, self.lam]], dtype=complex)


@dataclass(frozen=True, eq=False)
class GeneralL:
    """Arbitrary 2x2 Lindblad shape: L = c * matrix."""

    matrix: np.ndarray
    c: float

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(_finite_matrix(self.matrix)))
        object.__setattr__(self, "c", _check_coupling(self.c))

    def small_l(self) -> np.ndarray:
        return np.array(self.matrix, dtype=complex)


LindbladForm = DiagonalL | JordanL | GeneralL


def lindblad_operator(form: LindbladForm) -> np.ndarray:
    """Full operator L = c * l."""
    return form.c * form.small_l()


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """Hamiltonian plus Lindblad form: everything the equation needs."""

    hamiltonian: Hamiltonian
    lindblad: LindbladForm

    @property
    def c(self) -> float:
        return self.lindblad.c


@dataclass(frozen=True, eq=False)
class Canonical:
    """Result of a successful reduction to diagonal or Jordan shape.

    ``basis`` is the unitary U with rho' = U^dag rho U; the returned
    Hamiltonian and Lindblad form live in the primed frame.
    """

    lindblad: LindbladForm
    hamiltonian: Hamiltonian
    basis: np.ndarray

    @property
    def system(self) -> SystemSpec:
        return SystemSpec(self.hamiltonian, self.lindblad)


@dataclass(frozen=True, eq=False)
class NonCanonical:
    """Non-normal l with distinct eigenvalues: no unitary reduction exists,
    downstream code takes the general numeric path."""

    lindblad: GeneralL

    @property
    def form(self) -> GeneralL:
        return self.lindblad


def to_frame(rho: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Map a state into the canonical frame: U^dag rho U."""
    return basis.conj().T @ rho @ basis


def from_frame(rho: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Map a canonical-frame state back: U rho U^dag."""
    return basis @ rho @ basis.conj().T


def canonicalize(l_raw, c: float, hamiltonian: Hamiltonian) -> Canonical | NonCanonical:
    """Reduce a raw Lindblad matrix to diagonal or Jordan shape if possible.

    Normal l is unitarily diagonalized.  Non-normal l with (numerically)
    equal eigenvalues is brought to Schur form; the off-diagonal phase is
    absorbed into a diagonal unitary and its magnitude |t| into the coupling
    (c' = c |t|, lambda' = lambda / |t|).  Non-normal l with distinct
    eigenvalues cannot be reduced by a unitary and comes back NonCanonical.
    """
    l_raw = _finite_matrix(l_raw)
    c = _check_coupling(c)
    lsq = float(np.linalg.norm(l_raw)) ** 2
    defect = float(
        np.linalg.norm(l_raw @ l_raw.conj().T - l_raw.conj().T @ l_raw)
    )
    if lsq == 0.0 or defect < NORMALITY_RTOL * lsq:
        u, t = schur2(l_raw)
        # Schur of a (near-)normal matrix is diagonal; drop the residual.
        lam1, lam2 = complex(t[0, 0]), complex(t[1, 1])
        h_new = Hamiltonian(u.conj().T @ hamiltonian.matrix @ u)
        return Canonical(DiagonalL(lam1, lam2, c), h_new, u)

    u0, t = schur2(l_raw)
    mu1, mu2 = complex(t[0, 0]), complex(t[1, 1])
    if abs(mu1 - mu2) < COINCIDENCE_RTOL * max(1.0, abs(mu1), abs(mu2)):
        off = complex(t[0, 1])
        # Non-normal with equal eigenvalues forces a nonzero Schur coupling.
        phase = off / abs(off)
        u = u0 @ np.diag([1.0, 1.0 / phase]).astype(complex)
        lam = (mu1 + mu2) / 2.0
        scale = abs(off)
        h_new = Hamiltonian(u.conj().T @ hamiltonian.matrix @ u)
        return Canonical(JordanL(lam / scale, c * scale), h_new, u)

    return NonCanonical(GeneralL(l_raw, c))


def gauge_shift(hamiltonian: Hamiltonian, lam: complex, c: float) -> Hamiltonian:
    """Hamiltonian absorbing the scalar part of a Jordan-form coupling.

    Evolving (H, c*(lam*I + sigma_plus)) is equivalent to evolving
    (gauge_shift(H, lam, c), c*sigma_plus): the scalar part of L only shifts
    H by -(i c^2 / 2)(lam sigma_minus - conj(lam) sigma_plus).
    """
    lam = _finite_complex(lam, "lambda")
    c = _check_coupling(c)
    shift = -0.5j * c * c * (lam * SIGMA_MINUS - np.conj(lam) * SIGMA_PLUS)
    return Hamiltonian(hamiltonian.matrix + shift)


@dataclass(frozen=True)
class DensityReport:
    hermitian: bool
    trace_dev: float
    min_eigenvalue: float


def det2(rho: np.ndarray) -> float:
    """Determinant of a (numerically) Hermitian 2x2 matrix, as a real number."""
    return float((rho[0, 0] * rho[1, 1] - rho[0, 1] * rho[1, 0]).real)


def min_eig2(rho: np.ndarray) -> float:
    """Smaller eigenvalue of a Hermitian 2x2 matrix: (tr - sqrt(tr^2 - 4 det))/2."""
    tr = float((rho[0, 0] + rho[1, 1]).real)
    disc = tr * tr - 4.0 * det2(rho)
    return (tr - math.sqrt(max(disc, 0.0))) / 2.0


def validate_density(rho, tol: float = 1e-9) -> DensityReport:
    """Report hermiticity, trace deviation and the smaller eigenvalue.

    Positivity is reported, never enforced: min_eigenvalue < 0 flags an
    unphysical matrix without raising.
    """
    rho = _finite_matrix(rho)
    scale = max(1.0, float(np.linalg.norm(rho)))
    herm = float(np.max(np.abs(rho - rho.conj().T))) <= tol * scale
    sym = (rho + rho.conj().T) / 2.0
    return DensityReport(
        hermitian=herm,
        trace_dev=abs(complex(rho[0, 0] + rho[1, 1]) - 1.0),
        min_eigenvalue=min_eig2(sym),
    )


def as_density(rho, tol: float = 1e-9) -> np.ndarray:
    """Validate and symmetrize a density matrix (Hermitian, unit trace)."""
    rho = _finite_matrix(rho)
    report = validate_density(rho, tol)
    if not report.hermitian:
        raise InputError("density matrix is not Hermitian")
    if report.trace_dev > tol:
        raise InputError(f"density matrix trace deviates by {report.trace_dev:.3e}")
    sym = (rho + rho.conj().T) / 2.0
    return sym / float(np.trace(sym).real)


def coords(rho: np.ndarray) -> np.ndarray:
    """Independent coordinates (f11, f12, f21) of a unit-trace matrix."""
    return np.array([rho[0, 0], rho[0, 1], rho[1, 0]], dtype=complex)


def from_coords(x: np.ndarray) -> np.ndarray:
    """Unit-trace matrix from coordinates, f22 = 1 - f11."""
    return np.array([[x[0], x[1]], [x[2], 1.0 - x[0]]], dtype=complex)


def direction_matrix(x: np.ndarray) -> np.ndarray:
    """Traceless matrix from homogeneous coordinates, f22 = -f11."""
    return np.array([[x[0], x[1]], [x[2], -x[0]]], dtype=complex)
