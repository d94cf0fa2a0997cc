"""Right-hand side of the master equation and its 3x3 affine reduction.

With rho = [[f11, f12], [f21, f22]], Hermitian and unit trace, the flow

    drho/dt = -i [H, rho] + L rho L^dag - (1/2) {L^dag L, rho}

closes on the coordinate vector (f11, f12, f21) once f22 = 1 - f11 is
eliminated.  The generator is kept unscaled (entries carry eps_ij and c^2
directly) so the closed-system limit c = 0 stays regular.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import SystemSpec, lindblad_operator

__all__ = ["RateCoefficients", "AffineGenerator", "coefficients", "build_generator", "rhs"]


@dataclass(frozen=True)
class RateCoefficients:
    """Coefficients of the linear system for the density-matrix entries.

    Named source-to-target: ``d11_22`` multiplies f22 in the f11 equation,
    and so on.  The remaining rows follow by conjugation and the trace:

        df11/dt =  d11_11 f11 + d11_22 f22 + d11_12 f12 + conj(d11_12) f21
        df22/dt = -df11/dt
        df12/dt =  d12_11 f11 + d12_22 f22 + d12_12 f12 + d12_21 f21
        df21/dt =  conjugate mirror of df12/dt

    ``d11_11`` and ``d11_22`` are real; both vanish together with every other
    dissipative term when c = 0, leaving only the +/- i eps pieces.
    """

    d11_11: complex
    d11_22: complex
    d11_12: complex
    d12_11: complex
    d12_22: complex
    d12_12: complex
    d12_21: complex


@dataclass(frozen=True, eq=False)
class AffineGenerator:
    """d/dt (f11, f12, f21) = matrix @ (f11, f12, f21) + inhom."""

    matrix: np.ndarray
    inhom: np.ndarray


def coefficients(spec: SystemSpec) -> RateCoefficients:
    """Rate coefficients from the Hamiltonian entries and L = c * l."""
    eps = spec.hamiltonian.matrix
    l = spec.lindblad.small_l()
    c2 = spec.c * spec.c
    l11, l12, l21, l22 = l[0, 0], l[0, 1], l[1, 0], l[1, 1]
    deps = eps[0, 0] - eps[1, 1]
    return RateCoefficients(
        d11_11=-c2 * abs(l21) ** 2,
        d11_22=c2 * abs(l12) ** 2,
        d11_12=1j * eps[1, 0] + 0.5 * c2 * (l11 * np.conj(l12) - np.conj(l22) * l21),
        d12_11=1j * eps[0, 1]
        + c2 * (l11 * np.conj(l21) - 0.5 * np.conj(l11) * l12 - 0.5 * np.conj(l21) * l22),
        d12_22=-1j * eps[0, 1]
        + c2 * (np.conj(l22) * l12 - 0.5 * np.conj(l11) * l12 - 0.5 * np.conj(l21) * l22),
        d12_12=-1j * deps
        + c2
        * (
            l11 * np.conj(l22)
            - 0.5 * (abs(l11) ** 2 + abs(l22) ** 2 + abs(l12) ** 2 + abs(l21) ** 2)
        ),
        d12_21=c2 * l12 * np.conj(l21),
    )


def build_generator(spec: SystemSpec) -> AffineGenerator:
    """Affine generator on (f11, f12, f21) after eliminating f22 = 1 - f11."""
    k = coefficients(spec)
    row1 = [k.d11_11 - k.d11_22, k.d11_12, np.conj(k.d11_12)]
    row2 = [k.d12_11 - k.d12_22, k.d12_12, k.d12_21]
    row3 = [np.conj(row2[0]), np.conj(k.d12_21), np.conj(k.d12_12)]
    m = np.array([row1, row2, row3], dtype=complex)
    b = np.array([k.d11_22, k.d12_22, np.conj(k.d12_22)], dtype=complex)
    return AffineGenerator(matrix=m, inhom=b)


def rhs(spec: SystemSpec, rho: np.ndarray) -> np.ndarray:
    """-i[H, rho] + L rho L^dag - (1/2){L^dag L, rho}.

    Traceless and Hermiticity-preserving for Hermitian rho.
    """
    h = spec.hamiltonian.matrix
    big_l = lindblad_operator(spec.lindblad)
    ldl = big_l.conj().T @ big_l
    return (
        -1j * (h @ rho - rho @ h)
        + big_l @ rho @ big_l.conj().T
        - 0.5 * (ldl @ rho + rho @ ldl)
    )
