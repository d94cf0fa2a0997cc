"""Characteristic cubic, mode decomposition and stability of the generator.

The homogeneous flow on (f11, f12, f21) is governed by a 3x3 matrix whose
characteristic polynomial has real coefficients.  For c > 0 the roots are
reported in the rescaled variable s = rate / c^2; the closed-form
coefficients for the two canonical Lindblad shapes are used where
available, and the measure-zero coinciding-root branches (which turn
exponentials into exponentials times polynomials) are recognized from
closed-form conditions in parameter space, where detection is
well-conditioned even though the roots themselves are not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InternalError
from .generator import build_generator
from .model import DiagonalL, JordanL, SystemSpec, direction_matrix
from .numerics import cubic_roots

# Branch conditions are exact equalities; they are accepted when satisfied
# to this absolute defect on O(1)-normalized data.
BRANCH_TOL = 1e-6
# Ties in the double-vs-triple sign test resolve to the triple branch.
TIE_TOL = 1e-12


class SpectrumStructure(str, Enum):
    DISTINCT = "Distinct"
    COMPLEX_PAIR_PLUS_REAL = "ComplexPairPlusReal"
    DOUBLE_ROOT = "DoubleRoot"
    TRIPLE_ROOT = "TripleRoot"
    ZERO_MODE = "ZeroMode"
    OSCILLATORY_UNDAMPED = "OscillatoryUndamped"


class StabilityVerdict(str, Enum):
    ALL_DAMPED = "AllDamped"
    ZERO_MODE_PRESENT = "ZeroModePresent"
    UNDAMPED = "Undamped"


@dataclass(frozen=True, eq=False)
class Mode:
    """One (possibly generalized) mode of the homogeneous flow.

    ``vectors`` is a Jordan chain: vectors[0] is a true eigenvector and
    (M - rate) vectors[j+1] = vectors[j].  A chain of length k contributes
    exp(rate * t) times a polynomial of degree poly_degree = k - 1.
    """

    rate: complex
    vectors: tuple[np.ndarray, ...]

    @property
    def poly_degree(self) -> int:
        return len(self.vectors) - 1

    @property
    def matrices(self) -> tuple[np.ndarray, ...]:
        """Chain vectors embedded as traceless 2x2 matrices (f22 = -f11)."""
        return tuple(direction_matrix(v) for v in self.vectors)


@dataclass(frozen=True, eq=False)
class ModeDecomposition:
    modes: tuple[Mode, ...]
    structure: SpectrumStructure
    cubic: tuple[complex, complex, complex]
    scaled: bool  # True when the cubic variable is s = rate / c^2

    @property
    def rates(self) -> list[complex]:
        return [m.rate for m in self.modes]

    def s_roots(self, c: float) -> list[tuple[complex, int]]:
        """Root list in the rescaled variable (identity when c == 0)."""
        scale = c * c if c > 0 else 1.0
        return [(m.rate / scale, len(m.vectors)) for m in self.modes]


def _jordan_invariants(spec: SystemSpec) -> tuple[float, float]:
    """(squared scaled level gap, squared coupling) for the Jordan shape."""
    h = spec.hamiltonian.matrix
    c2 = spec.c * spec.c
    gap_sq = (spec.hamiltonian.gap / c2) ** 2
    coupling_sq = abs(0.5 * spec.lindblad.lam + 1j * h[1, 0] / c2) ** 2
    return gap_sq, coupling_sq


def char_cubic(spec: SystemSpec) -> tuple[complex, complex, complex]:
    """Monic characteristic cubic of the homogeneous generator.

    Coefficients are in the rescaled variable s = rate / c^2 when c > 0 and
    in the bare rate when c = 0.  The two canonical shapes use their
    closed-form coefficients; the general shape extracts the characteristic
    polynomial of the rescaled matrix directly.
    """
    c = spec.c
    if c > 0 and isinstance(spec.lindblad, DiagonalL):
        h = spec.hamiltonian.matrix
        c2 = c * c
        lam1, lam2 = spec.lindblad.lambda1, spec.lindblad.lambda2
        musq = abs(lam1 - lam2) ** 2
        e12 = h[0, 1] / c2
        detune = spec.hamiltonian.gap / c2 - (lam1 * np.conj(lam2)).imag
        p2 = musq
        p1 = 4.0 * abs(e12) ** 2 + detune * detune + 0.25 * musq * musq
        p0 = 2.0 * abs(e12) ** 2 * musq
        return (complex(p2), complex(p1), complex(p0))
    if c > 0 and isinstance(spec.lindblad, JordanL):
        gap_sq, coupling_sq = _jordan_invariants(spec)
        return (
            complex(2.0),
            complex(1.25 + gap_sq + 4.0 * coupling_sq),
            complex(0.25 + gap_sq + 2.0 * coupling_sq),
        )
    m = build_generator(spec).matrix
    if c > 0:
        m = m / (c * c)
    p2 = -np.trace(m)
    p1 = (
        m[0, 0] * m[1, 1]
        - m[0, 1] * m[1, 0]
        + m[0, 0] * m[2, 2]
        - m[0, 2] * m[2, 0]
        + m[1, 1] * m[2, 2]
        - m[1, 2] * m[2, 1]
    )
    p0 = -(
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )
    # The conjugation symmetry of the generator makes these real up to dust.
    return (complex(p2), complex(p1), complex(p0))


def jordan_coincident_roots(
    gap_sq: float, coupling_sq: float, tol: float = BRANCH_TOL
) -> list[tuple[float, int]] | None:
    """Closed-form coinciding roots for the Jordan cubic, if its branch
    conditions hold within tol.  Returns [(s, multiplicity), ...] or None."""
    e, k = gap_sq, coupling_sq
    if abs(k - 1.0 / 54.0) <= tol and abs(e - 1.0 / 108.0) <= tol:
        return [(-2.0 / 3.0, 3)]
    if e + 4.0 * k < 1.0 / 12.0:
        lhs = (0.25 - 3.0 * e - 12.0 * k) ** 3
        rhs = (0.125 + 4.5 * e - 9.0 * k) ** 2
        if abs(lhs - rhs) <= tol:
            root = math.sqrt(max(0.25 - 3.0 * e - 12.0 * k, 0.0))
            sign_test = 1.0 / 36.0 + e - 2.0 * k
            if abs(sign_test) < TIE_TOL:
                return [(-2.0 / 3.0, 3)]
            if sign_test > 0:
                return [(-2.0 / 3.0 + root / 3.0, 2), (-2.0 / 3.0 - 2.0 * root / 3.0, 1)]
            return [(-2.0 / 3.0 - root / 3.0, 2), (-2.0 / 3.0 + 2.0 * root / 3.0, 1)]
    return None


def diagonal_coincident_roots(
    musq: float, e12_sq: float, detune_sq: float, tol: float = BRANCH_TOL
) -> list[tuple[float, int]] | None:
    """Closed-form coinciding roots for the diagonal cubic.

    Arguments are |lambda1 - lambda2|^2, |e12|^2 and the squared effective
    detuning; conditions as printed for that branch family.
    """
    m4 = musq * musq
    if abs(e12_sq - m4 / 54.0) <= tol and abs(detune_sq - m4 / 108.0) <= tol:
        return [(-musq / 3.0, 3)]
    if m4 > 48.0 * e12_sq + 12.0 * detune_sq:
        inner = 0.25 * m4 - 12.0 * e12_sq - 3.0 * detune_sq
        lhs = inner**3
        rhs = m4 * (-0.125 * m4 + 9.0 * e12_sq - 4.5 * detune_sq) ** 2
        if abs(lhs - rhs) <= tol:
            root = math.sqrt(max(inner, 0.0))
            sign_test = musq * (-0.125 * m4 + 9.0 * e12_sq - 4.5 * detune_sq)
            if abs(sign_test) < TIE_TOL:
                return [(-musq / 3.0, 3)]
            if sign_test > 0:
                return [(-musq / 3.0 + root / 3.0, 2), (-musq / 3.0 - 2.0 * root / 3.0, 1)]
            return [(-musq / 3.0 - root / 3.0, 2), (-musq / 3.0 + 2.0 * root / 3.0, 1)]
    return None


def _closed_form_roots(spec: SystemSpec) -> list[tuple[complex, int]] | None:
    if spec.c == 0:
        return None
    if isinstance(spec.lindblad, JordanL):
        gap_sq, coupling_sq = _jordan_invariants(spec)
        out = jordan_coincident_roots(gap_sq, coupling_sq)
    elif isinstance(spec.lindblad, DiagonalL):
        h = spec.hamiltonian.matrix
        c2 = spec.c * spec.c
        lam1, lam2 = spec.lindblad.lambda1, spec.lindblad.lambda2
        musq = abs(lam1 - lam2) ** 2
        e12_sq = abs(h[0, 1] / c2) ** 2
        detune = spec.hamiltonian.gap / c2 - (lam1 * np.conj(lam2)).imag
        out = diagonal_coincident_roots(musq, e12_sq, detune * detune)
    else:
        return None
    if out is None:
        return None
    return [(complex(s), mult) for s, mult in out]


def _symmetrize_real(v: np.ndarray) -> np.ndarray:
    """Project a vector onto the Hermitian slice (f11 real, f21 = conj f12)."""
    mirror = np.array([np.conj(v[0]), np.conj(v[2]), np.conj(v[1])], dtype=complex)
    w = 0.5 * (v + mirror)
    if np.linalg.norm(w) < 0.5 * np.linalg.norm(v):
        w = 0.5j * (v - mirror)
    n = np.linalg.norm(w)
    if n == 0.0:
        raise InternalError("mode vector collapsed under symmetrization")
    w = w / n
    # Fix the residual sign freedom for reproducibility.
    for comp in (w[0].real, w[1].real, w[1].imag):
        if abs(comp) > 1e-12:
            if comp < 0:
                w = -w
            break
    return w


def _mirror_vec(v: np.ndarray) -> np.ndarray:
    return np.array([np.conj(v[0]), np.conj(v[2]), np.conj(v[1])], dtype=complex)


def _hermitian_null_basis(vectors: list[np.ndarray], count: int) -> list[np.ndarray]:
    """Basis of the Hermitian slice of a conjugation-closed span.

    Symmetrizing SVD nullspace vectors one by one can produce dependent
    results, so the slice is re-extracted as a real subspace.
    """
    reals = []
    for v in vectors:
        for w in (0.5 * (v + _mirror_vec(v)), 0.5j * (v - _mirror_vec(v))):
            reals.append([w[0].real, w[1].real, w[1].imag])
    arr = np.array(reals, dtype=float)
    _, s, vh = np.linalg.svd(arr)
    if int(np.sum(s > 1e-10 * max(1.0, float(s[0])))) < count:
        raise InternalError("Hermitian slice of the eigenspace is too small")
    out = []
    for i in range(count):
        a, x, y = vh[i]
        out.append(np.array([a, x + 1j * y, x - 1j * y], dtype=complex))
    return out


def _chain_solve(b: np.ndarray, target: np.ndarray, mscale: float) -> np.ndarray:
    sol, *_ = np.linalg.lstsq(b, target, rcond=None)
    if np.linalg.norm(b @ sol - target) > 1e-8 * max(1.0, mscale):
        raise InternalError("generalized-eigenvector chain is inconsistent")
    return sol


def _modes_for_root(
    m: np.ndarray, rate: complex, mult: int, mscale: float
) -> list[tuple[complex, list[np.ndarray]]]:
    """Jordan chains for one root: geometric multiplicity decides between
    simple modes and generalized chains."""
    b = m - rate * np.eye(3, dtype=complex)
    u, sing, vh = np.linalg.svd(b)
    tol = 1e-6 * max(1.0, float(sing[0]))
    geo = int(np.sum(sing <= tol))
    geo = max(1, min(geo, mult))
    null = [vh[i].conj() for i in range(3 - geo, 3)]
    if geo >= mult:
        return [(rate, [v]) for v in null[:mult]]
    if mult == 2:
        v1 = null[0]
        v2 = _chain_solve(b, v1, mscale)
        return [(rate, [v1, v2])]
    if geo == 1:
        v1 = null[0]
        v2 = _chain_solve(b, v1, mscale)
        v3 = _chain_solve(b, v2, mscale)
        return [(rate, [v1, v2, v3])]
    # mult == 3, geo == 2: rank one, so range(B) sits inside null(B).
    head = u[:, 0]
    v2 = _chain_solve(b, head, mscale)
    spare = null[0] - np.vdot(head, null[0]) * head
    if np.linalg.norm(spare) < 1e-8:
        spare = null[1] - np.vdot(head, null[1]) * head
    spare = spare / np.linalg.norm(spare)
    return [(rate, [head, v2]), (rate, [spare])]


def spectrum(spec: SystemSpec) -> ModeDecomposition:
    """Roots, Jordan chains and structure of the homogeneous generator."""
    gen = build_generator(spec)
    m = gen.matrix
    mscale = float(np.linalg.norm(m))
    c = spec.c
    scale = c * c if c > 0 else 1.0

    coeffs = char_cubic(spec)
    closed = _closed_form_roots(spec)
    if closed is not None:
        s_roots = closed
    else:
        cr = cubic_roots(*coeffs)
        s_roots = list(cr.roots)

    root_scale = max([1.0] + [abs(s) for s, _ in s_roots])
    ztol = 1e-10 * root_scale

    raw_modes: list[tuple[complex, list[np.ndarray]]] = []
    done_pairs: set[int] = set()
    for idx, (s, mult) in enumerate(s_roots):
        if idx in done_pairs:
            continue
        rate = s * scale
        if abs(s.imag) <= ztol:
            rate = complex(rate.real)
            chains = _modes_for_root(m, rate, mult, mscale)
            if all(len(chain) == 1 for _, chain in chains) and len(chains) > 1:
                # Diagonalizable multiple root: re-extract the Hermitian slice
                # jointly so the simple modes stay independent.
                basis = _hermitian_null_basis([c[0] for _, c in chains], len(chains))
                for v in basis:
                    raw_modes.append((rate, [v]))
                continue
            for r, chain in chains:
                fixed = [_symmetrize_real(chain[0])]
                for _ in chain[1:]:
                    b = m - rate * np.eye(3, dtype=complex)
                    nxt = _chain_solve(b, fixed[-1], mscale)
                    nxt = 0.5 * (nxt + _mirror_vec(nxt))
                    fixed.append(nxt)
                raw_modes.append((rate, fixed))
        else:
            if mult != 1:
                raise InternalError("repeated non-real root of a real cubic")
            partner = None
            for jdx in range(idx + 1, len(s_roots)):
                sj, mj = s_roots[jdx]
                if jdx not in done_pairs and mj == 1 and abs(sj - np.conj(s)) <= 1e-6 * root_scale:
                    partner = jdx
                    break
            if partner is None:
                raise InternalError("unpaired complex root of a real cubic")
            done_pairs.add(partner)
            if s.imag < 0:
                s = np.conj(s)
            rate = s * scale
            (_, chain), = _modes_for_root(m, rate, 1, mscale)
            v = chain[0]
            raw_modes.append((rate, [v]))
            raw_modes.append((np.conj(rate), [_mirror_vec(v)]))

    modes = tuple(
        Mode(rate=r, vectors=tuple(np.asarray(v, dtype=complex) for v in chain))
        for r, chain in raw_modes
    )
    if sum(len(mo.vectors) for mo in modes) != 3:
        raise InternalError("mode chains do not span three dimensions")

    # Structure reflects algebraic multiplicity: a diagonalizable double root
    # is still DoubleRoot even though it carries two simple modes.
    svals: list[complex] = []
    for mo in modes:
        svals.extend([mo.rate / scale] * len(mo.vectors))
    alg: list[int] = []
    used = [False] * 3
    for i in range(3):
        if used[i]:
            continue
        group = 1
        for j in range(i + 1, 3):
            if not used[j] and abs(svals[i] - svals[j]) <= 1e-8 * max(
                1.0, abs(svals[i]), abs(svals[j])
            ):
                used[j] = True
                group += 1
        alg.append(group)
    has_osc = any(abs(s.real) <= ztol and abs(s.imag) > ztol for s in svals)
    has_zero = any(abs(s) <= ztol for s in svals)
    if has_osc:
        structure = SpectrumStructure.OSCILLATORY_UNDAMPED
    elif has_zero:
        structure = SpectrumStructure.ZERO_MODE
    elif max(alg) == 3:
        structure = SpectrumStructure.TRIPLE_ROOT
    elif max(alg) == 2:
        structure = SpectrumStructure.DOUBLE_ROOT
    elif any(abs(s.imag) > ztol for s in svals):
        structure = SpectrumStructure.COMPLEX_PAIR_PLUS_REAL
    else:
        structure = SpectrumStructure.DISTINCT

    return ModeDecomposition(modes=modes, structure=structure, cubic=coeffs, scaled=c > 0)


def assert_stability(md: ModeDecomposition, spec: SystemSpec) -> StabilityVerdict:
    """Classify the decay-rate signs: all strictly damped, a zero mode, or
    undamped oscillation.  A rate with positive real part is impossible for
    this flow and raises."""
    c = spec.c
    thr = 1e-12 * max(c * c, 1.0)
    rates = [m.rate for m in md.modes]
    if all(r.real < -thr for r in rates):
        return StabilityVerdict.ALL_DAMPED
    for r in rates:
        if r.real > thr:
            raise InternalError(f"growing mode {r!r}: generator cannot expand states")
    if any(abs(r.real) <= thr and abs(r.imag) > thr for r in rates):
        return StabilityVerdict.UNDAMPED
    return StabilityVerdict.ZERO_MODE_PRESENT
