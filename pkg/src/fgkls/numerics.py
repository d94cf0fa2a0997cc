"""Small dense complex kernel: cubic roots with multiplicity detection,
3x3 linear solves with nullspace extraction, and 2x2 Schur triangularization.

Everything here is exact-arithmetic-flavoured: closed forms polished by a
single Newton step, scale-aware tolerances, and explicit handling of the
degenerate branches that the physics upstairs actually hits.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InputError

# Two roots coincide when |s_i - s_j| < COINCIDENCE_RTOL * max(1, |s_i|, |s_j|).
COINCIDENCE_RTOL = 1e-8
# solve3 treats the matrix as singular when |det M| < RANK_RTOL * ||M||^3.
RANK_RTOL = 1e-10


class RootPattern(str, Enum):
    THREE_DISTINCT = "ThreeDistinct"
    ONE_DOUBLE_ONE_SIMPLE = "OneDoubleOneSimple"
    TRIPLE = "Triple"


@dataclass(frozen=True)
class CubicRoots:
    """Roots of a monic cubic with multiplicities summing to 3."""

    roots: tuple[tuple[complex, int], ...]
    classification: RootPattern

    def values(self) -> list[complex]:
        """Roots repeated according to multiplicity."""
        out: list[complex] = []
        for value, mult in self.roots:
            out.extend([value] * mult)
        return out


def _require_finite(*values: complex) -> None:
    for v in values:
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise InputError(f"non-finite coefficient {v!r}")


def _poly_eval(s: complex, p2: complex, p1: complex, p0: complex) -> complex:
    return ((s + p2) * s + p1) * s + p0


def _newton_polish(s: complex, p2: complex, p1: complex, p0: complex) -> complex:
    """One guarded Newton step; kept only if it reduces the residual."""
    f = _poly_eval(s, p2, p1, p0)
    fp = (3.0 * s + 2.0 * p2) * s + p1
    if abs(fp) <= 1e-3 * abs(f) or fp == 0:
        return s
    cand = s - f / fp
    if abs(_poly_eval(cand, p2, p1, p0)) <= abs(f):
        return cand
    return s


def _real_cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def _real_quadratic(b: float, c: float) -> list[complex]:
    """Roots of s^2 + b s + c with real coefficients, exact conjugate pairing."""
    disc = b * b - 4.0 * c
    if disc >= 0.0:
        sq = math.sqrt(disc)
        if b >= 0.0:
            q = -(b + sq) / 2.0
        else:
            q = -(b - sq) / 2.0
        if q != 0.0:
            return [complex(q), complex(c / q)]
        return [complex(0.0), complex(-b)]
    im = math.sqrt(-disc) / 2.0
    return [complex(-b / 2.0, im), complex(-b / 2.0, -im)]


def _real_cubic(b: float, c: float, d: float) -> list[complex]:
    """Roots of s^3 + b s^2 + c s + d, real coefficients.

    Keeps a zero root exact when d == 0 and returns complex roots as exact
    conjugate pairs, which the conjugation-symmetry of the physics relies on.
    """
    if d == 0.0:
        return [complex(0.0)] + _real_quadratic(b, c)
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    if p == 0.0 and q == 0.0:
        return [complex(-shift)] * 3
    if p == 0.0:
        # Pure cube roots of -q (the discriminant may underflow here).
        y1 = _real_cbrt(-q)
        re, im = -y1 / 2.0, math.sqrt(3.0) / 2.0 * abs(y1)
        return [complex(y1) - shift, complex(re, im) - shift, complex(re, -im) - shift]
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc > 0.0 or p > 0.0:
        # One real root plus a conjugate pair (p > 0 forces this even when
        # the discriminant underflows to zero).
        sq = math.sqrt(max(disc, 0.0))
        a_half = -q / 2.0
        t1 = a_half + sq if a_half >= 0.0 else a_half - sq
        u = _real_cbrt(t1)
        v = -p / (3.0 * u) if u != 0.0 else 0.0
        y_real = u + v
        re = -y_real / 2.0
        im = math.sqrt(3.0) / 2.0 * abs(u - v)
        roots = [complex(y_real), complex(re, im), complex(re, -im)]
    else:
        # Three real roots (trigonometric form; p < 0 is guaranteed here).
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = (3.0 * q / p) / m  # two-stage division avoids underflow in p*m
        arg = min(1.0, max(-1.0, arg))
        phi = math.acos(arg)
        roots = [
            complex(m * math.cos((phi + 2.0 * math.pi * k) / 3.0)) for k in range(3)
        ]
    return [r - shift for r in roots]


def _complex_cubic(p2: complex, p1: complex, p0: complex) -> list[complex]:
    """Cardano for genuinely complex coefficients."""
    shift = p2 / 3.0
    p = p1 - p2 * p2 / 3.0
    q = 2.0 * p2**3 / 27.0 - p2 * p1 / 3.0 + p0
    if p == 0 and q == 0:
        return [-shift] * 3
    sq = cmath.sqrt((q / 2.0) ** 2 + (p / 3.0) ** 3)
    t1 = -q / 2.0 + sq
    t2 = -q / 2.0 - sq
    t = t1 if abs(t1) >= abs(t2) else t2
    u = t ** (1.0 / 3.0)
    omega = complex(-0.5, math.sqrt(3.0) / 2.0)
    roots = []
    for k in range(3):
        uk = u * omega**k
        vk = -p / (3.0 * uk) if uk != 0 else 0.0
        roots.append(uk + vk - shift)
    return roots


_REFINE_BAND = 1e-5


def cubic_roots(p2: complex, p1: complex, p0: complex) -> CubicRoots:
    """Solve the monic cubic s^3 + p2 s^2 + p1 s + p0 = 0.

    Closed form (trigonometric/Cardano) with one guarded Newton polish per
    root, plus a critical-point refinement of nearly coincident pairs:
    closed-form roots lose half the working precision near a double root,
    while around the critical point c (p'(c) = 0) the pair
    c +/- sqrt(-2 p(c) / p''(c)) is accurate to full precision and an exact
    double (p(c) == 0) is recovered exactly.  Roots closer than the
    coincidence tolerance are merged into multiple roots; for real
    coefficients the non-real roots come back as exact conjugate pairs.
    """
    p2, p1, p0 = complex(p2), complex(p1), complex(p0)
    _require_finite(p2, p1, p0)

    coeff_scale = max(1.0, abs(p2), abs(p1), abs(p0))
    is_real = max(abs(p2.imag), abs(p1.imag), abs(p0.imag)) <= 1e-10 * coeff_scale
    if is_real:
        raw = _real_cubic(p2.real, p1.real, p0.real)
        rp2, rp1, rp0 = p2.real, p1.real, p0.real
        polished: list[complex] = []
        seen_pair = False
        for r in raw:
            if r.imag == 0.0:
                s = _newton_polish(complex(r.real), rp2, rp1, rp0)
                polished.append(complex(s.real))
            elif not seen_pair:
                s = _newton_polish(r, rp2, rp1, rp0)
                polished.append(s)
                polished.append(s.conjugate())
                seen_pair = True
        roots = polished
        p2u, p1u, p0u = complex(rp2), complex(rp1), complex(rp0)
    else:
        roots = [_newton_polish(r, p2, p1, p0) for r in _complex_cubic(p2, p1, p0)]
        p2u, p1u, p0u = p2, p1, p0

    # Critical-point refinement of the closest pair, if it is nearly double.
    pairs = [(0, 1), (0, 2), (1, 2)]
    dists = [abs(roots[a] - roots[b]) for a, b in pairs]
    kmin = int(np.argmin(dists))
    ia, ib = pairs[kmin]
    pair_scale = max(1.0, abs(roots[ia]), abs(roots[ib]))
    if 0.0 < dists[kmin] <= _REFINE_BAND * pair_scale:
        mid = (roots[ia] + roots[ib]) / 2.0
        disc = cmath.sqrt(p2u * p2u - 3.0 * p1u)
        crit = min(
            [(-p2u + disc) / 3.0, (-p2u - disc) / 3.0], key=lambda z: abs(z - mid)
        )
        curv = 6.0 * crit + 2.0 * p2u
        if abs(curv) > 1e-6 * max(1.0, abs(p2u)):
            val = _poly_eval(crit, p2u, p1u, p0u)
            delta = cmath.sqrt(-2.0 * val / curv)
            cand_pair = [crit + delta, crit - delta]
            cand_third = -p2u - 2.0 * crit
            old_res = max(
                abs(_poly_eval(roots[ia], p2u, p1u, p0u)),
                abs(_poly_eval(roots[ib], p2u, p1u, p0u)),
            )
            new_res = max(abs(_poly_eval(z, p2u, p1u, p0u)) for z in cand_pair)
            if new_res <= 10.0 * old_res + 1e-13 * coeff_scale:
                if is_real:
                    # Keep exact realness or exact conjugacy of the pair.
                    if abs(delta.imag) <= abs(delta.real):
                        cand_pair = [
                            complex(crit.real + abs(delta)),
                            complex(crit.real - abs(delta)),
                        ]
                    else:
                        cand_pair = [
                            complex(crit.real, abs(delta)),
                            complex(crit.real, -abs(delta)),
                        ]
                    cand_third = complex(cand_third.real)
                roots = cand_pair + [cand_third]

    # Cluster coincident roots (transitive closure, so near-triple cases merge).
    groups: list[list[complex]] = []
    for r in roots:
        placed = False
        for g in groups:
            if any(
                abs(r - other) < COINCIDENCE_RTOL * max(1.0, abs(r), abs(other))
                for other in g
            ):
                g.append(r)
                placed = True
                break
        if not placed:
            groups.append([r])
    # A chain a~b, b~c with a!~c can leave separate groups; re-merge pairwise.
    merged = True
    while merged and len(groups) > 1:
        merged = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                if any(
                    abs(x - y) < COINCIDENCE_RTOL * max(1.0, abs(x), abs(y))
                    for x in groups[i]
                    for y in groups[j]
                ):
                    groups[i].extend(groups[j])
                    del groups[j]
                    merged = True
                    break
            if merged:
                break

    entries = []
    for g in groups:
        mean = sum(g) / len(g)
        if is_real and abs(mean.imag) <= COINCIDENCE_RTOL * max(1.0, abs(mean)):
            mean = complex(mean.real)
        entries.append((mean, len(g)))
    entries.sort(key=lambda e: (e[0].real, e[0].imag))

    mults = sorted(m for _, m in entries)
    if mults == [3]:
        pattern = RootPattern.TRIPLE
    elif mults == [1, 2]:
        pattern = RootPattern.ONE_DOUBLE_ONE_SIMPLE
    else:
        pattern = RootPattern.THREE_DISTINCT
    return CubicRoots(roots=tuple(entries), classification=pattern)


@dataclass(frozen=True, eq=False)
class UniqueSolution:
    x: np.ndarray


@dataclass(frozen=True, eq=False)
class SolutionFamily:
    particular: np.ndarray
    nullspace: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class Inconsistent:
    pass


Solve3Result = UniqueSolution | SolutionFamily | Inconsistent


def _as_matrix(m, shape) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.shape != shape:
        raise InputError(f"expected shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr.view(float))):
        raise InputError("non-finite entries")
    return arr


def det3(m: np.ndarray) -> complex:
    """Explicit 3x3 determinant."""
    return (
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def solve3(m, b) -> Solve3Result:
    """Solve a 3x3 complex system, rank-revealing in the singular case.

    Returns ``UniqueSolution`` when |det M| clears the scale-aware rank
    threshold, otherwise an SVD-based ``SolutionFamily`` (minimum-norm
    particular solution plus an orthonormal nullspace basis) or
    ``Inconsistent`` when the right-hand side has a component outside the
    range of M.
    """
    m = _as_matrix(m, (3, 3))
    b = _as_matrix(b, (3,))
    norm = float(np.linalg.norm(m))
    if norm > 0.0 and abs(det3(m)) > RANK_RTOL * norm**3:
        return UniqueSolution(np.linalg.solve(m, b))

    u, sing, vh = np.linalg.svd(m)
    tol = RANK_RTOL * max(1.0, float(sing[0]) if sing.size else 0.0)
    rank = int(np.sum(sing > tol))
    coeffs = u.conj().T @ b
    x = np.zeros(3, dtype=complex)
    for i in range(rank):
        x += (coeffs[i] / sing[i]) * vh[i].conj()
    residual = float(np.linalg.norm(m @ x - b))
    if residual > 1e-10 * (norm * float(np.linalg.norm(x)) + float(np.linalg.norm(b))) + 1e-14 * (
        norm + 1.0
    ):
        return Inconsistent()
    nullvecs = tuple(vh[i].conj() for i in range(rank, 3))
    return SolutionFamily(particular=x, nullspace=nullvecs)


def nullspace(m: np.ndarray, rtol: float = 1e-8) -> list[np.ndarray]:
    """Orthonormal nullspace basis of a square matrix, singular values below
    rtol * max(1, sigma_max) counting as zero."""
    _, sing, vh = np.linalg.svd(np.asarray(m, dtype=complex))
    tol = rtol * max(1.0, float(sing[0]) if sing.size else 0.0)
    return [vh[i].conj() for i in range(len(sing)) if sing[i] <= tol]


def schur2(m) -> tuple[np.ndarray, np.ndarray]:
    """Schur triangularization of a 2x2 complex matrix.

    Returns (U, T) with U unitary, T = U^dag M U upper triangular, and the
    lower-left entry of T exactly zero.  Upper-triangular input returns
    (identity, input) unchanged.
    """
    m = _as_matrix(m, (2, 2))
    if m[1, 0] == 0:
        return np.eye(2, dtype=complex), m.copy()
    tr = m[0, 0] + m[1, 1]
    # (m00 - m11)^2 + 4 m01 m10 equals tr^2 - 4 det without the cancellation.
    disc = cmath.sqrt((m[0, 0] - m[1, 1]) ** 2 + 4.0 * m[0, 1] * m[1, 0])
    mu1 = (tr + disc) / 2.0
    mu2 = (tr - disc) / 2.0
    if abs(mu1) < abs(mu2):
        mu1, mu2 = mu2, mu1
    # Eigenvector of the leading eigenvalue from the better-conditioned row.
    cand1 = np.array([m[0, 1], mu1 - m[0, 0]], dtype=complex)
    cand2 = np.array([mu1 - m[1, 1], m[1, 0]], dtype=complex)
    v = cand1 if np.linalg.norm(cand1) >= np.linalg.norm(cand2) else cand2
    v = v / np.linalg.norm(v)
    w = np.array([-np.conj(v[1]), np.conj(v[0])], dtype=complex)
    u = np.column_stack([v, w])
    t = u.conj().T @ m @ u
    t[1, 0] = 0.0
    return u, t
