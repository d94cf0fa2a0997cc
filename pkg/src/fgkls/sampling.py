"""Seeded random systems and states for property suites and CLI sweeps."""

from __future__ import annotations

import numpy as np

from .model import DiagonalL, GeneralL, Hamiltonian, JordanL, SystemSpec


def random_complex(rng: np.random.Generator, scale: float = 1.0) -> complex:
    return complex(rng.uniform(-scale, scale), rng.uniform(-scale, scale))


def random_hamiltonian(rng: np.random.Generator, scale: float = 1.5) -> Hamiltonian:
    e1, e2 = rng.uniform(-scale, scale, size=2)
    off = random_complex(rng, scale)
    return Hamiltonian([[e1, off], [np.conj(off), e2]])


def random_density(rng: np.random.Generator) -> np.ndarray:
    """Full-rank random state A A^dag / tr(A A^dag)."""
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_spec(
    rng: np.random.Generator,
    form: str = "any",
    c_range: tuple[float, float] = (0.1, 3.0),
    scale: float = 1.5,
) -> SystemSpec:
    """Random system of the requested Lindblad shape ("diagonal", "jordan",
    "general", or "any" to mix the canonical two)."""
    c = float(rng.uniform(*c_range))
    h = random_hamiltonian(rng, scale)
    if form == "any":
        form = "diagonal" if rng.random() < 0.5 else "jordan"
    if form == "diagonal":
        lind = DiagonalL(random_complex(rng, scale), random_complex(rng, scale), c)
    elif form == "jordan":
        lind = JordanL(random_complex(rng, scale), c)
    elif form == "general":
        m = np.array(
            [[random_complex(rng, scale) for _ in range(2)] for _ in range(2)]
        )
        lind = GeneralL(m, c)
    else:
        raise ValueError(f"unknown form {form!r}")
    return SystemSpec(h, lind)
