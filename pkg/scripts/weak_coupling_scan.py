#!/usr/bin/env python3
"""Weak-coupling experiment: decay-rate series against exact roots.

For a Jordan-form coupling over a diagonal Hamiltonian, tabulates the exact
decay rates against the two-term series a0 + a1 c^2 on a shrinking grid of
couplings, and reports the observed truncation orders for the rates and for
the stationary-state series.

Usage: python scripts/weak_coupling_scan.py [--lam-re 0.8] [--lam-im 0.3]
"""

import argparse

import numpy as np

from fgkls.model import Hamiltonian, JordanL, SystemSpec
from fgkls.perturb import SMALL_C_GRID, order_estimate, pointer_series, weak_rates
from fgkls.pointer import compute_pointer
from fgkls.spectral import spectrum


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--lam-re", type=float, default=0.8)
    parser.add_argument("--lam-im", type=float, default=0.3)
    parser.add_argument("--gap", type=float, default=1.0)
    args = parser.parse_args()

    lam = complex(args.lam_re, args.lam_im)
    h = Hamiltonian.diagonal(args.gap, 0.0)
    series = weak_rates(SystemSpec(h, JordanL(lam, 0.1)))

    print("series branches (a0, a1):")
    for a0, a1 in series.branches:
        print(f"  a0 = {a0:+.4f}   a1 = {a1:+.4f}")

    def matched_error(c: float) -> float:
        md = spectrum(SystemSpec(h, JordanL(lam, c)))
        numeric = [m.rate for m in md.modes for _ in m.vectors]
        worst = 0.0
        for pred in series.predicted(c):
            j = int(np.argmin([abs(n - pred) for n in numeric]))
            worst = max(worst, abs(numeric.pop(j) - pred))
        return worst

    print("\n    c      max |rate - (a0 + a1 c^2)|")
    for c in (0.4, 0.2, 0.1, 0.05, 0.025):
        print(f"  {c:5.3f}    {matched_error(c):.3e}")

    est = order_estimate(matched_error, lambda c: 0.0, SMALL_C_GRID)
    print(f"\nobserved rate-error slope : {est.slope:.3f} (expected 4)")

    def exact_f11(c: float) -> complex:
        return compute_pointer(SystemSpec(h, JordanL(lam, c))).rho[0, 0]

    est_f11 = order_estimate(
        exact_f11, lambda c: pointer_series(lam, args.gap, c, 4)[0, 0], SMALL_C_GRID
    )
    print(f"stationary f11 truncated at c^4: slope {est_f11.slope:.3f} (expected 8)")

    est_exact = order_estimate(
        lambda c: matched_error_for(h, 0.0, c), lambda c: 0.0, SMALL_C_GRID
    )
    print(f"pure raising coupling (lam = 0) saturates: {est_exact.saturated}")


def matched_error_for(h: Hamiltonian, lam: complex, c: float) -> float:
    series = weak_rates(SystemSpec(h, JordanL(lam, 0.1)))
    md = spectrum(SystemSpec(h, JordanL(lam, c)))
    numeric = [m.rate for m in md.modes for _ in m.vectors]
    worst = 0.0
    for pred in series.predicted(c):
        j = int(np.argmin([abs(n - pred) for n in numeric]))
        worst = max(worst, abs(numeric.pop(j) - pred))
    return worst


if __name__ == "__main__":
    main()
