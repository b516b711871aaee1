"""Growth of weighted harmonic sup norms and the Legendre envelope bound.

The product |sin^2(theta) cos(theta)|^(1/6) |Y_l^k(theta, phi)| stays uniformly
small: its sup over the sphere grows no faster than l^(1/6).  This script
sweeps all orders up to degree 40, reports the largest ratio sup / l^(1/6),
and fits a log-log slope to the per-degree maxima.

Run:  python demos/02_weighted_sup_growth.py
"""

import numpy as np

from revsense import harmonics

LMAX = 40

sups = harmonics.weighted_sup_sweep(LMAX, grid_size=2048)

print(f"Weighted sup norms, all degrees and orders up to {LMAX}:")
print(f"  {'l':>3}  {'max_k sup':>10}  {'sup / l^(1/6)':>13}")
per_degree = np.nanmax(sups, axis=1)
for ell in range(0, LMAX + 1, 5):
    ratio = per_degree[ell] / max(ell, 1) ** (1.0 / 6.0)
    print(f"  {ell:>3}  {per_degree[ell]:>10.6f}  {ratio:>13.6f}")

c_star = float(np.nanmax(sups[1:] / np.arange(1, LMAX + 1)[:, None] ** (1.0 / 6.0)))
print(f"\nSingle constant covering every mode:  C* = {c_star:.6f}")

ells = np.arange(4, LMAX + 1)
slope = np.polyfit(np.log(ells), np.log(per_degree[4:]), 1)[0]
print(f"Log-log slope of the per-degree maxima (l >= 4): {slope:.4f}")
print("  (the exponent 1/6 ~ 0.1667 is the theoretical ceiling)")

# ------------------------------------------------------- Legendre envelope

print()
print("Companion bound on the interval: (1 - x^2)^(1/2) |P_j(x)| <= 2*sqrt(pi)")
print("for unit-norm Legendre polynomials:")
x = np.linspace(-1.0, 1.0, 10_000)
env = np.sqrt(1.0 - x * x)
worst = 0.0
for j in (1, 10, 50, 100, 200):
    vals = np.abs(harmonics.eval_legendre_normalized(j, x)) * env
    peak = float(vals.max())
    worst = max(worst, peak)
    print(f"  j = {j:>3}:  max envelope value {peak:.6f}")
print(f"  bound 2*sqrt(pi) = {2.0 * np.sqrt(np.pi):.6f}  (never approached: {worst:.4f})")
