"""How good are TCL2 and TCL4 for a single pair, as a function of alpha^2?"""
import numpy as np

from tclecho import fidelity_sweep

# For each alpha^2 we solve for b (below and above |delta|), propagate exactly,
# and compare electron density matrices at half revival and at revival.
grid = np.arange(1, 26) * 0.04
points = fidelity_sweep(grid, branch="below")

print(f"{'alpha^2':>8} {'F2(half)':>10} {'F4(half)':>10} {'F2(rev)':>10}")
for p in points[::4]:
    print(f"{p.alpha_sq:8.2f} {p.fid_tcl2_half:10.5f} {p.fid_tcl4_half:10.5f} {p.fid_tcl2_revival:10.7f}")

# Both orders are exact at revival; at half revival the worst case is alpha^2 = 1.
worst = points[-1]
print(f"minimum fidelity: TCL2 {worst.fid_tcl2_half:.3f}, TCL4 {worst.fid_tcl4_half:.3f}")
