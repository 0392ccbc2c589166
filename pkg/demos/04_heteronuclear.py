"""Why pairs of different isotopes can be dropped."""
import numpy as np

from tclecho import HeteroPair, table1_report, w_hetero
from tclecho.spin_model import FieldConfig, NuclearSpin

# Each heavy nucleus sits 3 A from a proton along the field at 0.35 T.
# The Larmor mismatch detunes the flip-flop, so the exponent stays tiny.
for row in table1_report(["2D", "63Cu", "55Mn", "51V"]):
    print(f"{row.isotope:>5} I = {row.spin_I:3.1f}  max W = {row.max_w:.2e}")

# Same pair with the mismatch switched off by hand: flip-flops come back.
field = FieldConfig(B0=0.35)
v = NuclearSpin.from_isotope(0, "51V", (0, 0, 0), A_zz=1e5)
h = NuclearSpin.from_isotope(1, "1H", (0, 0, 3.0), A_zz=0.0)
pair = HeteroPair.from_spins(v, h, field)
t = np.linspace(0, 100e-6, 2001)
print(f"Larmor mismatch {pair.larmor_mismatch:.3e} rad/s")
for dw in (pair.larmor_mismatch, 1e6, 1e4, 0.0):
    print(f"  mismatch {dw:10.3e}: max W = {w_hetero(pair, t, larmor_mismatch=dw).max():.2e}")
