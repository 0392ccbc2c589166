"""A model vanadyl complex, first alone, then in a partly protonated solvent."""
from pathlib import Path

import numpy as np

from tclecho import BathConfig, EchoProtocol, echo_envelope, fit_stretched_exp, generate_bath
from tclecho.fileio import parse_hyperfine_csv, parse_xyz
from tclecho.spin_model import pair_arrays

data = Path(__file__).parent / "data"
molecule = parse_hyperfine_csv(data / "vo_model_hyperfine.csv", parse_xyz(data / "vo_model.xyz"))
protons = [s for s in molecule if s.isotope == "1H"]
print(f"{len(protons)} molecular protons, "
      f"A_zz from {min(s.A_zz for s in protons):.3g} to {max(s.A_zz for s in protons):.3g} rad/s")

proto = EchoProtocol.linspace(50e-6, 256)


def envelope(spins):
    _, delta, b = pair_arrays(spins)
    return echo_envelope((delta, b), proto).values


# The bare molecule has few pairs, so the echo oscillates and never decays fully.
bare = envelope(protons)

# Residual solvent protons; larger fractions with the same seed extend the same bath.
for fraction in (0.01, 0.05):
    bath = generate_bath(BathConfig(protonation_fraction=fraction, seed=7), start_id=1000)
    full = envelope(protons + bath)
    fit = fit_stretched_exp(times=proto.times, values=full)
    print(f"fraction {fraction:.2f}: {len(bath):4d} bath protons, "
          f"T2 = {fit.T2 * 1e6:6.2f} us, beta = {fit.beta:.2f}")

idx = [32, 64, 128, 255]
print("t/us     ", "  ".join(f"{proto.times[i] * 1e6:6.1f}" for i in idx))
print("bare     ", "  ".join(f"{bare[i]:6.3f}" for i in idx))
print("with bath", "  ".join(f"{full[i]:6.3f}" for i in idx))
print("lowest bare value:", np.round(bare.min(), 3))
