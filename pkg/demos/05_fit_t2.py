"""Extracting T2 and the stretch exponent from an echo curve."""
import numpy as np

from tclecho import fit_stretched_exp
from tclecho.fitting import stretched_exp

t = np.linspace(0, 40e-6, 200)
clean = stretched_exp(t, 10e-6, 1.3)
fit = fit_stretched_exp(times=t, values=clean)
print("noise free:")
print(fit.as_text())

# A little measurement noise barely moves the estimate.
rng = np.random.default_rng(1)
noisy = clean + rng.normal(0, 0.01, t.size)
print("1 % noise:")
print(fit_stretched_exp(times=t, values=noisy).as_text())
