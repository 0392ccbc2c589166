"""One electron, two protons: exact echo against the pair closed form."""
import numpy as np

from tclecho import ExactEcho, PairParams, SpinSystem, revival_time, w_tcl2, w_tcl4_exponent

# A pair is fixed by the hyperfine difference delta and the flip-flop coupling b.
# alpha^2 peaks at 1 when |delta| = |b|.
delta, b = 3.0e4, 4.0e4  # rad/s
pair = PairParams.from_couplings(delta, b)
tau = revival_time(pair)
print(f"alpha^2 = {pair.alpha_sq:.4f}, revival after a delay of {tau * 1e6:.2f} us")

# Exact propagation of the 8-dim electron + pair space.
# t is the delay before the pi pulse; the echo is read at 2t.
t = np.linspace(0, 2 * tau, 9)
exact = ExactEcho(SpinSystem.for_pair(delta, b)).series(t).values

# TCL2 and TCL4 exponentiate the pair contribution; the exact result is 1 - W.
print(f"{'t/us':>8} {'exact':>10} {'1 - W':>10} {'TCL2':>10} {'TCL4':>10}")
for ti, v in zip(t, exact):
    w = w_tcl2(pair, ti)
    print(f"{ti * 1e6:8.2f} {v:10.6f} {1 - w:10.6f} {np.exp(-w):10.6f} {np.exp(-w_tcl4_exponent(pair, ti)):10.6f}")
print("max |exact - (1 - W)| =", np.max(np.abs(exact - (1 - w_tcl2(pair, t)))))
