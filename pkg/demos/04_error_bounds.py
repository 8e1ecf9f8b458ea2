"""Measured errors against the rate, round-off and jitter bounds.

Run with ``python3 demos/04_error_bounds.py``.
"""

from expsampling import BSpline, combined_reference_kernel, jitter_experiment, rate_experiment, roundoff_experiment
from expsampling.signals import linear_signal, log_signal

ref = combined_reference_kernel()

print("rate, log t on [1, e^2], nu = 1/2")
for w in (10, 50, 250, 1000):
    r = rate_experiment(ref, log_signal(), w, 0.5)
    print(f"    w = {w:5d}: error {r.empirical:.3e}  bound {r.bound:.3e}  ratio {r.ratio:.3f}")

print("\nround-off, xi = 1e-3 (random draws, then the sign-matched worst case)")
for kernel, mode in ((ref, "uniform"), (BSpline(2), "adversarial")):
    r = roundoff_experiment(kernel, linear_signal(), 50, 1e-3, trials=20, seed=1, mode=mode)
    print(f"    {mode:11s}: Q = {r.empirical:.4e}  bound xi*M_0 = {r.bound:.4e}  ratio {r.ratio:.4f}")

print("\njitter, rho = 1e-4 on f(t) = t")
for kernel, mode in ((ref, "uniform"), (BSpline(2), "adversarial")):
    r = jitter_experiment(kernel, linear_signal(), 50, 1e-4, trials=20, seed=1, mode=mode)
    print(f"    {mode:11s}: J = {r.empirical:.4e}  bound = {r.bound:.4e}  ratio {r.ratio:.4f}")
