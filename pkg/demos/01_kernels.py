"""Tour of the kernels: partition of unity, chi(1), psi^- and the jump weight.

Run with ``python3 demos/01_kernels.py``.
"""

import math
import warnings

import numpy as np

from expsampling import BSpline, Jackson, check_kernel_conditions, combined_reference_kernel, psi_minus

warnings.simplefilter("ignore", RuntimeWarning)  # the Jackson truncation notice

kernels = {
    "B-spline, order 2": BSpline(2),
    "B-spline, order 3": BSpline(3),
    "combined reference kernel": combined_reference_kernel(),
    "Jackson, gamma=1 beta=2": Jackson(1.0, 2),
}

print(f"{'kernel':28s} {'partition':>10s} {'chi(1)':>8s} {'M_0':>7s} {'alpha':>12s}")
for label, kernel in kernels.items():
    report = check_kernel_conditions(kernel)
    alpha = report.alpha_estimate
    alpha = f"{alpha:.6f}" if isinstance(alpha, float) else alpha
    print(f"{label:28s} {report.partition_max_residual:10.1e} {report.chi_at_one:8.4f} "
          f"{report.M0:7.4f} {alpha:>12s}")

# psi^- is recurrent with period e: only its values on [1, e] matter.
ref = combined_reference_kernel()
u = np.exp(np.linspace(0.05, 0.95, 7))
print("\npsi^-(u) on (1, e) for the reference kernel:", np.round(psi_minus(ref, u), 12))
print("psi^-(u) on (1, e) for the order-2 B-spline:  ", np.round(psi_minus(BSpline(2), u), 4))
print("\nThe B-spline value tracks log u, so its jump weight depends on where t falls between nodes.")
print(f"For the reference kernel it is flat at {psi_minus(ref, math.sqrt(math.e)):.2f}.")
