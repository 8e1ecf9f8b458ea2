"""Two subsequences of w with different limits at a jump: the order-2 B-spline case.

Along w = m / log t the point t is a node and the kernel interpolates, so the
series returns f(t). Halfway between nodes it averages the two sides instead.
A kernel with constant psi^- and chi(1) = 0 removes the discrepancy.

Run with ``python3 demos/03_divergence.py``.
"""

from expsampling import BSpline, combined_reference_kernel, divergence_witness
from expsampling.signals import unit_step

step = unit_step(2.0)
for label, kernel in (("B-spline, order 2", BSpline(2)), ("reference kernel", combined_reference_kernel())):
    wit = divergence_witness(kernel, step, 2.0, m_max=30)
    print(label)
    for (m, wa, va), (_, wo, vo) in list(zip(wit.aligned_sequence, wit.offset_sequence))[::6]:
        print(f"    m = {m:2d}: node-aligned w = {wa:7.3f} -> {va:.6f}   half-offset w = {wo:7.3f} -> {vo:.6f}")
    verdict = "no limit" if wit.diverges else "limits agree"
    print(f"    gap {wit.gap:.6f} (predicted {wit.predicted_gap:.6f}): {verdict}\n")
