"""Series values at the three jumps of the test signal, next to their predicted limits.

Run with ``python3 demos/02_jump_tables.py``.
"""

from expsampling import analyze_jump, check_kernel_conditions, combined_reference_kernel, three_jump_signal

kernel = combined_reference_kernel()
f = three_jump_signal()
report = check_kernel_conditions(kernel)
ws = (5, 10, 20, 50, 100, 200, 1000)

for t in f.breakpoints:
    result = analyze_jump(kernel, f, t, ws, report)
    left, right = f.one_sided_limits(t)
    print(f"t = {t}: f(t-0) = {left:.4f}, f(t+0) = {right:.4f}, "
          f"predicted limit {result.predicted_limit_nonaligned:.4f}")
    for w, value in result.measured:
        gap = value - result.predicted_limit_nonaligned
        print(f"    w = {w:6g}   S_w f(t) = {value:.6f}   gap {gap:+.2e}")
    print()
