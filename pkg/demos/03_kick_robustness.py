"""How much exchange dynamics survives an imperfect kick.

Scaling the kick pulse area by 1 + epsilon leaves a residue of the
coherent dynamics uncancelled. The metric below is the mean overlap
fidelity between the ideal and the perturbed echo outputs over the test
states |g,1>..|g,5> at gT = 10: even a 7 percent area error still
cancels more than 99 percent by this measure.
"""

import numpy as np

from jc_echo import SystemParams, build_layout, cancellation_metric

params = SystemParams(layout=build_layout(1, 15))

print(" epsilon   cancellation metric")
for eps in np.linspace(-0.1, 0.1, 21):
    metric = cancellation_metric(params, float(eps))
    marker = "  <-- 7% error" if abs(abs(eps) - 0.07) < 1e-12 else ""
    print(f"  {eps:+5.2f}   {metric:.6f}{marker}")

print("\nRamsey-style readout of the same imperfection: sweeping the kick")
print("phase pi(1+epsilon) modulates the output like an interferometer;")
print("run `jc-echo preset kick_robustness` for the CSV.")
