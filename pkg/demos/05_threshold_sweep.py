"""Sweeping the budget ratio across both regime thresholds.

The bound is continuous through r1 and r2, the inactive multiplier dies
off at its threshold, and for large q the upper threshold approaches the
single-sided limit (4 pi sigma_p)^(-1/p).
"""

import numpy as np

import wavelock as wl

BETA, P, Q, A = 0.5, 2.0, 4.0, 1.0
consts = wl.derive_constants(wl.ProblemParams(BETA, P, Q, A, 1.0))
print(f"r1 = {consts.r1:.6f}, r2 = {consts.r2:.6f}")
print()

print("ratio      regime    bound        lambda1      lambda2")
for ratio in np.concatenate([
    np.linspace(0.20, consts.r1, 4, endpoint=False),
    np.linspace(consts.r1 + 1e-3, consts.r2 - 1e-3, 7),
    np.linspace(consts.r2, 0.75, 4),
]):
    rep = wl.compute_bound(wl.ProblemParams(BETA, P, Q, A, float(ratio)))
    print(f"{ratio:.4f}    {rep.regime:8s}  {rep.bound:.9f}  "
          f"{rep.lambda1:<11.5g}  {rep.lambda2:<11.5g}")
print()

# Zoom onto r2: lambda2 collapses and the bound glues to the closed form.
print("approach to r2 from inside the dual window:")
for delta in (1e-2, 1e-4, 1e-6):
    rep = wl.compute_bound(wl.ProblemParams(BETA, P, Q, A, consts.r2 * (1 - delta)))
    print(f"  1 - B/(A r2) = {delta:.0e}:  bound {rep.bound:.12f}, "
          f"lambda2 {rep.lambda2:.3e}")
closed = wl.compute_bound(wl.ProblemParams(BETA, P, Q, A, consts.r2 * 1.001))
print(f"  closed form on the other side: {closed.bound:.12f}")
print()

# Large q: r2 tends to the one-constraint threshold.
limit = (4 * np.pi * consts.sigma_p) ** (-1.0 / P)
print(f"(4 pi sigma_p)^(-1/p) = {limit:.6f}")
for q in (8.0, 32.0, 200.0):
    c = wl.derive_constants(wl.ProblemParams(BETA, P, q, A, 1.0))
    print(f"  q = {q:5.0f}: r2 = {c.r2:.6f} "
          f"(off the limit by {abs(c.r2 - limit) / limit:.2%})")
