"""
================================================================================
DEMO 2: PICKING THE CODED-SYMBOL DEGREE FROM THE RECOVERY FRACTION
================================================================================

With a fraction beta of the source recovered, a degree-m symbol is usable
iff it reduces to one unknown (case 1, recovers immediately) or two
unknowns (case 2, becomes an edge).  The encoder transmits at the degree
maximizing that probability -- this is the quantity the receiver's feedback
keeps up to date.

Also shown: the independent-draw closed forms against the exact
without-replacement probabilities, and why feedback traffic explodes near
full recovery (motivating the threshold policy of demo 3).
================================================================================
"""

import numpy as np

from fountain_lab import exact_case_probs, optimal_degree, useful_prob
from fountain_lab.degree import case1_prob

print("--- usable probability by degree (rows) and beta (columns) ---")
betas = [0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 0.9]
print("  m\\beta " + "".join(f"{b:>8.2f}" for b in betas))
for m in range(1, 9):
    row = "".join(f"{useful_prob(m, b):>8.3f}" for b in betas)
    print(f"  {m:>3d}   {row}")

print("\n--- the optimal degree as recovery progresses ---")
prev = None
for i in range(100):
    beta = i / 100
    m = optimal_degree(beta)
    if m != prev:
        print(f"  beta >= {beta:.2f}: degree {m}  (usable prob {useful_prob(m, beta):.3f})")
        prev = m

print("\nNote the pattern: degree 2 all the way to beta = 0.5, then steps up")
print("roughly like 1.41/(1-beta).  Every step is one feedback message under")
print("the update-on-every-change policy; near beta = 1 the steps crowd together.")

steps = sum(
    optimal_degree((n + 1) / 1000, 1000) != optimal_degree(n / 1000, 1000)
    for n in range(500, 999)
)
print(f"Degree changes while beta runs 0.5 -> 0.999 at k=1000: {steps}")

print("\n--- exact (distinct indices) vs independent-draw closed form ---")
k = 10_000
print("  m   beta   exact case1  approx case1   |diff|")
for m in (2, 5, 10):
    for beta in (0.3, 0.7):
        p1x, _ = exact_case_probs(k, int(beta * k), m)
        p1a = case1_prob(m, beta)
        print(f"  {m:>2d}  {beta:.1f}   {p1x:.6f}     {p1a:.6f}     {abs(p1x - p1a):.2e}")
print(f"At k = {k} the independent-draw forms are accurate to a few 1e-5;")
print("the analytic curves (demo 3) lean on them freely.")

print("\n--- the usable-probability envelope never goes below coin-flip ---")
env = [useful_prob(optimal_degree(b), b) for b in np.arange(0.0, 0.96, 0.01)]
print(f"  min over beta in [0, 0.95]: {min(env):.3f} (> 0.5)")
