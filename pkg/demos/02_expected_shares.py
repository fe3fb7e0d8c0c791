"""Three routes to the same expected shares.

For a uniform-units survival pool the expected share of each member can be
computed by walking every indicator outcome, by the claimant-count closed
forms, or by seeded simulation. This script runs all three on one
heterogeneous pool and prints them side by side.
"""

import numpy as np

from poolshare import (
    BernoulliModel,
    BernoulliSampler,
    TontineRule,
    expected_share_joint_counts,
    expected_share_uniform_units,
    expected_shares_enumeration,
    expected_shares_monte_carlo,
    homogeneous_expected_shares,
)

probs = (0.92, 0.85, 0.7, 0.55, 0.4)
model = BernoulliModel(probs)
rule = TontineRule((1.0,) * (model.n + 1))

enum = expected_shares_enumeration(rule, model)
closed = [expected_share_uniform_units(model, i) for i in range(model.n)]
joint = [expected_share_joint_counts(model, i) for i in range(model.n)]
mc = expected_shares_monte_carlo(rule, BernoulliSampler(model), 400_000, seed=2024)

print(f"survival probabilities: {probs}")
print(f"{'agent':>6} {'enumeration':>14} {'count form':>14} {'joint form':>14} "
      f"{'monte carlo':>14} {'mc stderr':>10}")
for i in range(model.n):
    print(f"{i:>6} {enum.means[i]:>14.10f} {closed[i]:>14.10f} {joint[i]:>14.10f} "
          f"{mc.means[i]:>14.10f} {mc.stderr[i]:>10.2e}")
print(f"{'admin':>6} {enum.means[-1]:>14.10f} {model.admin_probability:>14.10f} "
      f"{'':>14} {mc.means[-1]:>14.10f} {mc.stderr[-1]:>10.2e}")

worst = max(abs(enum.means[i] - closed[i]) for i in range(model.n))
print(f"\nlargest exact-route disagreement: {worst:.2e}")

print("\nhomogeneous pools have a two-line answer: (1 - q^n)/n each, q^n for the admin")
for n in (2, 10, 100):
    part, admin = homogeneous_expected_shares(n, q=0.5)
    print(f"  n={n:>4}: participant {part:.8f}, admin {admin:.3e}")
