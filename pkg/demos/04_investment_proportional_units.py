"""Fair stakes when claiming units equal the stakes themselves.

If each member's claiming units are their own investment, the rule reacts to
the investments, so fairness becomes a fixed-point problem: the stakes
determine the shares, and the shares determine the fair stakes. The damped
solver iterates exact expected shares until the vector stops moving. For two
members the fixed point has a closed form, which we use as a cross-check.
"""

import numpy as np

from poolshare import Anchor, BernoulliModel, SolverSettings, UnitStrategy, solve_fair_fixed_point


def closed_form(p1, p2, admin_stake):
    q1, q2 = 1 - p1, 1 - p2
    common = (1 - q1 * q2) / (p1 * q2 + p2 * q1)
    return admin_stake * (p1 / q1) * common, admin_stake * (p2 / q2) * common


print("two members, survival probabilities 1/2 and 1/6, administrator stakes 30:")
model = BernoulliModel((0.5, 1 / 6))
solved = solve_fair_fixed_point(UnitStrategy.TAVIN, model, Anchor.admin_investment(30))
want = closed_form(0.5, 1 / 6, 30)
print(f"  fixed point : {tuple(round(a, 8) for a in solved.amounts)}")
print(f"  closed form : ({want[0]:.8f}, {want[1]:.8f}, 30)")

print("\nsweep of random two-member pools (relative error vs the closed form):")
rng = np.random.default_rng(7)
worst = 0.0
for _ in range(25):
    p1, p2 = rng.uniform(0.1, 0.9, 2)
    got = solve_fair_fixed_point(UnitStrategy.TAVIN, BernoulliModel((p1, p2)),
                                 Anchor.admin_investment(1.0))
    w1, w2 = closed_form(p1, p2, 1.0)
    worst = max(worst, abs(got.amounts[0] - w1) / w1, abs(got.amounts[1] - w2) / w2)
print(f"  worst relative error over 25 pools: {worst:.2e}")

print("\nthe solver also handles larger pools, where no closed form is known:")
model5 = BernoulliModel((0.9, 0.8, 0.7, 0.6, 0.5))
settings = SolverSettings(tolerance=1e-12)
solved5 = solve_fair_fixed_point(UnitStrategy.TAVIN, model5, Anchor.total_all(100), settings)
print(f"  five-member fair stakes summing to 100: "
      f"{tuple(round(a, 4) for a in solved5.amounts)}")
