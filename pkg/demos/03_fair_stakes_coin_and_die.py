"""Fair entry stakes for a game of chance with a coin and a die.

Player 1 tosses a coin and wins on heads; player 2 rolls a die and wins on a
one. A sole winner takes the whole pot; two winners split it (half each
here); no winner hands the pot to the administrator, who also pays in. What
entry stakes make the game fair for all three?

Fair stakes are only determined up to scale, so we pin the scale three
equivalent ways and check the answers agree. We also back out the
both-winners split implied by a given pair of stakes.
"""

import numpy as np

from poolshare import (
    Anchor,
    BernoulliModel,
    Mode,
    TwoParticipantBetaRule,
    beta_from_investments,
    check_fair_active,
    expected_shares_enumeration,
    two_participant_expectations,
    two_participant_tontine_fair,
)

p_coin, p_die, beta = 0.5, 1 / 6, 0.5
expectations = two_participant_expectations(p_coin, p_die, beta)
print(f"win probabilities: coin {p_coin}, die {p_die:.4f}; both-win split {beta}")
print(f"expected fund shares: {tuple(round(m, 6) for m in expectations.means)}\n")

for anchor, label in [
    (Anchor.total_all(24), "total pot fixed at 24"),
    (Anchor.participants_total(7), "players' total fixed at 7"),
    (Anchor.admin_investment(5), "administrator stake fixed at 5"),
]:
    inv = two_participant_tontine_fair(p_coin, p_die, beta, anchor)
    print(f"{label:<32} -> stakes {tuple(round(a, 6) for a in inv.amounts)}")

inv = two_participant_tontine_fair(p_coin, p_die, beta, Anchor.total_all(24))
verdict = check_fair_active(
    inv, expected_shares_enumeration(TwoParticipantBetaRule(beta), BernoulliModel((p_coin, p_die)))
)
print(f"\nenumeration check at stakes {inv.amounts}: fair={verdict.fair}, "
      f"max residual {verdict.max_abs_residual:.2e}")

passive = two_participant_tontine_fair(
    p_coin, p_die, beta, Anchor.participants_total(7), Mode.PASSIVE
)
print(f"passive variant (refunds instead of an admin stake): {passive.amounts}")

implied = beta_from_investments(p_coin, p_die, inv.amounts[0], inv.amounts[1])
print(f"\nsplit implied by stakes ({inv.amounts[0]}, {inv.amounts[1]}): {implied}")
print("note: lopsided stakes can demand a split outside [0, 1]; that raises"
      " InfeasibleBetaError")
