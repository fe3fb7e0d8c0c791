"""How an endowment contingency fund splits its proceeds.

Three friends and an administrator pool money at time 0. At time 1 the fund
is divided according to a rule applied to what actually happened. This script
walks through the built-in rules on a few concrete outcomes, for both an
active administrator (who staked money and keeps the fund when nobody claims)
and a passive one (who staked nothing; everyone is refunded when nobody
claims).
"""

from poolshare import (
    IndicatorScenario,
    InvestmentVector,
    LossScenario,
    Mode,
    order_statistic_rule,
    payouts_active,
    payouts_passive,
    proportional_rule,
    tontine_rule,
)

active = InvestmentVector((100.0, 150.0, 50.0, 30.0))
print(f"time-0 investments: {active.amounts}  (last entry = administrator)")
print(f"fund at time 1: {active.total:.2f}\n")

print("== proportional-to-loss rule ==")
for losses in [(80.0, 20.0, 0.0), (0.0, 0.0, 0.0)]:
    shares = proportional_rule(LossScenario(losses))
    payouts = payouts_active(active, shares)
    print(f"losses {losses} -> shares {tuple(round(s, 4) for s in shares.shares)}"
          f" -> payouts {tuple(round(w, 2) for w in payouts.payouts)}")

print("\n== order-statistic rule (first participant holds the smallest loss) ==")
shares = order_statistic_rule(LossScenario((90.0, 10.0, 40.0)))
print(f"losses (90, 10, 40) -> sorted shares {tuple(round(s, 4) for s in shares.shares)}")

print("\n== survival tontine with claiming units (2, 1, 1) ==")
units = (2.0, 1.0, 1.0, 1.0)
for indicators in [(1, 1, 0), (0, 0, 1), (0, 0, 0)]:
    shares = tontine_rule(units, IndicatorScenario(indicators))
    payouts = payouts_active(active, shares)
    print(f"survivors {indicators} -> payouts {tuple(round(w, 2) for w in payouts.payouts)}")

print("\n== same tontine, passive administrator ==")
passive = InvestmentVector((100.0, 150.0, 50.0, 0.0), Mode.PASSIVE)
for indicators in [(1, 1, 0), (0, 0, 0)]:
    shares = tontine_rule(units, IndicatorScenario(indicators))
    payouts = payouts_passive(passive, shares)
    note = "  <- everyone refunded" if indicators == (0, 0, 0) else ""
    print(f"survivors {indicators} -> payouts {tuple(round(w, 2) for w in payouts.payouts)}{note}")
