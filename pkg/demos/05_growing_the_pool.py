"""What a growing risk-sharing pool converges to.

Each member of a homogeneous pool invests 1 and, on surviving, splits the
fund equally with the other survivors. Buying individual coverage at the pure
premium instead would pay exactly (1 / p) on survival. As the pool grows, a
fair pool's payout approaches that centralized payout path by path, and the
fair administrator stake collapses geometrically. The table below estimates
the mean absolute payout gap per pool size, for both administrator modes.
"""

from poolshare import Mode, centralized_benchmark, convergence_experiment

P, INVESTMENT, PATHS = 0.5, 1.0, 100_000
print(f"survival probability {P}, investment {INVESTMENT}, {PATHS} paths per size")
print(f"centralized payout on survival: {centralized_benchmark(INVESTMENT, P, 1):.2f}\n")

for mode in (Mode.ACTIVE, Mode.PASSIVE):
    rows = convergence_experiment(P, INVESTMENT, [1, 10, 100, 1000], PATHS, seed=99, mode=mode)
    print(f"== {mode.value} administrator ==")
    print(f"{'pool size':>10} {'mean |gap|':>12} {'stderr':>10} {'admin mean':>12} {'admin exact':>12}")
    for row in rows:
        print(f"{row.n:>10} {row.mean_abs_gap:>12.6f} {row.stderr:>10.2e} "
              f"{row.admin_mean:>12.6f} {row.admin_mean_exact:>12.3e}")
    print()

print("with an active administrator the n=1 gap is exactly zero: that fair one-person")
print("pool IS the centralized contract; the passive one-person pool instead refunds")
print("the investment on every path, so its gap stays at the investment amount")
