"""
Nxt forging race
================

Every account hashes its public key with the last generation signature to
get a hit, then waits until base_target * seconds * balance exceeds it.
The base target retargets towards one block per minute.
"""

from chaincomplexity.nxt import make_account, nxt_complexity
from chaincomplexity.scenarios import bundled_scenario, run_scenario
from chaincomplexity.sim import empirical_complexity, simulate_nxt_forging, stake_share_estimate

report = run_scenario(bundled_scenario("nxt"))
print(f"{report.blocks} blocks, mean interval {report.mean_interval(warmup=100):.2f} s")
print(f"empirical C = {empirical_complexity(report):.4f}, analytic = {nxt_complexity(60):.4f}")

# %%
# Win shares are not proportional to stake: the richest account's first
# crossing time is stochastically smallest, so it wins more than its share.
accounts = [make_account("big", 750_000_000), make_account("small", 250_000_000)]
shares = stake_share_estimate(simulate_nxt_forging(accounts, 600_000, 3), accounts)
print("3:1 stakes ->", {k: round(v, 3) for k, v in shares.items()})

# %%
# With tracing on, each block records the hits and the candidates that
# crossed their targets in the winning second.
traced = simulate_nxt_forging(accounts, 600, 3, trace=True)
for t in traced.trace[:5]:
    print(t.height, t.wait, "s", t.candidates, "->", t.winner)
