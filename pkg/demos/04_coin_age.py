"""
Coin age and kernel search
==========================

A coinstake kernel hits with probability proportional to the coin-days it
consumes, so doubling coin age halves the expected search time.
"""

import statistics

from chaincomplexity.coinage import WalletOutput, consume_coin_age, expected_kernel_time
from chaincomplexity.scenarios import bundled_scenario, run_scenario

DAY = 86400

# Bob holds 10 coins for 90 days and stakes them
out = WalletOutput(10, received_at=0.0, owner="bob")
record = consume_coin_age(out, 90 * DAY)
print("consumed coin-days:", record.consumed_coin_days)

# 100 coin-years expected in 2 days means 200 coin-years in 1 day
ref = (100 * 365.0, 2 * DAY)
print("200 coin-years:", expected_kernel_time(200 * 365.0, ref) / DAY, "days")

# %%
# Simulated: 1000 outputs aged 100 days against 1000 aged 200 days.
report = run_scenario(bundled_scenario("coinage"))
for owner in ("bob", "alice"):
    waits = [e.wait for e in report.kernel_events if e.owner == owner and e.wait == e.time]
    print(owner, len(waits), "kernels, mean wait", round(statistics.fmean(waits)), "s")
