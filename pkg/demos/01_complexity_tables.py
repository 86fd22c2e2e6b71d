"""
Complexity of real currencies
=============================

Each currency is reduced to a two-state machine that spends one second in
"broadcasting" per block and the rest "mining".  Its statistical complexity
is the binary entropy of the per-second broadcast probability 1/(H*T).
"""

from chaincomplexity.pow import CurrencyParams, broadcast_probability
from chaincomplexity.reporting import analyze_dataset, bundled_dataset, render_table

# Bitcoin in May 2018: 2.78e19 hashes per second, one block per 600 s
btc = CurrencyParams("Bitcoin", "PoW", 600, 2.78e19)
print("P(broadcast) per hash:", broadcast_probability(btc))

# the bundled datasets carry the published figures next to each row
for name in ("table1", "table2"):
    ds = bundled_dataset(name)
    print(render_table(analyze_dataset(ds), "text", ds.source_date))

# NXT sits near 0.12 bits because its "hashrate" is one target test per
# second; the PoW coins are twenty orders of magnitude closer to zero.
