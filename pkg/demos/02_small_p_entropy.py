"""
Binary entropy at p = 1e-22
===========================

With p this small, 1 - p rounds to 1.0 and the naive formula loses the
(1-p) log(1-p) term, which is about as large as the p log p term.
"""

import math

import numpy as np

from chaincomplexity.entropy import binary_shannon_entropy, pade_log1m, stable_one_minus_term

p = 3.9e-22
naive = -(p * math.log2(p) + (1 - p) * math.log2(1 - p))
print(f"naive  {naive:.6e}")
print(f"stable {binary_shannon_entropy(p):.6e}")
print(f"-(1-p)log2(1-p) alone {stable_one_minus_term(p):.6e}  (close to p/ln 2 = {p / math.log(2):.6e})")

# %%
# The Padé form -x(6-x)/(6-4x) is accurate for tiny x but its relative
# error grows like x**3/36, reaching 3e-5 at x = 0.1.
for x in np.logspace(-6, -1, 6):
    rel = abs(pade_log1m(x) / math.log1p(-x) - 1)
    print(f"x={x:8.1e}  rel.err={rel:.2e}  x^3/36={x**3 / 36:.2e}")
