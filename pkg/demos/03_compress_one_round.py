"""
Compressing a one-round protocol
================================

Alice's message Pi = X xor R with a public 2-bit pad R. The message reveals
2 bits about X, so its information cost is 2; Bob recovers Pi from the
staged hash protocol with the transcript prior mu(pi | y, r).
"""

from sidelink import (OneRoundProtocol, compression_report, information_complexity,
                      make_independent_uniform)

p = OneRoundProtocol.xor_pad(2)
j = make_independent_uniform(4, 4)
print("information complexity:", information_complexity(p, j))

rep = compression_report(p, j, eps=0.125, trials_per_pair=1000, master_seed=3)
print("mean bits", round(rep.mean_bits, 3), "error", round(rep.error_rate, 4))
print("worst statistical distance to the true message law:", round(rep.max_stat_distance, 4))

# a protocol that says nothing costs nothing to compress
print("constant protocol IC:", information_complexity(OneRoundProtocol.constant(4), j))
