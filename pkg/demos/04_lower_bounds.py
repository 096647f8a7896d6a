"""
How far from optimal?
=====================

Lower bounds on average communication for error eps, compared with what the
staged protocol actually spends.
"""

import math

from sidelink import (ExperimentConfig, fano_lower_bound, make_delta_noise, one_way_lower_bound,
                      run_experiment, two_way_lower_bound)

n, delta, eps = 1024, 0.25, 1 / 64
j = make_delta_noise(n, delta)
print("fano   ", round(fano_lower_bound(j, eps), 3))
print("one-way", round(one_way_lower_bound(n, delta, eps), 3))
print("two-way", round(two_way_lower_bound(n, delta, eps), 3))

s = run_experiment(ExperimentConfig(distribution=f"delta-noise:n={n}", eps=eps, trials=3000))
for b in s["bounds"]:
    print(f"{b['bound_name']:>8}: bound {b['value']:.2f}  measured {b['measured']:.2f}  "
          f"ok={b['satisfied_by_measurement']}")

# the two-way bound against its rough form (1/4) log2 n + (3/4) log2(1/eps)
for n in (2**10, 2**16, 2**20):
    e = 1 / math.sqrt(n * math.log2(n))
    print(n, round(two_way_lower_bound(n, 0.25, e), 2),
          round(0.25 * math.log2(n) + 0.75 * math.log2(1 / e), 2))
