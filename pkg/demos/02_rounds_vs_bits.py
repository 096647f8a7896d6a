"""
Fewer rounds for more bits
==========================

The staged protocol sized by sqrt(H(X|Y)) is close to H(X|Y) in expected
bits but may talk back and forth many times. The doubling schedule settles
in a constant expected number of rounds at the cost of a larger constant
factor on the entropy.
"""

from sidelink import ExperimentConfig, run_experiment

for protocol in ("theorem1", "constround", "verbatim"):
    cfg = ExperimentConfig(distribution="delta-noise:n=1024", protocol=protocol,
                           trials=4000, master_seed=1)
    s = run_experiment(cfg)
    st = s["stats"]
    print(f"{protocol:>10}: {st['mean_total_bits']:6.2f} bits, {st['mean_rounds']:.2f} rounds, "
          f"error {st['error_rate']:.3f}")

print("H(X|Y) =", round(s["distribution"]["conditional_entropy"], 4))
print("ceilings:", {k: round(v, 2) for k, v in s["ceilings"].items()})

# halving eps costs about one extra bit
for eps in (1 / 4, 1 / 8, 1 / 16, 1 / 32):
    s = run_experiment(ExperimentConfig(distribution="delta-noise:n=256", eps=eps, trials=4000))
    print(f"eps={eps:<7} mean bits {s['stats']['mean_total_bits']:.2f}")
