"""
Sending x to a receiver who already knows y
===========================================

Bob holds y and a prior mu(.|y) over Alice's input. Alice sends hash bits of
x in stages; after each stage Bob checks whether some candidate in the next
probability bucket matches and answers 1 (done) or 0 (send more).
"""

from sidelink import HashOracle, Lemma1Config, lemma1_transmit, make_delta_noise

# X equals Y with probability 3/4, otherwise it is one of the other 256 values
j = make_delta_noise(256, 0.25)
print(j, "H(X|Y) =", round(j.conditional_entropy, 4))

cfg = Lemma1Config(eps=0.125, h_stage=2)
print("first message carries k =", cfg.k, "bits, later stages add", cfg.h_stage)

# a likely input: x == y, settled after the first exchange
oracle = HashOracle(seed=11, domain_size=j.nx)
out = lemma1_transmit(40, j.condition_on(40).dist, cfg, oracle)
print(out.transcript.dump(), end="")
print("Bob decoded", out.output, "correct:", out.correct)

# an unlikely input (mu = 1/1024) walks through the stages until bucket 10
out = lemma1_transmit(5, j.condition_on(40).dist, cfg, oracle)
print(out.transcript.dump(), end="")
print("bits", out.transcript.total_bits, "rounds", out.transcript.rounds, "correct:", out.correct)

# x = 7 shares its first 4 hash bits with the likely candidate 40, so Bob
# stops early with the wrong answer; eps bounds how often that happens
out = lemma1_transmit(7, j.condition_on(40).dist, cfg, oracle)
print("x=7 decoded as", out.output)
