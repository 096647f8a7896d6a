"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL ...`` line; the lines are
also repeated in pytest's terminal summary. Run directly with
``python tests/test_acceptance.py`` to get just the lines.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from sidelink import (HashOracle, Lemma1Config, OneRoundProtocol, compression_report,
                      derandomize, derive_seed, entropy_bound_check, fano_lower_bound,
                      information_complexity, lemma1_transmit,
                      make_delta_noise, make_harmonic_permutation, make_independent_uniform,
                      shannon_entropy, staged_outcomes, two_way_lower_bound, ExperimentConfig)
from sidelink.bounds import random_entropy_pair
from sidelink.cli import main as cli_main
from sidelink.experiment import iter_trials
from sidelink.protocols import ConstRoundConfig, dyadic_bucket, hash_count

RESULTS: list[str] = []
MASTER = 2024


def report(n: int, ok: bool, detail: str, elapsed: float) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}  [{elapsed:.1f}s]"
    RESULTS.append(line)
    print(line)


# 1 -----------------------------------------------------------------------------

def test_criterion_01_lemma1_hard_ceiling():
    t0 = time.time()
    # mu(x|y) is 3/4 or 1/1024 here, both exact in binary floating point
    j = make_delta_noise(256, 0.25)
    cfg = Lemma1Config(0.125, 2)
    runs = bad = 0
    for s in range(32):
        oracle = HashOracle(derive_seed(MASTER, s), j.nx)
        for y in range(j.ny):
            mu = j.condition_on(y).dist
            res = staged_outcomes(mu, cfg, oracle)
            surprisal = np.array([math.log2(1 / Fraction(mu.prob(int(a)))) for a in res.symbols])
            ceiling = surprisal + surprisal / 2 + 2 + 3 + 5
            bad += int(np.sum(res.total_bits > ceiling))
            runs += len(res.symbols)
    elapsed = time.time() - t0
    ok = bad == 0 and runs == 257 * 257 * 32 and elapsed < 60
    report(1, ok, f"{runs} runs, {bad} above log2(1/mu)*3/2 + 10", elapsed)
    assert ok


# 2 -----------------------------------------------------------------------------

def test_criterion_02_lemma1_error():
    t0 = time.time()
    j = make_delta_noise(256, 0.25)
    cfg = Lemma1Config(0.125, 2)
    rng = np.random.default_rng(MASTER)
    pairs = [tuple(p) for p in j.support[rng.choice(len(j.support), 20, replace=False)]]
    trials = 10_000
    limit = 1 / 8 + 3 * math.sqrt((1 / 8) / trials)
    worst = 0.0
    for m, (x, y) in enumerate(pairs):
        mu = j.condition_on(int(y)).dist
        wrong = sum(not lemma1_transmit(int(x), mu, cfg,
                                        HashOracle(derive_seed(MASTER + m, s), j.nx)).correct
                    for s in range(trials))
        worst = max(worst, wrong / trials)
    elapsed = time.time() - t0
    ok = worst <= limit and elapsed < 300
    report(2, ok, f"worst per-pair error {worst:.4f} <= {limit:.4f} over 20 pairs", elapsed)
    assert ok


# 3 -----------------------------------------------------------------------------

def _records(protocol: str, trials: int):
    cfg = ExperimentConfig(distribution="delta-noise:n=1024,delta=0.25", protocol=protocol,
                           eps=0.125, trials=trials, master_seed=MASTER)
    joint = cfg.validate()
    return cfg, joint, list(iter_trials(cfg, joint))


def test_criterion_03_theorem1_expectation():
    t0 = time.time()
    cfg, joint, records = _records("theorem1", 100_000)
    h_sum = joint.conditional_entropy
    d = 0.25
    h_closed = -(1 - d) * math.log2(1 - d) - d * math.log2(d / 1024)
    mean = float(np.mean([r.outcome.transcript.total_bits for r in records]))
    limit = h_sum + 2 * math.sqrt(h_sum) + 3 + 5
    elapsed = time.time() - t0
    ok = (abs(h_sum - h_closed) < 1e-6 and abs(h_sum - 3.3113) < 1e-4
          and mean <= limit and elapsed < 300)
    report(3, ok, f"H(X|Y)={h_sum:.6f} (closed {h_closed:.6f}); mean bits {mean:.3f} <= {limit:.3f}",
           elapsed)
    assert ok


# 4 -----------------------------------------------------------------------------

def test_criterion_04_constant_rounds():
    t0 = time.time()
    cfg, joint, records = _records("constround", 100_000)
    h = joint.conditional_entropy
    k = hash_count(0.125)
    l = ConstRoundConfig.for_entropy(0.125, h).l
    rounds = np.mean([r.outcome.transcript.rounds for r in records])
    bits = np.mean([r.outcome.transcript.total_bits for r in records])
    limit = 3 * h + 3 + 6
    per_run_bad = 0
    for r in records:
        j_x = dyadic_bucket(joint.condition_on(r.y).dist.exact_prob(r.x))
        if not r.outcome.transcript.bits_a_to_b < k + l + 2 * j_x:
            per_run_bad += 1
    elapsed = time.time() - t0
    ok = rounds <= 4.05 and bits <= limit and per_run_bad == 0 and elapsed < 300
    report(4, ok, f"mean rounds {rounds:.3f} <= 4.05; mean bits {bits:.3f} <= {limit:.3f}; "
                  f"{per_run_bad} runs with Alice bits >= k + l + 2j", elapsed)
    assert ok


# 5 -----------------------------------------------------------------------------

def test_criterion_05_compression():
    t0 = time.time()
    p = OneRoundProtocol.xor_pad(2)
    j = make_independent_uniform(4, 4)
    info = information_complexity(p, j)
    trials = 10_000
    rep = compression_report(p, j, 0.125, trials, MASTER)
    sd_limit = 1 / 8 + 3 * math.sqrt((1 / 8) / trials)
    bits_limit = 2 + 2 * math.sqrt(2) + 3 + 5
    elapsed = time.time() - t0
    ok = (abs(info - 2.0) <= 1e-9 and rep.max_stat_distance <= sd_limit
          and rep.mean_bits <= bits_limit and elapsed < 300)
    report(5, ok, f"IC={info:.12f}; max SD {rep.max_stat_distance:.4f} <= {sd_limit:.4f}; "
                  f"mean bits {rep.mean_bits:.3f} <= {bits_limit:.3f}", elapsed)
    assert ok


# 6 -----------------------------------------------------------------------------

def test_criterion_06_derandomization():
    t0 = time.time()
    j = make_delta_noise(64, 0.25)
    seeds = [derive_seed(MASTER, i) for i in range(16)]
    ev = derandomize("theorem1", j, 0.125, seeds)
    fano = fano_lower_bound(j, 0.125)
    elapsed = time.time() - t0
    ok = ev.error <= 0.125 and ev.mean_bits_a_to_b >= fano and elapsed < 120
    report(6, ok, f"seed #{seeds.index(ev.seed)} error {ev.error:.4f}; "
                  f"A->B bits {ev.mean_bits_a_to_b:.3f} >= fano {fano:.3f}", elapsed)
    assert ok


# 7 -----------------------------------------------------------------------------

def test_criterion_07_entropy_lemma():
    t0 = time.time()
    rng = np.random.default_rng(MASTER)
    violations = 0
    for _ in range(10_000):
        p, q = random_entropy_pair(rng, 1000)
        # independent evaluation of both sides
        lhs = float(np.sum(p * np.log2(1 / p)))
        rhs = float(np.sum(q * np.log2(1 / q))) - 2
        lib = entropy_bound_check(p, q)
        violations += (not lib.holds) + (lhs < rhs - 1e-12)
    elapsed = time.time() - t0
    ok = violations == 0 and elapsed < 60
    report(7, ok, f"10000 random (p, q), {violations} violations", elapsed)
    assert ok


# 8 -----------------------------------------------------------------------------

def test_criterion_08_entropy_oracles():
    t0 = time.time()
    worst = 0.0
    for n in (2, 16, 256, 1024, 4096):
        for d in (0.05, 0.1, 0.25, 0.45):
            closed = -(1 - d) * math.log2(1 - d) - d * math.log2(d) + d * math.log2(n)
            worst = max(worst, abs(make_delta_noise(n, d).conditional_entropy - closed))
    hp = make_harmonic_permutation(5)
    per_sigma = [shannon_entropy(hp.condition_on(y).dist) for y in range(hp.ny)]
    spread = max(per_sigma) - min(per_sigma)
    hn = sum(1 / i for i in range(1, 6))
    formula = sum(math.log2(i * hn) / (i * hn) for i in range(1, 6))
    harm_gap = abs(per_sigma[0] - formula)
    elapsed = time.time() - t0
    ok = worst <= 1e-6 and spread <= 1e-12 and harm_gap <= 1e-9 and elapsed < 60
    report(8, ok, f"delta-noise max gap {worst:.1e} on 20 points; harmonic sigma spread "
                  f"{spread:.1e}, sum-formula gap {harm_gap:.1e}", elapsed)
    assert ok


# 9 -----------------------------------------------------------------------------

def _two_way_independent(n, d, eps):
    a = (1 - d - d / n) * (math.log(d) - math.log(eps + d / n)) / math.log(2)
    b = (d - 2 * eps) * math.log(n + 1) / math.log(2)
    return a + b - 2 * d


def test_criterion_09_bound_evaluators():
    t0 = time.time()
    value = two_way_lower_bound(1024, 0.25, 1 / 64)
    point_ok = abs(value - 4.67) <= 0.01 and abs(value - _two_way_independent(1024, 0.25, 1 / 64)) < 1e-9
    worst = 0.0
    for n in (2**10, 2**16, 2**20):
        lo, hi = 1 / n, 1 / math.log2(n)
        for eps in (lo, math.sqrt(lo * hi), hi):
            simple = 0.25 * math.log2(n) + 0.75 * math.log2(1 / eps)
            worst = max(worst, abs(two_way_lower_bound(n, 0.25, eps) - simple))
    elapsed = time.time() - t0
    ok = point_ok and worst <= 2 and elapsed < 1
    report(9, ok, f"two_way(1024, 1/4, 1/64) = {value:.4f}; regime max gap {worst:.3f} (limit 2)",
           elapsed)
    assert ok


# 10 ----------------------------------------------------------------------------

def test_criterion_10_reproducibility(tmp_path, capsys):
    t0 = time.time()
    rows, summary = tmp_path / "rows.csv", tmp_path / "rows.summary.json"
    argv = ["--seed", str(MASTER), "experiment", "--dist", "delta-noise:n=256",
            "--protocol", "constround", "--trials", "2000",
            "--output", str(rows)]
    snaps = []
    for _ in range(2):
        cli_main(argv)
        snaps.append((rows.read_bytes(), summary.read_bytes()))
    capsys.readouterr()
    elapsed = time.time() - t0
    ok = snaps[0] == snaps[1] and len(snaps[0][0]) > 0
    report(10, ok, f"two CLI runs, rows {len(snaps[0][0])} B and summary {len(snaps[0][1])} B "
                   f"byte-identical: {snaps[0] == snaps[1]}", elapsed)
    assert ok


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
