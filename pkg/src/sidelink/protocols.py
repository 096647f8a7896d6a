"""Interactive one-shot transmission of X to a receiver holding Y.

All protocols here share one skeleton, the staged hash protocol. Alice owns
a symbol ``a``; Bob owns a distribution ``mu`` with ``a`` in its support.
Bob sorts candidates into buckets ``S_i = {b : mu(b) in (2^-i-1, 2^-i]}``.
On each stage Alice tops up the hash values of ``a`` available to Bob and
Bob scans a window of buckets for a candidate consistent with every hash
value so far, answering 1 (found, stop) or 0 (continue). A
:class:`StageSchedule` fixes how many hash values are on hand after each
stage and which stage scans which bucket.

Ties are broken by scanning buckets in increasing ``i`` and taking the
smallest symbol id in the first matched bucket.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .distributions import Distribution, JointDistribution
from .engine import ProtocolOutcome, Strategy, as_bitarray, as_bitstring, run_protocol
from .errors import BadParam, NoSeedFound, NotInSupport
from .hashing import Backend, HashOracle

LEMMA1_CONSTANT = 5
THEOREM1_CONSTANT = 5
CONST_ROUND_CONSTANT = 6
_SNAP_TOL = 1e-12


def hash_count(eps: float) -> int:
    """k = ceil(log2(1/eps)) + 1, evaluated exactly on the float value of eps."""
    if not 0 < eps < 1:
        raise BadParam(f"eps must lie in (0, 1), got {eps!r}")
    inv = 1 / Fraction(eps)
    c = max(inv.numerator // inv.denominator, 1).bit_length() - 1
    if Fraction(2) ** c < inv:
        c += 1
    return c + 1


def dyadic_bucket(q: float | Fraction) -> int:
    """The i with q in (2^-i-1, 2^-i].

    Fractions are bucketed exactly. Floats within relative 1e-12 of a power
    of two are snapped onto it, so round-off never moves a symbol across a
    boundary.
    """
    if isinstance(q, Fraction):
        if not 0 < q <= 1:
            raise BadParam(f"probability {q} outside (0, 1]")
        # floor(log2(1/q)) == floor(log2(floor(1/q)))
        return (q.denominator // q.numerator).bit_length() - 1
    q = float(q)
    if not 0 < q <= 1 + _SNAP_TOL:
        raise BadParam(f"probability {q} outside (0, 1]")
    m, e = math.frexp(q)  # q = m * 2^e, m in [0.5, 1)
    # values just below a power of two already sit in its bucket; only
    # values just above 2^(e-1) need snapping down onto it
    if m - 0.5 <= 0.5 * _SNAP_TOL:
        return 1 - e
    return -e


def bucket_indices(mu: Distribution) -> np.ndarray:
    """:func:`dyadic_bucket` of every support probability of ``mu``."""
    if mu.exact is not None:
        return np.array([dyadic_bucket(q) for q in mu.exact], dtype=np.int64)
    m, e = np.frexp(mu.probs)
    return np.where(m - 0.5 <= 0.5 * _SNAP_TOL, 1 - e, -e).astype(np.int64)


class StageSchedule:
    """Hash-value budget and bucket windows of a staged protocol.

    Both methods accept ints or integer arrays.
    """

    k: int

    def bits_through(self, t):
        """Hash values of ``a`` Bob holds after Alice's message on stage t."""
        raise NotImplementedError

    def stage_of_bucket(self, i):
        """The unique stage whose window contains bucket i."""
        raise NotImplementedError


@dataclass(frozen=True)
class Lemma1Config(StageSchedule):
    """Stage 0 sends k values and scans S_0; stage t adds h and scans S_{h(t-1)+1..ht}."""

    eps: float
    h_stage: int
    k: int = field(init=False)

    def __post_init__(self):
        if int(self.h_stage) != self.h_stage or self.h_stage < 1:
            raise BadParam(f"h_stage must be a positive integer, got {self.h_stage!r}")
        object.__setattr__(self, "k", hash_count(self.eps))

    def bits_through(self, t):
        return self.k + self.h_stage * t

    def stage_of_bucket(self, i):
        return -(-i // self.h_stage)


@dataclass(frozen=True)
class ConstRoundConfig(StageSchedule):
    """Stage 0 sends k + l values and scans i <= l; stage t adds l 2^t and scans
    l(2^t - 1) < i <= l(2^(t+1) - 1)."""

    eps: float
    l: int
    k: int = field(init=False)

    def __post_init__(self):
        if int(self.l) != self.l or self.l < 1:
            raise BadParam(f"l must be a positive integer, got {self.l!r}")
        object.__setattr__(self, "k", hash_count(self.eps))

    @classmethod
    def for_entropy(cls, eps: float, cond_entropy: float) -> "ConstRoundConfig":
        # l = ceil(H(X|Y)) is 0 when X is a function of Y; clamp to 1
        return cls(eps, max(math.ceil(cond_entropy - 1e-12), 1))

    def bits_through(self, t):
        return self.k + self.l * (2 ** (t + 1) - 1)

    def stage_of_bucket(self, i):
        i = np.asarray(i, dtype=np.int64)
        t = np.zeros_like(i)
        while True:
            behind = i > self.l * (2 ** (t + 1) - 1)
            if not behind.any():
                break
            t += behind
        return int(t) if t.ndim == 0 else t


def theorem1_stage_size(cond_entropy: float) -> int:
    """h = ceil(sqrt(H(X|Y))), at least 1."""
    return max(math.ceil(math.sqrt(max(cond_entropy, 0.0)) - 1e-12), 1)


# party strategies ---------------------------------------------------------------

def staged_alice(a: int, schedule: StageSchedule, oracle: HashOracle) -> Strategy:
    t, sent = 0, 0
    while True:
        m = schedule.bits_through(t)
        yield as_bitstring(oracle.hash_prefix(a, m)[sent:])
        sent = m
        reply = yield None
        if reply == "1":
            return
        t += 1


@dataclass(frozen=True)
class _BucketPlan:
    symbols: np.ndarray  # support sorted by (bucket, id)
    buckets: np.ndarray
    stages: np.ndarray

    @classmethod
    def build(cls, mu: Distribution, schedule: StageSchedule) -> "_BucketPlan":
        buckets = bucket_indices(mu)
        order = np.lexsort((mu.symbols, buckets))
        buckets = buckets[order]
        stages = np.asarray(schedule.stage_of_bucket(buckets), dtype=np.int64)
        return cls(mu.symbols[order], buckets, stages)

    @property
    def last_stage(self) -> int:
        return int(self.stages[-1])


def staged_bob(mu: Distribution, schedule: StageSchedule, oracle: HashOracle,
               plan: _BucketPlan | None = None) -> Strategy:
    plan = plan or _BucketPlan.build(mu, schedule)
    received = np.zeros(0, dtype=np.uint8)
    t = 0
    while True:
        msg = yield None
        received = np.concatenate([received, as_bitarray(msg)])
        lo, hi = np.searchsorted(plan.stages, [t, t + 1])
        if hi > lo:
            cands = plan.symbols[lo:hi]
            hashes = oracle.bits(len(received), cands)
            match = np.flatnonzero(np.all(hashes == received[:, None], axis=0))
            if match.size:
                yield "1"
                return int(cands[match[0]])
        yield "0"
        t += 1


def staged_transmit(a: int, mu: Distribution, schedule: StageSchedule,
                    oracle: HashOracle) -> ProtocolOutcome:
    if a not in mu:
        raise NotInSupport(f"symbol {a} has zero probability")
    plan = _BucketPlan.build(mu, schedule)
    cap = 2 * (plan.last_stage + 1)
    return run_protocol(staged_alice(a, schedule, oracle), staged_bob(mu, schedule, oracle, plan),
                        reference=a, max_messages=cap)


def lemma1_transmit(a: int, mu: Distribution, cfg: Lemma1Config,
                    oracle: HashOracle) -> ProtocolOutcome:
    """Send ``a`` to a receiver who knows ``mu`` in about log2(1/mu(a)) bits."""
    return staged_transmit(a, mu, cfg, oracle)


def _check_pair(j: JointDistribution, x: int, y: int) -> None:
    if not j.in_support(x, y):
        raise NotInSupport(f"pair ({x}, {y}) has zero probability")


def theorem1_config(j: JointDistribution, eps: float) -> Lemma1Config:
    return Lemma1Config(eps, theorem1_stage_size(j.conditional_entropy))


def theorem1_transmit(j: JointDistribution, x: int, y: int, eps: float,
                      oracle: HashOracle) -> ProtocolOutcome:
    """Lemma-1 protocol with mu = law of X given y and h = ceil(sqrt(H(X|Y)))."""
    _check_pair(j, x, y)
    return staged_transmit(x, j.condition_on(y).dist, theorem1_config(j, eps), oracle)


def const_round_transmit(j: JointDistribution, x: int, y: int, eps: float,
                         oracle: HashOracle) -> ProtocolOutcome:
    """Doubling-budget variant: at most 4 rounds on average."""
    _check_pair(j, x, y)
    cfg = ConstRoundConfig.for_entropy(eps, j.conditional_entropy)
    return staged_transmit(x, j.condition_on(y).dist, cfg, oracle)


def verbatim_transmit(j: JointDistribution, x: int, y: int) -> ProtocolOutcome:
    """Baseline: Alice sends x in ceil(log2 |X|) bits."""
    _check_pair(j, x, y)
    width = max(j.nx - 1, 0).bit_length()

    def alice():
        if width:
            yield format(x, f"0{width}b")

    def bob():
        if not width:
            return 0
        msg = yield None
        return int(msg, 2)

    return run_protocol(alice(), bob(), reference=x)


def silent_transmit(j: JointDistribution, x: int, y: int) -> ProtocolOutcome:
    """Baseline: no communication; Bob guesses the most likely x given y."""
    _check_pair(j, x, y)
    guess = int(np.argmax(j.probs[:, y]))

    def alice():
        return
        yield

    def bob():
        return guess
        yield

    return run_protocol(alice(), bob(), reference=x)


# batched evaluation -----------------------------------------------------------

@dataclass(frozen=True)
class StagedOutcomes:
    """Outcomes of a staged protocol for every support symbol of one ``mu``."""

    symbols: np.ndarray
    output: np.ndarray
    stop_stage: np.ndarray
    alice_bits: np.ndarray
    bob_bits: np.ndarray

    @property
    def correct(self) -> np.ndarray:
        return self.output == self.symbols

    @property
    def total_bits(self) -> np.ndarray:
        return self.alice_bits + self.bob_bits

    @property
    def rounds(self) -> np.ndarray:
        return 2 * (self.stop_stage + 1)


def _pack(bits: np.ndarray) -> np.ndarray:
    """``(m, n)`` bit matrix -> ``(ceil(m/64), n)`` uint64 words, LSB first."""
    m, n = bits.shape
    words = -(-m // 64) if m else 1
    padded = np.zeros((words * 64, n), dtype=np.uint8)
    padded[:m] = bits
    packed = np.packbits(padded, axis=0, bitorder="little")  # (words*8, n)
    return np.ascontiguousarray(packed.T).view("<u8").T


def staged_outcomes(mu: Distribution, schedule: StageSchedule, oracle: HashOracle,
                    chunk: int = 512) -> StagedOutcomes:
    """Run the staged protocol for every ``a`` in the support of ``mu`` at once.

    Bob outputs the candidate minimizing (bucket, id) among those whose hash
    prefix of length ``bits_through(stage_of_bucket(i))`` agrees with ``a``;
    this is exactly the stage-by-stage scan of :func:`staged_bob`.
    """
    plan = _BucketPlan.build(mu, schedule)
    n = len(plan.symbols)
    need = np.asarray(schedule.bits_through(plan.stages), dtype=np.int64)
    m = int(need.max())
    packed = _pack(oracle.bits(m, plan.symbols))
    mask_bits = np.zeros((m, n), dtype=np.uint8)
    mask_bits[np.arange(m)[:, None] < need[None, :]] = 1
    masks = _pack(mask_bits)
    # plan is already sorted by (bucket, id): column position is the tie-break key
    winner = np.empty(n, dtype=np.int64)
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        fires = np.ones((hi - lo, n), dtype=bool)
        for w in range(packed.shape[0]):
            diff = (packed[w, lo:hi, None] ^ packed[w, None, :]) & masks[w, None, :]
            fires &= diff == 0
        winner[lo:hi] = np.argmax(fires, axis=1)
    stop = plan.stages[winner]
    alice = np.asarray(schedule.bits_through(stop), dtype=np.int64)
    order = np.argsort(plan.symbols)
    return StagedOutcomes(
        symbols=plan.symbols[order],
        output=plan.symbols[winner][order],
        stop_stage=stop[order],
        alice_bits=alice[order],
        bob_bits=(stop + 1)[order],
    )


def protocol_schedule(name: str, j: JointDistribution, eps: float,
                      h: int | None = None) -> StageSchedule:
    if name == "theorem1":
        return theorem1_config(j, eps)
    if name == "lemma1":
        return Lemma1Config(eps, h if h is not None else theorem1_stage_size(j.conditional_entropy))
    if name == "constround":
        return ConstRoundConfig.for_entropy(eps, j.conditional_entropy)
    raise BadParam(f"unknown staged protocol {name!r}")


@dataclass(frozen=True)
class ExactEvaluation:
    """Support-weighted behaviour of a staged protocol under one fixed seed."""

    seed: int
    error: float
    mean_bits: float
    mean_bits_a_to_b: float
    mean_rounds: float


def evaluate_seed(j: JointDistribution, schedule: StageSchedule, seed: int,
                  backend: Backend | str = Backend.TRUE_RANDOM_CACHED) -> ExactEvaluation:
    """Run the protocol on every support pair with hash seed ``seed``."""
    oracle = HashOracle(seed, j.nx, backend)
    err, bits, ab, rounds = [], [], [], []
    for y in range(j.ny):
        res = staged_outcomes(j.condition_on(y).dist, schedule, oracle)
        w = j.probs[res.symbols, y]
        err.append(float(w[~res.correct].sum()))
        bits.append(float(w @ res.total_bits))
        ab.append(float(w @ res.alice_bits))
        rounds.append(float(w @ res.rounds))
    return ExactEvaluation(seed, math.fsum(err), math.fsum(bits), math.fsum(ab), math.fsum(rounds))


def derandomize(protocol: str, j: JointDistribution, eps: float, candidate_seeds: Sequence[int],
                h: int | None = None,
                backend: Backend | str = Backend.TRUE_RANDOM_CACHED) -> ExactEvaluation:
    """First candidate seed whose exact support-weighted error is at most eps."""
    if len(candidate_seeds) == 0:
        raise BadParam("no candidate seeds")
    if len(j.support) > 100_000:
        raise BadParam("support too large to enumerate")
    schedule = protocol_schedule(protocol, j, eps, h)
    for seed in candidate_seeds:
        ev = evaluate_seed(j, schedule, seed, backend)
        if ev.error <= eps:
            return ev
    raise NoSeedFound(f"none of {len(candidate_seeds)} seeds reached error <= {eps}")


# closed-form ceilings ---------------------------------------------------------

def theorem1_bound(cond_entropy: float, eps: float) -> float:
    """H + 2 sqrt(H) + log2(1/eps) + 5."""
    if cond_entropy < 0 or not 0 < eps < 1:
        raise BadParam("need cond_entropy >= 0 and eps in (0, 1)")
    return cond_entropy + 2 * math.sqrt(cond_entropy) + math.log2(1 / eps) + THEOREM1_CONSTANT


def const_round_bound(cond_entropy: float, eps: float) -> float:
    """3H + log2(1/eps) + 6."""
    if cond_entropy < 0 or not 0 < eps < 1:
        raise BadParam("need cond_entropy >= 0 and eps in (0, 1)")
    return 3 * cond_entropy + math.log2(1 / eps) + CONST_ROUND_CONSTANT


def lemma1_ceiling(q: float, eps: float, h: int) -> float:
    """Per-input ceiling log2(1/q) + log2(1/q)/h + h + log2(1/eps) + 5."""
    s = math.log2(1 / q)
    return s + s / h + h + math.log2(1 / eps) + LEMMA1_CONSTANT
