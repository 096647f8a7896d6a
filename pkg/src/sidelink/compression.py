"""Compression of public-coin one-round protocols.

A one-round protocol is a table ``message[x, r]`` giving Alice's single
message for input ``x`` and public coin ``r``. Because the message is a
function of (X, R), its information complexity I(X : Pi | Y, R) equals
H(Pi | Y, R), and Bob can recover Pi with the staged hash protocol run over
the transcript space, with Bob's prior
``mu_Pi(pi | y, r) = sum_x mu(x|y) [message(x, r) = pi]``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .distributions import (Distribution, JointDistribution, conditional_mutual_information,
                            shannon_entropy)
from .engine import ProtocolOutcome, TrialRecord, run_trials, summarize
from .errors import BadParam, IncompatibleSupports, NotInSupport
from .hashing import Backend, HashOracle, derive_seed
from .protocols import Lemma1Config, lemma1_transmit, theorem1_stage_size

IC_AGREEMENT_TOL = 1e-9


class OneRoundProtocol:
    """Alice's message as a function of her input and the public coin.

    ``messages`` is an ``(nx, nr)`` array of transcript labels; labels are
    mapped to dense transcript ids ``0..T-1`` in order of first appearance
    in row-major order. ``r_dist`` is the law of the public coin.
    """

    def __init__(self, messages, r_dist: Sequence[float | Fraction]):
        table = np.asarray(messages, dtype=object)
        if table.ndim != 2:
            raise BadParam("messages must be an (nx, nr) table")
        r = list(r_dist)
        if len(r) != table.shape[1]:
            raise BadParam("r_dist length must match the number of coin values")
        if any(p <= 0 for p in r):
            raise BadParam("coin probabilities must be positive")
        exact = all(isinstance(p, (Fraction, int)) for p in r)
        if exact and sum(Fraction(p) for p in r) != 1:
            raise BadParam("coin distribution does not sum to 1")
        if not exact and abs(math.fsum(float(p) for p in r) - 1) > 1e-12:
            raise BadParam("coin distribution does not sum to 1")
        self.r_dist = Distribution(np.arange(len(r)), np.array([float(p) for p in r]),
                                   tuple(Fraction(p) for p in r) if exact else None)
        labels: dict[Any, int] = {}
        ids = np.empty(table.shape, dtype=np.int64)
        for idx, label in np.ndenumerate(table):
            ids[idx] = labels.setdefault(label, len(labels))
        ids.flags.writeable = False
        self.message_ids = ids
        self.transcript_space = list(labels)

    @property
    def nx(self) -> int:
        return self.message_ids.shape[0]

    @property
    def nr(self) -> int:
        return self.message_ids.shape[1]

    def message(self, x: int, r: int) -> int:
        return int(self.message_ids[x, r])

    def to_json(self) -> dict:
        r = [str(p) for p in self.r_dist.exact] if self.r_dist.exact else self.r_dist.probs.tolist()
        msgs = [[int(x), int(r_), self.transcript_space[self.message_ids[x, r_]]]
                for x in range(self.nx) for r_ in range(self.nr)]
        return {"r_dist": r, "messages": msgs}

    @classmethod
    def from_json(cls, doc: Mapping[str, Any]) -> "OneRoundProtocol":
        r = [Fraction(p) if isinstance(p, str) else p for p in doc["r_dist"]]
        rows = doc["messages"]
        nx = max(int(x) for x, _, _ in rows) + 1
        table = np.full((nx, len(r)), None, dtype=object)
        for x, r_, pi in rows:
            table[int(x), int(r_)] = tuple(pi) if isinstance(pi, list) else pi
        if any(v is None for v in table.ravel()):
            raise IncompatibleSupports("message table is not total on X x R")
        return cls(table, r)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "OneRoundProtocol":
        return cls.from_json(json.loads(Path(path).read_text()))

    @classmethod
    def verbatim(cls, nx: int) -> "OneRoundProtocol":
        """Alice sends x itself; the coin is a dummy."""
        return cls(np.arange(nx).reshape(nx, 1), [Fraction(1)])

    @classmethod
    def constant(cls, nx: int) -> "OneRoundProtocol":
        return cls(np.zeros((nx, 1), dtype=np.int64), [Fraction(1)])

    @classmethod
    def xor_pad(cls, bits: int) -> "OneRoundProtocol":
        """Pi = X xor R with R uniform over ``bits``-bit strings."""
        size = 2 ** bits
        x = np.arange(size)
        return cls(x[:, None] ^ x[None, :], [Fraction(1, size)] * size)


def _check_compatible(p: OneRoundProtocol, j: JointDistribution) -> None:
    if p.nx != j.nx:
        raise IncompatibleSupports(f"protocol covers {p.nx} inputs, distribution has {j.nx}")


def joint_law(p: OneRoundProtocol, j: JointDistribution) -> np.ndarray:
    """Joint law of (X, Y, R, Pi) as an ``(nx, ny, nr, T)`` array."""
    _check_compatible(p, j)
    law = np.zeros((j.nx, j.ny, p.nr, len(p.transcript_space)))
    base = j.probs[:, :, None] * p.r_dist.probs[None, None, :]
    xs, rs = np.indices(p.message_ids.shape)
    law[xs, :, rs, p.message_ids] = base[xs, :, rs]
    return law


def information_complexity(p: OneRoundProtocol, j: JointDistribution) -> float:
    """I(X : Pi | Y, R), checked against H(Pi | Y, R) to within 1e-9."""
    law = joint_law(p, j)
    info = conditional_mutual_information(law, [0], [3], [1, 2])
    h_pi = shannon_entropy(law.sum(axis=0)) - shannon_entropy(law.sum(axis=(0, 3)))
    if abs(info - h_pi) > IC_AGREEMENT_TOL:
        raise ArithmeticError(f"I(X:Pi|Y,R)={info} disagrees with H(Pi|Y,R)={h_pi}")
    return info


def transcript_prior(p: OneRoundProtocol, j: JointDistribution, y: int, r: int) -> Distribution:
    """mu_Pi(. | y, r): Bob's distribution over Alice's message."""
    cond = j.condition_on(y).dist
    msgs = p.message_ids[cond.symbols, r]
    if cond.exact is not None:
        acc: dict[int, Fraction] = {}
        for m, q in zip(msgs, cond.exact):
            acc[int(m)] = acc.get(int(m), Fraction(0)) + q
        return Distribution.from_mapping(acc)
    dense = np.bincount(msgs, weights=cond.probs, minlength=len(p.transcript_space))
    return Distribution.from_dense(dense / math.fsum(dense))


def transcript_law(p: OneRoundProtocol, x: int) -> np.ndarray:
    """Law of Pi given X = x (Y plays no role in a one-round message)."""
    return np.bincount(p.message_ids[x], weights=p.r_dist.probs,
                       minlength=len(p.transcript_space))


def compress_one_round(p: OneRoundProtocol, j: JointDistribution, x: int, y: int, eps: float,
                       oracle: HashOracle, info: float | None = None) -> ProtocolOutcome:
    """Simulate ``p`` on (x, y): the coin r comes from the oracle's public coins,
    then Alice's message is sent with the staged hash protocol.

    The outcome's ``output`` is Bob's reconstruction Pi' and ``reference`` the
    true message Pi, both as transcript ids.
    """
    if not j.in_support(x, y):
        raise NotInSupport(f"pair ({x}, {y}) has zero probability")
    if oracle.domain_size != len(p.transcript_space):
        raise IncompatibleSupports("oracle domain must be the transcript space")
    if info is None:
        info = information_complexity(p, j)
    r = int(oracle.coins().choice(p.nr, p=p.r_dist.probs))
    a = p.message(x, r)
    cfg = Lemma1Config(eps, theorem1_stage_size(info))
    return lemma1_transmit(a, transcript_prior(p, j, y, r), cfg, oracle)


def statistical_distance(a, b) -> float:
    """max_U |Pr_a[U] - Pr_b[U]|, i.e. half the L1 distance.

    Accepts :class:`Distribution` objects or dense probability vectors.
    """
    pa = a.dense() if isinstance(a, Distribution) else np.asarray(a, dtype=np.float64)
    pb = b.dense() if isinstance(b, Distribution) else np.asarray(b, dtype=np.float64)
    size = max(len(pa), len(pb))
    pa = np.pad(pa, (0, size - len(pa)))
    pb = np.pad(pb, (0, size - len(pb)))
    return float(min(0.5 * math.fsum(np.abs(pa - pb)), 1.0))


@dataclass
class CompressionReport:
    info_complexity: float
    mean_bits: float
    per_pair_stat_distance: dict = field(default_factory=dict)
    eps: float = 0.0
    error_rate: float = 0.0
    trials_per_pair: int = 0
    hash_stage: int = 1

    @property
    def max_stat_distance(self) -> float:
        return max(self.per_pair_stat_distance.values(), default=0.0)

    def to_json(self) -> dict:
        return {
            "info_complexity": self.info_complexity,
            "mean_bits": self.mean_bits,
            "eps": self.eps,
            "error_rate": self.error_rate,
            "trials_per_pair": self.trials_per_pair,
            "hash_stage": self.hash_stage,
            "max_stat_distance": self.max_stat_distance,
            "per_pair_stat_distance": [[int(x), int(y), d]
                                       for (x, y), d in self.per_pair_stat_distance.items()],
        }


def compression_report(p: OneRoundProtocol, j: JointDistribution, eps: float,
                       trials_per_pair: int, master_seed: int,
                       backend: Backend | str = Backend.TRUE_RANDOM_CACHED) -> CompressionReport:
    """Empirical law of Pi' against the exact law of Pi for every support pair.

    Pair number ``m`` (row-major support order) uses trial seeds derived from
    ``derive_seed(master_seed, m)``; mean bits are weighted by mu(x, y).
    """
    info = information_complexity(p, j)
    size = len(p.transcript_space)
    distances, bits, wrong = {}, [], []
    for m, (x, y) in enumerate(j.support):
        x, y = int(x), int(y)

        def runner(t, seed, x=x, y=y):
            out = compress_one_round(p, j, x, y, eps, HashOracle(seed, size, backend), info)
            return TrialRecord(t, x, y, out)

        records = run_trials(runner, trials_per_pair, derive_seed(master_seed, m))
        counts = np.bincount([r.outcome.output for r in records], minlength=size)
        distances[(x, y)] = statistical_distance(counts / len(records), transcript_law(p, x))
        stats = summarize(records)
        bits.append(j.probs[x, y] * stats.mean_total_bits)
        wrong.append(j.probs[x, y] * stats.error_rate)
    return CompressionReport(info, math.fsum(bits), distances, eps, math.fsum(wrong),
                             trials_per_pair, theorem1_stage_size(info))
