"""Closed-form lower bounds on average communication and checks of measured
protocol statistics against them.

Bounds are reported raw; a value <= 0 is flagged ``vacuous`` rather than
clamped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .distributions import JointDistribution, shannon_entropy
from .engine import ProtocolStats
from .errors import BadParam

PROBABILITY_TOL = 1e-9


@dataclass
class BoundReport:
    bound_name: str
    value: float
    parameters: dict = field(default_factory=dict)
    measured: float | None = None
    slack: float = 0.0
    satisfied_by_measurement: bool | None = None
    note: str = ""

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise BadParam(f"bound {self.bound_name} is not finite")

    @property
    def vacuous(self) -> bool:
        return self.value <= 0

    def attach(self, measured: float, slack: float = 0.0) -> "BoundReport":
        self.measured = float(measured)
        self.slack = float(slack)
        self.satisfied_by_measurement = self.measured >= self.value - self.slack
        return self

    def to_json(self) -> dict:
        return {
            "bound_name": self.bound_name,
            "value": self.value,
            "vacuous": self.vacuous,
            "parameters": self.parameters,
            "measured": self.measured,
            "slack": self.slack,
            "satisfied_by_measurement": self.satisfied_by_measurement,
            "note": self.note,
        }


def _check_delta(delta: float) -> None:
    if not 0 < delta < 0.5:
        raise BadParam(f"delta must lie in (0, 1/2), got {delta!r}")


def fano_lower_bound(j: JointDistribution, eps: float) -> float:
    """H(X|Y) - eps log2|X| - 1 bits from Alice to Bob, for error at most eps."""
    if not 0 <= eps < 1:
        raise BadParam(f"eps must lie in [0, 1), got {eps!r}")
    return j.conditional_entropy - eps * math.log2(j.nx) - 1


def one_way_lower_bound(n: int, delta: float, eps: float) -> float:
    """(1 - eps/delta) log2(n+1) - 2 for one-way protocols on delta-noise."""
    _check_delta(delta)
    if eps < 0:
        raise BadParam("eps must be nonnegative")
    return (1 - eps / delta) * math.log2(n + 1) - 2


def two_way_lower_bound(n: int, delta: float, eps: float) -> float:
    """(1 - d - d/n) log2(d / (eps + d/n)) + (d - 2 eps) log2(n+1) - 2d."""
    _check_delta(delta)
    if eps <= 0:
        raise BadParam("eps must be positive")
    if n < 1:
        raise BadParam("n must be positive")
    d = delta
    return ((1 - d - d / n) * math.log2(d / (eps + d / n))
            + (d - 2 * eps) * math.log2(n + 1) - 2 * d)


@dataclass(frozen=True)
class OrlitskyBound:
    applicable: bool
    bound: float | None


def orlitsky_zero_error_bound(j: JointDistribution) -> OrlitskyBound:
    """Zero-error transmission needs H(X) bits when the support is a Cartesian product."""
    full = bool(np.all(j.probs > 0))
    return OrlitskyBound(full, shannon_entropy(j.marginal_x) if full else None)


@dataclass(frozen=True)
class EntropyBoundCheck:
    lhs: float
    rhs: float
    holds: bool


def _xlog(v: np.ndarray) -> float:
    return math.fsum(-v * np.log2(v))


def entropy_bound_check(p, q) -> EntropyBoundCheck:
    """Compare sum p log2(1/p) with sum q log2(1/q) - 2 for 0 < q <= p, sum p = 1."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1 or p.size == 0:
        raise BadParam("p and q must be nonempty vectors of equal length")
    if np.any(p <= 0) or np.any(p > 1):
        raise BadParam("p entries must lie in (0, 1]")
    if abs(math.fsum(p) - 1) > PROBABILITY_TOL:
        raise BadParam("p must sum to 1")
    if np.any(q <= 0) or np.any(q > p):
        raise BadParam("q must satisfy 0 < q_i <= p_i")
    lhs = _xlog(p)
    rhs = _xlog(q) - 2
    return EntropyBoundCheck(lhs, rhs, lhs >= rhs)


def random_entropy_pair(rng: np.random.Generator, max_dim: int = 1000):
    """A random valid (p, q): p from a Dirichlet-like draw, q_i = u_i p_i with u in (0, 1]."""
    k = int(rng.integers(1, max_dim + 1))
    w = rng.exponential(size=k) ** rng.choice([0.5, 1.0, 4.0])
    p = w / w.sum()
    p = np.maximum(p, np.finfo(float).tiny)
    p /= p.sum()
    u = 1.0 - rng.random(k)
    return p, u * p


def check_entropy_lemma(trials: int, seed: int = 0, max_dim: int = 1000) -> tuple[int, float]:
    """Run the randomized check; returns (violations, smallest lhs - rhs)."""
    rng = np.random.default_rng(seed)
    violations, worst = 0, math.inf
    for _ in range(trials):
        res = entropy_bound_check(*random_entropy_pair(rng, max_dim))
        violations += not res.holds
        worst = min(worst, res.lhs - res.rhs)
    return violations, worst


def bound_consistency_report(measured: ProtocolStats, j: JointDistribution, eps: float,
                             protocol_name: str) -> list[BoundReport]:
    """Measured statistics against every applicable lower bound.

    A measurement counts as satisfying a bound when it is no more than three
    Monte-Carlo standard errors below it. When the measured error rate
    exceeds eps the bounds do not apply and a single failing precondition
    report is returned.
    """
    params: dict[str, Any] = {"eps": eps, "protocol": protocol_name}
    if measured.error_rate > eps:
        return [BoundReport("precondition:error_rate", 0.0, params, measured.error_rate, 0.0,
                            False, f"measured error rate exceeds eps={eps}; bounds not compared")]
    trials = max(measured.trials, 1)
    se_ab = 3 * measured.std_bits_a_to_b / math.sqrt(trials)
    se_total = 3 * measured.std_total_bits / math.sqrt(trials)
    reports = [BoundReport("fano", fano_lower_bound(j, eps), params,
                           note="mean bits from Alice to Bob").attach(measured.mean_bits_a_to_b, se_ab)]
    if j.params.get("preset") == "delta-noise":
        n, delta = j.params["n"], j.params["delta"]
        dparams = dict(params, n=n, delta=delta)
        reports.append(BoundReport("one_way", one_way_lower_bound(n, delta, eps), dparams,
                                   note="applies to one-way protocols; reported for reference")
                       .attach(measured.mean_total_bits, se_total))
        reports.append(BoundReport("two_way", two_way_lower_bound(n, delta, eps), dparams,
                                   note="mean total bits").attach(measured.mean_total_bits, se_total))
    orl = orlitsky_zero_error_bound(j)
    if orl.applicable and measured.error_rate == 0:
        reports.append(BoundReport("orlitsky_zero_error", orl.bound, params,
                                   note="support is a Cartesian product and no error observed")
                       .attach(measured.mean_total_bits, se_total))
    return reports
