"""Finite joint and conditional distributions, entropy functionals and the
named example distributions used throughout the package.

Symbols are dense integer ids ``0..size-1``; an optional label table maps
ids to human readable names. Probabilities are stored as float64. When a
distribution is built from :class:`fractions.Fraction` values (small
supports only) the exact rationals are kept alongside and used wherever an
exact answer matters, e.g. dyadic bucket boundaries.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import BadParam, UnknownY

NORMALIZATION_TOL = 1e-12
EXACT_SUPPORT_LIMIT = 10_000
HARMONIC_MAX_N = 7


def _check_mass(total: float, what: str) -> None:
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise BadParam(f"{what} sums to {total!r}, expected 1")


@dataclass(frozen=True, eq=False)
class Distribution:
    """A distribution over dense symbol ids with strictly positive entries.

    ``symbols`` lists the support in increasing order and ``probs`` the
    matching probabilities. ``exact`` optionally carries the same
    probabilities as Fractions.
    """

    symbols: np.ndarray
    probs: np.ndarray
    exact: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        symbols = np.asarray(self.symbols, dtype=np.int64)
        probs = np.asarray(self.probs, dtype=np.float64)
        if symbols.ndim != 1 or symbols.shape != probs.shape or symbols.size == 0:
            raise BadParam("symbols and probs must be nonempty 1-d arrays of equal length")
        if np.any(np.diff(symbols) <= 0):
            raise BadParam("symbols must be strictly increasing")
        if np.any(probs <= 0):
            raise BadParam("distribution entries must be strictly positive")
        if self.exact is not None:
            if len(self.exact) != len(symbols) or sum(self.exact) != 1:
                raise BadParam("exact probabilities must match the support and sum to 1")
        else:
            _check_mass(math.fsum(probs), "distribution")
        symbols.flags.writeable = False
        probs.flags.writeable = False
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, float | Fraction]) -> "Distribution":
        """Build from ``{symbol: probability}``, dropping zero entries."""
        items = sorted((int(s), p) for s, p in mapping.items() if p != 0)
        symbols = [s for s, _ in items]
        values = [p for _, p in items]
        exact = None
        if values and all(isinstance(p, (Fraction, int)) for p in values):
            exact = tuple(Fraction(p) for p in values)
        return cls(np.array(symbols), np.array([float(p) for p in values]), exact)

    @classmethod
    def from_dense(cls, probs: Sequence[float] | np.ndarray) -> "Distribution":
        probs = np.asarray(probs, dtype=np.float64)
        idx = np.flatnonzero(probs > 0)
        return cls(idx, probs[idx])

    @classmethod
    def uniform(cls, size: int) -> "Distribution":
        return cls(np.arange(size), np.full(size, 1.0 / size),
                   tuple(Fraction(1, size) for _ in range(size)))

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, symbol: int) -> bool:
        pos = np.searchsorted(self.symbols, symbol)
        return bool(pos < len(self.symbols) and self.symbols[pos] == symbol)

    def prob(self, symbol: int) -> float:
        pos = np.searchsorted(self.symbols, symbol)
        if pos < len(self.symbols) and self.symbols[pos] == symbol:
            return float(self.probs[pos])
        return 0.0

    def exact_prob(self, symbol: int) -> Fraction | float:
        """Exact probability when available, else the float value."""
        pos = int(np.searchsorted(self.symbols, symbol))
        if pos < len(self.symbols) and self.symbols[pos] == symbol:
            return self.exact[pos] if self.exact is not None else float(self.probs[pos])
        return 0.0

    def dense(self, size: int | None = None) -> np.ndarray:
        size = int(self.symbols[-1]) + 1 if size is None else size
        out = np.zeros(size)
        out[self.symbols] = self.probs
        return out

    def as_dict(self) -> dict[int, float]:
        return {int(s): float(p) for s, p in zip(self.symbols, self.probs)}


@dataclass(frozen=True, eq=False)
class ConditionalDistribution:
    """The law of X given ``Y = given_y``."""

    given_y: int
    dist: Distribution

    def to_csv(self, path: str | Path, labels: Sequence[Any] | None = None) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "label", "probability"])
            for s, p in zip(self.dist.symbols, self.dist.probs):
                label = labels[s] if labels is not None else s
                writer.writerow([int(s), label, repr(float(p))])


class JointDistribution:
    """Finite joint law of (X, Y) stored as a dense ``(nx, ny)`` matrix.

    Zero cells are outside the support. Instances are immutable; derived
    quantities (marginals, conditionals, entropies) are computed lazily and
    memoized.
    """

    def __init__(self, probs, x_labels: Sequence[Any] | None = None,
                 y_labels: Sequence[Any] | None = None, params: Mapping[str, Any] | None = None):
        arr = np.asarray(probs)
        if arr.ndim != 2 or arr.size == 0:
            raise BadParam("joint probabilities must be a nonempty 2-d array")
        exact = None
        if arr.dtype == object:
            exact = np.vectorize(Fraction, otypes=[object])(arr)
            if np.any(exact < 0):
                raise BadParam("negative probability")
            if np.count_nonzero(exact) > EXACT_SUPPORT_LIMIT:
                raise BadParam(f"exact backend limited to {EXACT_SUPPORT_LIMIT} support entries")
            if sum(exact.ravel()) != 1:
                raise BadParam("exact joint does not sum to 1")
            arr = exact.astype(np.float64)
        else:
            arr = arr.astype(np.float64)
            if np.any(arr < 0):
                raise BadParam("negative probability")
            _check_mass(math.fsum(arr.ravel()), "joint distribution")
        positive = arr > 0
        if not positive.any(axis=1).all() or not positive.any(axis=0).all():
            raise BadParam("every x and y symbol must occur in at least one support pair")
        arr.flags.writeable = False
        self.probs = arr
        self.exact = exact
        nx, ny = arr.shape
        self.x_labels = list(x_labels) if x_labels is not None else list(range(nx))
        self.y_labels = list(y_labels) if y_labels is not None else list(range(ny))
        if len(self.x_labels) != nx or len(self.y_labels) != ny:
            raise BadParam("label tables must match the support sizes")
        self.params = dict(params or {})
        self._conditionals: dict[int, ConditionalDistribution] = {}

    @property
    def shape(self) -> tuple[int, int]:
        return self.probs.shape

    @property
    def nx(self) -> int:
        return self.probs.shape[0]

    @property
    def ny(self) -> int:
        return self.probs.shape[1]

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def __repr__(self):
        return f"JointDistribution(shape={self.shape}, params={self.params})"

    @cached_property
    def support(self) -> np.ndarray:
        """``(m, 2)`` array of support pairs in row-major order."""
        return np.argwhere(self.probs > 0)

    def prob(self, x: int, y: int) -> float:
        return float(self.probs[x, y])

    def in_support(self, x: int, y: int) -> bool:
        return 0 <= x < self.nx and 0 <= y < self.ny and self.probs[x, y] > 0

    @cached_property
    def marginal_x(self) -> Distribution:
        if self.exact is not None:
            return Distribution.from_mapping(dict(enumerate(self.exact.sum(axis=1))))
        return Distribution.from_dense(self.probs.sum(axis=1))

    @cached_property
    def marginal_y(self) -> Distribution:
        if self.exact is not None:
            return Distribution.from_mapping(dict(enumerate(self.exact.sum(axis=0))))
        return Distribution.from_dense(self.probs.sum(axis=0))

    def condition_on(self, y: int) -> ConditionalDistribution:
        """Row normalization ``mu(x|y) = mu(x, y) / mu(y)``."""
        y = int(y)
        cached = self._conditionals.get(y)
        if cached is not None:
            return cached
        if not 0 <= y < self.ny or not np.any(self.probs[:, y] > 0):
            raise UnknownY(y)
        col = self.probs[:, y]
        xs = np.flatnonzero(col > 0)
        if self.exact is not None:
            ecol = self.exact[:, y]
            total = sum(ecol)
            exact = tuple(ecol[x] / total for x in xs)
            dist = Distribution(xs, np.array([float(q) for q in exact]), exact)
        else:
            vals = col[xs]
            dist = Distribution(xs, vals / math.fsum(vals))
        cond = ConditionalDistribution(y, dist)
        self._conditionals[y] = cond
        return cond

    @cached_property
    def conditional_entropy(self) -> float:
        return conditional_entropy(self)

    @cached_property
    def _cdf(self) -> tuple[np.ndarray, np.ndarray]:
        flat = self.probs.ravel()
        idx = np.flatnonzero(flat > 0)
        cdf = np.cumsum(flat[idx])
        cdf /= cdf[-1]
        return idx, cdf

    def sample(self, rng: np.random.Generator, size: int | None = None):
        """Draw ``(x, y)`` (or arrays of them when ``size`` is given)."""
        idx, cdf = self._cdf
        u = rng.random() if size is None else rng.random(size)
        pos = np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)
        x, y = np.divmod(idx[pos], self.ny)
        if size is None:
            return int(x), int(y)
        return x, y

    # serialization -------------------------------------------------------

    def to_json(self) -> dict:
        entries = []
        for x, y in self.support:
            p = str(self.exact[x, y]) if self.exact is not None else float(self.probs[x, y])
            entries.append([self.x_labels[x], self.y_labels[y], p])
        out = {"x_support": self.x_labels, "y_support": self.y_labels, "entries": entries}
        if self.params:
            out["params"] = self.params
        return out

    @classmethod
    def from_json(cls, doc: Mapping[str, Any]) -> "JointDistribution":
        """Inverse of :meth:`to_json`; probabilities may be numbers or "a/b" strings."""
        x_labels = [_label(v) for v in doc["x_support"]]
        y_labels = [_label(v) for v in doc["y_support"]]
        xi = {v: i for i, v in enumerate(x_labels)}
        yi = {v: i for i, v in enumerate(y_labels)}
        rows = doc["entries"]
        exact = all(isinstance(p, str) for _, _, p in rows)
        probs = np.zeros((len(x_labels), len(y_labels)), dtype=object if exact else np.float64)
        if exact:
            probs[...] = Fraction(0)
        for x, y, p in rows:
            try:
                cell = (xi[_label(x)], yi[_label(y)])
            except KeyError as exc:
                raise BadParam(f"entry label {exc.args[0]!r} missing from support table") from None
            probs[cell] = Fraction(p) if exact else float(p)
        return cls(probs, x_labels, y_labels, doc.get("params"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "JointDistribution":
        return cls.from_json(json.loads(Path(path).read_text()))


def _label(v):
    return tuple(v) if isinstance(v, list) else v


# entropy functionals ------------------------------------------------------

def _probs(d) -> np.ndarray:
    p = d.probs if isinstance(d, Distribution) else np.asarray(d, dtype=np.float64).ravel()
    return p[p > 0]


def shannon_entropy(d: Distribution | Sequence[float] | np.ndarray) -> float:
    """Shannon entropy in bits; zero entries are ignored."""
    p = _probs(d)
    return float(max(math.fsum(-p * np.log2(p)), 0.0))


def renyi_entropy(d: Distribution | Sequence[float] | np.ndarray) -> float:
    """Collision (order-2) entropy in bits."""
    p = _probs(d)
    return float(-math.log2(math.fsum(p * p)))


def conditional_entropy(j: JointDistribution) -> float:
    """H(X|Y) in the pair-sum form ``sum mu(x,y) log2(1/mu(x|y))``."""
    p = j.probs
    py = p.sum(axis=0)
    xs, ys = np.nonzero(p)
    w = p[xs, ys]
    return float(max(math.fsum(w * np.log2(py[ys] / w)), 0.0))


def conditional_entropy_averaged(j: JointDistribution) -> float:
    """H(X|Y) as ``sum_y Pr[Y=y] H(X|Y=y)``; cross-check for the pair-sum form."""
    py = j.probs.sum(axis=0)
    terms = [py[y] * shannon_entropy(j.probs[:, y] / py[y]) for y in range(j.ny)]
    return math.fsum(terms)


def _axes_entropy(p: np.ndarray, keep: Sequence[int]) -> float:
    drop = tuple(a for a in range(p.ndim) if a not in set(keep))
    return shannon_entropy(p.sum(axis=drop) if drop else p)


def conditional_mutual_information(p: np.ndarray, x_axes: Iterable[int], pi_axes: Iterable[int],
                                   cond_axes: Iterable[int] = ()) -> float:
    """I(X : Pi | Z) = H(X|Z) - H(X|Pi,Z) for a joint law given as an ndarray.

    Each random variable is a group of axes of ``p``. Round-off below zero
    (down to -1e-9) is clamped.
    """
    p = np.asarray(p, dtype=np.float64)
    x, pi, z = list(x_axes), list(pi_axes), list(cond_axes)
    h_x_given_z = _axes_entropy(p, x + z) - _axes_entropy(p, z)
    h_x_given_piz = _axes_entropy(p, x + pi + z) - _axes_entropy(p, pi + z)
    value = h_x_given_z - h_x_given_piz
    if value < -1e-9:
        raise ArithmeticError(f"conditional mutual information {value} is negative")
    return max(value, 0.0)


def binary_entropy(q: float) -> float:
    if q in (0.0, 1.0):
        return 0.0
    return -q * math.log2(q) - (1 - q) * math.log2(1 - q)


# named distributions ----------------------------------------------------------

def make_delta_noise(n: int, delta: float | Fraction, exact: bool | None = None) -> JointDistribution:
    """Y uniform on {0..n}; X = Y with prob 1-delta, else uniform over the other n values.

    Exact rationals are used when ``delta`` is a Fraction or ``exact=True``.
    """
    if int(n) != n or n < 1:
        raise BadParam(f"n must be a positive integer, got {n!r}")
    if not 0 < delta < 0.5:
        raise BadParam(f"delta must lie in (0, 1/2), got {delta!r}")
    n = int(n)
    exact = isinstance(delta, Fraction) if exact is None else exact
    params = {"preset": "delta-noise", "n": n, "delta": float(delta)}
    size = n + 1
    if exact:
        d = Fraction(delta)
        diag, off = (1 - d) / size, d / (n * size)
        probs = np.full((size, size), off, dtype=object)
        np.fill_diagonal(probs, diag)
        return JointDistribution(probs, params=params)
    delta = float(delta)
    probs = np.full((size, size), delta / (n * size))
    np.fill_diagonal(probs, (1 - delta) / size)
    return JointDistribution(probs, params=params)


def delta_noise_entropy(n: int, delta: float) -> float:
    """Closed form of H(X|Y) for :func:`make_delta_noise`."""
    return (1 - delta) * math.log2(1 / (1 - delta)) + delta * math.log2(n / delta)


def harmonic_number(n: int) -> Fraction:
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))


def harmonic_conditional(n: int, exact: bool = False) -> Distribution:
    """mu(i|sigma) for sigma = identity, i.e. ``1/(i H_n)`` over X in {1..n}.

    Every other sigma permutes these probabilities, so this is enough to
    study the conditional law for n beyond the full-joint cap.
    """
    if int(n) != n or n < 1:
        raise BadParam(f"n must be a positive integer, got {n!r}")
    n = int(n)
    if exact:
        hn = harmonic_number(n)
        return Distribution.from_mapping({i - 1: 1 / (i * hn) for i in range(1, n + 1)})
    i = np.arange(1, n + 1, dtype=np.float64)
    w = 1.0 / i
    return Distribution(np.arange(n), w / math.fsum(w))


def harmonic_sigma_entropy(n: int) -> float:
    """``sum_i log2(i H_n) / (i H_n)``, the conditional entropy for any sigma."""
    hn = float(harmonic_number(n))
    return math.fsum(math.log2(i * hn) / (i * hn) for i in range(1, n + 1))


def make_harmonic_permutation(n: int, exact: bool = False) -> JointDistribution:
    """Pr[X = i, Y = sigma] = 1 / (sigma(i) H_n n!).

    Y ranges over permutations of {1..n} indexed by Lehmer rank
    (lexicographic order); labels are the one-line notation, e.g. "132".
    """
    if int(n) != n or n < 1:
        raise BadParam(f"n must be a positive integer, got {n!r}")
    n = int(n)
    if n > HARMONIC_MAX_N:
        raise BadParam(f"full joint capped at n={HARMONIC_MAX_N}; use harmonic_conditional")
    perms = np.array(list(itertools.permutations(range(1, n + 1))), dtype=np.int64)
    labels = ["".join(map(str, p)) for p in perms]
    params = {"preset": "harmonic-permutation", "n": n}
    if exact:
        scale = harmonic_number(n) * math.factorial(n)
        probs = np.empty((n, len(perms)), dtype=object)
        for s, perm in enumerate(perms):
            for i in range(n):
                probs[i, s] = 1 / (int(perm[i]) * scale)
        return JointDistribution(probs, list(range(1, n + 1)), labels, params)
    scale = float(harmonic_number(n)) * math.factorial(n)
    probs = 1.0 / (perms.T * scale)
    return JointDistribution(probs, list(range(1, n + 1)), labels, params)


def make_fano_tight(n: int, eps: float) -> JointDistribution:
    """Y is a dummy; X is the empty string w.p. 1-eps, else uniform over {0,1}^n.

    Symbol 0 is the empty string, symbol ``1 + v`` the n-bit string of ``v``.
    """
    if int(n) != n or not 1 <= n <= 20:
        raise BadParam(f"n must be an integer in [1, 20], got {n!r}")
    if not 0 < eps < 1:
        raise BadParam(f"eps must lie in (0, 1), got {eps!r}")
    n = int(n)
    probs = np.full((2 ** n + 1, 1), eps / 2 ** n)
    probs[0, 0] = 1 - eps
    labels = [""] + [format(v, f"0{n}b") for v in range(2 ** n)]
    return JointDistribution(probs, labels, ["*"], {"preset": "fano-tight", "n": n, "eps": eps})


def make_identity(n: int) -> JointDistribution:
    """X = Y uniform over n symbols."""
    if int(n) != n or n < 1:
        raise BadParam(f"n must be a positive integer, got {n!r}")
    n = int(n)
    probs = np.zeros((n, n), dtype=object)
    probs[...] = Fraction(0)
    np.fill_diagonal(probs, Fraction(1, n))
    if n * n > EXACT_SUPPORT_LIMIT:
        probs = probs.astype(np.float64)
    return JointDistribution(probs, params={"preset": "identity", "n": n})


def make_independent_uniform(nx: int, ny: int) -> JointDistribution:
    """X and Y independent and uniform."""
    if int(nx) != nx or int(ny) != ny or nx < 1 or ny < 1:
        raise BadParam("nx and ny must be positive integers")
    nx, ny = int(nx), int(ny)
    params = {"preset": "independent-uniform", "nx": nx, "ny": ny}
    if nx * ny <= EXACT_SUPPORT_LIMIT:
        probs = np.full((nx, ny), Fraction(1, nx * ny), dtype=object)
    else:
        probs = np.full((nx, ny), 1.0 / (nx * ny))
    return JointDistribution(probs, params=params)


def make_point_mass() -> JointDistribution:
    """A single support pair (0, 0) with probability one."""
    probs = np.full((1, 1), Fraction(1), dtype=object)
    return JointDistribution(probs, params={"preset": "point-mass"})
