"""Experiment configuration, preset distributions and seeded batch runs.

A run draws, for each trial ``t``, the seed ``derive_seed(master_seed, t)``;
the trial's input pair is sampled from the "inputs" stream of that seed and
its hash oracle is keyed by the same seed, so a config fully determines the
output files byte for byte.

Per-trial rows use the fixed column schema ``ROW_FIELDS`` (version
``ROW_SCHEMA_VERSION``). Summaries are JSON documents validating against
``SUMMARY_SCHEMA``.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterator, Mapping

from . import distributions as dist
from .bounds import bound_consistency_report
from .distributions import JointDistribution
from .engine import ROW_FIELDS, TrialRecord, summarize
from .errors import BadParam, ConfigError
from .hashing import Backend, HashOracle, derive_seed, purpose_rng
from .protocols import (const_round_bound, const_round_transmit, dyadic_bucket, lemma1_transmit,
                        protocol_schedule, silent_transmit, theorem1_bound, theorem1_transmit,
                        verbatim_transmit)

ROW_SCHEMA_VERSION = "sidelink.rows/1"
SUMMARY_SCHEMA_VERSION = "sidelink.summary/1"
PROTOCOLS = ("lemma1", "theorem1", "constround", "verbatim", "silent")
FORMATS = ("csv", "json-lines")
MEAN_ROUNDS_CEILING = 4.05


@dataclass(frozen=True)
class Preset:
    name: str
    build: Callable[..., JointDistribution]
    params: dict
    description: str

    def make(self, **overrides) -> JointDistribution:
        unknown = set(overrides) - set(self.params)
        if unknown:
            raise BadParam(f"unknown parameters for {self.name}: {sorted(unknown)}")
        kwargs = {k: spec["default"] for k, spec in self.params.items()}
        for k, v in overrides.items():
            kwargs[k] = int(v) if self.params[k]["type"] == "int" else float(v)
        return self.build(**kwargs)

    def to_json(self) -> dict:
        return {"name": self.name, "description": self.description, "params": self.params}


def _p(kind, default, lo=None, hi=None):
    spec = {"type": kind, "default": default}
    if lo is not None:
        spec["min"] = lo
    if hi is not None:
        spec["max"] = hi
    return spec


PRESETS = {
    p.name: p for p in [
        Preset("delta-noise", dist.make_delta_noise,
               {"n": _p("int", 256, 1), "delta": _p("float", 0.25, 0.0, 0.5)},
               "Y uniform on {0..n}; X = Y w.p. 1-delta, else uniform over the rest"),
        Preset("harmonic-permutation", dist.make_harmonic_permutation,
               {"n": _p("int", 5, 1, dist.HARMONIC_MAX_N)},
               "Pr[X=i, Y=sigma] = 1/(sigma(i) H_n n!) over permutations sigma"),
        Preset("fano-tight", dist.make_fano_tight,
               {"n": _p("int", 10, 1, 20), "eps": _p("float", 0.125, 0.0, 1.0)},
               "empty string w.p. 1-eps, else a uniform n-bit string; Y is a dummy"),
        Preset("identity", dist.make_identity, {"n": _p("int", 16, 1)},
               "X = Y uniform over n symbols"),
        Preset("independent-uniform", dist.make_independent_uniform,
               {"nx": _p("int", 8, 1), "ny": _p("int", 4, 1)},
               "X and Y independent and uniform"),
    ]
}


def list_presets() -> list[dict]:
    return [p.to_json() for p in PRESETS.values()]


def parse_preset_spec(spec: str) -> tuple[str, dict]:
    """``"delta-noise:n=64,delta=0.25"`` -> ``("delta-noise", {"n": "64", "delta": "0.25"})``."""
    name, _, rest = spec.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq:
            raise BadParam(f"malformed preset parameter {item!r}")
        params[key.strip()] = value.strip()
    return name.strip(), params


def load_distribution(source: str, params: Mapping[str, Any] | None = None) -> JointDistribution:
    """A JSON file path, or a preset name with optional ``:k=v,...`` parameters."""
    if os.path.isfile(source):
        return JointDistribution.load(source)
    name, inline = parse_preset_spec(source)
    if name not in PRESETS:
        raise BadParam(f"{source!r} is neither a file nor a preset ({', '.join(PRESETS)})")
    return PRESETS[name].make(**{**inline, **(params or {})})


@dataclass
class ExperimentConfig:
    distribution: str = "delta-noise"
    params: dict = field(default_factory=dict)
    protocol: str = "theorem1"
    eps: float = 0.125
    trials: int = 1000
    master_seed: int = 0
    backend: str = Backend.TRUE_RANDOM_CACHED.value
    h: int | None = None
    output: str | None = None
    format: str = "csv"
    workers: int = 1

    def validate(self) -> JointDistribution:
        """Check every field; returns the instantiated distribution."""
        errors = {}
        if not isinstance(self.trials, int) or self.trials < 1:
            errors["trials"] = "must be an integer >= 1"
        if not isinstance(self.eps, (int, float)) or not 0 < self.eps < 1:
            errors["eps"] = "must lie in (0, 1)"
        if self.protocol not in PROTOCOLS:
            errors["protocol"] = f"must be one of {PROTOCOLS}"
        if self.backend not in {b.value for b in Backend}:
            errors["backend"] = f"must be one of {[b.value for b in Backend]}"
        if self.format not in FORMATS:
            errors["format"] = f"must be one of {FORMATS}"
        if self.h is not None and (not isinstance(self.h, int) or self.h < 1):
            errors["h"] = "must be a positive integer"
        if not isinstance(self.master_seed, int) or not 0 <= self.master_seed < 1 << 256:
            errors["master_seed"] = "must be a 256-bit nonnegative integer"
        if not isinstance(self.workers, int) or self.workers < 1:
            errors["workers"] = "must be a positive integer"
        joint = None
        try:
            joint = load_distribution(self.distribution, self.params)
        except (BadParam, ValueError, TypeError, KeyError) as exc:
            errors["distribution"] = str(exc)
        if errors:
            raise ConfigError(errors)
        return joint

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - names
        if unknown:
            raise ConfigError({k: "unknown field" for k in sorted(unknown)})
        return cls(**dict(doc))

    @classmethod
    def load(cls, path: str | Path, **overrides) -> "ExperimentConfig":
        doc = json.loads(Path(path).read_text())
        doc.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_dict(doc)

    def to_json(self) -> dict:
        return dataclasses.asdict(self)


def make_runner(cfg: ExperimentConfig, joint: JointDistribution):
    """``runner(trial, seed) -> TrialRecord`` for the configured protocol."""
    backend = Backend(cfg.backend)
    protocol = cfg.protocol
    eps = cfg.eps
    lemma_cfg = None
    if protocol == "lemma1":
        lemma_cfg = protocol_schedule("lemma1", joint, eps, cfg.h)

    def runner(trial: int, seed: int) -> TrialRecord:
        x, y = joint.sample(purpose_rng(seed, "inputs"))
        if protocol in ("verbatim", "silent"):
            fn = verbatim_transmit if protocol == "verbatim" else silent_transmit
            return TrialRecord(trial, x, y, fn(joint, x, y))
        oracle = HashOracle(seed, joint.nx, backend)
        if protocol == "theorem1":
            out = theorem1_transmit(joint, x, y, eps, oracle)
        elif protocol == "constround":
            out = const_round_transmit(joint, x, y, eps, oracle)
        else:
            out = lemma1_transmit(x, joint.condition_on(y).dist, lemma_cfg, oracle)
        return TrialRecord(trial, x, y, out)

    return runner


def iter_trials(cfg: ExperimentConfig, joint: JointDistribution) -> Iterator[TrialRecord]:
    runner = make_runner(cfg, joint)
    if cfg.workers > 1:
        seeds = (derive_seed(cfg.master_seed, t) for t in range(cfg.trials))
        with ThreadPoolExecutor(cfg.workers) as pool:
            yield from pool.map(runner, range(cfg.trials), seeds)
        return
    for t in range(cfg.trials):
        yield runner(t, derive_seed(cfg.master_seed, t))


def _per_input_ceiling(cfg: ExperimentConfig, joint: JointDistribution, stats) -> tuple[bool, int]:
    """Hard per-input bound k + (h+1) ceil(i/h) + 1 for the Lemma-1 family."""
    schedule = protocol_schedule(cfg.protocol, joint, cfg.eps, cfg.h)
    violations = 0
    for (x, y), bits in stats.max_bits_per_input.items():
        q = joint.condition_on(y).dist.exact_prob(x)
        i = dyadic_bucket(q)
        t = schedule.stage_of_bucket(i)
        if bits > schedule.k + (schedule.h_stage + 1) * t + 1:
            violations += 1
    return violations == 0, violations


def summarize_experiment(cfg: ExperimentConfig, joint: JointDistribution,
                         records: list[TrialRecord]) -> dict:
    stats = summarize(records)
    cond_h = joint.conditional_entropy
    checks = []

    def check(name, value, limit, ok=None):
        ok = value <= limit if ok is None else ok
        checks.append({"name": name, "value": value, "limit": limit, "passed": bool(ok)})

    check("error_rate", stats.error_rate, cfg.eps + 3 * math.sqrt(cfg.eps / stats.trials))
    ceilings = {"theorem1_bound": theorem1_bound(cond_h, cfg.eps),
                "const_round_bound": const_round_bound(cond_h, cfg.eps)}
    if cfg.protocol == "theorem1":
        check("mean_total_bits", stats.mean_total_bits, ceilings["theorem1_bound"])
    if cfg.protocol == "constround":
        check("mean_total_bits", stats.mean_total_bits, ceilings["const_round_bound"])
        check("mean_rounds", stats.mean_rounds, MEAN_ROUNDS_CEILING)
    if cfg.protocol in ("lemma1", "theorem1"):
        ok, bad = _per_input_ceiling(cfg, joint, stats)
        check("per_input_ceiling_violations", bad, 0, ok)
    reports = bound_consistency_report(stats, joint, cfg.eps, cfg.protocol)
    for rep in reports:
        check(f"bound:{rep.bound_name}", rep.measured, rep.value,
              bool(rep.satisfied_by_measurement))
    return {
        "schema": SUMMARY_SCHEMA_VERSION,
        "row_schema": ROW_SCHEMA_VERSION,
        "config": cfg.to_json(),
        "distribution": {"shape": list(joint.shape), "params": joint.params,
                         "conditional_entropy": cond_h},
        "stats": stats.to_json(),
        "ceilings": ceilings,
        "bounds": [r.to_json() for r in reports],
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }


def write_rows(records, fh, fmt: str) -> Iterator[TrialRecord]:
    """Write each record as it passes through, yielding it on."""
    if fmt == "csv":
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ROW_FIELDS)
        for rec in records:
            writer.writerow(rec.row())
            yield rec
    else:
        for rec in records:
            fh.write(json.dumps(dict(zip(ROW_FIELDS, rec.row()))) + "\n")
            yield rec


def summary_path(output: str | Path) -> Path:
    output = Path(output)
    return output.with_name(output.stem + ".summary.json")


def run_experiment(cfg: ExperimentConfig, rows_stream=None) -> dict:
    """Run all trials, streaming rows to ``cfg.output`` (or ``rows_stream``).

    When ``cfg.output`` is set the summary is also written next to it as
    ``<stem>.summary.json``. Returns the summary document.
    """
    joint = cfg.validate()
    trials = iter_trials(cfg, joint)
    if cfg.output is not None:
        try:
            fh = open(cfg.output, "w", newline="")
        except OSError as exc:
            raise OSError(f"cannot write rows to {cfg.output}: {exc}") from exc
        with fh:
            records = list(write_rows(trials, fh, cfg.format))
    elif rows_stream is not None:
        records = list(write_rows(trials, rows_stream, cfg.format))
    else:
        records = list(trials)
    summary = summarize_experiment(cfg, joint, records)
    if cfg.output is not None:
        summary_path(cfg.output).write_text(json.dumps(summary, indent=1, sort_keys=True) + "\n")
    return summary


def run_sweep(cfg: ExperimentConfig, eps_values) -> list[dict]:
    return [run_experiment(dataclasses.replace(cfg, eps=e, output=None)) for e in eps_values]


_NUM = {"type": "number"}
_CHECK = {
    "type": "object",
    "required": ["name", "value", "limit", "passed"],
    "properties": {"name": {"type": "string"}, "value": {"type": ["number", "null"]},
                   "limit": _NUM, "passed": {"type": "boolean"}},
}

SUMMARY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "row_schema", "config", "distribution", "stats", "ceilings",
                 "bounds", "checks", "passed"],
    "properties": {
        "schema": {"const": SUMMARY_SCHEMA_VERSION},
        "row_schema": {"const": ROW_SCHEMA_VERSION},
        "config": {"type": "object", "required": ["protocol", "eps", "trials", "master_seed"]},
        "distribution": {"type": "object", "required": ["shape", "conditional_entropy"],
                         "properties": {"conditional_entropy": _NUM}},
        "stats": {
            "type": "object",
            "required": ["trials", "mean_total_bits", "mean_bits_a_to_b", "mean_bits_b_to_a",
                         "mean_rounds", "error_rate", "std_total_bits", "std_bits_a_to_b",
                         "max_total_bits"],
            "properties": {"trials": {"type": "integer", "minimum": 1},
                           "error_rate": {"type": "number", "minimum": 0, "maximum": 1}},
        },
        "ceilings": {"type": "object", "required": ["theorem1_bound", "const_round_bound"]},
        "bounds": {"type": "array", "items": {"type": "object",
                                              "required": ["bound_name", "value", "vacuous"]}},
        "checks": {"type": "array", "items": _CHECK},
        "passed": {"type": "boolean"},
    },
}
