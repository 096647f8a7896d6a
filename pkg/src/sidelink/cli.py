"""Command-line front end: ``sidelink <subcommand> ...``.

Distributions are given as a JSON file or a preset spec such as
``delta-noise:n=256,delta=0.25``. The master seed comes from ``--seed``,
else the ``SIDELINK_SEED`` environment variable, else 0.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .bounds import (check_entropy_lemma, fano_lower_bound,
                     one_way_lower_bound, orlitsky_zero_error_bound, two_way_lower_bound,
                     BoundReport)
from .compression import OneRoundProtocol, compression_report
from .distributions import conditional_entropy_averaged, renyi_entropy, shannon_entropy
from .errors import ConfigError, SidelinkError
from .experiment import (ExperimentConfig, FORMATS, PROTOCOLS, list_presets, load_distribution,
                         run_experiment)
from .hashing import Backend, HashOracle, derive_seed, purpose_rng
from .protocols import (Lemma1Config, const_round_transmit, derandomize, lemma1_transmit,
                        theorem1_stage_size, theorem1_transmit)


def _seed(text: str) -> int:
    return int(text, 0)


def _dump(doc, fmt: str = "json") -> None:
    if fmt == "json-lines":
        print(json.dumps(doc, sort_keys=True))
    else:
        print(json.dumps(doc, indent=1, sort_keys=True))


def cmd_presets(args) -> int:
    _dump(list_presets(), args.format)
    return 0


def cmd_entropy(args) -> int:
    j = load_distribution(args.dist)
    _dump({
        "shape": list(j.shape),
        "H(X)": shannon_entropy(j.marginal_x),
        "H(Y)": shannon_entropy(j.marginal_y),
        "H2(X)": renyi_entropy(j.marginal_x),
        "H(X|Y)": j.conditional_entropy,
        "H(X|Y) averaged form": conditional_entropy_averaged(j),
    }, args.format)
    return 0


def cmd_transmit(args) -> int:
    j = load_distribution(args.dist)
    if args.x is None or args.y is None:
        x, y = j.sample(purpose_rng(args.seed, "inputs"))
    else:
        x, y = args.x, args.y
    oracle = HashOracle(args.seed, j.nx, args.backend)
    if args.protocol == "theorem1":
        out = theorem1_transmit(j, x, y, args.eps, oracle)
    elif args.protocol == "constround":
        out = const_round_transmit(j, x, y, args.eps, oracle)
    else:
        h = args.h or theorem1_stage_size(j.conditional_entropy)
        out = lemma1_transmit(x, j.condition_on(y).dist, Lemma1Config(args.eps, h), oracle)
    doc = out.to_json()
    doc.update({"x": x, "y": y, "protocol": args.protocol, "eps": args.eps})
    _dump(doc, args.format)
    return 0


def cmd_experiment(args) -> int:
    overrides = {"distribution": args.dist, "protocol": args.protocol, "eps": args.eps,
                 "trials": args.trials, "h": args.h, "output": args.output,
                 "backend": args.backend_explicit, "master_seed": args.seed_explicit,
                 "format": args.rows_format, "workers": args.workers}
    if args.config:
        cfg = ExperimentConfig.load(args.config, **overrides)
    else:
        base = {k: v for k, v in overrides.items() if v is not None}
        base.setdefault("master_seed", args.seed)
        cfg = ExperimentConfig.from_dict(base)
    summary = run_experiment(cfg, rows_stream=None if cfg.output else sys.stdout)
    if cfg.output:
        _dump(summary, args.format)
    else:
        print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    return 0 if summary["passed"] else 1


def cmd_compress(args) -> int:
    p = OneRoundProtocol.load(args.protocol)
    j = load_distribution(args.dist)
    report = compression_report(p, j, args.eps, args.trials, args.seed, args.backend)
    _dump(report.to_json(), args.format)
    return 0


def cmd_bounds(args) -> int:
    j = load_distribution(args.dist)
    reports = [BoundReport("fano", fano_lower_bound(j, args.eps), {"eps": args.eps})]
    orl = orlitsky_zero_error_bound(j)
    if orl.applicable:
        reports.append(BoundReport("orlitsky_zero_error", orl.bound, {}))
    if j.params.get("preset") == "delta-noise":
        n, d = j.params["n"], j.params["delta"]
        reports.append(BoundReport("one_way", one_way_lower_bound(n, d, args.eps),
                                   {"n": n, "delta": d, "eps": args.eps}))
        reports.append(BoundReport("two_way", two_way_lower_bound(n, d, args.eps),
                                   {"n": n, "delta": d, "eps": args.eps}))
    _dump([r.to_json() for r in reports], args.format)
    return 0


def cmd_check_lemma(args) -> int:
    violations, worst = check_entropy_lemma(args.trials, args.seed % (1 << 63), args.max_dim)
    _dump({"trials": args.trials, "violations": violations, "min_slack": worst}, args.format)
    return 0 if violations == 0 else 1


def cmd_derandomize(args) -> int:
    j = load_distribution(args.dist)
    seeds = [derive_seed(args.seed, i) for i in range(args.candidates)]
    ev = derandomize(args.protocol, j, args.eps, seeds, args.h, args.backend)
    doc = {"seed": hex(ev.seed), "error": ev.error, "mean_bits": ev.mean_bits,
           "mean_bits_a_to_b": ev.mean_bits_a_to_b, "mean_rounds": ev.mean_rounds,
           "fano_lower_bound": fano_lower_bound(j, args.eps)}
    _dump(doc, args.format)
    return 0


def build_parser() -> argparse.ArgumentParser:
    env_seed = os.environ.get("SIDELINK_SEED")
    # global flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=argparse.SUPPRESS,
                        help="master seed (int, 0x-hex ok); env SIDELINK_SEED otherwise")
    common.add_argument("--backend", choices=[b.value for b in Backend], default=argparse.SUPPRESS)
    common.add_argument("--format", choices=["json", "json-lines"], default=argparse.SUPPRESS,
                        help="output format of JSON documents")
    parser = argparse.ArgumentParser(prog="sidelink", description=__doc__.splitlines()[0],
                                     parents=[common])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    sub.add_parser("presets", help="list preset distributions").set_defaults(func=cmd_presets)

    p = sub.add_parser("entropy", help="entropies of a distribution")
    p.add_argument("--dist", required=True)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("transmit", help="run one protocol instance")
    p.add_argument("--dist", required=True)
    p.add_argument("--protocol", choices=["lemma1", "theorem1", "constround"], default="theorem1")
    p.add_argument("--eps", type=float, default=0.125)
    p.add_argument("--h", type=int)
    p.add_argument("--x", type=int)
    p.add_argument("--y", type=int)
    p.set_defaults(func=cmd_transmit)

    p = sub.add_parser("experiment", help="seeded Monte-Carlo run; rows as CSV or JSON lines")
    p.add_argument("--config", help="flat JSON config; flags override its fields")
    p.add_argument("--dist")
    p.add_argument("--protocol", choices=PROTOCOLS)
    p.add_argument("--eps", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--h", type=int)
    p.add_argument("--output", help="rows file; summary goes to <stem>.summary.json")
    p.add_argument("--rows-format", choices=FORMATS)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("compress", help="compress a one-round public-coin protocol")
    p.add_argument("--protocol", required=True, help="OneRoundProtocol JSON file")
    p.add_argument("--dist", required=True)
    p.add_argument("--eps", type=float, default=0.125)
    p.add_argument("--trials", type=int, default=1000, help="trials per support pair")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("bounds", help="lower bounds for a distribution")
    p.add_argument("--dist", required=True)
    p.add_argument("--eps", type=float, default=0.125)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("check-lemma", help="randomized check of the entropy inequality")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--max-dim", type=int, default=1000)
    p.set_defaults(func=cmd_check_lemma)

    p = sub.add_parser("derandomize", help="fix the shared randomness of a staged protocol")
    p.add_argument("--dist", required=True)
    p.add_argument("--protocol", choices=["lemma1", "theorem1", "constround"], default="theorem1")
    p.add_argument("--eps", type=float, default=0.125)
    p.add_argument("--h", type=int)
    p.add_argument("--candidates", type=int, default=16)
    p.set_defaults(func=cmd_derandomize)

    parser.set_defaults(env_seed=env_seed)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name, default in (("seed", None), ("backend", None), ("format", "json")):
        if not hasattr(args, name):
            setattr(args, name, default)
    args.seed_explicit = args.seed
    if args.seed is None:
        args.seed = _seed(args.env_seed) if args.env_seed else 0
        args.seed_explicit = args.seed if args.env_seed else None
    args.backend_explicit = args.backend
    if args.backend is None:
        args.backend = Backend.TRUE_RANDOM_CACHED.value
    try:
        return args.func(args)
    except ConfigError as exc:
        print(json.dumps({"error": "config", "fields": exc.fields}), file=sys.stderr)
        return 2
    except (SidelinkError, OSError) as exc:
        print(f"sidelink: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
