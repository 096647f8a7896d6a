import json

import jsonschema
import pytest

from sidelink import ExperimentConfig, list_presets, make_harmonic_permutation, run_experiment
from sidelink.cli import main
from sidelink.errors import ConfigError
from sidelink.experiment import PRESETS, SUMMARY_SCHEMA, load_distribution, run_sweep


def test_catalog():
    cat = list_presets()
    assert {p["name"] for p in cat} == {"delta-noise", "harmonic-permutation", "fano-tight",
                                       "identity", "independent-uniform"}
    assert json.loads(json.dumps(cat)) == cat
    for p in PRESETS.values():
        assert p.make().nx >= 1


def test_preset_spec_parsing():
    j = load_distribution("delta-noise:n=32,delta=0.1")
    assert j.params == {"preset": "delta-noise", "n": 32, "delta": 0.1}


def test_config_errors_are_field_level():
    with pytest.raises(ConfigError) as exc:
        ExperimentConfig(trials=0, eps=1.5, protocol="nope").validate()
    assert set(exc.value.fields) == {"trials", "eps", "protocol"}
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"bogus": 1})


@pytest.mark.parametrize("fmt", ["csv", "json-lines"])
def test_byte_identical_reruns(tmp_path, fmt):
    outs = []
    for name in ("a", "b"):
        cfg = ExperimentConfig(distribution="delta-noise:n=64", trials=300, master_seed=5,
                               format=fmt, output=str(tmp_path / f"{name}.rows"))
        run_experiment(cfg)
        outs.append(((tmp_path / f"{name}.rows").read_bytes(),
                     (tmp_path / f"{name}.summary.json").read_bytes()))
    assert outs[0][0] == outs[1][0]
    assert outs[0][1].replace(b"a.rows", b"b.rows") == outs[1][1]


def test_workers_do_not_change_rows(tmp_path):
    docs = []
    for w in (1, 4):
        out = tmp_path / f"w{w}.csv"
        run_experiment(ExperimentConfig(distribution="delta-noise:n=64", trials=200,
                                        workers=w, output=str(out)))
        docs.append(out.read_bytes())
    assert docs[0] == docs[1]


@pytest.mark.parametrize("protocol", ["theorem1", "constround", "lemma1", "verbatim", "silent"])
def test_summary_validates(protocol):
    s = run_experiment(ExperimentConfig(distribution="delta-noise:n=64", protocol=protocol,
                                        trials=200, h=2 if protocol == "lemma1" else None))
    jsonschema.validate(s, SUMMARY_SCHEMA)
    if protocol in ("theorem1", "constround"):
        assert s["passed"]
    if protocol == "silent":
        assert not s["passed"]


def test_harmonic_summary_entropy():
    s = run_experiment(ExperimentConfig(distribution="harmonic-permutation:n=5", trials=50))
    assert abs(s["distribution"]["conditional_entropy"]
               - make_harmonic_permutation(5).conditional_entropy) < 1e-9


@pytest.mark.slow
def test_eps_sweep_trend():
    cfg = ExperimentConfig(distribution="delta-noise:n=256", trials=20000, master_seed=1)
    means = [s["stats"]["mean_total_bits"] for s in run_sweep(cfg, [1/4, 1/8, 1/16, 1/32])]
    steps = [b - a for a, b in zip(means, means[1:])]
    assert all(abs(d - 1) <= 0.5 for d in steps), steps


def test_cli_flags_before_and_after(capsys):
    assert main(["--seed", "7", "transmit", "--dist", "delta-noise:n=64", "--x", "3", "--y", "3",
                 "--format", "json-lines"]) == 0
    first = capsys.readouterr().out
    assert main(["transmit", "--dist", "delta-noise:n=64", "--x", "3", "--y", "3",
                 "--seed", "7", "--format", "json-lines"]) == 0
    assert capsys.readouterr().out == first
    assert json.loads(first)["correct"]


def test_cli_env_seed(monkeypatch, capsys):
    args = ["transmit", "--dist", "delta-noise:n=64", "--format", "json-lines"]
    main(args + ["--seed", "0x2a"])
    explicit = capsys.readouterr().out
    monkeypatch.setenv("SIDELINK_SEED", "42")
    main(args)
    assert capsys.readouterr().out == explicit


def test_cli_experiment_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"distribution": "delta-noise:n=64", "trials": 100}))
    assert main(["experiment", "--config", str(cfg), "--output", str(tmp_path / "r.csv")]) == 0
    assert main(["experiment", "--config", str(cfg), "--protocol", "silent",
                 "--output", str(tmp_path / "s.csv")]) == 1
    assert main(["experiment", "--config", str(cfg), "--eps", "2"]) == 2
    err = capsys.readouterr().err
    assert '"eps"' in err


@pytest.mark.parametrize("argv", [["presets"], ["entropy", "--dist", "identity:n=4"],
                                  ["bounds", "--dist", "delta-noise:n=1024", "--eps", "0.015625"],
                                  ["check-lemma", "--trials", "50"],
                                  ["derandomize", "--dist", "delta-noise:n=16"]])
def test_cli_subcommands(argv, capsys):
    assert main(argv) == 0
    json.loads(capsys.readouterr().out)


def test_cli_compress(tmp_path, capsys):
    from sidelink import OneRoundProtocol
    OneRoundProtocol.xor_pad(2).save(tmp_path / "p.json")
    assert main(["compress", "--protocol", str(tmp_path / "p.json"),
                 "--dist", "independent-uniform:nx=4,ny=2", "--trials", "50"]) == 0
    assert json.loads(capsys.readouterr().out)["info_complexity"] > 1.99
