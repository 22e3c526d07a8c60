"""``phaseron`` command-line driver.

Usage::

    phaseron <experiment> [--qubits N] [--shots S] [--backend rotation|hsgs|both]
             [--mode analytic|statevector|sampled] [--seed K] [--eta R]
             [--max-steps T] --out DIR [--dump-circuit] [--config FILE]

Settings may also come from an INI file with a ``[phaseron]`` section whose
keys are the long flag names with dashes replaced by underscores, e.g.::

    [phaseron]
    qubits = 2
    shots = 8192
    backend = both
    stop_on_increase = false

Command-line flags override file values. Exit codes: 0 success, 2 config
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import sys

from phaseron.errors import ConfigError
from phaseron.experiments import (
    DiscrepancyReport,
    Experiment,
    ExperimentConfig,
    PerceptronResult,
    SigmoidResult,
    run_experiment,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3

_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _parse_bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in _BOOL_TRUE:
        return True
    if t in _BOOL_FALSE:
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _parse_backend(text: str) -> tuple[str, ...]:
    t = text.strip().lower()
    if t == "both":
        return ("rotation", "hsgs")
    if t not in ("rotation", "hsgs"):
        raise ConfigError(f"unknown backend {text!r}")
    return (t,)


# config key / flag name -> (ExperimentConfig field, converter)
KEYS = {
    "qubits": ("n_qubits", int),
    "shots": ("shots", int),
    "backend": ("backends", _parse_backend),
    "mode": ("mode", str),
    "seed": ("seed", int),
    "eta": ("learning_rate", float),
    "max_steps": ("max_steps", int),
    "out": ("out", str),
    "dump_circuit": ("dump_circuit", _parse_bool),
    "vectors": ("n_vectors", int),
    "repeats": ("repeats", int),
    "samples": ("n_samples", int),
    "threshold": ("cost_threshold", float),
    "stop_on_increase": ("stop_on_cost_increase", _parse_bool),
    "restarts": ("restarts", int),
    "positives": ("n_positive", int),
    "negatives": ("n_negative", int),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="phaseron", description="Phase-encoded quantum neuron experiments.")
    p.add_argument("experiment", nargs="?", choices=[e.value for e in Experiment])
    p.add_argument("--config", help="INI file with a [phaseron] section")
    p.add_argument("--qubits", help="register qubits N (m = 2**N)")
    p.add_argument("--shots", help="measurement shots per circuit")
    p.add_argument("--backend", help="rotation, hsgs or both")
    p.add_argument("--mode", help="analytic, statevector or sampled")
    p.add_argument("--seed")
    p.add_argument("--eta", help="learning rate")
    p.add_argument("--max-steps", dest="max_steps")
    p.add_argument("--out", help="output directory")
    p.add_argument("--dump-circuit", dest="dump_circuit", action="store_const", const="true")
    p.add_argument("--vectors", help="vector pool size for inner-product experiments")
    p.add_argument("--repeats", help="repeat the measurement of every pair")
    p.add_argument("--samples", help="training set size for the sigmoid experiment")
    p.add_argument("--threshold", help="cost threshold for stopping")
    p.add_argument("--no-stop-on-increase", dest="stop_on_increase", action="store_const", const="false")
    p.add_argument("--restarts", help="perceptron restarts")
    p.add_argument("--positives")
    p.add_argument("--negatives")
    return p


def load_config_file(path: str) -> dict[str, str]:
    parser = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not parser.has_section("phaseron"):
        raise ConfigError(f"{path}: missing [phaseron] section")
    values = dict(parser.items("phaseron"))
    unknown = set(values) - set(KEYS) - {"experiment"}
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    return values


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    raw: dict[str, str] = {}
    if args.config:
        raw.update(load_config_file(args.config))
    for key in KEYS:
        v = getattr(args, key)
        if v is not None:
            raw[key] = v
    experiment = args.experiment or raw.pop("experiment", None)
    raw.pop("experiment", None)
    if experiment is None:
        raise ConfigError("no experiment given")
    if "out" not in raw:
        raise ConfigError("--out is required")
    kwargs = {}
    for key, text in raw.items():
        name, conv = KEYS[key]
        try:
            kwargs[name] = conv(text)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from None
    return ExperimentConfig(experiment=experiment, **kwargs)


def _summary(result) -> str:
    if isinstance(result, DiscrepancyReport):
        lines = ["repeat " + " ".join(f"D_{b.value}" for b in result.config.backends)]
        for r, d in result.table():
            lines.append(f"{r} " + " ".join(f"{d[b]:.6g}" for b in result.config.backends))
        return "\n".join(lines)
    if isinstance(result, PerceptronResult):
        mean = result.mean_affinity()
        return f"mean affinity: start {mean[0]:.4f}, end {mean[-1]:.4f}"
    if isinstance(result, SigmoidResult):
        rec = result.record
        return (
            f"{rec.terminal_reason.value} after {rec.steps[-1].step} steps; "
            f"cost {rec.steps[0].cost:.4g} -> {rec.final_cost:.4g}"
        )
    return ""


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
        result = run_experiment(config)
    except ConfigError as exc:
        print(f"phaseron: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"phaseron: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(_summary(result))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
