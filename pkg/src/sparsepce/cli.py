"""Batch command line front end.

Usage::

    sparsepce {train,ocv,replicate,sobol,preprocess,benchmark-eval} --config run.json --out DIR [--seed U64] [--threads N]

Every run writes its artifacts plus ``manifest.json`` (config hash, seed,
timestamps and a sha256 per output). Exit codes: 0 success, 2 config error,
3 data error, 4 numerical failure. Errors are reported as one JSON line on
stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import BACKEND
from .benchmarks import Mode, get_problem, reduce_inputs, sample_scenarios
from .errors import ConfigError, DataError, PCEError
from .input_model import RNG_NAME, InputSpace, lhs_sample
from .persistence import SCENARIO_COLUMNS, dumps, load_model, model_to_dict, read_design, read_scenarios, write_csv
from .sensitivity import sobol_indices
from .training import ExperimentalDesign, TrainConfig, train
from .validation import outer_loocv, replication_study

SUBCOMMANDS = ("train", "ocv", "replicate", "sobol", "preprocess", "benchmark-eval")


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------
def load_config(path) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    base = Path(path).resolve().parent
    for key in ("data", "model", "scenario"):
        if key in cfg:
            p = Path(cfg[key])
            if not p.is_absolute():
                p = base / p
            if not p.exists():
                raise ConfigError(f"{key} path does not exist: {p}")
            cfg[key] = str(p)
    return cfg


def _seed(cfg, args) -> int:
    seed = args.seed if args.seed is not None else cfg.get("seed")
    if seed is None:
        raise ConfigError("a seed is required (config 'seed' or --seed)")
    try:
        seed = int(seed)
    except (TypeError, ValueError):
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}") from None
    if not 0 <= seed < 2**64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def _train_config(cfg, seed) -> TrainConfig:
    try:
        return TrainConfig(seed=seed, **cfg.get("train", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad 'train' block: {exc}") from None


def _need(cfg, key):
    if key not in cfg:
        raise ConfigError(f"config lacks required key {key!r}")
    return cfg[key]


def _design_and_space(cfg, seed):
    """Training design and input space from either a data file or a benchmark id."""
    problem = get_problem(cfg["problem"], cfg.get("mode")) if "problem" in cfg else None
    if "data" in cfg:
        _, x, y, _ = read_design(cfg["data"])
        if "input_space" in cfg:
            space = InputSpace.from_list(cfg["input_space"])
        elif problem is not None:
            space = problem.space
        else:
            raise ConfigError("a data file needs an 'input_space' declaration or a 'problem' id")
        if space.dimension != x.shape[1]:
            raise DataError(f"{cfg['data']}: {x.shape[1]} input columns, input space declares {space.dimension}")
        return ExperimentalDesign(x, y), space
    if problem is None:
        raise ConfigError("config needs either 'data' or 'problem'")
    x, y = problem.sample(int(_need(cfg, "n")), seed)
    return ExperimentalDesign(x, y), problem.space


# ---------------------------------------------------------------------------
# subcommands; each returns the names of the files it wrote
# ---------------------------------------------------------------------------
def cmd_train(cfg, args, out: Path):
    seed = _seed(cfg, args)
    ed, space = _design_and_space(cfg, seed)
    model = train(ed, space, _train_config(cfg, seed))
    diag = model.diagnostics
    summary = {
        "p_chosen": diag["p_chosen"],
        "P": diag["n_terms"],
        "eps_icv": diag["eps_icv"],
        "q2_icv": diag["q2_icv"],
        "r2_train": diag["r2_train"],
        "nonzero_coefficients": diag["nonzero_coefficients"],
        "n_train": diag["n_train"],
        "selector": diag["selector"],
        "seed": seed,
    }
    (out / "model.json").write_text(dumps(model_to_dict(model)))
    (out / "diagnostics.json").write_text(dumps(summary))
    return ["model.json", "diagnostics.json"]


def cmd_ocv(cfg, args, out: Path):
    seed = _seed(cfg, args)
    ed, space = _design_and_space(cfg, seed)
    report = outer_loocv(ed, space, _train_config(cfg, seed))
    (out / "ocv.csv").write_text(report.to_csv())
    summary = {
        "epsilon_ocv": report.epsilon_ocv,
        "q2_ocv": report.q2_ocv,
        "variance_reference": report.variance_reference,
        "variance_reference_kind": "training responses, 1/N",
        "failed_folds": list(report.failed_folds),
        "n": ed.size,
        "seed": seed,
    }
    (out / "ocv_summary.json").write_text(dumps(summary))
    return ["ocv.csv", "ocv_summary.json"]


def cmd_replicate(cfg, args, out: Path):
    seed = _seed(cfg, args)
    table = replication_study(
        _need(cfg, "problem"),
        _need(cfg, "sizes"),
        int(_need(cfg, "n_rep")),
        _train_config(cfg, seed),
        n_test=int(cfg.get("n_test", 10_000)),
        master_seed=seed,
        threads=args.threads,
        with_ocv=bool(cfg.get("with_ocv", True)),
        mode=cfg.get("mode"),
    )
    (out / "replication.csv").write_text(table.to_csv())
    return ["replication.csv"]


def cmd_sobol(cfg, args, out: Path):
    model = load_model(_need(cfg, "model"))
    idx = sobol_indices(model)
    (out / "sobol.csv").write_text(idx.to_csv(model.input_space.names))
    return ["sobol.csv"]


def cmd_preprocess(cfg, args, out: Path):
    walls, x6, y = read_scenarios(_need(cfg, "scenario"))
    mode = Mode(cfg.get("mode", "four"))
    reduced = reduce_inputs(x6, walls, mode)
    names = {Mode.FOUR: ["r", "psi", "theta_s", "zs"], Mode.TWO: ["r", "zs"], Mode.SIX: ["xs", "ys", "zs", "xp", "yp", "theta_p"]}[mode]
    write_csv(out / "reduced.csv", names + ["y"], (list(map(float, row)) + [float(v)] for row, v in zip(reduced, y)))
    return ["reduced.csv"]


def cmd_benchmark_eval(cfg, args, out: Path):
    name = _need(cfg, "problem")
    problem = get_problem(name, cfg.get("mode"))
    if name == "sar-synthetic":
        seed = _seed(cfg, args)
        sc = sample_scenarios(int(_need(cfg, "n")), seed)
        rows = ([w] + list(map(float, row)) + [float(v)] for w, row, v in zip(sc.walls, sc.x6, sc.y))
        write_csv(out / "scenario.csv", list(SCENARIO_COLUMNS), rows)
        return ["scenario.csv"]
    if "inputs" in cfg:
        x = np.atleast_2d(np.asarray(cfg["inputs"], dtype=float))
    else:
        seed = _seed(cfg, args)
        x = lhs_sample(int(_need(cfg, "n")), problem.space, seed).natural
    y = problem.evaluate(x)
    write_csv(out / "design.csv", list(problem.space.names) + ["y"], (list(map(float, row)) + [float(v)] for row, v in zip(x, y)))
    return ["design.csv"]


COMMANDS = {
    "train": cmd_train,
    "ocv": cmd_ocv,
    "replicate": cmd_replicate,
    "sobol": cmd_sobol,
    "preprocess": cmd_preprocess,
    "benchmark-eval": cmd_benchmark_eval,
}


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(out: Path, subcommand, cfg, seed, outputs, started):
    canonical = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    manifest = {
        "tool": "sparsepce",
        "tool_version": __version__,
        "kernel_backend": BACKEND,
        "subcommand": subcommand,
        "config_sha256": hashlib.sha256(canonical.encode()).hexdigest(),
        "seed": seed,
        "rng": RNG_NAME,
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
        "outputs": {name: _sha256(out / name) for name in outputs},
    }
    (out / "manifest.json").write_text(dumps(manifest))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparsepce", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = datetime.now(timezone.utc).isoformat()
    try:
        cfg = load_config(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        outputs = COMMANDS[args.subcommand](cfg, args, out)
        seed = args.seed if args.seed is not None else cfg.get("seed")
        write_manifest(out, args.subcommand, cfg, seed, outputs, started)
    except PCEError as exc:
        print(json.dumps({"error": type(exc).__name__, "exit_code": exc.exit_code, "message": str(exc)}), file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
