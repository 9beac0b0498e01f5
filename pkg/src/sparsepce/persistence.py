"""Model documents and flat CSV designs."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from . import __version__
from .basis import BasisSpec
from .errors import DataError
from .input_model import RNG_NAME, InputSpace
from .training import SparsePceModel

FORMAT_VERSION = 1


def _finite_or_none(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _finite_or_none(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite_or_none(v) for v in value]
    return value


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip floats, no NaN tokens."""
    return json.dumps(_finite_or_none(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def model_to_dict(model: SparsePceModel) -> dict:
    return {
        "version": FORMAT_VERSION,
        "tool_version": __version__,
        "input_space": model.input_space.to_list(),
        "families": [f.value for f in model.families],
        "indices": model.indices.tolist(),
        "coefficients": [float(c) for c in model.coefficients],
        "diagnostics": dict(model.diagnostics),
        "seed": int(model.seed),
        "rng": RNG_NAME,
    }


def model_from_dict(doc: dict) -> SparsePceModel:
    try:
        if doc["version"] != FORMAT_VERSION:
            raise DataError(f"unsupported model format version {doc['version']}")
        space = InputSpace.from_list(doc["input_space"])
        spec = BasisSpec(tuple(doc["families"]), np.array(doc["indices"], dtype=np.int64))
        return SparsePceModel(spec, np.array(doc["coefficients"], dtype=float), space, doc.get("diagnostics", {}), int(doc.get("seed", 0)))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DataError):
            raise
        raise DataError(f"malformed model document: {exc}") from exc


def save_model(model: SparsePceModel, path) -> None:
    Path(path).write_text(dumps(model_to_dict(model)))


def load_model(path) -> SparsePceModel:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not a JSON model document ({exc})") from exc
    return model_from_dict(doc)


def read_table(path) -> tuple[list[str], list[list[str]]]:
    """Header and rows of a CSV file, with line-numbered errors."""
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: empty file")
    header, body = [h.strip() for h in rows[0]], rows[1:]
    for lineno, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise DataError(f"{path}:{lineno}: expected {len(header)} fields, found {len(row)}")
    return header, body


def _floats(path, header, body, columns):
    out = np.empty((len(body), len(columns)))
    for lineno, row in enumerate(body, start=2):
        for k, c in enumerate(columns):
            try:
                out[lineno - 2, k] = float(row[header.index(c)])
            except ValueError:
                raise DataError(f"{path}:{lineno}: column {c!r} is not numeric: {row[header.index(c)]!r}") from None
    return out


def read_design(path):
    """Read a design CSV: input columns followed by ``y``; a ``wall`` column is returned separately."""
    header, body = read_table(path)
    if "y" not in header:
        raise DataError(f"{path}:1: missing response column 'y'")
    inputs = [h for h in header if h not in ("y", "wall")]
    x = _floats(path, header, body, inputs)
    y = _floats(path, header, body, ["y"])[:, 0]
    walls = np.array([row[header.index("wall")] for row in body]) if "wall" in header else None
    return inputs, x, y, walls


SCENARIO_COLUMNS = ("wall", "xs", "ys", "zs", "xp", "yp", "theta_p", "y")


def read_scenarios(path):
    header, body = read_table(path)
    missing = [c for c in SCENARIO_COLUMNS if c not in header]
    if missing:
        raise DataError(f"{path}:1: scenario file lacks columns {missing}")
    x6 = _floats(path, header, body, list(SCENARIO_COLUMNS[1:7]))
    y = _floats(path, header, body, ["y"])[:, 0]
    walls = []
    for lineno, row in enumerate(body, start=2):
        w = row[header.index("wall")].strip()
        if w not in ("W1", "W2", "W3", "W4"):
            raise DataError(f"{path}:{lineno}: unknown wall label {w!r}")
        walls.append(w)
    return np.array(walls), x6, y


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
