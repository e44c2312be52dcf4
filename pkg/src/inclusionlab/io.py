"""JSON and CSV file formats.

Every file carries ``"schema_version": 1``.  JSON is written with sorted keys
and Python's shortest round-trip float repr, so identical inputs give
byte-identical files.  Non-finite floats are written as null.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InputError
from .linalg import DEFAULT_ATOL, DEFAULT_NONSINGULARITY_TOL, SystemSpec
from .spectral import BoundsTable, CoBoundsTable, GrowthCurve, verdict_from_dict
from .symbolic import LawProgram, law_from_dict
from .synth import ChaosCertificate

SCHEMA_VERSION = 1


def _clean(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps(payload: dict) -> str:
    body = dict(payload)
    body["schema_version"] = SCHEMA_VERSION
    return json.dumps(_clean(body), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_text(text: str, path: str | None) -> None:
    if path is None or path == "-":
        import sys

        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def read_json(path: str | Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: cannot read: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: top-level JSON value must be an object")
    v = data.get("schema_version", SCHEMA_VERSION)
    if v != SCHEMA_VERSION:
        raise InputError(f"{path}: unsupported schema_version {v}")
    return data


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


# -- systems ---------------------------------------------------------------


def system_to_dict(sys: SystemSpec) -> dict:
    d = {"kind": "system", "dim": sys.dim, "matrices": sys.matrices.tolist(),
         "nonsingularity_tol": sys.nonsingularity_tol, "atol": sys.atol}
    if sys.labels is not None:
        d["labels"] = list(sys.labels)
    return d


def system_from_dict(data: dict, where: str = "system") -> SystemSpec:
    if "matrices" not in data:
        raise InputError(f"{where}: missing 'matrices'")
    mats = data["matrices"]
    try:
        arr = [np.array(m, dtype=float) for m in mats]
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: matrices must be numeric arrays: {exc}") from exc
    for i, m in enumerate(arr, 1):
        if m.ndim != 2:
            raise InputError(f"{where}: matrix {i} is not two-dimensional")
    dim = data.get("dim")
    if dim is not None and any(m.shape != (dim, dim) for m in arr):
        bad = next(i for i, m in enumerate(arr, 1) if m.shape != (dim, dim))
        raise InputError(f"{where}: matrix {bad} has shape {arr[bad - 1].shape}, declared dim is {dim}")
    return SystemSpec(
        arr,
        nonsingularity_tol=float(data.get("nonsingularity_tol", DEFAULT_NONSINGULARITY_TOL)),
        atol=float(data.get("atol", DEFAULT_ATOL)),
        labels=data.get("labels"),
    )


def load_system(path: str | Path) -> SystemSpec:
    return system_from_dict(read_json(path), str(path))


def save_system(sys: SystemSpec, path: str | Path) -> None:
    write_text(dumps(system_to_dict(sys)), str(path))


# -- laws ------------------------------------------------------------------


def load_law(path: str | Path) -> LawProgram:
    data = read_json(path)
    if "law" in data and isinstance(data["law"], dict):
        data = data["law"]
    return law_from_dict(data)


def save_law(law: LawProgram, path: str | Path) -> None:
    write_text(dumps(law.to_dict()), str(path))


# -- generic artifacts -----------------------------------------------------

_LAW_KINDS = {"periodic", "blocks", "geometric", "shifted"}
_VERDICT_KINDS = {"FeasibleWitness", "InfeasibleCertified", "Undetermined"}


def artifact_from_dict(data: Any) -> Any:
    """Rebuild typed objects for known kinds; other values are kept as data."""
    if isinstance(data, list):
        return [artifact_from_dict(x) for x in data]
    if not isinstance(data, dict):
        return data
    kind = data.get("kind")
    if kind == "system":
        return system_from_dict(data)
    if kind in _LAW_KINDS:
        return law_from_dict(data)
    if kind == "jsr_bounds":
        return BoundsTable.from_dict(data)
    if kind == "cojsr_bounds":
        return CoBoundsTable.from_dict(data)
    if kind == "growth_curve":
        return GrowthCurve.from_dict(data)
    if kind in _VERDICT_KINDS:
        return verdict_from_dict(data)
    if kind == "chaos_certificate":
        return ChaosCertificate.from_dict(data)
    return {k: artifact_from_dict(v) for k, v in data.items() if k != "schema_version"}


def artifact_to_dict(obj: Any) -> Any:
    if isinstance(obj, SystemSpec):
        return system_to_dict(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if isinstance(obj, dict):
        return {k: artifact_to_dict(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [artifact_to_dict(v) for v in obj]
    return obj


def load_report(path: str | Path) -> Any:
    return artifact_from_dict(read_json(path))
