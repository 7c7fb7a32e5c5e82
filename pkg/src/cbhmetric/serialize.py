"""JSON encoding of reports: complex numbers as [re, im], matrices as nested rows.

Floats are written with ``repr`` (shortest round-tripping decimal), so a
matrix written and re-read is bit-identical.
"""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np

from .dieudonne import MetricCandidate, MetricParams


def _float(x):
    x = float(x)
    if math.isfinite(x):
        return x
    return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")


def to_jsonable(obj):
    """Recursively convert numpy arrays, complex numbers and dataclasses to JSON types."""
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return [_float(obj.real), _float(obj.imag)]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _float(obj)
    if isinstance(obj, MetricParams):
        return list(obj.first_row_real)
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    return obj


def dumps(obj, **kw) -> str:
    return json.dumps(to_jsonable(obj), indent=kw.pop("indent", 2), **kw) + "\n"


def complex_matrix(rows) -> np.ndarray:
    """Inverse of the matrix encoding: nested rows of [re, im] pairs."""
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def metric_to_json(candidate: MetricCandidate, tolerances=None) -> str:
    meta = {
        "family": candidate.family,
        "N": candidate.N,
        "gamma": candidate.gamma,
        "tolerances": dict(tolerances or {}),
    }
    body = {
        "metadata": meta,
        "matrix": candidate.matrix,
        "params": candidate.params,
        "options": candidate.options,
        "hermiticity_residual": candidate.hermiticity_residual,
        "dieudonne_residual": candidate.dieudonne_residual,
    }
    return dumps(body)


def metric_from_json(text: str) -> MetricCandidate:
    data = json.loads(text)
    meta = data["metadata"]
    params = data.get("params")
    return MetricCandidate(
        matrix=complex_matrix(data["matrix"]),
        params=MetricParams(tuple(params)) if params else None,
        family=meta["family"],
        gamma=float(meta["gamma"]),
        hermiticity_residual=float(data["hermiticity_residual"]),
        dieudonne_residual=float(data["dieudonne_residual"]),
        options=data.get("options", {}),
    )
