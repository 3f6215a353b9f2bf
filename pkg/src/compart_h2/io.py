"""JSON file formats: plants, gains, starting vectors, and solve reports.

Plant files are JSON objects with keys ``A``, ``B``, ``C``, ``D``, ``G``
holding row-major arrays of arrays (dimensions are inferred) plus an optional
``name``.  Gain files use the same encoding under key ``K``; vector files for
the rank-one construction hold a list of columns under key ``vectors``.
"""

import json

import numpy as np

from .model import PlantModel


def _matrix(obj, key, path):
    if key not in obj:
        raise ValueError(f"{path}: missing required key {key!r}")
    try:
        arr = np.asarray(obj[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{path}: key {key!r} is not a numeric matrix: {exc}") from exc
    if arr.ndim != 2:
        raise ValueError(f"{path}: key {key!r} must be an array of arrays")
    return arr


def load_plant(path):
    """Read a plant JSON file."""
    with open(path) as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: plant file must hold a JSON object")
    return PlantModel(
        A=_matrix(obj, "A", path),
        B=_matrix(obj, "B", path),
        C=_matrix(obj, "C", path),
        D=_matrix(obj, "D", path),
        G=_matrix(obj, "G", path),
        name=str(obj.get("name", "")),
    )


def save_plant(plant, path):
    obj = {key: getattr(plant, key).tolist() for key in ("A", "B", "C", "D", "G")}
    if plant.name:
        obj["name"] = plant.name
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def load_gain(path):
    """Read a gain JSON file (matrix under key ``K``)."""
    with open(path) as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: gain file must hold a JSON object")
    return _matrix(obj, "K", path)


def save_gain(k, path):
    with open(path, "w") as fh:
        json.dump({"K": np.asarray(k, dtype=float).tolist()}, fh, indent=2)
        fh.write("\n")


def load_vectors(path):
    """Read starting vectors for the rank-one gain construction."""
    with open(path) as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict) or "vectors" not in obj:
        raise ValueError(f"{path}: vector file must hold an object with key 'vectors'")
    return [np.asarray(v, dtype=float).reshape(-1) for v in obj["vectors"]]


def report_to_dict(report):
    """Serializable view of a solve report (stable JSON schema)."""
    return {
        "K": report.final_gain.tolist(),
        "J": float(report.objective),
        "method": report.method,
        "converged": bool(report.converged),
        "kkt": {
            "stationarity": float(report.kkt.stationarity),
            "dual_feasibility": float(report.kkt.dual_feasibility),
            "primal_feasibility": float(report.kkt.primal_feasibility),
            "complementarity": float(report.kkt.complementarity),
        },
        "grad_norm": float(report.jlbf_grad_norm),
        "trace": [
            {
                "t": float(rec.t),
                "inner": int(rec.inner_iterations),
                "grad_norm": float(rec.grad_norm),
                "J": float(rec.J),
                "seconds": float(rec.cumulative_seconds),
            }
            for rec in report.trace
        ],
    }


def save_report(report, path):
    with open(path, "w") as fh:
        json.dump(report_to_dict(report), fh, indent=2)
        fh.write("\n")
