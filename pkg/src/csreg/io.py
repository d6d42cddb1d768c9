"""Plain-text CSV and JSON serialization for samples, fits, and tables.

All files carry a schema marker: CSV files start with a `# schema: 1`
comment line, JSON documents a `"schema": 1` field.  Floats are written
with full round-trip precision.
"""

from __future__ import annotations

import csv
import json
from typing import Sequence

import numpy as np

from .isotonic import StepDistribution
from .model import Sample
from .montecarlo import MCTable

SCHEMA_VERSION = 1
_SCHEMA_COMMENT = f"# schema: {SCHEMA_VERSION}"


def _fmt(value) -> str:
    return repr(float(value))


def _data_rows(path: str):
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            yield row


def write_sample_csv(path: str, sample: Sample) -> None:
    """Columns t, x1..xk, delta with one row per observation."""
    header = ["t"] + [f"x{j + 1}" for j in range(sample.k)] + ["delta"]
    with open(path, "w", newline="") as fh:
        fh.write(_SCHEMA_COMMENT + "\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(sample.n):
            row = [_fmt(sample.t[i])]
            row += [_fmt(v) for v in sample.x[i]]
            row.append(str(int(sample.delta[i])))
            writer.writerow(row)


def read_sample_csv(path: str) -> Sample:
    rows = list(_data_rows(path))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    header = rows[0]
    k = len(header) - 2
    if k < 1 or header[0] != "t" or header[-1] != "delta":
        raise ValueError(f"{path}: expected header t,x1..xk,delta, got {header}")
    if header[1:-1] != [f"x{j + 1}" for j in range(k)]:
        raise ValueError(f"{path}: covariate columns must be x1..x{k}")
    body = rows[1:]
    t = np.array([float(r[0]) for r in body])
    x = np.array([[float(v) for v in r[1:-1]] for r in body])
    delta = np.array([int(r[-1]) for r in body])
    return Sample(t=t, x=x, delta=delta)


def write_sample_json(path: str, sample: Sample) -> None:
    doc = {
        "schema": SCHEMA_VERSION,
        "t": sample.t.tolist(),
        "x": sample.x.tolist(),
        "delta": [int(d) for d in sample.delta],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def read_sample_json(path: str) -> Sample:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema") != SCHEMA_VERSION:
        raise ValueError(f"{path}: unsupported schema {doc.get('schema')!r}")
    return Sample(
        t=np.asarray(doc["t"], dtype=np.float64),
        x=np.asarray(doc["x"], dtype=np.float64),
        delta=np.asarray(doc["delta"]),
    )


def write_step_csv(path: str, dist: StepDistribution) -> None:
    """Columns knot, value: the cumulative value from each knot onward."""
    with open(path, "w", newline="") as fh:
        fh.write(_SCHEMA_COMMENT + "\n")
        writer = csv.writer(fh)
        writer.writerow(["knot", "value"])
        for knot, value in zip(dist.knots, dist.values):
            writer.writerow([_fmt(knot), _fmt(value)])


def read_step_csv(path: str) -> StepDistribution:
    rows = list(_data_rows(path))
    if not rows or rows[0] != ["knot", "value"]:
        raise ValueError(f"{path}: expected header knot,value")
    knots = np.array([float(r[0]) for r in rows[1:]])
    values = np.array([float(r[1]) for r in rows[1:]])
    return StepDistribution(knots=knots, values=values)


def write_mc_table_csv(path: str, table: MCTable) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(_SCHEMA_COMMENT + "\n")
        writer = csv.writer(fh)
        writer.writerow(["parameter", "method", "n", "N", "mean", "n_times_var", "failures"])
        for r in table.rows:
            writer.writerow(
                [r.parameter, r.method, r.n, r.n_reps, _fmt(r.mean), _fmt(r.n_times_var), r.failures]
            )


def write_mse_curve_csv(path: str, curve: np.ndarray, kind: str) -> None:
    """Columns c, mse, kind where kind tags the curve's origin."""
    if kind not in ("montecarlo", "bootstrap"):
        raise ValueError("kind must be 'montecarlo' or 'bootstrap'")
    with open(path, "w", newline="") as fh:
        fh.write(_SCHEMA_COMMENT + "\n")
        writer = csv.writer(fh)
        writer.writerow(["c", "mse", "kind"])
        for row in np.asarray(curve):
            writer.writerow([_fmt(row[0]), _fmt(row[1]), kind])


def write_score_curve_csv(
    path: str, grid: Sequence[float], values, method: str, used, excluded
) -> None:
    """Columns beta, psi, method, n_used, n_excluded for one score over a grid."""
    with open(path, "w", newline="") as fh:
        fh.write(_SCHEMA_COMMENT + "\n")
        writer = csv.writer(fh)
        writer.writerow(["beta", "psi", "method", "n_used", "n_excluded"])
        for b, v, nu, ne in zip(grid, values, used, excluded):
            writer.writerow([_fmt(b), _fmt(v), method, int(nu), int(ne)])


def dump_json(obj: dict) -> str:
    """Schema-stamped single-line JSON document."""
    return json.dumps({"schema": SCHEMA_VERSION, **obj})
