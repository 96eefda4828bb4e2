"""Reading and writing problems, curve files, reports and certificates.

All files are JSON.  Floats are written with 17 significant digits so doubles
survive a round trip, and non-finite values are written as the strings
``"inf"``, ``"-inf"`` and ``"nan"``.  Output is deterministic: keys keep their
insertion order and nothing time-dependent is recorded.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from .certificate import BeurlingCertificate, FamilyMember
from .core import CellSpace, Measure, MeasureSystem, Metric
from .errors import SchemaError
from .geometry import Curve, Grid, Polyline, TransboundaryDomain
from .solver import SolveReport

__all__ = [
    "dumps",
    "loads",
    "read_json",
    "write_text",
    "parse_problem",
    "problem_to_dict",
    "problem_hash",
    "parse_grid",
    "parse_curve_file",
    "report_to_dict",
    "parse_report",
    "certificate_to_dict",
    "parse_certificate",
    "parse_metric",
    "metric_csv",
    "metric_pgm",
]


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = "%.17g" % x
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def _is_scalar(x):
    return x is None or isinstance(x, (bool, int, float, str, np.generic))


def _enc(obj, indent, level):
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_enc(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(_is_scalar(v) for v in obj):
            return "[" + ", ".join(_enc(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _enc(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with 17-digit floats and quoted non-finite values."""
    return _enc(obj, indent, 0) + "\n"


def loads(text: str, source: str = "<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def read_json(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text, str(path))


def write_text(path, text: str):
    Path(path).write_text(text)


def _num(x, where, allow_inf=False) -> float:
    if isinstance(x, bool):
        raise SchemaError(f"{where}: expected a number, got a boolean", where)
    if isinstance(x, str) and x in ("inf", "-inf", "nan"):
        v = float(x)
        if allow_inf and not math.isnan(v):
            return v
        raise SchemaError(f"{where}: non-finite value {x!r}", where)
    if not isinstance(x, (int, float)):
        raise SchemaError(f"{where}: expected a number", where)
    v = float(x)
    if not math.isfinite(v) and not allow_inf:
        raise SchemaError(f"{where}: non-finite value", where)
    return v


def _extended(x, where) -> float:
    if x == "nan":
        return math.nan
    return _num(x, where, allow_inf=True)


def _keys(obj, where, required, optional=()):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where or 'document'}: expected an object", where)
    for k in obj:
        if k not in required and k not in optional:
            name = f"{where}.{k}" if where else k
            raise SchemaError(f"unknown field {name!r}", name)
    for k in required:
        if k not in obj:
            name = f"{where}.{k}" if where else k
            raise SchemaError(f"missing field {name!r}", name)


def _list(obj, where):
    if not isinstance(obj, list):
        raise SchemaError(f"{where}: expected a list", where)
    return obj


def parse_grid(obj, where="grid") -> Grid:
    _keys(obj, where, ("width", "height", "nx", "ny"), ("origin",))
    origin = obj.get("origin", [0.0, 0.0])
    if not isinstance(origin, list) or len(origin) != 2:
        raise SchemaError(f"{where}.origin: expected [x, y]", f"{where}.origin")
    nx, ny = obj["nx"], obj["ny"]
    if not isinstance(nx, int) or not isinstance(ny, int) or isinstance(nx, bool) or nx < 1 or ny < 1:
        raise SchemaError(f"{where}: nx and ny must be positive integers", where)
    try:
        return Grid(_num(obj["width"], f"{where}.width"), _num(obj["height"], f"{where}.height"),
                    nx, ny, (_num(origin[0], f"{where}.origin"), _num(origin[1], f"{where}.origin")))
    except SchemaError:
        raise
    except Exception as exc:
        raise SchemaError(f"{where}: {exc}", where) from None


def _parse_holes(obj, grid, where="holes"):
    holes = []
    for i, h in enumerate(_list(obj, where)):
        cells = _list(h, f"{where}[{i}]")
        if not all(isinstance(c, int) and not isinstance(c, bool) for c in cells):
            raise SchemaError(f"{where}[{i}]: expected cell indices", f"{where}[{i}]")
        holes.append(frozenset(cells))
    try:
        return TransboundaryDomain(grid, tuple(holes))
    except Exception as exc:
        raise SchemaError(f"{where}: {exc}", where) from None


def _parse_measure(obj, where, n_cells=None) -> Measure:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object of cell -> value", where)
    idx, val = [], []
    for k, v in obj.items():
        try:
            j = int(k)
        except ValueError:
            raise SchemaError(f"{where}: cell key {k!r} is not an integer", f"{where}.{k}") from None
        if j < 0 or (n_cells is not None and j >= n_cells):
            raise SchemaError(f"{where}: cell {j} out of range", f"{where}.{k}")
        x = _num(v, f"{where}.{k}")
        if x < 0:
            raise SchemaError(f"{where}.{k}: negative entry", f"{where}.{k}")
        idx.append(j)
        val.append(x)
    try:
        return Measure(idx, val)
    except Exception as exc:
        raise SchemaError(f"{where}: {exc}", where) from None


def parse_problem(obj) -> dict:
    """Validate a problem document.

    Returns a dict with ``space``, ``system`` and, when present, ``grid`` and
    ``domain`` (transboundary holes) plus ``name``.
    """
    _keys(obj, "", ("cells", "measures"), ("grid", "holes", "name"))
    cells = obj["cells"]
    _keys(cells, "cells", ("weights",), ("atoms", "labels"))
    w = [_num(x, f"cells.weights[{i}]") for i, x in enumerate(_list(cells["weights"], "cells.weights"))]
    atoms = cells.get("atoms")
    if atoms is not None:
        _list(atoms, "cells.atoms")
        if not all(isinstance(a, bool) for a in atoms):
            raise SchemaError("cells.atoms: expected booleans", "cells.atoms")
        if len(atoms) != len(w):
            raise SchemaError("cells.atoms: length differs from cells.weights", "cells.atoms")
    labels = cells.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != len(w)):
        raise SchemaError("cells.labels: expected one label per cell", "cells.labels")
    try:
        space = CellSpace(np.array(w, dtype=float), atoms, labels)
    except Exception as exc:
        raise SchemaError(f"cells: {exc}", "cells") from None
    rows, tags = [], []
    for i, m in enumerate(_list(obj["measures"], "measures")):
        where = f"measures[{i}]"
        _keys(m, where, ("entries",), ("tag",))
        rows.append(_parse_measure(m["entries"], f"{where}.entries", space.n_cells))
        tag = m.get("tag")
        if tag is not None and not isinstance(tag, str):
            raise SchemaError(f"{where}.tag: expected a string", f"{where}.tag")
        tags.append(tag)
    system = MeasureSystem(tuple(rows), tuple(tags), allow_empty=True)
    out = {"space": space, "system": system, "name": obj.get("name")}
    if "grid" in obj:
        out["grid"] = parse_grid(obj["grid"])
    if "holes" in obj:
        if "grid" not in out:
            raise SchemaError("holes: requires a grid", "holes")
        out["domain"] = _parse_holes(obj["holes"], out["grid"])
    return out


def problem_to_dict(space: CellSpace, system: MeasureSystem, grid: Grid | None = None,
                    domain: TransboundaryDomain | None = None, name: str | None = None) -> dict:
    cells = {"weights": space.weights}
    if space.atoms.any():
        cells["atoms"] = [bool(a) for a in space.atoms]
    if space.labels is not None:
        cells["labels"] = list(space.labels)
    measures = []
    for i, mu in enumerate(system):
        entry = {"entries": {str(int(j)): float(v) for j, v in zip(mu.indices, mu.values)}}
        tag = system.tags[i] if system.tags is not None else None
        if tag is not None:
            entry["tag"] = tag
        measures.append(entry)
    out = {}
    if name is not None:
        out["name"] = name
    if grid is not None:
        out["grid"] = grid.to_dict()
    if domain is not None:
        out["holes"] = [sorted(h) for h in domain.holes]
    out["cells"] = cells
    out["measures"] = measures
    return out


def problem_hash(space: CellSpace, system: MeasureSystem) -> str:
    """SHA-256 of the canonical serialization of the cells and measures."""
    body = dumps(problem_to_dict(space, system), indent=0)
    return hashlib.sha256(body.encode()).hexdigest()


def parse_curve_file(obj) -> dict:
    """``{"grid": {...}, "curves": [{"vertices": [[x, y], ...], "multiplicity": k}], "holes"?}``.

    A curve may instead be ``{"pieces": [...]}`` with one entry per polyline piece.
    """
    _keys(obj, "", ("grid", "curves"), ("holes", "name"))
    grid = parse_grid(obj["grid"])
    curves, tags = [], []
    for i, c in enumerate(_list(obj["curves"], "curves")):
        where = f"curves[{i}]"
        if isinstance(c, dict) and "pieces" in c:
            _keys(c, where, ("pieces",), ("tag",))
            pieces = [_parse_polyline(pc, f"{where}.pieces[{k}]")
                      for k, pc in enumerate(_list(c["pieces"], f"{where}.pieces"))]
            curves.append(Curve(pieces))
        else:
            curves.append(_parse_polyline(c, where, extra=("tag",)))
        tags.append(c.get("tag", f"curve[{i}]") if isinstance(c, dict) else f"curve[{i}]")
    out = {"grid": grid, "curves": curves, "tags": tags, "name": obj.get("name")}
    if "holes" in obj:
        out["domain"] = _parse_holes(obj["holes"], grid)
    return out


def _parse_polyline(obj, where, extra=()):
    _keys(obj, where, ("vertices",), ("multiplicity",) + tuple(extra))
    verts = _list(obj["vertices"], f"{where}.vertices")
    pts = []
    for k, v in enumerate(verts):
        if not isinstance(v, list) or len(v) != 2:
            raise SchemaError(f"{where}.vertices[{k}]: expected [x, y]", f"{where}.vertices[{k}]")
        pts.append([_num(v[0], f"{where}.vertices[{k}]"), _num(v[1], f"{where}.vertices[{k}]")])
    mult = obj.get("multiplicity", 1)
    if not isinstance(mult, int) or isinstance(mult, bool) or mult < 1:
        raise SchemaError(f"{where}.multiplicity: expected a positive integer", f"{where}.multiplicity")
    try:
        return Polyline(pts, mult)
    except Exception as exc:
        raise SchemaError(f"{where}: {exc}", where) from None


def report_to_dict(report: SolveReport, problem_sha256: str | None = None,
                   grid: Grid | None = None, domain: TransboundaryDomain | None = None) -> dict:
    out = {"kind": "solve-report"}
    if problem_sha256:
        out["problem_sha256"] = problem_sha256
    out.update({
        "p": report.p,
        "status": report.status,
        "value": report.value,
        "gap": report.gap,
        "dual_value": report.dual_value,
        "iterations": report.iterations,
        "active_set": [int(i) for i in report.active_set],
        "metric": report.metric.values,
        "dual": report.dual,
    })
    if grid is not None:
        out["grid"] = grid.to_dict()
    if domain is not None:
        out["holes"] = [sorted(h) for h in domain.holes]
    return out


def parse_report(obj) -> dict:
    _keys(obj, "", ("kind", "p", "status", "value", "metric", "dual"),
          ("problem_sha256", "gap", "dual_value", "iterations", "active_set", "grid", "holes"))
    if obj["kind"] != "solve-report":
        raise SchemaError("kind: expected 'solve-report'", "kind")
    metric = [_num(x, f"metric[{i}]") for i, x in enumerate(_list(obj["metric"], "metric"))]
    dual = [_num(x, f"dual[{i}]") for i, x in enumerate(_list(obj["dual"], "dual"))]
    out = {
        "p": _num(obj["p"], "p"),
        "status": obj["status"],
        "value": _num(obj["value"], "value", allow_inf=True),
        "gap": _extended(obj.get("gap", "nan"), "gap"),
        "iterations": int(obj.get("iterations", 0)),
        "active_set": tuple(int(i) for i in obj.get("active_set", ())),
        "metric": Metric(np.array(metric)),
        "dual": np.array(dual),
        "problem_sha256": obj.get("problem_sha256"),
    }
    if "grid" in obj:
        out["grid"] = parse_grid(obj["grid"])
        if "holes" in obj:
            out["domain"] = _parse_holes(obj["holes"], out["grid"])
    return out


def report_from_parsed(d: dict) -> SolveReport:
    return SolveReport(d["value"], d["metric"], d["dual"], d["gap"], d["active_set"],
                       d["iterations"], d["status"], d["p"])


def parse_metric(obj) -> Metric:
    """A metric document ``{"metric": [...]}``; solve reports are accepted too."""
    if isinstance(obj, dict) and obj.get("kind") == "solve-report":
        return parse_report(obj)["metric"]
    _keys(obj, "", ("metric",), ("name",))
    vals = [_num(x, f"metric[{i}]") for i, x in enumerate(_list(obj["metric"], "metric"))]
    try:
        return Metric(np.array(vals))
    except Exception as exc:
        raise SchemaError(f"metric: {exc}", "metric") from None


def certificate_to_dict(cert: BeurlingCertificate, problem_sha256: str | None = None) -> dict:
    fam = []
    for f in cert.family:
        entry = {"row": int(f.row)} if f.row is not None else {
            "measure": {str(int(j)): float(v) for j, v in zip(f.measure.indices, f.measure.values)}}
        entry["scale"] = f.scale
        entry["lambda"] = f.lam
        fam.append(entry)
    out = {}
    if problem_sha256:
        out["problem_sha256"] = problem_sha256
    out["p"] = cert.p
    out["family"] = fam
    return out


def parse_certificate(obj) -> BeurlingCertificate:
    _keys(obj, "", ("p", "family"), ("problem_sha256",))
    p = _num(obj["p"], "p")
    fam = []
    for i, e in enumerate(_list(obj["family"], "family")):
        where = f"family[{i}]"
        _keys(e, where, ("scale", "lambda"), ("row", "measure"))
        if ("row" in e) == ("measure" in e):
            raise SchemaError(f"{where}: give exactly one of row or measure", where)
        scale = _num(e["scale"], f"{where}.scale")
        lam = _num(e["lambda"], f"{where}.lambda")
        if "row" in e:
            if not isinstance(e["row"], int) or isinstance(e["row"], bool) or e["row"] < 0:
                raise SchemaError(f"{where}.row: expected a row index", f"{where}.row")
            fam.append(FamilyMember(scale, lam, row=e["row"]))
        else:
            fam.append(FamilyMember(scale, lam, measure=_parse_measure(e["measure"], f"{where}.measure")))
    try:
        return BeurlingCertificate(p, tuple(fam))
    except Exception as exc:
        raise SchemaError(f"certificate: {exc}", "p") from None


def _grid_field(metric: Metric, grid: Grid | None, domain: TransboundaryDomain | None):
    v = np.asarray(metric.values, dtype=float)
    if domain is not None:
        field, atoms = domain.to_grid_field(metric)
        return field.reshape(grid.ny, grid.nx), atoms
    if grid is not None and v.size == grid.n_cells:
        return v.reshape(grid.ny, grid.nx), np.zeros(0)
    return None, np.zeros(0)


def metric_csv(metric: Metric, grid: Grid | None = None,
               domain: TransboundaryDomain | None = None) -> str:
    """CSV text of a metric field.

    On a grid: ``ny`` lines of ``nx`` values, line ``k`` holding grid row
    ``iy = k`` (bottom row first) in increasing ``ix``.  A transboundary
    metric shows each hole filled with its atom value and appends a trailer
    line ``atoms,v1,...,vl``.  Without a grid the flat vector is written on
    one line.  Values use 17 significant digits.
    """
    field, atoms = _grid_field(metric, grid, domain)
    fmt = lambda x: "%.17g" % x
    if field is None:
        return ",".join(fmt(x) for x in metric.values) + "\n"
    lines = [",".join(fmt(x) for x in row) for row in field]
    if domain is not None:
        lines.append(",".join(["atoms"] + [fmt(x) for x in atoms]))
    return "\n".join(lines) + "\n"


def metric_pgm(metric: Metric, grid: Grid, domain: TransboundaryDomain | None = None) -> bytes:
    """Binary 8-bit PGM (``P5``), top image row = top grid row.

    Pixel = ``round(255 * phi / max(phi))``; a zero metric gives a black image.
    Holes are drawn with their atom value.
    """
    field, _ = _grid_field(metric, grid, domain)
    if field is None:
        raise SchemaError("PGM export needs a grid", "grid")
    top = float(field.max()) if field.size else 0.0
    img = np.zeros(field.shape, dtype=np.uint8) if top <= 0 else \
        np.rint(255.0 * field / top).clip(0, 255).astype(np.uint8)
    header = f"P5\n{grid.nx} {grid.ny}\n255\n".encode()
    return header + img[::-1].tobytes()
