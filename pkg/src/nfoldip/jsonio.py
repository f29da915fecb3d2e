"""JSON schemas for instances, reports and model inputs.

All integers travel as exact decimal JSON numbers.  Emission is
deterministic (sorted keys, fixed separators, trailing newline) so
identical inputs produce byte-identical reports.

Schema summary:

- matrix:   {"rows": r, "cols": c, "entries": [[...], ...]}
- bimatrix: {"a1": matrix, "a2": matrix}
- instance: {"bimatrix": ..., "n": n, "b": [...], "l": [...], "u": [...],
             "objective": {"linear": [...]} |
                          {"piecewise": [{"i": brick, "j": coord,
                                          "breakpoints": [...],
                                          "slopes": [...],
                                          "intercepts": [...]}, ...]},
             "options": {"graver_complexity": g, "degree": d}}
  brick/coordinate indices in piecewise entries are 1-based.
- report:   mirrors SolveReport; trace entries are
            {"gamma": g, "step_norm": s, "objective": v}.
- transportation: {"commodities": l, "suppliers": m, "consumers": n,
             "supply": [[...]], "demand": [[...]], "capacity": [[...]],
             "cost": [[{"linear": w} | {"breakpoints": ..., "slopes": ...,
                        "intercepts": ...}, ...]]}
- table:    {"shape": [n, p, q], "margins": {"vjk": [[...]],
             "vik": [[...]], "vij": [[...]]}}
"""

from __future__ import annotations

import json

from .errors import InputError
from .matrices import Bimatrix, IntegerMatrix
from .objective import LinearObjective, PiecewiseObjective
from .solver import NFoldInstance, SolveReport
from .models import TableInstance, TransportationInstance


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _require(cond: bool, path: str, message: str):
    if not cond:
        raise InputError(f"{path}: {message}")


def _int_list(values, path: str) -> list[int]:
    _require(isinstance(values, list), path, "expected a list of integers")
    out = []
    for pos, v in enumerate(values):
        _require(isinstance(v, int) and not isinstance(v, bool),
                 f"{path}[{pos}]", "expected an exact integer")
        out.append(v)
    return out


def matrix_to_obj(m: IntegerMatrix) -> dict:
    return {"rows": m.rows, "cols": m.cols,
            "entries": [list(m.row(i)) for i in range(m.rows)]}


def matrix_from_obj(obj, path: str = "matrix") -> IntegerMatrix:
    _require(isinstance(obj, dict), path, "expected an object")
    for key in ("rows", "cols", "entries"):
        _require(key in obj, path, f"missing field {key!r}")
    rows, cols = obj["rows"], obj["cols"]
    _require(isinstance(rows, int) and isinstance(cols, int), path,
             "rows/cols must be integers")
    entries = obj["entries"]
    _require(isinstance(entries, list) and len(entries) == rows,
             f"{path}.entries", f"expected {rows} rows")
    flat = []
    for i, row in enumerate(entries):
        vals = _int_list(row, f"{path}.entries[{i}]")
        _require(len(vals) == cols, f"{path}.entries[{i}]",
                 f"expected {cols} entries")
        flat.extend(vals)
    return IntegerMatrix(rows, cols, tuple(flat))


def bimatrix_to_obj(a: Bimatrix) -> dict:
    return {"a1": matrix_to_obj(a.a1), "a2": matrix_to_obj(a.a2)}


def bimatrix_from_obj(obj, path: str = "bimatrix") -> Bimatrix:
    _require(isinstance(obj, dict), path, "expected an object")
    for key in ("a1", "a2"):
        _require(key in obj, path, f"missing field {key!r}")
    return Bimatrix(matrix_from_obj(obj["a1"], f"{path}.a1"),
                    matrix_from_obj(obj["a2"], f"{path}.a2"))


def basis_to_obj(basis) -> dict:
    return {"dim": basis.dim, "elements": [list(v) for v in basis.elements]}


def objective_to_obj(objective, t: int) -> dict:
    if isinstance(objective, LinearObjective):
        return {"linear": list(objective.weights)}
    if isinstance(objective, PiecewiseObjective):
        entries = []
        for j in sorted(objective.pieces):
            bp, sl, ic = objective.pieces[j]
            entries.append({"i": j // t + 1, "j": j % t + 1,
                            "breakpoints": list(bp),
                            "slopes": list(sl), "intercepts": list(ic)})
        return {"piecewise": entries}
    raise InputError("objective kind cannot be serialized")


def _objective_from_obj(obj, nt: int, t: int, path: str):
    _require(isinstance(obj, dict), path, "expected an object")
    if "linear" in obj:
        weights = _int_list(obj["linear"], f"{path}.linear")
        _require(len(weights) == nt, f"{path}.linear", f"expected {nt} weights")
        return LinearObjective(tuple(weights))
    _require("piecewise" in obj, path, "objective needs 'linear' or 'piecewise'")
    pieces = {}
    entries = obj["piecewise"]
    _require(isinstance(entries, list), f"{path}.piecewise", "expected a list")
    for pos, entry in enumerate(entries):
        epath = f"{path}.piecewise[{pos}]"
        _require(isinstance(entry, dict), epath, "expected an object")
        for key in ("i", "j", "breakpoints", "slopes", "intercepts"):
            _require(key in entry, epath, f"missing field {key!r}")
        brick, coord = entry["i"], entry["j"]
        _require(isinstance(brick, int) and brick >= 1, f"{epath}.i",
                 "brick index is 1-based")
        _require(isinstance(coord, int) and 1 <= coord <= t, f"{epath}.j",
                 f"coordinate index must be in 1..{t}")
        j = (brick - 1) * t + (coord - 1)
        _require(0 <= j < nt, epath, "piecewise entry outside the instance")
        _require(j not in pieces, epath, "duplicate piecewise coordinate")
        pieces[j] = (tuple(_int_list(entry["breakpoints"], f"{epath}.breakpoints")),
                     tuple(_int_list(entry["slopes"], f"{epath}.slopes")),
                     tuple(_int_list(entry["intercepts"], f"{epath}.intercepts")))
    return PiecewiseObjective(nt, pieces)


def instance_to_obj(inst: NFoldInstance) -> dict:
    obj = {
        "bimatrix": bimatrix_to_obj(inst.bimatrix),
        "n": inst.n,
        "b": list(inst.b),
        "l": list(inst.l),
        "u": list(inst.u),
        "objective": objective_to_obj(inst.objective, inst.bimatrix.t),
    }
    options = {}
    if inst.graver_complexity_override is not None:
        options["graver_complexity"] = inst.graver_complexity_override
    if inst.degree is not None:
        options["degree"] = inst.degree
    if options:
        obj["options"] = options
    return obj


def instance_from_obj(obj, path: str = "instance") -> NFoldInstance:
    _require(isinstance(obj, dict), path, "expected an object")
    for key in ("bimatrix", "n", "b", "l", "u", "objective"):
        _require(key in obj, path, f"missing field {key!r}")
    bim = bimatrix_from_obj(obj["bimatrix"], f"{path}.bimatrix")
    n = obj["n"]
    _require(isinstance(n, int) and n >= 1, f"{path}.n", "n must be a positive integer")
    b = _int_list(obj["b"], f"{path}.b")
    l = _int_list(obj["l"], f"{path}.l")
    u = _int_list(obj["u"], f"{path}.u")
    objective = _objective_from_obj(obj["objective"], n * bim.t, bim.t,
                                    f"{path}.objective")
    override = None
    degree = None
    options = obj.get("options", {})
    if options:
        _require(isinstance(options, dict), f"{path}.options", "expected an object")
        override = options.get("graver_complexity")
        degree = options.get("degree")
        for name, val in (("graver_complexity", override), ("degree", degree)):
            if val is not None:
                _require(isinstance(val, int) and val >= 1,
                         f"{path}.options.{name}", "must be a positive integer")
    return NFoldInstance(bim, n, tuple(b), tuple(l), tuple(u), objective,
                         graver_complexity_override=override, degree=degree)


def report_to_obj(report: SolveReport) -> dict:
    return {
        "status": report.status,
        "point": None if report.point is None else list(report.point),
        "objective_value": report.objective_value,
        "iterations": report.iterations,
        "aux_iterations": report.aux_iterations,
        "trace": [{"gamma": g, "step_norm": s, "objective": v}
                  for g, s, v in report.trace],
        "exact": report.exact,
    }


def report_from_obj(obj) -> SolveReport:
    trace = tuple((e["gamma"], e["step_norm"], e["objective"])
                  for e in obj["trace"])
    point = obj["point"]
    return SolveReport(status=obj["status"],
                       point=None if point is None else tuple(point),
                       objective_value=obj["objective_value"],
                       iterations=obj["iterations"],
                       trace=trace, exact=obj["exact"],
                       aux_iterations=obj["aux_iterations"])


def _cost_from_obj(entry, path: str):
    _require(isinstance(entry, dict), path, "expected an object")
    if "linear" in entry:
        w = entry["linear"]
        _require(isinstance(w, int), f"{path}.linear", "expected an integer slope")
        return ("linear", w)
    for key in ("breakpoints", "slopes", "intercepts"):
        _require(key in entry, path, f"missing field {key!r}")
    return ("piecewise",
            tuple(_int_list(entry["breakpoints"], f"{path}.breakpoints")),
            tuple(_int_list(entry["slopes"], f"{path}.slopes")),
            tuple(_int_list(entry["intercepts"], f"{path}.intercepts")))


def transportation_from_obj(obj, path: str = "transportation"
                            ) -> TransportationInstance:
    _require(isinstance(obj, dict), path, "expected an object")
    for key in ("commodities", "suppliers", "consumers", "supply", "demand",
                "capacity", "cost"):
        _require(key in obj, path, f"missing field {key!r}")
    l, m, n = obj["commodities"], obj["suppliers"], obj["consumers"]
    supply = tuple(tuple(_int_list(row, f"{path}.supply[{i}]"))
                   for i, row in enumerate(obj["supply"]))
    demand = tuple(tuple(_int_list(row, f"{path}.demand[{j}]"))
                   for j, row in enumerate(obj["demand"]))
    capacity = tuple(tuple(_int_list(row, f"{path}.capacity[{i}]"))
                     for i, row in enumerate(obj["capacity"]))
    cost_rows = []
    for i, row in enumerate(obj["cost"]):
        _require(isinstance(row, list), f"{path}.cost[{i}]", "expected a list")
        cost_rows.append(tuple(_cost_from_obj(e, f"{path}.cost[{i}][{j}]")
                               for j, e in enumerate(row)))
    return TransportationInstance(l, m, n, supply, demand, capacity,
                                  tuple(cost_rows))


def table_from_obj(obj, path: str = "table") -> TableInstance:
    _require(isinstance(obj, dict), path, "expected an object")
    for key in ("shape", "margins"):
        _require(key in obj, path, f"missing field {key!r}")
    shape = _int_list(obj["shape"], f"{path}.shape")
    _require(len(shape) == 3, f"{path}.shape", "expected [n, p, q]")
    margins = obj["margins"]
    _require(isinstance(margins, dict), f"{path}.margins", "expected an object")
    for key in ("vjk", "vik", "vij"):
        _require(key in margins, f"{path}.margins", f"missing field {key!r}")

    def grid(key):
        rows = margins[key]
        _require(isinstance(rows, list), f"{path}.margins.{key}", "expected a list")
        return tuple(tuple(_int_list(row, f"{path}.margins.{key}[{i}]"))
                     for i, row in enumerate(rows))

    n, p, q = shape
    return TableInstance(n, p, q, grid("vjk"), grid("vik"), grid("vij"))


def load_json(text: str, path_label: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise InputError(
            f"{path_label}: invalid JSON at line {err.lineno}, column {err.colno}: "
            f"{err.msg}") from err
