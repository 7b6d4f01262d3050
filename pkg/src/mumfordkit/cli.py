"""Command-line front end.

Data is read as JSON from ``--input`` (a path or an inline object) or stdin.
Machine output goes to stdout, diagnostics to stderr.  Exit status is 0 on
success, 2 on invalid input and 3 when a computation is refused.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence

from .delaunay import delaunay, voronoi_cell
from .errors import Refusal, ValidationError
from .matroid import Graph
from .monodromy import (
    graph_monodromy, is_maximal, monodromy_forms, monodromy_of_data, weight_filtration,
)
from .mumford import MumfordData, classify_singularities, is_K_trivial, load_data, shape_name, stratification
from .resolve import ResolutionPlan, monomial_base_change, resolve
from .svg import data_svg, emit_svg
from .theta import central_fiber_relations, parse_class, theta_expand

EXAMPLES = ("tate", "theta1", "theta3", "shifted-theta", "r10", "mon-sep")
FORMATS = ("json", "text", "svg")


def example_text(name: str) -> str:
    if name not in EXAMPLES:
        raise ValidationError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
    return resources.files("mumfordkit").joinpath("data", f"{name}.json").read_text()


def load_example(name: str) -> MumfordData:
    return load_data(example_text(name))


def _json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{what}: invalid JSON at column {exc.colno}: {exc.msg}") from exc


def _int_matrix(obj, what: str) -> list[list[int]]:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) and r for r in obj):
        raise ValidationError(f"{what} must be a nonempty list of nonempty rows")
    if len({len(r) for r in obj}) != 1:
        raise ValidationError(f"{what} is ragged")
    if not all(isinstance(a, int) and not isinstance(a, bool) for r in obj for a in r):
        raise ValidationError(f"{what} must have integer entries")
    return obj


def _index_list(text: str, what: str) -> list[int]:
    try:
        out = [int(a) for a in text.replace(" ", "").split(",") if a]
    except ValueError as exc:
        raise ValidationError(f"{what} must be a comma-separated list of integers") from exc
    if not out:
        raise ValidationError(f"{what} is empty")
    return out


@dataclass
class RunConfig:
    command: str
    input: str | None = None  # path or inline JSON; stdin when None
    format: str = "json"
    options: dict = field(default_factory=dict)
    deterministic: bool = True  # no randomness outside fixed seeds

    def validate(self) -> None:
        if self.format not in FORMATS:
            raise ValidationError(f"format must be one of {', '.join(FORMATS)}")
        if self.format == "svg" and self.command not in ("describe", "strata"):
            raise ValidationError("svg output is available for 'describe' and 'strata' only")
        for key in ("trunc", "weight", "degree", "N"):
            v = self.options.get(key)
            if v is not None and v < 0:
                raise ValidationError(f"--{key} must be nonnegative")
        if self.options.get("weight") == 0:
            raise ValidationError("--weight must be positive")


def _read_input(config: RunConfig, stdin) -> dict:
    src = config.input
    if src is None:
        text = stdin.read()
    elif src.lstrip().startswith("{"):
        text = src
    else:
        try:
            with open(src, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ValidationError(f"cannot read {src}: {exc.strerror}") from exc
    if not text.strip():
        raise ValidationError("no input data (pipe JSON on stdin or pass --input)")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


# ---------------------------------------------------------------------------
# commands; each returns (json object, text lines, svg or None)

def _describe(data: MumfordData, raw: dict, opts: dict):
    report = classify_singularities(data)
    ktriv = is_K_trivial(data)
    obj = {"name": data.name, "g": data.g, "k": data.k, "d": data.d,
           "quadratic_parts": [[list(map(str, r)) for r in B] for B in data.quadratic_parts()],
           "singularities": report.to_json(), "K_trivial": ktriv}
    text = [f"{data.name or 'data'}: g = {data.g}, k = {data.k}, d = {data.d}",
            f"classification: {report.classification}",
            f"smooth: {report.smooth}", f"strict: {report.strict}", f"K-trivial: {ktriv}"]
    text += [f"  stratum {{{','.join(str(j + 1) for j in J)}}}: {lab}" for J, lab in report.strata.items()]
    return obj, text, (data_svg(data) if data.g <= 2 else None)


def _strata(data: MumfordData, raw: dict, opts: dict):
    I = _index_list(opts["I"], "--I") if opts.get("I") else list(range(1, data.k + 1))
    if any(i < 1 or i > data.k for i in I):
        raise ValidationError(f"--I must list sections among 1..{data.k}")
    st = stratification(data, [i - 1 for i in I])
    obj = {"I": I, "summary": st.summary(), "components": list(st.components),
           "complex": st.complex.to_json()}
    svg = emit_svg(st.complex, f"stratum {','.join(map(str, I))}") if data.g <= 2 else None
    return obj, [st.summary()], svg


def _theta(data: MumfordData, raw: dict, opts: dict):
    if opts.get("cls") is None:
        raise ValidationError("--class is required")
    series = theta_expand(data, parse_class(opts["cls"], data.g), opts["weight"], opts["trunc"])
    return {"weight": series.weight, "truncation": series.trunc, "terms": series.to_json()}, series.format_lines(), None


def _relations(data: MumfordData, raw: dict, opts: dict):
    report = central_fiber_relations(data, opts["weight"], opts["degree"], opts["require_embedded"])
    text = [f"{len(report.monomials)} monomials, {len(report.relations)} relations"]
    text += [r.equation() for r in report.relations]
    return report.to_json(), text, None


def _form_option(opts: dict) -> list:
    if not opts.get("form"):
        raise ValidationError("--form is required")
    return _int_matrix(_json_arg(opts["form"], "--form"), "--form")


def _delaunay(opts: dict):
    D = delaunay(_form_option(opts))
    cells = D.cells
    obj = {"census": {str(k): v for k, v in D.census().items()},
           "maximal_cells": [[list(p) for p in c] for c in D.maximal_cells],
           "wall_normals": [list(n) for n in D.wall_normals()],
           "cells": {str(d): [[list(p) for p in c] for c in cs] for d, cs in cells.items()}}
    text = [f"cells by dimension: {D.census()}"]
    text += [f"  maximal cell {[list(p) for p in c]}" for c in D.maximal_cells]
    return obj, text, None


def _voronoi(opts: dict):
    V = voronoi_cell(_form_option(opts))
    obj = {"vertices": [[str(a) for a in v] for v in V.vertices],
           "relevant_vectors": [list(m) for m in V.relevant_vectors],
           "facets": V.facet_count, "window_radius": str(V.window_radius)}
    dim = len(V.vertices[0]) if V.vertices else 0
    obj["shape"] = shape_name(dim, len(V.vertices))
    text = [f"{obj['shape']}: {len(V.vertices)} vertices, {V.facet_count} facets"]
    text += ["  (" + ", ".join(str(a) for a in v) + ")" for v in V.vertices]
    return obj, text, None


def _matrix(raw: dict, opts: dict) -> list:
    if opts.get("matrix"):
        return _int_matrix(_json_arg(opts["matrix"], "--matrix"), "--matrix")
    if "base_change" in raw:
        return _int_matrix(raw["base_change"], "base_change")
    raise ValidationError("--matrix is required (or a 'base_change' entry in the data)")


def _basechange(data: MumfordData, raw: dict, opts: dict):
    new = monomial_base_change(data, _matrix(raw, opts))
    parts = [[list(map(str, r)) for r in B] for B in new.quadratic_parts()]
    return new.to_json(), [f"c{j + 1}: B = {B}" for j, B in enumerate(parts)], None


def _resolve(data: MumfordData, raw: dict, opts: dict):
    R = _matrix(raw, opts)
    plan_raw = raw.get("plan", {}) if isinstance(raw.get("plan"), dict) else {}
    N = opts.get("N") if opts.get("N") is not None else plan_raw.get("N")
    order = [j - 1 for j in _index_list(opts["order"], "--order")] if opts.get("order") else None
    plan = ResolutionPlan.default(R, N, order, opts.get("component_order") or "lex")
    res = resolve(data, R, plan)
    obj = res.to_json()
    if not opts.get("model"):
        del obj["model"]
    s1, s2 = obj["stage1"], obj["stage2"]
    text = [f"plan: N = {plan.N}, divisor order {obj['plan']['divisor_order']}",
            f"stage 1: {s1['classification']} (coherent: {s1['coherent']}, pattern problems: {len(s1['pattern_problems'])})",
            f"stage 2: {s2['classification']} (standard affine: {s2['standard_affine']})",
            f"dual complex: {obj['dual_complex']['census']}"]
    return obj, text, None


def _graph_option(opts: dict) -> Graph:
    g = _json_arg(opts["graph"], "--graph")
    if not isinstance(g, dict) or "vertices" not in g or "edges" not in g:
        raise ValidationError("--graph needs 'vertices' and 'edges'")
    return Graph(int(g["vertices"]), tuple(tuple(e) for e in g["edges"]))


def _weights(data: MumfordData | None, raw: dict, opts: dict):
    if opts.get("graph"):
        lat, Ns = graph_monodromy(_graph_option(opts))
    else:
        lat, Ns = monodromy_of_data(data)
    W = weight_filtration(Ns, seed=0)
    obj = {"rank": lat.rank, "filtration": W.to_json(), "maximal": is_maximal(Ns)}
    text = [f"graded ranks (gr-2, gr-1, gr0): {W.ranks()}", f"maximal: {obj['maximal']}"]
    if obj["maximal"]:
        forms = monodromy_forms(Ns, lat)
        obj["forms"] = forms.to_json()
        text += [f"  B{i + 1} = {[list(r) for r in B]}" for i, B in enumerate(forms.forms)]
        text.append(f"in closure of the positive cone: {forms.in_closure}")
    return obj, text, None


def run(config: RunConfig, stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    config.validate()
    opts = config.options
    if config.command == "example":
        stdout.write(example_text(opts["name"]))
        return 0
    if config.command == "delaunay":
        obj, text, svg = _delaunay(opts)
    elif config.command == "voronoi-cell":
        obj, text, svg = _voronoi(opts)
    elif config.command == "weights" and opts.get("graph"):
        obj, text, svg = _weights(None, {}, opts)
    else:
        raw = _read_input(config, stdin)
        data = MumfordData.from_json(raw)
        handler = {"describe": _describe, "strata": _strata, "theta": _theta, "relations": _relations,
                   "basechange": _basechange, "resolve": _resolve, "weights": _weights}[config.command]
        obj, text, svg = handler(data, raw, opts)
    if config.format == "json":
        stdout.write(json.dumps(obj, indent=2, default=str) + "\n")
    elif config.format == "text":
        stdout.write("\n".join(text) + "\n")
    else:
        if svg is None:
            raise ValidationError("svg output needs g <= 2")
        stdout.write(svg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="data file, or an inline JSON object (default: stdin)")
    common.add_argument("--format", choices=FORMATS, default="json")
    p = argparse.ArgumentParser(prog="mumfordkit", description="Mumford degenerations from PL data.")
    sub = p.add_subparsers(dest="command", required=True)
    ex = sub.add_parser("example", help="print a built-in data file")
    ex.add_argument("name", choices=EXAMPLES)
    sub.add_parser("describe", parents=[common], help="summary, singularities and K-triviality")
    s = sub.add_parser("strata", parents=[common], help="stratum of the central fiber")
    s.add_argument("--I", dest="I", help="sections, 1-based and comma-separated (default: all)")
    t = sub.add_parser("theta", parents=[common], help="truncated theta series")
    t.add_argument("--class", dest="cls", required=True, help="class such as 1/3 or 0,1/2")
    t.add_argument("--weight", type=int, default=1)
    t.add_argument("--trunc", type=int, default=3)
    r = sub.add_parser("relations", parents=[common], help="relations among theta functions mod u")
    r.add_argument("--weight", type=int, default=1)
    r.add_argument("--degree", type=int, default=2)
    r.add_argument("--require-embedded", action="store_true", help="refuse data with immersed faces")
    for name in ("delaunay", "voronoi-cell"):
        f = sub.add_parser(name, parents=[common])
        f.add_argument("--form", required=True, help="positive-definite form as JSON, e.g. [[2,1],[1,2]]")
    b = sub.add_parser("basechange", parents=[common], help="monomial base change")
    b.add_argument("--matrix", help="exponent matrix as JSON, one row per old parameter")
    rs = sub.add_parser("resolve", parents=[common], help="nearly nodal and semistable models")
    rs.add_argument("--matrix", help="exponent matrix as JSON")
    rs.add_argument("--N", dest="N", type=int, help="separation constant")
    rs.add_argument("--order", help="order of the new divisors, 1-based and comma-separated")
    rs.add_argument("--component-order", choices=("lex", "revlex"))
    rs.add_argument("--model", action="store_true", help="include the stage-one data in the output")
    w = sub.add_parser("weights", parents=[common], help="weight filtration and monodromy forms")
    w.add_argument("--graph", help='graph as JSON, e.g. {"vertices": 2, "edges": [[0,1],[0,1]]}')
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    opts = {k: v for k, v in vars(ns).items() if k not in ("command", "input", "format")}
    return RunConfig(ns.command, getattr(ns, "input", None), getattr(ns, "format", "json"), opts)


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        return run(config_from_args(ns))
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Refusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
