"""Command-line front end.

Exit codes for `certify`: 0 QFactorial, 10 NotQFactorial, 20 Inconclusive,
30 HypothesisViolated, 1 parse/contract error.  Identical (input, seed,
backend) triples produce byte-identical JSON reports.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__, io, models
from .certify import (
    ThreefoldSpec,
    certify_complete_intersection,
    certify_double_cover,
    certify_hypersurface,
)
from .conditions import defect, separating_form
from .errors import HypothesisViolated, QFactorError
from .planar import (
    StarParams,
    bese_hypothesis,
    cluster_partition,
    davis_geramita_hypothesis,
    max_points_on_curve,
    separating_curve,
    star_property,
)
from .pointgeom import (
    find_nodes_enumerate,
    find_nodes_numeric,
    find_nodes_structured_plane_family,
)

DEFAULT_SEED = 0xB4


def _common(parser):
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--backend", default=None,
                        help="FieldSpec override as JSON, e.g. '{\"field\":\"prime\",\"p\":31}'")
    parser.add_argument("--budget-enum", type=int, default=2_000_000)
    parser.add_argument("--budget-subsets", type=int, default=200_000)
    parser.add_argument("--format", choices=("json", "text"), default="json")


def build_parser():
    ap = argparse.ArgumentParser(prog="qfactor")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("nodes", help="find singular points with a solver backend")
    p.add_argument("input")
    _common(p)

    p = sub.add_parser("defect", help="defect of a point set at a degree")
    p.add_argument("input")
    p.add_argument("--degree", type=int, required=True)
    _common(p)

    p = sub.add_parser("separate", help="separating form for one point of a set")
    p.add_argument("input")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--point", type=int, required=True, help="index into the point list")
    _common(p)

    p = sub.add_parser("planar", help="plane-curve incidence analysis on P^2")
    p.add_argument("input")
    p.add_argument("--mode", choices=("star", "bese", "dg", "partition", "separate"),
                   required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--t", type=int, default=None)
    p.add_argument("--point", type=int, default=0)
    _common(p)

    p = sub.add_parser("certify", help="certify Q-factoriality of a threefold spec")
    p.add_argument("input")
    p.add_argument("--route", choices=("auto", "bound", "rank", "constructive"),
                   default="auto")
    p.add_argument("--trust-nodes", action="store_true")
    _common(p)

    p = sub.add_parser("examples", help="emit a named example spec")
    p.add_argument("name", nargs="?")
    p.add_argument("--list", action="store_true")
    _common(p)
    return ap


def _load(path):
    with open(path) as fh:
        return json.load(fh)


def _field_of(data, args):
    if args.backend:
        return io.parse_field(json.loads(args.backend))
    return io.parse_field(data["field"])


def _emit(args, payload, code=0):
    payload = {"tool": "qfactor", "version": __version__, "seed": args.seed, **payload}
    sys.stdout.write(io.render_report(payload, args.format))
    return code


def _cmd_nodes(args):
    data = _load(args.input)
    field = _field_of(data, args)
    backend = data.get("node_backend", "given")
    if backend == "given":
        pts = io.parse_points(data["nodes"], field)
    elif backend == "enumerate":
        forms = [io.parse_form(f, field) for f in data["forms"]]
        pts = find_nodes_enumerate(forms, data["ambient"], args.budget_enum)
    elif backend == "numeric":
        f = io.parse_form(data["f"], field)
        pts = find_nodes_numeric(f, seed=args.seed)
    elif backend == "plane_family":
        f = io.parse_form(data["plane_f"], field)
        g = io.parse_form(data["plane_g"], field)
        pts = find_nodes_structured_plane_family(f, g)
    else:
        raise ValueError(f"unknown node backend {backend!r}")
    return _emit(args, {"command": "nodes", "backend": backend,
                        "count": len(pts), "field": field.to_json(),
                        "points": pts.to_json()})


def _cmd_defect(args):
    data = _load(args.input)
    field = _field_of(data, args)
    pts = io.parse_points(data["points"] if "points" in data else data["nodes"], field)
    rep = defect(pts, args.degree)
    return _emit(args, {"command": "defect", "field": field.to_json(),
                        **rep.to_json()})


def _cmd_separate(args):
    data = _load(args.input)
    field = _field_of(data, args)
    pts = io.parse_points(data["points"] if "points" in data else data["nodes"], field)
    P = pts[args.point]
    form = separating_form(pts, P, args.degree)
    payload = {"command": "separate", "degree": args.degree, "point": args.point,
               "field": field.to_json(),
               "separator": form.to_json() if form is not None else None,
               "separable": form is not None}
    return _emit(args, payload)


def _cmd_planar(args):
    data = _load(args.input)
    field = _field_of(data, args)
    pts = io.parse_points(data["points"], field, ambient=2)
    if args.mode == "star":
        ok, rep = star_property(pts, StarParams(m=args.m), args.budget_subsets)
        payload = {"star": ok, "per_degree": rep}
    elif args.mode == "bese":
        ok, fail = bese_hypothesis(pts, args.d, args.budget_subsets)
        payload = {"hypothesis": ok, "failing": fail}
    elif args.mode == "dg":
        ok, fail = davis_geramita_hypothesis(pts, args.d, args.budget_subsets)
        payload = {"hypothesis": ok, "failing": fail}
    elif args.mode == "partition":
        part = cluster_partition(pts, StarParams(m=args.m), budget=args.budget_subsets)
        payload = {
            "clusters": [
                {"degree": c.degree, "size": len(c.members),
                 "members": list(c.member_indices)}
                for c in part.clusters
            ],
            "residual": list(part.residual_indices),
        }
    else:  # separate
        form = separating_curve(pts, pts[args.point], args.d, args.budget_subsets)
        payload = {"separator": form.to_json(), "point": args.point}
    return _emit(args, {"command": "planar", "mode": args.mode,
                        "field": field.to_json(), **payload})


def _cmd_certify(args):
    data = _load(args.input)
    spec = io.spec_from_json(data)
    kw = dict(route=args.route, trust_nodes=args.trust_nodes)
    if spec.variant == "hypersurface":
        cert = certify_hypersurface(spec, **kw)
    elif spec.variant == "complete_intersection":
        cert = certify_complete_intersection(
            spec, seed=args.seed, budget_subsets=args.budget_subsets, **kw
        )
    else:
        cert = certify_double_cover(
            spec, seed=args.seed, budget_subsets=args.budget_subsets, **kw
        )
    payload = io.certificate_payload(cert, {"command": "certify"})
    return _emit(args, payload, cert.exit_code())


def _cmd_examples(args):
    if args.list or not args.name:
        listing = []
        for name, ctor in sorted(models.ALL_EXAMPLES.items()):
            if name in ("burkhardt", "barth"):
                ex = ctor()
                listing.append({"name": name, "expected": ex.expected})
            else:
                listing.append({"name": name})
        return _emit(args, {"command": "examples", "available": listing})
    ctor = models.ALL_EXAMPLES.get(args.name)
    if ctor is None:
        raise ValueError(f"unknown example {args.name!r}")
    ex = ctor()
    payload = {"command": "examples", "name": ex.name, "expected": ex.expected,
               "spec": io.spec_to_json(ex.spec)}
    return _emit(args, payload)


_DISPATCH = {
    "nodes": _cmd_nodes,
    "defect": _cmd_defect,
    "separate": _cmd_separate,
    "planar": _cmd_planar,
    "certify": _cmd_certify,
    "examples": _cmd_examples,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except HypothesisViolated as e:
        sys.stdout.write(io.render_report(
            {"tool": "qfactor", "version": __version__, "seed": args.seed,
             "error": "HypothesisViolated", "condition": e.condition,
             "detail": e.detail}, args.format))
        return 30
    except (QFactorError, ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        sys.stdout.write(io.render_report(
            {"tool": "qfactor", "version": __version__,
             "error": type(e).__name__, "detail": str(e)}, "json"))
        return 1


if __name__ == "__main__":
    sys.exit(main())
