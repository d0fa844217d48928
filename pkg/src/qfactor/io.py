"""JSON (de)serialization for specs, point sets, and reports."""
from __future__ import annotations

import json

from .certify import Certificate, ThreefoldSpec
from .polyform import HomogeneousForm
from .pointgeom import PointSet
from .scalar import FieldSpec


def parse_field(obj: dict) -> FieldSpec:
    return FieldSpec.from_json(obj)


def parse_form(obj: dict, field: FieldSpec) -> HomogeneousForm:
    return HomogeneousForm.from_json(obj, field)


def parse_points(obj: list, field: FieldSpec, ambient=None) -> PointSet:
    return PointSet.from_json(obj, field, ambient)


def spec_to_json(spec: ThreefoldSpec) -> dict:
    field = spec.f.field if spec.f is not None else spec.g.field
    out = {
        "field": field.to_json(),
        "variant": spec.variant,
    }
    if spec.f is not None:
        out["f"] = spec.f.to_json()
    if spec.g is not None:
        out["g"] = spec.g.to_json()
    if spec.variant == "double_cover":
        out["double_solid"] = spec.double_solid
    if spec.smooth_attested:
        out["smooth_attested"] = True
    if spec.nodes is not None:
        out["nodes"] = spec.nodes.to_json()
        out["node_backend"] = "given"
    return out


def spec_from_json(obj: dict) -> ThreefoldSpec:
    field = parse_field(obj["field"])
    f = parse_form(obj["f"], field) if "f" in obj else None
    g = parse_form(obj["g"], field) if "g" in obj else None
    nodes = None
    if obj.get("nodes"):
        nodes = parse_points(obj["nodes"], field)
    variant = obj["variant"]
    if variant == "hypersurface":
        spec = ThreefoldSpec.hypersurface(f, nodes)
    elif variant == "complete_intersection":
        spec = ThreefoldSpec.complete_intersection(
            f, g, nodes, smooth_attested=obj.get("smooth_attested", False)
        )
    elif variant == "double_cover":
        spec = ThreefoldSpec.double_cover(
            f, g, nodes, smooth_attested=obj.get("smooth_attested", False),
            double_solid=obj.get("double_solid", False),
        )
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return spec


def render_report(payload: dict, fmt: str = "json") -> str:
    """Byte-stable rendering: sorted keys, fixed separators."""
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    lines = []

    def walk(obj, indent=0):
        pad = "  " * indent
        if isinstance(obj, dict):
            for k in sorted(obj):
                v = obj[k]
                if isinstance(v, (dict, list)):
                    lines.append(f"{pad}{k}:")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}{k}: {v}")
        elif isinstance(obj, list):
            for v in obj:
                if isinstance(v, (dict, list)):
                    lines.append(f"{pad}-")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}- {v}")

    walk(payload)
    return "\n".join(lines) + "\n"


def certificate_payload(cert: Certificate, extra: dict | None = None) -> dict:
    out = cert.to_json()
    if extra:
        out.update(extra)
    return out
