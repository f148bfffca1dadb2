"""JSON plan configs (schema v1) and certificate files.

Every number is a decimal string; complex numbers are ``{"re": ..., "im": ...}``.
Emission uses enough digits to round-trip the binary values exactly at the
plan's precision, so parse(emit(plan)) == plan.
"""

from __future__ import annotations

import json
from importlib.metadata import PackageNotFoundError, version

import jsonschema
import mpmath
from mpmath import mpc, mpf

from .adversary import (
    AdversaryFunction,
    AdversaryPlan,
    ExplicitEpsilon,
    GeometricEpsilon,
    LevelSpec,
    SearchSettings,
    Tolerances,
)
from .errors import PlanError
from .numkernel import Poly, Precision, Series, format_complex, format_real, parse_complex, parse_real
from .pade import NodeLevel
from .search import CertificateBundle, PoleCertificate

try:
    TOOL_VERSION = version("artifact")
except PackageNotFoundError:  # pragma: no cover - running from a source tree
    TOOL_VERSION = "0.1.0"

_DEC = {"type": "string", "pattern": r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$"}
_COMPLEX = {
    "type": "object",
    "properties": {"re": _DEC, "im": _DEC},
    "required": ["re", "im"],
    "additionalProperties": False,
}

PLAN_SCHEMA = {
    "type": "object",
    "properties": {
        "v": {"const": 1},
        "precision": {"type": "integer", "minimum": 64},
        "P": {"type": "array", "items": _COMPLEX},
        "epsilon": {
            "oneOf": [
                {
                    "type": "object",
                    "properties": {
                        "geometric": {
                            "type": "object",
                            "properties": {"a": _DEC, "ratio": _DEC},
                            "required": ["a", "ratio"],
                            "additionalProperties": False,
                        }
                    },
                    "required": ["geometric"],
                    "additionalProperties": False,
                },
                {
                    "type": "object",
                    "properties": {"explicit": {"type": "array", "items": _DEC, "minItems": 1}},
                    "required": ["explicit"],
                    "additionalProperties": False,
                },
            ]
        },
        "levels": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "n": {"type": "integer", "minimum": 1},
                    "nodes": {
                        "oneOf": [
                            {"type": "array", "items": _COMPLEX, "minItems": 2},
                            {
                                "type": "object",
                                "properties": {
                                    "roots_of_unity": {
                                        "type": "object",
                                        "properties": {"radius": _DEC, "rotation": _DEC},
                                        "required": ["radius", "rotation"],
                                        "additionalProperties": False,
                                    }
                                },
                                "required": ["roots_of_unity"],
                                "additionalProperties": False,
                            },
                        ]
                    },
                    "alpha": _COMPLEX,
                    "target": _COMPLEX,
                },
                "required": ["n", "nodes", "alpha"],
                "additionalProperties": False,
            },
        },
        "search": {
            "type": "object",
            "properties": {
                "shrink": _DEC,
                "max_retries": {"type": "integer", "minimum": 0},
                "max_precision_doublings": {"type": "integer", "minimum": 0},
                "max_alpha_perturbations": {"type": "integer", "minimum": 0},
            },
            "additionalProperties": False,
        },
        "tolerances": {
            "type": "object",
            "properties": {"cert_tol": _DEC, "contact_tol": _DEC, "genericity_tol": _DEC},
            "additionalProperties": False,
        },
    },
    "required": ["v", "epsilon", "levels"],
    "additionalProperties": False,
}


def _nodes_from_json(spec, n: int, ctx: Precision) -> tuple:
    if isinstance(spec, list):
        if len(spec) != n + 1:
            raise PlanError(f"level with n = {n} needs {n + 1} nodes, got {len(spec)}")
        return tuple(parse_complex(x, ctx) for x in spec)
    ru = spec["roots_of_unity"]
    with ctx.scope():
        radius = parse_real(ru["radius"], ctx)
        rot = parse_real(ru["rotation"], ctx)
        return tuple(radius * mpmath.expjpi(2 * (m + rot) / (n + 1)) for m in range(n + 1))


def plan_from_json(doc: dict, precision: int | None = None) -> AdversaryPlan:
    """Validate a schema-v1 document and build the plan.

    ``precision`` overrides the document's precision (numbers are parsed at it).
    """
    try:
        jsonschema.validate(doc, PLAN_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise PlanError(f"config schema violation: {exc.message}") from None
    bits = precision if precision is not None else doc.get("precision", 1024)
    ctx = Precision(bits)
    with ctx.scope():
        P = Poly(tuple(parse_complex(c, ctx) for c in doc.get("P", [])))
        eps_doc = doc["epsilon"]
        if "geometric" in eps_doc:
            g = eps_doc["geometric"]
            epsilon = GeometricEpsilon(parse_real(g["a"], ctx), parse_real(g["ratio"], ctx))
        else:
            epsilon = ExplicitEpsilon(tuple(parse_real(x, ctx) for x in eps_doc["explicit"]))
        levels = []
        for lv in doc["levels"]:
            try:
                level = NodeLevel(_nodes_from_json(lv["nodes"], lv["n"], ctx))
            except ValueError as exc:
                raise PlanError(str(exc)) from None
            alpha = parse_complex(lv["alpha"], ctx)
            target = parse_complex(lv["target"], ctx) if "target" in lv else None
            levels.append(LevelSpec(level, alpha, target))
        s = doc.get("search", {})
        defaults = SearchSettings()
        search = SearchSettings(
            shrink=parse_real(s["shrink"], ctx) if "shrink" in s else defaults.shrink,
            max_retries=s.get("max_retries", defaults.max_retries),
            max_precision_doublings=s.get("max_precision_doublings", defaults.max_precision_doublings),
            max_alpha_perturbations=s.get("max_alpha_perturbations", defaults.max_alpha_perturbations),
        )
        if not 0 < search.shrink < 1:
            raise PlanError("search.shrink must lie in (0, 1)")
        t = doc.get("tolerances", {})
        tolerances = Tolerances(**{k: parse_real(v, ctx) for k, v in t.items()})
        try:
            return AdversaryPlan(P, tuple(levels), epsilon, bits, search, tolerances)
        except PlanError:
            raise
        except Exception as exc:
            raise PlanError(str(exc)) from None


def plan_to_json(plan: AdversaryPlan) -> dict:
    ctx = plan.ctx
    eps = plan.epsilon
    if isinstance(eps, GeometricEpsilon):
        eps_doc = {"geometric": {"a": format_real(eps.a, ctx), "ratio": format_real(eps.ratio, ctx)}}
    else:
        eps_doc = {"explicit": [format_real(x, ctx) for x in eps.values]}
    levels = []
    for lv in plan.levels:
        entry = {
            "n": lv.n,
            "nodes": [format_complex(x, ctx) for x in lv.level.nodes],
            "alpha": format_complex(lv.alpha, ctx),
        }
        if lv.target != lv.alpha:
            entry["target"] = format_complex(lv.target, ctx)
        levels.append(entry)
    s = plan.search
    doc = {
        "v": 1,
        "precision": plan.precision,
        "P": [format_complex(c, ctx) for c in plan.P.coeffs],
        "epsilon": eps_doc,
        "levels": levels,
        "search": {
            "shrink": format_real(s.shrink, ctx),
            "max_retries": s.max_retries,
            "max_precision_doublings": s.max_precision_doublings,
            "max_alpha_perturbations": s.max_alpha_perturbations,
        },
    }
    tol = {k: format_real(getattr(plan.tolerances, k), ctx)
           for k in ("cert_tol", "contact_tol", "genericity_tol") if getattr(plan.tolerances, k) is not None}
    if tol:
        doc["tolerances"] = tol
    return doc


def bundle_to_json(bundle: CertificateBundle) -> dict:
    plan = bundle.plan
    ctx = plan.ctx
    levels = []
    for c in bundle.certs:
        levels.append({
            "k": c.k,
            "n": c.n,
            "mu": format_real(c.mu_k, ctx),
            "target": format_complex(c.target, ctx),
            "alpha": format_complex(c.alpha, ctx),
            "pi": None if c.pi_k is None else format_complex(c.pi_k, ctx),
            "dist": format_real(c.dist_to_alpha, ctx),
            "q_residual": format_real(c.q_residual, ctx),
            "q_deriv": format_real(c.q_deriv_mod, ctx),
            "p_mod": format_real(c.p_at_pi_mod, ctx),
            "p_floor": format_real(c.p_floor, ctx),
            "contact_residual": format_real(c.contact_residual, ctx),
            "contact_pass": c.contact_pass,
            "pass": c.passed,
            "failures": list(c.failures),
        })
    return {
        "format": "barypade-certificate",
        "tool_version": TOOL_VERSION,
        "precision": plan.precision,
        "plan": plan_to_json(plan),
        "plan_sha256": bundle.plan_digest,
        "levels": levels,
        "coefficients": [format_complex(c, ctx) for c in bundle.function.coeffs.coeffs],
        "global_coefficient_check": bundle.global_coefficient_check,
        "all_pass": bundle.all_pass,
        "search": {
            "retries": bundle.retries,
            "precision_doublings": bundle.doublings,
            "alpha_perturbations": [
                {"k": k, "attempt": a, "alpha": format_complex(alpha, ctx)} for k, a, alpha in bundle.perturbations
            ],
        },
    }


def bundle_from_json(doc: dict, precision: int | None = None) -> CertificateBundle:
    """Rebuild a bundle from a certificate file (stored verdicts are kept but
    verification never trusts them)."""
    try:
        bits = precision if precision is not None else int(doc["precision"])
        plan = plan_from_json(doc["plan"], precision=bits)
        ctx = plan.ctx
        coeffs = Series(tuple(parse_complex(c, ctx) for c in doc["coefficients"]))
        certs = []
        for lv in doc["levels"]:
            pi = None if lv["pi"] is None else parse_complex(lv["pi"], ctx)
            certs.append(PoleCertificate(
                k=int(lv["k"]),
                n=int(lv["n"]),
                mu_k=parse_real(lv["mu"], ctx),
                target=parse_complex(lv["target"], ctx),
                alpha=parse_complex(lv["alpha"], ctx),
                pi_k=pi,
                dist_to_alpha=parse_real(lv["dist"], ctx),
                q_residual=parse_real(lv["q_residual"], ctx),
                q_deriv_mod=parse_real(lv["q_deriv"], ctx),
                p_at_pi_mod=parse_real(lv["p_mod"], ctx),
                p_floor=parse_real(lv["p_floor"], ctx),
                contact_pass=bool(lv["contact_pass"]),
                contact_residual=parse_real(lv["contact_residual"], ctx),
                passed=bool(lv["pass"]),
                failures=tuple(lv.get("failures", ())),
            ))
        mu = tuple(c.mu_k for c in certs)
        search = doc.get("search", {})
        perturbations = tuple(
            (int(p["k"]), int(p["attempt"]), parse_complex(p["alpha"], ctx))
            for p in search.get("alpha_perturbations", ())
        )
        return CertificateBundle(plan, AdversaryFunction(coeffs, mu), tuple(certs),
                                 bool(doc["global_coefficient_check"]), perturbations,
                                 int(search.get("retries", 0)), int(search.get("precision_doublings", 0)))
    except PlanError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise PlanError(f"malformed certificate: {exc!r}") from None


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def report_to_json(report: dict, ctx: Precision) -> dict:
    """Format the mpmath numbers inside a verification report as strings."""

    def conv(x):
        if isinstance(x, dict):
            return {k: conv(v) for k, v in x.items()}
        if isinstance(x, list):
            return [conv(v) for v in x]
        if isinstance(x, mpf):
            return format_real(x, ctx)
        if isinstance(x, mpc):
            return format_complex(x, ctx)
        return x

    return conv(report)
