"""Choose the block scales mu_k and certify the resulting poles.

The search starts every mu_k at its ceiling tau_{k-1}. When level k fails,
the later scales mu_h (h > k) shrink geometrically: they only enter level k
through the tail matrix S, whose entries shrink with them, so earlier
successes are never undone. Residuals stuck at the precision floor trigger
one restart at doubled precision.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, replace

import mpmath
from mpmath import mpc, mpf

from .adversary import (
    AdversaryFunction,
    AdversaryPlan,
    build_coefficients,
    c_part,
    ensure_generic,
    plan_level_data,
    tau,
)
from .errors import NoPole, SearchExhausted
from .pade import approximant, contact_check, p_eval, pole_near, q_eval

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PoleCertificate:
    k: int
    n: int
    mu_k: mpf
    target: mpc
    alpha: mpc
    pi_k: mpc | None
    dist_to_alpha: mpf
    q_residual: mpf
    q_deriv_mod: mpf
    p_at_pi_mod: mpf
    p_floor: mpf
    contact_pass: bool
    contact_residual: mpf
    passed: bool
    failures: tuple = ()


@dataclass(frozen=True)
class CertificateBundle:
    plan: AdversaryPlan
    function: AdversaryFunction
    certs: tuple
    global_coefficient_check: bool
    perturbations: tuple = ()
    retries: int = 0
    doublings: int = 0

    @property
    def all_pass(self) -> bool:
        return self.global_coefficient_check and all(c.passed for c in self.certs)

    @property
    def precision(self) -> int:
        return self.plan.precision

    @property
    def plan_digest(self) -> str:
        from .config import plan_to_json

        blob = json.dumps(plan_to_json(self.plan), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def level_checks(plan: AdversaryPlan, coeffs, k: int, pi=None) -> PoleCertificate:
    """Approximant of the full series at level k, its pole near alpha_k and the
    evidence that the pole is genuine. With ``pi`` given, the stored pole is
    checked as is instead of being searched for."""
    ctx = plan.ctx
    lv = plan.levels[k]
    with ctx.scope():
        cert_tol = plan.tolerances.cert(ctx)
        r = approximant(coeffs, lv.level, ctx)
        contact = contact_check(coeffs, r, ctx, tol=plan.tolerances.contact(ctx))
        failures = []
        if pi is None:
            try:
                pi = pole_near(r, lv.alpha, cert_tol, ctx).pole
            except NoPole:
                pi = None
        if pi is None:
            return PoleCertificate(
                k, lv.n, mpf(0), lv.target, lv.alpha, None, mpmath.inf, mpmath.inf, mpf(0),
                mpf(0), mpf(0), contact.passed, contact.max_rel_residual, False, ("no_pole",),
            )
        pi = mpc(pi)
        q, dq = q_eval(r, pi, ctx)
        p = p_eval(r, pi, ctx)
        node_dist = min(abs(pi - x) for x in r.nodes)
        scale = max(abs(w * f) for w, f in zip(r.weights, r.values))
        p_floor = ctx.quarter * scale / node_dist
        dist = abs(pi - lv.target)
        if not dist <= plan.eps(lv.n):
            failures.append("distance")
        if not abs(q) <= cert_tol:
            failures.append("q_residual")
        if not abs(p) >= p_floor:
            failures.append("p_floor")
        if not abs(dq) >= p_floor:
            failures.append("q_deriv_floor")
        if not contact.passed:
            failures.append("contact")
        return PoleCertificate(
            k=k,
            n=lv.n,
            mu_k=mpf(0),
            target=lv.target,
            alpha=lv.alpha,
            pi_k=pi,
            dist_to_alpha=dist,
            q_residual=abs(q),
            q_deriv_mod=abs(dq),
            p_at_pi_mod=abs(p),
            p_floor=p_floor,
            contact_pass=contact.passed,
            contact_residual=contact.max_rel_residual,
            passed=not failures,
            failures=tuple(failures),
        )


def coefficient_violations(plan: AdversaryPlan, coeffs) -> list[str]:
    """Item (i): c_m = 0 below n_0 and between blocks, |c_m| <= eps_m from n_0 on."""
    with plan.ctx.scope():
        c = c_part(plan, coeffs)
        if len(c) != plan.truncation + 1:
            return [f"expected {plan.truncation + 1} coefficients, found {len(c)}"]
        inside = set()
        for lv in plan.levels:
            inside.update(range(lv.n, 2 * lv.n + 1))
        bad = []
        for m, cm in enumerate(c):
            if m not in inside and cm != 0:
                bad.append(f"c_{m} must vanish")
            elif m >= plan.n(0) and not abs(cm) <= plan.eps(m):
                bad.append(f"|c_{m}| exceeds eps_{m}")
        return bad


def _certify_all(plan: AdversaryPlan, mu) -> tuple[AdversaryFunction, list]:
    fn = build_coefficients(plan, mu)
    fn = replace(fn, per_level=tuple(plan_level_data(plan, k) for k in range(plan.K + 1)))
    certs = [replace(level_checks(plan, fn.coeffs, k), mu_k=fn.mu[k]) for k in range(plan.K + 1)]
    return fn, certs


def search_mu(plan: AdversaryPlan) -> CertificateBundle:
    """Pick mu_0..mu_K so that every level's approximant has a certified pole
    within eps_{n_k} of its target. Raises SearchExhausted with the last
    bundle attached when retries and precision doublings run out."""
    settings = plan.search
    original = plan
    doublings = 0
    retries = 0
    while True:
        plan, perturbations = ensure_generic(original.with_precision(original.precision * 2 ** doublings))
        ctx = plan.ctx
        with ctx.scope():
            mu = [tau(plan, k - 1) for k in range(plan.K + 1)]
            while True:
                fn, certs = _certify_all(plan, mu)
                failing = [c for c in certs if not c.passed]
                global_ok = not coefficient_violations(plan, fn.coeffs)
                bundle = CertificateBundle(plan, fn, tuple(certs), global_ok, tuple(perturbations), retries, doublings)
                if not failing and global_ok:
                    return bundle
                first = failing[0] if failing else None
                log.info("attempt %d at %d bits: level %s fails %s", retries, ctx.bits,
                         first.k if first else "-", first.failures if first else "coefficients")
                numerical = first is not None and set(first.failures) & {"contact", "q_residual"}
                if numerical and doublings < settings.max_precision_doublings:
                    doublings += 1
                    break
                if retries >= settings.max_retries or first is None:
                    raise SearchExhausted(
                        f"no admissible mu after {retries} retries and {doublings} precision doublings", bundle
                    )
                retries += 1
                # p or q' vanishing at the pole is a property of mu_k itself
                degenerate = set(first.failures) & {"p_floor", "q_deriv_floor"}
                for h in range(first.k if degenerate else first.k + 1, plan.K + 1):
                    mu[h] = mu[h] * settings.shrink


def verify_certificate(bundle: CertificateBundle) -> dict:
    """Re-derive every claim from the coefficients, plan and stored poles alone."""
    plan = bundle.plan
    coeffs = bundle.function.coeffs
    ctx = plan.ctx
    with ctx.scope():
        violations = coefficient_violations(plan, coeffs)
        levels = []
        for stored in bundle.certs:
            k = stored.k
            if stored.pi_k is None:
                levels.append({"k": k, "pass": False, "item_ii": {"pass": False}, "item_iii": {"pass": False},
                               "failures": ["no_pole"]})
                continue
            c = level_checks(plan, coeffs, k, pi=stored.pi_k)
            item_ii = "distance" not in c.failures
            item_iii = not (set(c.failures) - {"distance"})
            levels.append({
                "k": k,
                "pass": c.passed,
                "item_ii": {"pass": item_ii, "dist": c.dist_to_alpha, "eps": plan.eps(c.n)},
                "item_iii": {
                    "pass": item_iii,
                    "q_residual": c.q_residual,
                    "q_deriv": c.q_deriv_mod,
                    "p_mod": c.p_at_pi_mod,
                    "p_floor": c.p_floor,
                    "contact_pass": c.contact_pass,
                    "contact_residual": c.contact_residual,
                },
                "failures": list(c.failures),
            })
        item_i = {"pass": not violations, "violations": violations}
        return {
            "item_i": item_i,
            "levels": levels,
            "all_pass": item_i["pass"] and all(l["pass"] for l in levels),
        }
