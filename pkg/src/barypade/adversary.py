"""Construction of entire functions whose approximants have poles near chosen targets.

The function is f(z) = P(z) + sum_k mu_k z^{n_k} d_k(z), where d_k holds the
monomial coefficients of the polynomial interpolating 1/(alpha_k - z) at the
level-k nodes. With that choice the first order condition at level k reads
mu_k * sum_j w_j / (alpha_k - t_j) = (contribution of later blocks), so q
vanishes at alpha_k up to a perturbation the later mu control.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import mpmath
from mpmath import mpc, mpf

from .errors import AlphaOnNode, BlockOverlap, DegenerateSystem, PlanError
from .linalg import Matrix, check_distinct, factorial, norm_one, nullspace, vandermonde_solve
from .numkernel import DEFAULT, Poly, Precision, Series, as_mpc
from .pade import NodeLevel, build_system, normalize_weights


@dataclass(frozen=True)
class GeometricEpsilon:
    """eps_m = a * ratio**m."""

    a: mpf
    ratio: mpf

    def __call__(self, m: int) -> mpf:
        return self.a * self.ratio ** m

    def check(self, count: int) -> None:
        if not (self.a > 0 and self.ratio > 0):
            raise PlanError("geometric epsilon needs a > 0 and ratio > 0")


@dataclass(frozen=True)
class ExplicitEpsilon:
    values: tuple

    def __call__(self, m: int) -> mpf:
        return self.values[m]

    def check(self, count: int) -> None:
        if len(self.values) < count:
            raise PlanError(f"explicit epsilon list needs {count} entries, has {len(self.values)}")
        if any(not v > 0 for v in self.values):
            raise PlanError("every epsilon_m must be positive")


@dataclass(frozen=True)
class LevelSpec:
    """One level of the plan: nodes, the alpha used in the construction and
    the user's target (they differ only after a genericity perturbation)."""

    level: NodeLevel
    alpha: mpc
    target: mpc | None = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_mpc(self.alpha))
        object.__setattr__(self, "target", as_mpc(self.alpha if self.target is None else self.target))

    @property
    def n(self) -> int:
        return self.level.n


@dataclass(frozen=True)
class SearchSettings:
    shrink: mpf = mpf(1) / 16
    max_retries: int = 12
    max_precision_doublings: int = 1
    max_alpha_perturbations: int = 8


@dataclass(frozen=True)
class Tolerances:
    """Optional overrides; ``None`` means derive from the working precision."""

    cert_tol: mpf | None = None
    contact_tol: mpf | None = None
    genericity_tol: mpf | None = None

    def cert(self, ctx: Precision) -> mpf:
        return ctx.cert_tol if self.cert_tol is None else self.cert_tol

    def contact(self, ctx: Precision) -> mpf:
        return ctx.contact_tol if self.contact_tol is None else self.contact_tol

    def genericity(self, ctx: Precision, alpha) -> mpf:
        with ctx.scope():
            return ctx.quarter * (1 + abs(alpha)) if self.genericity_tol is None else self.genericity_tol


@dataclass(frozen=True)
class AdversaryPlan:
    P: Poly
    levels: tuple
    epsilon: GeometricEpsilon | ExplicitEpsilon
    precision: int = 1024
    search: SearchSettings = field(default_factory=SearchSettings)
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        if not self.levels:
            raise PlanError("a plan needs at least one level")
        ns = [lv.n for lv in self.levels]
        for k in range(len(ns) - 1):
            if not ns[k + 1] > 2 * ns[k]:
                raise PlanError(f"degrees must satisfy n_(k+1) > 2 n_k; got n_{k}={ns[k]}, n_{k + 1}={ns[k + 1]}")
        p_deg = max((m for m, c in enumerate(self.P.coeffs) if c != 0), default=-1)
        if p_deg >= ns[0]:
            raise PlanError(f"degree of P ({p_deg}) must be below n_0 = {ns[0]}")
        self.epsilon.check(2 * ns[-1] + 1)
        for name in ("cert_tol", "contact_tol", "genericity_tol"):
            v = getattr(self.tolerances, name)
            if v is not None and not v > 0:
                raise PlanError(f"tolerances.{name} must be positive")
        ctx = self.ctx
        with ctx.scope():
            all_nodes = [x for lv in self.levels for x in lv.level.nodes]
            for lv in self.levels:
                lv.level.validate(ctx)
            for k, lv in enumerate(self.levels):
                for a in {lv.alpha, lv.target}:
                    sep = ctx.separation(all_nodes + [a])
                    if min(abs(a - x) for x in all_nodes) <= sep:
                        raise PlanError(f"alpha_{k} lies on an interpolation node")

    @property
    def ctx(self) -> Precision:
        return Precision(self.precision)

    @property
    def K(self) -> int:
        return len(self.levels) - 1

    def n(self, k: int) -> int:
        return self.levels[k].n

    def eps(self, m: int) -> mpf:
        with self.ctx.scope():
            return mpf(self.epsilon(m))

    @property
    def truncation(self) -> int:
        return 2 * self.n(self.K)

    def with_precision(self, bits: int) -> "AdversaryPlan":
        return replace(self, precision=bits)

    def with_alpha(self, k: int, alpha) -> "AdversaryPlan":
        levels = list(self.levels)
        levels[k] = replace(levels[k], alpha=as_mpc(alpha))
        return replace(self, levels=tuple(levels))


@dataclass(frozen=True)
class LevelData:
    k: int
    alpha: mpc
    lam: tuple
    a: tuple
    d: tuple
    u: Matrix
    limit_vec: tuple
    r: mpf | None = None
    tau_prev: mpf | None = None


@dataclass(frozen=True)
class AdversaryFunction:
    coeffs: Series
    mu: tuple
    per_level: tuple = ()


def lagrange_weights(level: NodeLevel, ctx: Precision = DEFAULT) -> tuple:
    """lambda_m = 1 / prod_{i != m} (t_i - t_m)."""
    with ctx.scope():
        check_distinct(level.nodes, ctx)
        t = level.nodes
        out = []
        for m in range(len(t)):
            prod = mpc(1)
            for i in range(len(t)):
                if i != m:
                    prod *= t[i] - t[m]
            out.append(1 / prod)
        return tuple(out)


@functools.lru_cache(maxsize=256)
def _level_data(level: NodeLevel, alpha: mpc, bits: int) -> LevelData:
    ctx = Precision(bits)
    with ctx.scope():
        sep = ctx.separation(level.nodes + (alpha,))
        if min(abs(alpha - x) for x in level.nodes) <= sep:
            raise AlphaOnNode("alpha coincides with an interpolation node")
        t = level.nodes
        n = level.n
        a = tuple(1 / (alpha - x) for x in t)
        d = tuple(vandermonde_solve(t, a, ctx))
        lam = lagrange_weights(level, ctx)
        u = Matrix.from_rows([[x ** i / (alpha - x) for x in t] for i in range(n)])
        limit_vec = tuple((alpha - x) * l for x, l in zip(t, lam))
        return LevelData(k=0, alpha=alpha, lam=lam, a=a, d=d, u=u, limit_vec=limit_vec)


def level_data(level: NodeLevel, alpha, ctx: Precision = DEFAULT) -> LevelData:
    """a, d, lambda, U and the nullvector limit for one level (no bound fields)."""
    with ctx.scope():
        return _level_data(level, mpc(alpha), ctx.bits)


def plan_level_data(plan: AdversaryPlan, k: int) -> LevelData:
    lv = plan.levels[k]
    base = level_data(lv.level, lv.alpha, plan.ctx)
    tau_prev = tau(plan, k - 1)
    return replace(base, k=k, r=radius_r(plan, k), tau_prev=tau_prev)


def radius_r(plan: AdversaryPlan, k: int) -> mpf:
    with plan.ctx.scope():
        return 1 + max(abs(x) for lv in plan.levels[: k + 1] for x in lv.level.nodes)


def tau(plan: AdversaryPlan, k: int) -> mpf:
    """Smallness threshold tau_k (k = -1..K-1), built from level k+1, rounded down."""
    if not -1 <= k < plan.K:
        raise ValueError(f"tau_{k} needs level {k + 1}, plan has levels 0..{plan.K}")
    ctx = plan.ctx
    with ctx.scope():
        lv = plan.levels[k + 1]
        n1 = lv.n
        eps = [plan.eps(m) for m in range(2 * n1 + 1)]
        d = level_data(lv.level, lv.alpha, ctx).d
        denom = (1 + mpmath.fsum(eps)) * radius_r(plan, k + 1) ** (2 * n1) * (1 + norm_one(d)) * factorial(1 + n1)
        return min(eps) / denom * (1 - ctx.pow2(-ctx.bits + 16))


def chi_partial(plan: AdversaryPlan, k_from: int = 0) -> mpf:
    """sum_{l=k_from}^{K-1} r_l^{2 n_l} ||d_l||_1 tau_l: the computable part of chi (a lower bound)."""
    with plan.ctx.scope():
        total = mpf(0)
        for l in range(max(k_from, 0), plan.K):
            lv = plan.levels[l]
            d = level_data(lv.level, lv.alpha, plan.ctx).d
            total += radius_r(plan, l) ** (2 * lv.n) * norm_one(d) * tau(plan, l)
        return total


def genericity_check(level: NodeLevel, alpha, tol, ctx: Precision = DEFAULT) -> tuple[bool, mpc, mpc]:
    """Both sums sum_m lambda_m t_m^p / (alpha - t_m), p in {0, n}, must stay away from zero."""
    with ctx.scope():
        alpha = mpc(alpha)
        lam = lagrange_weights(level, ctx)
        t = level.nodes
        s1 = mpmath.fsum(l / (alpha - x) for l, x in zip(lam, t))
        s2 = mpmath.fsum(l * x ** level.n / (alpha - x) for l, x in zip(lam, t))
        return bool(abs(s1) > tol and abs(s2) > tol), s1, s2


def ensure_generic(plan: AdversaryPlan) -> tuple[AdversaryPlan, list]:
    """Perturb each failing alpha_k by eps_{n_k}/8 * exp(i pi j/7), j = 1, 2, ..."""
    ctx = plan.ctx
    perturbations = []
    with ctx.scope():
        for k, lv in enumerate(plan.levels):
            tol = plan.tolerances.genericity(ctx, lv.target)
            ok, _, _ = genericity_check(lv.level, lv.alpha, tol, ctx)
            attempt = 0
            while not ok:
                attempt += 1
                if attempt > plan.search.max_alpha_perturbations:
                    raise DegenerateSystem(f"alpha_{k} stays non-generic after {attempt - 1} perturbations")
                alpha = lv.target + plan.eps(lv.n) / 8 * mpmath.expjpi(mpf(attempt) / 7)
                try:
                    plan = plan.with_alpha(k, alpha)
                except PlanError:
                    continue
                lv = plan.levels[k]
                ok, _, _ = genericity_check(lv.level, alpha, tol, ctx)
                perturbations.append((k, attempt, alpha))
    return plan, perturbations


def build_coefficients(plan: AdversaryPlan, mu: Sequence, upto: int | None = None) -> AdversaryFunction:
    """Taylor coefficients of P + sum_{k<=upto} mu_k z^{n_k} d_k(z), truncated at 2 n_K."""
    if len(mu) != plan.K + 1:
        raise ValueError(f"need {plan.K + 1} values of mu, got {len(mu)}")
    upto = plan.K if upto is None else upto
    ctx = plan.ctx
    with ctx.scope():
        mu = tuple(mpf(m) for m in mu)
        if any(not m > 0 for m in mu):
            raise ValueError("mu_k must be positive")
        coeffs = [mpc(0)] * (plan.truncation + 1)
        owner = [None] * len(coeffs)
        for m, c in enumerate(plan.P.coeffs):
            if c != 0:
                coeffs[m] = mpc(c)
                owner[m] = "P"
        for k in range(upto + 1):
            lv = plan.levels[k]
            d = level_data(lv.level, lv.alpha, ctx).d
            for j, dj in enumerate(d):
                m = lv.n + j
                if owner[m] is not None:
                    raise BlockOverlap(f"coefficient {m} claimed by {owner[m]} and block {k}")
                owner[m] = k
                coeffs[m] = mu[k] * dj
        return AdversaryFunction(Series(tuple(coeffs)), mu)


def c_part(plan: AdversaryPlan, coeffs: Series) -> list:
    """Coefficients of f - P."""
    out = list(coeffs.coeffs)
    for m, c in enumerate(plan.P.coeffs):
        if m < len(out):
            out[m] -= mpc(c)
    return out


def decompose_system(plan: AdversaryPlan, mu: Sequence, k: int) -> tuple[Matrix, Matrix]:
    """Split the level-k system as M = Y + mu_k U + S.

    Y comes from P and blocks below k, mu_k U from block k, S from the blocks
    above k.
    """
    ctx = plan.ctx
    with ctx.scope():
        level = plan.levels[k].level
        full = build_coefficients(plan, mu).coeffs
        if k == 0:
            lower = Series(tuple(plan.P.coeffs) + (mpc(0),) * (plan.truncation + 1 - len(plan.P.coeffs)))
        else:
            lower = build_coefficients(plan, mu, upto=k - 1).coeffs
        m_full = build_system(full, level, ctx)
        y = build_system(lower, level, ctx)
        u = plan_level_data(plan, k).u
        s = m_full - y - u.scale(mpf(mu[k]))
        return y, s


def s_norm_bound(plan: AdversaryPlan, mu_caps: Sequence, k: int) -> mpf:
    """(1 + n_k) * sum_{l>k} cap_l ||d_l||_1 r_l^{2 n_l}, valid whenever mu_l <= cap_l."""
    with plan.ctx.scope():
        total = mpf(0)
        for l in range(k + 1, plan.K + 1):
            lv = plan.levels[l]
            d = level_data(lv.level, lv.alpha, plan.ctx).d
            total += mpf(mu_caps[l]) * norm_one(d) * radius_r(plan, l) ** (2 * lv.n)
        return (1 + plan.n(k)) * total


class ProbeRow(NamedTuple):
    eps: mpf
    distance: mpf | None
    error: str | None


def nullvector_limit_probe(level: NodeLevel, alpha, m: Matrix, eps_list: Sequence, ctx: Precision = DEFAULT) -> list:
    """Distance between the nullvector of M + eps U and its eps -> infinity limit.

    Both vectors are scaled so the limit's largest entry becomes 1.
    """
    with ctx.scope():
        data = level_data(level, alpha, ctx)
        limit = normalize_weights(data.limit_vec, ctx)
        anchor = next(j for j, x in enumerate(limit) if x == 1)
        rows = []
        for eps in eps_list:
            eps = mpf(eps)
            res = nullspace(m + data.u.scale(eps), ctx=ctx)
            if len(res.basis) != 1 or res.basis[0][anchor] == 0:
                rows.append(ProbeRow(eps, None, f"DegenerateSystem: nullity {len(res.basis)}"))
                continue
            v = res.basis[0]
            v = [x / v[anchor] for x in v]
            rows.append(ProbeRow(eps, max(abs(a - b) for a, b in zip(v, limit)), None))
        return rows
