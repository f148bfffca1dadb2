"""Barycentric Padé approximants built from a truncated power series.

For nodes x_0..x_n (nonzero, distinct) the approximant is p(z)/q(z) with

    p(z) = sum_j w_j f(x_j) / (z - x_j),   q(z) = sum_j w_j / (z - x_j),

and the weights chosen so that f*q - p vanishes to order n at the origin.
Those n conditions form an n x (n+1) homogeneous linear system whose
entries are tail sums of the series at the nodes; the weights are its
(one-dimensional) nullspace.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import mpmath
from mpmath import mpc, mpf

from .errors import (
    AlphaOnNode,
    DegenerateSystem,
    InsufficientTruncation,
    NodeCollision,
    NonConvergence,
    NoPole,
    PoleHit,
    ZeroWeightWarning,
)
from .linalg import Matrix, check_distinct, nullspace
from .numkernel import DEFAULT, Poly, as_mpc, Precision, Series, newton_root, poly_eval, poly_roots, series_product_prefix


@dataclass(frozen=True)
class NodeLevel:
    """The n+1 interpolation nodes of a degree-n approximant."""

    nodes: tuple

    def __post_init__(self):
        nodes = tuple(as_mpc(x) for x in self.nodes)
        if len(nodes) < 2:
            raise ValueError("a node level needs at least two nodes (degree n >= 1)")
        if any(x == 0 for x in nodes):
            raise NodeCollision("interpolation nodes must be nonzero")
        if len(set(nodes)) != len(nodes):
            raise NodeCollision("interpolation nodes must be pairwise distinct")
        object.__setattr__(self, "nodes", nodes)

    @property
    def n(self) -> int:
        return len(self.nodes) - 1

    def validate(self, ctx: Precision = DEFAULT) -> None:
        """Separation checks at the working precision."""
        with ctx.scope():
            check_distinct(self.nodes, ctx)
            sep = ctx.separation(self.nodes)
            for j, x in enumerate(self.nodes):
                if abs(x) <= sep:
                    raise NodeCollision(f"node {j} is numerically zero")

    def diameter(self) -> mpf:
        return max(abs(a - b) for a in self.nodes for b in self.nodes)


@dataclass(frozen=True)
class BaryRational:
    level: NodeLevel
    weights: tuple
    values: tuple

    def __post_init__(self):
        w = tuple(as_mpc(x) for x in self.weights)
        v = tuple(as_mpc(x) for x in self.values)
        if not len(w) == len(v) == len(self.level.nodes):
            raise ValueError("weights, values and nodes must have equal length")
        if all(x == 0 for x in w):
            raise ValueError("weights are all zero")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "values", v)

    @property
    def nodes(self) -> tuple:
        return self.level.nodes

    @property
    def n(self) -> int:
        return self.level.n


@dataclass(frozen=True)
class ContactReport:
    order_target: int
    residual_coeffs: tuple
    max_rel_residual: mpf
    passed: bool


class PoleLocation(NamedTuple):
    pole: mpc
    q_residual: mpf
    q_deriv_mod: mpf


def tail_sum(c: Series, x, n: int, i: int, ctx: Precision = DEFAULT) -> mpc:
    """sum_{k=n-i}^{N} c_k x^(k-n+i), by Horner from the top index down."""
    if not 0 <= i < n:
        raise ValueError(f"row index {i} outside 0..{n - 1}")
    with ctx.scope():
        acc = mpc(0)
        for k in range(c.truncation_order, n - i - 1, -1):
            acc = acc * x + c[k]
        return acc


def build_system(c: Series, level: NodeLevel, ctx: Precision = DEFAULT) -> Matrix:
    n = level.n
    if not c.exact_tail and c.truncation_order < n:
        raise InsufficientTruncation(f"series known to order {c.truncation_order}, need >= {n}")
    with ctx.scope():
        return Matrix.from_rows([[tail_sum(c, x, n, i, ctx) for x in level.nodes] for i in range(n)])


def normalize_weights(v: Sequence, ctx: Precision = DEFAULT) -> tuple:
    """Scale so the entry of largest modulus is exactly 1 (lowest index on ties)."""
    with ctx.scope():
        mods = [abs(x) for x in v]
        top = max(mods)
        if top == 0:
            raise ValueError("cannot normalize the zero vector")
        cut = top * (1 - ctx.nullspace_tol)
        idx = next(j for j, m in enumerate(mods) if m >= cut)
        pivot = v[idx]
        out = [x / pivot for x in v]
        out[idx] = mpc(1)
        return tuple(out)


def solve_weights(m: Matrix, ctx: Precision = DEFAULT) -> tuple:
    """The normalized nullvector of the n x (n+1) order-condition matrix."""
    if m.cols != m.rows + 1:
        raise ValueError(f"expected an n x (n+1) matrix, got {m.rows}x{m.cols}")
    with ctx.scope():
        res = nullspace(m, ctx=ctx)
        if len(res.basis) != 1:
            raise DegenerateSystem(f"rank {res.rank} < {m.rows}: nullity {len(res.basis)}")
        w = normalize_weights(res.basis[0], ctx)
        small = [j for j, x in enumerate(w) if abs(x) <= ctx.nullspace_tol]
        if small:
            warnings.warn(ZeroWeightWarning(f"weights {small} vanish; interpolation there is lost"), stacklevel=2)
        return w


def approximant(c: Series, level: NodeLevel, ctx: Precision = DEFAULT) -> BaryRational:
    """Degree-n barycentric Padé approximant of the series ``c`` at ``level``."""
    level.validate(ctx)
    with ctx.scope():
        w = solve_weights(build_system(c, level, ctx), ctx)
        f = c.as_poly()
        values = tuple(poly_eval(f, x, ctx) for x in level.nodes)
        return BaryRational(level, w, values)


def q_eval(r: BaryRational, z, ctx: Precision = DEFAULT) -> tuple[mpc, mpc]:
    """q(z) and q'(z)."""
    with ctx.scope():
        q = mpc(0)
        dq = mpc(0)
        for w, x in zip(r.weights, r.nodes):
            inv = 1 / (z - x)
            q += w * inv
            dq -= w * inv * inv
        return q, dq


def p_eval(r: BaryRational, z, ctx: Precision = DEFAULT) -> mpc:
    with ctx.scope():
        return mpmath.fsum(w * f / (z - x) for w, f, x in zip(r.weights, r.values, r.nodes))


def bary_eval(r: BaryRational, z, ctx: Precision = DEFAULT) -> mpc:
    with ctx.scope():
        z = mpc(z)
        sep = ctx.separation(r.nodes)
        for j, x in enumerate(r.nodes):
            if abs(z - x) <= sep and r.weights[j] != 0:
                return r.values[j]
        num = mpc(0)
        den = mpc(0)
        num_scale = mpf(0)
        den_scale = mpf(0)
        for w, f, x in zip(r.weights, r.values, r.nodes):
            t = w / (z - x)
            num += t * f
            den += t
            num_scale += abs(t * f)
            den_scale += abs(t)
        if abs(den) <= ctx.pivot_threshold * den_scale:
            if abs(num) > ctx.pivot_threshold * num_scale or den == 0:
                raise PoleHit(f"z = {mpmath.nstr(z, 10)} is a pole of the approximant")
        return num / den


def q_taylor(r: BaryRational, N: int, ctx: Precision = DEFAULT) -> Series:
    """Taylor coefficients 0..N of q at the origin: -sum_j w_j x_j^-(h+1)."""
    return _taylor(r.weights, r.nodes, N, ctx)


def p_taylor(r: BaryRational, N: int, ctx: Precision = DEFAULT) -> Series:
    with ctx.scope():
        return _taylor([w * f for w, f in zip(r.weights, r.values)], r.nodes, N, ctx)


def _taylor(numer, nodes, N, ctx):
    if N < 0:
        raise ValueError("N must be >= 0")
    with ctx.scope():
        inv = [1 / x for x in nodes]
        powers = list(inv)
        out = []
        for _ in range(N + 1):
            out.append(-mpmath.fsum(a * b for a, b in zip(numer, powers)))
            powers = [p * i for p, i in zip(powers, inv)]
        return Series(tuple(out), exact_tail=False)


def contact_check(c: Series, r: BaryRational, ctx: Precision = DEFAULT, tol=None) -> ContactReport:
    """Check that f*q - p = O(z^n) at the origin, coefficient by coefficient."""
    n = r.n
    with ctx.scope():
        tol = ctx.contact_tol if tol is None else tol
        fq = series_product_prefix(c, q_taylor(r, n - 1, ctx), n, ctx)
        p = p_taylor(r, n - 1, ctx)
        res = tuple(a - b for a, b in zip(fq.coeffs, p.coeffs))
        scale = max([mpf(1)] + [abs(a) for a in fq.coeffs])
        rel = max(abs(x) for x in res) / scale
        return ContactReport(n, res, rel, bool(rel <= tol))


def q_numerator(r: BaryRational, ctx: Precision = DEFAULT) -> Poly:
    """sum_j w_j prod_{i != j} (z - x_i), so that q = numerator / prod (z - x_i)."""
    with ctx.scope():
        total = [mpc(0)] * (r.n + 1)
        for j, w in enumerate(r.weights):
            prod = Poly((mpc(w),))
            for i, x in enumerate(r.nodes):
                if i != j:
                    prod = prod * Poly((-x, mpc(1)))
            for k, a in enumerate(prod.coeffs):
                total[k] += a
        return Poly(tuple(total))


def q_poles(r: BaryRational, ctx: Precision = DEFAULT) -> list[mpc]:
    """Finite zeros of q, excluding removable ones that merge into nodes."""
    with ctx.scope():
        num = q_numerator(r, ctx).normalize(ctx)
        if num.degree < 1:
            return []
        sep = ctx.separation(r.nodes)
        return [z for z in poly_roots(num, ctx) if min(abs(z - x) for x in r.nodes) > sep]


def pole_near(r: BaryRational, target, tol, ctx: Precision = DEFAULT) -> PoleLocation:
    """Zero of q closest to ``target``: Newton from the target, root finding as fallback."""
    with ctx.scope():
        target = mpc(target)
        sep = ctx.separation(r.nodes)
        if min(abs(target - x) for x in r.nodes) <= sep:
            raise AlphaOnNode("target coincides with an interpolation node")
        trust = abs(target) + r.level.diameter()

        def fn(z):
            return q_eval(r, z, ctx)

        try:
            z = newton_root(fn, target, tol, max_iter=100, ctx=ctx)
            if abs(z - target) > trust:
                raise NonConvergence("Newton left the trust region")
        except NonConvergence:
            candidates = [p for p in q_poles(r, ctx) if abs(p - target) <= trust]
            if not candidates:
                raise NoPole(f"no zero of q within {mpmath.nstr(trust, 5)} of the target") from None
            z = min(candidates, key=lambda p: abs(p - target))
        q, dq = fn(z)
        for _ in range(4):
            if q == 0 or dq == 0:
                break
            z_new = z - q / dq
            q_new, dq_new = fn(z_new)
            if abs(q_new) >= abs(q):
                break
            z, q, dq = z_new, q_new, dq_new
        return PoleLocation(z, abs(q), abs(dq))
