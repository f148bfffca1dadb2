"""Arbitrary-precision complex scalars, dense polynomials/series and root finding.

All complex quantities are ``mpmath.mpc`` values. The working precision is
carried by a :class:`Precision` value that every operation receives
explicitly; operations enter ``mpmath.workprec`` for their duration.

mpmath keeps its working precision in process-global state, so operations
are pure but should not be interleaved across threads with different
precisions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import mpmath
from mpmath import libmp, mpc, mpf

from .errors import DegreeZero, DerivativeUnderflow, InsufficientTruncation, NonConvergence

Scalar = mpc


@dataclass(frozen=True)
class Precision:
    """Working precision in bits plus the tolerances derived from it."""

    bits: int = 1024

    def __post_init__(self):
        if int(self.bits) != self.bits or self.bits < 64:
            raise ValueError(f"precision must be an integer >= 64 bits, got {self.bits!r}")

    def scope(self):
        return mpmath.workprec(self.bits)

    def pow2(self, exponent: int) -> mpf:
        return mpmath.ldexp(mpf(1), exponent)

    @property
    def pivot_threshold(self) -> mpf:
        return self.pow2(-self.bits + 32)

    trim_threshold = pivot_threshold

    @property
    def nullspace_tol(self) -> mpf:
        return self.pow2(-(self.bits // 2))

    @property
    def contact_tol(self) -> mpf:
        return self.pow2(-(self.bits // 2))

    @property
    def root_tol(self) -> mpf:
        return self.pow2(-(self.bits // 2))

    @property
    def cert_tol(self) -> mpf:
        return self.pow2(-(self.bits // 3))

    @property
    def quarter(self) -> mpf:
        """2^(-bits/4): node separation scale, genericity and pole floors."""
        return self.pow2(-(self.bits // 4))

    def separation(self, points: Iterable[mpc] = ()) -> mpf:
        scale = max((abs(p) for p in points), default=mpf(0))
        return self.quarter * (1 + scale)

    @property
    def digits(self) -> int:
        return math.ceil(0.302 * self.bits) + 5

    def doubled(self) -> "Precision":
        return Precision(2 * self.bits)


DEFAULT = Precision()


def as_mpc(x) -> mpc:
    """Exact conversion to mpc, never rounding to the ambient precision."""
    if isinstance(x, mpc):
        return x
    if isinstance(x, mpf):
        z = object.__new__(mpc)
        z._mpc_ = (x._mpf_, libmp.fzero)
        return z
    if isinstance(x, str):
        raise TypeError("parse decimal strings with parse_complex/to_scalar")
    with mpmath.workprec(max(mpmath.mp.prec, 64)):
        return mpc(x)


def to_scalar(x, ctx: Precision = DEFAULT) -> mpc:
    """Convert a number, decimal string or ``{"re", "im"}`` mapping to mpc."""
    with ctx.scope():
        if isinstance(x, dict):
            return mpc(mpf(x["re"]), mpf(x.get("im", "0")))
        if isinstance(x, str):
            return mpc(mpf(x))
        return mpc(x)


def format_real(x, ctx: Precision = DEFAULT) -> str:
    """Decimal string with enough digits to round-trip at ``ctx.bits``."""
    with ctx.scope():
        x = x if isinstance(x, mpf) else mpf(x)
        if x == 0:
            return "0"
        return mpmath.nstr(x, ctx.digits, min_fixed=-4, max_fixed=ctx.digits)


def format_complex(z, ctx: Precision = DEFAULT) -> dict:
    z = as_mpc(z)
    return {"re": format_real(z.real, ctx), "im": format_real(z.imag, ctx)}


def parse_real(s: str, ctx: Precision = DEFAULT) -> mpf:
    if not isinstance(s, str):
        raise TypeError(f"expected a decimal string, got {type(s).__name__}")
    with ctx.scope():
        return mpf(s)


def parse_complex(obj, ctx: Precision = DEFAULT) -> mpc:
    if isinstance(obj, str):
        return as_mpc(parse_real(obj, ctx))
    if not isinstance(obj, dict) or set(obj) - {"re", "im"} or "re" not in obj:
        raise ValueError(f"malformed complex value: {obj!r}")
    with ctx.scope():
        return mpc(parse_real(obj["re"], ctx), parse_real(obj.get("im", "0"), ctx))


@dataclass(frozen=True)
class Poly:
    """Dense polynomial, coefficients in ascending degree. ``()`` is zero."""

    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(as_mpc(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def normalize(self, ctx: Precision = DEFAULT) -> "Poly":
        """Drop trailing coefficients that are negligible relative to the largest."""
        with ctx.scope():
            if not self.coeffs:
                return self
            scale = max(abs(c) for c in self.coeffs)
            cut = ctx.trim_threshold * scale
            coeffs = list(self.coeffs)
            while coeffs and (abs(coeffs[-1]) <= cut or coeffs[-1] == 0):
                coeffs.pop()
            return Poly(tuple(coeffs))

    def derivative(self) -> "Poly":
        return Poly(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def __mul__(self, other: "Poly") -> "Poly":
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [mpc(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(tuple(out))


@dataclass(frozen=True)
class Series:
    """Truncated power series c_0..c_N.

    With ``exact_tail`` the coefficients beyond N are zero (the series is a
    polynomial); otherwise they are unknown and products past N are refused.
    """

    coeffs: tuple
    exact_tail: bool = field(default=True)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(as_mpc(c) for c in self.coeffs))

    @property
    def truncation_order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, m: int) -> mpc:
        if 0 <= m < len(self.coeffs):
            return self.coeffs[m]
        if m >= 0 and self.exact_tail:
            return mpc(0)
        raise IndexError(m)

    def as_poly(self) -> Poly:
        return Poly(self.coeffs)


def poly_eval(p: Poly, z, ctx: Precision = DEFAULT) -> mpc:
    with ctx.scope():
        acc = mpc(0)
        for c in reversed(p.coeffs):
            acc = acc * z + c
        return acc


def _eval_with_derivative(coeffs: Sequence[mpc], z: mpc) -> tuple[mpc, mpc]:
    v = mpc(0)
    d = mpc(0)
    for c in reversed(coeffs):
        d = d * z + v
        v = v * z + c
    return v, d


def poly_roots(p: Poly, ctx: Precision = DEFAULT, max_iter: int | None = None) -> list[mpc]:
    """All roots of ``p`` by Aberth-Ehrlich simultaneous iteration.

    Starting points lie on a circle whose radius is the Cauchy bound, at
    fixed angles, so the result is reproducible bit for bit.
    """
    with ctx.scope():
        q = p.normalize(ctx)
        n = q.degree
        if n < 1:
            raise DegreeZero(f"polynomial of degree {n} has no roots")
        lead = q.coeffs[-1]
        if abs(lead) <= ctx.pivot_threshold * max(abs(c) for c in q.coeffs):
            raise DegreeZero("leading coefficient below pivot threshold")
        # exact zero roots are split off: the relative residual test degenerates there
        zeros = next(k for k, c in enumerate(q.coeffs) if c != 0)
        if zeros == n:
            return [mpc(0)] * n
        monic = [c / lead for c in q.coeffs[zeros:]]
        found = [mpc(0)] * zeros
        n -= zeros
        radius = 1 + max(abs(c) for c in monic[:-1])
        z = [radius * mpmath.expjpi(mpf(2 * k) / n + mpf(1) / (3 * n) + mpf("0.1")) for k in range(n)]
        abs_coeffs = [abs(c) for c in monic]

        def residual_ok(r, tol):
            scale = mpc(0)
            for c in reversed(abs_coeffs):
                scale = scale * abs(r) + c
            v, d = _eval_with_derivative(monic, r)
            return abs(v) <= tol * scale.real or (d != 0 and abs(v / d) <= tol * (1 + abs(r)))

        stop = ctx.pow2(-ctx.bits + 16)
        floor = ctx.pow2(-ctx.bits + 32)
        cap = max_iter if max_iter is not None else 2 * ctx.bits + 100
        for _ in range(cap):
            largest = mpf(0)
            for i in range(n):
                v, d = _eval_with_derivative(monic, z[i])
                if v == 0:
                    continue
                s = mpc(0)
                for j in range(n):
                    if j != i:
                        s += 1 / (z[i] - z[j])
                denom = d / v - s
                if denom == 0:
                    continue
                step = 1 / denom
                z[i] -= step
                largest = max(largest, abs(step) / (1 + abs(z[i])))
            if largest <= stop or all(residual_ok(r, floor) for r in z):
                break
        if not all(residual_ok(r, ctx.root_tol) for r in z):
            raise NonConvergence(f"Aberth iteration did not converge in {cap} sweeps")
        return found + z


def newton_root(
    fn: Callable[[mpc], tuple[mpc, mpc]],
    z0,
    tol,
    max_iter: int = 100,
    ctx: Precision = DEFAULT,
) -> mpc:
    """Newton iteration on ``fn(z) -> (value, derivative)`` until |value| <= tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    with ctx.scope():
        z = mpc(z0)
        for _ in range(max_iter + 1):
            v, d = fn(z)
            if abs(v) <= tol:
                return z
            if abs(d) <= ctx.pivot_threshold:
                raise DerivativeUnderflow(f"|f'(z)| = {mpmath.nstr(abs(d), 5)} at z = {mpmath.nstr(z, 8)}")
            z = z - v / d
        raise NonConvergence(f"Newton iteration exceeded {max_iter} steps")


def series_product_prefix(a: Series, b: Series, n: int, ctx: Precision = DEFAULT) -> Series:
    """Coefficients 0..n-1 of the Cauchy product a*b."""
    for s in (a, b):
        if not s.exact_tail and s.truncation_order < n - 1:
            raise InsufficientTruncation(
                f"need coefficients up to {n - 1}, series known only to {s.truncation_order}"
            )
    with ctx.scope():
        out = []
        for h in range(n):
            acc = mpc(0)
            for k in range(h + 1):
                ak = a[k] if k <= a.truncation_order else mpc(0)
                bk = b[h - k] if h - k <= b.truncation_order else mpc(0)
                acc += ak * bk
            out.append(acc)
        return Series(tuple(out), exact_tail=False)
