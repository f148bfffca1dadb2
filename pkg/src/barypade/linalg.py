"""Dense high-precision linear algebra: Vandermonde solves, nullspaces, norms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import mpmath
from mpmath import mpc, mpf

from .errors import NodeCollision
from .numkernel import DEFAULT, Precision, as_mpc


@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        entries = tuple(as_mpc(e) for e in self.entries)
        if self.rows * self.cols != len(entries):
            raise ValueError(f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(entries)}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "Matrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, tuple(e for r in rows for e in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(rows, cols, (mpc(0),) * (rows * cols))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[mpc]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def _check_shape(self, other: "Matrix"):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_shape(other)
        return Matrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_shape(other)
        return Matrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def scale(self, s) -> "Matrix":
        return Matrix(self.rows, self.cols, tuple(s * e for e in self.entries))

    def scale_rows(self, factors: Sequence) -> "Matrix":
        return Matrix.from_rows([[f * e for e in self.row(i)] for i, f in enumerate(factors)])

    def matvec(self, v: Sequence) -> list[mpc]:
        return [mpmath.fsum(a * b for a, b in zip(self.row(i), v)) for i in range(self.rows)]


@dataclass(frozen=True)
class NullspaceResult:
    rank: int
    basis: tuple
    pivot_mods: tuple


def check_distinct(nodes: Sequence[mpc], ctx: Precision = DEFAULT) -> None:
    with ctx.scope():
        sep = ctx.separation(nodes)
        for i in range(len(nodes)):
            for j in range(i):
                if abs(nodes[i] - nodes[j]) <= sep:
                    raise NodeCollision(f"nodes {j} and {i} are closer than {mpmath.nstr(sep, 5)}")


def vandermonde_solve(nodes: Sequence, rhs: Sequence, ctx: Precision = DEFAULT) -> list[mpc]:
    """Solve V d = rhs with V[i][j] = nodes[i]**j (monomial interpolation).

    Björck-Pereyra: Newton divided differences, then conversion of the
    Newton form to monomial coefficients. O(n^2).
    """
    if len(nodes) != len(rhs):
        raise ValueError("nodes and rhs differ in length")
    with ctx.scope():
        x = [mpc(t) for t in nodes]
        check_distinct(x, ctx)
        c = [mpc(r) for r in rhs]
        n = len(x) - 1
        for k in range(n):
            for i in range(n, k, -1):
                c[i] = (c[i] - c[i - 1]) / (x[i] - x[i - k - 1])
        for k in range(n - 1, -1, -1):
            for i in range(k, n):
                c[i] = c[i] - x[k] * c[i + 1]
        return c


def norm_one(v: Sequence) -> mpf:
    return mpmath.fsum(abs(x) for x in v) if len(v) else mpf(0)


def norm_inf(v: Sequence) -> mpf:
    return max((abs(x) for x in v), default=mpf(0))


def norm_frobenius(m: Matrix) -> mpf:
    return mpmath.sqrt(mpmath.fsum(abs(e) ** 2 for e in m.entries))


def factorial(n: int) -> int:
    if n < 0:
        raise ValueError("factorial of a negative integer")
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def nullspace(m: Matrix, tol=None, ctx: Precision = DEFAULT) -> NullspaceResult:
    """Rank and nullspace basis by Gaussian elimination with full pivoting.

    Pivots of modulus <= tol * ||M||_F count as zero. Basis vectors have the
    free variable set to 1 and are not normalized further.
    """
    with ctx.scope():
        tol = ctx.nullspace_tol if tol is None else mpf(tol)
        a = m.to_rows()
        rows, cols = m.rows, m.cols
        cut = tol * norm_frobenius(m)
        perm = list(range(cols))  # column permutation: position -> original column
        pivot_mods = []
        rank = 0
        for r in range(min(rows, cols)):
            best, bi, bj = mpf(-1), -1, -1
            for i in range(r, rows):
                for j in range(r, cols):
                    v = abs(a[i][j])
                    if v > best:
                        best, bi, bj = v, i, j
            if best <= cut or best == 0:
                break
            a[r], a[bi] = a[bi], a[r]
            if bj != r:
                for row in a:
                    row[r], row[bj] = row[bj], row[r]
                perm[r], perm[bj] = perm[bj], perm[r]
            piv = a[r][r]
            pivot_mods.append(best)
            for i in range(r + 1, rows):
                f = a[i][r] / piv
                if f != 0:
                    a[i][r] = mpc(0)
                    for j in range(r + 1, cols):
                        a[i][j] -= f * a[r][j]
            rank += 1
        basis = []
        for free in range(rank, cols):
            y = [mpc(0)] * cols
            y[free] = mpc(1)
            for i in range(rank - 1, -1, -1):
                s = mpmath.fsum(a[i][j] * y[j] for j in range(i + 1, cols))
                y[i] = -s / a[i][i]
            v = [mpc(0)] * cols
            for pos, orig in enumerate(perm):
                v[orig] = y[pos]
            basis.append(tuple(v))
        return NullspaceResult(rank, tuple(basis), tuple(pivot_mods))

