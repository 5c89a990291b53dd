"""Exact linear algebra helpers.

Three layers, all desk-scale (dimensions <= 8):

* field arithmetic on ExactNumber matrices (determinant, solve) used for
  lattice bases and 2D geometry;
* integer linear systems A z = b over the rationals, solved exactly through
  a Smith-style diagonalization with tracked unimodular transforms -- this is
  what turns "is v in the projected lattice?" into a decidable question;
* Fourier-Motzkin elimination, which gives certified per-variable bounds for
  integer-point enumeration inside a box preimage.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from .errors import SingularMatrix
from .exactnum import ExactNumber, GeneratorContext

Matrix = list[list[ExactNumber]]


# --------------------------------------------------------------------------
# field operations on ExactNumber matrices


def det(ctx: GeneratorContext, rows: Matrix) -> ExactNumber:
    """Determinant by Gaussian elimination with exact pivot tests."""
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("determinant needs a square matrix")
    a = [list(r) for r in rows]
    result = ctx.one
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if not a[r][col].is_zero()), None)
        if pivot_row is None:
            return ctx.zero
        if pivot_row != col:
            a[col], a[pivot_row] = a[pivot_row], a[col]
            result = -result
        pivot = a[col][col]
        result = result * pivot
        for r in range(col + 1, n):
            if a[r][col].is_zero():
                continue
            factor = a[r][col] / pivot
            for c in range(col, n):
                a[r][c] = a[r][c] - factor * a[col][c]
    return result


def solve(ctx: GeneratorContext, rows: Matrix, rhs: Sequence[ExactNumber]) -> list[ExactNumber]:
    """Solve a square system exactly; raises SingularMatrix."""
    n = len(rows)
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if not a[r][col].is_zero()), None)
        if pivot_row is None:
            raise SingularMatrix("no pivot in exact solve")
        a[col], a[pivot_row] = a[pivot_row], a[col]
        pivot = a[col][col]
        for r in range(n):
            if r == col or a[r][col].is_zero():
                continue
            factor = a[r][col] / pivot
            for c in range(col, n + 1):
                a[r][c] = a[r][c] - factor * a[col][c]
    return [a[i][n] / a[i][i] for i in range(n)]


def rational_rank(rows: list[list[Fraction]]) -> int:
    """Rank of a matrix over Q."""
    a = [list(r) for r in rows]
    rank = 0
    ncols = len(a[0]) if a else 0
    for col in range(ncols):
        pivot_row = next((r for r in range(rank, len(a)) if a[r][col] != 0), None)
        if pivot_row is None:
            continue
        a[rank], a[pivot_row] = a[pivot_row], a[rank]
        pivot = a[rank][col]
        for r in range(len(a)):
            if r == rank or a[r][col] == 0:
                continue
            factor = a[r][col] / pivot
            for c in range(col, ncols):
                a[r][c] -= factor * a[rank][c]
        rank += 1
    return rank


# --------------------------------------------------------------------------
# integer linear systems


def _diagonalize(a: list[list[int]]):
    """Return (u, d, v) with u*a*v = d diagonal, u and v unimodular."""
    rows, cols = len(a), len(a[0]) if a else 0
    d = [list(r) for r in a]
    u = [[int(i == j) for j in range(rows)] for i in range(rows)]
    v = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in d:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, k):
        # row dst += k * row src
        for c in range(cols):
            d[dst][c] += k * d[src][c]
        for c in range(rows):
            u[dst][c] += k * u[src][c]

    def add_col(src, dst, k):
        for r in d:
            r[dst] += k * r[src]
        for r in v:
            r[dst] += k * r[src]

    t = 0
    while t < min(rows, cols):
        # find smallest nonzero entry in the remaining block as pivot
        pivot = None
        for i in range(t, rows):
            for j in range(t, cols):
                if d[i][j] != 0 and (pivot is None or abs(d[i][j]) < abs(d[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        dirty = False
        for i in range(t + 1, rows):
            if d[i][t] != 0:
                q = d[i][t] // d[t][t]
                add_row(t, i, -q)
                if d[i][t] != 0:
                    dirty = True
        for j in range(t + 1, cols):
            if d[t][j] != 0:
                q = d[t][j] // d[t][t]
                add_col(t, j, -q)
                if d[t][j] != 0:
                    dirty = True
        if dirty:
            continue  # remainders became new, smaller pivot candidates
        t += 1
    return u, d, v


def integer_solve(a_rows: list[list[Fraction]], b: list[Fraction]) -> tuple[int, ...] | None:
    """One integer solution z of A z = b, or None when provably unsolvable.

    A and b are rational; each row is scaled to integers first (this does not
    change the solution set).
    """
    if not a_rows:
        return ()
    cols = len(a_rows[0])
    ia: list[list[int]] = []
    ib: list[int] = []
    for row, rhs in zip(a_rows, b):
        row = [Fraction(x) for x in row]
        rhs = Fraction(rhs)
        denom = lcm(*(x.denominator for x in row + [rhs]))
        ia.append([int(x * denom) for x in row])
        ib.append(int(rhs * denom))
    u, d, v = _diagonalize(ia)
    c = [sum(u[i][k] * ib[k] for k in range(len(ib))) for i in range(len(ib))]
    y = [0] * cols
    for i in range(len(ia)):
        di = d[i][i] if i < cols else 0
        if di == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % di != 0:
                return None
            y[i] = c[i] // di
    z = tuple(sum(v[r][k] * y[k] for k in range(cols)) for r in range(cols))
    # paranoia: certify the witness
    for row, rhs in zip(a_rows, b):
        assert sum(Fraction(x) * zz for x, zz in zip(row, z)) == rhs
    return z


# --------------------------------------------------------------------------
# Fourier-Motzkin bounds for integer enumeration


@dataclass(frozen=True)
class Inequality:
    """sum_j coeffs[j] * z_j <= bound."""

    coeffs: tuple[ExactNumber, ...]
    bound: ExactNumber

    def top_var(self) -> int:
        for j in range(len(self.coeffs) - 1, -1, -1):
            if not self.coeffs[j].is_zero():
                return j
        return -1


def fm_levels(ineqs: list[Inequality], nvars: int) -> list[list[Inequality]]:
    """levels[k] bounds z_k once z_0..z_{k-1} are fixed.

    Built by eliminating variables from the last to the second; sound and
    complete for the bounded preimage polytopes used here.
    """
    levels: list[list[Inequality]] = [[] for _ in range(nvars)]
    current = list(ineqs)
    for k in range(nvars - 1, 0, -1):
        passed: list[Inequality] = []
        pos: list[Inequality] = []
        neg: list[Inequality] = []
        for q in current:
            s = q.coeffs[k].sign() if not q.coeffs[k].is_zero() else 0
            if s > 0:
                pos.append(q)
            elif s < 0:
                neg.append(q)
            else:
                passed.append(q)
        levels[k] = pos + neg
        for p in pos:
            for n in neg:
                # positive combination cancelling z_k
                mp = -n.coeffs[k]  # > 0
                mn = p.coeffs[k]  # > 0
                coeffs = tuple(
                    p.coeffs[j] * mp + n.coeffs[j] * mn for j in range(nvars)
                )
                passed.append(Inequality(coeffs, p.bound * mp + n.bound * mn))
        current = passed
    levels[0] = current
    return levels


def bounds_at(level: list[Inequality], prefix: Sequence[int], var: int):
    """Integer range [lo, hi] for z_var given fixed prefix z_0..z_{var-1}.

    Returns None when the slice is empty or (unexpectedly) unbounded.
    """
    lo = None
    hi = None
    for q in level:
        a = q.coeffs[var]
        rest = q.bound
        for j, val in enumerate(prefix):
            if val and not q.coeffs[j].is_zero():
                rest = rest - q.coeffs[j] * val
        s = a.sign()
        if s > 0:
            cand = (rest / a).floor()
            hi = cand if hi is None else min(hi, cand)
        elif s < 0:
            cand = -((rest / (-a)).floor())  # ceil(rest/a) with a < 0
            lo = cand if lo is None else max(lo, cand)
    if lo is None or hi is None or lo > hi:
        return None
    return lo, hi


def box_inequalities(
    ctx: GeneratorContext,
    columns: list[tuple[ExactNumber, ...]],
    box: list[tuple[ExactNumber, ExactNumber]],
) -> list[Inequality]:
    """Constraints lo_i <= (B z)_i <= hi_i as <=-inequalities.

    columns are the basis columns; box gives closed bounds per coordinate.
    """
    nvars = len(columns)
    ineqs = []
    for i, (lo, hi) in enumerate(box):
        row = tuple(columns[j][i] for j in range(nvars))
        ineqs.append(Inequality(row, hi))
        ineqs.append(Inequality(tuple(-x for x in row), -lo))
    return ineqs
