"""Cut-and-project schemes: a lattice in R^m x R^n plus the two projections.

Membership in the internal projection p2(Gamma) is decided exactly by
coefficient matching: expanding candidate equations over the context's
rational module turns the question into an integer linear system.  With the
declared generator independence this is a complete decision procedure (no
search radius is needed), and every positive answer carries an integer
witness that re-embeds to the queried vector.

Enumeration of lattice points with both projections in given boxes walks
integer coordinates through certified Fourier-Motzkin bounds, so the output
is exactly the requested finite set, in lexicographic coordinate order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import math

from . import linear
from ._quadint import qdiv_ceil, qdiv_floor, qsign
from .errors import DependenceDetected, SingularBasis
from .exactnum import ExactNumber, GeneratorContext

Vector = tuple[ExactNumber, ...]


@dataclass(frozen=True)
class LatticeVector:
    """A lattice point: integer coordinates and their exact embedding."""

    z: tuple[int, ...]
    embedded: Vector
    phys: Vector
    internal: Vector


class Lattice:
    """Full-rank lattice given by exact basis columns."""

    __slots__ = ("ctx", "dim", "columns", "det", "det_abs")

    def __init__(self, ctx: GeneratorContext, columns: Sequence[Vector]):
        self.ctx = ctx
        self.dim = len(columns)
        if any(len(c) != self.dim for c in columns):
            raise ValueError("basis must be square")
        self.columns = tuple(tuple(ctx.coerce(x) for x in col) for col in columns)
        rows = [[self.columns[j][i] for j in range(self.dim)] for i in range(self.dim)]
        d = linear.det(ctx, rows)
        if d.is_zero():
            raise SingularBasis("basis determinant is zero")
        self.det = d
        self.det_abs = -d if d.sign() < 0 else d

    def embed(self, z: Sequence[int]) -> Vector:
        """B z -- exact for any context (only rational scaling involved)."""
        out = [self.ctx.zero] * self.dim
        for j, zj in enumerate(z):
            if zj == 0:
                continue
            col = self.columns[j]
            for i in range(self.dim):
                out[i] = out[i] + col[i] * zj
        return tuple(out)


def make_lattice(ctx: GeneratorContext, columns: Sequence[Sequence]) -> Lattice:
    return Lattice(ctx, [tuple(ctx.coerce(x) for x in col) for col in columns])


class Scheme:
    """(R^m x R^n, Gamma) with p1 onto the first m and p2 onto the last n
    coordinates.

    Injectivity of p1 on the lattice is certified symbolically: the rational
    kernel of the coefficient-expanded p1 matrix is trivial iff no nonzero
    lattice point projects to zero.  The verdict is recorded (periodic toy
    schemes like Z^2 legitimately fail it); density of p2(Gamma) is recorded
    as an assumption except for Hecke-type schemes, where it follows from the
    declared independence conditions.
    """

    __slots__ = ("lattice", "m", "n", "hecke_alpha", "hecke_beta",
                 "p2_density_checked", "p1_injective")

    def __init__(self, lattice: Lattice, m: int, n: int,
                 hecke_alpha: Vector | None = None, hecke_beta: Vector | None = None):
        if m + n != lattice.dim:
            raise ValueError(f"m + n = {m + n} does not match lattice dimension {lattice.dim}")
        self.lattice = lattice
        self.m = m
        self.n = n
        self.hecke_alpha = hecke_alpha
        self.hecke_beta = hecke_beta
        self.p2_density_checked = hecke_alpha is not None
        self.p1_injective = self._p1_injective()

    @property
    def ctx(self) -> GeneratorContext:
        return self.lattice.ctx

    def _p1_injective(self) -> bool:
        rows = _coefficient_rows(
            [tuple(col[:self.m]) for col in self.lattice.columns]
        )
        return linear.rational_rank(rows) == self.lattice.dim

    def p1(self, v: Vector) -> Vector:
        return tuple(v[: self.m])

    def p2(self, v: Vector) -> Vector:
        return tuple(v[self.m:])

    def p2_columns(self) -> list[Vector]:
        return [tuple(col[self.m:]) for col in self.lattice.columns]

    def vector(self, z: Sequence[int]) -> LatticeVector:
        emb = self.lattice.embed(z)
        return LatticeVector(tuple(z), emb, self.p1(emb), self.p2(emb))

    def is_hecke(self) -> bool:
        return self.hecke_alpha is not None

    def p2_oracle(self) -> GroupOracle:
        return GroupOracle(self.ctx, self.p2_columns())

    def describe(self) -> dict:
        return {
            "context": self.ctx.describe(),
            "m": self.m,
            "n": self.n,
            "basis_columns": [[x.to_string() for x in col] for col in self.lattice.columns],
            "det_abs": self.lattice.det_abs.to_string(),
            "p1_injective": self.p1_injective,
            "p2_density_checked": self.p2_density_checked,
        }


def _coefficient_rows(vectors: Sequence[Vector]) -> list[list[Fraction]]:
    """Expand ExactNumber vectors into rational rows (coordinate x module-coeff)."""
    if not vectors:
        return []
    ncoord = len(vectors[0])
    width = len(vectors[0][0].coeffs)
    rows = []
    for i in range(ncoord):
        for c in range(width):
            rows.append([v[i].coeffs[c] for v in vectors])
    return rows


# --------------------------------------------------------------------------
# membership


@dataclass(frozen=True)
class Membership:
    """Result of a group membership query, with a re-checkable witness."""

    status: str  # "member" | "not_member" | "unknown"
    witness: tuple[int, ...] | None = None
    reason: str = ""

    @property
    def is_member(self) -> bool:
        return self.status == "member"

    def to_dict(self) -> dict:
        d = {"status": self.status}
        if self.witness is not None:
            d["witness"] = list(self.witness)
        if self.reason:
            d["reason"] = self.reason
        return d


def member_p2(scheme: Scheme, v: Sequence, search_bound: int | None = None) -> Membership:
    """Decide v in p2(Gamma) by coefficient matching.

    The expansion over the rational module is complete under the declared
    generator independence, so `search_bound` is accepted for interface
    compatibility but never consulted.
    """
    del search_bound
    ctx = scheme.ctx
    vv = tuple(ctx.coerce(x) for x in v)
    if len(vv) != scheme.n:
        raise ValueError(f"expected internal vector of length {scheme.n}")
    return GroupOracle(ctx, scheme.p2_columns()).member(vv)


class GroupOracle:
    """Membership oracle for the group generated by finitely many exact vectors
    (typically the p2 images of a lattice basis)."""

    __slots__ = ("ctx", "generators", "_rows")

    def __init__(self, ctx: GeneratorContext, generators: Sequence[Vector]):
        self.ctx = ctx
        self.generators = [tuple(ctx.coerce(x) for x in g) for g in generators]
        self._rows = _coefficient_rows(self.generators)

    @property
    def dim(self) -> int:
        return len(self.generators[0]) if self.generators else 0

    def member(self, v: Sequence) -> Membership:
        vv = tuple(self.ctx.coerce(x) for x in v)
        target: list[Fraction] = []
        width = len(self.ctx.generators) + 1
        for i in range(self.dim):
            for c in range(width):
                target.append(vv[i].coeffs[c])
        z = linear.integer_solve(self._rows, target)
        if z is None:
            return Membership("not_member", reason="integer coefficient matching unsolvable")
        return Membership("member", witness=z)

    def member_scalar(self, x) -> Membership:
        return self.member((x,))

    def line_member(self, normal: Sequence, delta) -> Membership:
        """Does some g in the group satisfy normal . g = delta?

        This is the translation question for a line flag: whether the group
        moves a line onto a parallel one.
        """
        n = tuple(self.ctx.coerce(x) for x in normal)
        d = self.ctx.coerce(delta)
        dots = [
            sum((n[i] * g[i] for i in range(self.dim)), self.ctx.zero)
            for g in self.generators
        ]
        width = len(self.ctx.generators) + 1
        rows = [[dots[j].coeffs[c] for j in range(len(dots))] for c in range(width)]
        target = [d.coeffs[c] for c in range(width)]
        z = linear.integer_solve(rows, target)
        if z is None:
            return Membership("not_member", reason="no group translate maps line onto line")
        return Membership("member", witness=z)

    def combination(self, z: Sequence[int]) -> Vector:
        out = [self.ctx.zero] * self.dim
        for coeff, g in zip(z, self.generators):
            if coeff == 0:
                continue
            for i in range(self.dim):
                out[i] = out[i] + g[i] * coeff
        return tuple(out)


# --------------------------------------------------------------------------
# Hecke-type schemes


def make_hecke_scheme(ctx: GeneratorContext, alpha: Sequence, beta: Sequence) -> Scheme:
    """Scheme with m = 1, n = d and lattice generated by
    (1 + beta.alpha, alpha) and (beta_i, e_i).

    The two rational-independence conditions (1 with the alpha entries, and
    the beta entries with 1 + beta.alpha) are checked symbolically on module
    coefficient vectors; failure raises DependenceDetected.
    """
    a = [ctx.coerce(x) for x in alpha]
    b = [ctx.coerce(x) for x in beta]
    if len(a) != len(b) or not a:
        raise ValueError("alpha and beta must be nonempty vectors of equal length")
    d = len(a)

    one_row = [ctx.one.coeffs] + [x.coeffs for x in a]
    if linear.rational_rank([list(r) for r in one_row]) != d + 1:
        raise DependenceDetected("1, alpha_1..alpha_d are rationally dependent")
    beta_alpha = sum((bi * ai for bi, ai in zip(b, a)), ctx.zero)
    two_row = [x.coeffs for x in b] + [(ctx.one + beta_alpha).coeffs]
    if linear.rational_rank([list(r) for r in two_row]) != d + 1:
        raise DependenceDetected("beta_1..beta_d, 1 + beta.alpha are rationally dependent")

    columns: list[Vector] = []
    col0 = [ctx.one + beta_alpha] + list(a)
    columns.append(tuple(col0))
    for i in range(d):
        col = [b[i]] + [ctx.one if j == i else ctx.zero for j in range(d)]
        columns.append(tuple(col))
    lattice = Lattice(ctx, columns)
    return Scheme(lattice, 1, d, hecke_alpha=tuple(a), hecke_beta=tuple(b))


# --------------------------------------------------------------------------
# enumeration


def enumerate_lattice(
    scheme: Scheme,
    phys_box: Sequence[tuple],
    internal_box: Sequence[tuple],
) -> Iterator[LatticeVector]:
    """All lattice points with p1 in phys_box and p2 in internal_box
    (closed boxes), each exactly once, in lexicographic z order."""
    ctx = scheme.ctx
    box = [(ctx.coerce(lo), ctx.coerce(hi)) for lo, hi in list(phys_box) + list(internal_box)]
    if len(box) != scheme.lattice.dim:
        raise ValueError("box dimensions do not match the scheme")
    for lo, hi in box:
        if (hi - lo).sign() < 0:
            return
    columns = scheme.lattice.columns
    ineqs = linear.box_inequalities(ctx, list(columns), box)
    nvars = scheme.lattice.dim
    levels = linear.fm_levels(ineqs, nvars)

    if not ctx.has_opaque():
        yield from _enumerate_scaled(scheme, levels, nvars)
        return

    def rec(prefix: list[int]) -> Iterator[LatticeVector]:
        j = len(prefix)
        if j == nvars:
            yield scheme.vector(tuple(prefix))
            return
        rng = linear.bounds_at(levels[j], prefix, j)
        if rng is None:
            return
        for v in range(rng[0], rng[1] + 1):
            yield from rec(prefix + [v])

    yield from rec([])


def _enumerate_scaled(scheme: Scheme, levels, nvars: int) -> Iterator[LatticeVector]:
    """Integer-pair compilation of the level systems (quadratic/rational
    contexts): the recursion then runs on plain integers."""
    ctx = scheme.ctx
    d = ctx.quadratic.D if ctx.quadratic is not None else 0
    denoms = [1]
    for level in levels:
        for q in level:
            for x in (*q.coeffs, q.bound):
                a, b = x._ab()
                denoms.extend((a.denominator, b.denominator))
    scale = math.lcm(*denoms)

    def pair(x: ExactNumber) -> tuple[int, int]:
        a, b = x._ab()
        return int(a * scale), int(b * scale)

    compiled = [
        [([pair(c) for c in q.coeffs], pair(q.bound)) for q in level]
        for level in levels
    ]

    def rec(prefix: list[int]) -> Iterator[LatticeVector]:
        j = len(prefix)
        if j == nvars:
            yield scheme.vector(tuple(prefix))
            return
        lo = hi = None
        for coeffs, bound in compiled[j]:
            ra, rb = bound
            for i, zi in enumerate(prefix):
                if zi:
                    ca, cb = coeffs[i]
                    ra -= ca * zi
                    rb -= cb * zi
            aa, ab = coeffs[j]
            s = qsign(aa, ab, d)
            if s == 0:
                continue
            if s > 0:
                cand = qdiv_floor(ra, rb, aa, ab, d)
                hi = cand if hi is None else min(hi, cand)
            else:
                cand = qdiv_ceil(ra, rb, aa, ab, d)
                lo = cand if lo is None else max(lo, cand)
        if lo is None or hi is None or lo > hi:
            return
        for v in range(lo, hi + 1):
            yield from rec(prefix + [v])

    yield from rec([])
