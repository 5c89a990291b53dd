"""Exact window geometry.

1D windows are canonical unions of half-open intervals [a, b): sorted,
disjoint, abutting intervals merged.  2D windows are half-open parallelograms
and simple polygons.  A polygon carries one inclusion bit per boundary
constraint so that point membership is decided exactly under the half-open
conventions; all measures and boolean operations are exact.

Boundary convention on generic splits: the cut line belongs to the side whose
inward normal is lexicographically positive ("lower-left closed"), so the two
sides of any split partition the plane pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal, Sequence

from . import linear
from .exactnum import ExactNumber, GeneratorContext

Vec2 = tuple[ExactNumber, ExactNumber]


# --------------------------------------------------------------------------
# 1D: interval unions


class IntervalUnion:
    """Canonical finite union of half-open intervals [a_j, b_j)."""

    __slots__ = ("ctx", "intervals")

    def __init__(self, ctx: GeneratorContext, intervals: Sequence[tuple[ExactNumber, ExactNumber]]):
        self.ctx = ctx
        self.intervals = tuple(intervals)

    @classmethod
    def from_endpoints(cls, ctx: GeneratorContext, pairs: Iterable[tuple]) -> IntervalUnion:
        """Build and canonicalize: drop empty, sort, merge overlapping/abutting."""
        items = []
        for a, b in pairs:
            a, b = ctx.coerce(a), ctx.coerce(b)
            s = (b - a).sign()
            if s < 0:
                raise ValueError(f"interval with b < a: [{a}, {b})")
            if s > 0:
                items.append((a, b))
        items.sort(key=lambda ab: _sort_key(ab[0]))
        merged: list[tuple[ExactNumber, ExactNumber]] = []
        for a, b in items:
            if merged and (a - merged[-1][1]).sign() <= 0:
                pa, pb = merged[-1]
                merged[-1] = (pa, pb if (b - pb).sign() <= 0 else b)
            else:
                merged.append((a, b))
        return cls(ctx, merged)

    @classmethod
    def empty(cls, ctx: GeneratorContext) -> IntervalUnion:
        return cls(ctx, ())

    def is_empty(self) -> bool:
        return not self.intervals

    def measure(self) -> ExactNumber:
        total = self.ctx.zero
        for a, b in self.intervals:
            total = total + (b - a)
        return total

    def translate(self, t) -> IntervalUnion:
        t = self.ctx.coerce(t)
        return IntervalUnion(self.ctx, tuple((a + t, b + t) for a, b in self.intervals))

    def contains(self, x) -> bool:
        x = self.ctx.coerce(x)
        for a, b in self.intervals:
            if (x - a).sign() >= 0 and (x - b).sign() < 0:
                return True
        return False

    def endpoints(self) -> list[ExactNumber]:
        out = []
        for a, b in self.intervals:
            out.extend((a, b))
        return out

    def bbox(self) -> tuple[ExactNumber, ExactNumber]:
        if self.is_empty():
            return self.ctx.zero, self.ctx.zero
        return self.intervals[0][0], self.intervals[-1][1]

    def intersect(self, other: IntervalUnion) -> IntervalUnion:
        return boolean_1d(self, other, "intersect")

    def subtract(self, other: IntervalUnion) -> IntervalUnion:
        return boolean_1d(self, other, "subtract")

    def union(self, other: IntervalUnion) -> IntervalUnion:
        return boolean_1d(self, other, "union")

    def __eq__(self, other):
        return (
            isinstance(other, IntervalUnion)
            and self.ctx is other.ctx
            and self.intervals == other.intervals
        )

    def __hash__(self):
        return hash(tuple(self.intervals))

    def to_strings(self) -> list[list[str]]:
        return [[a.to_string(), b.to_string()] for a, b in self.intervals]

    def __repr__(self):
        if not self.intervals:
            return "IntervalUnion(empty)"
        return " u ".join(f"[{a}, {b})" for a, b in self.intervals)


def _sort_key(x: ExactNumber):
    # float pre-key with exact comparator fallback is unnecessary here:
    # canonicalization only needs a consistent total order
    return _ExactKey(x)


class _ExactKey:
    __slots__ = ("x",)

    def __init__(self, x: ExactNumber):
        self.x = x

    def __lt__(self, other):
        return (self.x - other.x).sign() < 0

    def __eq__(self, other):
        return (self.x - other.x).sign() == 0


def boolean_1d(
    a: IntervalUnion,
    b: IntervalUnion,
    op: Literal["intersect", "subtract", "union"],
) -> IntervalUnion:
    """Exact set operation on half-open unions; result canonical."""
    if a.ctx is not b.ctx:
        from .errors import ContextMismatch

        raise ContextMismatch("interval unions from different contexts")
    events: list[tuple[_ExactKey, int, int]] = []
    for lo, hi in a.intervals:
        events.append((_ExactKey(lo), 0, +1))
        events.append((_ExactKey(hi), 0, -1))
    for lo, hi in b.intervals:
        events.append((_ExactKey(lo), 1, +1))
        events.append((_ExactKey(hi), 1, -1))
    events.sort(key=lambda e: e[0])

    if op == "intersect":
        keep = lambda ia, ib: ia > 0 and ib > 0
    elif op == "subtract":
        keep = lambda ia, ib: ia > 0 and ib == 0
    elif op == "union":
        keep = lambda ia, ib: ia > 0 or ib > 0
    else:
        raise ValueError(f"unknown boolean op {op!r}")

    depth = [0, 0]
    out: list[tuple[ExactNumber, ExactNumber]] = []
    open_at: ExactNumber | None = None
    i = 0
    while i < len(events):
        x = events[i][0].x
        while i < len(events) and (events[i][0].x - x).sign() == 0:
            _, which, delta = events[i]
            depth[which] += delta
            i += 1
        inside = keep(depth[0], depth[1])
        if inside and open_at is None:
            open_at = x
        elif not inside and open_at is not None:
            if (x - open_at).sign() > 0:
                out.append((open_at, x))
            open_at = None
    assert open_at is None, "unbalanced interval events"
    return IntervalUnion.from_endpoints(a.ctx, out)


# --------------------------------------------------------------------------
# 2D: polygons with half-open bookkeeping


@dataclass(frozen=True)
class Constraint:
    """Half-plane n.x >= c (closed) or n.x > c (open), n pointing inward."""

    normal: Vec2
    offset: ExactNumber
    closed: bool

    def holds(self, pt: Vec2) -> bool:
        s = (self.normal[0] * pt[0] + self.normal[1] * pt[1] - self.offset).sign()
        return s > 0 or (s == 0 and self.closed)

    def on_boundary(self, pt: Vec2) -> bool:
        return (self.normal[0] * pt[0] + self.normal[1] * pt[1] - self.offset).is_zero()


def _cross(u: Vec2, v: Vec2) -> ExactNumber:
    return u[0] * v[1] - u[1] * v[0]


def _sub(u: Vec2, v: Vec2) -> Vec2:
    return (u[0] - v[0], u[1] - v[1])


def _add(u: Vec2, v: Vec2) -> Vec2:
    return (u[0] + v[0], u[1] + v[1])


def lex_positive(v: Vec2) -> bool:
    """First nonzero component positive; the tie-break behind 'lower-left closed'."""
    s = v[0].sign()
    if s != 0:
        return s > 0
    return v[1].sign() > 0


class Polygon:
    """Simple polygon with CCW vertex loop and per-edge inclusion bits.

    Membership is decided from the stored half-plane constraints, which makes
    it exact for convex polygons (every polygon produced by clipping a
    parallelogram is convex).  Non-convex polygons are fully supported for
    measure and face/weight computations, which use closure semantics.
    """

    __slots__ = ("ctx", "vertices", "edge_closed", "constraints", "_convex")

    def __init__(self, ctx, vertices, edge_closed, constraints=None):
        self.ctx = ctx
        self.vertices = tuple(vertices)
        self.edge_closed = tuple(edge_closed)
        if constraints is None and self.vertices:
            constraints = tuple(
                _edge_constraint(self.vertices[i],
                                 self.vertices[(i + 1) % len(self.vertices)],
                                 self.edge_closed[i])
                for i in range(len(self.vertices))
            )
        self.constraints = tuple(constraints or ())
        self._convex = None

    @classmethod
    def from_vertices(cls, ctx, vertices, edge_closed=None) -> Polygon:
        """Canonicalize: enforce CCW orientation, drop repeated points and
        collinear vertices whose adjacent edges carry the same inclusion bit."""
        pts = [(ctx.coerce(x), ctx.coerce(y)) for x, y in vertices]
        if len(pts) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        tags = list(edge_closed) if edge_closed is not None else [True] * len(pts)
        if len(tags) != len(pts):
            raise ValueError("one inclusion bit per edge required")
        area2 = ctx.zero
        for i, p in enumerate(pts):
            q = pts[(i + 1) % len(pts)]
            area2 = area2 + _cross(p, q)
        s = area2.sign()
        if s == 0:
            raise ValueError("degenerate polygon (zero area)")
        if s < 0:
            # reverse loop; edge i (v_i -> v_{i+1}) becomes edge (n-1-i) reversed
            pts.reverse()
            tags = list(reversed(tags[-1:] + tags[:-1]))
        pts, tags = _dedupe_loop(pts, tags)
        if len(pts) < 3:
            raise ValueError("degenerate polygon after canonicalization")
        poly = cls(ctx, pts, tags)
        if not poly._is_simple():
            raise ValueError("polygon boundary self-intersects")
        return poly

    # -- geometry ----------------------------------------------------------

    def edges(self):
        n = len(self.vertices)
        for i in range(n):
            yield self.vertices[i], self.vertices[(i + 1) % n], self.edge_closed[i]

    def measure(self) -> ExactNumber:
        total = self.ctx.zero
        n = len(self.vertices)
        for i in range(n):
            total = total + _cross(self.vertices[i], self.vertices[(i + 1) % n])
        return total / 2

    def translate(self, v: Sequence) -> Polygon:
        v = (self.ctx.coerce(v[0]), self.ctx.coerce(v[1]))
        verts = tuple(_add(p, v) for p in self.vertices)
        cons = tuple(
            Constraint(c.normal, c.offset + c.normal[0] * v[0] + c.normal[1] * v[1], c.closed)
            for c in self.constraints
        )
        return Polygon(self.ctx, verts, self.edge_closed, cons)

    def is_convex(self) -> bool:
        if self._convex is None:
            n = len(self.vertices)
            convex = True
            for i in range(n):
                a = self.vertices[i]
                b = self.vertices[(i + 1) % n]
                c = self.vertices[(i + 2) % n]
                if _cross(_sub(b, a), _sub(c, b)).sign() < 0:
                    convex = False
                    break
            self._convex = convex
        return self._convex

    def contains(self, pt: Sequence) -> bool:
        """Exact half-open membership (convex polygons only)."""
        if not self.is_convex():
            raise ValueError("half-open membership implemented for convex polygons only")
        pt = (self.ctx.coerce(pt[0]), self.ctx.coerce(pt[1]))
        return all(c.holds(pt) for c in self.constraints)

    def bbox(self):
        xs = [p[0] for p in self.vertices]
        ys = [p[1] for p in self.vertices]
        return (
            (min(xs, key=_ExactKey), max(xs, key=_ExactKey)),
            (min(ys, key=_ExactKey), max(ys, key=_ExactKey)),
        )

    def _is_simple(self) -> bool:
        n = len(self.vertices)
        for i in range(n):
            a1, a2 = self.vertices[i], self.vertices[(i + 1) % n]
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue
                b1, b2 = self.vertices[j], self.vertices[(j + 1) % n]
                if _segments_cross(a1, a2, b1, b2):
                    return False
        return True

    def to_dict(self) -> dict:
        return {
            "vertices": [[p[0].to_string(), p[1].to_string()] for p in self.vertices],
            "edge_closed": list(self.edge_closed),
        }

    def __repr__(self):
        pts = ", ".join(f"({p[0]}, {p[1]})" for p in self.vertices)
        return f"Polygon[{pts}]"


def _dedupe_loop(pts, tags):
    # drop coincident consecutive vertices
    out_p, out_t = [], []
    n = len(pts)
    for i in range(n):
        j = (i + 1) % n
        if _sub(pts[j], pts[i])[0].is_zero() and _sub(pts[j], pts[i])[1].is_zero():
            continue
        out_p.append(pts[i])
        out_t.append(tags[i])
    pts, tags = out_p, out_t
    # drop collinear middles when adjacent tags agree
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        n = len(pts)
        for i in range(n):
            prev = pts[(i - 1) % n]
            cur = pts[i]
            nxt = pts[(i + 1) % n]
            if _cross(_sub(cur, prev), _sub(nxt, cur)).is_zero() and (
                tags[(i - 1) % n] == tags[i]
            ):
                del pts[i]
                del tags[i]
                changed = True
                break
    return pts, tags


def _segments_cross(a1, a2, b1, b2) -> bool:
    d1 = _cross(_sub(a2, a1), _sub(b1, a1)).sign()
    d2 = _cross(_sub(a2, a1), _sub(b2, a1)).sign()
    d3 = _cross(_sub(b2, b1), _sub(a1, b1)).sign()
    d4 = _cross(_sub(b2, b1), _sub(a2, b1)).sign()
    return d1 * d2 < 0 and d3 * d4 < 0


def _edge_constraint(p: Vec2, q: Vec2, closed: bool) -> Constraint:
    # interior of a CCW polygon is left of p -> q
    d = _sub(q, p)
    normal = (-d[1], d[0])
    return Constraint(normal, normal[0] * p[0] + normal[1] * p[1], closed)


@dataclass(frozen=True)
class Parallelogram:
    """Half-open parallelogram {anchor + t1 v1 + t2 v2 : 0 <= t_i < 1}."""

    anchor: Vec2
    v1: Vec2
    v2: Vec2

    def __post_init__(self):
        if _cross(self.v1, self.v2).is_zero():
            raise ValueError("spanning vectors are linearly dependent")

    @property
    def ctx(self):
        return self.v1[0].ctx

    def measure(self) -> ExactNumber:
        d = _cross(self.v1, self.v2)
        return -d if d.sign() < 0 else d

    def translate(self, v: Sequence) -> Parallelogram:
        ctx = self.ctx
        v = (ctx.coerce(v[0]), ctx.coerce(v[1]))
        return Parallelogram(_add(self.anchor, v), self.v1, self.v2)

    def coordinates(self, pt: Sequence) -> tuple[ExactNumber, ExactNumber]:
        """Spanning coordinates (t1, t2) of a point."""
        ctx = self.ctx
        pt = (ctx.coerce(pt[0]), ctx.coerce(pt[1]))
        rel = _sub(pt, self.anchor)
        det = _cross(self.v1, self.v2)
        t1 = _cross(rel, self.v2) / det
        t2 = _cross(self.v1, rel) / det
        return t1, t2

    def contains(self, pt: Sequence) -> bool:
        t1, t2 = self.coordinates(pt)
        return (t1.sign() >= 0 and (t1 - 1).sign() < 0
                and t2.sign() >= 0 and (t2 - 1).sign() < 0)

    def as_polygon(self) -> Polygon:
        """Vertex loop with half-open tags: the two anchor edges are closed."""
        a = self.anchor
        b = _add(a, self.v1)
        c = _add(b, self.v2)
        d = _add(a, self.v2)
        ctx = self.ctx
        if _cross(self.v1, self.v2).sign() > 0:
            verts = [a, b, c, d]
            tags = [True, False, False, True]  # a->b (v1 edge), far, far, d->a (v2 edge)
        else:
            verts = [a, d, c, b]
            tags = [True, False, False, True]
        return Polygon.from_vertices(ctx, verts, tags)

    def bbox(self):
        return self.as_polygon().bbox()

    def to_dict(self) -> dict:
        return {
            "anchor": [self.anchor[0].to_string(), self.anchor[1].to_string()],
            "v1": [self.v1[0].to_string(), self.v1[1].to_string()],
            "v2": [self.v2[0].to_string(), self.v2[1].to_string()],
        }


# --------------------------------------------------------------------------
# measure / translate entry points shared across window kinds


def measure(w):
    return w.measure()


def translate(w, v):
    return w.translate(v)


def clip_polygon_halfplane(
    poly: Polygon,
    normal: Sequence,
    offset,
    keep: Literal["ge", "le"] = "ge",
    boundary_closed: bool | None = None,
) -> Polygon | None:
    """Clip by n.x >= offset (or <=), exact.

    The cut edge carries `boundary_closed`; default follows the lower-left
    convention (closed on the side whose inward normal is lexicographically
    positive).  Returns None for an empty result.
    """
    ctx = poly.ctx
    n = (ctx.coerce(normal[0]), ctx.coerce(normal[1]))
    c = ctx.coerce(offset)
    if keep == "le":
        n = (-n[0], -n[1])
        c = -c
    if boundary_closed is None:
        boundary_closed = lex_positive(n)

    def side(p: Vec2) -> int:
        return (n[0] * p[0] + n[1] * p[1] - c).sign()

    verts = list(poly.vertices)
    tags = list(poly.edge_closed)
    m = len(verts)
    out_pts: list[Vec2] = []
    out_tags: list[bool] = []
    for i in range(m):
        a, b = verts[i], verts[(i + 1) % m]
        ta = tags[i]
        sa, sb = side(a), side(b)
        if sa >= 0:
            # a survives; its outgoing run is the original edge unless the
            # edge immediately exits through the cut line
            if sa == 0 and sb < 0:
                out_pts.append(a)
                out_tags.append(boundary_closed)
            else:
                out_pts.append(a)
                out_tags.append(ta)
            if sa > 0 and sb < 0:
                x = _line_edge_intersection(n, c, a, b)
                out_pts.append(x)
                out_tags.append(boundary_closed)
        else:
            if sb > 0:
                x = _line_edge_intersection(n, c, a, b)
                out_pts.append(x)
                out_tags.append(ta)
            # sb == 0: b emitted on its own turn; the incoming run along the
            # cut line is covered by the previous exit point's tag
    pts, tg = _dedupe_loop(out_pts, out_tags)
    if len(pts) < 3:
        return None
    area2 = ctx.zero
    for i, p in enumerate(pts):
        area2 = area2 + _cross(p, pts[(i + 1) % len(pts)])
    if area2.sign() <= 0:
        return None
    new_cons = poly.constraints + (Constraint(n, c, boundary_closed),)
    return Polygon(ctx, pts, tg, new_cons)


def _line_edge_intersection(n: Vec2, c: ExactNumber, a: Vec2, b: Vec2) -> Vec2:
    d = _sub(b, a)
    denom = n[0] * d[0] + n[1] * d[1]
    t = (c - n[0] * a[0] - n[1] * a[1]) / denom
    return (a[0] + t * d[0], a[1] + t * d[1])


def split_polygon(poly: Polygon, normal: Sequence, offset):
    """Both sides of a cut with complementary boundary bits (pointwise partition)."""
    ctx = poly.ctx
    n = (ctx.coerce(normal[0]), ctx.coerce(normal[1]))
    c = ctx.coerce(offset)
    pos_closed = lex_positive(n)
    pos = clip_polygon_halfplane(poly, n, c, "ge", boundary_closed=pos_closed)
    neg = clip_polygon_halfplane(poly, n, c, "le", boundary_closed=not pos_closed)
    return neg, pos
