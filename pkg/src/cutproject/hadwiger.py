"""Flags, weight functions and translation-group Hadwiger invariants.

1D: a flag is a point splitting the line; the weight counts left endpoints
minus right endpoints sitting exactly at the point, and the invariant sums
the weight over the orbit of the point under the translation group G.

2D: a rank-1 flag is an oriented line (normal points into the positive
half-plane); a rank-0 flag adds a point on that line and a positive half-line
within it.  Weights sum signed face volumes over vertex-in-edge chains; the
invariant sums weights over the finitely many group translates of the flag
that meet faces of the polygon.  Flags are canonicalized (normal scaled so
its first nonzero component has magnitude one) so distinct translates are
decidable syntactically; rank-1 "lengths" are measured in units of the flag's
canonical direction vector, which is consistent across all translates of one
flag and is exactly what invariant comparisons need.  Flipping a flag's
orientation negates its invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import MembershipUnknown
from .exactnum import ExactNumber, GeneratorContext
from .scheme import GroupOracle, Membership
from .window import IntervalUnion, Polygon, Vec2, _cross, _sub


# --------------------------------------------------------------------------
# 1D


@dataclass(frozen=True)
class Flag1D:
    """A point with a choice of positive half-line (right by default)."""

    point: ExactNumber
    positive_right: bool = True


def weight_1d(s: IntervalUnion, flag: Flag1D) -> int:
    """+1 per left endpoint at the flag point, -1 per right endpoint
    (signs flip when the positive side is the left half-line)."""
    total = 0
    for a, b in s.intervals:
        if (a - flag.point).is_zero():
            total += 1
        if (b - flag.point).is_zero():
            total -= 1
    return total if flag.positive_right else -total


@dataclass
class InvariantValue:
    """A Hadwiger invariant evaluation with its contributing faces."""

    flag: object
    value: object  # int for rank 0 / 1D, ExactNumber for 2D rank 1
    contributions: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        val = self.value.to_string() if isinstance(self.value, ExactNumber) else self.value
        out = {"value": val, "contributions": self.contributions}
        if isinstance(self.value, ExactNumber):
            out["value_float"] = self.value.as_float()
        return out


def hadwiger_1d(
    s: IntervalUnion,
    p,
    oracle: GroupOracle,
    positive_right: bool = True,
) -> InvariantValue:
    """Sum of endpoint counts over the G-orbit of p: the number of left
    endpoints minus right endpoints congruent to p modulo G."""
    ctx = s.ctx
    p = ctx.coerce(p)
    total = 0
    contributions = []
    for a, b in s.intervals:
        for endpoint, kind, delta in ((a, "left", 1), (b, "right", -1)):
            res = oracle.member_scalar(endpoint - p)
            if res.status == "unknown":
                raise MembershipUnknown(f"orbit test for endpoint {endpoint} undecided")
            if res.is_member:
                total += delta
                contributions.append(
                    {
                        "endpoint": endpoint.to_string(),
                        "kind": kind,
                        "sign": delta,
                        "witness": list(res.witness),
                    }
                )
    if not positive_right:
        total = -total
        for c in contributions:
            c["sign"] = -c["sign"]
    return InvariantValue(Flag1D(p, positive_right), total, contributions)


# --------------------------------------------------------------------------
# 2D flags


def _lex_scale(ctx: GeneratorContext, v: Vec2):
    """Positive scalar making the first nonzero component have magnitude 1."""
    for comp in v:
        s = comp.sign()
        if s:
            mag = comp if s > 0 else -comp
            return ctx.one / mag
    raise ValueError("zero vector cannot be canonicalized")


@dataclass(frozen=True)
class Flag2D:
    """rank 1: oriented line n.x = c (positive side n.x > c);
    rank 0: additionally a point on the line and a positive half-line,
    {point + u*direction : u*halfline_sign > 0} with the canonical direction
    rot90(normal)."""

    rank: int
    normal: Vec2
    offset: ExactNumber
    point: Vec2 | None = None
    halfline_sign: int = 1

    @classmethod
    def line(cls, ctx: GeneratorContext, normal: Sequence, offset) -> Flag2D:
        n = (ctx.coerce(normal[0]), ctx.coerce(normal[1]))
        c = ctx.coerce(offset)
        k = _lex_scale(ctx, n)
        return cls(1, (n[0] * k, n[1] * k), c * k)

    @classmethod
    def pointed(
        cls, ctx: GeneratorContext, normal: Sequence, offset, point: Sequence,
        halfline_sign: int = 1,
    ) -> Flag2D:
        base = cls.line(ctx, normal, offset)
        p = (ctx.coerce(point[0]), ctx.coerce(point[1]))
        if not (base.normal[0] * p[0] + base.normal[1] * p[1] - base.offset).is_zero():
            raise ValueError("flag point must lie on the flag line")
        if halfline_sign not in (1, -1):
            raise ValueError("halfline_sign must be +1 or -1")
        return cls(0, base.normal, base.offset, p, halfline_sign)

    @property
    def direction(self) -> Vec2:
        return (-self.normal[1], self.normal[0])

    def translate(self, g: Vec2) -> Flag2D:
        c = self.offset + self.normal[0] * g[0] + self.normal[1] * g[1]
        p = None if self.point is None else (self.point[0] + g[0], self.point[1] + g[1])
        return Flag2D(self.rank, self.normal, c, p, self.halfline_sign)

    def describe(self) -> dict:
        d = {
            "rank": self.rank,
            "normal": [self.normal[0].to_string(), self.normal[1].to_string()],
            "offset": self.offset.to_string(),
        }
        if self.point is not None:
            d["point"] = [self.point[0].to_string(), self.point[1].to_string()]
            d["halfline_sign"] = self.halfline_sign
        return d


def _edge_on_line(flag: Flag2D, p: Vec2, q: Vec2) -> bool:
    n, c = flag.normal, flag.offset
    return (n[0] * p[0] + n[1] * p[1] - c).is_zero() and (
        n[0] * q[0] + n[1] * q[1] - c
    ).is_zero()


def _edge_parallel(flag: Flag2D, p: Vec2, q: Vec2) -> bool:
    return _cross(_sub(q, p), flag.direction).is_zero()


def _interior_side(flag: Flag2D, p: Vec2, q: Vec2) -> int:
    """+1 when the polygon interior adjoins the flag line from the positive
    half-plane along the CCW edge p -> q, else -1."""
    inward = (-(q[1] - p[1]), q[0] - p[0])
    s = (inward[0] * flag.normal[0] + inward[1] * flag.normal[1]).sign()
    assert s != 0, "edge claimed parallel to flag line but inward normal is orthogonal"
    return s


def _direction_component(flag: Flag2D, vec: Vec2) -> ExactNumber:
    """Coefficient t with vec = t * direction (vec parallel to the flag line)."""
    u = flag.direction
    if not u[0].is_zero():
        return vec[0] / u[0]
    return vec[1] / u[1]


def weight_2d(s: Polygon, flag: Flag2D) -> ExactNumber | int:
    """Weight of the polygon for one flag: rank 1 sums signed edge lengths on
    the flag line (in canonical direction units); rank 0 sums signed vertex
    counts over vertex-in-edge chains at the flag point."""
    if flag.rank == 1:
        total = s.ctx.zero
        for p, q, _ in s.edges():
            if _edge_on_line(flag, p, q):
                t = _direction_component(flag, _sub(q, p))
                length = t if t.sign() > 0 else -t
                total = total + length * _interior_side(flag, p, q)
        return total
    total = 0
    for i, v in enumerate(s.vertices):
        if not (_sub(v, flag.point)[0].is_zero() and _sub(v, flag.point)[1].is_zero()):
            continue
        total += _vertex_chains(s, flag, i)
    return total


def _vertex_chains(s: Polygon, flag: Flag2D, i: int) -> int:
    """Signed chain count at vertex i for a rank-0 flag whose point is there."""
    n = len(s.vertices)
    v = s.vertices[i]
    total = 0
    for other, p, q in (
        (s.vertices[(i + 1) % n], v, s.vertices[(i + 1) % n]),
        (s.vertices[(i - 1) % n], s.vertices[(i - 1) % n], v),
    ):
        if not _edge_on_line(flag, p, q):
            continue
        t = _direction_component(flag, _sub(other, v))
        eps0 = 1 if t.sign() == flag.halfline_sign else -1
        eps1 = _interior_side(flag, p, q)
        total += eps0 * eps1
    return total


def hadwiger_2d(s: Polygon, flag: Flag2D, oracle: GroupOracle) -> InvariantValue:
    """Sum of weights over the distinct translates flag + g (g in G) meeting
    faces of the polygon.  Rank 1 asks whether the group moves the flag line
    onto each parallel edge line; rank 0 asks whether the flag point reaches
    each vertex."""
    ctx = s.ctx
    if flag.rank == 1:
        total = ctx.zero
        contributions = []
        for p, q, _ in s.edges():
            if not _edge_parallel(flag, p, q):
                continue
            c_edge = flag.normal[0] * p[0] + flag.normal[1] * p[1]
            res = oracle.line_member(flag.normal, c_edge - flag.offset)
            if res.status == "unknown":
                raise MembershipUnknown("line translation membership undecided")
            if not res.is_member:
                continue
            t = _direction_component(flag, _sub(q, p))
            length = t if t.sign() > 0 else -t
            eps = _interior_side(flag, p, q)
            total = total + length * eps
            contributions.append(
                {
                    "edge": [[p[0].to_string(), p[1].to_string()],
                             [q[0].to_string(), q[1].to_string()]],
                    "epsilon": eps,
                    "length": length.to_string(),
                    "witness": list(res.witness),
                }
            )
        return InvariantValue(flag, total, contributions)

    total = 0
    contributions = []
    for i, v in enumerate(s.vertices):
        g = _sub(v, flag.point)
        res = oracle.member(g)
        if res.status == "unknown":
            raise MembershipUnknown("vertex orbit membership undecided")
        if not res.is_member:
            continue
        translated = flag.translate(g)
        chains = _vertex_chains(s, translated, i)
        if chains:
            total += chains
            contributions.append(
                {
                    "vertex": [v[0].to_string(), v[1].to_string()],
                    "chains": chains,
                    "witness": list(res.witness),
                }
            )
    return InvariantValue(flag, total, contributions)


# --------------------------------------------------------------------------
# face-aligned flag families (nonzero invariants only occur here)


def face_flags_1d(s: IntervalUnion) -> list[ExactNumber]:
    return s.endpoints()


def face_flags_2d(s: Polygon) -> list[Flag2D]:
    ctx = s.ctx
    flags: list[Flag2D] = []
    seen = set()
    for p, q, _ in s.edges():
        d = _sub(q, p)
        normal = (-d[1], d[0])  # inward: positive side = interior side
        offset = normal[0] * p[0] + normal[1] * p[1]
        line = Flag2D.line(ctx, normal, offset)
        key = (line.normal[0], line.normal[1], line.offset)
        if key not in seen:
            seen.add(key)
            flags.append(line)
        for vertex, sign in ((p, 1), (q, -1)):
            flags.append(Flag2D.pointed(ctx, normal, offset, vertex, sign))
    return flags
