"""Constructing and verifying translation equidecompositions of windows.

1D: the greedy residual-intersection partition.  Given windows of equal
measure and a list of group-certified shifts, repeatedly intersect what is
left of the source with the back-shifted remainder of the target; success
means the residual is exactly empty (half-open semantics make "up to measure
zero" decidable).  Shift candidates come from endpoint differences filtered
by group membership: any interval-union partition into finitely many shifted
pieces must move some endpoint onto an endpoint.

2D: the shear decomposition.  A parallelogram spanned by (w1, w2) is cut
along level strips of an affine functional into at most ceil(|s|)+1 pieces
that translate by integer multiples of w1 onto the parallelogram spanned by
(w1, w2 + s*w1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import hadwiger
from .errors import MeasureMismatch, MembershipUnknown, NotInG, ResidualNonzero
from .exactnum import ExactNumber
from .scheme import GroupOracle, Membership
from .window import (
    IntervalUnion,
    Parallelogram,
    Polygon,
    clip_polygon_halfplane,
)


@dataclass
class Piece:
    """One piece of a decomposition: region, shift, and the shift's witness."""

    region: IntervalUnion | Polygon
    shift: ExactNumber | tuple[ExactNumber, ...]
    witness: tuple[int, ...]

    def shifted(self):
        return self.region.translate(self.shift)

    def to_dict(self) -> dict:
        if isinstance(self.region, IntervalUnion):
            region = {"intervals": self.region.to_strings()}
            shift = self.shift.to_string()
        else:
            region = self.region.to_dict()
            shift = [x.to_string() for x in self.shift]
        return {"region": region, "shift": shift, "witness": list(self.witness)}


@dataclass
class PieceList:
    source: IntervalUnion | Parallelogram
    target: IntervalUnion | Parallelogram
    pieces: list[Piece] = field(default_factory=list)

    def __len__(self):
        return len(self.pieces)

    def to_dict(self) -> dict:
        return {"pieces": [p.to_dict() for p in self.pieces]}


# --------------------------------------------------------------------------
# 1D


def _certify_shift(oracle: GroupOracle, s: ExactNumber) -> tuple[int, ...]:
    res = oracle.member_scalar(s)
    if res.status == "unknown":
        raise MembershipUnknown(f"shift {s} membership undecided")
    if not res.is_member:
        raise NotInG(f"shift {s} is not in the translation group")
    return res.witness


def greedy_decompose_1d(
    w: IntervalUnion,
    w2: IntervalUnion,
    shifts: list,
    oracle: GroupOracle,
) -> PieceList:
    """Residual-intersection partition of w onto w2 using the given shifts.

    Succeeds iff the residual is exactly empty; raises ResidualNonzero with
    the uncovered remainder otherwise.
    """
    ctx = w.ctx
    if not (w.measure() - w2.measure()).is_zero():
        raise MeasureMismatch("windows must have equal measure")
    shift_list = [ctx.coerce(s) for s in shifts]
    witnesses = [_certify_shift(oracle, s) for s in shift_list]
    rest = w
    rest2 = w2
    pieces: list[Piece] = []
    for s, wit in zip(shift_list, witnesses):
        grab = rest.intersect(rest2.translate(-s))
        if grab.is_empty():
            continue
        pieces.append(Piece(grab, s, wit))
        rest = rest.subtract(grab)
        rest2 = rest2.subtract(grab.translate(s))
        if rest.is_empty():
            break
    if not rest.is_empty():
        raise ResidualNonzero(rest, shift_list)
    assert rest2.is_empty(), "equal measures with empty source residual force empty target residual"
    return PieceList(w, w2, pieces)


def propose_shifts_1d(w: IntervalUnion, w2: IntervalUnion, oracle: GroupOracle) -> list[ExactNumber]:
    """Group-certified endpoint differences, deduplicated, ordered by the
    max-norm of their witness coordinates (then lexicographically)."""
    candidates: dict[tuple, tuple[ExactNumber, tuple[int, ...]]] = {}
    for e2 in w2.endpoints():
        for e1 in w.endpoints():
            diff = e2 - e1
            key = diff.coeffs
            if key in candidates:
                continue
            res = oracle.member_scalar(diff)
            if res.status == "unknown":
                raise MembershipUnknown(f"difference {diff} membership undecided")
            if res.is_member:
                candidates[key] = (diff, res.witness)
    ordered = sorted(
        candidates.values(),
        key=lambda item: (max((abs(c) for c in item[1]), default=0), item[1]),
    )
    return [diff for diff, _ in ordered]


# --------------------------------------------------------------------------
# 2D shear


def shear_decompose_2d(p: Parallelogram, s, oracle: GroupOracle) -> PieceList:
    """Decompose the parallelogram spanned by (w1, w2) onto the one spanned by
    (w1, w2 + s*w1); every piece shifts by an integer multiple of w1.

    Pieces are the strips k <= t1 - s*t2 < k+1 in spanning coordinates; there
    are at most ceil(|s|) + 1 of them.
    """
    ctx = p.ctx
    s = ctx.coerce(s)
    w1, w2 = p.v1, p.v2
    res = oracle.member(w1)
    if res.status == "unknown":
        raise MembershipUnknown("w1 membership undecided")
    if not res.is_member:
        raise NotInG("first spanning vector is not in the translation group")
    w1_witness = res.witness

    target = Parallelogram(p.anchor, w1, (w2[0] + s * w1[0], w2[1] + s * w1[1]))

    # covector c with c.w1 = 1, c.w2 = -s, applied to x - anchor
    det = w1[0] * w2[1] - w1[1] * w2[0]
    cx = (w2[1] + s * w1[1]) / det
    cy = -(w2[0] + s * w1[0]) / det
    c0 = cx * p.anchor[0] + cy * p.anchor[1]

    # strips [k, k+1) meeting the range of t1 - s*t2 over [0,1)^2
    abs_s = -s if s.sign() < 0 else s
    lo_k = min(0, (-s).floor())
    hi_k = max(0, (1 - s).ceil() - 1)
    poly = p.as_polygon()
    pieces: list[Piece] = []
    for k in range(lo_k, hi_k + 1):
        lower = clip_polygon_halfplane(
            poly, (cx, cy), c0 + k, keep="ge", boundary_closed=True
        )
        if lower is None:
            continue
        strip = clip_polygon_halfplane(
            lower, (cx, cy), c0 + k + 1, keep="le", boundary_closed=False
        )
        if strip is None:
            continue
        shift = (w1[0] * (-k), w1[1] * (-k))
        witness = tuple(z * (-k) for z in w1_witness)
        pieces.append(Piece(strip, shift, witness))
    assert len(pieces) <= abs_s.ceil() + 1
    total = sum((pc.region.measure() for pc in pieces), ctx.zero)
    assert (total - p.measure()).is_zero(), "strips must exhaust the parallelogram"
    return PieceList(p, target, pieces)


# --------------------------------------------------------------------------
# composition and verification


def compose(ab: PieceList, bc: PieceList) -> PieceList:
    """Common refinement realizing A -> C from A -> B and B -> C."""
    pieces: list[Piece] = []
    for pa in ab.pieces:
        moved = pa.shifted()
        for pb in bc.pieces:
            if isinstance(moved, IntervalUnion):
                overlap = moved.intersect(pb.region)
                if overlap.is_empty():
                    continue
                region = overlap.translate(-pa.shift)
                shift = pa.shift + pb.shift
            else:
                overlap = _intersect_convex(moved, pb.region)
                if overlap is None:
                    continue
                region = overlap.translate((-pa.shift[0], -pa.shift[1]))
                shift = (pa.shift[0] + pb.shift[0], pa.shift[1] + pb.shift[1])
            witness = tuple(x + y for x, y in zip(pa.witness, pb.witness))
            pieces.append(Piece(region, shift, witness))
    return PieceList(ab.source, bc.target, pieces)


def _intersect_convex(a: Polygon, b: Polygon) -> Polygon | None:
    out = a
    for con in b.constraints:
        out = clip_polygon_halfplane(
            out, con.normal, con.offset, keep="ge", boundary_closed=con.closed
        )
        if out is None:
            return None
    return out


@dataclass
class VerifyReport:
    clauses: dict[str, bool]
    details: dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.clauses.values())

    def to_dict(self) -> dict:
        return {"passed": self.passed, "clauses": self.clauses, "details": self.details}


def verify(pl: PieceList, w, w2, oracle: GroupOracle) -> VerifyReport:
    """Re-check every decomposition clause: disjointness, coverage of source
    and target up to the half-open boundary convention, group membership of
    every shift, measure preservation, and agreement of all face-aligned
    Hadwiger invariants between source and target."""
    if isinstance(w, IntervalUnion):
        return _verify_1d(pl, w, w2, oracle)
    return _verify_2d(pl, w, w2, oracle)


def _verify_1d(pl: PieceList, w: IntervalUnion, w2: IntervalUnion, oracle) -> VerifyReport:
    ctx = w.ctx
    clauses: dict[str, bool] = {}
    details: dict[str, str] = {}

    union = IntervalUnion.empty(ctx)
    disjoint = True
    for piece in pl.pieces:
        if not union.intersect(piece.region).is_empty():
            disjoint = False
        union = union.union(piece.region)
    clauses["pieces_disjoint"] = disjoint
    clauses["source_covered"] = union == w

    shifted = IntervalUnion.empty(ctx)
    disjoint2 = True
    for piece in pl.pieces:
        img = piece.shifted()
        if not shifted.intersect(img).is_empty():
            disjoint2 = False
        shifted = shifted.union(img)
    clauses["images_disjoint"] = disjoint2
    clauses["target_covered"] = shifted == w2

    member_ok = True
    for piece in pl.pieces:
        res = oracle.member_scalar(piece.shift)
        if not res.is_member:
            member_ok = False
            details["shift_member"] = f"shift {piece.shift} not certified"
    clauses["shifts_in_group"] = member_ok

    clauses["measure_preserved"] = (w.measure() - w2.measure()).is_zero() and all(
        (p.region.measure() - p.shifted().measure()).is_zero() for p in pl.pieces
    )

    inv_ok = True
    for p in hadwiger.face_flags_1d(w) + hadwiger.face_flags_1d(w2):
        if hadwiger.hadwiger_1d(w, p, oracle).value != hadwiger.hadwiger_1d(w2, p, oracle).value:
            inv_ok = False
            details["invariants"] = f"invariant mismatch at flag {p}"
            break
    clauses["invariants_agree"] = inv_ok
    return VerifyReport(clauses, details)


def _verify_2d(pl: PieceList, w, w2, oracle) -> VerifyReport:
    clauses: dict[str, bool] = {}
    details: dict[str, str] = {}
    poly_w = w.as_polygon() if isinstance(w, Parallelogram) else w
    poly_w2 = w2.as_polygon() if isinstance(w2, Parallelogram) else w2
    ctx = poly_w.ctx

    def area(p):
        return ctx.zero if p is None else p.measure()

    pieces = [p.region for p in pl.pieces]
    images = [p.shifted() for p in pl.pieces]

    disjoint = True
    for i in range(len(pieces)):
        for j in range(i + 1, len(pieces)):
            if area(_intersect_convex(pieces[i], pieces[j])).sign() != 0:
                disjoint = False
    clauses["pieces_disjoint"] = disjoint

    inside = all(
        (area(_intersect_convex(p, poly_w)) - p.measure()).is_zero() for p in pieces
    )
    total = sum((p.measure() for p in pieces), ctx.zero)
    clauses["source_covered"] = inside and (total - poly_w.measure()).is_zero()

    disjoint2 = True
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            if area(_intersect_convex(images[i], images[j])).sign() != 0:
                disjoint2 = False
    clauses["images_disjoint"] = disjoint2

    inside2 = all(
        (area(_intersect_convex(p, poly_w2)) - p.measure()).is_zero() for p in images
    )
    total2 = sum((p.measure() for p in images), ctx.zero)
    clauses["target_covered"] = inside2 and (total2 - poly_w2.measure()).is_zero()

    member_ok = True
    for piece in pl.pieces:
        res = oracle.member(piece.shift)
        if not res.is_member:
            member_ok = False
            details["shift_member"] = "a piece shift is not certified"
    clauses["shifts_in_group"] = member_ok

    clauses["measure_preserved"] = (poly_w.measure() - poly_w2.measure()).is_zero()

    inv_ok = True
    for flag in hadwiger.face_flags_2d(poly_w) + hadwiger.face_flags_2d(poly_w2):
        a = hadwiger.hadwiger_2d(poly_w, flag, oracle).value
        b = hadwiger.hadwiger_2d(poly_w2, flag, oracle).value
        same = (a == b) if isinstance(a, int) else (a - b).is_zero()
        if not same:
            inv_ok = False
            details["invariants"] = f"invariant mismatch at flag {flag.describe()}"
            break
    clauses["invariants_agree"] = inv_ok
    return VerifyReport(clauses, details)
