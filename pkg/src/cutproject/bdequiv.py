"""Discrepancy, bounded-remainder evidence, and bounded-distance decisions.

The discrepancy trace is exact: orbit points, window membership and the
running maximum of |D_n| are all decided in exact arithmetic.  For contexts
without opaque generators the hot loop runs on scaled integer pairs
(a + b*sqrt(D))/L, which keeps 10^5-step traces under a second; the generic
ExactNumber path remains available and is cross-checked in tests.

Verdicts follow the decision logic of the simple-quasicrystal and
interval-union characterizations: group memberships are decided exactly with
witnesses, negative verdicts carry a nonzero-invariant certificate, and the
empirical routines (brs evidence, matching displacement) are labeled as such
and never claim proof strength.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import hadwiger
from .errors import EmptySample, MembershipUnknown
from .exactnum import ExactNumber, GeneratorContext
from .modelset import BlockDecomposition
from .scheme import GroupOracle, Membership, Scheme, member_p2
from .window import IntervalUnion, Parallelogram

VERDICT_LATTICE = "EquivalentToLattice"
VERDICT_TRIVIAL = "EquivalentTrivially"
VERDICT_NOT = "NotEquivalent"
VERDICT_UNKNOWN = "Unknown"


@dataclass
class BdDecision:
    verdict: str
    witnesses: dict = field(default_factory=dict)
    certificates: list = field(default_factory=list)
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "witnesses": self.witnesses,
            "certificates": self.certificates,
            "notes": self.notes,
        }


# --------------------------------------------------------------------------
# discrepancy


def _reduce_mod_one(x: ExactNumber) -> ExactNumber:
    return x - x.floor()


def _window_mod_one(s: IntervalUnion) -> list[tuple[ExactNumber, ExactNumber]]:
    """Split the window at integers and shift into [0, 1), keeping
    multiplicity (pieces are not merged)."""
    pieces = []
    for a, b in s.intervals:
        k = a.floor()
        while True:
            lo = a - k if (a - k).sign() > 0 else a.ctx.zero
            hi_candidate = b - k
            hi = hi_candidate if (hi_candidate - 1).sign() < 0 else a.ctx.one
            if (hi - lo).sign() > 0:
                pieces.append((lo, hi))
            k += 1
            if (b - k).sign() <= 0:
                break
    return pieces


class _QuadScaler:
    """Maps module values of a quadratic/rational context onto integer pairs
    (a, b) representing (a + b*sqrt(D))/L for a common denominator L."""

    def __init__(self, ctx: GeneratorContext, values: list[ExactNumber]):
        self.d = ctx.quadratic.D if ctx.quadratic is not None else 0
        denoms = []
        for v in values:
            a, b = v._ab()
            denoms.extend((a.denominator, b.denominator))
        self.scale = math.lcm(*denoms) if denoms else 1

    def pair(self, v: ExactNumber) -> tuple[int, int]:
        a, b = v._ab()
        return int(a * self.scale), int(b * self.scale)

    def sign(self, pair: tuple[int, int]) -> int:
        a, b = pair
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        lhs, rhs = a * a, b * b * self.d
        if a > 0:
            return 1 if lhs > rhs else -1
        return 1 if rhs > lhs else -1


@dataclass
class DiscrepancyTrace:
    """Orbit-counting discrepancy D_n = (hits up to n) - n * mes S.

    `hits` stores the cumulative counts, so every D_n is reconstructible
    exactly; maxima are certified during the run.
    """

    window: IntervalUnion
    alpha: ExactNumber
    start: ExactNumber
    n_steps: int
    mes: ExactNumber
    hits: list[int] = field(repr=False)
    max_abs_value: ExactNumber
    max_abs_index: int
    checkpoint_maxima: list[tuple[int, float]] = field(repr=False)

    def d(self, n: int) -> ExactNumber:
        if not 1 <= n <= self.n_steps:
            raise IndexError(f"n must be within 1..{self.n_steps}")
        return self.window.ctx.rational(self.hits[n - 1]) - self.mes * n

    def max_abs(self) -> ExactNumber:
        return self.max_abs_value

    def float_values(self):
        m = self.mes.as_float()
        return [h - (i + 1) * m for i, h in enumerate(self.hits)]


def discrepancy(s: IntervalUnion, alpha, x, n_steps: int) -> DiscrepancyTrace:
    """Exact trace of D_n(S, x) for n = 1..n_steps under x -> x + alpha."""
    ctx = s.ctx
    alpha = ctx.coerce(alpha)
    x0 = ctx.coerce(x)
    if n_steps < 1:
        raise ValueError("need at least one step")
    pieces = _window_mod_one(s)
    mes = s.measure()
    alpha_red = _reduce_mod_one(alpha)
    x_red = _reduce_mod_one(x0)
    if ctx.has_opaque():
        hits, max_pair, max_idx, checkpoints = _trace_generic(
            ctx, pieces, mes, alpha_red, x_red, n_steps
        )
        max_value = max_pair
    else:
        hits, max_value, max_idx, checkpoints = _trace_scaled(
            ctx, pieces, mes, alpha_red, x_red, n_steps
        )
    return DiscrepancyTrace(
        s, alpha, x0, n_steps, mes, hits, max_value, max_idx, checkpoints
    )


def _checkpoints_for(n_steps: int) -> set[int]:
    if n_steps < 10:
        return {n_steps}
    return {n_steps * k // 10 for k in range(1, 11)}


def _trace_scaled(ctx, pieces, mes, alpha, x, n_steps):
    scaler = _QuadScaler(ctx, [alpha, x, mes] + [e for p in pieces for e in p])
    l = scaler.scale
    d = scaler.d
    one = l
    ax, bx = scaler.pair(x)
    aa, ba = scaler.pair(alpha)
    ma, mb = scaler.pair(mes)
    bounds = [scaler.pair(lo) + scaler.pair(hi) for lo, hi in pieces]
    sign = scaler.sign

    hits_list = []
    hits = 0
    best = (0, 0)  # scaled numerator pair of the current max |D|
    best_idx = 0
    checkpoints = sorted(_checkpoints_for(n_steps))
    cp_iter = iter(checkpoints)
    next_cp = next(cp_iter, None)
    cp_out = []
    mes_float = mes.as_float()
    best_float = 0.0

    for n in range(1, n_steps + 1):
        for (la, lb, ha, hb) in bounds:
            if sign((ax - la, bx - lb)) >= 0 and sign((ax - ha, bx - hb)) < 0:
                hits += 1
        hits_list.append(hits)
        # D_n numerator pair over L: hits*L - n*mes_scaled
        da, db = hits * l - n * ma, -n * mb
        d_float = hits - n * mes_float
        if abs(d_float) > best_float - 1e-6:
            if _abs_pair_cmp((da, db), best, d) > 0:
                best = (da, db)
                best_idx = n
                best_float = abs(d_float)
        if n == next_cp:
            cp_out.append((n, abs(best_float)))
            next_cp = next(cp_iter, None)
        ax += aa
        bx += ba
        if sign((ax - one, bx)) >= 0:
            ax -= one
    max_value = ctx.from_coeffs(_pair_to_coeffs(ctx, best, l))
    if max_value.sign() < 0:
        max_value = -max_value
    return hits_list, max_value, best_idx, cp_out


def _pair_to_coeffs(ctx, pair, scale):
    a, b = Fraction(pair[0], scale), Fraction(pair[1], scale)
    width = 1 + len(ctx.generators)
    coeffs = [Fraction(0)] * width
    if b == 0:
        coeffs[0] = a
        return coeffs
    g = ctx.quadratic
    qi = ctx._quad_index
    c = b / g.q
    coeffs[1 + qi] = c
    coeffs[0] = a - c * g.p
    return coeffs


def _abs_pair_cmp(u, v, d) -> int:
    """Compare |u| vs |v| for scaled pairs: sign of u^2 - v^2."""
    ua, ub = u
    va, vb = v
    sa = ua * ua + ub * ub * d - (va * va + vb * vb * d)
    sb = 2 * (ua * ub - va * vb)
    if sb == 0:
        return (sa > 0) - (sa < 0)
    if sa == 0:
        return 1 if sb > 0 else -1
    if sa > 0 and sb > 0:
        return 1
    if sa < 0 and sb < 0:
        return -1
    lhs, rhs = sa * sa, sb * sb * d
    if sa > 0:
        return 1 if lhs > rhs else -1
    return 1 if rhs > lhs else -1


def _trace_generic(ctx, pieces, mes, alpha, x, n_steps):
    hits_list = []
    hits = 0
    best = ctx.zero
    best_idx = 0
    checkpoints = sorted(_checkpoints_for(n_steps))
    cp_iter = iter(checkpoints)
    next_cp = next(cp_iter, None)
    cp_out = []
    cur = x
    for n in range(1, n_steps + 1):
        for lo, hi in pieces:
            if (cur - lo).sign() >= 0 and (cur - hi).sign() < 0:
                hits += 1
        hits_list.append(hits)
        dn = ctx.rational(hits) - mes * n
        if dn.sign() < 0:
            dn = -dn
        if (dn - best).sign() > 0:
            best = dn
            best_idx = n
        if n == next_cp:
            cp_out.append((n, best.as_float()))
            next_cp = next(cp_iter, None)
        cur = cur + alpha
        if (cur - 1).sign() >= 0:
            cur = cur - 1
    return hits_list, best, best_idx, cp_out


# --------------------------------------------------------------------------
# bounded-remainder evidence


BRS_BOUNDED = "BoundedEvidence"
BRS_GROWTH = "GrowthEvidence"

_GROWTH_FACTOR = 1.1


@dataclass
class BrsReport:
    window: IntervalUnion
    alpha: ExactNumber
    n_steps: int
    max_abs: float
    max_abs_exact: str
    growth_profile: list[tuple[int, float]]
    verdict: str
    traces: list[DiscrepancyTrace] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n_steps": self.n_steps,
            "max_abs": self.max_abs,
            "max_abs_exact": self.max_abs_exact,
            "growth_profile": [[n, v] for n, v in self.growth_profile],
            "verdict": self.verdict,
            "note": "empirical desk-scale evidence, not a proof",
        }


def brs_test(s: IntervalUnion, alpha, n_steps: int, x_samples=None) -> BrsReport:
    """Empirical bounded-remainder evidence: max |D_n| over the trace(s) and a
    decade growth profile.  GrowthEvidence when the full-range maximum exceeds
    the first-decile maximum by more than 10%; explicitly a heuristic label.
    """
    ctx = s.ctx
    if n_steps < 1000:
        raise ValueError("bounded-remainder evidence needs at least 10^3 steps")
    starts = [ctx.coerce(x) for x in (x_samples or [ctx.zero])]
    traces = [discrepancy(s, alpha, x, n_steps) for x in starts]
    best = max(traces, key=lambda tr: tr.max_abs().as_float())
    profile = best.checkpoint_maxima
    first_decile = profile[0][1] if profile else 0.0
    final = best.max_abs().as_float()
    verdict = BRS_GROWTH if final > first_decile * _GROWTH_FACTOR and final > 1.0 else BRS_BOUNDED
    return BrsReport(
        s,
        ctx.coerce(alpha),
        n_steps,
        final,
        best.max_abs().to_string(),
        profile,
        verdict,
        traces,
    )


# --------------------------------------------------------------------------
# matching against the reference lattice


@dataclass
class BdMatching:
    spacing: ExactNumber  # 1 / mes S
    count: int
    sup_displacement: float
    argmax_index: int
    trimmed_blocks: tuple[int, int]
    enumeration: list[tuple[int, float]] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "spacing": self.spacing.to_string(),
            "count": self.count,
            "sup_displacement": self.sup_displacement,
            "argmax_index": self.argmax_index,
            "trimmed_blocks": list(self.trimmed_blocks),
        }


def bd_match(bd: BlockDecomposition, mes_s: ExactNumber) -> BdMatching:
    """Enumerate the sample block by block and measure the displacement from
    the reference progression j / mes S.

    Index 0 is anchored at the first point of the first block with n >= 0;
    a margin of blocks near the sampled range ends is dropped so edge effects
    do not contaminate the recorded constant.
    """
    if not bd.blocks:
        raise EmptySample("cannot match an empty sample")
    window = bd.sample.window
    lo_w, hi_w = window.bbox()
    trim = 2 * max(abs(lo_w.as_float()), abs(hi_w.as_float()), 1.0)
    trim_blocks = math.ceil(trim)
    n_min, n_max = bd.block_range()
    keep_min, keep_max = n_min + trim_blocks, n_max - trim_blocks
    points = []
    for n in sorted(bd.blocks):
        if keep_min <= n <= keep_max:
            points.extend(bd.blocks[n])
    if not points:
        raise EmptySample("trimming removed every block; enlarge the range")
    anchor = next(
        (i for i, lv in enumerate(points) if lv.z[0] >= 0),
        len(points) - 1,
    )
    spacing = mes_s.inverse()
    spacing_f = spacing.as_float()
    sup = -1.0
    arg = 0
    enumeration = []
    for i, lv in enumerate(points):
        j = i - anchor
        lam = lv.phys[0].as_float()
        disp = abs(lam - j * spacing_f)
        enumeration.append((j, lam))
        if disp > sup:
            sup = disp
            arg = j
    return BdMatching(spacing, len(points), sup, arg, (keep_min, keep_max), enumeration)


# --------------------------------------------------------------------------
# decisions


def decide_interval(scheme: Scheme, interval, t) -> BdDecision:
    """Simple quasicrystal window [a, b) against its translate by t.

    |I| in p2(Gamma) collapses the whole hull into one class; otherwise the
    translate is equivalent iff trivially so (t in the group), and the
    endpoint invariant H_a = 1 certifies the negative case.
    """
    ctx = scheme.ctx
    if scheme.n != 1:
        raise ValueError("interval decision needs internal dimension 1")
    if isinstance(interval, IntervalUnion):
        if len(interval.intervals) != 1:
            raise ValueError("decide_interval needs a single interval")
        a, b = interval.intervals[0]
    else:
        a, b = ctx.coerce(interval[0]), ctx.coerce(interval[1])
    t = ctx.coerce(t)
    length = b - a
    res_len = member_p2(scheme, (length,))
    if res_len.status == "unknown":
        return BdDecision(VERDICT_UNKNOWN, notes="window length membership undecided")
    if res_len.is_member:
        return BdDecision(
            VERDICT_LATTICE,
            witnesses={"length": res_len.to_dict()},
            notes="window length lies in the projected lattice; the whole hull "
            "is one equivalence class, so every translate is equivalent",
        )
    res_t = member_p2(scheme, (t,))
    if res_t.status == "unknown":
        return BdDecision(VERDICT_UNKNOWN, notes="shift membership undecided")
    if res_t.is_member:
        return BdDecision(
            VERDICT_TRIVIAL,
            witnesses={"shift": res_t.to_dict()},
            notes="the shift is realized by a lattice translation",
        )
    oracle = scheme.p2_oracle()
    window = IntervalUnion.from_endpoints(ctx, [(a, b)])
    inv = hadwiger.hadwiger_1d(window, a, oracle)
    assert inv.value == 1, "left endpoint orbit must contribute exactly once"
    return BdDecision(
        VERDICT_NOT,
        witnesses={"length": res_len.to_dict(), "shift": res_t.to_dict()},
        certificates=[
            {
                "kind": "endpoint_invariant",
                "flag_point": a.to_string(),
                "value": inv.value,
                "contributions": inv.contributions,
            }
        ],
        notes="H_a = 1 is invariant under group translations, but the shifted "
        "window would need it at a point outside the orbit of a",
    )


_MAX_UNION_SIZE = 64


def decide_union(scheme: Scheme, w: IntervalUnion) -> BdDecision:
    """Lattice equivalence for a union of intervals: a perfect matching
    sigma with b_sigma(j) - a_j in p2(Gamma) is necessary and sufficient."""
    if scheme.n != 1:
        raise ValueError("union decision needs internal dimension 1")
    n = len(w.intervals)
    if n == 0:
        raise ValueError("empty window")
    if n > _MAX_UNION_SIZE:
        raise ValueError(f"at most {_MAX_UNION_SIZE} intervals supported")
    lefts = [a for a, _ in w.intervals]
    rights = [b for _, b in w.intervals]
    memberships: dict[tuple[int, int], Membership] = {}
    edges: dict[int, list[int]] = {j: [] for j in range(n)}
    for j, a in enumerate(lefts):
        for i, b in enumerate(rights):
            res = member_p2(scheme, (b - a,))
            if res.status == "unknown":
                return BdDecision(VERDICT_UNKNOWN, notes="an endpoint difference is undecided")
            memberships[(j, i)] = res
            if res.is_member:
                edges[j].append(i)

    match_right: list[int | None] = [None] * n

    def augment(j: int, seen: set[int]) -> bool:
        for i in edges[j]:
            if i in seen:
                continue
            seen.add(i)
            if match_right[i] is None or augment(match_right[i], seen):
                match_right[i] = j
                return True
        return False

    size = sum(1 for j in range(n) if augment(j, set()))
    if size == n:
        sigma = [0] * n
        for i, j in enumerate(match_right):
            sigma[j] = i
        return BdDecision(
            VERDICT_LATTICE,
            witnesses={
                "sigma": sigma,
                "memberships": [
                    {
                        "j": j,
                        "i": sigma[j],
                        "difference": (rights[sigma[j]] - lefts[j]).to_string(),
                        "witness": memberships[(j, sigma[j])].to_dict(),
                    }
                    for j in range(n)
                ],
            },
            notes="permutation matches every left endpoint to a right endpoint "
            "modulo the projected lattice",
        )

    violator = _hall_violator(edges, match_right, n)
    neighborhood = sorted({i for j in violator for i in edges[j]})
    return BdDecision(
        VERDICT_NOT,
        certificates=[
            {
                "kind": "hall_violator",
                "left_set": sorted(violator),
                "neighborhood": neighborhood,
                "membership_matrix": [
                    [memberships[(j, i)].is_member for i in range(n)] for j in range(n)
                ],
            }
        ],
        notes="no perfect endpoint matching exists; the listed left set has a "
        "strictly smaller neighborhood",
    )


def _hall_violator(edges, match_right, n) -> set[int]:
    matched_of_left = {j: None for j in range(n)}
    for i, j in enumerate(match_right):
        if j is not None:
            matched_of_left[j] = i
    unmatched = [j for j in range(n) if matched_of_left[j] is None]
    assert unmatched, "violator requested for a perfect matching"
    left_set = set(unmatched)
    right_set: set[int] = set()
    frontier = list(unmatched)
    while frontier:
        j = frontier.pop()
        for i in edges[j]:
            if i in right_set:
                continue
            right_set.add(i)
            owner = match_right[i]
            if owner is not None and owner not in left_set:
                left_set.add(owner)
                frontier.append(owner)
    return left_set


def decide_parallelogram(scheme: Scheme, p: Parallelogram, search_bound: int = 12) -> BdDecision:
    """Planar parallelotope window decision.

    Positive branch: one spanning vector in p2(Gamma) and the other reachable
    as p2(gamma) - t * w1 with 0 <= t < 1 (witness search over lattice
    coordinates up to the bound).  Negative branch: a nonzero face-aligned
    invariant.  Unknown when the bounded search finds nothing and every
    invariant vanishes.
    """
    ctx = scheme.ctx
    if scheme.n != 2:
        raise ValueError("parallelogram decision needs internal dimension 2")
    oracle = scheme.p2_oracle()

    for first, second, order in ((p.v1, p.v2, "v1,v2"), (p.v2, p.v1, "v2,v1")):
        res1 = oracle.member(first)
        if res1.status == "unknown":
            raise MembershipUnknown("spanning vector membership undecided")
        if not res1.is_member:
            continue
        found = _search_shear_witness(scheme, first, second, search_bound)
        if found is not None:
            t, z = found
            return BdDecision(
                VERDICT_LATTICE,
                witnesses={
                    "order": order,
                    "w1": res1.to_dict(),
                    "gamma": list(z),
                    "t": t.to_string(),
                },
                notes="spanning pair reduces to group vectors by a shear",
            )

    poly = p.as_polygon()
    for flag in hadwiger.face_flags_2d(poly):
        inv = hadwiger.hadwiger_2d(poly, flag, oracle)
        nonzero = inv.value != 0 if isinstance(inv.value, int) else inv.value.sign() != 0
        if nonzero:
            return BdDecision(
                VERDICT_NOT,
                certificates=[{"kind": "flag_invariant", "flag": flag.describe(),
                               "invariant": inv.to_dict()}],
                notes="a translation-invariant functional separates the window "
                "from all its translates",
            )
    return BdDecision(
        VERDICT_UNKNOWN,
        notes=f"no witness within lattice-coordinate bound {search_bound} and "
        "all face-aligned invariants vanish",
    )


def _search_shear_witness(scheme: Scheme, w1, v2, bound: int):
    """Find gamma with p2(gamma) = v2 + t*w1 for exact t in [0, 1).

    Only lattice coordinates with a nonzero internal column matter for
    p2(gamma); the rest are pinned to zero.  Candidates are visited in order
    of increasing max-norm so reported witnesses are minimal.
    """
    import itertools

    ctx = scheme.ctx
    dim = scheme.lattice.dim
    pick = 0 if not w1[0].is_zero() else 1
    other = 1 - pick
    cols = scheme.p2_columns()
    effective = [j for j in range(dim) if any(not x.is_zero() for x in cols[j])]
    candidates = sorted(
        itertools.product(range(-bound, bound + 1), repeat=len(effective)),
        key=lambda z: (max((abs(c) for c in z), default=0), z),
    )
    for partial in candidates:
        z = [0] * dim
        for j, value in zip(effective, partial):
            z[j] = value
        g = scheme.vector(tuple(z)).internal
        t = (g[pick] - v2[pick]) / w1[pick]
        if not (g[other] - v2[other] - t * w1[other]).is_zero():
            continue
        if t.sign() >= 0 and (t - 1).sign() < 0:
            return t, tuple(z)
    return None
