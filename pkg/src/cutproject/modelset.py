"""Model-set samples: points of the lattice whose internal projection lies in
a window, restricted to a bounded physical range.

Generation enumerates the lattice over the window's exact bounding box and
filters with exact half-open membership, so the sample is the precise finite
set and each point keeps its integer lattice coordinates (this is what makes
downstream bijections computable without inverting projections numerically).
"""

from __future__ import annotations

import csv
import functools
import hashlib
import json
from dataclasses import dataclass, field

from .errors import EmptySample, NotEnoughPoints, NotHeckeScheme
from .exactnum import ExactNumber
from .scheme import LatticeVector, Scheme, enumerate_lattice
from .window import IntervalUnion, Parallelogram, Polygon

Window = IntervalUnion | Parallelogram | Polygon


@dataclass
class ModelSetSample:
    scheme: Scheme
    window: Window
    phys_range: list[tuple[ExactNumber, ExactNumber]]
    points: list[LatticeVector] = field(default_factory=list)

    def __len__(self):
        return len(self.points)

    def phys_values(self) -> list[ExactNumber]:
        if self.scheme.m != 1:
            raise ValueError("scalar physical values need m = 1")
        return [p.phys[0] for p in self.points]

    def range_volume(self) -> ExactNumber:
        vol = self.scheme.ctx.one
        for lo, hi in self.phys_range:
            vol = vol * (hi - lo)
        return vol

    def manifest(self) -> dict:
        payload = {
            "scheme": self.scheme.describe(),
            "window": _window_dict(self.window),
            "phys_range": [[lo.to_string(), hi.to_string()] for lo, hi in self.phys_range],
            "count": len(self.points),
        }
        digest = hashlib.sha256(
            json.dumps(payload["scheme"], sort_keys=True).encode()
        ).hexdigest()
        payload["scheme_hash"] = digest
        return payload

    def write_csv(self, path) -> None:
        m = self.scheme.m
        dim = self.scheme.lattice.dim
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            header = [f"x{i+1}" for i in range(m)]
            header += [f"x{i+1}_exact" for i in range(m)]
            header += [f"z{i+1}" for i in range(dim)]
            writer.writerow(header)
            for p in self.points:
                row = [repr(x.as_float()) for x in p.phys]
                row += [x.to_string() for x in p.phys]
                row += [str(c) for c in p.z]
                writer.writerow(row)


def _window_dict(window: Window) -> dict:
    if isinstance(window, IntervalUnion):
        return {"intervals": window.to_strings()}
    return window.to_dict()


def _window_membership(window: Window):
    if isinstance(window, IntervalUnion):
        return lambda internal: window.contains(internal[0])
    return window.contains


def _window_internal_box(window: Window, n: int):
    if isinstance(window, IntervalUnion):
        if n != 1:
            raise ValueError("interval window needs internal dimension 1")
        return [window.bbox()]
    (xs, ys) = window.bbox()
    if n != 2:
        raise ValueError("planar window needs internal dimension 2")
    return [xs, ys]


def _phys_sort_key(scheme: Scheme):
    def cmp(a: LatticeVector, b: LatticeVector) -> int:
        for x, y in zip(a.phys, b.phys):
            s = (x - y).sign()
            if s:
                return s
        return (a.z > b.z) - (a.z < b.z)

    return functools.cmp_to_key(cmp)


def generate(scheme: Scheme, window: Window, phys_range) -> ModelSetSample:
    """All lattice points with p1 in the closed range and p2 in the window."""
    ctx = scheme.ctx
    rng = [(ctx.coerce(lo), ctx.coerce(hi)) for lo, hi in phys_range]
    if len(rng) != scheme.m:
        raise ValueError(f"physical range needs {scheme.m} coordinates")
    sample = ModelSetSample(scheme, window, rng)
    if isinstance(window, IntervalUnion) and window.is_empty():
        return sample
    membership = _window_membership(window)
    internal_box = _window_internal_box(window, scheme.n)
    pts = [
        lv
        for lv in enumerate_lattice(scheme, rng, internal_box)
        if membership(lv.internal)
    ]
    pts.sort(key=_phys_sort_key(scheme))
    sample.points = pts
    return sample


def density_estimate(sample: ModelSetSample) -> tuple[float, ExactNumber]:
    """(empirical count/volume, exact mes W / det Gamma)."""
    vol = sample.range_volume()
    if vol.sign() <= 0:
        raise ValueError("physical range must have positive volume")
    empirical = len(sample.points) / vol.as_float()
    theoretical = sample.window.measure() / sample.scheme.lattice.det_abs
    return empirical, theoretical


@dataclass
class BlockDecomposition:
    """Partition of a Hecke sample by the integer coefficient of the alpha
    column; block n holds the points with internal part in n*alpha + Z^d."""

    sample: ModelSetSample
    blocks: dict[int, list[LatticeVector]]
    max_block_size: int

    def block_range(self) -> tuple[int, int]:
        if not self.blocks:
            raise EmptySample("no blocks in an empty sample")
        keys = self.blocks.keys()
        return min(keys), max(keys)


def blocks(sample: ModelSetSample) -> BlockDecomposition:
    if not sample.scheme.is_hecke():
        raise NotHeckeScheme("block decomposition needs a Hecke-type scheme")
    out: dict[int, list[LatticeVector]] = {}
    for lv in sample.points:
        out.setdefault(lv.z[0], []).append(lv)
    for block in out.values():
        block.sort(key=_phys_sort_key(sample.scheme))
    max_size = max((len(b) for b in out.values()), default=0)
    return BlockDecomposition(sample, out, max_size)


def delone_stats(sample: ModelSetSample) -> tuple[ExactNumber, ExactNumber]:
    """(min gap, max gap) between consecutive points; m = 1 only."""
    if sample.scheme.m != 1:
        raise ValueError("gap statistics implemented for m = 1")
    if len(sample.points) < 2:
        raise NotEnoughPoints("need at least two points for gap statistics")
    xs = sample.phys_values()
    gaps = [xs[i + 1] - xs[i] for i in range(len(xs) - 1)]
    lo = hi = gaps[0]
    for g in gaps[1:]:
        if (g - lo).sign() < 0:
            lo = g
        if (g - hi).sign() > 0:
            hi = g
    return lo, hi
