"""Command-line front end: JSON-shaped configs in, JSON/CSV artifacts out.

Exit codes: 0 success, 2 when a decision came back Unknown, 1 on errors.
Outputs are deterministic: exact values are emitted as canonical strings and
dictionaries are dumped with sorted keys.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import bdequiv, equidecomp, hadwiger, modelset
from .errors import CutProjectError, ParseError, ResidualNonzero
from .exactnum import GeneratorContext, Opaque, Quadratic
from .scheme import Scheme, make_hecke_scheme, make_lattice, member_p2
from .window import IntervalUnion, Parallelogram, Polygon


# --------------------------------------------------------------------------
# config loading


def load_context(cfg: dict) -> GeneratorContext:
    gens = []
    for g in cfg.get("generators", []):
        name = g["name"]
        if "quadratic" in g:
            q = g["quadratic"]
            gens.append((name, Quadratic(int(q["D"]), Fraction(q["p"]), Fraction(q["q"]))))
        elif "opaque" in g:
            gens.append((name, Opaque(g["opaque"]["decimal"])))
        else:
            raise ParseError(f"generator {name!r} needs 'quadratic' or 'opaque' data")
    return GeneratorContext(gens)


def load_scheme(path: str) -> Scheme:
    cfg = json.loads(Path(path).read_text())
    ctx = load_context(cfg)
    if "hecke" in cfg:
        h = cfg["hecke"]
        alpha = [_entry(ctx, x) for x in h["alpha"]]
        beta = [_entry(ctx, x) for x in h["beta"]]
        return make_hecke_scheme(ctx, alpha, beta)
    basis = cfg["basis"]
    columns = [[_entry(ctx, x) for x in col] for col in basis]
    m = int(cfg.get("m", 1))
    n = int(cfg.get("n", len(columns) - m))
    return Scheme(make_lattice(ctx, columns), m, n)


def _entry(ctx: GeneratorContext, x):
    """Basis/window entry: an expression string or a coefficient vector."""
    if isinstance(x, str):
        return ctx.parse(x)
    if isinstance(x, (int, float)):
        return ctx.rational(Fraction(str(x)))
    if isinstance(x, list):
        coeffs = [Fraction(c) for c in x]
        width = 1 + len(ctx.generators)
        if len(coeffs) > width:
            raise ParseError(f"coefficient vector {x!r} longer than the context")
        coeffs += [Fraction(0)] * (width - len(coeffs))
        return ctx.from_coeffs(coeffs)
    raise ParseError(f"cannot interpret scalar entry {x!r}")


def load_window(ctx: GeneratorContext, spec: str):
    """A window file, or an inline single interval '[a,b)'."""
    text = spec.strip()
    if text.startswith("["):
        a, b = _split_interval(text)
        return IntervalUnion.from_endpoints(ctx, [(ctx.parse(a), ctx.parse(b))])
    cfg = json.loads(Path(spec).read_text())
    return window_from_dict(ctx, cfg)


def window_from_dict(ctx: GeneratorContext, cfg: dict):
    if "intervals" in cfg:
        return IntervalUnion.from_endpoints(
            ctx, [(ctx.parse(a), ctx.parse(b)) for a, b in cfg["intervals"]]
        )
    if "parallelogram" in cfg:
        p = cfg["parallelogram"]
        anchor = tuple(_entry(ctx, x) for x in p.get("anchor", ["0", "0"]))
        v1 = tuple(_entry(ctx, x) for x in p["v1"])
        v2 = tuple(_entry(ctx, x) for x in p["v2"])
        return Parallelogram(anchor, v1, v2)
    if "polygon" in cfg:
        verts = [tuple(_entry(ctx, x) for x in v) for v in cfg["polygon"]["vertices"]]
        return Polygon.from_vertices(ctx, verts)
    raise ParseError("window config needs 'intervals', 'parallelogram' or 'polygon'")


def _split_interval(text: str) -> tuple[str, str]:
    if not (text.startswith("[") and text.endswith(")")):
        raise ParseError(f"interval must look like '[a,b)', got {text!r}")
    body = text[1:-1]
    depth = 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            return body[:i], body[i + 1:]
    raise ParseError(f"no top-level comma in interval {text!r}")


def parse_range(ctx: GeneratorContext, text: str, m: int):
    parts = text.split(";")
    if len(parts) != m:
        raise ParseError(f"range needs {m} 'lo:hi' groups separated by ';'")
    out = []
    for part in parts:
        lo, _, hi = part.partition(":")
        if not _:
            raise ParseError(f"range group {part!r} must be 'lo:hi'")
        out.append((ctx.parse(lo), ctx.parse(hi)))
    return out


# --------------------------------------------------------------------------
# output helpers


def _dump(args, name: str, payload: dict) -> Path:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{name}.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


# --------------------------------------------------------------------------
# subcommands


def cmd_generate(args) -> int:
    scheme = load_scheme(args.scheme)
    window = load_window(scheme.ctx, args.window)
    rng = parse_range(scheme.ctx, args.range, scheme.m)
    sample = modelset.generate(scheme, window, rng)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if "csv" in args.formats:
        sample.write_csv(out_dir / "sample.csv")
    if "json" in args.formats:
        _dump(args, "sample", sample.manifest())
    print(f"generated {len(sample)} points")
    return 0


def cmd_density(args) -> int:
    scheme = load_scheme(args.scheme)
    window = load_window(scheme.ctx, args.window)
    rng = parse_range(scheme.ctx, args.range, scheme.m)
    sample = modelset.generate(scheme, window, rng)
    empirical, theoretical = modelset.density_estimate(sample)
    payload = {
        "count": len(sample),
        "empirical": empirical,
        "theoretical": theoretical.to_string(),
        "theoretical_float": theoretical.as_float(),
        "abs_error": abs(empirical - theoretical.as_float()),
    }
    _dump(args, "density", payload)
    print(f"density: empirical {empirical:.9f}, theoretical {theoretical.as_float():.9f}")
    return 0


def cmd_blocks(args) -> int:
    scheme = load_scheme(args.scheme)
    window = load_window(scheme.ctx, args.window)
    rng = parse_range(scheme.ctx, args.range, scheme.m)
    bd = modelset.blocks(modelset.generate(scheme, window, rng))
    payload = {
        "max_block_size": bd.max_block_size,
        "block_sizes": {str(n): len(pts) for n, pts in sorted(bd.blocks.items())},
    }
    _dump(args, "blocks", payload)
    print(f"blocks: {len(bd.blocks)} nonempty, max size {bd.max_block_size}")
    return 0


def cmd_discrepancy(args) -> int:
    scheme = load_scheme(args.scheme)
    ctx = scheme.ctx
    window = load_window(ctx, args.window)
    trace = bdequiv.discrepancy(window, ctx.parse(args.alpha), ctx.parse(args.start), args.steps)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if "csv" in args.formats:
        with open(out_dir / "discrepancy.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "hits", "d"])
            mes = trace.mes.as_float()
            for i, h in enumerate(trace.hits):
                writer.writerow([i + 1, h, repr(h - (i + 1) * mes)])
    payload = {
        "steps": trace.n_steps,
        "max_abs": trace.max_abs().as_float(),
        "max_abs_exact": trace.max_abs().to_string(),
        "max_abs_index": trace.max_abs_index,
        "checkpoints": [[n, v] for n, v in trace.checkpoint_maxima],
    }
    _dump(args, "discrepancy", payload)
    print(f"max |D_n| over n<={trace.n_steps}: {trace.max_abs().as_float():.6f}")
    return 0


def cmd_brs_test(args) -> int:
    scheme = load_scheme(args.scheme)
    ctx = scheme.ctx
    window = load_window(ctx, args.window)
    starts = [ctx.parse(x) for x in args.starts.split(";")] if args.starts else None
    report = bdequiv.brs_test(window, ctx.parse(args.alpha), args.steps, starts)
    _dump(args, "brs", report.to_dict())
    print(f"verdict: {report.verdict} (max |D| = {report.max_abs:.4f})")
    return 0


def cmd_bd_match(args) -> int:
    scheme = load_scheme(args.scheme)
    ctx = scheme.ctx
    window = load_window(ctx, args.window)
    r = ctx.rational(args.range_blocks)
    sample = modelset.generate(scheme, window, [(-r - 1, r + 1)])
    matching = bdequiv.bd_match(modelset.blocks(sample), window.measure())
    _dump(args, "bdmatch", matching.to_dict())
    print(f"sup |lambda_j - j/mes S| = {matching.sup_displacement:.6f} over {matching.count} points")
    return 0


def cmd_decide_bd(args) -> int:
    scheme = load_scheme(args.scheme)
    ctx = scheme.ctx
    if args.interval:
        a, b = _split_interval(args.interval.strip())
        if args.shift is None:
            raise ParseError("--interval needs --shift")
        decision = bdequiv.decide_interval(
            scheme, (ctx.parse(a), ctx.parse(b)), ctx.parse(args.shift)
        )
    elif args.window:
        window = load_window(ctx, args.window)
        if isinstance(window, IntervalUnion):
            decision = bdequiv.decide_union(scheme, window)
        elif isinstance(window, Parallelogram):
            decision = bdequiv.decide_parallelogram(scheme, window, args.search_bound)
        else:
            raise ParseError("decide-bd supports interval unions and parallelograms")
    else:
        raise ParseError("decide-bd needs --interval or --window")
    _dump(args, "decision", decision.to_dict())
    print(f"verdict: {decision.verdict}")
    return 2 if decision.verdict == bdequiv.VERDICT_UNKNOWN else 0


def cmd_hadwiger(args) -> int:
    scheme = load_scheme(args.scheme)
    ctx = scheme.ctx
    window = load_window(ctx, args.window)
    oracle = scheme.p2_oracle()
    table = []
    if isinstance(window, IntervalUnion):
        for p in hadwiger.face_flags_1d(window):
            inv = hadwiger.hadwiger_1d(window, p, oracle)
            table.append({"flag": {"point": p.to_string()}, **inv.to_dict()})
    else:
        poly = window.as_polygon() if isinstance(window, Parallelogram) else window
        for flag in hadwiger.face_flags_2d(poly):
            inv = hadwiger.hadwiger_2d(poly, flag, oracle)
            table.append({"flag": flag.describe(), **inv.to_dict()})
    _dump(args, "hadwiger", {"invariants": table})
    nonzero = sum(1 for row in table if row["value"] not in (0, "0"))
    print(f"{len(table)} face-aligned flags, {nonzero} nonzero invariants")
    return 0


def cmd_equidecompose(args) -> int:
    scheme = load_scheme(args.scheme)
    ctx = scheme.ctx
    window = load_window(ctx, args.window)
    if not isinstance(window, IntervalUnion):
        raise ParseError("equidecompose drives the 1D greedy partition; window must be intervals")
    if args.target:
        target = load_window(ctx, args.target)
    elif args.translate:
        target = window.translate(ctx.parse(args.translate))
    else:
        raise ParseError("equidecompose needs --target or --translate")
    oracle = scheme.p2_oracle()
    if args.shifts:
        shifts = [ctx.parse(s) for s in args.shifts.split(";")]
    else:
        shifts = equidecomp.propose_shifts_1d(window, target, oracle)
    try:
        pl = equidecomp.greedy_decompose_1d(window, target, shifts, oracle)
    except ResidualNonzero as exc:
        _dump(args, "equidecomposition", {
            "status": "residual_nonzero",
            "residual": exc.residual.to_strings(),
            "shifts_tried": [s.to_string() for s in exc.shifts],
        })
        print("greedy partition failed: nonzero residual")
        return 1
    report = equidecomp.verify(pl, window, target, oracle)
    payload = {
        "pieces": pl.to_dict()["pieces"],
        "verification": report.to_dict(),
    }
    _dump(args, "equidecomposition", payload)
    print(f"{len(pl)} pieces; verification {'passed' if report.passed else 'FAILED'}")
    return 0 if report.passed else 1


def cmd_demo_halffib(args) -> int:
    """Reproduce the golden-ratio worked example end to end."""
    ctx = GeneratorContext([("tau", Quadratic(5, Fraction(1, 2), Fraction(1, 2)))])
    tau = ctx.generator("tau")
    scheme = Scheme(make_lattice(ctx, [[ctx.one, ctx.one], [tau, 1 - tau]]), 1, 1)
    oracle = scheme.p2_oracle()
    t = ctx.parse("(1+1/tau)/2")
    report: dict = {"scheme": scheme.describe()}

    single = IntervalUnion.from_endpoints(ctx, [(ctx.parse("-1/tau"), ctx.parse("(1-1/tau)/2"))])
    report["single_interval"] = {
        "window": single.to_strings(),
        "measure": single.measure().to_string(),
        "memberships": {
            "t": member_p2(scheme, (t,)).to_dict(),
            "2t": member_p2(scheme, (2 * t,)).to_dict(),
            "3t": member_p2(scheme, (3 * t,)).to_dict(),
            "4t": member_p2(scheme, (4 * t,)).to_dict(),
            "length": member_p2(scheme, (single.measure(),)).to_dict(),
        },
        "decision": bdequiv.decide_interval(
            scheme, single.intervals[0], t
        ).to_dict(),
        "invariants": [
            {"point": p.to_string(), "value": hadwiger.hadwiger_1d(single, p, oracle).value}
            for p in hadwiger.face_flags_1d(single)
        ],
    }

    a, b = ctx.parse("-1/tau"), ctx.parse("(1-2/tau)/3")
    multi = IntervalUnion.from_endpoints(ctx, [(a, b), (a + t, b + t)])
    target = multi.translate(3 * t)
    shifts = equidecomp.propose_shifts_1d(multi, target, oracle)
    pl = equidecomp.greedy_decompose_1d(multi, target, shifts, oracle)
    verification = equidecomp.verify(pl, multi, target, oracle)
    report["multi_interval"] = {
        "window": multi.to_strings(),
        "lattice_decision": bdequiv.decide_union(scheme, multi).to_dict(),
        "shift_proposal": [s.to_string() for s in shifts],
        "decomposition": pl.to_dict()["pieces"],
        "verification": verification.to_dict(),
    }

    sample = modelset.generate(scheme, single, [(ctx.rational(0), ctx.rational(1000))])
    empirical, theoretical = modelset.density_estimate(sample)
    report["density"] = {
        "range": 1000,
        "count": len(sample),
        "empirical": empirical,
        "theoretical": theoretical.to_string(),
        "theoretical_float": theoretical.as_float(),
    }

    _dump(args, "demo_halffib", report)
    print("single interval:", report["single_interval"]["decision"]["verdict"])
    print("multi interval vs lattice:", report["multi_interval"]["lattice_decision"]["verdict"])
    print(f"decomposition: {len(pl)} pieces, verification "
          f"{'passed' if verification.passed else 'FAILED'}")
    print(f"density: empirical {empirical:.6f} vs theoretical {theoretical.as_float():.6f}")
    return 0 if verification.passed else 1


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cutproject",
        description="exact cut-and-project sets: generation, invariants, decisions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scheme=True):
        if scheme:
            p.add_argument("--scheme", required=True, help="scheme config JSON")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--formats", default="json,csv",
                       type=lambda s: set(s.split(",")), help="json,csv")

    p = sub.add_parser("generate", help="model-set sample in a physical range")
    common(p)
    p.add_argument("--window", required=True)
    p.add_argument("--range", required=True, help="'lo:hi' per physical coordinate, ';'-separated")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("density", help="empirical vs theoretical density")
    common(p)
    p.add_argument("--window", required=True)
    p.add_argument("--range", required=True)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("blocks", help="block decomposition of a Hecke sample")
    common(p)
    p.add_argument("--window", required=True)
    p.add_argument("--range", required=True)
    p.set_defaults(func=cmd_blocks)

    p = sub.add_parser("discrepancy", help="orbit-counting discrepancy trace")
    common(p)
    p.add_argument("--window", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--start", default="0")
    p.add_argument("--steps", type=int, required=True)
    p.set_defaults(func=cmd_discrepancy)

    p = sub.add_parser("brs-test", help="bounded-remainder evidence")
    common(p)
    p.add_argument("--window", required=True)
    p.add_argument("--alpha", required=True)
    p.add_argument("--steps", type=int, default=10**4)
    p.add_argument("--starts", default=None, help="';'-separated start points")
    p.set_defaults(func=cmd_brs_test)

    p = sub.add_parser("bd-match", help="block enumeration vs reference progression")
    common(p)
    p.add_argument("--window", required=True)
    p.add_argument("--range-blocks", type=int, required=True)
    p.set_defaults(func=cmd_bd_match)

    p = sub.add_parser("decide-bd", help="bounded-distance decision procedures")
    common(p)
    p.add_argument("--interval", help="inline '[a,b)' window")
    p.add_argument("--shift", help="translation for the interval decision")
    p.add_argument("--window", help="window file (union or parallelogram)")
    p.add_argument("--search-bound", type=int, default=6)
    p.set_defaults(func=cmd_decide_bd)

    p = sub.add_parser("hadwiger", help="face-aligned invariant table")
    common(p)
    p.add_argument("--window", required=True)
    p.set_defaults(func=cmd_hadwiger)

    p = sub.add_parser("equidecompose", help="greedy 1D equidecomposition")
    common(p)
    p.add_argument("--window", required=True)
    p.add_argument("--target", help="target window file")
    p.add_argument("--translate", help="target = window + this shift")
    p.add_argument("--shifts", help="';'-separated shifts (default: proposed)")
    p.set_defaults(func=cmd_equidecompose)

    p = sub.add_parser("demo-halffib", help="reproduce the worked golden-ratio example")
    common(p, scheme=False)
    p.set_defaults(func=cmd_demo_halffib)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        return args.func(args)
    except (CutProjectError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
