"""Command-line entry point.

Exit codes: 0 success, 1 runtime or data error, 2 usage or parse error.
Every written artifact embeds the full configuration and the tool version.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .closure import (
    ClosureCatalog, common_neighbor_catalog, empty_catalog, successor_anchor_catalog,
)
from .errors import AdditionTheoremViolation, UnsupportedSize
from .experiments import (
    DEFAULT_GRID, PLACEMENTS, GrowthFunction, Placement, classify_pair, closure_size_scan,
    convergence_diagnostics, empty_closure_scan, prob_series, weakly_nice_scan,
)
from .logic import FormulaSyntaxError, amalgam_type_table, ef_game, equiv_d, evaluate, parse_lines
from .report import csv_text, dumps, envelope, svg_plot
from .sampler import (
    CaseA, CaseB, CustomSequence, SecondContext, Sparsified, near_rational, powers_of, sample,
)
from .structures import Structure

PAIRS = {
    "common-neighbor": (lambda: Structure.complete(3), {1, 2}),
    "pendant": (lambda: Structure.complete(2), {1}),
    "vertex": (lambda: Structure.empty(1), set()),
    "edge": (lambda: Structure.complete(2), set()),
}
CATALOGS = {
    "empty": empty_catalog,
    "common-neighbor": common_neighbor_catalog,
    "successor-anchor": successor_anchor_catalog,
}


class UsageError(Exception):
    pass


# shared helpers ------------------------------------------------------------------


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def build_profile(args):
    kind = args.profile
    if kind in ("caseA", "caseB", "second") or (kind == "sparsified" and args.sparse_base != "custom"):
        if args.alpha is None:
            raise UsageError(f"--alpha is required for --profile {kind}")
        q = near_rational(args.alpha)
        if q is not None:
            print(f"warning: alpha={args.alpha!r} is within 1e-6 of the rational {q}; "
                  "floating point cannot represent an irrational exponent", file=sys.stderr)
    if kind == "caseA":
        return CaseA(args.alpha)
    if kind == "caseB":
        return CaseB(args.alpha)
    if kind == "second":
        return SecondContext(args.alpha)
    if kind == "custom" or (kind == "sparsified" and args.sparse_base == "custom"):
        if not args.probs:
            raise UsageError("--probs is required for custom sequences")
        base = CustomSequence(tuple(_floats(args.probs)))
        if kind == "custom":
            return base
    else:
        base = {"caseA": CaseA, "caseB": CaseB, "second": SecondContext}[args.sparse_base](args.alpha)
    if args.indices:
        idx = _ints(args.indices)
    else:
        top = max(getattr(args, "n", None) or 0, *(_ngrid(args) or [0]), 2)
        idx = powers_of(args.sparse_powers, top)
    return Sparsified(base, tuple(idx))


def _ngrid(args):
    grid = getattr(args, "ngrid", None)
    return _ints(grid) if grid else None


def _config(args):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
    cfg["version"] = __version__
    return cfg


def _outdir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path, text):
    Path(path).write_text(text)
    print(f"wrote {path}")


def load_graph(path, n=None):
    """Graph JSON, or a text edge list with one "i j" pair per line."""
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        obj = json.loads(text)
        if "structure" in obj:
            obj = obj["structure"]
        return Structure.from_json_obj(obj)
    edges = []
    for no, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{no}: expected 'i j'")
        edges.append((int(parts[0]), int(parts[1])))
    size = n if n is not None else max((max(e) for e in edges), default=0)
    return Structure.from_edges(size, edges)


def load_catalog(args):
    if args.catalog:
        return ClosureCatalog.from_json(Path(args.catalog).read_text())
    return CATALOGS[args.catalog_name](k_max=max(args.k, 1) ** max(args.m, 1))


def _formulas(path):
    return parse_lines(Path(path).read_text())


# commands ----------------------------------------------------------------------------


def cmd_sample(args):
    profile = build_profile(args)
    M = sample(profile, args.n, args.seed)
    cfg = _config(args)
    cfg["profile_json"] = profile.to_json_obj()
    obj = M.to_json_obj()
    obj.update({"config": cfg, "version": __version__})
    out = _outdir(args)
    path = out / f"sample_{args.profile}_n{args.n}_seed{args.seed}.json"
    _write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")
    print(f"n={M.n} edges={M.edge_count()}")
    return 0


def cmd_eval(args):
    M = load_graph(args.graph, args.n)
    try:
        formulas = _formulas(args.formula_file)
    except FormulaSyntaxError as e:
        print(f"{args.formula_file}: {e}", file=sys.stderr)
        return 2
    for no, phi in formulas:
        print(f"{no}: {'true' if evaluate(M, phi) else 'false'}")
    return 0


def cmd_series(args):
    profile = build_profile(args)
    ngrid = _ngrid(args) or [4, 8, 16, 32]
    try:
        formulas = _formulas(args.formula_file)
    except FormulaSyntaxError as e:
        print(f"{args.formula_file}: {e}", file=sys.stderr)
        return 2
    cfg = _config(args)
    cfg["profile_json"] = profile.to_json_obj()
    rows, results, curves = [], [], []
    for no, phi in formulas:
        s = prob_series(phi, profile, ngrid, args.trials, args.seed, args.level, args.jobs)
        verdict = convergence_diagnostics(s, delta=args.delta, tau=args.tau) if len(ngrid) >= 4 else None
        for e in s.entries:
            rows.append([no, e.n, e.trials, e.successes, e.phat, e.ci_low, e.ci_high])
        results.append({"line": no, "formula": s.formula,
                        "entries": [e.__dict__ for e in s.entries],
                        "verdict": verdict.__dict__ if verdict else None})
        curves.append({"label": f"line {no}", "x": s.ns(), "y": s.phats(),
                       "lo": [e.ci_low for e in s.entries], "hi": [e.ci_high for e in s.entries]})
    out = _outdir(args)
    _write(out / "series.csv", csv_text(cfg, ["line", "n", "trials", "successes", "phat", "lo", "hi"], rows))
    _write(out / "series.json", dumps(envelope(cfg, results)))
    _write(out / "series.svg", svg_plot(curves, "Prob(M_n |= phi)", "estimate", cfg))
    for r in results:
        v = r["verdict"]["verdict"] if r["verdict"] else "n/a"
        print(f"{r['line']}: {r['formula']}  verdict={v}")
    return 0


def _pair(args):
    if args.pair_json:
        obj = json.loads(Path(args.pair_json).read_text())
        return Structure.from_json_obj(obj["B"]), set(obj["A"])
    make, A = PAIRS[args.pair]
    return make(), set(A)


def cmd_classify(args):
    profile = build_profile(args)
    ngrid = _ngrid(args) or list(DEFAULT_GRID)
    cfg = _config(args)
    cfg["profile_json"] = profile.to_json_obj()
    rep = classify_pair(_pair(args), profile, ngrid, args.trials, args.seed,
                        Placement(args.placement), args.eps_lo, args.eps_hi, args.aggregate,
                        GrowthFunction(), args.jobs)
    out = _outdir(args)
    rows = [[n, agg, max(v), min(v)] for n, agg, v in zip(rep.ngrid, rep.aggregated, rep.per_n)]
    _write(out / "classify.csv", csv_text(cfg, ["n", "max_count", "sample_max", "sample_min"], rows))
    _write(out / "classify.json", dumps(envelope(cfg, rep.to_json_obj())))
    _write(out / "classify.svg", svg_plot(
        [{"label": f"{rep.aggregate} of max", "x": rep.ngrid, "y": rep.aggregated,
          "lo": [min(v) for v in rep.per_n], "hi": [max(v) for v in rep.per_n]}],
        f"extension counts, slope {rep.slope:.3f}", "count", cfg))
    print(f"slope={rep.slope:.4f} se={rep.slope_se:.4f} verdict={rep.verdict}")
    return 0


def cmd_scan(args):
    profile = build_profile(args)
    ngrid = _ngrid(args) or [16, 32, 64]
    cfg = _config(args)
    cfg["profile_json"] = profile.to_json_obj()
    out = _outdir(args)
    if args.kind == "weakly-nice":
        rep = weakly_nice_scan(_pair(args), profile, ngrid, args.trials, args.seed,
                               Placement(args.placement), args.aggregate, args.jobs)
        rows = [[n, a] for n, a in zip(rep.ngrid, rep.aggregated)]
        header = ["n", "family_size"]
        curves = [{"label": "greedy family", "x": rep.ngrid, "y": rep.aggregated}]
        summary = f"slope={rep.slope:.4f}"
    else:
        cat = load_catalog(args)
        cfg["catalog_json"] = cat.to_json_obj()
        if args.kind == "closure-size":
            rep = closure_size_scan(profile, cat, args.k, args.m, args.l, args.eps, ngrid,
                                    args.trials, args.seed, args.jobs)
            rows = [[n, s, v] for n, s, v in zip(ngrid, rep.max_size, rep.violation_fraction)]
            header = ["n", "max_closure_size", "violation_fraction"]
            curves = [{"label": "max |cl|", "x": ngrid, "y": rep.max_size}]
            summary = f"violation_fraction={rep.violation_fraction}"
        else:
            rep = empty_closure_scan(profile, cat, args.k, args.m, ngrid, args.trials, args.seed,
                                     args.jobs)
            rows = [[n, key, frac] for n, h in zip(ngrid, rep.histograms) for key, frac in h.items()]
            header = ["n", "type", "fraction"]
            empties = [sum(f for key, f in h.items() if key.startswith("0:")) for h in rep.histograms]
            curves = [{"label": "empty closure", "x": ngrid, "y": empties}]
            summary = f"types per n={[len(h) for h in rep.histograms]}"
    _write(out / "scan.csv", csv_text(cfg, header, rows))
    _write(out / "scan.json", dumps(envelope(cfg, rep.to_json_obj())))
    _write(out / "scan.svg", svg_plot(curves, f"{args.kind} scan", "value", cfg))
    print(summary)
    return 0


def cmd_ef(args):
    M1 = _named_or_file(args.left)
    M2 = _named_or_file(args.right)
    eq = equiv_d(M1, (), M2, (), args.d)
    if args.check_game:
        game = ef_game(M1, (), M2, (), args.d)
        if game != eq:
            print("error: type comparison and game search disagree", file=sys.stderr)
            return 1
    cfg = _config(args)
    res = {"d": args.d, "equivalent": eq}
    out = _outdir(args)
    _write(out / "ef.json", dumps(envelope(cfg, res)))
    _write(out / "ef.csv", csv_text(cfg, ["left", "right", "d", "equivalent"],
                                    [[args.left, args.right, args.d, eq]]))
    print("equivalent" if eq else "not equivalent")
    return 0


def _named_or_file(text):
    if Path(text).exists():
        return load_graph(text)
    return Structure.named(text)


def cmd_amalgam(args):
    N0 = _named_or_file(args.base)
    table = amalgam_type_table(N0, args.d, args.max_side)
    cfg = _config(args)
    index = {t: i for i, t in enumerate(sorted({t for _, t in table.sides} | set(table.cells.values())))}
    rows = [[index[a], index[b], index[c]] for (a, b), c in sorted(
        table.cells.items(), key=lambda kv: (index[kv[0][0]], index[kv[0][1]]))]
    res = {"sides": len(table.sides), "cells": len(table.cells), "single_valued": True}
    out = _outdir(args)
    _write(out / "amalgam.csv", csv_text(cfg, ["type_1", "type_2", "amalgam_type"], rows))
    _write(out / "amalgam.json", dumps(envelope(cfg, res)))
    print(f"sides={len(table.sides)} cells={len(table.cells)} single-valued")
    return 0


# parser ------------------------------------------------------------------------------


def _profile_flags(p, seed_required=True):
    p.add_argument("--profile", choices=["caseA", "caseB", "second", "custom", "sparsified"],
                   default="caseA")
    p.add_argument("--alpha", type=float)
    p.add_argument("--probs", help="comma-separated probabilities for distances 1, 2, ...")
    p.add_argument("--indices", help="comma-separated distances kept by a sparsified profile")
    p.add_argument("--sparse-powers", type=int, default=3,
                   help="use the powers of this base as sparsified distances")
    p.add_argument("--sparse-base", choices=["caseA", "caseB", "second", "custom"], default="caseA")
    p.add_argument("--seed", type=int, required=seed_required)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="out")


def make_parser():
    ap = argparse.ArgumentParser(prog="zerolaw", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"zerolaw {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw one random structure")
    _profile_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("eval", help="evaluate sentences on a graph file")
    p.add_argument("--graph", required=True)
    p.add_argument("--formula-file", required=True)
    p.add_argument("--n", type=int, help="universe size for edge-list files")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("series", help="Monte Carlo probability series across n")
    _profile_flags(p)
    p.add_argument("--formula-file", required=True)
    p.add_argument("--ngrid")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--tau", type=float, default=0.05)
    p.set_defaults(func=cmd_series)

    for name, helptext in (("classify", "empirical i-like / s-like verdict for a pair"),
                           ("scan", "closure-size, empty-closure or disjoint-family scans")):
        p = sub.add_parser(name, help=helptext)
        _profile_flags(p)
        p.add_argument("--ngrid")
        p.add_argument("--trials", type=int, default=30)
        p.add_argument("--pair", choices=sorted(PAIRS), default="common-neighbor")
        p.add_argument("--pair-json", help='file with {"B": graph JSON, "A": [vertices]}')
        p.add_argument("--placement", choices=PLACEMENTS, default="stratified")
        p.add_argument("--aggregate", choices=["median", "max", "mean"], default="median")
        if name == "classify":
            p.add_argument("--eps-lo", type=float, default=0.15)
            p.add_argument("--eps-hi", type=float, default=0.3)
            p.set_defaults(func=cmd_classify)
        else:
            p.add_argument("--kind", choices=["closure-size", "empty-closure", "weakly-nice"],
                           default="closure-size")
            p.add_argument("--catalog", help="catalog JSON file")
            p.add_argument("--catalog-name", choices=sorted(CATALOGS), default="common-neighbor")
            p.add_argument("--k", type=int, default=3)
            p.add_argument("--m", type=int, default=1)
            p.add_argument("--l", type=int, default=2)
            p.add_argument("--eps", type=float, default=0.5)
            p.set_defaults(func=cmd_scan)

    p = sub.add_parser("ef", help="rank-d equivalence of two graphs")
    p.add_argument("left", help="graph file or name such as K3, P4, C5")
    p.add_argument("right")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--check-game", action="store_true",
                   help="also run the Ehrenfeucht-Fraisse game search")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_ef)

    p = sub.add_parser("amalgam", help="composition table of rank-d types over a base")
    p.add_argument("--base", default="E1", help="graph file or name of N0")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--max-side", type=int, default=3)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_amalgam)
    return ap


def main(argv=None):
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        ap.error(str(e))
    except FormulaSyntaxError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except AdditionTheoremViolation:
        raise
    except (ValueError, UnsupportedSize, OSError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
