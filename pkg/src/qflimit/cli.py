"""Command line front-end: ``qflimit <command> ...``.

Exit codes: 1 bad usage or parameters, 2 unreadable or malformed input,
3 numeric failure.  Every file written gets a ``<file>.json`` sidecar holding
the argument vector that produced it.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._io import atomic_open, dumps, read_json, write_json
from .diagnostics import (
    classify_normality,
    ks_distance,
    moment_report,
    oracle_fourth_moment,
    truncated_fourth_moment_curve,
    wasserstein1,
)
from .distributions import parse_distribution
from .ensembles import EnsembleSpec, generate
from .errors import GraphError, InvalidParameter, QFLimitError
from .graph import read_edge_list, write_edge_list
from .limits import LimitSpec, estimate_limit_spec, sample_limit
from .motifs import MOTIFS, brute_force_count, count_motifs
from .sampling import EmpiricalSample, monte_carlo


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _parse_value(text: str):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def _spec_from_args(args) -> EnsembleSpec:
    if args.spec:
        text = args.spec
        obj = read_json(text) if Path(text).exists() else json.loads(text)
        if args.seed is not None:
            obj["seed"] = args.seed
        return EnsembleSpec.from_json(obj)
    if not args.kind:
        raise UsageError("gen needs --kind or --spec")
    params = {}
    for item in args.param or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {item!r}")
        params[key] = _parse_value(val)
    return EnsembleSpec(args.kind, params, args.seed or 0)


def _sidecar(path, args, extra=None):
    meta = {"qflimit": __version__, "argv": args.argv}
    meta.update(extra or {})
    write_json(Path(path).with_name(Path(path).name + ".json"), meta)


def _flatten(obj, prefix=""):
    out = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            out.update(_flatten(v, f"{prefix}{k}."))
    elif isinstance(obj, (list, tuple)) and obj and isinstance(obj[0], (list, tuple, dict)):
        for i, v in enumerate(obj):
            out.update(_flatten(v, f"{prefix}{i}."))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            out[f"{prefix}{i}"] = v
    else:
        out[prefix.rstrip(".")] = obj
    return out


def _render(obj, fmt: str) -> str:
    if fmt == "json":
        return dumps(obj) + "\n"
    rows = obj if isinstance(obj, list) else [obj]
    flat = [_flatten(r) for r in rows]
    keys = list(dict.fromkeys(k for r in flat for k in r))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    writer.writeheader()
    writer.writerows(flat)
    return buf.getvalue()


def _emit(obj, args, extra=None):
    text = _render(obj, args.format)
    if args.out:
        with atomic_open(args.out) as fh:
            fh.write(text)
        _sidecar(args.out, args, extra)
    else:
        sys.stdout.write(text)


def _require_out(args):
    if not args.out:
        raise UsageError(f"{args.command} needs --out")


def _seed(args) -> int:
    return 0 if args.seed is None else args.seed


# -- commands --------------------------------------------------------------

def cmd_gen(args):
    _require_out(args)
    spec = _spec_from_args(args)
    g = generate(spec)
    write_edge_list(g, args.out)
    _sidecar(args.out, args, {"spec": spec.to_json(), "n": g.n, "edges": g.edge_count,
                              "graph_id": g.graph_id})


def cmd_estimate(args):
    g = read_edge_list(args.graph)
    spec = estimate_limit_spec(g, args.K, args.s_max)
    spec.provenance["graph_path"] = str(args.graph)
    _emit(spec.to_json(), args)


def cmd_simulate(args):
    _require_out(args)
    g = read_edge_list(args.graph)
    f = parse_distribution(args.dist)
    sample = monte_carlo(g, f, args.reps, _seed(args), M=args.M, threads=args.threads)
    sample.provenance.update({"graph_path": str(args.graph), "argv": args.argv})
    sample.to_csv(args.out)


def cmd_limit_sample(args):
    _require_out(args)
    spec = LimitSpec.load(args.limitspec)
    f = parse_distribution(args.dist)
    sample = sample_limit(spec, f, args.reps, _seed(args), M=args.M, threads=args.threads)
    sample.provenance.update({"limitspec_path": str(args.limitspec), "argv": args.argv})
    sample.to_csv(args.out)


def cmd_compare(args):
    a = EmpiricalSample.load(args.sample)
    if args.against:
        b = EmpiricalSample.load(args.against)
        out = {"ks": ks_distance(a, b), "wasserstein1": wasserstein1(a, b),
               "against": str(args.against)}
    else:
        out = {"ks": ks_distance(a, args.law), "law": args.law}
    out.update({"sample": str(args.sample), "reps": a.reps})
    _emit(out, args)


def cmd_fourth(args):
    g = read_edge_list(args.graph)
    f = parse_distribution(args.dist)
    if args.M_grid:
        grid = [float(t) for t in args.M_grid.split(",")]
        reports = truncated_fourth_moment_curve(g, f, grid)
    else:
        reports = [moment_report(g, f)]
    rows = [r.to_json() for r in reports]
    if args.oracle:
        for row in rows:
            row["oracle_fourth"] = oracle_fourth_moment(g, f, row["M"])
            row["oracle_motifs"] = {
                "edges": brute_force_count(MOTIFS["K2"], g),
                "cherries": brute_force_count(MOTIFS["K12"], g),
                "triangles": brute_force_count(MOTIFS["K3"], g),
                "four_cycles": brute_force_count(MOTIFS["C4"], g),
                "disjoint_edge_pairs": brute_force_count(MOTIFS["2K2"], g),
            }
    _emit(rows if len(rows) > 1 or args.M_grid else rows[0], args)


def cmd_motifs(args):
    g = read_edge_list(args.graph)
    out = count_motifs(g).to_json()
    if args.oracle:
        out["oracle"] = {name: brute_force_count(MOTIFS[name], g)
                         for name in ("K2", "K12", "K3", "C4", "2K2")}
    _emit(out, args)


def cmd_diagnose(args):
    g = read_edge_list(args.graph)
    f = parse_distribution(args.dist)
    verdict = classify_normality(g, f, args.threshold, M=args.M)
    out = verdict.to_json()
    out["graph_path"] = str(args.graph)
    _emit(out, args)


def cmd_hist(args):
    sample = EmpiricalSample.load(args.sample)
    if args.bins < 1:
        raise InvalidParameter("bins must be >= 1")
    counts, edges = np.histogram(sample.values, bins=args.bins)
    buf = io.StringIO()
    buf.write("bin_left,bin_right,count\n")
    for lo, hi, c in zip(edges[:-1].tolist(), edges[1:].tolist(), counts.tolist()):
        buf.write(f"{lo!r},{hi!r},{int(c)}\n")
    if args.out:
        with atomic_open(args.out) as fh:
            fh.write(buf.getvalue())
        _sidecar(args.out, args, {"sample": str(args.sample), "bins": args.bins})
    else:
        sys.stdout.write(buf.getvalue())


# -- parser ----------------------------------------------------------------

def _global_flags(p, suppress):
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--seed", type=int, default=d, help="master seed (u64)")
    p.add_argument("--out", default=d, help="output path")
    p.add_argument("--threads", type=int, default=d,
                   help="worker cap; falls back to QFLIMIT_THREADS")
    p.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS if suppress
                   else "json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qflimit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        _global_flags(p, suppress=True)
        p.set_defaults(func=func)
        return p

    p = add("gen", cmd_gen, "generate a graph from an ensemble spec")
    p.add_argument("--kind")
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p.add_argument("--spec", help="ensemble spec as JSON text or a JSON file")

    p = add("estimate", cmd_estimate, "estimate (sigma, rho, rho^2) from a graph")
    p.add_argument("graph")
    p.add_argument("--K", type=int)
    p.add_argument("--s-max", type=int, dest="s_max")

    for name, func, target in (("simulate", cmd_simulate, "graph"),
                               ("limit-sample", cmd_limit_sample, "limitspec")):
        p = add(name, func, f"sample from a {target}")
        p.add_argument(target)
        p.add_argument("--dist", default="normal")
        p.add_argument("--reps", type=int, default=10000)
        p.add_argument("--M", type=float, help="truncation level")

    p = add("compare", cmd_compare, "distances between a sample and a sample or law")
    p.add_argument("sample")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--against", help="second sample CSV")
    grp.add_argument("--law", help="normal, chi or halfdiff")

    p = add("fourth", cmd_fourth, "exact fourth moment of the statistic")
    p.add_argument("graph")
    p.add_argument("--dist", default="normal")
    p.add_argument("--M-grid", dest="M_grid", help="comma-separated truncation levels")
    p.add_argument("--oracle", action="store_true", help="add brute-force values (tiny graphs)")

    p = add("motifs", cmd_motifs, "motif counts")
    p.add_argument("graph")
    p.add_argument("--oracle", action="store_true")

    p = add("diagnose", cmd_diagnose, "normality verdict")
    p.add_argument("graph")
    p.add_argument("--dist", default="normal")
    p.add_argument("--threshold", type=float, default=0.05)
    p.add_argument("--M", type=float)

    p = add("hist", cmd_hist, "histogram of a sample as CSV")
    p.add_argument("sample")
    p.add_argument("--bins", type=int, default=50)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        args.argv = argv
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, GraphError) as exc:
        print(f"qflimit: {exc}", file=sys.stderr)
        return 2
    except QFLimitError as exc:
        print(f"qflimit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"qflimit: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
