"""Command-line interface: generate, mine, eval, bound.

Exit codes: 0 success, 2 usage or configuration error, 3 no path of the
requested length, 4 sampler rejection budget exhausted.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

from . import __version__
from .baseline import exact_topk
from .errors import GraphFormatError, GraphValidationError, NoPathError, RejectionBudgetExceeded
from .eval import (
    BoundInputs,
    average_precision,
    estimate_a,
    item_universe_bound,
    mean_estimation_error,
    missing_estimates,
    pattern_union_bound,
    ranking_similarity,
)
from .gen import RANDOM_DAG, RANDOM_DIGRAPH, DbSizeRule, GenConfig, generate
from .graph import WALK_COUNT, WEIGHT_MODES, dump_graph, read_graph
from .miner import mine_topk
from .patterns import load_ranked
from .sampler import read_sample_weights, rejection_budget_from_env, sample_batch

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_PATH = 3
EXIT_BUDGET = 4


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _digest(path: str) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def manifest_path(out: str) -> str:
    return out + ".manifest.json"


def _write_manifest(args, command: str, extra: dict) -> None:
    target = getattr(args, "manifest", None)
    out = getattr(args, "output", None)
    if target is None and out not in (None, "-"):
        target = manifest_path(out)
    if target is None:
        return
    flags = {k: v for k, v in vars(args).items() if k not in ("func",)}
    doc = {"command": command, "flags": flags, "version": __version__, **extra}
    with open(target, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True, default=str)
        fh.write("\n")


def cmd_generate(args) -> int:
    try:
        rule = DbSizeRule.parse(args.db)
        cfg = GenConfig(
            vertex_count=args.vertices,
            edge_count=args.edges,
            item_universe_size=args.items,
            avg_items_per_transaction=args.avg_items,
            db_size_rule=rule,
            graph_shape=args.shape,
            seed=args.seed,
        )
        graph = generate(cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(dump_graph(graph), args.output)
    print(
        f"generated {graph.n_vertices} vertices, {graph.n_edges} edges, "
        f"{graph.n_transactions} transactions, {graph.n_items} items",
        file=sys.stderr,
    )
    return EXIT_OK


def _load_graph_arg(path: str):
    try:
        return read_graph(path)
    except OSError as exc:
        raise UsageError(f"cannot read graph {path}: {exc}") from exc
    except (GraphFormatError, GraphValidationError) as exc:
        raise UsageError(f"{path}: {exc}") from exc


def cmd_mine(args) -> int:
    graph = _load_graph_arg(args.graph)
    if args.l < 1 or args.k < 1:
        raise UsageError("-l and -k must be positive")
    timings = {"sampling_seconds": 0.0, "mining_seconds": 0.0}
    extra = {"graph_digest": _digest(args.graph), "seed": args.seed}
    if args.mode == "exact":
        t0 = time.perf_counter()
        ranked = exact_topk(graph, args.l, args.k, max_width=args.max_width)
        timings["mining_seconds"] = time.perf_counter() - t0
        extra["d_l_size"] = ranked.meta["d_l_size"]
    else:
        if args.samples is None:
            raise UsageError("--mode sample requires --samples")
        if args.samples < 1:
            raise UsageError("--samples must be positive")
        try:
            budget = rejection_budget_from_env()
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        t0 = time.perf_counter()
        batch = sample_batch(
            graph, args.l, args.samples, mode=args.weights, seed=args.seed, workers=args.workers, budget=budget
        )
        t1 = time.perf_counter()
        ranked = mine_topk(batch, args.k, max_width=args.max_width)
        t2 = time.perf_counter()
        timings["sampling_seconds"] = t1 - t0
        timings["mining_seconds"] = t2 - t1
        extra["rejections"] = batch.rejections
        extra["rejection_rate"] = batch.rejection_rate
        extra["total_weight"] = ranked.meta["total_weight"]
        extra["a_hat"] = estimate_a(batch)
        if args.export_samples:
            with open(args.export_samples, "w", encoding="utf-8", newline="\n") as fh:
                batch.to_jsonl(fh)
    timings["total_seconds"] = timings["sampling_seconds"] + timings["mining_seconds"]
    extra["timings"] = timings
    extra["entries"] = len(ranked)
    text = ranked.to_csv() if args.format == "csv" else ranked.to_json()
    _emit(text, args.output)
    _write_manifest(args, "mine", extra)
    return EXIT_OK


def _parse_ks(values: list[str]) -> list[int]:
    ks = []
    for v in values:
        for part in v.split(","):
            part = part.strip()
            if not part:
                continue
            try:
                k = int(part)
            except ValueError:
                raise UsageError(f"bad k value {part!r}") from None
            if k < 1:
                raise UsageError(f"k must be positive, got {k}")
            ks.append(k)
    if not ks:
        raise UsageError("at least one -k value is required")
    return ks


def _read_ranked(path: str):
    try:
        return load_ranked(Path(path).read_text(encoding="utf-8"), where=path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _manifest_of(path: str) -> dict:
    p = Path(manifest_path(path))
    if p.exists():
        try:
            return json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            return {}
    return {}


def cmd_eval(args) -> int:
    truth = _read_ranked(args.truth)
    produced = _read_ranked(args.produced)
    ks = _parse_ks(args.k)
    for k in ks:
        if k > len(truth) or k > len(produced):
            raise UsageError(f"k={k} exceeds list length (truth {len(truth)}, produced {len(produced)})")
    have_freq = all(e.freq is not None for e in truth.entries)
    estimates = produced.frequencies()
    run = _manifest_of(args.produced).get("flags", {})
    reports = []
    for k in ks:
        row = {"k": k}
        if have_freq:
            row["ME"] = mean_estimation_error(truth, estimates, k)
            row["ME_missing"] = len(missing_estimates(truth, estimates, k))
        else:
            row["ME"] = None
        row["AP"] = average_precision(produced, truth, k)
        row["RS"] = ranking_similarity(produced, truth, k)
        row["produced_length"] = len(produced)
        row["m"] = run.get("samples")
        row["l"] = run.get("l")
        row["seed"] = run.get("seed")
        reports.append(row)
    _emit(json.dumps(reports, indent=1) + "\n", args.output)
    return EXIT_OK


def cmd_bound(args) -> int:
    if args.items is None and args.graph is None:
        raise UsageError("give --items or --graph")
    items = args.items if args.items is not None else _load_graph_arg(args.graph).n_items
    a = args.a
    a_source = "given"
    if a is None and args.sample_file:
        try:
            with open(args.sample_file, encoding="utf-8") as fh:
                a = estimate_a(read_sample_weights(fh))
        except (OSError, ValueError) as exc:
            raise UsageError(f"{args.sample_file}: {exc}") from exc
        a_source = "estimated"
    if a is None:
        a = 1.0
        a_source = "default"
    try:
        inputs = BoundInputs(
            epsilon=args.epsilon, delta=args.delta, item_count=items, l=args.l, a=a, pattern_count=args.patterns
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = {
        "epsilon": inputs.epsilon,
        "delta": inputs.delta,
        "items": inputs.item_count,
        "l": inputs.l,
        "a": inputs.a,
        "a_source": a_source,
    }
    universe = item_universe_bound(inputs.epsilon, inputs.delta, inputs.a, inputs.item_count, inputs.l)
    report["item_universe_bound"] = universe
    report["item_universe_samples"] = math.ceil(universe)
    if inputs.pattern_count is not None:
        union = pattern_union_bound(inputs.epsilon, inputs.delta, inputs.a, inputs.pattern_count)
        report["patterns"] = inputs.pattern_count
        report["pattern_union_bound"] = union
        report["pattern_union_samples"] = math.ceil(union)
    _emit(json.dumps(report, indent=1) + "\n", args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dgsp", description="Top-k sequential patterns on database graphs.")
    parser.add_argument("--version", action="version", version=f"dgsp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic database graph")
    p.add_argument("--vertices", type=int, required=True)
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--db", required=True, help="constant:N or degree-linear:BASE:SLOPE")
    p.add_argument("--items", type=int, required=True, help="item universe size")
    p.add_argument("--avg-items", type=float, required=True, help="mean items per transaction")
    p.add_argument("--shape", choices=[RANDOM_DAG, RANDOM_DIGRAPH], default=RANDOM_DAG)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("mine", help="mine top-k length-l patterns")
    p.add_argument("--mode", choices=["exact", "sample"], required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("-l", type=int, required=True, help="path length (edges)")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--samples", type=int, help="sample size m (sample mode)")
    p.add_argument("--weights", choices=list(WEIGHT_MODES), default=WALK_COUNT)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--max-width", type=int, default=None, help="cap on items per positional itemset")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--export-samples", help="write the sample batch as JSON lines")
    p.add_argument("--manifest", help="manifest path (default: OUTPUT.manifest.json when -o is given)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("eval", help="compare a produced ranking against the truth")
    p.add_argument("--truth", required=True)
    p.add_argument("--produced", required=True)
    p.add_argument("-k", action="append", required=True, help="rank cut-off; repeat or comma-separate")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bound", help="sample-size bounds")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--items", type=int, help="item universe size |I|")
    p.add_argument("--graph", help="read |I| from a graph file")
    p.add_argument("-l", type=int, required=True)
    p.add_argument("--a", type=float, help="concentration constant a in (0, 1]")
    p.add_argument("--sample-file", help="JSON-lines sample export; a is estimated from it")
    p.add_argument("--patterns", type=int, help="number of candidate patterns |Q_l|")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"dgsp {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoPathError as exc:
        print(f"dgsp {args.command}: {exc}", file=sys.stderr)
        return EXIT_NO_PATH
    except RejectionBudgetExceeded as exc:
        print(f"dgsp {args.command}: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
