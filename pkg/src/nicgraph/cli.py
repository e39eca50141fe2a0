"""Command line surface.

Subcommands: ``metrics`` (homophily + NIC report for a dataset), ``generate``
(synthetic preferential-attachment graph), ``sweep`` (homophily grid vs NIC),
``oracle`` (exact MI for a label model JSON), and ``map-bound`` (single-node
Bayes accuracy for a Gaussian feature model). Dataset paths resolve against
$NICGRAPH_DATA_DIR when they do not exist locally.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from .errors import FormatMismatch, NicgraphError
from .graph import IngestOptions, LabeledGraph, load_edge_list, load_geomgcn_folder, load_graph_json
from .nic import LabelModel, nic
from .oracle import DEFAULT_ENUM_CAP, exact_mi
from .report import (
    build_metric_report,
    convention_variants,
    run_sweep,
    write_json,
)
from .synth import GaussianMixtureModel, SynthConfig, attach_features, generate_pa_graph, map_accuracy

DATA_DIR_ENV = "NICGRAPH_DATA_DIR"


def _resolve_input(raw: str) -> Path:
    path = Path(raw)
    if path.exists():
        return path
    data_dir = os.environ.get(DATA_DIR_ENV)
    if data_dir:
        candidate = Path(data_dir) / raw
        if candidate.exists():
            return candidate
    raise NicgraphError(f"input {raw!r} not found (also tried ${DATA_DIR_ENV})")


def _ingest_options(args) -> IngestOptions:
    return IngestOptions(
        strip_self_loops=not args.keep_self_loops,
        symmetrize=args.convention == "undirected",
    )


def _apply_convention(g: LabeledGraph, convention: str) -> LabeledGraph:
    if convention == "directed-in":
        return g.with_direction("in_neighbors")
    if convention == "directed-out":
        return g.with_direction("out_neighbors")
    return g


def load_any(raw: str, opts: IngestOptions, labels_path: str | None = None) -> LabeledGraph:
    """Load a graph from a folder, canonical JSON file, or edge list."""
    path = _resolve_input(raw)
    if path.is_dir():
        return load_geomgcn_folder(path, opts)
    if path.suffix == ".json":
        return load_graph_json(path)
    if labels_path is None:
        raise NicgraphError("edge-list input needs --labels")
    return load_edge_list(path, _resolve_input(labels_path), opts)


def _emit(doc: dict, args, csv_rows=None) -> None:
    if getattr(args, "format", "json") == "csv" and csv_rows is not None:
        buf = io.StringIO()
        writer = csv.writer(buf)
        for row in csv_rows:
            writer.writerow(row)
        text = buf.getvalue()
    else:
        text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _cmd_metrics(args) -> int:
    opts = _ingest_options(args)
    g = _apply_convention(load_any(args.input, opts, args.labels), args.convention)
    report = build_metric_report(
        g, dataset_id=args.input, with_oracle=args.with_oracle
    )
    doc = report.to_json_dict()
    if args.all_conventions:
        raw = load_any(args.input, IngestOptions(strip_self_loops=False, symmetrize=False), args.labels)
        per_conv = {}
        for name, variant in convention_variants(raw).items():
            conv_report = build_metric_report(variant, dataset_id=args.input)
            per_conv[name] = {
                "h_edge": conv_report.homophily.h_edge,
                "nic_nats": conv_report.nic.nic_nats,
            }
        doc["all_conventions"] = per_conv
    rows = [
        ["key", "value"],
        ["dataset_id", report.dataset_id],
        ["num_nodes", report.graph_summary["num_nodes"]],
        ["num_edges", report.graph_summary["num_edges"]],
        ["num_classes", report.graph_summary["num_classes"]],
        ["h_edge", report.homophily.h_edge],
        ["h_node", report.homophily.h_node],
        ["assortativity", report.homophily.assortativity],
        ["nic_nats", report.nic.nic_nats],
    ]
    _emit(doc, args, csv_rows=rows)
    return 0


def _cmd_generate(args) -> int:
    if args.config:
        cfg = SynthConfig.load(args.config)
        if args.seed is not None:
            cfg = SynthConfig.from_json_dict({**cfg.to_json_dict(), "seed": args.seed})
    else:
        cfg = SynthConfig(
            num_nodes=args.num_nodes,
            num_classes=args.num_classes,
            m=args.edges_per_node,
            target_homophily=args.target_homophily,
            seed=args.seed if args.seed is not None else 0,
        )
    g = generate_pa_graph(cfg)
    if args.features_gmm:
        gmm = GaussianMixtureModel.from_json_dict(json.loads(Path(args.features_gmm).read_text()))
        feats = attach_features(g, gmm, seed=cfg.seed)
        target = Path(args.features_out or "features.csv")
        with open(target, "w", newline="") as fh:
            writer = csv.writer(fh)
            for row in feats:
                writer.writerow([f"{x:.10g}" for x in row])
    doc = g.to_json_dict()
    _emit(doc, args)
    return 0


def _cmd_sweep(args) -> int:
    template = SynthConfig.load(args.config)
    result = run_sweep(
        template,
        homophily_grid=args.grid,
        trials=args.trials,
        jobs=args.jobs,
        join_csv=args.join_csv,
    )
    doc = result.to_json_dict()
    if args.out:
        base = Path(args.out)
        write_json(doc, base.with_suffix(".json"))
        base.with_suffix(".csv").write_text(result.to_csv_text())
    else:
        if args.format == "csv":
            sys.stdout.write(result.to_csv_text())
        else:
            sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    return 0


def _cmd_oracle(args) -> int:
    model = LabelModel.from_json_dict(json.loads(Path(_resolve_input(args.model)).read_text()))
    bound = nic(model)
    result = exact_mi(model, cap=args.cap)
    doc = {
        "nic": bound.to_json_dict(),
        "oracle": result.to_json_dict(),
        "bound_holds": bound.nic_nats <= result.mi_nats + 1e-9,
    }
    rows = [
        ["key", "value"],
        ["nic_nats", bound.nic_nats],
        ["mi_nats", result.mi_nats],
        ["h_marginal", result.h_marginal],
        ["h_conditional", result.h_conditional],
        ["num_configs", result.num_configs],
    ]
    _emit(doc, args, csv_rows=rows)
    return 0


def _cmd_map_bound(args) -> int:
    gmm = GaussianMixtureModel.from_json_dict(json.loads(Path(_resolve_input(args.gmm)).read_text()))
    value = map_accuracy(
        gmm, method=args.method, num_samples=args.samples,
        seed=args.seed if args.seed is not None else 0,
    )
    _emit({"method": args.method, "map_accuracy": value}, args,
          csv_rows=[["key", "value"], ["map_accuracy", value]])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nicgraph", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this path instead of stdout")
    common.add_argument("--seed", type=int, default=None, help="override the random seed")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("metrics", parents=[common], help="homophily and NIC report for a dataset")
    p.add_argument("input", help="dataset folder, canonical graph JSON, or edge-list file")
    p.add_argument("--labels", help="labels file (edge-list input only)")
    p.add_argument("--convention", choices=("undirected", "directed-in", "directed-out"),
                   default="undirected")
    p.add_argument("--keep-self-loops", action="store_true")
    p.add_argument("--with-oracle", action="store_true",
                   help="also run the exact MI enumeration (small graphs only)")
    p.add_argument("--all-conventions", action="store_true",
                   help="append h_edge and NIC under every direction x self-loop convention")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("generate", parents=[common], help="generate a synthetic benchmark graph")
    p.add_argument("--config", help="SynthConfig JSON file")
    p.add_argument("--num-nodes", type=int, default=1000)
    p.add_argument("--num-classes", type=int, default=2)
    p.add_argument("--edges-per-node", type=int, default=5)
    p.add_argument("--target-homophily", type=float, default=0.5)
    p.add_argument("--features-gmm", help="GaussianMixtureModel JSON to sample node features")
    p.add_argument("--features-out", help="CSV path for sampled features")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("sweep", parents=[common], help="NIC across a homophily grid")
    p.add_argument("--config", required=True, help="template SynthConfig JSON")
    p.add_argument("--grid", type=float, nargs="+", required=True)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--join-csv", help="external key,value CSV to correlate against")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("oracle", parents=[common], help="exact MI for a label model JSON")
    p.add_argument("model", help="LabelModel JSON file")
    p.add_argument("--cap", type=int, default=DEFAULT_ENUM_CAP)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("map-bound", parents=[common], help="single-node Bayes accuracy bound")
    p.add_argument("--gmm", required=True, help="GaussianMixtureModel JSON file")
    p.add_argument("--method", choices=("closed_form_1d", "quadrature_1d", "monte_carlo"),
                   default="closed_form_1d")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.set_defaults(func=_cmd_map_bound)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NicgraphError as exc:
        sys.stdout.write(
            json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}) + "\n"
        )
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
