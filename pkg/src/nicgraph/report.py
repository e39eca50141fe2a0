"""Report assembly, the homophily-vs-NIC sweep runner, and correlation
helpers shared by the command line surface."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DegenerateInput, InfeasibleTarget, NicgraphError
from .graph import LabeledGraph
from .homophily import HomophilyReport, edge_homophily, homophily_report
from .nic import NicReport, estimate_model, nic_of_graph
from .oracle import DEFAULT_ENUM_CAP, ExactMiResult, exact_mi
from .synth import SynthConfig, calibrate_homophily, generate_pa_graph

SCHEMA_VERSION = 1

# the direction x self-loop conventions a raw directed graph can be read under
CONVENTIONS = (
    ("undirected", True),
    ("undirected", False),
    ("out_neighbors", True),
    ("out_neighbors", False),
)


def convention_name(direction: str, strip_self_loops: bool) -> str:
    return f"{direction},{'strip' if strip_self_loops else 'keep'}-self-loops"


def convention_variants(raw: LabeledGraph) -> dict[str, LabeledGraph]:
    """Views of a raw (directed, loops intact) graph under every convention."""
    out = {}
    for direction, strip in CONVENTIONS:
        g = raw.without_self_loops() if strip else raw
        g = g.symmetrized() if direction == "undirected" else g.with_direction(direction)
        out[convention_name(direction, strip)] = g
    return out


@dataclass
class MetricReport:
    dataset_id: str
    graph_summary: dict
    homophily: HomophilyReport
    nic: NicReport
    oracle: ExactMiResult | None
    timestamp: str
    tool_version: str = __version__
    schema_version: int = SCHEMA_VERSION

    def to_json_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "tool_version": self.tool_version,
            "dataset_id": self.dataset_id,
            "timestamp": self.timestamp,
            "graph_summary": dict(self.graph_summary),
            "homophily": self.homophily.to_json_dict(),
            "nic": self.nic.to_json_dict(),
            "oracle": None if self.oracle is None else self.oracle.to_json_dict(),
        }


def build_metric_report(
    g: LabeledGraph,
    dataset_id: str,
    with_oracle: bool = False,
    z_mode: str = "direct",
    enum_cap: int = DEFAULT_ENUM_CAP,
) -> MetricReport:
    """Compute every metric for one graph under its active conventions."""
    nic_report = nic_of_graph(g, z_mode=z_mode)
    oracle_result = None
    if with_oracle:
        oracle_result = exact_mi(estimate_model(g, z_mode=z_mode), cap=enum_cap)
    return MetricReport(
        dataset_id=dataset_id,
        graph_summary={
            "num_nodes": g.num_nodes,
            "num_edges": g.num_edges,
            "num_classes": g.num_classes,
            "conventions": nic_report.conventions,
        },
        homophily=homophily_report(g),
        nic=nic_report,
        oracle=oracle_result,
        timestamp=datetime.now(timezone.utc).isoformat(),
    )


def pearson(xs, ys) -> float:
    """Sample Pearson correlation; DegenerateInput on bad or flat inputs."""
    xs = [float(x) for x in xs]
    ys = [float(y) for y in ys]
    if len(xs) != len(ys) or len(xs) < 2:
        raise DegenerateInput("need two equally long sequences of length >= 2")
    n = len(xs)
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    dx = [x - mx for x in xs]
    dy = [y - my for y in ys]
    vx = math.fsum(d * d for d in dx)
    vy = math.fsum(d * d for d in dy)
    if vx == 0.0 or vy == 0.0:
        raise DegenerateInput("zero variance")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(vx * vy)
    return min(1.0, max(-1.0, r))


# -- sweep runner ----------------------------------------------------------


@dataclass
class SweepPoint:
    target_homophily: float
    seed: int
    realized_homophily: float | None
    nic_nats: float | None
    status: str = "ok"
    error: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "target_homophily": self.target_homophily,
            "seed": self.seed,
            "realized_homophily": self.realized_homophily,
            "nic_nats": self.nic_nats,
            "status": self.status,
            "error": self.error,
        }


@dataclass
class SweepResult:
    points: list[SweepPoint]
    aggregates: list[dict]
    pearson_r: dict[str, float | None]
    join_issues: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "points": [p.to_json_dict() for p in self.points],
            "aggregates": self.aggregates,
            "pearson_r": self.pearson_r,
            "join_issues": self.join_issues,
        }

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["target_homophily", "seed", "realized_homophily", "nic_nats", "status"])
        for p in self.points:
            writer.writerow([p.target_homophily, p.seed, p.realized_homophily, p.nic_nats, p.status])
        return buf.getvalue()


def _point_seed(base_seed: int, grid_index: int, trial: int) -> int:
    return base_seed + 100_003 * grid_index + trial


def _run_grid_point(args) -> list[SweepPoint]:
    template_doc, target, grid_index, trials = args
    template = SynthConfig.from_json_dict(template_doc)
    points = []
    try:
        weight = calibrate_homophily(
            SynthConfig.from_json_dict({**template_doc, "target_homophily": target})
        )
    except InfeasibleTarget as exc:
        return [
            SweepPoint(target, _point_seed(template.seed, grid_index, t), None, None,
                       status="failed", error=str(exc))
            for t in range(trials)
        ]
    for t in range(trials):
        seed = _point_seed(template.seed, grid_index, t)
        cfg = SynthConfig.from_json_dict(
            {**template_doc, "target_homophily": target, "seed": seed}
        )
        g = generate_pa_graph(cfg, same_weight=weight)
        points.append(
            SweepPoint(
                target_homophily=target,
                seed=seed,
                realized_homophily=edge_homophily(g),
                nic_nats=nic_of_graph(g).nic_nats,
            )
        )
    return points


def _aggregate(points: list[SweepPoint]) -> list[dict]:
    by_target: dict[float, list[SweepPoint]] = {}
    for p in points:
        by_target.setdefault(p.target_homophily, []).append(p)
    rows = []
    for target in sorted(by_target):
        ok = [p for p in by_target[target] if p.status == "ok"]
        row = {"target_homophily": target, "trials": len(by_target[target]), "ok": len(ok)}
        if ok:
            nic_vals = np.array([p.nic_nats for p in ok])
            realized = np.array([p.realized_homophily for p in ok])
            row.update(
                mean_realized_homophily=float(realized.mean()),
                mean_nic_nats=float(nic_vals.mean()),
                std_nic_nats=float(nic_vals.std(ddof=1)) if len(ok) > 1 else 0.0,
                stderr_nic_nats=(
                    float(nic_vals.std(ddof=1) / math.sqrt(len(ok))) if len(ok) > 1 else 0.0
                ),
            )
        rows.append(row)
    return rows


def _safe_pearson(xs, ys) -> float | None:
    try:
        return pearson(xs, ys)
    except DegenerateInput:
        return None


def run_sweep(
    template: SynthConfig,
    homophily_grid,
    trials: int,
    jobs: int = 1,
    join_csv=None,
) -> SweepResult:
    """Generate and measure graphs over a grid of homophily targets.

    Each (grid point, trial) pair owns a deterministic seed derived from the
    template seed, so re-running a partially failed sweep reproduces the
    successful points. Calibration failures mark their point failed and the
    sweep continues. ``join_csv`` merges an external "key,value" table (key
    = grid point) so correlations against externally measured quantities can
    be computed without re-running anything.
    """
    grid = sorted(float(h) for h in homophily_grid)
    tasks = [(template.to_json_dict(), target, i, trials) for i, target in enumerate(grid)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_grid_point, tasks))
    else:
        chunks = [_run_grid_point(t) for t in tasks]
    points = [p for chunk in chunks for p in chunk]

    aggregates = _aggregate(points)
    usable = [r for r in aggregates if r.get("ok")]
    correlations: dict[str, float | None] = {
        "realized_homophily~nic_nats": _safe_pearson(
            [r["mean_realized_homophily"] for r in usable],
            [r["mean_nic_nats"] for r in usable],
        )
    }

    join_issues: list[str] = []
    if join_csv is not None:
        joined = _read_join_csv(join_csv)
        matched_nic, matched_ext, matched_h = [], [], []
        seen = set()
        for row in usable:
            key = _match_key(row["target_homophily"], joined)
            if key is None:
                join_issues.append(
                    f"grid point {row['target_homophily']} has no joined value"
                )
                continue
            seen.add(key)
            row["joined_value"] = joined[key]
            matched_nic.append(row["mean_nic_nats"])
            matched_h.append(row["mean_realized_homophily"])
            matched_ext.append(joined[key])
        for key in joined:
            if key not in seen:
                join_issues.append(f"joined key {key!r} matches no grid point")
        correlations["nic_nats~joined"] = _safe_pearson(matched_nic, matched_ext)
        correlations["realized_homophily~joined"] = _safe_pearson(matched_h, matched_ext)

    return SweepResult(
        points=points,
        aggregates=aggregates,
        pearson_r=correlations,
        join_issues=join_issues,
    )


def _read_join_csv(path) -> dict[str, float]:
    """Parse a two-column "key,value" CSV; a literal header row is skipped."""
    out: dict[str, float] = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            if [c.strip().lower() for c in row[:2]] == ["key", "value"]:
                continue
            if len(row) != 2:
                raise NicgraphError(f"join CSV rows must be key,value pairs, got {row}")
            out[row[0].strip()] = float(row[1])
    return out


def _match_key(target: float, joined: dict[str, float]) -> str | None:
    for key in joined:
        try:
            if abs(float(key) - target) <= 1e-9:
                return key
        except ValueError:
            continue
    return None


def write_json(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
