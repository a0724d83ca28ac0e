"""Command-line interface.

Subcommands: score, omega, cluster, gindex, simulate, and the flatland group
(render, score, augment, gen). Report-writing paths emit figures next to the
structured/CSV output. All randomness is seeded (default 0), so identical
inputs, flags, and seeds reproduce identical outputs byte for byte; numeric
text output uses 6 decimal places.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from . import flatland as fl
from .benchmark import (
    EvaluationManifest,
    SweepConfig,
    g_index,
    score_documents,
    simulate_responsiveness,
)
from .divergence import pairwise_matrix
from .errors import FlowError, ManifestError
from .flow import build_dag, parse_flow
from .generalization import TaskInstance, cluster_domains, gd, omega
from .manifest import load_curriculum_text, load_evaluation_manifest_text

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DEGENERATE = 2

_BUDGET_ENV = "GINDEX_CLIQUE_BUDGET"


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with status 1."""

    def error(self, message: str):  # noqa: D102 - argparse hook
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _fmt(value: float) -> str:
    return format(value, ".6f")


def _dump_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _resolve_budget(args: argparse.Namespace) -> int | None:
    if getattr(args, "clique_budget", None) is not None:
        return args.clique_budget
    env = os.environ.get(_BUDGET_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ValueError(f"{_BUDGET_ENV} must be an integer, got '{env}'") from exc
    return None


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _cmd_score(args: argparse.Namespace) -> int:
    report = score_documents(_read_text(args.reference), _read_text(args.generated),
                             _resolve_budget(args))
    payload = report.to_dict()
    payload["theta"] = report.theta
    if args.format == "csv":
        text = _csv_text(
            ["delta", "theta", "exact", "syntax_errors", "function_errors", "dataflow_errors"],
            [[
                _fmt(report.delta), _fmt(report.theta), str(report.exact).lower(),
                str(report.errors.syntax), str(report.errors.function),
                str(report.errors.dataflow),
            ]],
        )
    else:
        text = _dump_json(payload)
    _emit(text, args.out)
    return EXIT_DEGENERATE if report.errors.syntax > 0 else EXIT_OK


def _cmd_omega(args: argparse.Namespace) -> int:
    budget = _resolve_budget(args)
    task = TaskInstance(spec_text="", reference_dag=build_dag(parse_flow(_read_text(args.task))))
    if len(task.reference_dag) == 0:
        raise ValueError("task program must be nonempty")
    curriculum = load_curriculum_text(_read_text(args.curriculum))
    domains = [
        {"domain_id": d.id, "omega": omega(task, d, budget)} for d in curriculum.domains
    ]
    for entry in domains:
        entry["gd"] = gd(entry["omega"])
    overall = min(entry["omega"] for entry in domains)
    if args.format == "csv":
        rows = [[d["domain_id"], _fmt(d["omega"]), _fmt(d["gd"])] for d in domains]
        rows.append(["overall", _fmt(overall), _fmt(gd(overall))])
        text = _csv_text(["domain_id", "omega", "gd"], rows)
    else:
        text = _dump_json({"overall": overall, "domains": domains})
    _emit(text, args.out)
    return EXIT_OK


def _collect_program_paths(inputs: list[str]) -> list[Path]:
    paths: list[Path] = []
    for raw in inputs:
        p = Path(raw)
        if p.is_dir():
            paths.extend(sorted(p.glob("**/*.json")))
        else:
            paths.append(p)
    if not paths:
        raise ValueError("no program files found")
    return paths


def _cmd_cluster(args: argparse.Namespace) -> int:
    budget = _resolve_budget(args)
    paths = _collect_program_paths(args.programs)
    dags = [build_dag(parse_flow(_read_text(str(p)))) for p in paths]
    partition = cluster_domains(dags, threshold=args.threshold, budget=budget, jobs=args.jobs)
    payload = partition.to_dict()
    for cluster in payload["clusters"]:
        cluster["files"] = [str(paths[i]) for i in cluster["members"]]
    _emit(_dump_json(payload), args.out)
    plot_path = args.plot
    if plot_path is None and args.out:
        plot_path = str(Path(args.out).with_suffix(".png"))
    if plot_path:
        from .plots import save_divergence_heatmap

        matrix = pairwise_matrix(dags, dags, budget=budget, jobs=args.jobs)
        save_divergence_heatmap(matrix, plot_path, [p.name for p in paths])
    return EXIT_OK


def _report_csv(report) -> str:
    rows = [
        [t.task_id, _fmt(t.theta), _fmt(t.omega), _fmt(t.tc), str(t.syntax_errors)]
        for t in report.per_task
    ]
    return _csv_text(["task_id", "theta", "omega", "tc", "syntax_errors"], rows)


def _cmd_gindex(args: argparse.Namespace) -> int:
    manifest = load_evaluation_manifest_text(_read_text(args.manifest))
    if args.rho is not None:
        manifest = EvaluationManifest(
            system=replace(manifest.system, priors_rho=args.rho),
            curriculum=manifest.curriculum,
            test_tasks=manifest.test_tasks,
        )
    report = g_index(manifest, budget=_resolve_budget(args))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(_dump_json(report.to_dict()), encoding="utf-8")
    (out_dir / "report.csv").write_text(_report_csv(report), encoding="utf-8")
    from .plots import save_report_figure

    save_report_figure(report, str(out_dir / "report.png"))
    print(
        f"g-index={_fmt(report.g_index)} tasks={len(report.per_task)} "
        f"mean_theta={_fmt(report.mean_theta)}"
    )
    return EXIT_OK


_SWEEP_DEFAULTS = {
    "samples": (640.0, 10240.0),
    "compute": (10.0, 10000.0),
    "theta": (0.0, 1.0),
}


def _cmd_simulate(args: argparse.Namespace) -> int:
    start, stop = _SWEEP_DEFAULTS[args.sweep]
    config = SweepConfig(
        sweep=args.sweep,
        start=args.start if args.start is not None else start,
        stop=args.stop if args.stop is not None else stop,
        points=args.points,
        theta=args.theta,
        total_samples=args.samples,
        compute_teraflops=args.tflops,
        training_time_seconds=args.seconds,
        domain_count=args.domains,
        rho=args.rho if args.rho is not None else 1.0,
        omega_low=args.omega_low,
        omega_high=args.omega_high,
        band_draws=args.band_draws,
        seed=args.seed,
    )
    points = simulate_responsiveness(config)
    rows = [
        [_fmt(p.sweep_value), _fmt(p.g_index), _fmt(p.band_low), _fmt(p.band_high)]
        for p in points
    ]
    _emit(_csv_text(["sweep_value", "g_index", "band_low", "band_high"], rows), args.out)
    if args.out:
        from .plots import save_sweep_figure

        save_sweep_figure(points, args.sweep, str(Path(args.out).with_suffix(".png")))
    return EXIT_OK


def _cmd_flatland_render(args: argparse.Namespace) -> int:
    canvas = fl.render(fl.parse_program(_read_text(args.program)))
    if args.image_format == "rle":
        _emit(canvas.to_rle_text(), args.out)
    else:
        Path(args.out).write_bytes(canvas.to_pbm_bytes())
    return EXIT_OK


def _cmd_flatland_score(args: argparse.Namespace) -> int:
    value = fl.flatland_delta(
        fl.parse_program(_read_text(args.first)), fl.parse_program(_read_text(args.second))
    )
    print(f"delta={_fmt(value)}")
    return EXIT_OK


def _cmd_flatland_augment(args: argparse.Namespace) -> int:
    program = fl.parse_program(_read_text(args.program))
    params = fl.AugmentParams(max_delta=args.max_delta)
    augmented = fl.augment(program, seed=args.seed, params=params)
    _emit(fl.to_flow_document(augmented), args.out)
    print(f"delta={_fmt(fl.flatland_delta(program, augmented))}", file=sys.stderr)
    return EXIT_OK


def _cmd_flatland_gen(args: argparse.Namespace) -> int:
    spec = fl.DatasetSpec(
        kinds=args.shapes,
        count_min=args.min_shapes,
        count_max=args.max_shapes,
        size=args.count,
        seed=args.seed,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    samples = fl.generate_dataset(spec)
    entries = []
    for k, (program, canvas) in enumerate(samples):
        program_name = f"sample-{k:03d}.json"
        image_name = f"sample-{k:03d}.pbm"
        (out_dir / program_name).write_text(fl.to_flow_document(program), encoding="utf-8")
        (out_dir / image_name).write_bytes(canvas.to_pbm_bytes())
        entries.append({"program": program_name, "image": image_name})
    manifest = {
        "spec": {
            "kinds": spec.kinds,
            "count_min": spec.count_min,
            "count_max": spec.count_max,
            "size": spec.size,
            "seed": spec.seed,
        },
        "start_pose": {"x": fl.START_X, "y": fl.START_Y, "heading_degrees": fl.START_HEADING},
        "canvas": {"width": fl.CANVAS_SIZE, "height": fl.CANVAS_SIZE},
        "samples": entries,
    }
    (out_dir / "manifest.json").write_text(_dump_json(manifest), encoding="utf-8")
    print(f"wrote {len(samples)} samples to {out_dir}")
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser, fmt: bool = True) -> None:
    if fmt:
        parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--clique-budget", type=int, default=None,
                        help=f"search-node cap (fallback: ${_BUDGET_ENV})")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gindex", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="divergence report for a generated program")
    p.add_argument("reference")
    p.add_argument("generated")
    _add_common(p)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("omega", help="domain distance of a task per curriculum domain")
    p.add_argument("--task", required=True, help="reference program document")
    p.add_argument("--curriculum", required=True, help="curriculum manifest")
    _add_common(p)
    p.set_defaults(func=_cmd_omega)

    p = sub.add_parser("cluster", help="partition programs into task domains")
    p.add_argument("programs", nargs="+", help="program files or directories")
    p.add_argument("--threshold", type=float, default=0.15)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--plot", default=None, help="heatmap path (default: <out>.png)")
    _add_common(p, fmt=False)
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("gindex", help="score an evaluation manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default="gindex-report", help="report directory")
    p.add_argument("--rho", type=float, default=None, help="override system priors")
    p.add_argument("--clique-budget", type=int, default=None)
    p.set_defaults(func=_cmd_gindex)

    p = sub.add_parser("simulate", help="responsiveness sweep of the benchmark")
    p.add_argument("--sweep", choices=("samples", "compute", "theta"), required=True)
    p.add_argument("--start", type=float, default=None)
    p.add_argument("--stop", type=float, default=None)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--theta", type=float, default=0.7)
    p.add_argument("--samples", type=int, default=2560)
    p.add_argument("--tflops", type=float, default=100.0)
    p.add_argument("--seconds", type=float, default=3600.0)
    p.add_argument("--domains", type=int, default=16)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--omega-low", type=float, default=0.0)
    p.add_argument("--omega-high", type=float, default=0.3)
    p.add_argument("--band-draws", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("flatland", help="toy turtle environment tools")
    fsub = p.add_subparsers(dest="flatland_command", required=True)

    q = fsub.add_parser("render", help="rasterize a program")
    q.add_argument("program")
    q.add_argument("--out", required=True)
    q.add_argument("--image-format", choices=("pbm", "rle"), default="pbm")
    q.set_defaults(func=_cmd_flatland_render)

    q = fsub.add_parser("score", help="list divergence of two programs")
    q.add_argument("first")
    q.add_argument("second")
    q.set_defaults(func=_cmd_flatland_score)

    q = fsub.add_parser("augment", help="seeded variation of a program")
    q.add_argument("program")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--max-delta", type=float, default=0.3)
    q.add_argument("--out", default=None)
    q.set_defaults(func=_cmd_flatland_augment)

    q = fsub.add_parser("gen", help="generate a shapes dataset")
    q.add_argument("--out", required=True)
    q.add_argument("--shapes", choices=("lines", "circles", "mixed"), default="mixed")
    q.add_argument("--min-shapes", type=int, default=1)
    q.add_argument("--max-shapes", type=int, default=5)
    q.add_argument("--count", type=int, default=8)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=_cmd_flatland_gen)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ManifestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except FlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
