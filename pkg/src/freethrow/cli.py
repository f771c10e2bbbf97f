"""Command-line front end: synth, metrics, grid, optimize, validate.

Every failure prints a single ``error: ...`` line to stderr and exits non-zero.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import data, metrics, optimizer, physics
from .physics import AxisSpec, CourtGeometry, LaunchConditions

EXIT_ERROR = 1
EXIT_USAGE = 2


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        sys.stderr.write(f"error: {message}\n")
        sys.exit(EXIT_USAGE)


def _f6(x: float) -> str:
    return f"{x:.6f}"


def load_geometry(path: str | None) -> CourtGeometry:
    if not path:
        return physics.DEFAULT_GEOMETRY
    try:
        overrides = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read geometry file {path}: {exc}") from None
    if not isinstance(overrides, dict):
        raise CliError("geometry file must hold a JSON object")
    try:
        return CourtGeometry(**overrides)
    except TypeError as exc:
        raise CliError(f"unknown geometry field: {exc}") from None


def _date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an ISO date: {text!r}") from None


def _axis(text: str) -> AxisSpec:
    try:
        return AxisSpec.parse(text)
    except physics.InvalidAxisSpec as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def _load_archetypes(spec: str) -> list[data.PlayerArchetype]:
    if spec == "builtin":
        return list(data.BUILTIN_ARCHETYPES)
    try:
        raw = json.loads(Path(spec).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read archetype file {spec}: {exc}") from None
    if not isinstance(raw, list) or not raw:
        raise CliError("archetype file must hold a non-empty JSON list")
    return [data.PlayerArchetype.from_dict(d) for d in raw]


def cmd_synth(args) -> int:
    if args.shots < 1:
        raise CliError(f"--shots must be >= 1, got {args.shots}")
    geom = load_geometry(args.geom)
    archetypes = _load_archetypes(args.players)
    if args.end < args.start:
        raise data.EmptySpan(f"--end {args.end} before --start {args.start}")

    def one(item):
        idx, arch = item
        rng = data.player_rng(args.seed, idx)
        return data.synthesize_player(arch, args.shots, rng, geom, args.start, args.end)

    items = list(enumerate(archetypes))
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            chunks = list(pool.map(one, items))
    else:
        chunks = [one(it) for it in items]
    records = [r for chunk in chunks for r in chunk]
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        data.write_shots(records, fh)
    made = sum(r.made for r in records)
    print(f"players={len(archetypes)} shots={len(records)} make_rate={made / len(records):.4f}")
    return 0


METRIC_COLUMNS = [
    "player", "n", "mu_in", "sigma_in", "command", "z_v", "z_theta", "z_pos",
    "r_v", "r_theta", "r_pos", "touch", "ft_pct",
    "r_v_pct", "r_theta_pct", "r_pos_pct", "touch_pct", "command_pct", "ft_pct_pct",
]  # fmt: skip


def metric_rows(table: list[metrics.PlayerMetrics]):
    for m in sorted(table, key=lambda m: (m.command, m.player)):
        p = m.percentiles
        yield [
            m.player,
            str(m.accuracy.n),
            _f6(m.accuracy.mu),
            _f6(m.accuracy.sigma),
            _f6(m.command),
            _f6(m.z_velocity),
            _f6(m.z_angle),
            _f6(m.z_position),
            _f6(m.r_velocity),
            _f6(m.r_angle),
            _f6(m.r_position),
            _f6(m.touch),
            _f6(m.ft_pct),
            *(str(p[k]) for k in ("r_v", "r_theta", "r_pos", "touch", "command", "ft_pct")),
        ]


def cmd_metrics(args) -> int:
    records = data.read_shots(args.input)
    if len(records) == 0:
        kept, report = [], None
    else:
        kept, report = data.filter_outliers(records)
    eligible = data.eligible_players(kept, args.min_attempts)
    table = metrics.player_metrics([r for r in kept if r.player in eligible])
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRIC_COLUMNS)
        w.writerows(metric_rows(table))
    if report is not None:
        print(f"filtered {report.removed} of {report.total} shots ({report.by_field})")
    if not table:
        sys.stderr.write(f"warning: no player has >= {args.min_attempts} attempts; report is empty\n")
    else:
        print(f"players={len(table)} written to {args.out}")
    return 0


def _sidecar_path(out: str) -> Path:
    p = Path(out)
    side = p.with_suffix(".json")
    return side if side != p else p.with_name(p.name + ".meta.json")


def _axis_meta(spec: AxisSpec) -> dict:
    return {"min": spec.min, "max": spec.max, "step": spec.step, "count": len(spec.values())}


def cmd_grid(args) -> int:
    geom = load_geometry(args.geom)
    meta = {
        "kind": args.kind,
        "v_axis_mph": _axis_meta(args.v_range),
        "theta_axis_deg": _axis_meta(args.theta_range),
        "release": {"x0_ft": args.x0, "z0_ft": args.z0},
        "order": "row-major, theta outer, v inner",
        "geometry": {
            "rim_height": geom.rim_height,
            "rim_center_x": geom.rim_center_x,
            "rim_radius": geom.rim_radius,
            "ball_radius": geom.ball_radius,
            "bullseye_x": geom.bullseye_x,
            "g": geom.g,
        },
    }
    if args.kind == "outcome":
        grid = physics.outcome_grid(
            args.v_range, args.theta_range, args.x0, args.z0, geom, threads=args.threads
        )
        rows = ([_f6(v), _f6(t), str(int(c))] for v, t, c in grid.row_major())
        meta["codes"] = {o.name: int(o) for o in physics.Outcome}
    else:
        if args.dv < 0 or args.dtheta < 0:
            raise CliError("--dv and --dtheta must be non-negative")
        grid = physics.error_grid(
            args.v_range, args.theta_range, args.x0, args.z0, args.dv, args.dtheta, geom,
            threads=args.threads,
        )
        rows = ([_f6(v), _f6(t), _f6(c)] for v, t, c in grid.row_major())
        meta["dv_mph"] = args.dv
        meta["dtheta_deg"] = args.dtheta
        meta["max_ft"] = float(grid.cells.max())
        meta["min_ft"] = float(grid.cells.min())
        meta["amplifying_cells"] = [
            [float(grid.v_mph[j]), float(grid.theta_deg[i])]
            for i, j in zip(*grid.amplifying.nonzero())
        ]
        meta["contours"] = {k: [list(c) for c in v] for k, v in grid.contours.items()}
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["v_mph", "theta_deg", "value"])
        w.writerows(rows)
    _sidecar_path(args.out).write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    print(f"{args.kind} grid {len(grid.theta_deg)}x{len(grid.v_mph)} written to {args.out}")
    return 0


def write_trajectory(samples, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t_s", "x_ft", "z_ft"])
        for t, x, z in samples:
            w.writerow([_f6(t), _f6(x), _f6(z)])


def cmd_optimize(args) -> int:
    geom = load_geometry(args.geom)
    initial = LaunchConditions.from_mph_deg(args.x0, args.z0, args.v, args.theta)
    settings = optimizer.DescentSettings(
        learning_rate_v=args.lr_v,
        learning_rate_theta=args.lr_theta,
        max_iters=args.max_iters,
        tolerance=args.tolerance,
    )
    target = geom.bullseye_x if args.target is None else args.target
    trace = optimizer.optimize_launch(initial, target, geom, settings)
    out = Path(args.out)
    with open(out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iter", "v_mph", "theta_deg", "xf_ft", "loss"])
        for it, v, th, xf, loss in optimizer.trace_rows(trace):
            w.writerow([it, _f6(v), _f6(th), _f6(xf), f"{loss:.6e}"])
    stem = out.with_suffix("")
    write_trajectory(
        physics.simulate_trajectory(initial, geom, args.traj_dt), Path(f"{stem}_initial_traj.csv")
    )
    write_trajectory(
        physics.simulate_trajectory(trace.final, geom, args.traj_dt), Path(f"{stem}_final_traj.csv")
    )
    final = trace.steps[-1]
    outcome = physics.classify_outcome(trace.final, geom)
    print(
        f"converged={str(trace.converged).lower()} iterations={final.iteration} "
        f"v_mph={trace.final.v_mph:.4f} theta_deg={trace.final.theta_deg:.4f} "
        f"xf_ft={final.x_f:.4f} outcome={outcome.name}"
    )
    return 0


def cmd_validate(args) -> int:
    records = data.read_shots(args.input)
    report = metrics.split_half_validity(records, args.split_date, args.min_attempts)
    payload = {
        "r_ftpct": report.r_ftpct,
        "r_command": report.r_command,
        "n_players": report.n_players,
        "split_date": args.split_date.isoformat(),
        "min_attempts": args.min_attempts,
    }
    text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _shared(p: argparse.ArgumentParser, need_in=False, need_out=True):
    if need_in:
        p.add_argument("--in", dest="input", required=True, help="input shot CSV")
    p.add_argument("--out", required=need_out, help="output path")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default: 0)")
    p.add_argument("--geom", help="JSON file of CourtGeometry overrides (default: regulation values)")
    p.add_argument(
        "--threads", type=_positive_int, default=1,
        help="worker threads; output is identical for any value (default: 1)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="freethrow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("synth", help="generate a synthetic shot CSV", formatter_class=fmt)
    _shared(p)
    p.add_argument("--players", default="builtin", help="'builtin' or a JSON archetype list")
    p.add_argument("--shots", type=int, default=300, help="shots per player")
    p.add_argument("--start", type=_date, default=data.SEASON_START, help="first shot date")
    p.add_argument("--end", type=_date, default=data.SEASON_END, help="last shot date")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("metrics", help="per-player command/consistency/touch report", formatter_class=fmt)
    _shared(p, need_in=True)
    p.add_argument("--min-attempts", type=int, default=200, help="eligibility threshold")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("grid", help="outcome or error-propagation raster", formatter_class=fmt)
    p.add_argument("kind", choices=["outcome", "error"])
    _shared(p)
    p.add_argument("--x0", type=float, default=18.5, help="release distance from baseline, ft")
    p.add_argument("--z0", type=float, default=8.4, help="release height, ft")
    p.add_argument("--v-range", type=_axis, default=AxisSpec(13.0, 16.0, 0.05),
                   help="launch speed axis MIN:MAX:STEP in MPH (default: 13:16:0.05)")
    p.add_argument("--theta-range", type=_axis, default=AxisSpec(35.0, 60.0, 0.5),
                   help="launch angle axis MIN:MAX:STEP in degrees (default: 35:60:0.5)")
    p.add_argument("--dv", type=float, default=0.24, help="speed perturbation, MPH")
    p.add_argument("--dtheta", type=float, default=1.11, help="angle perturbation, degrees")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("optimize", help="gradient descent onto the bullseye", formatter_class=fmt)
    _shared(p)
    p.add_argument("--x0", type=float, default=18.4, help="release distance from baseline, ft")
    p.add_argument("--z0", type=float, default=9.6, help="release height, ft")
    p.add_argument("--v", type=float, default=14.0, help="initial launch speed, MPH")
    p.add_argument("--theta", type=float, default=42.0, help="initial launch angle, degrees")
    p.add_argument("--target", type=float, default=None, help="target x, ft (default: bullseye)")
    p.add_argument("--lr-v", type=float, default=1e-2, help="step scale on dL/dv0 (ft/s units)")
    p.add_argument("--lr-theta", type=float, default=1e-3, help="step scale on dL/dtheta0 (rad units)")
    p.add_argument("--max-iters", type=int, default=10_000, help="iteration cap")
    p.add_argument("--tolerance", type=float, default=0.01, help="stop when |x_f - target| < this, ft")
    p.add_argument("--traj-dt", type=float, default=0.01, help="trajectory export step, s")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("validate", help="split-half predictive validity", formatter_class=fmt)
    _shared(p, need_in=True, need_out=False)
    p.add_argument("--split-date", type=_date, default=dt.date(2024, 11, 15), help="first late-season date")
    p.add_argument("--min-attempts", type=int, default=50, help="attempts required on each side")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError, OSError) as exc:
        msg = " ".join(str(exc).split())
        sys.stderr.write(f"error: {msg}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
