"""Per-player shot-quality statistics and league normalisation.

All standard deviations are population SDs (ddof=0). Landing deviations
are in inches.
"""

from __future__ import annotations

import datetime as dt
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np


class EmptyInput(ValueError):
    pass


class MismatchedPlayers(ValueError):
    pass


class ZeroVariance(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


class InsufficientPlayers(ValueError):
    pass


@dataclass(frozen=True)
class LandingPoint:
    """In-rim deviation from the bullseye, inches.

    ``depth_dev`` is positive when the ball lands short (toward the shooter).
    """

    depth_dev: float
    lateral_dev: float


@dataclass(frozen=True)
class PlayerAccuracy:
    mu: float
    sigma: float
    n: int


@dataclass
class PlayerMetrics:
    player: str
    accuracy: PlayerAccuracy
    command: float
    z_velocity: float
    z_angle: float
    z_position: float
    r_velocity: float
    r_angle: float
    r_position: float
    touch: float
    ft_pct: float
    percentiles: dict[str, int]


def landing_deviation(p: LandingPoint) -> float:
    return math.hypot(p.depth_dev, p.lateral_dev)


def accuracy_stats(shots: Sequence[LandingPoint]) -> PlayerAccuracy:
    if len(shots) == 0:
        raise EmptyInput("no shots")
    d = np.array([landing_deviation(p) for p in shots])
    return PlayerAccuracy(float(d.mean()), float(d.std()), len(d))


def command(acc: PlayerAccuracy) -> float:
    """1 / (1 + sqrt(mu^2 + sigma^2)) with mu, sigma in inches."""
    return 1.0 / (1.0 + math.hypot(acc.mu, acc.sigma))


def inconsistency_zscores(per_player_sd: Mapping[str, float]) -> dict[str, float]:
    """Standardise each player's launch SD against the league.

    A league with no spread (including a one-player league) gets z = 0
    everywhere.
    """
    if not per_player_sd:
        raise EmptyInput("no players")
    names = list(per_player_sd)
    vals = np.array([per_player_sd[k] for k in names], dtype=float)
    sd = vals.std()
    if sd == 0 or not np.isfinite(sd):
        return {k: 0.0 for k in names}
    z = (vals - vals.mean()) / sd
    return dict(zip(names, map(float, z)))


def _reverse_minmax(values: Mapping[str, float]) -> dict[str, float]:
    names = list(values)
    arr = np.array([values[k] for k in names], dtype=float)
    lo, hi = arr.min(), arr.max()
    if hi == lo:
        return {k: 100.0 for k in names}
    # divide before scaling so the extremes map to exactly 100 and 0
    frac = (arr - lo) / (hi - lo)
    return dict(zip(names, map(float, 100.0 * (1.0 - frac))))


def consistency(z: Mapping[str, float]) -> dict[str, float]:
    """100 for the league's least inconsistent player, 0 for the most."""
    if not z:
        raise EmptyInput("no players")
    return _reverse_minmax(z)


def touch(z_theta: Mapping[str, float], z_v: Mapping[str, float]) -> dict[str, float]:
    if set(z_theta) != set(z_v):
        raise MismatchedPlayers("angle and velocity z-scores cover different players")
    if not z_theta:
        raise EmptyInput("no players")
    return _reverse_minmax({k: z_theta[k] + z_v[k] for k in z_theta})


def percentile_rank(values: Mapping[str, float]) -> dict[str, int]:
    """Ascending average-rank percentile, round half up, clamped to [1, 100]."""
    if not values:
        return {}
    names = list(values)
    arr = np.array([values[k] for k in names], dtype=float)
    n = len(arr)
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(n)
    sorted_vals = arr[order]
    i = 0
    while i < n:
        j = i
        while j + 1 < n and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    out = {}
    for k, r in zip(names, ranks):
        # the 1e-9 guards round-half-up against 100*r/n landing a hair under .5
        pct = math.floor(100.0 * r / n + 0.5 + 1e-9)
        out[k] = int(min(100, max(1, pct)))
    return out


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float:
    if len(x) != len(y):
        raise LengthMismatch(f"lengths differ: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise LengthMismatch("need at least two points")
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0 or syy == 0:
        raise ZeroVariance("one input is constant")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def _group(shots) -> dict[str, list]:
    by_player = defaultdict(list)
    for s in shots:
        by_player[s.player].append(s)
    return dict(by_player)


def _launch_sds(records) -> tuple[float, float, float]:
    v = np.array([r.launch.v_mph for r in records])
    th = np.array([r.launch.theta_deg for r in records])
    x0 = np.array([r.launch.x0 for r in records])
    z0 = np.array([r.launch.z0 for r in records])
    # release point spread: RMS distance from the player's mean release point
    pos = math.sqrt(x0.var() + z0.var())
    return float(v.std()), float(th.std()), pos


def player_metrics(records) -> list[PlayerMetrics]:
    """League table for the given (already filtered, eligible) shot records."""
    groups = _group(records)
    if not groups:
        return []
    names = sorted(groups)
    acc = {p: accuracy_stats([r.landing for r in groups[p]]) for p in names}
    cmd = {p: command(acc[p]) for p in names}
    ft = {p: sum(r.made for r in groups[p]) / len(groups[p]) for p in names}
    sds = {p: _launch_sds(groups[p]) for p in names}
    z_v = inconsistency_zscores({p: sds[p][0] for p in names})
    z_th = inconsistency_zscores({p: sds[p][1] for p in names})
    z_pos = inconsistency_zscores({p: sds[p][2] for p in names})
    r_v, r_th, r_pos = consistency(z_v), consistency(z_th), consistency(z_pos)
    tch = touch(z_th, z_v)
    pct = {
        "r_v": percentile_rank(r_v),
        "r_theta": percentile_rank(r_th),
        "r_pos": percentile_rank(r_pos),
        "touch": percentile_rank(tch),
        "command": percentile_rank(cmd),
        "ft_pct": percentile_rank(ft),
    }
    return [
        PlayerMetrics(
            player=p,
            accuracy=acc[p],
            command=cmd[p],
            z_velocity=z_v[p],
            z_angle=z_th[p],
            z_position=z_pos[p],
            r_velocity=r_v[p],
            r_angle=r_th[p],
            r_position=r_pos[p],
            touch=tch[p],
            ft_pct=ft[p],
            percentiles={k: v[p] for k, v in pct.items()},
        )
        for p in names
    ]


@dataclass(frozen=True)
class ValidityReport:
    r_ftpct: float
    r_command: float
    n_players: int


def split_half_validity(
    shots: Iterable,
    split_date: dt.date = dt.date(2024, 11, 15),
    min_attempts: int = 50,
) -> ValidityReport:
    """Correlate early-season FT% and command with their late-season values.

    Shots dated before ``split_date`` are early; the split date itself
    counts as late.
    """
    early, late = defaultdict(list), defaultdict(list)
    for s in shots:
        (early if s.date < split_date else late)[s.player].append(s)
    qualified = sorted(
        p for p in early if len(early[p]) >= min_attempts and len(late.get(p, ())) >= min_attempts
    )
    if len(qualified) < 2:
        raise InsufficientPlayers(
            f"{len(qualified)} player(s) with >= {min_attempts} attempts on both sides of {split_date}"
        )

    def ftpct(rs):
        return sum(r.made for r in rs) / len(rs)

    def cmd(rs):
        return command(accuracy_stats([r.landing for r in rs]))

    r_ft = pearson_r([ftpct(early[p]) for p in qualified], [ftpct(late[p]) for p in qualified])
    r_cmd = pearson_r([cmd(early[p]) for p in qualified], [cmd(late[p]) for p in qualified])
    return ValidityReport(r_ft, r_cmd, len(qualified))
