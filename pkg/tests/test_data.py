import datetime as dt
import io
import math
from dataclasses import replace

import numpy as np
import pytest

from freethrow import data
from freethrow.data import (
    BUILTIN_ARCHETYPES,
    SHOT_HEADER,
    EmptySpan,
    InvalidArchetype,
    PlayerArchetype,
    RowError,
    SchemaError,
    ShotRecord,
    eligible_players,
    filter_outliers,
    parse_shots,
    shots_to_csv,
    synthesize_shots,
)
from freethrow.metrics import EmptyInput, LandingPoint, accuracy_stats, command
from freethrow.physics import LaunchConditions, Outcome, classify_outcome

HEADER = ",".join(SHOT_HEADER) + "\n"


def make_record(player="p", v=14.4, th=46.0, depth=0.0, lat=0.0, day=1):
    return ShotRecord(
        player,
        dt.date(2025, 1, day),
        LaunchConditions.from_mph_deg(18.4, 9.6, v, th),
        LandingPoint(depth, lat),
        True,
        Outcome.SWISH,
    )


def records_equal(a, b):
    assert (a.player, a.date, a.made, a.outcome) == (b.player, b.date, b.made, b.outcome)
    for x, y in [
        (a.launch.x0, b.launch.x0),
        (a.launch.z0, b.launch.z0),
        (a.launch.v0, b.launch.v0),
        (a.launch.theta0, b.launch.theta0),
        (a.landing.depth_dev, b.landing.depth_dev),
        (a.landing.lateral_dev, b.landing.lateral_dev),
    ]:
        assert math.isclose(x, y, rel_tol=1e-12, abs_tol=1e-12)


class TestParse:
    def test_header_only(self):
        assert parse_shots(io.StringIO(HEADER)) == []

    def test_bad_header(self):
        with pytest.raises(SchemaError):
            parse_shots(io.StringIO("player,date\n"))

    def test_bad_number_reports_line(self):
        row = "p,2025-01-01,18.4,9.6,abc,46,0,0,1,SWISH\n"
        with pytest.raises(RowError) as exc:
            parse_shots(io.StringIO(HEADER + row))
        assert exc.value.line == 2

    def test_lenient_skips_bad_rows(self):
        good = "p,2025-01-01,18.4,9.6,14.4,46,0,0,1,SWISH\n"
        bad = "p,2025-01-01,18.4,9.6,abc,46,0,0,1,SWISH\n"
        seen = []
        out = parse_shots(io.StringIO(HEADER + good + bad + good), strict=False, on_error=seen.append)
        assert len(out) == 2 and [e.line for e in seen] == [3]

    @pytest.mark.parametrize(
        "row",
        [
            "p,2025-13-01,18.4,9.6,14.4,46,0,0,1,SWISH",
            "p,2025-01-01,18.4,9.6,14.4,46,0,0,2,SWISH",
            "p,2025-01-01,18.4,9.6,14.4,46,0,0,1,BANK",
            "p,2025-01-01,18.4,9.6,14.4,46,0,0,0,SWISH",
            "p,2025-01-01,18.4,9.6,-3,46,0,0,1,SWISH",
            "p,2025-01-01,18.4,9.6,14.4,46,0,1,SWISH",
        ],
    )
    def test_invalid_rows(self, row):
        with pytest.raises(RowError):
            parse_shots(io.StringIO(HEADER + row + "\n"))

    def test_round_trip(self):
        recs = synthesize_shots(BUILTIN_ARCHETYPES[:4], 25, seed=9)
        text = shots_to_csv(recs)
        back = parse_shots(io.StringIO(text))
        assert len(back) == 100
        for a, b in zip(recs, back):
            records_equal(a, b)
        assert shots_to_csv(back) == text


class TestFilter:
    def test_identical_records_kept(self):
        recs = [make_record()] * 50
        kept, rep = filter_outliers(recs)
        assert len(kept) == 50 and rep.removed == 0

    def test_false_reading_removed(self):
        rng = np.random.default_rng(1)
        recs = [
            make_record(v=float(v), th=float(t), depth=float(d))
            for v, t, d in zip(rng.normal(14.5, 0.2, 1000), rng.normal(47, 1.5, 1000), rng.normal(0, 4, 1000))
        ]
        spike = make_record(v=200.0)
        kept, rep = filter_outliers(recs + [spike])
        assert rep.removed == 1 and spike not in kept
        assert rep.by_field["v0"] == 1

    def test_clean_gaussian_removal_fraction(self):
        recs = synthesize_shots(BUILTIN_ARCHETYPES[9:10], 20000, seed=4)
        _, rep = filter_outliers(recs)
        assert rep.removed / rep.total < 0.001

    def test_idempotent_on_synthetic(self):
        recs = synthesize_shots(BUILTIN_ARCHETYPES, 300, seed=42)
        kept, _ = filter_outliers(recs)
        again, rep = filter_outliers(kept)
        assert rep.removed == 0 and again == kept

    def test_empty(self):
        with pytest.raises(EmptyInput):
            filter_outliers([])


class TestEligibility:
    def test_empty(self):
        assert eligible_players([]) == set()

    def test_boundary_inclusive(self):
        recs = [make_record("a")] * 200 + [make_record("b")] * 199
        assert eligible_players(recs, 200) == {"a"}

    def test_synthetic_league(self):
        archs = [replace(BUILTIN_ARCHETYPES[0], name=f"P{i}") for i in range(72)]
        recs = synthesize_shots(archs, 300, seed=1)
        assert len(eligible_players(recs)) == 72


class TestSynth:
    def test_zero_sd_swish(self):
        arch = PlayerArchetype("fixed", 14.4, 0, 46, 0, 9.6, 0, x0=18.4, lateral_sd=0)
        recs = synthesize_shots([arch], 20, seed=0)
        assert all(r.made and r.outcome is Outcome.SWISH for r in recs)
        assert len({(r.launch, r.landing) for r in recs}) == 1
        assert classify_outcome(recs[0].launch) is Outcome.SWISH

    def test_deterministic(self):
        a = synthesize_shots(BUILTIN_ARCHETYPES, 50, seed=7)
        b = synthesize_shots(BUILTIN_ARCHETYPES, 50, seed=7)
        assert a == b
        assert a != synthesize_shots(BUILTIN_ARCHETYPES, 50, seed=8)

    def test_player_stream_independent_of_others(self):
        a = synthesize_shots(BUILTIN_ARCHETYPES[:3], 30, seed=7)
        b = synthesize_shots(BUILTIN_ARCHETYPES[:2], 30, seed=7)
        assert a[:60] == b

    def test_outcome_invariants(self):
        for r in synthesize_shots(BUILTIN_ARCHETYPES, 200, seed=2):
            if r.outcome is Outcome.SWISH:
                assert r.made
            if r.outcome is Outcome.MISS:
                assert not r.made

    def test_curry_makes_more_than_giannis(self):
        archs = [data.builtin_archetype("Stephen Curry"), data.builtin_archetype("Giannis Antetokounmpo")]
        recs = synthesize_shots(archs, 1000, seed=42)
        rate = {a.name: np.mean([r.made for r in recs if r.player == a.name]) for a in archs}
        assert rate["Stephen Curry"] > rate["Giannis Antetokounmpo"]

    def test_empirical_sds_converge(self):
        arch = data.builtin_archetype("Stephen Curry")
        recs = synthesize_shots([arch], 2000, seed=13)
        v = np.std([r.launch.v_mph for r in recs])
        th = np.std([r.launch.theta_deg for r in recs])
        z = np.std([r.launch.z0 for r in recs])
        assert v == pytest.approx(arch.v_sd, rel=0.1)
        assert th == pytest.approx(arch.theta_sd, rel=0.1)
        assert z == pytest.approx(arch.z0_sd, rel=0.1)

    def test_dates_span_range(self):
        recs = synthesize_shots(BUILTIN_ARCHETYPES[:1], 100, seed=1, start=dt.date(2024, 11, 1), end=dt.date(2024, 11, 10))
        dates = [r.date for r in recs]
        assert min(dates) == dt.date(2024, 11, 1) and max(dates) == dt.date(2024, 11, 10)
        assert dates == sorted(dates)

    def test_doubling_sd_hurts(self):
        arch = data.builtin_archetype("Stephen Curry")
        wide = arch.scaled(2.0)
        tight_recs = synthesize_shots([arch], 2000, seed=21)
        wide_recs = synthesize_shots([wide], 2000, seed=21)
        assert np.mean([r.made for r in wide_recs]) < np.mean([r.made for r in tight_recs])
        assert command(accuracy_stats([r.landing for r in wide_recs])) < command(
            accuracy_stats([r.landing for r in tight_recs])
        )

    def test_invalid_archetype(self):
        with pytest.raises(InvalidArchetype):
            PlayerArchetype("bad", 14, -0.1, 45, 1, 9, 0.1)
        with pytest.raises(InvalidArchetype):
            PlayerArchetype.from_dict({"name": "x", "nope": 1})

    def test_empty_span(self):
        with pytest.raises(EmptySpan):
            synthesize_shots(BUILTIN_ARCHETYPES, 5, 1, start=dt.date(2025, 1, 2), end=dt.date(2025, 1, 1))

    def test_shots_per_player_positive(self):
        with pytest.raises(ValueError):
            synthesize_shots(BUILTIN_ARCHETYPES, 0, 1)

    def test_depth_sign_positive_when_short(self):
        arch = PlayerArchetype("short", 13.5, 0, 46, 0, 9.6, 0, x0=18.4, lateral_sd=0)
        (r,) = synthesize_shots([arch], 1, seed=0)
        assert r.landing.depth_dev > 0
