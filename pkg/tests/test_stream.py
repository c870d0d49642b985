import math
import random

import pytest

from semcur.errors import ValidationError
from semcur.extract import Subject
from semcur.stream import (DisplayGeometry, Stream, StreamConfig, orientation_for,
                           path_circle, path_direction)


def subj(key):
    return Subject.make(key, "keyphrase")


def make_stream(**kwargs):
    return Stream(DisplayGeometry(), StreamConfig(**kwargs))


def arc_separations(stream, frame):
    """Pairwise angular separations per path at one frame."""
    by_path = {}
    for v in frame.postits:
        by_path.setdefault(v.path, []).append(v.theta)
    out = []
    for path, thetas in by_path.items():
        for i, a in enumerate(thetas):
            for b in thetas[i + 1:]:
                d = abs(a - b) % (2 * math.pi)
                out.append((path, min(d, 2 * math.pi - d)))
    return out


class TestPaths:
    def test_cycle_assignment(self):
        s = make_stream()
        paths = []
        for i in range(5):
            ids = s.spawn_collection([subj(f"k{i}")], i, now=i * 10)
            paths.append(s.get(ids[0]).path)
        assert paths == [0, 1, 2, 3, 0]

    def test_consecutive_collections_alternate_direction(self):
        for a, b in [(0, 1), (1, 2), (2, 3), (3, 0)]:
            assert path_direction(a) == -path_direction(b)
            assert path_circle(a) != path_circle(b)

    def test_empty_spawn_is_noop(self):
        s = make_stream()
        assert s.spawn_collection([], 0, 0) == []
        ids = s.spawn_collection([subj("x")], 1, 0)
        assert s.get(ids[0]).path == 0  # cycle not advanced by the no-op


class TestGeometry:
    def test_collection_on_inner_radius_with_separation(self):
        s = make_stream()
        s.spawn_collection([subj("a"), subj("b"), subj("c")], 0, now=0)
        # entry gap on the inner circle
        gap = s.entry_gap_ms(0)
        frame = s.tick(2 * gap).frame
        assert len(frame.postits) == 3
        geom = s.geometry
        r0 = geom.circle_radius_px(0)
        cx, cy = geom.center
        for v in frame.postits:
            assert v.path == 0
            assert math.hypot(v.x - cx, v.y - cy) == pytest.approx(r0, abs=1e-6)
        for _, sep in arc_separations(s, frame):
            assert sep >= s.min_arc_sep(0) - 1e-9

    def test_zero_dt_tick_is_identity(self):
        s = make_stream()
        s.spawn_collection([subj("a")], 0, now=0)
        f1 = s.tick(1000).frame
        f2 = s.tick(1000).frame
        assert f1.postits == f2.postits

    def test_time_regression_rejected(self):
        s = make_stream()
        s.tick(100)
        with pytest.raises(ValidationError):
            s.tick(99)

    def test_expiry_after_full_traversal(self):
        s = make_stream(traversal_s=2.0)
        s.spawn_collection([subj("a")], 0, now=0)
        report = s.tick(1999)
        assert len(report.frame.postits) == 1
        report = s.tick(2000)
        assert report.frame.postits == ()
        assert report.expired == [(2000, 0)]
        assert s.get(0).state == "expired"


class TestOrientation:
    @pytest.mark.parametrize("theta,side", [
        (0.0, "right"),
        (math.pi / 2, "bottom"),   # y grows downward
        (math.pi, "left"),
        (-math.pi / 2, "top"),
    ])
    def test_cardinal_angles(self, theta, side):
        assert orientation_for(theta) == side

    def test_every_flowing_postit_reports_valid_side(self):
        s = make_stream()
        s.spawn_collection([subj("a"), subj("b")], 0, now=0)
        for t in range(0, 60_000, 3000):
            frame = s.tick(t).frame
            for v in frame.postits:
                assert v.orientation in ("top", "right", "bottom", "left")


class TestCapture:
    def test_find_at_within_capture_radius(self):
        s = make_stream()
        ids = s.spawn_collection([subj("a")], 0, now=0)
        s.tick(500)
        p = s.get(ids[0])
        x, y = s.position_at(p, 500)
        assert s.find_at((x + 10, y - 10), 500) == ids[0]
        assert s.find_at((x + 500, y), 500) is None

    def test_find_at_tie_breaks_lowest_id(self):
        s = make_stream()
        a = s.spawn_collection([subj("a")], 0, now=0)[0]
        s.tick(10_000)
        b = s.reinsert(subj("b"), 1, 10_000)
        s.tick(10_000)
        pa = s.get(a)
        pb = s.get(b)
        xa, ya = s.position_at(pa, 10_000)
        xb, yb = s.position_at(pb, 10_000)
        mid = ((xa + xb) / 2, (ya + yb) / 2)
        if math.hypot(xa - mid[0], ya - mid[1]) <= s.capture_radius_px:
            assert s.find_at(mid, 10_000) == min(a, b)

    def test_detach_removes_from_layout(self):
        s = make_stream()
        ids = s.spawn_collection([subj("a")], 0, now=0)
        s.tick(100)
        p = s.detach(ids[0])
        assert p.state == "pinned"
        assert s.tick(200).frame.postits == ()
        with pytest.raises(ValidationError):
            s.detach(ids[0])

    def test_reinsert_issues_new_id_on_next_path(self):
        s = make_stream()
        a = s.spawn_collection([subj("a")], 0, now=0)[0]
        s.tick(100)
        s.detach(a)
        b = s.reinsert(s.get(a).subject, 0, 100)
        assert b != a
        assert s.get(b).path == 1


class TestFuzz:
    def test_invariants_over_random_run(self):
        rng = random.Random(1234)
        s = make_stream(traversal_s=6.0)
        requested = {}
        depth_at_request = {}
        last_path = None
        now = 0
        for tick_i in range(2000):
            now += rng.randint(10, 120)
            if rng.random() < 0.25:
                n = rng.randint(1, 4)
                subs = [subj(f"s{tick_i}_{j}") for j in range(n)]
                before_depth = {c: s.queue_depth(c) for c in (0, 1)}
                ids = s.spawn_collection(subs, tick_i, now)
                path = s.get(ids[0]).path
                if last_path is not None:
                    assert path != last_path
                    assert path_direction(path) == -path_direction(last_path)
                last_path = path
                for pid in ids:
                    requested[pid] = now
                    depth_at_request[pid] = before_depth[path_circle(path)]
            report = s.tick(now)
            for path, sep in arc_separations(s, report.frame):
                assert sep >= s.min_arc_sep(path_circle(path)) - 1e-9

        # Every post-it eventually enters, flows for exactly one traversal,
        # and the queue delay is bounded by the queue ahead of it (each
        # predecessor costs at most one entry gap plus one blocked lap).
        t_ms = s.config.traversal_ms
        max_gap = max(s.entry_gap_ms(0), s.entry_gap_ms(1))
        horizon = now + (len(requested) + 2) * (max_gap + t_ms)
        s.tick(horizon)
        for pid, req_at in requested.items():
            p = s.get(pid)
            assert p.state == "expired"
            assert p.expired_at - p.entered_at == t_ms
            delay = p.entered_at - req_at
            assert delay <= (depth_at_request[pid] + 1) * (max_gap + t_ms)
