"""Circular post-it stream: four paths, queued entry, exact-time expiry.

Paths 0 and 2 share the inner circle and move in the positive angular
direction; paths 1 and 3 share the outer circle and move opposite, so
consecutive collections (which take paths in the fixed cycle 0,1,2,3,...)
always alternate path and direction and the two direction sets never share a
circle. Admissions and expiries are computed as exact integer-millisecond
events independent of tick cadence, which keeps session logs byte-identical
across replays.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field

from .errors import ValidationError
from .extract import Subject

ENTRY_THETA = -math.pi / 2  # top of the display, y-down coordinates
FULL_TURN = 2 * math.pi

ORIENTATIONS = ("top", "right", "bottom", "left")
_NORMALS = ((0.0, -1.0), (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0))


@dataclass(frozen=True)
class DisplayGeometry:
    width_px: int = 1920
    height_px: int = 1080
    inner_radius_frac: float = 0.62
    outer_radius_frac: float = 0.80
    postit_radius_px: float = 48.0

    def __post_init__(self):
        if not (0 < self.inner_radius_frac < self.outer_radius_frac < 1):
            raise ValidationError("radius fractions must satisfy 0 < r0 < r1 < 1")

    @property
    def center(self) -> tuple[float, float]:
        return (self.width_px / 2.0, self.height_px / 2.0)

    def circle_radius_px(self, circle: int) -> float:
        frac = self.inner_radius_frac if circle == 0 else self.outer_radius_frac
        return frac * min(self.width_px, self.height_px) / 2.0


@dataclass(frozen=True)
class StreamConfig:
    traversal_s: float = 60.0
    min_sep_factor: float = 2.2   # entry spacing, in post-it radii
    capture_factor: float = 1.25  # pin capture radius, in post-it radii

    @property
    def traversal_ms(self) -> int:
        return int(round(self.traversal_s * 1000))


def path_circle(path: int) -> int:
    return path % 2


def path_direction(path: int) -> int:
    return 1 if path % 2 == 0 else -1


def orientation_for(theta: float) -> str:
    """Display side whose outward normal is closest to the radial direction."""
    rx, ry = math.cos(theta), math.sin(theta)
    best, best_dot = ORIENTATIONS[0], -2.0
    for name, (nx, ny) in zip(ORIENTATIONS, _NORMALS):
        dot = rx * nx + ry * ny
        if dot > best_dot + 1e-12:
            best, best_dot = name, dot
    return best


@dataclass
class StreamPostIt:
    id: int
    subject: Subject
    utterance_id: int
    path: int
    requested_at: int
    entered_at: int | None = None
    expired_at: int | None = None
    # queued -> flowing -> expired | pinned; pinned -> disbanded once the
    # subject re-enters under a fresh id
    state: str = "queued"


@dataclass(frozen=True)
class PostItView:
    id: int
    subject: Subject
    utterance_id: int
    path: int
    x: float
    y: float
    theta: float
    orientation: str
    entered_at: int


@dataclass(frozen=True)
class LayoutFrame:
    now: int
    postits: tuple[PostItView, ...]
    expired: tuple[int, ...]


@dataclass
class TickReport:
    frame: LayoutFrame
    entered: list[tuple[int, StreamPostIt]] = field(default_factory=list)
    expired: list[tuple[int, int]] = field(default_factory=list)  # (at, postit_id)
    # Chronological merge of entries and expiries, the authoritative log order.
    timeline: list[tuple[int, str, StreamPostIt | int]] = field(default_factory=list)


class Stream:
    def __init__(self, geometry: DisplayGeometry | None = None,
                 config: StreamConfig | None = None):
        self.geometry = geometry or DisplayGeometry()
        self.config = config or StreamConfig()
        self._now = 0
        self._cycle = 0
        self._next_id = 0
        self._counter = 0
        self._flowing: dict[int, StreamPostIt] = {}
        self._all: dict[int, StreamPostIt] = {}
        self._queues: dict[int, deque[StreamPostIt]] = {0: deque(), 1: deque()}
        self._last_entry: dict[int, int | None] = {0: None, 1: None}
        self._admit_pending: dict[int, bool] = {0: False, 1: False}
        self._events: list[tuple[int, int, int, str, int]] = []  # (t, prio, n, kind, ref)

    # -- geometry helpers ---------------------------------------------------

    def omega(self, circle: int) -> float:
        """Signed angular speed in radians per millisecond."""
        direction = 1 if circle == 0 else -1
        return direction * FULL_TURN / self.config.traversal_ms

    def min_arc_sep(self, circle: int) -> float:
        arc_px = self.config.min_sep_factor * self.geometry.postit_radius_px
        return arc_px / self.geometry.circle_radius_px(circle)

    def entry_gap_ms(self, circle: int) -> int:
        return max(1, math.ceil(self.min_arc_sep(circle) / abs(self.omega(circle))))

    @property
    def capture_radius_px(self) -> float:
        return self.config.capture_factor * self.geometry.postit_radius_px

    def theta_at(self, p: StreamPostIt, now: int) -> float:
        return ENTRY_THETA + self.omega(path_circle(p.path)) * (now - p.entered_at)

    def position_at(self, p: StreamPostIt, now: int) -> tuple[float, float]:
        cx, cy = self.geometry.center
        r = self.geometry.circle_radius_px(path_circle(p.path))
        th = self.theta_at(p, now)
        return (cx + r * math.cos(th), cy + r * math.sin(th))

    def queue_depth(self, circle: int) -> int:
        return len(self._queues[circle])

    # -- internal event machinery -------------------------------------------

    def _push(self, t: int, prio: int, kind: str, ref: int) -> None:
        self._counter += 1
        heapq.heappush(self._events, (t, prio, self._counter, kind, ref))

    def _entry_clear_time(self, circle: int, t: int) -> int:
        """Earliest time >= t when the entry arc is clear on this circle.

        Two constraints: spacing behind the previous entrant, and post-its
        finishing their lap back at the top (they block the arc until their
        exact expiry).
        """
        gap = self.entry_gap_ms(circle)
        last = self._last_entry[circle]
        if last is not None:
            t = max(t, last + gap)
        traversal = self.config.traversal_ms
        moved = True
        while moved:
            moved = False
            for p in self._flowing.values():
                if path_circle(p.path) != circle or p.entered_at is None:
                    continue
                expiry = p.entered_at + traversal
                if expiry - gap < t < expiry:
                    t = expiry
                    moved = True
        return t

    def _schedule_admit(self, circle: int, not_before: int) -> None:
        if self._admit_pending[circle] or not self._queues[circle]:
            return
        self._admit_pending[circle] = True
        self._push(self._entry_clear_time(circle, not_before), 1, "admit", circle)

    def _process_until(self, now: int, report: TickReport) -> None:
        while self._events and self._events[0][0] <= now:
            t, _prio, _n, kind, ref = heapq.heappop(self._events)
            if kind == "expire":
                p = self._all.get(ref)
                if p is not None and p.state == "flowing":
                    p.state = "expired"
                    p.expired_at = t
                    del self._flowing[p.id]
                    report.expired.append((t, p.id))
                    report.timeline.append((t, "expired", p.id))
            elif kind == "admit":
                circle = ref
                self._admit_pending[circle] = False
                if not self._queues[circle]:
                    continue
                clear = self._entry_clear_time(circle, t)
                if clear > t:
                    self._schedule_admit(circle, clear)
                    continue
                p = self._queues[circle].popleft()
                p.entered_at = t
                p.state = "flowing"
                self._flowing[p.id] = p
                self._last_entry[circle] = t
                self._push(t + self.config.traversal_ms, 0, "expire", p.id)
                report.entered.append((t, p))
                report.timeline.append((t, "entered", p))
                self._schedule_admit(circle, t)

    # -- public operations ----------------------------------------------------

    def spawn_collection(self, subjects: list[Subject], utterance_id: int,
                         now: int) -> list[int]:
        """Queue one extracted collection onto the next path in the cycle."""
        if now < self._now:
            raise ValidationError(f"time regression: {now} < {self._now}")
        if not subjects:
            return []
        path = self._cycle % 4
        self._cycle += 1
        circle = path_circle(path)
        ids = []
        for s in subjects:
            p = StreamPostIt(id=self._next_id, subject=s, utterance_id=utterance_id,
                             path=path, requested_at=now)
            self._next_id += 1
            self._all[p.id] = p
            self._queues[circle].append(p)
            ids.append(p.id)
        self._schedule_admit(circle, now)
        return ids

    def tick(self, now: int) -> TickReport:
        """Advance to `now`, processing due admissions and expiries in order."""
        if now < self._now:
            raise ValidationError(f"time regression: {now} < {self._now}")
        report = TickReport(frame=LayoutFrame(now, (), ()))
        self._process_until(now, report)
        self._now = now
        views = tuple(self._view(p, now) for p in sorted(self._flowing.values(),
                                                         key=lambda p: p.id))
        report.frame = LayoutFrame(now=now, postits=views,
                                   expired=tuple(pid for _, pid in report.expired))
        return report

    def layout_frame(self, now: int | None = None) -> LayoutFrame:
        """Read-only positions snapshot; does not process pending events."""
        now = self._now if now is None else now
        views = tuple(self._view(p, now) for p in self.flowing())
        return LayoutFrame(now=now, postits=views, expired=())

    def _view(self, p: StreamPostIt, now: int) -> PostItView:
        th = self.theta_at(p, now)
        x, y = self.position_at(p, now)
        return PostItView(id=p.id, subject=p.subject, utterance_id=p.utterance_id,
                          path=p.path, x=x, y=y, theta=th % FULL_TURN,
                          orientation=orientation_for(th), entered_at=p.entered_at)

    def find_at(self, point: tuple[float, float], now: int | None = None) -> int | None:
        """Flowing post-it nearest to `point` within the capture radius."""
        now = self._now if now is None else now
        best_id, best_d = None, self.capture_radius_px
        for p in sorted(self._flowing.values(), key=lambda p: p.id):
            x, y = self.position_at(p, now)
            d = math.hypot(x - point[0], y - point[1])
            if d < best_d or (best_id is None and d == best_d):
                best_id, best_d = p.id, d
        return best_id

    def detach(self, postit_id: int) -> StreamPostIt:
        """Pin: remove a flowing post-it from the layout."""
        p = self._flowing.get(postit_id)
        if p is None:
            raise ValidationError(f"post-it {postit_id} is not flowing")
        p.state = "pinned"
        del self._flowing[postit_id]
        return p

    def consume(self, postit_id: int) -> None:
        """Disband bookkeeping: a pinned post-it hands its subject to a new id."""
        p = self._all.get(postit_id)
        if p is None or p.state != "pinned":
            raise ValidationError(f"post-it {postit_id} is not pinned")
        p.state = "disbanded"

    def reinsert(self, subject: Subject, utterance_id: int, now: int) -> int:
        """Disband re-entry: a fresh post-it with the same subject, new id."""
        return self.spawn_collection([subject], utterance_id, now)[0]

    # -- introspection ---------------------------------------------------------

    @property
    def now(self) -> int:
        return self._now

    def flowing(self) -> list[StreamPostIt]:
        return sorted(self._flowing.values(), key=lambda p: p.id)

    def get(self, postit_id: int) -> StreamPostIt | None:
        return self._all.get(postit_id)

    def snapshot(self, now: int | None = None) -> dict:
        now = self._now if now is None else now
        return {
            "now": now,
            "flowing": [
                {
                    "id": v.id,
                    "subject": v.subject.to_dict(),
                    "utterance_id": v.utterance_id,
                    "path": v.path,
                    "x": round(v.x, 3),
                    "y": round(v.y, 3),
                    "theta": round(v.theta, 3),
                    "orientation": v.orientation,
                }
                for v in (self._view(p, now) for p in self.flowing())
            ],
            "queued": [
                {"id": p.id, "key": p.subject.key, "path": p.path}
                for circle in (0, 1) for p in self._queues[circle]
            ],
        }
