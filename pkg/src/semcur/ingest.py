"""Utterance ingestion: timed file replay, direct injection, segmentation.

Sources produce a single ordered stream of Utterances. Timestamps are
session-relative milliseconds so replays are wall-clock independent.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .errors import EmptyTextError, TranscriptParseError, ValidationError

MAX_UTTERANCE_MS = 15_000


@dataclass(frozen=True)
class Utterance:
    """One transcribed speech segment, the unit of conceptual information."""

    id: int
    text: str
    started_at: int
    ended_at: int

    def __post_init__(self):
        if not self.text.strip():
            raise EmptyTextError("utterance text is empty")
        if self.text != self.text.strip():
            object.__setattr__(self, "text", self.text.strip())
        if self.ended_at < self.started_at:
            raise ValidationError(
                f"utterance {self.id}: ended_at {self.ended_at} < started_at {self.started_at}")
        if self.ended_at - self.started_at > MAX_UTTERANCE_MS:
            raise ValidationError(
                f"utterance {self.id}: duration {self.ended_at - self.started_at} ms "
                f"exceeds {MAX_UTTERANCE_MS} ms")

    @property
    def duration_ms(self) -> int:
        return self.ended_at - self.started_at


def segment(raw_text: str, started_at: int, ended_at: int, first_id: int = 0) -> list[Utterance]:
    """Split a raw transcript segment into bound-respecting utterances.

    A span within the 15 s bound yields a single utterance. Longer spans are
    split at token boundaries into ceil(duration/15000) pieces of near-equal
    token count; piece time spans follow cumulative token counts, then get
    clamped so no piece exceeds the bound. Pieces tile the input span exactly
    and their space-joined texts equal the whitespace-normalized input.
    """
    text = " ".join(raw_text.split())
    if not text:
        raise EmptyTextError("cannot segment empty text")
    if ended_at < started_at:
        raise ValidationError(f"ended_at {ended_at} < started_at {started_at}")

    duration = ended_at - started_at
    if duration <= MAX_UTTERANCE_MS:
        return [Utterance(first_id, text, started_at, ended_at)]

    tokens = text.split()
    k = math.ceil(duration / MAX_UTTERANCE_MS)
    if len(tokens) < k:
        raise ValidationError(
            f"cannot split {len(tokens)} token(s) across {k} pieces "
            f"({duration} ms span); not enough token boundaries")

    base, extra = divmod(len(tokens), k)
    counts = [base + 1 if i < extra else base for i in range(k)]

    # Proportional-to-token-count boundaries, clamped to the 15 s bound.
    bounds = [started_at]
    cum = 0
    for c in counts[:-1]:
        cum += c
        bounds.append(started_at + round(duration * cum / len(tokens)))
    bounds.append(ended_at)
    for i in range(k - 1, 0, -1):
        bounds[i] = max(bounds[i], bounds[i + 1] - MAX_UTTERANCE_MS)
    for i in range(1, k):
        bounds[i] = min(bounds[i], bounds[i - 1] + MAX_UTTERANCE_MS)

    pieces = []
    pos = 0
    for i, c in enumerate(counts):
        piece_text = " ".join(tokens[pos:pos + c])
        pieces.append(Utterance(first_id + i, piece_text, bounds[i], bounds[i + 1]))
        pos += c
    return pieces


class ReplayTranscript:
    """TranscriptSource replaying a transcript file.

    The file is parsed and validated eagerly so errors carry line numbers.
    Iteration yields the file's utterances in order with ids 0..n-1 and
    timestamps preserved verbatim. speed > 0 paces emission against the wall
    clock (timestamp deltas divided by speed); speed = 0 emits immediately.
    """

    def __init__(self, path: str | Path, speed: float = 0.0):
        if speed < 0:
            raise ValidationError("speed must be >= 0")
        self.path = Path(path)
        self.speed = speed
        self.utterances = self._parse()

    def _parse(self) -> list[Utterance]:
        out: list[Utterance] = []
        prev_end = None
        with open(self.path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise TranscriptParseError(line_no, f"invalid record: {exc}") from exc
                if not isinstance(rec, dict):
                    raise TranscriptParseError(line_no, "record is not an object")
                try:
                    started = int(rec["started_at_ms"])
                    ended = int(rec["ended_at_ms"])
                    text = str(rec["text"])
                except (KeyError, TypeError, ValueError) as exc:
                    raise TranscriptParseError(
                        line_no, "record needs integer started_at_ms/ended_at_ms and text") from exc
                if prev_end is not None and started < prev_end:
                    raise ValidationError(
                        f"line {line_no}: timestamps regress ({started} < {prev_end})")
                try:
                    out.append(Utterance(len(out), text, started, ended))
                except ValidationError as exc:
                    raise ValidationError(f"line {line_no}: {exc}") from exc
                prev_end = ended
        return out

    def __iter__(self) -> Iterator[Utterance]:
        prev = None
        for u in self.utterances:
            if self.speed > 0 and prev is not None:
                gap_s = (u.ended_at - prev.ended_at) / 1000.0 / self.speed
                if gap_s > 0:
                    time.sleep(gap_s)
            prev = u
            yield u

    def __len__(self) -> int:
        return len(self.utterances)


def open_replay(path: str | Path, speed: float = 0.0) -> ReplayTranscript:
    return ReplayTranscript(path, speed)


class Injector:
    """Direct-injection source for demo mode and tests.

    Injected utterances get started_at = ended_at = now, clamped so the
    stream's timestamps never regress.
    """

    def __init__(self, first_id: int = 0, last_ts: int = 0):
        self._next_id = first_id
        self._last_ts = last_ts

    def inject(self, text: str, now: int) -> Utterance:
        cleaned = " ".join(text.split())
        if not cleaned:
            raise EmptyTextError("cannot inject empty text")
        ts = max(now, self._last_ts)
        u = Utterance(self._next_id, cleaned, ts, ts)
        self._next_id += 1
        self._last_ts = ts
        return u

    def observe(self, u: Utterance) -> None:
        """Track an utterance emitted by another source sharing the stream."""
        self._next_id = max(self._next_id, u.id + 1)
        self._last_ts = max(self._last_ts, u.ended_at)
