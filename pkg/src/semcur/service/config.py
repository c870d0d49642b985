"""Engine configuration: one flat document covering every module's knobs."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path

from ..errors import ValidationError
from ..extract import ExtractConfig, load_stopwords
from ..sense.types import SenseConfig
from ..stream import DisplayGeometry, StreamConfig

ENV_CONFIG = "SEMCUR_CONFIG"


@dataclass(frozen=True)
class EngineConfig:
    display_width: int = 1920
    display_height: int = 1080
    postit_radius_px: float = 48.0
    inner_radius_frac: float = 0.62
    outer_radius_frac: float = 0.80
    traversal_s: float = 60.0
    min_sep_factor: float = 2.2
    capture_factor: float = 1.25
    max_subjects_per_utterance: int = 6
    min_score: float = 1.0
    max_phrase_tokens: int = 5
    stopwords_path: str | None = None
    h_min_mm: float = 12.0
    a_min_px: int = 100
    default_footprint_px: float = 60.0
    default_height_mm: float = 40.0
    rounds: str = "3x480"
    port: int = 8765
    frame_hz: float = 15.0
    session_out: str | None = None

    def geometry(self) -> DisplayGeometry:
        return DisplayGeometry(
            width_px=self.display_width, height_px=self.display_height,
            inner_radius_frac=self.inner_radius_frac,
            outer_radius_frac=self.outer_radius_frac,
            postit_radius_px=self.postit_radius_px)

    def stream_config(self) -> StreamConfig:
        return StreamConfig(traversal_s=self.traversal_s,
                            min_sep_factor=self.min_sep_factor,
                            capture_factor=self.capture_factor)

    def extract_config(self) -> ExtractConfig:
        return ExtractConfig(
            stopwords=load_stopwords(self.stopwords_path),
            max_subjects_per_utterance=self.max_subjects_per_utterance,
            min_score=self.min_score, max_phrase_tokens=self.max_phrase_tokens)

    def sense_config(self) -> SenseConfig:
        return SenseConfig(h_min_mm=self.h_min_mm, a_min_px=self.a_min_px)

    def round_boundaries(self) -> list[int]:
        return parse_rounds(self.rounds)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "EngineConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


def parse_rounds(spec: str) -> list[int]:
    """'3x480' -> [0, 480000, 960000, 1440000]."""
    try:
        count_s, secs_s = spec.lower().split("x")
        count, secs = int(count_s), float(secs_s)
    except ValueError as exc:
        raise ValidationError(f"bad rounds spec {spec!r}; expected NxSECONDS") from exc
    if count < 1 or secs <= 0:
        raise ValidationError(f"bad rounds spec {spec!r}")
    return [int(round(i * secs * 1000)) for i in range(count + 1)]


def load_config(path: str | Path | None = None) -> EngineConfig:
    """Load config from a JSON file, the SEMCUR_CONFIG env var, or defaults."""
    if path is None:
        path = os.environ.get(ENV_CONFIG)
    if path is None:
        return EngineConfig()
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return EngineConfig.from_dict(data)
