import numpy as np
import pytest

from semcur.extract import Subject
from semcur.ingest import Utterance
from semcur.sense.calibrate import calibrate
from semcur.sense.synth import SynthConfig, SyntheticScene


def utt(uid: int, text: str, start: int, end: int) -> Utterance:
    return Utterance(uid, text, start, end)


def subj(text: str, kind: str = "keyphrase") -> Subject:
    return Subject.make(text, kind)


@pytest.fixture
def synth_setup():
    """Flat synthetic table with its calibration, shared across sense tests."""
    cfg = SynthConfig()
    scene = SyntheticScene(cfg, np.random.default_rng(99))
    baseline = scene.render(noise=False)
    cal = calibrate(baseline, cfg.corners_uv, cfg.display_size,
                    nadir_uv=cfg.nadir_uv)
    return cfg, scene, baseline, cal
