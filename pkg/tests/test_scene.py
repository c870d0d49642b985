import random

from semcur.extract import Subject
from semcur.scene import Scene
from semcur.sense.types import InteractionEvent
from semcur.stream import DisplayGeometry, Stream, StreamConfig
from semcur.topicgraph import TopicGraph
from semcur.ingest import Utterance


def subj(key):
    return Subject.make(key, "keyphrase")


def ev(kind, x, y, w=60.0, h=60.0, height=40.0, from_pos=None, concurrent=False):
    return InteractionEvent.make(kind, (x, y), (w, h), height, commit_id=0,
                                 concurrent_flag=concurrent, from_pos=from_pos)


class Fixture:
    """Stream + graph + scene wired like the engine does it."""

    def __init__(self):
        self.stream = Stream(DisplayGeometry(), StreamConfig())
        self.graph = TopicGraph()
        self.scene = Scene()
        self.now = 0
        self._uid = 0

    def speak(self, *keys):
        subjects = [subj(k) for k in keys]
        self.graph.record(self._uid, subjects)
        self.scene.on_graph_update(self.graph)
        self.stream.spawn_collection(subjects, self._uid, self.now)
        self._uid += 1
        self.tick(self.now)
        return self._uid - 1

    def tick(self, now):
        self.now = max(self.now, now)
        return self.stream.tick(self.now)

    def flowing_pos(self, key):
        for p in self.stream.flowing():
            if p.subject.key == key:
                return self.stream.position_at(p, self.now), p
        raise AssertionError(f"no flowing post-it with key {key}")

    def pin(self, key, w=60.0, h=60.0, height=40.0):
        (x, y), p = self.flowing_pos(key)
        deltas = self.scene.apply(ev("placed", x, y, w, h, height),
                                  self.stream, self.graph, self.now)
        assert deltas[0].kind == "pinned", deltas
        return deltas[0].artifact_id, deltas


class TestPinning:
    def test_pin_couples_artifact_and_postit(self):
        f = Fixture()
        f.speak("solar power", "wind")
        f.tick(5000)
        aid, deltas = f.pin("solar power")
        ann = f.scene.annotations[aid]
        assert ann.primary.key == "solar power"
        assert f.stream.get(ann.primary_postit).state == "pinned"
        # ring encircles the artifact footprint
        assert ann.ring_radius_px >= (60 ** 2 / 2) ** 0.5

    def test_placement_on_empty_space_is_inert(self):
        f = Fixture()
        deltas = f.scene.apply(ev("placed", 100, 100), f.stream, f.graph, 0)
        assert [d.kind for d in deltas] == ["inert_placed"]
        assert len(f.scene.inert) == 1

    def test_unmatched_removal_rejected(self):
        f = Fixture()
        deltas = f.scene.apply(ev("removed", 5, 5), f.stream, f.graph, 0)
        assert deltas[0].kind == "rejected"
        assert deltas[0].reason == "unmatched_event"


class TestLinks:
    def test_cooccurring_pins_draw_link(self):
        f = Fixture()
        utt = f.speak("tax carbon", "public transport")
        f.tick(4000)
        a, _ = f.pin("tax carbon")
        f.tick(4500)
        b, deltas = f.pin("public transport")
        pair = (min(a, b), max(a, b))
        assert pair in f.scene.links
        assert utt in f.scene.links[pair]
        changed = [d for d in deltas if d.kind == "links_changed"]
        assert changed and pair in changed[0].links_added

    def test_unrelated_pins_draw_no_link(self):
        f = Fixture()
        f.speak("alpha")
        f.tick(4000)
        f.pin("alpha")
        f.speak("beta")
        f.tick(8000)
        f.pin("beta")
        assert f.scene.links == {}

    def test_live_links_equal_refresh(self):
        f = Fixture()
        f.speak("a", "b", "c")
        f.tick(5000)
        f.pin("a")
        f.tick(6000)
        f.pin("b")
        f.tick(7000)
        f.pin("c")
        assert f.scene.links == f.scene.refresh_links(f.graph)


class TestIsolation:
    def build_linked_pair(self):
        f = Fixture()
        f.speak("left", "right")
        f.tick(5000)
        a, _ = f.pin("left")
        f.tick(5500)
        b, _ = f.pin("right")
        assert f.scene.links
        return f, a, b

    def test_stack_isolates_and_unstack_restores(self):
        f, a, b = self.build_linked_pair()
        before = dict(f.scene.links)
        ann = f.scene.annotations[a]
        deltas = f.scene.apply(ev("placed", *ann.position, w=50, h=50, height=38),
                               f.stream, f.graph, f.now)
        assert deltas[0].kind == "isolated"
        assert ann.isolated
        assert f.scene.links == {}

        deltas = f.scene.apply(ev("removed", *ann.position, w=50, h=50, height=38),
                               f.stream, f.graph, f.now)
        assert deltas[0].kind == "unisolated"
        assert not ann.isolated
        assert f.scene.links == before

    def test_low_overlap_is_not_a_stack(self):
        f, a, b = self.build_linked_pair()
        ann = f.scene.annotations[a]
        x = ann.position[0] + ann.footprint_px[0] * 0.45
        deltas = f.scene.apply(ev("placed", x, ann.position[1], w=60, h=60),
                               f.stream, f.graph, f.now)
        assert deltas[0].kind != "isolated"

    def test_wrong_height_removal_does_not_unstack(self):
        f, a, b = self.build_linked_pair()
        ann = f.scene.annotations[a]
        f.scene.apply(ev("placed", *ann.position, w=50, h=50, height=38),
                      f.stream, f.graph, f.now)
        deltas = f.scene.apply(ev("removed", *ann.position, w=50, h=50, height=80),
                               f.stream, f.graph, f.now)
        assert ann.isolated  # 80mm does not match the 38mm stack top
        assert deltas[0].kind == "disbanded"  # it matched the annotation instead


class TestMoving:
    def test_move_repositions_annotation(self):
        f = Fixture()
        f.speak("movable")
        f.tick(4000)
        a, _ = f.pin("movable")
        old = f.scene.annotations[a].position
        deltas = f.scene.apply(ev("moved", 400, 400, from_pos=old),
                               f.stream, f.graph, f.now)
        assert deltas[0].kind == "annotation_moved"
        assert f.scene.annotations[a].position == (400.0, 400.0)

    def test_move_onto_postit_contextualises(self):
        f = Fixture()
        f.speak("anchor", "drifting idea")
        f.tick(5000)
        a, _ = f.pin("anchor")
        old = f.scene.annotations[a].position
        (tx, ty), target = f.flowing_pos("drifting idea")
        deltas = f.scene.apply(ev("moved", tx, ty, from_pos=old),
                               f.stream, f.graph, f.now)
        kinds = [d.kind for d in deltas]
        assert "annotation_moved" in kinds and "contextualised" in kinds
        ann = f.scene.annotations[a]
        assert [s.key for s, _, _ in ann.context] == ["drifting idea"]
        assert f.stream.get(target.id).state == "pinned"

    def test_context_keys_stay_distinct(self):
        f = Fixture()
        f.speak("anchor", "dup")
        f.tick(5000)
        a, _ = f.pin("anchor")
        f.speak("dup")  # second flowing post-it with the same key
        f.tick(6000)
        ann = f.scene.annotations[a]
        (tx, ty), first = f.flowing_pos("dup")
        f.scene.apply(ev("moved", tx, ty, from_pos=ann.position),
                      f.stream, f.graph, f.now)
        assert [s.key for s, _, _ in ann.context] == ["dup"]
        (tx2, ty2), second = f.flowing_pos("dup")
        f.scene.apply(ev("moved", tx2, ty2, from_pos=ann.position),
                      f.stream, f.graph, f.now)
        assert len(ann.context) == 1  # duplicate key not captured twice

    def test_moved_inert_can_pin(self):
        f = Fixture()
        f.scene.apply(ev("placed", 100, 100), f.stream, f.graph, 0)
        art_id = next(iter(f.scene.inert))
        f.speak("fresh content")
        f.tick(5000)
        (tx, ty), p = f.flowing_pos("fresh content")
        deltas = f.scene.apply(ev("moved", tx, ty, from_pos=(100, 100)),
                               f.stream, f.graph, f.now)
        assert deltas[0].kind == "pinned"
        assert deltas[0].artifact_id == art_id
        assert not f.scene.inert


class TestDisband:
    def test_disband_returns_all_subjects_in_pin_order(self):
        f = Fixture()
        f.speak("primary topic", "context one", "context two")
        f.tick(12_000)
        a, _ = f.pin("primary topic")
        ann = f.scene.annotations[a]
        for key in ("context one", "context two"):
            (tx, ty), _ = f.flowing_pos(key)
            f.scene.apply(ev("moved", tx, ty, from_pos=ann.position),
                          f.stream, f.graph, f.now)
        assert len(ann.context) == 2
        deltas = f.scene.apply(ev("removed", *ann.position),
                               f.stream, f.graph, f.now)
        assert deltas[0].kind == "disbanded"
        assert len(deltas[0].reinserted) == 3
        f.tick(f.now + 60_000)
        keys = [f.stream.get(pid).subject.key for pid in deltas[0].reinserted]
        assert keys == ["primary topic", "context one", "context two"]
        assert a not in f.scene.annotations

    def test_remove_inert(self):
        f = Fixture()
        f.scene.apply(ev("placed", 200, 200), f.stream, f.graph, 0)
        deltas = f.scene.apply(ev("removed", 200, 200), f.stream, f.graph, 0)
        assert deltas[0].kind == "inert_removed"
        assert not f.scene.inert


class TestRecentUtterances:
    def test_ring_buffer_keeps_last_three(self):
        scene = Scene()
        for i in range(5):
            scene.note_utterance(Utterance(i, f"utterance {i}", i * 100, i * 100))
        assert [u.id for u in scene.recent_utterances] == [2, 3, 4]


class TestConcurrent:
    def test_flag_propagates_to_deltas(self):
        f = Fixture()
        f.speak("flagged")
        f.tick(4000)
        (x, y), _ = f.flowing_pos("flagged")
        deltas = f.scene.apply(ev("placed", x, y, concurrent=True),
                               f.stream, f.graph, f.now)
        assert all(d.concurrent for d in deltas)


class TestClosureFuzz:
    def test_links_always_equal_refresh(self):
        rng = random.Random(7)
        f = Fixture()
        keys = [f"topic {i}" for i in range(12)]
        for step in range(120):
            f.tick(f.now + rng.randint(50, 800))
            roll = rng.random()
            if roll < 0.35:
                group = rng.sample(keys, rng.randint(1, 3))
                f.speak(*group)
            elif roll < 0.6 and f.stream.flowing():
                p = rng.choice(f.stream.flowing())
                x, y = f.stream.position_at(p, f.now)
                f.scene.apply(ev("placed", x, y), f.stream, f.graph, f.now)
            elif roll < 0.75 and f.scene.annotations:
                ann = rng.choice(list(f.scene.annotations.values()))
                dest = (rng.uniform(0, 1920), rng.uniform(0, 1080))
                f.scene.apply(ev("moved", *dest, from_pos=ann.position),
                              f.stream, f.graph, f.now)
            elif roll < 0.9 and f.scene.annotations:
                ann = rng.choice(list(f.scene.annotations.values()))
                if rng.random() < 0.5:
                    f.scene.apply(ev("placed", *ann.position, w=50, h=50, height=38),
                                  f.stream, f.graph, f.now)
                else:
                    f.scene.apply(ev("removed", *ann.position,
                                     w=ann.footprint_px[0], h=ann.footprint_px[1],
                                     height=ann.height_mm),
                                  f.stream, f.graph, f.now)
            elif f.scene.annotations:
                ann = rng.choice(list(f.scene.annotations.values()))
                f.scene.apply(ev("removed", *ann.position), f.stream, f.graph, f.now)

            assert f.scene.links == f.scene.refresh_links(f.graph)
            for ann in f.scene.annotations.values():
                if ann.isolated:
                    for pair in f.scene.links:
                        assert ann.artifact_id not in pair


class TestTurnBasedAccounting:
    def test_nonflagged_deltas_come_from_single_event_commits(self):
        """Sensed multi-artifact commits are applied but flagged throughout."""
        import numpy as np
        from semcur.sense.calibrate import calibrate
        from semcur.sense.detect import TangibleSensor
        from semcur.sense.synth import SynthConfig, SyntheticScene

        cfg = SynthConfig()
        synth = SyntheticScene(cfg, np.random.default_rng(31))
        baseline = synth.render(noise=False)
        cal = calibrate(baseline, cfg.corners_uv, cfg.display_size,
                        nadir_uv=cfg.nadir_uv)
        sensor = TangibleSensor(cal, baseline)
        f = Fixture()

        single_commits = 0
        unflagged_events = 0
        multi_seen = False
        rng = np.random.default_rng(32)
        for step in range(40):
            f.speak(f"surface idea {step}")
            f.tick(f.now + 2000)
            if rng.uniform() < 0.6 or not synth.blocks:
                block = synth._sample_block()
                if block is None:
                    continue
                synth.place(block)
            else:
                # a second change in the same commit makes it concurrent
                block = synth._sample_block()
                victim = sorted(synth.blocks)[0]
                synth.remove(victim)
                if block is not None:
                    synth.place(block)
            events = sensor.commit(synth.render(noise=False))
            if len(events) == 1:
                single_commits += 1
            else:
                multi_seen = True
            for ev_ in events:
                unflagged_events += not ev_.concurrent_flag
                deltas = f.scene.apply(ev_, f.stream, f.graph, f.now)
                # every resulting delta inherits the event's flag
                assert all(d.concurrent == ev_.concurrent_flag for d in deltas)

        # the analytics' unit of accounting: non-flagged interactions are
        # exactly the single-event commits
        assert multi_seen and single_commits > 0
        assert unflagged_events == single_commits


class TestNoOrphans:
    def test_every_pinned_postit_referenced_exactly_once(self):
        import random as _random
        rng = _random.Random(99)
        f = Fixture()
        for step in range(150):
            f.tick(f.now + rng.randint(100, 900))
            roll = rng.random()
            if roll < 0.4:
                f.speak(f"topic {step}", f"extra {step % 5}")
            elif roll < 0.7 and f.stream.flowing():
                p = rng.choice(f.stream.flowing())
                x, y = f.stream.position_at(p, f.now)
                f.scene.apply(ev("placed", x, y), f.stream, f.graph, f.now)
            elif roll < 0.85 and f.scene.annotations:
                ann = rng.choice(list(f.scene.annotations.values()))
                f.scene.apply(ev("moved", rng.uniform(0, 1920),
                                 rng.uniform(0, 1080), from_pos=ann.position),
                              f.stream, f.graph, f.now)
            elif f.scene.annotations:
                ann = rng.choice(list(f.scene.annotations.values()))
                f.scene.apply(ev("removed", *ann.position,
                                 w=ann.footprint_px[0], h=ann.footprint_px[1],
                                 height=ann.height_mm),
                              f.stream, f.graph, f.now)

            pinned_refs = []
            for ann in f.scene.annotations.values():
                pinned_refs.append(ann.primary_postit)
                pinned_refs.extend(pid for _, _, pid in ann.context)
            # unique reference per pinned post-it
            assert len(pinned_refs) == len(set(pinned_refs))
            for pid in pinned_refs:
                assert f.stream.get(pid).state == "pinned"
            # conversely, every pinned post-it is referenced
            all_pinned = {p.id for p in f.stream._all.values()
                          if p.state == "pinned"}
            assert all_pinned == set(pinned_refs)
