from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from semcur.errors import ValidationError
from semcur.extract import Subject
from semcur.topicgraph import TopicGraph


def subjects(*keys):
    return [Subject.make(k, "keyphrase") for k in keys]


def brute_force(index):
    """Independent recount of nodes/edges from the utterance index."""
    nodes, edges = {}, {}
    for keys in index.values():
        for k in keys:
            nodes[k] = nodes.get(k, 0) + 1
        for a, b in combinations(sorted(keys), 2):
            edges[(a, b)] = edges.get((a, b), 0) + 1
    return nodes, edges


class TestRecord:
    def test_triple_yields_all_pairs(self):
        g = TopicGraph()
        g.record(1, subjects("a", "b", "c"))
        assert g.nodes == {"a": 1, "b": 1, "c": 1}
        assert g.edges == {("a", "b"): 1, ("a", "c"): 1, ("b", "c"): 1}

    def test_empty_set_only_indexes(self):
        g = TopicGraph()
        g.record(2, [])
        assert g.nodes == {} and g.edges == {}
        assert g.utterance_index == {2: frozenset()}

    def test_repeat_pair_accumulates(self):
        g = TopicGraph()
        g.record(1, subjects("a", "b"))
        g.record(2, subjects("a", "b"))
        assert g.cooccurrence("a", "b") == 2
        assert g.nodes == {"a": 2, "b": 2}

    def test_duplicate_utterance_rejected(self):
        g = TopicGraph()
        g.record(1, [])
        with pytest.raises(ValidationError):
            g.record(1, subjects("x"))

    def test_same_key_counted_once_per_utterance(self):
        g = TopicGraph()
        g.record(1, subjects("a", "a", "b"))
        assert g.nodes["a"] == 1
        assert g.cooccurrence("a", "b") == 1


class TestQueries:
    def setup_method(self):
        self.g = TopicGraph()
        self.g.record(1, subjects("a", "b"))
        self.g.record(2, subjects("a", "b"))
        self.g.record(7, subjects("b", "c"))

    def test_cooccurrence_symmetric(self):
        assert self.g.cooccurrence("a", "b") == 2
        assert self.g.cooccurrence("b", "a") == 2

    def test_absent_and_self_pairs_are_zero(self):
        assert self.g.cooccurrence("a", "zzz") == 0
        assert self.g.cooccurrence("a", "a") == 0

    def test_related(self):
        assert self.g.related("b", "c")
        assert not self.g.related("a", "c")

    def test_supporting_utterances(self):
        assert self.g.supporting_utterances("a", "b") == {1, 2}
        assert self.g.supporting_utterances("b", "c") == {7}
        assert self.g.supporting_utterances("a", "c") == set()


class TestComponents:
    def test_triangle_below_threshold(self):
        g = TopicGraph()
        g.record(1, subjects("a", "b", "c"))
        assert g.components(min_size=6) == []

    def test_seven_node_path_kept(self):
        g = TopicGraph()
        keys = [f"k{i}" for i in range(7)]
        for i in range(6):
            g.record(i, subjects(keys[i], keys[i + 1]))
        comps = g.components(min_size=6)
        assert len(comps) == 1
        assert sorted(comps[0]) == sorted(keys)

    def test_empty_graph(self):
        assert TopicGraph().components(min_size=6) == []

    def test_isolated_node_is_own_component(self):
        g = TopicGraph()
        g.record(1, subjects("alone"))
        assert g.components(min_size=0) == [["alone"]]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.sampled_from("abcdefgh"), max_size=6), max_size=30))
def test_brute_force_equivalence(key_sets):
    g = TopicGraph()
    for uid, keys in enumerate(key_sets):
        g.record(uid, subjects(*keys))
    nodes, edges = brute_force(g.utterance_index)
    assert g.nodes == nodes
    assert g.edges == edges
    for a in "abcdefgh":
        for b in "abcdefgh":
            expected = sum(1 for keys in g.utterance_index.values()
                           if a in keys and b in keys and a != b)
            assert g.cooccurrence(a, b) == expected
            assert g.related(a, b) == (expected >= 1)
