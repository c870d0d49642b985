"""Bag-of-words co-occurrence model over utterances and their subjects.

Counts how often each subject key was identified and how often pairs of keys
were extracted from the same utterance; backs the auto-drawn links between
annotations and the session network export.
"""

from __future__ import annotations

from collections import deque
from itertools import combinations
from typing import Iterable

from .errors import ValidationError
from .extract import Subject


def pair_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


class TopicGraph:
    def __init__(self):
        self.nodes: dict[str, int] = {}
        self.edges: dict[tuple[str, str], int] = {}
        self.utterance_index: dict[int, frozenset[str]] = {}
        self.display_text: dict[str, str] = {}
        self._key_to_utts: dict[str, set[int]] = {}

    def record(self, utterance_id: int, subjects: Iterable[Subject]) -> None:
        """Count each distinct key once and every unordered key pair once."""
        if utterance_id in self.utterance_index:
            raise ValidationError(f"utterance {utterance_id} already recorded")
        keys = []
        seen = set()
        for s in subjects:
            if s.key not in seen:
                seen.add(s.key)
                keys.append(s.key)
                self.display_text.setdefault(s.key, s.text)
        self.utterance_index[utterance_id] = frozenset(keys)
        for k in keys:
            self.nodes[k] = self.nodes.get(k, 0) + 1
            self._key_to_utts.setdefault(k, set()).add(utterance_id)
        for a, b in combinations(sorted(keys), 2):
            pk = pair_key(a, b)
            self.edges[pk] = self.edges.get(pk, 0) + 1

    def cooccurrence(self, a: str, b: str) -> int:
        if a == b:
            return 0
        return self.edges.get(pair_key(a, b), 0)

    def related(self, a: str, b: str) -> bool:
        return self.cooccurrence(a, b) >= 1

    def supporting_utterances(self, a: str, b: str) -> set[int]:
        if a == b:
            return set()
        return self._key_to_utts.get(a, set()) & self._key_to_utts.get(b, set())

    def components(self, min_size: int) -> list[list[str]]:
        """Connected components with strictly more than min_size nodes.

        min_size = 6 reproduces the analysis filter that drops components of
        six or fewer subjects.
        """
        adjacency: dict[str, set[str]] = {k: set() for k in self.nodes}
        for a, b in self.edges:
            adjacency[a].add(b)
            adjacency[b].add(a)
        seen: set[str] = set()
        out: list[list[str]] = []
        for start in sorted(self.nodes):
            if start in seen:
                continue
            comp = []
            queue = deque([start])
            seen.add(start)
            while queue:
                k = queue.popleft()
                comp.append(k)
                for nb in sorted(adjacency[k]):
                    if nb not in seen:
                        seen.add(nb)
                        queue.append(nb)
            if len(comp) > min_size:
                out.append(sorted(comp))
        return out

    def snapshot(self) -> dict:
        """Immutable copy for readers outside the engine loop."""
        return {
            "nodes": dict(self.nodes),
            "edges": {f"{a}|{b}": c for (a, b), c in sorted(self.edges.items())},
            "utterances": {str(uid): sorted(keys)
                           for uid, keys in sorted(self.utterance_index.items())},
        }
