"""Key-subject extraction: the content of the implicit loop's post-its.

Candidates are scored with a degree/frequency scheme over stopword-delimited
phrases; surface patterns add dates, clock times, and capitalized names as
entities. Everything is a pure function of (text, config) so replays and
analytics stay deterministic. Duplicates across utterances are deliberately
not suppressed: the duplicate rate is itself a session metric.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .ingest import Utterance

_WORD_RE = re.compile(r"[^\W_]+(?:['’\-:][^\W_]+)*", re.UNICODE)
_SENT_PUNCT = set(".!?…")
_TRAILING_PUNCT = ".!?,;:…"

_WEEKDAYS = {
    "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday",
    "mon", "tue", "tues", "wed", "thu", "thur", "thurs", "fri", "sat", "sun",
}
_MONTHS = {
    "january", "february", "march", "april", "may", "june", "july", "august",
    "september", "october", "november", "december",
    "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec",
}
_DAYNUM_RE = re.compile(r"(?:[12]\d|3[01]|0?[1-9])(?:st|nd|rd|th)?", re.IGNORECASE)
_ISO_DATE_RE = re.compile(r"\d{4}-\d{2}-\d{2}")
_CLOCK_RE = re.compile(r"(?:[01]?\d|2[0-3]):[0-5]\d(?::[0-5]\d)?(?:am|pm)?", re.IGNORECASE)
_CLOCK_SUFFIX_RE = re.compile(r"(?:[01]?\d|2[0-3])(?:am|pm)", re.IGNORECASE)
_HOUR_RE = re.compile(r"(?:[01]?\d|2[0-3])")
_AMPM = {"am", "pm", "a.m", "p.m"}


def normalize(text: str) -> str:
    """Normalized key: casefolded, single-spaced, trailing sentence punctuation stripped."""
    key = " ".join(text.split()).casefold()
    return key.rstrip(_TRAILING_PUNCT).rstrip()


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Load a stopword set from a one-word-per-line file (bundled default)."""
    if path is None:
        data = resources.files("semcur.data").joinpath("stopwords_en.txt").read_text("utf-8")
    else:
        data = Path(path).read_text("utf-8")
    words = set()
    for line in data.splitlines():
        word = line.strip().casefold().replace("’", "'")
        if word and not word.startswith("#"):
            words.add(word)
    return frozenset(words)


@dataclass(frozen=True)
class Subject:
    """A keyphrase or entity extracted from one utterance."""

    text: str
    key: str
    kind: str  # "keyphrase" | "entity"
    token_count: int

    @classmethod
    def make(cls, text: str, kind: str) -> "Subject":
        clean = " ".join(text.split())
        return cls(text=clean, key=normalize(clean), kind=kind,
                   token_count=len(clean.split()))

    def to_dict(self) -> dict:
        return {"text": self.text, "key": self.key, "kind": self.kind,
                "token_count": self.token_count}

    @classmethod
    def from_dict(cls, d: dict) -> "Subject":
        return cls(text=d["text"], key=d["key"], kind=d["kind"],
                   token_count=d["token_count"])


@dataclass(frozen=True)
class ExtractConfig:
    stopwords: frozenset[str] = field(default_factory=load_stopwords)
    max_subjects_per_utterance: int = 6
    min_score: float = 1.0
    max_phrase_tokens: int = 5

    def __post_init__(self):
        if self.max_subjects_per_utterance < 1:
            raise ValueError("max_subjects_per_utterance must be >= 1")


@dataclass(frozen=True)
class _Token:
    text: str
    index: int          # word position in the utterance
    sent_start: bool    # first word, or preceded by sentence-final punctuation
    gap_punct: bool     # punctuation between this word and the previous one

    @property
    def low(self) -> str:
        return self.text.casefold().replace("’", "'")

    @property
    def numeric(self) -> bool:
        return not any(ch.isalpha() for ch in self.text)


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    prev_end = 0
    for i, m in enumerate(_WORD_RE.finditer(text)):
        gap = text[prev_end:m.start()]
        tokens.append(_Token(
            text=m.group(),
            index=i,
            sent_start=(i == 0 or any(c in _SENT_PUNCT for c in gap)),
            gap_punct=(i > 0 and any(not c.isspace() for c in gap)),
        ))
        prev_end = m.end()
    return tokens


def _candidate_phrases(tokens: list[_Token], cfg: ExtractConfig) -> list[list[_Token]]:
    """Maximal token runs between stopwords, punctuation, and numeral-only tokens."""
    phrases: list[list[_Token]] = []
    run: list[_Token] = []
    for tok in tokens:
        boundary = tok.low in cfg.stopwords or tok.numeric
        if tok.gap_punct and run:
            phrases.append(run)
            run = []
        if boundary:
            if run:
                phrases.append(run)
                run = []
            continue
        run.append(tok)
    if run:
        phrases.append(run)
    return [p[:cfg.max_phrase_tokens] for p in phrases]


def _word_scores(phrases: list[list[_Token]]) -> dict[str, float]:
    degree: dict[str, int] = {}
    freq: dict[str, int] = {}
    for phrase in phrases:
        for tok in phrase:
            degree[tok.low] = degree.get(tok.low, 0) + len(phrase)
            freq[tok.low] = freq.get(tok.low, 0) + 1
    return {w: degree[w] / freq[w] for w in degree}


def _is_capitalized(tok: _Token) -> bool:
    return tok.text[0].isupper() and not tok.numeric


def _entity_spans(tokens: list[_Token], cfg: ExtractConfig) -> list[list[_Token]]:
    """Surface-pattern entities: names, dates, clock times."""
    spans: list[list[_Token]] = []
    n = len(tokens)

    # Runs of capitalized tokens not starting at a sentence start.
    i = 0
    while i < n:
        if _is_capitalized(tokens[i]) and not tokens[i].sent_start:
            run = [tokens[i]]
            j = i + 1
            while j < n and _is_capitalized(tokens[j]) and not tokens[j].gap_punct:
                run.append(tokens[j])
                j += 1
            while run and run[0].low in cfg.stopwords:
                run = run[1:]
            while run and run[-1].low in cfg.stopwords:
                run = run[:-1]
            if run:
                spans.append(run[:cfg.max_phrase_tokens])
            i = j
        else:
            i += 1

    for i, tok in enumerate(tokens):
        low = tok.low
        if low in _WEEKDAYS:
            spans.append([tok])
        if _ISO_DATE_RE.fullmatch(tok.text):
            spans.append([tok])
        if _CLOCK_RE.fullmatch(tok.text) or _CLOCK_SUFFIX_RE.fullmatch(tok.text):
            span = [tok]
            if (i + 1 < n and tokens[i + 1].low.rstrip(".") in _AMPM
                    and not tokens[i + 1].gap_punct):
                span.append(tokens[i + 1])
            spans.append(span)
        elif _HOUR_RE.fullmatch(tok.text) and i + 1 < n \
                and tokens[i + 1].low.rstrip(".") in _AMPM and not tokens[i + 1].gap_punct:
            spans.append([tok, tokens[i + 1]])
        # "3 March" / "March 3" date pairs.
        if i + 1 < n and not tokens[i + 1].gap_punct:
            nxt = tokens[i + 1]
            if _DAYNUM_RE.fullmatch(tok.text) and nxt.low in _MONTHS:
                spans.append([tok, nxt])
            elif low in _MONTHS and _DAYNUM_RE.fullmatch(nxt.text):
                spans.append([tok, nxt])
    return spans


def extract_subjects(u: Utterance, cfg: ExtractConfig | None = None) -> list[Subject]:
    """Extract the ordered, key-deduplicated subject list for one utterance.

    Ordering is by descending score with ties broken by first occurrence;
    entities override same-key keyphrase candidates and survive the score
    floor (a matched pattern is kept regardless of its phrase score).
    """
    cfg = cfg or ExtractConfig()
    tokens = _tokenize(u.text)
    if not tokens:
        return []

    phrases = _candidate_phrases(tokens, cfg)
    scores = _word_scores(phrases)

    # key -> [display, score, first position, kind]
    table: dict[str, list] = {}
    for phrase in phrases:
        display = " ".join(t.text for t in phrase)
        key = normalize(display)
        if not key:
            continue
        score = sum(scores[t.low] for t in phrase)
        if key not in table:
            table[key] = [display, score, phrase[0].index, "keyphrase"]

    for span in _entity_spans(tokens, cfg):
        display = " ".join(t.text for t in span)
        key = normalize(display)
        if not key or key in cfg.stopwords:
            continue
        score = sum(scores.get(t.low, 1.0) for t in span)
        if key in table:
            table[key][3] = "entity"
            table[key][2] = min(table[key][2], span[0].index)
        else:
            table[key] = [display, score, span[0].index, "entity"]

    kept = [(display, score, pos, kind) for display, score, pos, kind in table.values()
            if score >= cfg.min_score or kind == "entity"]
    kept.sort(key=lambda row: (-row[1], row[2]))
    return [Subject.make(display, kind)
            for display, _, _, kind in kept[:cfg.max_subjects_per_utterance]]
