"""Keyword mining, per-category keyword profiles and category detection."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

MISCELLANEOUS = "miscellaneous"
DEFAULT_K = 30


@dataclass(frozen=True)
class Category:
    keywords: frozenset[str]
    triggers: frozenset[str]


@dataclass(frozen=True)
class KeywordProfile:
    """Keywords shared by every category plus per-category keyword and
    trigger sets. Triggers decide the category; keywords are what decoding
    and selection reward once it is decided."""

    common: frozenset[str] = frozenset()
    categories: Mapping[str, Category] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "common", frozenset(w.lower() for w in self.common))
        cats = {}
        for name, cat in sorted(self.categories.items()):
            keywords = frozenset(w.lower() for w in cat.keywords)
            triggers = frozenset(w.lower() for w in cat.triggers) or keywords
            if not triggers:
                raise ValueError(f"category {name!r} has no triggers")
            cats[name.lower()] = Category(keywords, triggers)
        object.__setattr__(self, "categories", cats)

    @classmethod
    def from_json(cls, data: dict) -> "KeywordProfile":
        cats = {
            name: Category(frozenset(c.get("keywords", [])), frozenset(c.get("triggers", [])))
            for name, c in data.get("categories", {}).items()
        }
        return cls(frozenset(data.get("common", [])), cats)

    def to_json(self) -> dict:
        return {
            "common": sorted(self.common),
            "categories": {
                name: {"keywords": sorted(c.keywords), "triggers": sorted(c.triggers)}
                for name, c in self.categories.items()
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "KeywordProfile":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class CategoryLabel:
    name: str
    confidence: int


def read_word_list(path: str | Path) -> frozenset[str]:
    """One token per line; blank lines and ``#`` comments are skipped."""
    return _parse_words(Path(path).read_text(encoding="utf-8"))


def _parse_words(text: str) -> frozenset[str]:
    words = (line.strip().lower() for line in text.splitlines())
    return frozenset(w for w in words if w and not w.startswith("#"))


def default_stopwords() -> frozenset[str]:
    return _parse_words(resources.files(__package__).joinpath("data/stopwords.txt").read_text("utf-8"))


def default_common_words() -> frozenset[str]:
    return _parse_words(resources.files(__package__).joinpath("data/common_words.txt").read_text("utf-8"))


def _eligible(token: str, excluded: frozenset[str] | set[str]) -> bool:
    # A keyword needs at least one letter: drops punctuation and numbers.
    return token not in excluded and any(ch.isalpha() for ch in token)


def mine_keywords(
    corpus: Iterable[Sequence[str]],
    stopwords: Iterable[str] = (),
    common_words: Iterable[str] = (),
    k: int = DEFAULT_K,
) -> list[str]:
    """Top-``k`` most frequent eligible tokens of a tokenized corpus, most
    frequent first, ties by first occurrence."""
    if k < 1:
        raise ValueError("k must be >= 1")
    excluded = frozenset(stopwords) | frozenset(common_words)
    counts: Counter[str] = Counter()
    for doc in corpus:
        counts.update(t for t in doc if _eligible(t, excluded))
    return sorted(counts, key=lambda t: -counts[t])[:k]


def detect_category(source: Iterable[str], profile: KeywordProfile) -> CategoryLabel:
    """Pick the category with the most distinct trigger words in ``source``.

    No hits, or a tie for the top, yields ``miscellaneous``.
    """
    present = set(getattr(source, "tokens", source))
    hits = {name: len(cat.triggers & present) for name, cat in profile.categories.items()}
    best = max(hits.values(), default=0)
    winners = [name for name, h in hits.items() if h == best]
    if best == 0 or len(winners) > 1:
        return CategoryLabel(MISCELLANEOUS, best)
    return CategoryLabel(winners[0], best)


def active_keywords(profile: KeywordProfile, label: CategoryLabel) -> frozenset[str]:
    cat = profile.categories.get(label.name)
    if cat is None:
        return profile.common
    return profile.common | cat.keywords
