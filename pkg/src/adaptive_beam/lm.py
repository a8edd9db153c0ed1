"""Maximum-likelihood bigram models over a shared vocabulary.

Two are used while decoding: one trained on a category corpus and one built
from the source document being summarized. Neither is smoothed; an unseen
pair has probability exactly 0 and the rescoring step guards the division.
"""

from __future__ import annotations

import json
from collections import Counter
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import START_ID, TokenSeq, Vocabulary


class BigramModel:
    """Conditional next-token probabilities ``P(next | prev) = c(prev, next) / c(prev)``."""

    def __init__(self, counts: Mapping[int, Mapping[int, int]], vocab: Vocabulary, name: str = ""):
        n = len(vocab)
        table: dict[int, dict[int, int]] = {}
        for prev, row in counts.items():
            clean = {int(j): int(c) for j, c in row.items() if c > 0}
            if not clean:
                continue
            if not 0 <= prev < n or any(not 0 <= j < n for j in clean):
                raise ValueError("token id outside vocabulary")
            table[int(prev)] = clean
        self._counts = table
        self._totals = {prev: sum(row.values()) for prev, row in table.items()}
        self._rows: dict[int, np.ndarray] = {}
        self._zeros = np.zeros(n)
        self._zeros.setflags(write=False)
        self.vocab = vocab
        self.name = name

    @property
    def counts(self) -> dict[int, dict[int, int]]:
        return {prev: dict(row) for prev, row in self._counts.items()}

    @property
    def row_totals(self) -> dict[int, int]:
        return dict(self._totals)

    def prob(self, prev: int, nxt: int) -> float:
        total = self._totals.get(prev)
        if not total:
            return 0.0
        return self._counts[prev].get(nxt, 0) / total

    def row(self, prev: int) -> np.ndarray:
        """Dense read-only vector of ``P(. | prev)``."""
        cached = self._rows.get(prev)
        if cached is not None:
            return cached
        row = self._counts.get(prev)
        if row is None:
            return self._zeros
        dense = np.zeros(len(self.vocab))
        total = self._totals[prev]
        for j, c in row.items():
            dense[j] = c / total
        dense.setflags(write=False)
        # Races only ever store equal arrays.
        self._rows[prev] = dense
        return dense

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BigramModel):
            return NotImplemented
        return self._counts == other._counts and self.vocab == other.vocab and self.name == other.name

    def to_json(self) -> dict:
        tok = self.vocab.token
        counts: dict[str, dict[str, int]] = {}
        for prev, row in self._counts.items():
            counts[tok(prev)] = {tok(j): c for j, c in row.items()}
        return {"meta": {"vocab_hash": self.vocab.digest, "corpus": self.name}, "counts": counts}

    @classmethod
    def from_json(cls, data: dict, vocab: Vocabulary) -> "BigramModel":
        meta = data.get("meta", {})
        expected = meta.get("vocab_hash")
        if expected is not None and expected != vocab.digest:
            raise ValueError(f"model was trained with vocabulary {expected}, got {vocab.digest}")
        counts: dict[int, dict[int, int]] = {}
        for prev, row in data["counts"].items():
            if prev not in vocab:
                raise ValueError(f"token {prev!r} not in vocabulary")
            counts[vocab.lookup(prev)] = {vocab.lookup(t): int(c) for t, c in row.items()}
        return cls(counts, vocab, name=meta.get("corpus", ""))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1, ensure_ascii=False) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path, vocab: Vocabulary) -> "BigramModel":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")), vocab)


def _count_pairs(docs: Iterable[Sequence[int]]) -> dict[int, Counter[int]]:
    counts: dict[int, Counter[int]] = {}
    for ids in docs:
        prev = START_ID
        for nxt in ids:
            counts.setdefault(prev, Counter())[nxt] += 1
            prev = nxt
    return counts


def train_bigram(corpus: Iterable[Sequence[str]], vocab: Vocabulary, name: str = "") -> BigramModel:
    """Train on tokenized documents. Each document starts from START and no
    pair crosses a document boundary; out-of-vocabulary tokens count as UNK."""
    docs = [vocab.encode(doc) for doc in corpus]
    if not any(docs):
        raise ValueError("empty corpus")
    return BigramModel(_count_pairs(docs), vocab, name=name)


def source_bigrams(source: TokenSeq, vocab: Vocabulary) -> BigramModel:
    """The same estimate restricted to a single source document."""
    if len(source) == 0:
        raise ValueError("empty source")
    return BigramModel(_count_pairs([source.ids]), vocab, name="source")


def bigram_prob(model: BigramModel, prev: int, nxt: int) -> float:
    return model.prob(prev, nxt)


def empty_bigram(vocab: Vocabulary, name: str = "") -> BigramModel:
    """A model that assigns 0 to every pair."""
    return BigramModel({}, vocab, name=name)
