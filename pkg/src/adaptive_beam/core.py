"""Shared domain types: tokenization, vocabulary, token sequences, hypotheses
and the step-scorer abstraction that stands in for a neural decoder.

A step scorer maps ``(source, prefix)`` to one row of log-probabilities over
the vocabulary. Everything downstream (beam search, rescoring, selection)
only ever sees those rows, so any model can be plugged in.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np

START = "<s>"
STOP = "</s>"
UNK = "<unk>"
RESERVED = (START, STOP, UNK)
START_ID, STOP_ID, UNK_ID = 0, 1, 2

# Alphanumeric runs, allowing joiners strictly inside them (209.00, 15-dec-19);
# commas and colons only join digit groups (50,698.72, 10:30). Any other
# non-alphanumeric character is its own token.
_TOKEN_RE = re.compile(r"[^\W_]+(?:[./\-'@][^\W_]+|(?<=\d)[,:]\d[^\W_]*)*|\S")


def tokenize(text: str) -> list[str]:
    """Lowercase ``text`` and split it into word and special-character tokens.

    >>> tokenize("Txn of INR 209.00 done on Acct XX013.")
    ['txn', 'of', 'inr', '209.00', 'done', 'on', 'acct', 'xx013', '.']
    """
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Vocabulary:
    """Immutable token <-> id mapping. Ids 0, 1, 2 are START, STOP, UNK."""

    tokens: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        tokens = tuple(self.tokens)
        if tokens[:3] != RESERVED:
            raise ValueError(f"vocabulary must start with reserved tokens {RESERVED}")
        if len(set(tokens)) != len(tokens):
            raise ValueError("duplicate tokens in vocabulary")
        object.__setattr__(self, "tokens", tokens)
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(tokens)})

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "Vocabulary":
        """Build from content tokens; the reserved tokens are prepended."""
        return cls(RESERVED + tuple(t for t in tokens if t not in RESERVED))

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: object) -> bool:
        return token in self._index

    def __hash__(self) -> int:
        return hash(self.digest)

    def lookup(self, token: str) -> int:
        return self._index.get(token, UNK_ID)

    def token(self, token_id: int) -> str:
        return self.tokens[token_id]

    def encode(self, tokens: Iterable[str]) -> list[int]:
        return [self._index.get(t, UNK_ID) for t in tokens]

    @property
    def digest(self) -> str:
        return _digest(self.tokens)

    def to_json(self) -> dict:
        return {"tokens": list(self.tokens)}

    @classmethod
    def from_json(cls, data: dict) -> "Vocabulary":
        return cls(tuple(data["tokens"]))


@lru_cache(maxsize=64)
def _digest(tokens: tuple[str, ...]) -> str:
    return hashlib.sha256("\n".join(tokens).encode("utf-8")).hexdigest()[:16]


def build_vocabulary(corpus: Iterable[Sequence[str]], max_size: int = 50_000) -> Vocabulary:
    """Keep the most frequent tokens of ``corpus`` (a list of tokenized
    documents), at most ``max_size`` ids including the reserved three.

    Ties in frequency are broken by first occurrence.
    """
    if max_size < 4:
        raise ValueError("max_size must be >= 4")
    counts: Counter[str] = Counter()
    for doc in corpus:
        counts.update(t for t in doc if t not in RESERVED)
    if not counts:
        raise ValueError("empty corpus")
    # Counter preserves insertion order, and sorted() is stable.
    ranked = sorted(counts, key=lambda t: -counts[t])
    return Vocabulary.from_tokens(ranked[: max_size - len(RESERVED)])


@dataclass(frozen=True)
class TokenSeq:
    """Token ids plus the display string and copy flag of every position.

    ``tokens`` keeps the original string even where the id is UNK, so that
    identifiers and amounts copied from a source render verbatim.
    """

    ids: tuple[int, ...]
    tokens: tuple[str, ...]
    copied: tuple[bool, ...]

    def __post_init__(self) -> None:
        if not len(self.ids) == len(self.tokens) == len(self.copied):
            raise ValueError("ids, tokens and copied must have equal length")

    def __len__(self) -> int:
        return len(self.ids)

    @classmethod
    def from_tokens(cls, tokens: Sequence[str], vocab: Vocabulary) -> "TokenSeq":
        return cls(tuple(vocab.encode(tokens)), tuple(tokens), (False,) * len(tokens))

    @classmethod
    def from_text(cls, text: str, vocab: Vocabulary) -> "TokenSeq":
        return cls.from_tokens(tokenize(text), vocab)

    @classmethod
    def from_ids(cls, ids: Sequence[int], vocab: Vocabulary) -> "TokenSeq":
        return cls(tuple(ids), tuple(vocab.token(i) for i in ids), (False,) * len(ids))

    def oov_positions(self) -> list[int]:
        """Positions whose id is UNK but whose original string is known."""
        return [k for k, (i, t) in enumerate(zip(self.ids, self.tokens)) if i == UNK_ID and t != UNK]


def restore_copies(seq: TokenSeq, source: TokenSeq) -> TokenSeq:
    """Resolve UNK positions of a decoded ``seq`` to out-of-vocabulary source
    strings and flag every position whose string occurs in ``source``.

    An UNK is matched to the first unused OOV source position preceded by the
    same token as in ``seq``; failing that, to the first unused OOV position.
    UNKs stay literal when the source has no OOV tokens.
    """
    oov = source.oov_positions()
    used: set[int] = set()
    tokens = list(seq.tokens)
    for p, token_id in enumerate(seq.ids):
        if token_id != UNK_ID or tokens[p] != UNK or not oov:
            continue
        prev = tokens[p - 1] if p > 0 else None
        free = [k for k in oov if k not in used] or oov
        match = next(
            (k for k in free if (source.tokens[k - 1] if k > 0 else None) == prev),
            free[0],
        )
        used.add(match)
        tokens[p] = source.tokens[match]
    present = set(source.tokens)
    copied = tuple(t in present for t in tokens)
    return TokenSeq(seq.ids, tuple(tokens), copied)


@dataclass(frozen=True)
class Hypothesis:
    """A decoded sequence with the score contributed by every step.

    ``step_scores[k]`` is the (adjusted) score of ``seq.ids[k]``;
    ``cum_logp`` is their left-to-right sum.
    """

    seq: TokenSeq
    step_scores: tuple[float, ...]
    cum_logp: float
    finished: bool = True

    def __len__(self) -> int:
        return len(self.seq)

    @property
    def ids(self) -> tuple[int, ...]:
        return self.seq.ids

    @property
    def tokens(self) -> tuple[str, ...]:
        return self.seq.tokens

    @property
    def avg_logp(self) -> float:
        return self.cum_logp / max(1, len(self.seq))

    @property
    def content_length(self) -> int:
        """Length without the trailing STOP, if any."""
        n = len(self.seq)
        return n - 1 if n and self.seq.ids[-1] == STOP_ID else n


def sort_hypotheses(hyps: Iterable[Hypothesis]) -> list[Hypothesis]:
    """Sort by average log-probability, best first; ties go to the shorter,
    then the lexicographically smaller id sequence."""
    return sorted(hyps, key=lambda h: (-h.avg_logp, len(h), h.ids))


def check_step_scores(values: np.ndarray, vocab_size: int) -> np.ndarray:
    """Raise if ``values`` is not a valid row of log-probabilities."""
    if values.ndim != 1 or values.shape[0] != vocab_size:
        raise ValueError(f"expected {vocab_size} scores, got shape {values.shape}")
    if np.isnan(values).any():
        raise ValueError("NaN in step scores")
    if (values > 0).any():
        raise ValueError("log-probabilities must be <= 0")
    return values


class StepScorer(Protocol):
    """Next-token log-probabilities for a source and a decoded prefix.

    Implementations must be pure functions of their arguments.
    """

    def vocab(self) -> Vocabulary: ...

    def next_scores(self, source: TokenSeq, prefix: Sequence[int]) -> np.ndarray: ...


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class TableScorer:
    """Replays a fixed score table: row ``k`` is returned for any prefix of
    length ``k``. Past the last row every bit of mass goes to STOP."""

    def __init__(self, script: Sequence[Sequence[float]], vocab: Vocabulary):
        n = len(vocab)
        rows = []
        for k, row in enumerate(script):
            if len(row) != n:
                raise ValueError(f"row {k} has {len(row)} entries, vocabulary has {n}")
            rows.append(_frozen(check_step_scores(np.array(row, dtype=np.float64), n)))
        stop_row = np.full(n, -np.inf)
        stop_row[STOP_ID] = 0.0
        self._rows = tuple(rows)
        self._stop_row = _frozen(stop_row)
        self._vocab = vocab

    def vocab(self) -> Vocabulary:
        return self._vocab

    def next_scores(self, source: TokenSeq, prefix: Sequence[int]) -> np.ndarray:
        k = len(prefix)
        return self._rows[k] if k < len(self._rows) else self._stop_row


def table_scorer(script: Sequence[Sequence[float]], vocab: Vocabulary) -> TableScorer:
    return TableScorer(script, vocab)


class ReferenceScorer:
    """Toy pointer-generator: an interpolated trigram model of a corpus
    blended with a copy distribution over the source tokens.

        p(j) = (1 - copy_weight) * p_trigram(j | last two) + copy_weight * p_copy(j | source)

    The trigram mixes maximum-likelihood trigram, bigram and add-one unigram
    estimates, so it is strictly positive. Documents end with STOP, which is
    how the model learns to terminate.
    """

    LAMBDAS = (0.6, 0.3, 0.1)
    FLOOR = 1e-9

    def __init__(self, corpus: Iterable[Sequence[str]], vocab: Vocabulary, copy_weight: float = 0.5):
        if not 0.0 <= copy_weight <= 1.0:
            raise ValueError("copy_weight must be in [0, 1]")
        self._vocab = vocab
        self.copy_weight = float(copy_weight)
        n = len(vocab)
        unigram = np.zeros(n)
        bigram: dict[int, Counter[int]] = {}
        trigram: dict[tuple[int, int], Counter[int]] = {}
        docs = 0
        for doc in corpus:
            ids = vocab.encode(doc) + [STOP_ID]
            docs += 1
            a = b = START_ID
            for c in ids:
                unigram[c] += 1
                bigram.setdefault(b, Counter())[c] += 1
                trigram.setdefault((a, b), Counter())[c] += 1
                a, b = b, c
        if docs == 0:
            raise ValueError("empty corpus")
        self._unigram = _frozen((unigram + 1.0) / (unigram.sum() + n))
        self._bigram = {k: _sparse(v) for k, v in bigram.items()}
        self._trigram = {k: _sparse(v) for k, v in trigram.items()}
        self._trigram_cache = lru_cache(maxsize=100_000)(self._compute_trigram)
        self._copy = lru_cache(maxsize=256)(self._compute_copy)
        self._blend = lru_cache(maxsize=100_000)(self._compute_blend)

    def vocab(self) -> Vocabulary:
        return self._vocab

    def trigram_probs(self, context: tuple[int, int]) -> np.ndarray:
        """Interpolated p(. | context) where ``context`` is the last two ids."""
        return self._trigram_cache(context)

    def _compute_trigram(self, context: tuple[int, int]) -> np.ndarray:
        l3, l2, l1 = self.LAMBDAS
        p = l1 * self._unigram
        weight = l1
        for lam, row in ((l2, self._bigram.get(context[1])), (l3, self._trigram.get(context))):
            if row is not None:
                idx, probs = row
                p[idx] += lam * probs
                weight += lam
        return _frozen(p / weight)

    def _compute_copy(self, source_ids: tuple[int, ...]) -> np.ndarray:
        p = np.zeros(len(self._vocab))
        if source_ids:
            np.add.at(p, np.asarray(source_ids), 1.0)
            p /= len(source_ids)
        return _frozen(p)

    def _compute_blend(self, source_ids: tuple[int, ...], context: tuple[int, int]) -> np.ndarray:
        w = self.copy_weight
        p = (1.0 - w) * self._trigram_cache(context) + w * self._copy(source_ids)
        if (p <= 0).any():
            p = (1.0 - self.FLOOR) * p + self.FLOOR / len(p)
        p = p / p.sum()
        with np.errstate(divide="ignore"):
            return _frozen(np.minimum(np.log(p), 0.0))

    def next_scores(self, source: TokenSeq, prefix: Sequence[int]) -> np.ndarray:
        a = prefix[-2] if len(prefix) >= 2 else START_ID
        b = prefix[-1] if len(prefix) >= 1 else START_ID
        return self._blend(source.ids, (a, b))


def _sparse(counts: Counter[int]) -> tuple[np.ndarray, np.ndarray]:
    idx = np.fromiter(counts.keys(), dtype=np.int64, count=len(counts))
    vals = np.fromiter(counts.values(), dtype=np.float64, count=len(counts))
    return idx, vals / vals.sum()


def reference_scorer(
    corpus: Iterable[Sequence[str]], vocab: Vocabulary, copy_weight: float = 0.5
) -> ReferenceScorer:
    return ReferenceScorer(corpus, vocab, copy_weight)


def log_softmax(x: np.ndarray) -> np.ndarray:
    m = np.max(x)
    return x - (m + math.log(np.exp(x - m).sum()))


def read_documents(path: str | Path) -> list[str]:
    """One document per non-blank line. ``.jsonl`` files carry the text in
    a ``"text"`` field."""
    path = Path(path)
    lines = [line for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    if path.suffix == ".jsonl":
        return [json.loads(line)["text"] for line in lines]
    return lines
