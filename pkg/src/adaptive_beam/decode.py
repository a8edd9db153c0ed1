"""Beam search with pluggable score adjustments.

Four strategies share one search loop:

* ``traditional``: raw decoder log-probabilities.
* ``stepwise``: keyword scores multiplied by ``alpha`` at every step.
* ``end``: traditional search, then keyword steps of each finished
  hypothesis multiplied by ``alpha`` and the list re-sorted.
* ``abs`` (adaptive): every score divided by ``max(Q, R) + eps`` where Q and R
  are the category-corpus and source-document bigram probabilities of
  ``(previous token, candidate)``.

Log-probabilities are non-positive, so multiplying by ``alpha < 1`` or
dividing by a number near 1 moves a score towards 0 (a boost), while dividing
by ``eps`` for an unseen bigram is a heavy penalty.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .core import (
    START_ID,
    STOP_ID,
    Hypothesis,
    StepScorer,
    TokenSeq,
    Vocabulary,
    restore_copies,
    sort_hypotheses,
)
from .lm import BigramModel

EPSILON = 1e-5


class Strategy(str, enum.Enum):
    TRADITIONAL = "traditional"
    STEPWISE = "stepwise"
    END = "end"
    ADAPTIVE = "abs"

    @classmethod
    def parse(cls, name: str | "Strategy") -> "Strategy":
        if isinstance(name, Strategy):
            return name
        aliases = {"adaptive": cls.ADAPTIVE, "stepwise_keyword": cls.STEPWISE, "end_keyword": cls.END}
        key = name.strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown strategy {name!r}") from None


@dataclass(frozen=True)
class StrategyConfig:
    strategy: Strategy = Strategy.TRADITIONAL
    beam_width: int = 4
    alpha: float = 0.1
    keywords: frozenset[str] = frozenset()
    category_lm: BigramModel | None = field(default=None, compare=False)
    source_lm: BigramModel | None = field(default=None, compare=False)
    min_ratio: float = 0.15
    max_ratio: float = 0.35
    epsilon: float = EPSILON

    def __post_init__(self) -> None:
        object.__setattr__(self, "strategy", Strategy.parse(self.strategy))
        object.__setattr__(self, "keywords", frozenset(self.keywords))
        if not 0 < self.min_ratio <= self.max_ratio <= 1:
            raise ValueError("invalid length ratios")
        if self.beam_width < 1:
            raise ValueError("beam_width must be >= 1")
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")
        if self.epsilon != EPSILON:
            raise ValueError(f"epsilon is fixed at {EPSILON}")

    def with_(self, **changes) -> "StrategyConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class DecodeResult:
    hypotheses: list[Hypothesis]
    min_len: int
    max_len: int
    per_step_trace: list[np.ndarray] | None = None


def length_bounds(source_len: int, min_ratio: float = 0.15, max_ratio: float = 0.35) -> tuple[int, int]:
    """``(min_len, max_len)`` in content tokens for a source of ``source_len`` tokens.

    Ratios are read as the decimals they print as, so 0.15 * 20 floors to 3.
    """
    lo = int(Fraction(repr(min_ratio)) * source_len)
    hi = int(Fraction(repr(max_ratio)) * source_len)
    min_len = max(1, lo)
    return min_len, max(min_len, hi)


def keyword_mask(vocab: Vocabulary, keywords: Iterable[str]) -> np.ndarray:
    mask = np.zeros(len(vocab), dtype=bool)
    for w in keywords:
        if w in vocab:
            mask[vocab.lookup(w)] = True
    return mask


def _stepwise(raw: np.ndarray, mask: np.ndarray, alpha: float) -> np.ndarray:
    return np.where(mask, raw * alpha, raw)


def adjust_stepwise(raw: np.ndarray, keywords: Iterable[str], alpha: float, vocab: Vocabulary) -> np.ndarray:
    """Multiply the scores of keyword tokens by ``alpha``."""
    return _stepwise(np.asarray(raw, dtype=np.float64), keyword_mask(vocab, keywords), alpha)


def adjust_adaptive(
    raw: np.ndarray, prev_token: int, category_lm: BigramModel, source_lm: BigramModel, epsilon: float = EPSILON
) -> np.ndarray:
    """Divide every score by ``max(Q(prev, j), R(prev, j)) + epsilon``."""
    divisor = np.maximum(category_lm.row(prev_token), source_lm.row(prev_token)) + epsilon
    return np.asarray(raw, dtype=np.float64) / divisor


def adjust_end(hypotheses: Sequence[Hypothesis], keywords: Iterable[str], alpha: float) -> list[Hypothesis]:
    """Rescore finished hypotheses with every keyword step multiplied by
    ``alpha`` and return them re-sorted."""
    keywords = frozenset(keywords)
    out = []
    for h in hypotheses:
        if not h.finished:
            raise ValueError("adjust_end expects finished hypotheses")
        scores = tuple(s * alpha if t in keywords else s for s, t in zip(h.step_scores, h.tokens))
        cum = 0.0
        for s in scores:
            cum += s
        out.append(replace(h, step_scores=scores, cum_logp=cum))
    return sort_hypotheses(out)


@dataclass(frozen=True)
class _Node:
    ids: tuple[int, ...]
    scores: tuple[float, ...]
    cum: float


def beam_search(
    scorer: StepScorer, source: TokenSeq, config: StrategyConfig, trace: bool = False
) -> DecodeResult:
    """Decode ``source`` and return the finished hypotheses, best average
    log-probability first.

    Each step expands every live hypothesis by every token. Candidates
    compete for ``beam_width`` slots on cumulative adjusted score (ties: lower
    token id, then the earlier parent). A candidate is finished when it emits
    STOP or reaches ``max_len`` content tokens; STOP is not offered before
    ``min_len``. Search ends once ``beam_width`` hypotheses have finished or
    nothing is left alive.
    """
    if len(source) == 0:
        raise ValueError("empty source")
    strategy = config.strategy
    if strategy is Strategy.ADAPTIVE and (config.category_lm is None or config.source_lm is None):
        raise ValueError("adaptive strategy needs both a category and a source bigram model")
    vocab = scorer.vocab()
    n = len(vocab)
    width = config.beam_width
    min_len, max_len = length_bounds(len(source), config.min_ratio, config.max_ratio)
    mask = keyword_mask(vocab, config.keywords) if strategy is Strategy.STEPWISE else None
    token_ids = np.arange(n)

    live = [_Node((), (), 0.0)]
    finished: list[_Node] = []
    rows_trace: list[np.ndarray] | None = [] if trace else None

    for step in range(max_len):
        if not live or len(finished) >= width:
            break
        rows = []
        for node in live:
            raw = np.asarray(scorer.next_scores(source, node.ids), dtype=np.float64)
            if strategy is Strategy.STEPWISE:
                row = _stepwise(raw, mask, config.alpha)
            elif strategy is Strategy.ADAPTIVE:
                prev = node.ids[-1] if node.ids else START_ID
                row = adjust_adaptive(raw, prev, config.category_lm, config.source_lm, config.epsilon)
            else:
                row = raw
            rows.append(row)
        adjusted = np.vstack(rows)
        if rows_trace is not None:
            rows_trace.append(adjusted)
        totals = np.array([node.cum for node in live])[:, None] + adjusted

        parents = np.repeat(np.arange(len(live)), n)
        tokens = np.tile(token_ids, len(live))
        flat = totals.ravel()
        if step < min_len:
            keep = tokens != STOP_ID
            parents, tokens, flat = parents[keep], tokens[keep], flat[keep]
        order = np.lexsort((parents, tokens, -flat))[:width]

        next_live = []
        for c in order:
            p, j = int(parents[c]), int(tokens[c])
            node = live[p]
            child = _Node(node.ids + (j,), node.scores + (float(adjusted[p, j]),), float(flat[c]))
            if j == STOP_ID or step + 1 == max_len:
                finished.append(child)
            else:
                next_live.append(child)
        live = next_live

    hyps = [_finish(node, source, vocab) for node in finished]
    hyps = sort_hypotheses(hyps)[:width]
    if strategy is Strategy.END:
        hyps = adjust_end(hyps, config.keywords, config.alpha)
    return DecodeResult(hyps, min_len, max_len, rows_trace)


def _finish(node: _Node, source: TokenSeq, vocab: Vocabulary) -> Hypothesis:
    seq = restore_copies(TokenSeq.from_ids(node.ids, vocab), source)
    return Hypothesis(seq, node.scores, node.cum, finished=True)


def render_summary(hypothesis: Hypothesis, source: TokenSeq | None = None) -> str:
    """Join the hypothesis tokens with single spaces, STOP removed."""
    seq = hypothesis.seq if source is None else restore_copies(hypothesis.seq, source)
    return " ".join(t for i, t in zip(seq.ids, seq.tokens) if i != STOP_ID)
