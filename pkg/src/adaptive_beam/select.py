"""Final summary selection over a sorted hypothesis list.

Every hypothesis is scored by how many of its tokens are keywords. With
``F`` the largest such count, the first hypothesis (in average
log-probability order) whose count is ``F`` or ``F - 1`` wins. Allowing
``F - 1`` lets a more probable hypothesis win over one that has a single
extra keyword.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import STOP_ID, Hypothesis


@dataclass(frozen=True)
class SelectionReport:
    chosen_index: int
    per_hyp_counts: list[int]
    global_max: int

    def to_json(self) -> dict:
        return {
            "chosen_index": self.chosen_index,
            "per_hyp_counts": list(self.per_hyp_counts),
            "global_max": self.global_max,
        }


def keyword_count(hypothesis: Hypothesis, keywords: Iterable[str]) -> int:
    """Keyword occurrences in the hypothesis, counted with multiplicity."""
    keywords = frozenset(keywords)
    return sum(1 for i, t in zip(hypothesis.ids, hypothesis.tokens) if i != STOP_ID and t in keywords)


def select_final(hypotheses: Sequence[Hypothesis], keywords: Iterable[str]) -> tuple[Hypothesis, SelectionReport]:
    if not hypotheses:
        raise ValueError("no hypotheses")
    keywords = frozenset(keywords)
    counts = [keyword_count(h, keywords) for h in hypotheses]
    best = max(counts)
    # best itself always qualifies, so this never falls through.
    index = next(i for i, f in enumerate(counts) if f == best or f == best - 1)
    return hypotheses[index], SelectionReport(index, counts, best)
