"""Metrics and the strategy-comparison harness.

ROUGE here is plain ROUGE: whitespace/punctuation tokenization as in
:func:`adaptive_beam.core.tokenize`, no stemming, no stopword removal.
"""

from __future__ import annotations

import csv
import io
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .core import StepScorer, TokenSeq, tokenize
from .decode import Strategy, StrategyConfig, beam_search, render_summary
from .keywords import KeywordProfile, active_keywords, detect_category
from .lm import BigramModel, empty_bigram, source_bigrams
from .select import select_final

CSV_HEADER = ["strategy", "recall", "rouge1_f", "rouge2_f", "rougeL_f", "sec_per_char"]


@dataclass(frozen=True)
class RougeScore:
    recall: float
    precision: float
    f1: float

    @classmethod
    def from_counts(cls, overlap: int, ref_total: int, cand_total: int) -> "RougeScore":
        if overlap == 0 or ref_total == 0 or cand_total == 0:
            return cls(0.0, 0.0, 0.0)
        # 2PR / (P + R) reduces to 2 * overlap / (ref + cand).
        return cls(
            float(Fraction(overlap, ref_total)),
            float(Fraction(overlap, cand_total)),
            float(Fraction(2 * overlap, ref_total + cand_total)),
        )


def _tokens(text: str | Sequence[str]) -> list[str]:
    return tokenize(text) if isinstance(text, str) else list(text)


def _ngrams(tokens: Sequence[str], n: int) -> Counter[tuple[str, ...]]:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(reference: str | Sequence[str], candidate: str | Sequence[str], n: int = 1) -> RougeScore:
    if n < 1:
        raise ValueError("n must be >= 1")
    ref = _ngrams(_tokens(reference), n)
    cand = _ngrams(_tokens(candidate), n)
    overlap = sum((ref & cand).values())
    return RougeScore.from_counts(overlap, sum(ref.values()), sum(cand.values()))


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l(reference: str | Sequence[str], candidate: str | Sequence[str]) -> RougeScore:
    ref, cand = _tokens(reference), _tokens(candidate)
    return RougeScore.from_counts(lcs_length(ref, cand), len(ref), len(cand))


def keyword_recall(summary: str | Sequence[str], keywords: Iterable[str]) -> float:
    """Share of distinct ``keywords`` that appear in ``summary`` (1.0 when
    there are none to find)."""
    keywords = frozenset(keywords)
    if not keywords:
        return 1.0
    return len(keywords & set(_tokens(summary))) / len(keywords)


def distill_loss(loss_target: float, loss_ts: float, beta: float = 0.4) -> float:
    """Student loss ``(1 - beta) * loss_target + beta * loss_ts`` where
    ``loss_ts`` is the teacher/student cross-entropy."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must be in [0, 1]")
    if loss_target < 0 or loss_ts < 0:
        raise ValueError("losses must be non-negative")
    return (1.0 - beta) * loss_target + beta * loss_ts


@dataclass
class DocOutcome:
    category: str
    summary: str
    recall: float
    rouge: tuple[RougeScore, RougeScore, RougeScore] | None
    seconds: float
    chars: int


@dataclass
class ComparisonRow:
    strategy: str
    recall: float
    rouge1: RougeScore | None
    rouge2: RougeScore | None
    rougeL: RougeScore | None
    sec_per_char: float
    failures: list[str] = field(default_factory=list)
    outcomes: list[DocOutcome] = field(default_factory=list, repr=False)


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def _mean_rouge(scores: Sequence[RougeScore]) -> RougeScore:
    return RougeScore(
        _mean([s.recall for s in scores]), _mean([s.precision for s in scores]), _mean([s.f1 for s in scores])
    )


def summarize_one(
    scorer: StepScorer,
    text: str,
    profile: KeywordProfile,
    config: StrategyConfig,
    category_lms: Mapping[str, BigramModel] | None = None,
):
    """Run detection, decoding and selection for one document.

    Returns ``(summary, hypothesis, report, label, keywords, source)``.
    """
    vocab = scorer.vocab()
    source = TokenSeq.from_text(text, vocab)
    label = detect_category(source.tokens, profile)
    keywords = active_keywords(profile, label) | config.keywords
    cfg = config.with_(keywords=keywords)
    if cfg.strategy is Strategy.ADAPTIVE:
        lms = category_lms or {}
        category_lm = lms.get(label.name) or cfg.category_lm or empty_bigram(vocab, label.name)
        cfg = cfg.with_(category_lm=category_lm, source_lm=source_bigrams(source, vocab))
    result = beam_search(scorer, source, cfg)
    hyp, report = select_final(result.hypotheses, keywords)
    return render_summary(hyp, source), hyp, report, label, keywords, source


def compare_strategies(
    scorer: StepScorer,
    docs: Sequence[str],
    profile: KeywordProfile,
    configs: Sequence[StrategyConfig],
    category_lms: Mapping[str, BigramModel] | None = None,
    references: Sequence[str | None] | None = None,
) -> list[ComparisonRow]:
    """Decode every document under every config and aggregate the metrics.

    Keyword recall for a document is measured against the active keywords
    that actually occur in its source. A document that fails is recorded in
    ``failures`` and left out of the means.
    """
    if not docs:
        raise ValueError("no documents")
    if references is not None and len(references) != len(docs):
        raise ValueError("references and docs differ in length")
    rows = []
    for config in configs:
        outcomes: list[DocOutcome] = []
        failures: list[str] = []
        for k, text in enumerate(docs):
            try:
                t0 = time.perf_counter()
                summary, _, _, label, keywords, source = summarize_one(scorer, text, profile, config, category_lms)
                elapsed = time.perf_counter() - t0
            except Exception as exc:
                failures.append(f"doc {k}: {exc}")
                continue
            expected = keywords & set(source.tokens)
            ref = references[k] if references is not None else None
            rouge = None
            if ref is not None:
                rouge = (rouge_n(ref, summary, 1), rouge_n(ref, summary, 2), rouge_l(ref, summary))
            outcomes.append(DocOutcome(label.name, summary, keyword_recall(summary, expected), rouge, elapsed, len(text)))
        scored = [o.rouge for o in outcomes if o.rouge is not None]
        total_chars = sum(o.chars for o in outcomes)
        rows.append(
            ComparisonRow(
                strategy=config.strategy.value,
                recall=_mean([o.recall for o in outcomes]),
                rouge1=_mean_rouge([r[0] for r in scored]) if scored else None,
                rouge2=_mean_rouge([r[1] for r in scored]) if scored else None,
                rougeL=_mean_rouge([r[2] for r in scored]) if scored else None,
                sec_per_char=sum(o.seconds for o in outcomes) / total_chars if total_chars else 0.0,
                failures=failures,
                outcomes=outcomes,
            )
        )
    return rows


def _fmt(x: float | None, digits: int = 4) -> str:
    return "" if x is None else f"{x:.{digits}f}"


def _cells(row: ComparisonRow, timing: bool) -> list[str]:
    return [
        row.strategy,
        _fmt(row.recall),
        _fmt(row.rouge1.f1 if row.rouge1 else None),
        _fmt(row.rouge2.f1 if row.rouge2 else None),
        _fmt(row.rougeL.f1 if row.rougeL else None),
        f"{row.sec_per_char:.3e}" if timing else "",
    ]


def rows_to_csv(rows: Sequence[ComparisonRow], timing: bool = True) -> str:
    """CSV report. With ``timing=False`` the timing column is left blank so
    the output is a pure function of the inputs."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(_cells(row, timing))
    return buf.getvalue()


def rows_to_markdown(rows: Sequence[ComparisonRow], timing: bool = True) -> str:
    lines = ["| " + " | ".join(CSV_HEADER + ["failures"]) + " |", "|" + "---|" * (len(CSV_HEADER) + 1)]
    for row in rows:
        lines.append("| " + " | ".join(_cells(row, timing) + [str(len(row.failures))]) + " |")
    return "\n".join(lines) + "\n"
