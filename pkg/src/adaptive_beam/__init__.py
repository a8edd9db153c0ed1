"""Keyword- and bigram-guided beam search for short-text summarization."""

from .core import (
    START,
    STOP,
    UNK,
    Hypothesis,
    StepScorer,
    TokenSeq,
    Vocabulary,
    build_vocabulary,
    reference_scorer,
    table_scorer,
    tokenize,
)
from .decode import (
    DecodeResult,
    Strategy,
    StrategyConfig,
    adjust_adaptive,
    adjust_end,
    adjust_stepwise,
    beam_search,
    render_summary,
)
from .evaluation import compare_strategies, distill_loss, keyword_recall, rouge_l, rouge_n
from .keywords import CategoryLabel, KeywordProfile, active_keywords, detect_category, mine_keywords
from .lm import BigramModel, bigram_prob, source_bigrams, train_bigram
from .select import SelectionReport, keyword_count, select_final

__version__ = "0.1.0"
