import pytest
from hypothesis import given, strategies as st

from adaptive_beam.core import STOP_ID, Hypothesis, TokenSeq, Vocabulary
from adaptive_beam.select import keyword_count, select_final

VOCAB = Vocabulary.from_tokens(["inr", "209.00", "kw", "w"])


def hyp(*tokens):
    seq = TokenSeq.from_tokens(list(tokens), VOCAB)
    return Hypothesis(seq, (-1.0,) * len(seq), -float(len(seq)))


def with_count(f):
    return hyp(*(["kw"] * f + ["w"]))


def test_keyword_count_examples():
    assert keyword_count(hyp("inr", "209.00", "inr"), {"inr"}) == 2
    assert keyword_count(hyp("inr", "209.00"), set()) == 0
    assert keyword_count(hyp("w", "209.00"), {"inr"}) == 0


def test_stop_is_never_a_keyword():
    h = Hypothesis(TokenSeq.from_ids([3, STOP_ID], VOCAB), (-1.0, -1.0), -2.0)
    assert keyword_count(h, {"inr", "</s>"}) == 1


@pytest.mark.parametrize(
    "counts, index, top",
    [([1, 3, 3], 1, 3), ([2, 3], 0, 3), ([0, 0, 0], 0, 0), ([0, 5, 4], 1, 5), ([3, 1, 4], 0, 4)],
)
def test_select_final_examples(counts, index, top):
    hyps = [with_count(f) for f in counts]
    chosen, report = select_final(hyps, {"kw"})
    assert report.chosen_index == index
    assert report.global_max == top
    assert report.per_hyp_counts == counts
    assert chosen is hyps[index]


def test_select_final_needs_hypotheses():
    with pytest.raises(ValueError, match="no hypotheses"):
        select_final([], {"kw"})


@given(st.lists(st.integers(0, 5), min_size=1, max_size=8))
def test_selection_properties(counts):
    hyps = [with_count(f) for f in counts]
    chosen, report = select_final(hyps, {"kw"})
    f = report.per_hyp_counts[report.chosen_index]
    assert f >= report.global_max - 1
    assert all(c < report.global_max - 1 for c in counts[: report.chosen_index])
    assert select_final(hyps, set())[1].chosen_index == 0


@given(st.lists(st.sampled_from(["inr", "209.00", "kw", "w"]), max_size=10), st.randoms())
def test_count_ignores_token_order(tokens, rnd):
    shuffled = tokens[:]
    rnd.shuffle(shuffled)
    assert keyword_count(hyp(*tokens), {"kw", "inr"}) == keyword_count(hyp(*shuffled), {"kw", "inr"})
