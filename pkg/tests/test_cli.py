import csv
import io
import json

import pytest

from adaptive_beam import cli
from adaptive_beam.core import TokenSeq, reference_scorer, tokenize, read_documents, Vocabulary
from adaptive_beam.decode import StrategyConfig, beam_search, render_summary
from adaptive_beam.select import keyword_count

BANK_SMS = "Txn of INR 209.00 done on Acct XX013 on 15-Dec-19. Avl Bal: INR 50,698.72. Not you? Call 18002586161"


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def fx_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("fx")
    assert cli.main(["make-fixtures", "--out", str(d), "--seed", "2", "--n-docs", "8"]) == 0
    return d


def decode_flags(d, strategy="abs"):
    return [
        "--strategy", strategy,
        "--scorer-corpus", d / "generic.txt",
        "--vocab", d / "vocab.json",
        "--profile", d / "profile.json",
        "--category-lm", d / "lms",
    ]


def test_make_fixtures_layout(fx_dir):
    for name in ("generic.txt", "vocab.json", "profile.json", "docs.jsonl"):
        assert (fx_dir / name).is_file()
    assert {p.stem for p in (fx_dir / "lms").glob("*.json")} == {p.stem for p in (fx_dir / "corpora").glob("*.txt")}
    assert len((fx_dir / "docs.jsonl").read_text().splitlines()) == 8


def test_missing_corpus_is_a_usage_error(tmp_path, capsys):
    code, _, err = run(["mine-keywords", tmp_path / "nope.txt"], capsys)
    assert code == 2 and "corpus not found" in err
    code, _, err = run(["build-vocab", tmp_path / "nope.txt"], capsys)
    assert code == 2 and "corpus not found" in err


def test_mine_keywords_cli(tmp_path, capsys):
    corpus = tmp_path / "c.txt"
    corpus.write_text("the pnr pnr flight flight flight the\n")
    code, out, _ = run(["mine-keywords", corpus, "-k", "2"], capsys)
    assert code == 0 and json.loads(out) == ["flight", "pnr"]
    assert run(["mine-keywords", corpus, "-k", "0"], capsys)[0] == 2
    stop_only = tmp_path / "s.txt"
    stop_only.write_text("the of the is\n")
    code, out, _ = run(["mine-keywords", stop_only], capsys)
    assert code == 0 and json.loads(out) == []


def test_build_vocab_and_train_lm(tmp_path, capsys):
    corpus = tmp_path / "bank.txt"
    corpus.write_text("txn of inr done\nacct debited inr\n")
    vocab = tmp_path / "vocab.json"
    assert run(["build-vocab", corpus, "--out", vocab], capsys)[0] == 0
    lm = tmp_path / "bank.json"
    assert run(["train-lm", corpus, "--vocab", vocab, "--out", lm], capsys)[0] == 0
    data = json.loads(lm.read_text())
    assert data["meta"]["corpus"] == "bank"
    assert data["counts"]["<s>"] == {"acct": 1, "txn": 1}
    assert run(["train-lm", corpus, "--vocab", tmp_path / "missing.json"], capsys)[0] == 2


def test_bad_length_ratios(fx_dir, capsys):
    code, _, err = run(["summarize", BANK_SMS, *decode_flags(fx_dir), "--min-ratio", "0.5", "--max-ratio", "0.4"], capsys)
    assert code == 2 and "invalid length ratios" in err


def test_abs_needs_category_models(fx_dir, capsys):
    flags = ["--scorer-corpus", fx_dir / "generic.txt", "--vocab", fx_dir / "vocab.json"]
    code, _, err = run(["summarize", BANK_SMS, "--strategy", "abs", *flags], capsys)
    assert code == 2 and "category-lm" in err


def test_bank_message_keeps_keywords(fx_dir, capsys):
    code, out, err = run(["summarize", BANK_SMS, *decode_flags(fx_dir), "--report"], capsys)
    assert code == 0 and out.strip()
    report = json.loads(err)
    assert report["category"]["name"] == "bank"
    chosen = report["selection"]["chosen_index"]
    assert report["selection"]["per_hyp_counts"][chosen] > 0
    assert set(tokenize(out)) & set(report["keywords"])


def test_traditional_without_keywords_is_plain_top_hypothesis(fx_dir, capsys):
    text = "Your PNR 4521 for flight AI 202 is confirmed. Seat 12A."
    flags = ["--strategy", "traditional", "--scorer-corpus", fx_dir / "generic.txt", "--vocab", fx_dir / "vocab.json"]
    code, out, _ = run(["summarize", text, *flags], capsys)
    assert code == 0
    vocab = Vocabulary.from_json(json.loads((fx_dir / "vocab.json").read_text()))
    corpus = [tokenize(t) for t in read_documents(fx_dir / "generic.txt")]
    scorer = reference_scorer(corpus, vocab, 0.8)
    source = TokenSeq.from_text(text, vocab)
    top = beam_search(scorer, source, StrategyConfig("traditional")).hypotheses[0]
    assert out.strip() == render_summary(top, source)
    assert keyword_count(top, set()) == 0


def test_summarize_reads_stdin(fx_dir, capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO(BANK_SMS))
    code, out, _ = run(["summarize", *decode_flags(fx_dir)], capsys)
    assert code == 0
    assert out == run(["summarize", BANK_SMS, *decode_flags(fx_dir)], capsys)[1]


def test_evaluate_writes_csv_and_markdown(fx_dir, tmp_path, capsys):
    out = tmp_path / "table.csv"
    argv = ["evaluate", fx_dir / "docs.jsonl", *decode_flags(fx_dir), "--strategies", "traditional,abs", "--out", out]
    assert run(argv, capsys)[0] == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert [r["strategy"] for r in rows] == ["traditional", "abs"]
    for r in rows:
        assert 0 <= float(r["recall"]) <= 1
        assert 0 <= float(r["rouge1_f"]) <= 1
        assert r["sec_per_char"] == ""
    assert out.with_suffix(".md").read_text().startswith("|")


def test_evaluate_without_references_leaves_rouge_blank(fx_dir, tmp_path, capsys):
    docs = tmp_path / "docs.txt"
    docs.write_text(BANK_SMS + "\n")
    code, out, _ = run(["evaluate", docs, *decode_flags(fx_dir), "--strategies", "end", "--timing"], capsys)
    assert code == 0
    (row,) = csv.DictReader(out.splitlines())
    assert row["rouge1_f"] == "" and float(row["sec_per_char"]) > 0
    refs = tmp_path / "refs.txt"
    refs.write_text("a\nb\n")
    assert run(["evaluate", docs, *decode_flags(fx_dir), "--refs", refs], capsys)[0] == 2
