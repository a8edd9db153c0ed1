"""Command-line interface.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
Every subcommand is deterministic for identical inputs and flags.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .core import ReferenceScorer, Vocabulary, build_vocabulary, read_documents, reference_scorer, tokenize
from .decode import Strategy, StrategyConfig
from .evaluation import compare_strategies, rows_to_csv, rows_to_markdown, summarize_one
from .keywords import (
    DEFAULT_K,
    KeywordProfile,
    default_common_words,
    default_stopwords,
    mine_keywords,
    read_word_list,
)
from .lm import BigramModel, train_bigram

log = logging.getLogger("adaptive_beam")

FALLBACK_LM = "*"


class UsageError(Exception):
    """Bad flags or inputs; exits with status 2."""


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _read_corpus(path: str, what: str = "corpus") -> list[list[str]]:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"{what} not found: {path}")
    docs = [tokenize(t) for t in read_documents(p)]
    if not any(docs):
        raise UsageError(f"empty {what}: {path}")
    return docs


def _load_vocab(path: str) -> Vocabulary:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"vocabulary not found: {path}")
    return Vocabulary.from_json(json.loads(p.read_text(encoding="utf-8")))


def _load_profile(path: str | None) -> KeywordProfile:
    if path is None:
        return KeywordProfile()
    if not Path(path).is_file():
        raise UsageError(f"profile not found: {path}")
    return KeywordProfile.load(path)


def _load_category_lms(bindings: list[str], vocab: Vocabulary) -> dict[str, BigramModel]:
    """``NAME=PATH`` binds one category, a directory binds every ``*.json``
    in it by file stem, and a bare file is the fallback for all categories."""
    lms: dict[str, BigramModel] = {}
    for binding in bindings:
        name, sep, path = binding.partition("=")
        if not sep:
            name, path = FALLBACK_LM, binding
        p = Path(path)
        try:
            if p.is_dir() and not sep:
                for f in sorted(p.glob("*.json")):
                    lms[f.stem] = BigramModel.load(f, vocab)
            elif p.is_file():
                lms[name] = BigramModel.load(p, vocab)
            else:
                raise UsageError(f"language model not found: {path}")
        except (ValueError, KeyError) as exc:
            raise UsageError(f"cannot load language model {path}: {exc}") from None
    return lms


def _scorer(args) -> ReferenceScorer:
    corpus = _read_corpus(args.scorer_corpus, "scorer corpus")
    vocab = _load_vocab(args.vocab) if args.vocab else build_vocabulary(corpus, args.vocab_size)
    return reference_scorer(corpus, vocab, args.copy_weight)


def _config(args, strategy: str) -> StrategyConfig:
    try:
        return StrategyConfig(
            strategy=Strategy.parse(strategy),
            beam_width=args.beam_width,
            alpha=args.alpha,
            min_ratio=args.min_ratio,
            max_ratio=args.max_ratio,
            keywords=frozenset(w.strip().lower() for w in (args.keywords or "").split(",") if w.strip()),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_build_vocab(args) -> int:
    docs = [d for path in args.corpus for d in _read_corpus(path)]
    vocab = build_vocabulary(docs, args.max_size)
    _write(_dump(vocab.to_json()), args.out)
    return 0


def cmd_train_lm(args) -> int:
    docs = _read_corpus(args.corpus)
    vocab = _load_vocab(args.vocab)
    model = train_bigram(docs, vocab, name=args.name or Path(args.corpus).stem)
    _write(model.dumps(), args.out)
    return 0


def cmd_mine_keywords(args) -> int:
    if args.k < 1:
        raise UsageError("k must be ≥ 1")
    p = Path(args.corpus)
    if not p.is_file():
        raise UsageError(f"corpus not found: {args.corpus}")
    docs = [tokenize(t) for t in read_documents(p)]
    stop = read_word_list(args.stopwords) if args.stopwords else default_stopwords()
    common = read_word_list(args.common_words) if args.common_words else default_common_words()
    _write(json.dumps(mine_keywords(docs, stop, common, args.k), ensure_ascii=False) + "\n", args.out)
    return 0


def _input_text(args) -> str:
    if args.input:
        p = Path(args.input)
        if not p.is_file():
            raise UsageError(f"input not found: {args.input}")
        return p.read_text(encoding="utf-8").strip()
    if args.text:
        return " ".join(args.text)
    return sys.stdin.read().strip()


def cmd_summarize(args) -> int:
    config = _config(args, args.strategy)
    text = _input_text(args)
    if not tokenize(text):
        raise UsageError("empty input")
    scorer = _scorer(args)
    lms = _load_category_lms(args.category_lm or [], scorer.vocab())
    if config.strategy is Strategy.ADAPTIVE:
        if not lms:
            raise UsageError("strategy abs needs --category-lm")
        config = config.with_(category_lm=lms.get(FALLBACK_LM))
    profile = _load_profile(args.profile)
    summary, hyp, report, label, keywords, source = summarize_one(scorer, text, profile, config, lms)
    _write(summary + "\n", args.out)
    if args.report:
        sys.stderr.write(
            _dump(
                {
                    "category": {"name": label.name, "confidence": label.confidence},
                    "keywords": sorted(keywords),
                    "selection": report.to_json(),
                    "avg_logp": hyp.avg_logp,
                }
            )
        )
    return 0


def cmd_evaluate(args) -> int:
    p = Path(args.docs)
    if not p.is_file():
        raise UsageError(f"docs not found: {args.docs}")
    if p.suffix == ".jsonl":
        records = [json.loads(line) for line in p.read_text(encoding="utf-8").splitlines() if line.strip()]
    else:
        records = [{"text": t} for t in read_documents(p)]
    if not records:
        raise UsageError(f"no documents in {args.docs}")
    docs = [r["text"] for r in records]
    refs = [r.get("reference") for r in records]
    if args.refs:
        refs = read_documents(args.refs)
        if len(refs) != len(docs):
            raise UsageError("refs and docs differ in length")
    references = refs if any(r is not None for r in refs) else None

    configs = [_config(args, s) for s in args.strategies.split(",") if s.strip()]
    scorer = _scorer(args)
    lms = _load_category_lms(args.category_lm or [], scorer.vocab())
    if any(c.strategy is Strategy.ADAPTIVE for c in configs) and not lms:
        raise UsageError("strategy abs needs --category-lm")
    configs = [c.with_(category_lm=lms.get(FALLBACK_LM)) for c in configs]
    rows = compare_strategies(scorer, docs, _load_profile(args.profile), configs, lms, references)

    for row in rows:
        for failure in row.failures:
            log.warning("%s: %s", row.strategy, failure)
    csv_text = rows_to_csv(rows, timing=args.timing)
    if args.out:
        out = Path(args.out)
        out.write_text(csv_text, encoding="utf-8")
        out.with_suffix(".md").write_text(rows_to_markdown(rows, timing=args.timing), encoding="utf-8")
    else:
        sys.stdout.write(csv_text)
    if rows and all(len(r.failures) == len(docs) for r in rows):
        return 1
    return 0


def cmd_make_fixtures(args) -> int:
    from .fixtures import build_components, build_fixture

    out = Path(args.out)
    (out / "corpora").mkdir(parents=True, exist_ok=True)
    (out / "lms").mkdir(exist_ok=True)
    fx = build_fixture(args.seed, n_docs=args.n_docs)
    vocab, _, lms = build_components(fx)
    (out / "generic.txt").write_text("\n".join(fx.generic) + "\n", encoding="utf-8")
    for cat, texts in fx.category_corpora.items():
        (out / "corpora" / f"{cat}.txt").write_text("\n".join(texts) + "\n", encoding="utf-8")
        lms[cat].save(out / "lms" / f"{cat}.json")
    (out / "vocab.json").write_text(_dump(vocab.to_json()), encoding="utf-8")
    fx.profile.save(out / "profile.json")
    with open(out / "docs.jsonl", "w", encoding="utf-8") as f:
        for text, ref, cat in zip(fx.docs, fx.references, fx.labels):
            f.write(json.dumps({"text": text, "reference": ref, "category": cat}, sort_keys=True) + "\n")
    return 0


def _decode_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--strategy", default="abs", help="traditional | stepwise | end | abs")
    p.add_argument("--beam-width", type=int, default=4)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--min-ratio", type=float, default=0.15)
    p.add_argument("--max-ratio", type=float, default=0.35)
    p.add_argument("--profile", help="keyword profile JSON")
    p.add_argument("--keywords", help="extra comma-separated keywords")
    p.add_argument("--category-lm", action="append", metavar="[NAME=]PATH")
    p.add_argument("--scorer-corpus", required=True, help="corpus the stand-in decoder is trained on")
    p.add_argument("--vocab", help="vocabulary JSON (required to load language models)")
    p.add_argument("--vocab-size", type=int, default=50_000)
    p.add_argument("--copy-weight", type=float, default=0.8)
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adaptive-beam", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-vocab", help="build a vocabulary from corpora")
    p.add_argument("corpus", nargs="+")
    p.add_argument("--max-size", type=int, default=50_000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_build_vocab)

    p = sub.add_parser("train-lm", help="train a bigram model on a category corpus")
    p.add_argument("corpus")
    p.add_argument("--vocab", required=True)
    p.add_argument("--name")
    p.add_argument("--out")
    p.set_defaults(func=cmd_train_lm)

    p = sub.add_parser("mine-keywords", help="most frequent content words of a corpus")
    p.add_argument("corpus")
    p.add_argument("--stopwords")
    p.add_argument("--common-words")
    p.add_argument("-k", "--k", type=int, default=DEFAULT_K)
    p.add_argument("--out")
    p.set_defaults(func=cmd_mine_keywords)

    p = sub.add_parser("summarize", help="summarize one text")
    p.add_argument("text", nargs="*")
    p.add_argument("--input", help="read the text from a file")
    p.add_argument("--report", action="store_true", help="selection report as JSON on stderr")
    _decode_flags(p)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("evaluate", help="compare strategies on a document set")
    p.add_argument("docs")
    p.add_argument("--refs", help="reference summaries, one per line")
    p.add_argument("--strategies", default="traditional,stepwise,end,abs")
    p.add_argument("--timing", action="store_true", help="fill the sec_per_char column")
    _decode_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("make-fixtures", help="write the synthetic demo dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-docs", type=int, default=100)
    p.set_defaults(func=cmd_make_fixtures)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        log.debug("failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
