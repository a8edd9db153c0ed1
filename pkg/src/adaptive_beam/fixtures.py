"""Synthetic SMS-style corpora with planted category keywords.

Real per-category message collections are private, so demos and tests use
this generator instead. It produces

* a generic news-like corpus to train the stand-in decoder on,
* one training corpus per category (bank, travel, otp, ads),
* a keyword profile mined from those corpora,
* evaluation messages with reference summaries.

Messages put their distinguishing content first and boilerplate last, the
way transactional SMS usually read. Identifiers and amounts are random, so
most of them are out of vocabulary and only reachable by copying.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import ReferenceScorer, Vocabulary, build_vocabulary, reference_scorer, tokenize
from .lm import BigramModel, train_bigram
from .keywords import Category, KeywordProfile, default_common_words, default_stopwords, mine_keywords

# The stand-in decoder leans on copying, as a news-trained model does on SMS.
COPY_WEIGHT = 0.8

COMMON_KEYWORDS = ("inr", "rs", "rupees", "dollars", "amount")

TRIGGERS = {
    "bank": ("txn", "acct", "debited", "credited", "bal", "neft"),
    "travel": ("pnr", "flight", "train", "boarding", "journey", "check-in"),
    "otp": ("otp", "verification", "code", "login"),
    "ads": ("offer", "buy", "shop", "sale", "discount"),
}

# (message, reference) pairs; the reference is the part a reader must see.
TEMPLATES = {
    "bank": [
        (
            "txn of inr {amt} done on acct {acct} on {date} . info : {merchant} . avbl bal : inr {amt2} . "
            "call {phone} for dispute or sms block {n} to {phone2} .",
            "txn of inr {amt} done on acct {acct} on {date}",
        ),
        (
            "your acct {acct} is debited with inr {amt} on {date} towards {merchant} . avbl bal inr {amt2} . "
            "not you ? call {phone} to report .",
            "acct {acct} debited with inr {amt} on {date}",
        ),
        (
            "rs {amt} credited to acct {acct} on {date} by neft from {name} . avbl bal rs {amt2} . "
            "download the {bank} app for more details .",
            "rs {amt} credited to acct {acct} on {date}",
        ),
    ],
    "travel": [
        (
            "dear {name} , your {airline} pnr is {pnr} flight {flight} {date} {city}-{city2} , {time} hrs . "
            "web check-in now at {url} . you can print boarding pass from units outside gate {n} .",
            "pnr is {pnr} flight {flight} {date} {city}-{city2}",
        ),
        (
            "train ticket pnr {pnr} for {date} is confirmed . coach {coach} seat {n} . journey from {city} to {city2} . "
            "carry a valid photo id . happy journey .",
            "pnr {pnr} for {date} confirmed coach {coach} seat {n}",
        ),
        (
            "flight {flight} from {city} to {city2} on {date} is delayed by {n} hours . new departure {time} hrs . "
            "we regret the inconvenience caused to you .",
            "flight {flight} delayed by {n} hours new departure {time}",
        ),
    ],
    "otp": [
        (
            "{otp} is your verification code for {service} login . valid for {n} minutes . "
            "do not share this code with anyone including staff .",
            "{otp} is your verification code for {service}",
        ),
        (
            "use otp {otp} to login to your {service} account . otp expires in {n} minutes . "
            "never share it with anyone .",
            "otp {otp} to login to {service}",
        ),
    ],
    "ads": [
        (
            "buy gated farmhouse near {city} @ {amt} lakhs . {n} min from airport . best offer price . "
            "excellent appreciation . whatsapp : {url}",
            "buy gated farmhouse near {city} @ {amt} lakhs",
        ),
        (
            "mega sale ! flat {n} % discount on all {product} this weekend . shop now at {url} . "
            "offer valid till {date} . t&c apply .",
            "sale flat {n} % discount on {product}",
        ),
    ],
    "miscellaneous": [
        (
            "hi {name} , are we still meeting at {time} near {city} cafe ? let me know soon . see you .",
            "meeting at {time} near {city} cafe",
        ),
        (
            "happy birthday {name} ! wishing you a wonderful year ahead . party at {time} tonight .",
            "happy birthday {name} party at {time}",
        ),
    ],
}

_NAMES = ["kumar", "priya", "rahul", "anita", "suresh", "meena", "arjun", "divya"]
_CITIES = ["blr", "hyd", "del", "bom", "maa", "ccu", "goa", "pune"]
_AIRLINES = ["indigo", "vistara", "spicejet", "airindia"]
_MERCHANTS = ["amazon", "swiggy", "flipkart", "uber", "zomato", "bigbasket"]
_BANKS = ["hdfc", "icici", "axis", "sbi"]
_SERVICES = ["paytm", "gpay", "netbanking", "phonepe", "irctc"]
_PRODUCTS = ["shoes", "mobiles", "laptops", "furniture", "watches"]

_NEWS_SUBJECTS = ["the government", "the minister", "officials", "the company", "the council", "police", "the report"]
_NEWS_VERBS = ["said", "announced", "confirmed", "warned", "reported", "claimed"]
_NEWS_OBJECTS = [
    "the new policy will be reviewed next week",
    "the economy grew faster than expected",
    "the match was postponed because of heavy rain",
    "the plan would cut costs across the region",
    "the investigation is still under way",
    "talks between the two sides had ended",
    "the number of cases rose again in the city",
    "the decision was made after a long meeting",
]


def _digits(rng: random.Random, k: int) -> str:
    return "".join(rng.choice("0123456789") for _ in range(k))


def _slots(rng: random.Random) -> dict[str, str]:
    return {
        "amt": f"{rng.randint(10, 99999)}.{_digits(rng, 2)}",
        "amt2": f"{rng.randint(1, 99)},{_digits(rng, 3)}.{_digits(rng, 2)}",
        "acct": "xx" + _digits(rng, 3),
        "date": f"{rng.randint(1, 28)}-{rng.choice(['jan', 'feb', 'mar', 'apr', 'dec'])}-{rng.randint(19, 23)}",
        "merchant": rng.choice(_MERCHANTS),
        "phone": "1800" + _digits(rng, 4),
        "phone2": "92" + _digits(rng, 8),
        "n": str(rng.randint(2, 60)),
        "name": rng.choice(_NAMES),
        "bank": rng.choice(_BANKS),
        "airline": rng.choice(_AIRLINES),
        "pnr": "".join(rng.choice("abcdefghjkmnpqrstuvwxyz0123456789") for _ in range(6)),
        "flight": f"6e{rng.randint(100, 999)}",
        "city": rng.choice(_CITIES),
        "city2": rng.choice(_CITIES),
        "time": f"{rng.randint(10, 23)}{rng.choice(['00', '15', '30', '45'])}",
        "url": f"http://{rng.choice(['bit.ly', 'i9f.in', 'trkk.in'])}/{_digits(rng, 5)}",
        "coach": rng.choice(["s1", "s4", "b2", "a1"]),
        "otp": _digits(rng, 6),
        "service": rng.choice(_SERVICES),
        "product": rng.choice(_PRODUCTS),
    }


def make_message(rng: random.Random, category: str) -> tuple[str, str]:
    text, ref = rng.choice(TEMPLATES[category])
    slots = _slots(rng)
    return text.format(**slots), ref.format(**slots)


def make_news(rng: random.Random) -> str:
    sentences = []
    for _ in range(rng.randint(2, 4)):
        sentences.append(f"{rng.choice(_NEWS_SUBJECTS)} {rng.choice(_NEWS_VERBS)} that {rng.choice(_NEWS_OBJECTS)} .")
    return " ".join(sentences)


@dataclass
class Fixture:
    generic: list[str]
    category_corpora: dict[str, list[str]]
    profile: KeywordProfile
    docs: list[str]
    references: list[str]
    labels: list[str]
    seed: int = 0


def build_fixture(seed: int = 0, n_docs: int = 100, per_category: int = 100, n_generic: int = 300, k: int = 30) -> Fixture:
    """Generate every fixture artifact from one seed."""
    rng = random.Random(seed)
    generic = [make_news(rng) for _ in range(n_generic)]
    corpora = {cat: [make_message(rng, cat)[0] for _ in range(per_category)] for cat in TRIGGERS}
    stop, common = default_stopwords(), default_common_words()
    categories = {}
    for cat, texts in corpora.items():
        mined = mine_keywords([tokenize(t) for t in texts], stop, common, k)
        categories[cat] = Category(frozenset(mined), frozenset(TRIGGERS[cat]))
    profile = KeywordProfile(frozenset(COMMON_KEYWORDS), categories)

    names = list(TEMPLATES)
    docs, refs, labels = [], [], []
    for i in range(n_docs):
        cat = names[i % len(names)]
        text, ref = make_message(rng, cat)
        docs.append(text)
        refs.append(ref)
        labels.append(cat)
    return Fixture(generic, corpora, profile, docs, refs, labels, seed)


def build_components(
    fx: Fixture, copy_weight: float = COPY_WEIGHT, max_vocab: int = 50_000
) -> tuple[Vocabulary, ReferenceScorer, dict[str, BigramModel]]:
    """Vocabulary over all fixture corpora, a scorer trained on the generic
    corpus and one bigram model per category."""
    generic = [tokenize(t) for t in fx.generic]
    corpora = {cat: [tokenize(t) for t in texts] for cat, texts in fx.category_corpora.items()}
    vocab = build_vocabulary(generic + [d for docs in corpora.values() for d in docs], max_vocab)
    scorer = reference_scorer(generic, vocab, copy_weight)
    lms = {cat: train_bigram(docs, vocab, name=cat) for cat, docs in corpora.items()}
    return vocab, scorer, lms
