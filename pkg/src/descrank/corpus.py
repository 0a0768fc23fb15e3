"""Corpus construction: preprocessing, validation, collection, splits, stats.

A dataset is a JSONL file with one sample per line; field names match the
Sample dataclass. Splits write train.jsonl / validation.jsonl / test.jsonl
plus a manifest.json recording mode, ratios and seed.
"""

import random
import re
import unicodedata
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from . import jsonl
from .errors import (
    BadRatiosError,
    DataError,
    EmptyInputError,
    NotFoundError,
    SourceExhaustedError,
    TopicExhaustionError,
)
from .metrics import rouge_l, rouge_n, tokenize

QID_RE = re.compile(r"^Q[1-9][0-9]*$")

MIN_PARAGRAPH_TOKENS = 10

# Item topics that never carry a usable article; skipped during collection.
EXCLUDED_TOPICS = frozenset(
    {"scholarly article", "wikimedia disambiguation page", "wikinews article"}
)

MODE_EXCLUSIVE = "topic-exclusive"
MODE_INDEPENDENT = "topic-independent"

DEFAULT_PREFIX_LENGTHS = (32, 64, 128, 256, 512, 1024)

REJECT_EMPTY_DESCRIPTION = "empty_description"
REJECT_SHORT_PARAGRAPH = "short_paragraph"
REJECT_REDIRECT = "redirect"

_SAMPLE_FIELDS = (
    "qid",
    "label",
    "description",
    "instances",
    "title",
    "paragraph",
    "first_sentence",
)

# Curly quotation marks folded to their straight ASCII forms.
_QUOTE_TABLE = str.maketrans(
    {
        "“": '"',
        "”": '"',
        "„": '"',
        "‟": '"',
        "‘": "'",
        "’": "'",
        "‚": "'",
        "‛": "'",
    }
)

_ZERO_WIDTH = frozenset("​‌‍⁠﻿")
_WHITESPACE_CONTROLS = frozenset("\t\n\r\x0b\x0c")

# A period after these words (lowercased, leading punctuation ignored) does
# not end a sentence.
_ABBREVIATIONS = frozenset(
    {
        "mr", "mrs", "ms", "dr", "st", "prof", "sr", "jr", "vs", "etc",
        "e.g", "i.e", "cf", "no", "vol", "fig", "inc", "ltd", "co",
    }
)

_BOUNDARY_RE = re.compile(r"[.!?] ")


@dataclass
class Sample:
    """One paragraph-to-description pair with its catalog metadata."""

    qid: str
    label: str
    description: str
    instances: list[str]
    title: str
    paragraph: str
    first_sentence: str

    def to_record(self) -> dict:
        return {name: getattr(self, name) for name in _SAMPLE_FIELDS}

    @classmethod
    def from_record(cls, record: dict) -> "Sample":
        missing = [name for name in _SAMPLE_FIELDS if name not in record]
        if missing:
            raise DataError(f"sample record missing fields: {', '.join(missing)}")
        if not isinstance(record["instances"], list) or not all(
            isinstance(t, str) for t in record["instances"]
        ):
            raise DataError("sample field 'instances' must be a list of strings")
        for name in _SAMPLE_FIELDS:
            if name != "instances" and not isinstance(record[name], str):
                raise DataError(f"sample field {name!r} must be a string")
        return cls(**{name: record[name] for name in _SAMPLE_FIELDS})


@dataclass
class DatasetSplit:
    train: list[Sample]
    validation: list[Sample]
    test: list[Sample]
    mode: str
    ratios: tuple[float, float, float]
    seed: int


@dataclass
class CorpusStats:
    avg_doc_len: float
    avg_summ_len: float
    compression_ratio: float
    vocab_size: int
    instance_histogram: dict[str, int]


@dataclass(frozen=True)
class PrefixOverlap:
    """Mean overlap precision of descriptions against paragraph prefixes."""

    length: int
    rouge1_precision: float
    rouge2_precision: float
    rougel_precision: float


def preprocess(text: str) -> str:
    """Normalize raw text: fold curly quotes to straight ones, drop control
    and zero-width characters, collapse whitespace runs to single spaces and
    trim the ends. Idempotent; all other Unicode is preserved.
    """
    text = text.translate(_QUOTE_TABLE)
    text = "".join(
        ch
        for ch in text
        if ch not in _ZERO_WIDTH
        and (unicodedata.category(ch) != "Cc" or ch in _WHITESPACE_CONTROLS)
    )
    return " ".join(text.split())


def _word_before(text: str, index: int) -> str:
    """The whitespace-delimited word ending at text[index] (exclusive of the
    final period), lowercased and stripped of leading punctuation.
    """
    start = index
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    word = text[start:index].lower()
    return word.lstrip("\"'([{<«")


def extract_first_sentence(paragraph: str) -> str:
    """First sentence of a normalized paragraph.

    A boundary is '.', '!' or '?' followed by a space and an uppercase
    letter or digit. A period does not bound when the word before it is a
    single capital initial or a known abbreviation, so strings like
    "by S. R. Kaplan" stay intact. Without a boundary the whole paragraph
    is the sentence.
    """
    if not paragraph:
        raise EmptyInputError("cannot extract a sentence from empty text")
    for match in _BOUNDARY_RE.finditer(paragraph):
        idx = match.start()
        nxt = paragraph[match.end()]
        if not (nxt.isupper() or nxt.isdigit()):
            continue
        if paragraph[idx] == ".":
            word = _word_before(paragraph, idx)
            if len(word) == 1 and word.isalpha():
                continue
            if word in _ABBREVIATIONS:
                continue
        return paragraph[: idx + 1]
    return paragraph


def validate_sample(sample: Sample, is_redirect: bool = False):
    """Gate a candidate sample. Returns (accepted, reason); reason names the
    first failed rule (empty_description, short_paragraph, redirect) or is
    None on acceptance.
    """
    if not sample.description.strip():
        return False, REJECT_EMPTY_DESCRIPTION
    if len(tokenize(sample.paragraph)) < MIN_PARAGRAPH_TOKENS:
        return False, REJECT_SHORT_PARAGRAPH
    if is_redirect:
        return False, REJECT_REDIRECT
    return True, None


def baseline_description(sample: Sample) -> Optional[str]:
    """The no-model baseline: the first instance topic, if any."""
    return sample.instances[0] if sample.instances else None


def _build_sample(client, numeric_id: int, excluded: frozenset) -> Optional[Sample]:
    qid = f"Q{numeric_id}"
    try:
        entity = client.fetch_entity(qid)
    except NotFoundError:
        return None
    if entity.sitelink_title is None:
        return None
    if any(topic.lower() in excluded for topic in entity.instances):
        return None
    try:
        intro = client.fetch_article_intro(entity.sitelink_title)
    except NotFoundError:
        return None
    paragraph = preprocess(intro.first_paragraph)
    if not paragraph:
        return None
    sample = Sample(
        qid=qid,
        label=entity.label,
        description=preprocess(entity.description),
        instances=list(entity.instances),
        title=intro.title,
        paragraph=paragraph,
        first_sentence=extract_first_sentence(paragraph),
    )
    accepted, _ = validate_sample(sample, is_redirect=intro.is_redirect)
    return sample if accepted else None


def collect(
    client,
    n: int,
    seed: int,
    excluded_topics: Iterable[str] = EXCLUDED_TOPICS,
) -> list[Sample]:
    """Collect n validated samples by drawing random numeric ids.

    Live mode draws uniformly from [1, 99,000,000]; fixture mode draws
    uniformly from the fixture's id pool so exhaustion is detectable and
    raises SourceExhaustedError. Already-scanned ids are never redrawn, so
    no qid appears twice. Fetches run concurrently up to the client's
    in-flight cap; sample order follows draw order.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    excluded = frozenset(t.lower() for t in excluded_topics)
    rng = random.Random(seed)
    scanned: set[int] = set()
    samples: list[Sample] = []

    fixture_qids = getattr(client, "fixture_qids", None)
    pool: Optional[list[int]] = None
    if fixture_qids is not None:
        pool = sorted(int(q[1:]) for q in fixture_qids)

    batch_size = max(1, getattr(client, "max_in_flight", 8))

    def draw_batch() -> list[int]:
        batch: list[int] = []
        while len(batch) < batch_size:
            if pool is not None:
                remaining = [i for i in pool if i not in scanned]
                if not remaining:
                    break
                numeric = remaining[rng.randrange(len(remaining))]
            else:
                numeric = rng.randint(1, 99_000_000)
                if numeric in scanned:
                    continue
            scanned.add(numeric)
            batch.append(numeric)
        return batch

    executor: Optional[ThreadPoolExecutor] = None
    if pool is None:
        executor = ThreadPoolExecutor(max_workers=batch_size)
    try:
        while len(samples) < n:
            batch = draw_batch()
            if not batch:
                raise SourceExhaustedError(
                    f"fixture exhausted after {len(samples)} of {n} samples"
                )
            if executor is None:
                outcomes = [_build_sample(client, i, excluded) for i in batch]
            else:
                outcomes = list(
                    executor.map(lambda i: _build_sample(client, i, excluded), batch)
                )
            for outcome in outcomes:
                if outcome is not None and len(samples) < n:
                    samples.append(outcome)
    finally:
        if executor is not None:
            executor.shutdown(wait=False)
    return samples


def _check_ratios(ratios) -> tuple[float, float, float]:
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3:
        raise BadRatiosError(f"need exactly 3 ratios, got {len(ratios)}")
    if any(r < 0 for r in ratios):
        raise BadRatiosError(f"ratios must be non-negative: {ratios}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise BadRatiosError(f"ratios must sum to 1, got {sum(ratios)!r}")
    return ratios


def _topic_of(sample: Sample) -> str:
    return sample.instances[0]


def split(
    samples: Sequence[Sample],
    mode: str,
    ratios,
    seed: int,
) -> DatasetSplit:
    """Partition a dataset into train/validation/test.

    topic-independent shuffles samples and cuts at the ratios (samples with
    no instances are kept). topic-exclusive assigns whole topics (first
    instance): the most frequent topics fill train up to its ratio, the
    leftover topics are shuffled and each goes to whichever of validation/
    test is further below target; samples with no instances are dropped.
    Raises TopicExhaustionError when three non-empty topic-disjoint sets
    cannot be formed.
    """
    ratios = _check_ratios(ratios)
    if mode not in (MODE_EXCLUSIVE, MODE_INDEPENDENT):
        raise ValueError(f"unknown split mode: {mode!r}")
    if not samples:
        raise EmptyInputError("cannot split an empty dataset")
    rng = random.Random(seed)

    if mode == MODE_INDEPENDENT:
        order = list(samples)
        rng.shuffle(order)
        total = len(order)
        n_train = round(ratios[0] * total)
        n_val = round(ratios[1] * total)
        train = order[:n_train]
        validation = order[n_train : n_train + n_val]
        test = order[n_train + n_val :]
        return DatasetSplit(train, validation, test, mode, ratios, seed)

    kept = [s for s in samples if s.instances]
    if not kept:
        raise TopicExhaustionError("no samples carry instance topics")
    groups: dict[str, list[Sample]] = {}
    for s in kept:
        groups.setdefault(_topic_of(s), []).append(s)
    topics = sorted(groups, key=lambda t: (-len(groups[t]), t))
    if len(topics) < 3:
        raise TopicExhaustionError(
            f"need at least 3 distinct topics for an exclusive split, got {len(topics)}"
        )

    total = len(kept)
    train_target = ratios[0] * total
    train_topics: set[str] = set()
    train_count = 0
    idx = 0
    while idx < len(topics) and train_count < train_target:
        topic = topics[idx]
        train_topics.add(topic)
        train_count += len(groups[topic])
        idx += 1
    leftover = topics[idx:]
    if len(leftover) < 2:
        raise TopicExhaustionError(
            "not enough topics left for validation and test after filling train"
        )

    rng.shuffle(leftover)
    remaining_total = total - train_count
    tail = ratios[1] + ratios[2]
    val_target = remaining_total * (ratios[1] / tail) if tail > 0 else 0.0
    test_target = remaining_total - val_target
    val_topics: set[str] = set()
    test_topics: set[str] = set()
    val_count = test_count = 0
    for topic in leftover:
        if val_target - val_count >= test_target - test_count:
            val_topics.add(topic)
            val_count += len(groups[topic])
        else:
            test_topics.add(topic)
            test_count += len(groups[topic])

    if not val_topics or not test_topics or not train_topics:
        raise TopicExhaustionError("cannot fill three non-empty sets at these ratios")

    train, validation, test = [], [], []
    for s in kept:
        topic = _topic_of(s)
        if topic in train_topics:
            train.append(s)
        elif topic in val_topics:
            validation.append(s)
        else:
            test.append(s)
    return DatasetSplit(train, validation, test, mode, ratios, seed)


def corpus_stats(samples: Sequence[Sample]) -> CorpusStats:
    """Token-level statistics. Token counts exclude punctuation-only tokens
    (the tokenizer drops them); compression_ratio is the exact quotient of
    the mean paragraph length by the mean description length.
    """
    if not samples:
        raise EmptyInputError("corpus_stats needs at least one sample")
    vocabulary: set[str] = set()
    doc_total = 0
    summ_total = 0
    histogram: Counter = Counter()
    for s in samples:
        doc_tokens = tokenize(s.paragraph)
        summ_tokens = tokenize(s.description)
        doc_total += len(doc_tokens)
        summ_total += len(summ_tokens)
        vocabulary.update(doc_tokens)
        vocabulary.update(summ_tokens)
        if s.instances:
            histogram[s.instances[0]] += 1
    n = len(samples)
    avg_doc = doc_total / n
    avg_summ = summ_total / n
    if avg_summ == 0:
        raise DataError("descriptions contain no countable tokens")
    return CorpusStats(
        avg_doc_len=avg_doc,
        avg_summ_len=avg_summ,
        compression_ratio=avg_doc / avg_summ,
        vocab_size=len(vocabulary),
        instance_histogram=dict(histogram),
    )


def prefix_overlap(
    samples: Sequence[Sample],
    lengths: Sequence[int] = DEFAULT_PREFIX_LENGTHS,
) -> list[PrefixOverlap]:
    """Mean ROUGE-1/2/L precision of each description against its paragraph
    truncated to the first L tokens, for each L in lengths. Precision here
    is relative to the description's grams, so growing the prefix can only
    help: rows are non-decreasing in L.
    """
    if not samples:
        raise EmptyInputError("prefix_overlap needs at least one sample")
    if not lengths:
        raise EmptyInputError("prefix_overlap needs at least one prefix length")
    if any(length < 1 for length in lengths):
        raise ValueError("prefix lengths must be >= 1")
    pairs = [(tokenize(s.description), tokenize(s.paragraph)) for s in samples]
    n = len(pairs)
    rows = []
    for length in lengths:
        sum1 = sum2 = suml = 0.0
        for cand, para in pairs:
            ref = para[:length]
            sum1 += rouge_n(cand, ref, 1).precision
            sum2 += rouge_n(cand, ref, 2).precision
            suml += rouge_l(cand, ref).precision
        rows.append(PrefixOverlap(length, sum1 / n, sum2 / n, suml / n))
    return rows


def read_dataset(path) -> list[Sample]:
    """Load and strictly validate a dataset JSONL file."""
    samples = []
    for lineno, record in jsonl.read_records(path):
        try:
            sample = Sample.from_record(record)
        except DataError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from exc
        if not QID_RE.match(sample.qid):
            raise DataError(f"{path}:{lineno}: bad qid {sample.qid!r}")
        if not sample.description.strip():
            raise DataError(f"{path}:{lineno}: empty description")
        if len(tokenize(sample.paragraph)) < MIN_PARAGRAPH_TOKENS:
            raise DataError(
                f"{path}:{lineno}: paragraph shorter than {MIN_PARAGRAPH_TOKENS} tokens"
            )
        samples.append(sample)
    if not samples:
        raise EmptyInputError(f"{path}: dataset is empty")
    return samples


def write_dataset(path, samples: Iterable[Sample]) -> None:
    jsonl.write_records(path, (s.to_record() for s in samples))


def write_split(outdir, dataset_split: DatasetSplit) -> None:
    """Write train/validation/test JSONL files plus manifest.json."""
    import json
    import os

    os.makedirs(outdir, exist_ok=True)
    parts = {
        "train": dataset_split.train,
        "validation": dataset_split.validation,
        "test": dataset_split.test,
    }
    for name, part in parts.items():
        write_dataset(os.path.join(outdir, f"{name}.jsonl"), part)
    manifest = {
        "mode": dataset_split.mode,
        "ratios": list(dataset_split.ratios),
        "seed": dataset_split.seed,
        "counts": {name: len(part) for name, part in parts.items()},
    }
    with open(os.path.join(outdir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, ensure_ascii=False, indent=2)
        fh.write("\n")
