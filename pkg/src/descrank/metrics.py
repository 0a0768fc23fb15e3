"""Lexical overlap metrics over normalized token sequences.

All scores are fractions in [0, 1]; multiply by 100 only at the
presentation layer. The n-gram and LCS inner loops run on the selected
kernel backend (see descrank._kernels).
"""

import math
import string
from dataclasses import dataclass
from typing import Optional, Sequence

from ._kernels import clipped_ngram_overlap, lcs_length
from .errors import EmptyInputError

# Characters stripped from token edges. ASCII punctuation plus the common
# typographic marks that survive preprocessing (quotes stay straight after
# preprocess(), but tokenize() must behave on raw text too).
_PUNCT_CHARS = string.punctuation + "“”‘’«»„‚…–—¡¿"


@dataclass(frozen=True)
class MetricScore:
    """Precision/recall/F triple for one candidate-reference pair."""

    precision: float
    recall: float
    f_measure: float


_ZERO_SCORE = MetricScore(0.0, 0.0, 0.0)


def _f_measure(precision, recall):
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def tokenize(text: str) -> list[str]:
    """Normalize text to tokens: split on whitespace, strip punctuation
    from token edges, lowercase, drop tokens that were pure punctuation.
    """
    tokens = []
    for raw in text.split():
        tok = raw.strip(_PUNCT_CHARS).lower()
        if tok:
            tokens.append(tok)
    return tokens


def _encode_pair(a: Sequence[str], b: Sequence[str]):
    """Map two token sequences onto a shared compact integer vocabulary."""
    ids: dict[str, int] = {}
    enc_a = [ids.setdefault(t, len(ids)) for t in a]
    enc_b = [ids.setdefault(t, len(ids)) for t in b]
    return enc_a, enc_b


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int) -> MetricScore:
    """ROUGE-N with clipped n-gram counts.

    precision = clipped matches / candidate n-grams,
    recall    = clipped matches / reference n-grams.
    If either side has no n-grams of order n, every field is 0.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    enc_a, enc_b = _encode_pair(candidate, reference)
    overlap, count_cand, count_ref = clipped_ngram_overlap(enc_a, enc_b, n)
    if count_cand == 0 or count_ref == 0:
        return _ZERO_SCORE
    precision = overlap / count_cand
    recall = overlap / count_ref
    return MetricScore(precision, recall, _f_measure(precision, recall))


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> MetricScore:
    """ROUGE-L from the longest common subsequence.

    precision = LCS / len(candidate), recall = LCS / len(reference).
    Either side empty -> every field is 0.
    """
    if not candidate or not reference:
        return _ZERO_SCORE
    enc_a, enc_b = _encode_pair(candidate, reference)
    lcs = lcs_length(enc_a, enc_b)
    precision = lcs / len(candidate)
    recall = lcs / len(reference)
    return MetricScore(precision, recall, _f_measure(precision, recall))


def bleu(candidate: Sequence[str], reference: Sequence[str], max_n: int = 4) -> float:
    """Sentence BLEU: geometric mean of clipped n-gram precisions for
    n = 1..max_n, times the brevity penalty exp(1 - r/c) when c < r.

    Orders n >= 2 get add-one smoothing when their clipped match count is
    zero ((matches+1)/(total+1)); a zero unigram precision keeps BLEU at 0.
    """
    if max_n < 1:
        raise ValueError(f"max_n must be >= 1, got {max_n}")
    c = len(candidate)
    r = len(reference)
    if c == 0:
        return 0.0
    enc_a, enc_b = _encode_pair(candidate, reference)
    log_sum = 0.0
    for n in range(1, max_n + 1):
        overlap, total, _ = clipped_ngram_overlap(enc_a, enc_b, n)
        if n == 1:
            if overlap == 0:
                return 0.0
            p = overlap / total
        elif overlap > 0:
            p = overlap / total
        else:
            p = (overlap + 1) / (total + 1)
        log_sum += math.log(p)
    geo_mean = math.exp(log_sum / max_n)
    brevity = 1.0 if c >= r else math.exp(1.0 - r / c)
    return brevity * geo_mean


def flag_repetition(
    text: str, n: int = 1, threshold: int = 3
) -> tuple[bool, Optional[str]]:
    """Detect degenerate repetition: the same n-gram occurring `threshold`
    or more times back to back. Returns (flagged, offending n-gram or None).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if threshold < 2:
        raise ValueError(f"threshold must be >= 2, got {threshold}")
    tokens = tokenize(text)
    limit = len(tokens) - n + 1
    for start in range(max(0, limit)):
        block = tokens[start : start + n]
        run = 1
        pos = start + n
        while tokens[pos : pos + n] == block:
            run += 1
            pos += n
        if run >= threshold:
            return True, " ".join(block)
    return False, None


def corpus_mean(scores: Sequence[MetricScore]) -> MetricScore:
    """Arithmetic mean of each field over a non-empty score list."""
    if not scores:
        raise EmptyInputError("corpus_mean needs at least one score")
    k = len(scores)
    return MetricScore(
        sum(s.precision for s in scores) / k,
        sum(s.recall for s in scores) / k,
        sum(s.f_measure for s in scores) / k,
    )
