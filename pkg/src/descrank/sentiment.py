"""Two-sample Kolmogorov-Smirnov machinery over sentiment polarity scores.

Polarity files are JSONL with one record per line:
    {"id": ..., "negative": p, "neutral": p, "positive": p}
where each probability lies in [0, 1] and the three sum to 1 within 1e-3;
violating records are rejected at ingestion.
"""

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Optional, Sequence

from . import jsonl
from .errors import BadAlphaError, DataError, EmptyInputError

POLARITIES = ("negative", "neutral", "positive")

SUM_TOLERANCE = 1e-3


@dataclass(frozen=True)
class PolarityRecord:
    id: str
    negative: float
    neutral: float
    positive: float

    def component(self, polarity: str) -> float:
        if polarity not in POLARITIES:
            raise ValueError(f"unknown polarity {polarity!r}")
        return getattr(self, polarity)


@dataclass
class KsResult:
    """Outcome of one two-sample KS test at a set of significance levels."""

    polarity: Optional[str]
    n_a: int
    n_b: int
    d_statistic: float
    thresholds: dict[float, float]
    decisions: dict[float, str]


class Ecdf:
    """Right-continuous empirical CDF: F(x) = #{v <= x} / n."""

    def __init__(self, values: Sequence[float]):
        if len(values) == 0:
            raise EmptyInputError("ecdf needs at least one value")
        self._sorted = sorted(float(v) for v in values)
        self._n = len(self._sorted)

    def __call__(self, x: float) -> float:
        return bisect_right(self._sorted, x) / self._n

    @property
    def n(self) -> int:
        return self._n


def ecdf(values: Sequence[float]) -> Ecdf:
    return Ecdf(values)


def ks_statistic(a: Sequence[float], b: Sequence[float]) -> float:
    """sup_x |F_a(x) - F_b(x)|, taken exactly over the union of sample
    points (both ECDFs are step functions, so the sup lives there).
    """
    fa = Ecdf(a)
    fb = Ecdf(b)
    points = set(fa._sorted)
    points.update(fb._sorted)
    return max(abs(fa(x) - fb(x)) for x in points)


def critical_value(alpha: float) -> float:
    """c(alpha) = sqrt(-ln(alpha/2) / 2) for the two-sample KS rejection rule."""
    if not (0.0 < alpha < 1.0):
        raise BadAlphaError(f"alpha must lie in (0, 1), got {alpha!r}")
    return math.sqrt(-math.log(alpha / 2.0) / 2.0)


def ks_threshold(alpha: float, n: int, m: int) -> float:
    """Rejection threshold c(alpha) * sqrt((n + m) / (n * m))."""
    if n < 1 or m < 1:
        raise EmptyInputError("both samples must be non-empty")
    return critical_value(alpha) * math.sqrt((n + m) / (n * m))


def ks_test(
    a: Sequence[float],
    b: Sequence[float],
    alphas: Sequence[float],
    polarity: Optional[str] = None,
) -> KsResult:
    """Two-sample KS test: reject the same-distribution hypothesis at level
    alpha iff D > c(alpha) * sqrt((N+M)/(N*M)).
    """
    if len(a) == 0 or len(b) == 0:
        raise EmptyInputError("both samples must be non-empty")
    if not alphas:
        raise BadAlphaError("need at least one significance level")
    d = ks_statistic(a, b)
    thresholds = {}
    decisions = {}
    for alpha in alphas:
        thr = ks_threshold(alpha, len(a), len(b))
        thresholds[alpha] = thr
        decisions[alpha] = "reject" if d > thr else "accept"
    return KsResult(
        polarity=polarity,
        n_a=len(a),
        n_b=len(b),
        d_statistic=d,
        thresholds=thresholds,
        decisions=decisions,
    )


def read_polarity_file(path) -> list[PolarityRecord]:
    """Load polarity records, rejecting any that break the probability
    bounds or the sum-to-one invariant.
    """
    records = []
    for lineno, raw in jsonl.read_records(path):
        if "id" not in raw:
            raise DataError(f"{path}:{lineno}: polarity record missing 'id'")
        values = {}
        for name in POLARITIES:
            if name not in raw:
                raise DataError(f"{path}:{lineno}: polarity record missing {name!r}")
            try:
                v = float(raw[name])
            except (TypeError, ValueError):
                raise DataError(f"{path}:{lineno}: {name} is not a number") from None
            if not (0.0 <= v <= 1.0):
                raise DataError(f"{path}:{lineno}: {name}={v!r} outside [0, 1]")
            values[name] = v
        total = sum(values.values())
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise DataError(
                f"{path}:{lineno}: polarities sum to {total!r}, not 1 within {SUM_TOLERANCE}"
            )
        records.append(PolarityRecord(id=str(raw["id"]), **values))
    if not records:
        raise EmptyInputError(f"{path}: no polarity records")
    return records
