"""Chance-corrected inter-annotator agreement coefficients.

Ratings files are CSV: a header row of rater ids, then one item per line;
an empty cell is a missing rating (allowed only for Krippendorff's alpha).
Coefficients are reported as computed; negative values are meaningful
(agreement below chance) and are never clamped.
"""

import csv
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

from .errors import (
    DataError,
    DegenerateChanceError,
    EmptyInputError,
    InsufficientDataError,
    MissingCellsError,
    UnequalRatersError,
    WrongRaterCountError,
)

KIND_COHEN = "cohen_kappa"
KIND_SCOTT = "scott_pi"
KIND_BENNETT = "bennett_s"

LEVEL_NOMINAL = "nominal"
LEVEL_INTERVAL = "interval"


@dataclass
class RatingsMatrix:
    """Items-by-raters ratings; None marks a missing cell.

    Values may be nominal labels or numbers. n_categories defaults to the
    number of distinct observed values and may be declared larger (it feeds
    Bennett's S).
    """

    rows: list[list[Optional[object]]]
    rater_ids: list[str] = field(default_factory=list)
    n_categories: Optional[int] = None

    def __post_init__(self):
        if not self.rows:
            raise EmptyInputError("ratings matrix has no items")
        width = len(self.rows[0])
        if width < 2:
            raise DataError("ratings matrix needs at least 2 raters")
        if any(len(row) != width for row in self.rows):
            raise DataError("ragged ratings matrix: rows differ in width")
        if not self.rater_ids:
            self.rater_ids = [f"r{i + 1}" for i in range(width)]
        elif len(self.rater_ids) != width:
            raise DataError("rater_ids length does not match row width")
        observed = self.categories()
        if self.n_categories is None:
            self.n_categories = len(observed)
        elif self.n_categories < len(observed):
            raise DataError(
                f"declared n_categories={self.n_categories} but "
                f"{len(observed)} distinct values observed"
            )

    @property
    def n_items(self) -> int:
        return len(self.rows)

    @property
    def n_raters(self) -> int:
        return len(self.rows[0])

    def categories(self) -> list:
        seen = {v for row in self.rows for v in row if v is not None}
        return sorted(seen, key=lambda v: (str(type(v)), str(v)))

    def has_missing(self) -> bool:
        return any(v is None for row in self.rows for v in row)

    def column_pair(self, i: int, j: int) -> "RatingsMatrix":
        """Two-rater sub-matrix over the items both raters rated."""
        rows = [
            [row[i], row[j]]
            for row in self.rows
            if row[i] is not None and row[j] is not None
        ]
        if not rows:
            raise InsufficientDataError(
                f"raters {self.rater_ids[i]} and {self.rater_ids[j]} share no items"
            )
        return RatingsMatrix(
            rows,
            [self.rater_ids[i], self.rater_ids[j]],
            n_categories=self.n_categories,
        )


def _require_two_complete_raters(matrix: RatingsMatrix) -> None:
    if matrix.n_raters != 2:
        raise WrongRaterCountError(
            f"need exactly 2 raters, got {matrix.n_raters}"
        )
    if matrix.has_missing():
        raise MissingCellsError("missing ratings are not allowed here")


def observed_agreement(matrix: RatingsMatrix) -> float:
    """Raw fraction of items on which two raters gave the same rating."""
    _require_two_complete_raters(matrix)
    hits = sum(1 for a, b in matrix.rows if a == b)
    return hits / matrix.n_items


def pairwise_agreement(matrix: RatingsMatrix, kind: str) -> float:
    """Two-rater chance-corrected agreement (P_o - P_e) / (1 - P_e).

    kind selects the chance model: cohen_kappa uses the product of the two
    raters' marginals, scott_pi the squared pooled marginals, bennett_s the
    uniform 1/n_categories. Returns 1 whenever P_o = 1; raises
    DegenerateChanceError when P_e = 1 with P_o < 1.
    """
    _require_two_complete_raters(matrix)
    p_o = observed_agreement(matrix)
    n = matrix.n_items
    if kind == KIND_COHEN:
        left = Counter(a for a, _ in matrix.rows)
        right = Counter(b for _, b in matrix.rows)
        p_e = sum(left[c] / n * right.get(c, 0) / n for c in left)
    elif kind == KIND_SCOTT:
        pooled = Counter(v for row in matrix.rows for v in row)
        p_e = sum((cnt / (2 * n)) ** 2 for cnt in pooled.values())
    elif kind == KIND_BENNETT:
        p_e = 1.0 / matrix.n_categories
    else:
        raise ValueError(f"unknown agreement kind: {kind!r}")
    if p_o == 1.0:
        return 1.0
    if p_e == 1.0:
        raise DegenerateChanceError(
            f"{kind}: chance agreement is 1, coefficient undefined"
        )
    return (p_o - p_e) / (1.0 - p_e)


def fleiss_kappa(matrix: RatingsMatrix) -> float:
    """Fleiss' kappa for any number of raters with equal raters per item."""
    if matrix.has_missing():
        raise UnequalRatersError("items have differing rater counts")
    r = matrix.n_raters
    n_items = matrix.n_items
    per_item = [Counter(row) for row in matrix.rows]
    totals: Counter = Counter()
    p_bar = 0.0
    for counts in per_item:
        p_bar += (sum(c * c for c in counts.values()) - r) / (r * (r - 1))
        totals.update(counts)
    p_bar /= n_items
    p_e = sum((cnt / (n_items * r)) ** 2 for cnt in totals.values())
    if p_e == 1.0:
        raise DegenerateChanceError(
            "fleiss_kappa: a single category is used everywhere"
        )
    return (p_bar - p_e) / (1.0 - p_e)


def _interval_value(v) -> float:
    try:
        return float(v)
    except (TypeError, ValueError):
        raise DataError(
            f"interval agreement needs numeric ratings, got {v!r}"
        ) from None


def krippendorff_alpha(matrix: RatingsMatrix, level: str = LEVEL_NOMINAL) -> float:
    """Krippendorff's alpha = 1 - D_o / D_e over the coincidence matrix.

    Missing ratings are allowed; items with fewer than two ratings carry no
    pairable values. level is "nominal" (disagreement 0/1) or "interval"
    (squared difference of numeric ratings).
    """
    if level == LEVEL_NOMINAL:
        delta2 = lambda a, b: 0.0 if a == b else 1.0
        units = [[v for v in row if v is not None] for row in matrix.rows]
    elif level == LEVEL_INTERVAL:
        delta2 = lambda a, b: (a - b) ** 2
        units = [
            [_interval_value(v) for v in row if v is not None]
            for row in matrix.rows
        ]
    else:
        raise ValueError(f"unknown level: {level!r}")
    units = [u for u in units if len(u) >= 2]
    if len(units) < 2:
        raise InsufficientDataError(
            "need at least 2 items with at least 2 ratings each"
        )

    totals: Counter = Counter()
    observed_sum = 0.0
    n = 0
    for unit in units:
        m = len(unit)
        counts = Counter(unit)
        totals.update(counts)
        n += m
        within = 0.0
        values = list(counts.items())
        for idx, (v, cv) in enumerate(values):
            for w, cw in values[idx + 1 :]:
                within += 2.0 * cv * cw * delta2(v, w)
        observed_sum += within / (m - 1)
    d_o = observed_sum / n

    expected_sum = 0.0
    pooled = list(totals.items())
    for idx, (v, cv) in enumerate(pooled):
        for w, cw in pooled[idx + 1 :]:
            expected_sum += 2.0 * cv * cw * delta2(v, w)
    d_e = expected_sum / (n * (n - 1))
    if d_e == 0.0:
        raise DegenerateChanceError(
            "krippendorff_alpha: expected disagreement is 0"
        )
    return 1.0 - d_o / d_e


COEFFICIENTS = (
    "cohen_kappa",
    "scott_pi",
    "bennett_s",
    "fleiss_kappa",
    "krippendorff_alpha_nominal",
    "krippendorff_alpha_interval",
)


def report_agreement(matrix: RatingsMatrix) -> dict[str, object]:
    """All six coefficients for one ratings matrix.

    With more than two raters the two-rater coefficients are averaged over
    all rater pairs (each pair restricted to its co-rated items). Entries
    that cannot be computed carry a reason string instead of a number.
    """
    results: dict[str, object] = {}

    def mean_over_pairs(kind: str):
        values = []
        for i, j in combinations(range(matrix.n_raters), 2):
            values.append(pairwise_agreement(matrix.column_pair(i, j), kind))
        return sum(values) / len(values)

    for kind in (KIND_COHEN, KIND_SCOTT, KIND_BENNETT):
        try:
            results[kind] = mean_over_pairs(kind)
        except (DataError, DegenerateChanceError) as exc:
            results[kind] = f"n/a ({exc})"
    try:
        results["fleiss_kappa"] = fleiss_kappa(matrix)
    except (DataError, DegenerateChanceError) as exc:
        results["fleiss_kappa"] = f"n/a ({exc})"
    for level, key in (
        (LEVEL_NOMINAL, "krippendorff_alpha_nominal"),
        (LEVEL_INTERVAL, "krippendorff_alpha_interval"),
    ):
        try:
            results[key] = krippendorff_alpha(matrix, level)
        except (DataError, DegenerateChanceError) as exc:
            results[key] = f"n/a ({exc})"
    return results


def read_ratings_file(path) -> RatingsMatrix:
    """Load a ratings CSV (header of rater ids, one item per row)."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyInputError(f"{path}: empty ratings file") from None
        rows: list[list[Optional[object]]] = []
        for lineno, cells in enumerate(reader, start=2):
            if not cells or all(not c.strip() for c in cells):
                continue
            if len(cells) != len(header):
                raise DataError(
                    f"{path}:{lineno}: expected {len(header)} cells, got {len(cells)}"
                )
            rows.append([c.strip() if c.strip() else None for c in cells])
    if not rows:
        raise EmptyInputError(f"{path}: no rating rows")
    return RatingsMatrix(rows, [h.strip() for h in header])
