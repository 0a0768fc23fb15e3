"""Candidate-description scoring, reranking and projection training.

A candidate file is JSONL, one set per line:
    {"id": ..., "paragraph": ..., "gold": ..., "candidates": [...]}
Embeddings are JSONL {"id": ..., "vector": [...]}; ids may be the literal
text or its sha256 hex (content-hash ids), and lookups try both.

Scoring modes: "cosine" (clamped cosine of embeddings, optionally through a
learned square projection), "rouge1" (ROUGE-1 F), "fused" (harmonic mean of
the two). Candidates are ranked against the paragraph; the margin ranking
loss combines a gold-vs-candidate hinge with pairwise candidate-order
hinges whose margin grows with rank distance.
"""

import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from . import jsonl
from .errors import (
    DataError,
    DimensionMismatchError,
    EmptyInputError,
    MissingEmbeddingError,
    NonFiniteLossError,
    ZeroVectorError,
)
from .metrics import rouge_n, tokenize

MODE_COSINE = "cosine"
MODE_ROUGE1 = "rouge1"
MODE_FUSED = "fused"
MODES = (MODE_COSINE, MODE_ROUGE1, MODE_FUSED)

FORM_PAIRWISE = "pairwise"
FORM_POSITIONAL = "positional"

DEFAULT_LAMBDA = 0.01


@dataclass
class CandidateSet:
    """One reranking instance: a paragraph, its gold description, and the
    externally generated candidate descriptions in generation order."""

    id: str
    paragraph: str
    gold: str
    candidates: list[str]

    def __post_init__(self):
        if not self.candidates:
            raise DataError(f"candidate set {self.id!r} has no candidates")

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "paragraph": self.paragraph,
            "gold": self.gold,
            "candidates": list(self.candidates),
        }

    @classmethod
    def from_record(cls, record: dict) -> "CandidateSet":
        for name in ("id", "paragraph", "gold", "candidates"):
            if name not in record:
                raise DataError(f"candidate set record missing {name!r}")
        cands = record["candidates"]
        if not isinstance(cands, list) or not all(isinstance(c, str) for c in cands):
            raise DataError("'candidates' must be a list of strings")
        return cls(
            id=str(record["id"]),
            paragraph=record["paragraph"],
            gold=record["gold"],
            candidates=list(cands),
        )


class EmbeddingTable:
    """Fixed-dimension text embeddings keyed by id or content hash."""

    def __init__(self, dim: int):
        if dim < 1:
            raise DataError(f"embedding dimension must be >= 1, got {dim}")
        self.dim = dim
        self._vectors: dict[str, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self._vectors)

    def __contains__(self, key: str) -> bool:
        return key in self._vectors

    @staticmethod
    def text_key(text: str) -> str:
        """Content-hash id for a text: sha256 hex of its UTF-8 bytes."""
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def add(self, key: str, vector) -> None:
        vec = np.asarray(vector, dtype=np.float64)
        if vec.ndim != 1 or vec.shape[0] != self.dim:
            raise DimensionMismatchError(
                f"embedding {key!r} has shape {vec.shape}, expected ({self.dim},)"
            )
        if not np.all(np.isfinite(vec)):
            raise DataError(f"embedding {key!r} contains non-finite values")
        self._vectors[key] = vec

    def add_text(self, text: str, vector) -> None:
        self.add(self.text_key(text), vector)

    def vector_for_text(self, text: str) -> np.ndarray:
        """Look up a text's vector: literal id first, then sha256 hash."""
        vec = self._vectors.get(text)
        if vec is None:
            vec = self._vectors.get(self.text_key(text))
        if vec is None:
            preview = text if len(text) <= 60 else text[:57] + "..."
            raise MissingEmbeddingError(f"no embedding for text {preview!r}")
        return vec

    @classmethod
    def load(cls, path) -> "EmbeddingTable":
        table: Optional[EmbeddingTable] = None
        for lineno, record in jsonl.read_records(path):
            if "id" not in record or "vector" not in record:
                raise DataError(f"{path}:{lineno}: embedding record needs id and vector")
            vector = record["vector"]
            if not isinstance(vector, list):
                raise DataError(f"{path}:{lineno}: vector must be a list")
            if table is None:
                table = cls(len(vector))
            try:
                table.add(str(record["id"]), vector)
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
        if table is None:
            raise EmptyInputError(f"{path}: no embedding records")
        return table


@dataclass
class ScorerParams:
    """Learned square projection plus the two loss margins."""

    projection: np.ndarray
    lambda_gold: float = DEFAULT_LAMBDA
    lambda_candidate: float = DEFAULT_LAMBDA

    def __post_init__(self):
        self.projection = np.asarray(self.projection, dtype=np.float64)
        if self.projection.ndim != 2 or self.projection.shape[0] != self.projection.shape[1]:
            raise DataError(
                f"projection must be square, got shape {self.projection.shape}"
            )

    @property
    def dim(self) -> int:
        return self.projection.shape[0]

    @classmethod
    def initialize(
        cls,
        dim: int,
        seed: int,
        noise: float = 0.01,
        lambda_gold: float = DEFAULT_LAMBDA,
        lambda_candidate: float = DEFAULT_LAMBDA,
    ) -> "ScorerParams":
        """Identity projection plus Gaussian noise with the given scale."""
        rng = np.random.default_rng(seed)
        projection = np.eye(dim) + rng.normal(0.0, noise, size=(dim, dim))
        return cls(projection, lambda_gold, lambda_candidate)

    def to_record(self) -> dict:
        return {
            "dim": self.dim,
            "projection": [float(x) for x in self.projection.ravel()],
            "lambda_gold": self.lambda_gold,
            "lambda_candidate": self.lambda_candidate,
        }

    @classmethod
    def from_record(cls, record: dict) -> "ScorerParams":
        for name in ("dim", "projection"):
            if name not in record:
                raise DataError(f"params record missing {name!r}")
        dim = int(record["dim"])
        flat = record["projection"]
        if len(flat) != dim * dim:
            raise DataError(
                f"projection has {len(flat)} entries, expected {dim * dim}"
            )
        projection = np.asarray(flat, dtype=np.float64).reshape(dim, dim)
        return cls(
            projection,
            float(record.get("lambda_gold", DEFAULT_LAMBDA)),
            float(record.get("lambda_candidate", DEFAULT_LAMBDA)),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.to_record(), fh, ensure_ascii=False)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ScorerParams":
        with open(path, encoding="utf-8") as fh:
            try:
                record = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}: invalid JSON: {exc}") from exc
        return cls.from_record(record)


@dataclass
class RankedOutput:
    """Candidates of one set ordered by descending score; ties keep
    generation order. best == ranked[0][0]."""

    id: str
    ranked: list[tuple[str, float]]
    best: str


@dataclass
class RankingLoss:
    gold_part: float
    candidate_part: float
    total: float


@dataclass
class TrainResult:
    params: ScorerParams
    best_epoch: int
    best_validation_loss: float
    validation_losses: list[float] = field(default_factory=list)


def clamped_cosine(a, b) -> float:
    """Cosine similarity clamped into [0, 1]; negative similarity counts
    as zero relatedness."""
    va = np.asarray(a, dtype=np.float64)
    vb = np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape or va.ndim != 1:
        raise DimensionMismatchError(
            f"cosine needs equal-length vectors, got {va.shape} and {vb.shape}"
        )
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise ZeroVectorError("cosine is undefined for a zero vector")
    cos = float(va @ vb) / (na * nb)
    return min(1.0, max(0.0, cos))


def harmonic_fusion(r: float, c: float) -> float:
    """Harmonic mean 2rc/(r+c) of two scores in [0, 1]; 0 when both are 0."""
    if not (0.0 <= r <= 1.0) or not (0.0 <= c <= 1.0):
        raise ValueError(f"fusion inputs must lie in [0, 1], got {r!r}, {c!r}")
    if r + c == 0.0:
        return 0.0
    return 2.0 * r * c / (r + c)


@lru_cache(maxsize=65536)
def _rouge1_f(candidate_text: str, reference_text: str) -> float:
    return rouge_n(tokenize(candidate_text), tokenize(reference_text), 1).f_measure


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")


def _projected_vector(text: str, embeddings: EmbeddingTable, params: Optional[ScorerParams]):
    vec = embeddings.vector_for_text(text)
    if params is None:
        return vec
    if params.dim != embeddings.dim:
        raise DimensionMismatchError(
            f"projection dim {params.dim} != embedding dim {embeddings.dim}"
        )
    return params.projection @ vec


def eval_f(
    candidate_text: str,
    reference_text: str,
    mode: str,
    embeddings: Optional[EmbeddingTable] = None,
    params: Optional[ScorerParams] = None,
) -> float:
    """Score a candidate against a reference text in [0, 1]."""
    _check_mode(mode)
    if mode == MODE_ROUGE1:
        return _rouge1_f(candidate_text, reference_text)
    if embeddings is None:
        raise MissingEmbeddingError(f"mode {mode!r} needs an embedding table")
    cos = clamped_cosine(
        _projected_vector(candidate_text, embeddings, params),
        _projected_vector(reference_text, embeddings, params),
    )
    if mode == MODE_COSINE:
        return cos
    return harmonic_fusion(_rouge1_f(candidate_text, reference_text), cos)


def _candidate_order(scores: Sequence[float]) -> list[int]:
    """Indices sorted by descending score; equal scores keep input order."""
    return sorted(range(len(scores)), key=lambda i: (-scores[i], i))


def rank_candidates(
    cset: CandidateSet,
    mode: str,
    embeddings: Optional[EmbeddingTable] = None,
    params: Optional[ScorerParams] = None,
) -> RankedOutput:
    """Order a set's candidates by their score against the paragraph."""
    scores = [
        eval_f(cand, cset.paragraph, mode, embeddings, params)
        for cand in cset.candidates
    ]
    order = _candidate_order(scores)
    ranked = [(cset.candidates[i], scores[i]) for i in order]
    return RankedOutput(id=cset.id, ranked=ranked, best=ranked[0][0])


def _pair_margin(i: int, j: int, lambda_candidate: float, margin_form: str) -> float:
    """Margin for the sorted-position pair (i, j), i < j, 0-based."""
    if margin_form == FORM_PAIRWISE:
        return (j - i) * lambda_candidate
    if margin_form == FORM_POSITIONAL:
        return (i + 1) * lambda_candidate
    raise ValueError(f"unknown margin form {margin_form!r}")


def margin_losses(
    candidate_scores: Sequence[float],
    gold_score: float,
    lambda_gold: float = DEFAULT_LAMBDA,
    lambda_candidate: float = DEFAULT_LAMBDA,
    margin_form: str = FORM_PAIRWISE,
) -> tuple[float, float]:
    """Closed-form hinge losses from precomputed scores.

    gold part: sum over candidates of max(0, s_i - s_gold + lambda_gold).
    candidate part: candidates sorted by descending score, then for each
    sorted pair i < j, max(0, s_j - s_i + margin(i, j)).
    """
    if len(candidate_scores) == 0:
        raise EmptyInputError("margin_losses needs at least one candidate score")
    gold_part = sum(
        max(0.0, s - gold_score + lambda_gold) for s in candidate_scores
    )
    order = _candidate_order(candidate_scores)
    s = [candidate_scores[i] for i in order]
    candidate_part = 0.0
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            candidate_part += max(
                0.0, s[j] - s[i] + _pair_margin(i, j, lambda_candidate, margin_form)
            )
    return gold_part, candidate_part


def ranking_loss(
    cset: CandidateSet,
    mode: str,
    embeddings: Optional[EmbeddingTable] = None,
    params: Optional[ScorerParams] = None,
    margin_form: str = FORM_PAIRWISE,
) -> RankingLoss:
    """Margin ranking loss of one candidate set against the paragraph."""
    lambda_gold = params.lambda_gold if params is not None else DEFAULT_LAMBDA
    lambda_candidate = (
        params.lambda_candidate if params is not None else DEFAULT_LAMBDA
    )
    scores = [
        eval_f(cand, cset.paragraph, mode, embeddings, params)
        for cand in cset.candidates
    ]
    gold_score = eval_f(cset.gold, cset.paragraph, mode, embeddings, params)
    gold_part, candidate_part = margin_losses(
        scores, gold_score, lambda_gold, lambda_candidate, margin_form
    )
    return RankingLoss(gold_part, candidate_part, gold_part + candidate_part)


def _cosine_with_grad(weight: np.ndarray, raw_a: np.ndarray, raw_x: np.ndarray):
    """Unclamped cosine of (W a, W x) and its gradient with respect to W."""
    u = weight @ raw_a
    v = weight @ raw_x
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVectorError("projection collapsed a vector to zero norm")
    cos = float(u @ v) / (nu * nv)
    gu = v / (nu * nv) - (cos / (nu * nu)) * u
    gv = u / (nu * nv) - (cos / (nv * nv)) * v
    grad = np.outer(gu, raw_a) + np.outer(gv, raw_x)
    return cos, grad


def _score_with_grad(
    candidate_text: str,
    reference_text: str,
    mode: str,
    embeddings: EmbeddingTable,
    params: ScorerParams,
):
    """Score f(candidate, reference) plus df/dW. Gradients flow through the
    cosine term only; the ROUGE component of the fused score is constant."""
    raw_a = embeddings.vector_for_text(candidate_text)
    raw_x = embeddings.vector_for_text(reference_text)
    cos, dcos = _cosine_with_grad(params.projection, raw_a, raw_x)
    clamped = min(1.0, max(0.0, cos))
    pass_through = 1.0 if cos > 0.0 else 0.0
    if mode == MODE_COSINE:
        return clamped, pass_through * dcos
    r = _rouge1_f(candidate_text, reference_text)
    f = harmonic_fusion(r, clamped)
    denom = r + clamped
    if denom == 0.0:
        return f, np.zeros_like(dcos)
    dfdc = 2.0 * r * r / (denom * denom)
    return f, (dfdc * pass_through) * dcos


def ranking_loss_gradient(
    cset: CandidateSet,
    mode: str,
    embeddings: EmbeddingTable,
    params: ScorerParams,
    margin_form: str = FORM_PAIRWISE,
):
    """Ranking loss of one set plus its analytic gradient with respect to
    the projection. Modes: cosine or fused (rouge1 has no parameters)."""
    if mode not in (MODE_COSINE, MODE_FUSED):
        raise ValueError(f"gradients need mode cosine or fused, got {mode!r}")
    scored = [
        _score_with_grad(cand, cset.paragraph, mode, embeddings, params)
        for cand in cset.candidates
    ]
    gold_score, gold_grad = _score_with_grad(
        cset.gold, cset.paragraph, mode, embeddings, params
    )
    grad = np.zeros_like(params.projection)
    gold_part = 0.0
    for s, g in scored:
        residual = s - gold_score + params.lambda_gold
        if residual > 0.0:
            gold_part += residual
            grad += g - gold_grad
    order = _candidate_order([s for s, _ in scored])
    candidate_part = 0.0
    for oi in range(len(order)):
        si, gi = scored[order[oi]]
        for oj in range(oi + 1, len(order)):
            sj, gj = scored[order[oj]]
            residual = sj - si + _pair_margin(
                oi, oj, params.lambda_candidate, margin_form
            )
            if residual > 0.0:
                candidate_part += residual
                grad += gj - gi
    loss = RankingLoss(gold_part, candidate_part, gold_part + candidate_part)
    return loss, grad


def validation_loss(
    sets: Sequence[CandidateSet],
    mode: str,
    embeddings: Optional[EmbeddingTable] = None,
    params: Optional[ScorerParams] = None,
) -> float:
    """1 minus the mean quality of the selected candidates: each set's best
    candidate is chosen against the paragraph, then scored against the gold.
    """
    if not sets:
        raise EmptyInputError("validation_loss needs at least one candidate set")
    total = 0.0
    for cset in sets:
        best = rank_candidates(cset, mode, embeddings, params).best
        total += eval_f(best, cset.gold, mode, embeddings, params)
    return 1.0 - total / len(sets)


def train(
    train_sets: Sequence[CandidateSet],
    val_sets: Sequence[CandidateSet],
    mode: str,
    embeddings: EmbeddingTable,
    params0: ScorerParams,
    lr: float = 0.05,
    epochs: int = 100,
    margin_form: str = FORM_PAIRWISE,
) -> TrainResult:
    """Full-batch gradient descent on the mean ranking loss.

    Tracks validation loss every epoch (including the untrained params) and
    returns the snapshot with the lowest validation loss, so lr=0 or
    epochs=0 hands back params0. Raises NonFiniteLossError on divergence.
    """
    if mode not in (MODE_COSINE, MODE_FUSED):
        raise ValueError(f"training needs mode cosine or fused, got {mode!r}")
    if not train_sets or not val_sets:
        raise EmptyInputError("training needs non-empty train and validation sets")
    if lr < 0.0:
        raise ValueError(f"learning rate must be >= 0, got {lr!r}")
    if epochs < 0:
        raise ValueError(f"epochs must be >= 0, got {epochs!r}")

    weight = params0.projection.copy()
    lam_g = params0.lambda_gold
    lam_c = params0.lambda_candidate

    def snapshot(w: np.ndarray) -> ScorerParams:
        return ScorerParams(w.copy(), lam_g, lam_c)

    best_val = validation_loss(val_sets, mode, embeddings, snapshot(weight))
    if not math.isfinite(best_val):
        raise NonFiniteLossError("validation loss is non-finite at initialization")
    best_weight = weight.copy()
    best_epoch = 0
    history = [best_val]

    for epoch in range(1, epochs + 1):
        grad = np.zeros_like(weight)
        total = 0.0
        current = snapshot(weight)
        for cset in train_sets:
            loss, g = ranking_loss_gradient(
                cset, mode, embeddings, current, margin_form
            )
            total += loss.total
            grad += g
        mean_loss = total / len(train_sets)
        grad /= len(train_sets)
        if not math.isfinite(mean_loss) or not np.all(np.isfinite(grad)):
            raise NonFiniteLossError(f"training diverged at epoch {epoch}")
        weight = weight - lr * grad
        val = validation_loss(val_sets, mode, embeddings, snapshot(weight))
        if not math.isfinite(val):
            raise NonFiniteLossError(f"validation loss non-finite at epoch {epoch}")
        history.append(val)
        if val < best_val:
            best_val = val
            best_weight = weight.copy()
            best_epoch = epoch
    return TrainResult(snapshot(best_weight), best_epoch, best_val, history)


def read_candidate_file(path) -> list[CandidateSet]:
    sets = []
    for lineno, record in jsonl.read_records(path):
        try:
            sets.append(CandidateSet.from_record(record))
        except DataError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from exc
    if not sets:
        raise EmptyInputError(f"{path}: no candidate sets")
    return sets
