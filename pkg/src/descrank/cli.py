"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 data error, 4 transport failure.
Human-readable tables print scores multiplied by 100 with two decimals
(the usual reporting convention); machine-readable output (--json or
written files) always keeps raw fractions. Given identical inputs and the
same seed, every command writes byte-identical output.
"""

import argparse
import math
import sys

from . import agreement as agreement_mod
from . import corpus, jsonl, metrics, ranker, sentiment
from .errors import DataError, DescrankError, TransportError
from .wikiclient import WikiClient


def _pct(x: float) -> str:
    return f"{100.0 * x:.2f}"


def _trunc4(x: float) -> str:
    """Format truncated (not rounded) to 4 decimals, matching the usual
    table convention for KS critical values."""
    return f"{math.floor(x * 10000) / 10000:.4f}"


def _print(line: str = "") -> None:
    sys.stdout.write(line + "\n")


# -- collect ------------------------------------------------------------


def _cmd_collect(args) -> int:
    client = WikiClient(
        fixture_dir=args.fixture_dir,
        wikidata_api=args.wikidata_api,
        wikipedia_api=args.wikipedia_api,
        rate_limit=args.rate_limit,
        max_retries=args.max_retries,
        max_in_flight=args.max_in_flight,
    )
    with client:
        samples = corpus.collect(client, args.n, args.seed)
    corpus.write_dataset(args.out, samples)
    _print(f"collected {len(samples)} samples -> {args.out}")
    return 0


# -- split ---------------------------------------------------------------


def _cmd_split(args) -> int:
    samples = corpus.read_dataset(args.infile)
    result = corpus.split(samples, args.mode, tuple(args.ratios), args.seed)
    corpus.write_split(args.out_dir, result)
    _print(
        f"split {len(samples)} samples ({result.mode}) -> "
        f"train={len(result.train)} validation={len(result.validation)} "
        f"test={len(result.test)} in {args.out_dir}"
    )
    return 0


# -- stats ---------------------------------------------------------------


def _cmd_stats(args) -> int:
    samples = corpus.read_dataset(args.infile)
    stats = corpus.corpus_stats(samples)
    if args.json:
        record = {
            "samples": len(samples),
            "avg_doc_len": stats.avg_doc_len,
            "avg_summ_len": stats.avg_summ_len,
            "compression_ratio": stats.compression_ratio,
            "vocab_size": stats.vocab_size,
            "instance_histogram": dict(
                sorted(
                    stats.instance_histogram.items(), key=lambda kv: (-kv[1], kv[0])
                )
            ),
        }
        _print(jsonl.dumps_record(record))
        return 0
    _print(f"samples             {len(samples)}")
    _print(f"avg document length {stats.avg_doc_len:.2f}")
    _print(f"avg summary length  {stats.avg_summ_len:.2f}")
    _print(f"compression ratio   {stats.compression_ratio:.2f}")
    _print(f"vocabulary size     {stats.vocab_size}")
    top = sorted(stats.instance_histogram.items(), key=lambda kv: (-kv[1], kv[0]))
    _print("top instance topics")
    for topic, count in top[:10]:
        _print(f"  {count:6d}  {topic}")
    return 0


# -- prefix-overlap --------------------------------------------------------


def _cmd_prefix_overlap(args) -> int:
    samples = corpus.read_dataset(args.infile)
    rows = corpus.prefix_overlap(samples, args.lengths)
    if args.json:
        for row in rows:
            _print(
                jsonl.dumps_record(
                    {
                        "length": row.length,
                        "rouge1_precision": row.rouge1_precision,
                        "rouge2_precision": row.rouge2_precision,
                        "rougel_precision": row.rougel_precision,
                    }
                )
            )
        return 0
    _print("length  R-1-precision  R-2-precision  R-L-precision")
    for row in rows:
        _print(
            f"{row.length:6d}  {_pct(row.rouge1_precision):>13}  "
            f"{_pct(row.rouge2_precision):>13}  {_pct(row.rougel_precision):>13}"
        )
    return 0


# -- score / rerank --------------------------------------------------------


def _load_scoring(args):
    embeddings = (
        ranker.EmbeddingTable.load(args.embeddings) if args.embeddings else None
    )
    params = ranker.ScorerParams.load(args.params) if args.params else None
    return embeddings, params


def _cmd_score(args) -> int:
    sets = ranker.read_candidate_file(args.candidates)
    embeddings, params = _load_scoring(args)
    records = []
    for cset in sets:
        reference = cset.paragraph if args.reference == "paragraph" else cset.gold
        scores = [
            ranker.eval_f(cand, reference, args.mode, embeddings, params)
            for cand in cset.candidates
        ]
        record = {"id": cset.id, "reference": args.reference, "scores": scores}
        if args.reference == "paragraph":
            record["gold_score"] = ranker.eval_f(
                cset.gold, reference, args.mode, embeddings, params
            )
        records.append(record)
    if args.out:
        jsonl.write_records(args.out, records)
        _print(f"scored {len(records)} sets -> {args.out}")
        return 0
    for record in records:
        cells = "  ".join(_pct(s) for s in record["scores"])
        _print(f"{record['id']}\t{cells}")
    return 0


def _cmd_rerank(args) -> int:
    sets = ranker.read_candidate_file(args.candidates)
    embeddings, params = _load_scoring(args)
    records = []
    for cset in sets:
        ranked = ranker.rank_candidates(cset, args.mode, embeddings, params)
        records.append(
            {
                "id": ranked.id,
                "paragraph": cset.paragraph,
                "gold": cset.gold,
                "best": ranked.best,
                "ranked": [
                    {"text": text, "score": score} for text, score in ranked.ranked
                ],
            }
        )
    if args.out:
        jsonl.write_records(args.out, records)
        _print(f"reranked {len(records)} sets -> {args.out}")
        return 0
    for record in records:
        top = record["ranked"][0]
        _print(f"{record['id']}\t{_pct(top['score'])}\t{top['text']}")
    return 0


# -- train-ranker -----------------------------------------------------------


def _cmd_train_ranker(args) -> int:
    train_sets = ranker.read_candidate_file(args.train)
    val_sets = ranker.read_candidate_file(args.val)
    embeddings = ranker.EmbeddingTable.load(args.embeddings)
    params0 = ranker.ScorerParams.initialize(
        embeddings.dim,
        args.seed,
        noise=args.init_noise,
        lambda_gold=args.lambda_gold,
        lambda_candidate=args.lambda_candidate,
    )
    result = ranker.train(
        train_sets,
        val_sets,
        args.mode,
        embeddings,
        params0,
        lr=args.lr,
        epochs=args.epochs,
        margin_form=args.margin_form,
    )
    result.params.save(args.out)
    _print(
        f"trained {args.epochs} epochs on {len(train_sets)} sets; "
        f"best validation loss {result.best_validation_loss:.6f} "
        f"at epoch {result.best_epoch} -> {args.out}"
    )
    return 0


# -- eval --------------------------------------------------------------------


def _hypothesis_of(record: dict, path: str, lineno: int) -> str:
    if "best" in record:
        return record["best"]
    if "text" in record:
        return record["text"]
    if "candidates" in record and record["candidates"]:
        return record["candidates"][0]
    raise DataError(f"{path}:{lineno}: no hypothesis field (best/text/candidates)")


def _cmd_eval(args) -> int:
    rows = []
    for lineno, record in jsonl.read_records(args.infile):
        if "gold" not in record:
            raise DataError(f"{args.infile}:{lineno}: record lacks 'gold'")
        rows.append((_hypothesis_of(record, args.infile, lineno), record["gold"]))
    if not rows:
        raise DataError(f"{args.infile}: nothing to evaluate")
    r1, r2, rl = [], [], []
    bleus = []
    for hyp, gold in rows:
        hyp_tokens = metrics.tokenize(hyp)
        gold_tokens = metrics.tokenize(gold)
        r1.append(metrics.rouge_n(hyp_tokens, gold_tokens, 1))
        r2.append(metrics.rouge_n(hyp_tokens, gold_tokens, 2))
        rl.append(metrics.rouge_l(hyp_tokens, gold_tokens))
        bleus.append(metrics.bleu(hyp_tokens, gold_tokens))
    m1 = metrics.corpus_mean(r1)
    m2 = metrics.corpus_mean(r2)
    ml = metrics.corpus_mean(rl)
    mean_bleu = sum(bleus) / len(bleus)
    if args.json:
        _print(
            jsonl.dumps_record(
                {
                    "pairs": len(rows),
                    "rouge1": {
                        "precision": m1.precision,
                        "recall": m1.recall,
                        "f_measure": m1.f_measure,
                    },
                    "rouge2": {
                        "precision": m2.precision,
                        "recall": m2.recall,
                        "f_measure": m2.f_measure,
                    },
                    "rougeL": {
                        "precision": ml.precision,
                        "recall": ml.recall,
                        "f_measure": ml.f_measure,
                    },
                    "bleu": mean_bleu,
                }
            )
        )
        return 0
    _print(f"pairs   {len(rows)}")
    _print("metric   precision  recall  f-measure")
    for name, score in (("R-1", m1), ("R-2", m2), ("R-L", ml)):
        _print(
            f"{name:7s}  {_pct(score.precision):>9}  {_pct(score.recall):>6}  "
            f"{_pct(score.f_measure):>9}"
        )
    _print(f"BLEU     {_pct(mean_bleu):>9}")
    return 0


# -- ks-test -------------------------------------------------------------------


def _cmd_ks_test(args) -> int:
    records_a = sentiment.read_polarity_file(args.a)
    records_b = sentiment.read_polarity_file(args.b)
    polarities = (
        list(sentiment.POLARITIES) if args.polarity == "all" else [args.polarity]
    )
    results = []
    for polarity in polarities:
        a = [r.component(polarity) for r in records_a]
        b = [r.component(polarity) for r in records_b]
        results.append(sentiment.ks_test(a, b, args.alphas, polarity=polarity))
    if args.json:
        for res in results:
            _print(
                jsonl.dumps_record(
                    {
                        "polarity": res.polarity,
                        "n_a": res.n_a,
                        "n_b": res.n_b,
                        "d_statistic": res.d_statistic,
                        "thresholds": {str(a): t for a, t in res.thresholds.items()},
                        "decisions": {str(a): d for a, d in res.decisions.items()},
                    }
                )
            )
        return 0
    for res in results:
        _print(f"polarity={res.polarity}  N={res.n_a}  M={res.n_b}  D={_trunc4(res.d_statistic)}")
        _print("alpha   c(alpha)  threshold  decision")
        for alpha in args.alphas:
            _print(
                f"{alpha:<6g}  {_trunc4(sentiment.critical_value(alpha))}    "
                f"{_trunc4(res.thresholds[alpha])}     {res.decisions[alpha]}"
            )
        _print()
    return 0


# -- agreement -------------------------------------------------------------------


def _cmd_agreement(args) -> int:
    matrix = agreement_mod.read_ratings_file(args.ratings)
    if args.n_categories is not None:
        matrix = agreement_mod.RatingsMatrix(
            matrix.rows, matrix.rater_ids, n_categories=args.n_categories
        )
    results = agreement_mod.report_agreement(matrix)
    if args.json:
        record = {"items": matrix.n_items, "raters": matrix.n_raters}
        for name in agreement_mod.COEFFICIENTS:
            value = results[name]
            record[name] = value if isinstance(value, float) else None
        _print(jsonl.dumps_record(record))
        return 0
    _print(f"items={matrix.n_items}  raters={matrix.n_raters}")
    label = "(mean over rater pairs)" if matrix.n_raters > 2 else ""
    for name in agreement_mod.COEFFICIENTS:
        value = results[name]
        shown = f"{value:.4f}" if isinstance(value, float) else value
        suffix = (
            f" {label}"
            if label and name in ("cohen_kappa", "scott_pi", "bennett_s")
            else ""
        )
        _print(f"{name:28s} {shown}{suffix}")
    return 0


# -- flag-repetition ----------------------------------------------------------


def _cmd_flag_repetition(args) -> int:
    flagged = 0
    lines = []
    for lineno, record in jsonl.read_records(args.infile):
        if "id" not in record:
            raise DataError(f"{args.infile}:{lineno}: record lacks 'id'")
        if "text" in record:
            text = record["text"]
        elif "best" in record:
            text = record["best"]
        else:
            raise DataError(f"{args.infile}:{lineno}: record lacks 'text' or 'best'")
        hit, ngram = metrics.flag_repetition(text, args.n, args.threshold)
        flagged += hit
        lines.append({"id": str(record["id"]), "flagged": hit, "ngram": ngram})
    if args.json:
        for line in lines:
            _print(jsonl.dumps_record(line))
        return 0
    for line in lines:
        if line["flagged"]:
            _print(f"{line['id']}\tREPETITION\t{line['ngram']}")
    _print(f"flagged {flagged} of {len(lines)} texts")
    return 0


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="descrank",
        description="Build paragraph-to-description corpora, rerank candidate "
        "descriptions, and evaluate them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("collect", help="collect validated samples from the wiki APIs")
    p.add_argument("--n", type=int, required=True, help="number of samples to collect")
    p.add_argument("--seed", type=int, required=True, help="random seed for id draws")
    p.add_argument("--out", required=True, help="output dataset JSONL")
    p.add_argument("--fixture-dir", help="answer from fixture files, no network")
    p.add_argument("--wikidata-api", help="override the Wikidata endpoint")
    p.add_argument("--wikipedia-api", help="override the Wikipedia endpoint")
    p.add_argument("--rate-limit", type=float, default=10.0, help="requests per second")
    p.add_argument("--max-retries", type=int, default=3)
    p.add_argument("--max-in-flight", type=int, default=8)
    p.set_defaults(func=_cmd_collect)

    p = sub.add_parser("split", help="split a dataset into train/validation/test")
    p.add_argument("--in", dest="infile", required=True, help="dataset JSONL")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument(
        "--mode",
        choices=[corpus.MODE_EXCLUSIVE, corpus.MODE_INDEPENDENT],
        default=corpus.MODE_EXCLUSIVE,
    )
    p.add_argument(
        "--ratios",
        type=float,
        nargs=3,
        default=[0.8, 0.1, 0.1],
        metavar=("TRAIN", "VAL", "TEST"),
    )
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("stats", help="corpus-level statistics of a dataset")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser(
        "prefix-overlap",
        help="description coverage within paragraph prefixes of growing length",
    )
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument(
        "--lengths",
        type=int,
        nargs="+",
        default=list(corpus.DEFAULT_PREFIX_LENGTHS),
    )
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_prefix_overlap)

    p = sub.add_parser("score", help="score candidates against a reference text")
    p.add_argument("--candidates", required=True, help="candidate-set JSONL")
    p.add_argument("--mode", choices=list(ranker.MODES), required=True)
    p.add_argument("--embeddings", help="embedding JSONL (cosine/fused modes)")
    p.add_argument("--params", help="scorer params JSON")
    p.add_argument("--reference", choices=["paragraph", "gold"], default="paragraph")
    p.add_argument("--out", help="write JSONL here instead of printing")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("rerank", help="order candidates by score vs the paragraph")
    p.add_argument("--candidates", required=True)
    p.add_argument("--mode", choices=list(ranker.MODES), required=True)
    p.add_argument("--embeddings")
    p.add_argument("--params")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_rerank)

    p = sub.add_parser("train-ranker", help="fit the projection on candidate sets")
    p.add_argument("--train", required=True, help="training candidate-set JSONL")
    p.add_argument("--val", required=True, help="validation candidate-set JSONL")
    p.add_argument("--mode", choices=[ranker.MODE_COSINE, ranker.MODE_FUSED], required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out", required=True, help="output params JSON")
    p.add_argument("--seed", type=int, required=True, help="seed for the init noise")
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--lambda-gold", type=float, default=ranker.DEFAULT_LAMBDA)
    p.add_argument("--lambda-candidate", type=float, default=ranker.DEFAULT_LAMBDA)
    p.add_argument(
        "--margin-form",
        choices=[ranker.FORM_PAIRWISE, ranker.FORM_POSITIONAL],
        default=ranker.FORM_PAIRWISE,
    )
    p.add_argument("--init-noise", type=float, default=0.01)
    p.set_defaults(func=_cmd_train_ranker)

    p = sub.add_parser("eval", help="ROUGE/BLEU of hypotheses against gold")
    p.add_argument(
        "--in",
        dest="infile",
        required=True,
        help="JSONL with gold plus best/text/candidates per line",
    )
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("ks-test", help="two-sample KS test over polarity scores")
    p.add_argument("--a", required=True, help="first polarity JSONL")
    p.add_argument("--b", required=True, help="second polarity JSONL")
    p.add_argument(
        "--polarity",
        choices=list(sentiment.POLARITIES) + ["all"],
        default="all",
    )
    p.add_argument(
        "--alphas",
        type=float,
        nargs="+",
        default=[0.2, 0.15, 0.1, 0.05, 0.01],
    )
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_ks_test)

    p = sub.add_parser("agreement", help="inter-annotator agreement coefficients")
    p.add_argument("--ratings", required=True, help="ratings CSV")
    p.add_argument("--n-categories", type=int, help="declared number of categories")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_agreement)

    p = sub.add_parser("flag-repetition", help="detect degenerate n-gram repetition")
    p.add_argument("--in", dest="infile", required=True, help="JSONL with id and text/best")
    p.add_argument("--n", type=int, default=1, help="n-gram order")
    p.add_argument("--threshold", type=int, default=3, help="consecutive repeats to flag")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_flag_repetition)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except TransportError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return 4
    except DescrankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
