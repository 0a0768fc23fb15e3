"""descrank: paragraph-to-description corpora, candidate reranking, evaluation.

Submodules:
    wikiclient  -- Wikidata/Wikipedia fetchers with an offline fixture mode
    corpus      -- preprocessing, validation, collection, splits, statistics
    metrics     -- ROUGE / BLEU / repetition flagging over normalized tokens
    ranker      -- cosine/ROUGE fusion scoring, margin ranking loss, training
    sentiment   -- two-sample Kolmogorov-Smirnov machinery over polarity scores
    agreement   -- chance-corrected inter-annotator agreement coefficients
    cli         -- the `descrank` command-line front end
"""

from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
