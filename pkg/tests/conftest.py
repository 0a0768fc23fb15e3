import os

import numpy as np
import pytest

from descrank import ranker

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
FIXTURE200 = os.path.join(DATA_DIR, "fixture200.jsonl")
WIKI_FIXTURE_DIR = os.path.join(DATA_DIR, "wiki_fixture")


@pytest.fixture(scope="session")
def fixture200_path():
    return FIXTURE200


@pytest.fixture(scope="session")
def wiki_fixture_dir():
    return WIKI_FIXTURE_DIR


@pytest.fixture(scope="session")
def fixture200_samples():
    from descrank import corpus

    return corpus.read_dataset(FIXTURE200)


def build_planted_task(seed=13, n_train=24, n_val=10, dim=6, n_bad=3):
    """Synthetic reranking task with a known good projection.

    Signal lives in the first dim//2 coordinates, distractor noise in the
    rest with twice the magnitude. Under the identity projection the bad
    candidates (aligned with the paragraph's distractor part) outscore the
    good one; suppressing the distractor block flips the ranking, so there
    is plenty of validation loss for training to remove.
    """
    rng = np.random.default_rng(seed)
    half = dim // 2
    table = ranker.EmbeddingTable(dim)
    sets = []
    for k in range(n_train + n_val):
        sv = rng.normal(size=half)
        sv /= np.linalg.norm(sv)
        dv = rng.normal(size=dim - half)
        dv /= np.linalg.norm(dv)
        x = np.zeros(dim)
        x[:half] = sv
        x[half:] = 2.0 * dv
        good = np.zeros(dim)
        good[:half] = sv + rng.normal(0.0, 0.05, size=half)
        gold = np.zeros(dim)
        gold[:half] = sv + rng.normal(0.0, 0.02, size=half)
        para, gold_t, good_t = f"para-{k}", f"gold-{k}", f"good-{k}"
        table.add(para, x)
        table.add(gold_t, gold)
        table.add(good_t, good)
        cands = [good_t]
        for b in range(n_bad):
            bad = np.zeros(dim)
            bad[half:] = dv + rng.normal(0.0, 0.05, size=dim - half)
            bad_t = f"bad-{k}-{b}"
            table.add(bad_t, bad)
            cands.append(bad_t)
        order = rng.permutation(len(cands))
        sets.append(
            ranker.CandidateSet(
                id=f"set-{k}",
                paragraph=para,
                gold=gold_t,
                candidates=[cands[i] for i in order],
            )
        )
    return sets[:n_train], sets[n_train:], table
