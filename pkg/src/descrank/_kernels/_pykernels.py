"""Pure-Python kernels: the fallback twin of the compiled module.

Both backends operate on integer-encoded token sequences and must agree
exactly; tests/test_kernels.py holds them to that.
"""

from collections import Counter

BACKEND = "python"


def lcs_length(a, b):
    """Length of the longest common subsequence of two int sequences."""
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return 0
    if m > n:  # keep the inner row short
        a, b, n, m = b, a, m, n
    prev = [0] * (m + 1)
    curr = [0] * (m + 1)
    for i in range(1, n + 1):
        ai = a[i - 1]
        for j in range(1, m + 1):
            if ai == b[j - 1]:
                curr[j] = prev[j - 1] + 1
            else:
                pj = prev[j]
                cj = curr[j - 1]
                curr[j] = pj if pj >= cj else cj
        prev, curr = curr, prev
    return prev[m]


def clipped_ngram_overlap(a, b, n):
    """Clipped n-gram match count between two int sequences.

    Returns (overlap, count_a, count_b) where count_* is the number of
    n-grams in each sequence and overlap = sum over distinct n-grams of
    min(multiplicity in a, multiplicity in b).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    ca = max(0, len(a) - n + 1)
    cb = max(0, len(b) - n + 1)
    if ca == 0 or cb == 0:
        return 0, ca, cb
    grams_a = Counter(tuple(a[i : i + n]) for i in range(ca))
    grams_b = Counter(tuple(b[i : i + n]) for i in range(cb))
    overlap = 0
    if len(grams_b) < len(grams_a):
        grams_a, grams_b = grams_b, grams_a
    for gram, cnt in grams_a.items():
        other = grams_b.get(gram)
        if other is not None:
            overlap += cnt if cnt < other else other
    return overlap, ca, cb
