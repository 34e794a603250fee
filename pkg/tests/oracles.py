"""Independent brute-force oracles used to freeze expected values.

These deliberately avoid the library's code paths: plain Python loops,
naive double-precision arithmetic, exhaustive enumeration.
"""

import math


def naive_mean(rows):
    n = len(rows)
    dim = len(rows[0])
    out = []
    for j in range(dim):
        total = 0.0
        for i in range(n):
            total += float(rows[i][j])
        out.append(total / n)
    return out


def brute_nearest(rows, q, m):
    """(best_index, best_similarity) by exhaustive mean-centred cosine;
    zero-centred rows skipped, ties to the lowest index."""
    cq = [float(a) - float(b) for a, b in zip(q, m)]
    qnorm = math.sqrt(sum(x * x for x in cq))
    if qnorm == 0.0:
        raise ZeroDivisionError("query equals mean")
    best_index, best_sim = None, None
    for i, row in enumerate(rows):
        cr = [float(a) - float(b) for a, b in zip(row, m)]
        rnorm = math.sqrt(sum(x * x for x in cr))
        if rnorm == 0.0:
            continue
        sim = sum(a * b for a, b in zip(cq, cr)) / (qnorm * rnorm)
        if best_sim is None or sim > best_sim:
            best_index, best_sim = i, sim
    return best_index, best_sim


def interval_frames(start_ms, end_ms, frame_ms, num_frames, min_overlap_ms=0):
    out = []
    for i in range(num_frames):
        lo = max(start_ms, i * frame_ms)
        hi = min(end_ms, (i + 1) * frame_ms)
        if hi - lo > min_overlap_ms:
            out.append(i)
    return out


def longest_ordered_containment_bruteforce(word, seq):
    """Length of the longest subsequence of `word` (order kept) that is
    also a subsequence of `seq`. Exponential; use for len(word) <= 12."""
    best = 0
    n = len(word)
    for mask in range(1 << n):
        sub = [word[i] for i in range(n) if mask >> i & 1]
        if len(sub) <= best:
            continue
        it = iter(seq)
        if all(any(s == x for x in it) for s in sub):
            best = len(sub)
    return best


def longest_ordered_containment_dp(word, seq):
    """Independent DP coding of the same quantity (recursion + memo)."""
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def go(i, j):
        if i == len(word) or j == len(seq):
            return 0
        if word[i] == seq[j]:
            return 1 + go(i + 1, j + 1)
        return max(go(i + 1, j), go(i, j + 1))

    return go(0, 0)


def edit_distance_full_dp(ref, hyp):
    n, m = len(ref), len(hyp)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        table[i][0] = i
    for j in range(m + 1):
        table[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost = 0 if ref[i - 1] == hyp[j - 1] else 1
            table[i][j] = min(table[i - 1][j - 1] + cost,
                              table[i - 1][j] + 1,
                              table[i][j - 1] + 1)
    return table[n][m]


def spearman_rank_pearson(xs, ys):
    """Rank transform with averaged ties, then Pearson, in plain Python."""

    def ranks(values):
        indexed = sorted(range(len(values)), key=lambda i: values[i])
        out = [0.0] * len(values)
        i = 0
        while i < len(values):
            j = i
            while j + 1 < len(values) and values[indexed[j + 1]] == values[indexed[i]]:
                j += 1
            avg = (i + j) / 2.0 + 1.0
            for k in range(i, j + 1):
                out[indexed[k]] = avg
            i = j + 1
        return out

    rx, ry = ranks(list(xs)), ranks(list(ys))
    mx = sum(rx) / len(rx)
    my = sum(ry) / len(ry)
    num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    dx = math.sqrt(sum((a - mx) ** 2 for a in rx))
    dy = math.sqrt(sum((b - my) ** 2 for b in ry))
    return num / (dx * dy)
