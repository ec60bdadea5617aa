"""Slow, obviously-correct reference implementations used only by tests.

These deliberately share no code with the package.
"""

from functools import lru_cache
from itertools import permutations


def levenshtein(a, b):
    a, b = tuple(a), tuple(b)

    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] != b[j - 1]))

    return d(len(a), len(b))


def all_shifts(h):
    """Every sequence reachable by moving one contiguous block elsewhere."""
    h = tuple(h)
    out = set()
    for i in range(len(h)):
        for j in range(i + 1, len(h) + 1):
            block, rest = h[i:j], h[:i] + h[j:]
            for k in range(len(rest) + 1):
                cand = rest[:k] + block + rest[k:]
                if cand != h:
                    out.add(cand)
    return out


def exhaustive_ter_edits(h, r, max_shifts=2):
    """min over <= max_shifts unrestricted block moves of (#moves + edit distance)."""
    r = tuple(r)
    frontier = {tuple(h)}
    seen = set(frontier)
    best = levenshtein(h, r)
    for depth in range(1, max_shifts + 1):
        nxt = set()
        for state in frontier:
            for cand in all_shifts(state):
                if cand not in seen:
                    seen.add(cand)
                    nxt.add(cand)
        for cand in nxt:
            best = min(best, depth + levenshtein(cand, r))
        frontier = nxt
    return best


def greedy_tag_assignment(attn_rows, n_src):
    """Enumerate every injective hyp-tag -> src-tag mapping and keep the one
    that is lexicographically best by (weight of tag 1, weight of tag 2, ...),
    preferring the leftmost source for a tag on exact weight ties."""
    best = None
    for perm in permutations(range(n_src), len(attn_rows)):
        key = tuple((attn_rows[k][perm[k]], -perm[k]) for k in range(len(attn_rows)))
        if best is None or key > best[0]:
            best = (key, perm)
    return list(best[1])


def ngram_counts(seq, n):
    out = {}
    for i in range(len(seq) - n + 1):
        g = tuple(seq[i:i + n])
        out[g] = out.get(g, 0) + 1
    return out


def corpus_bleu(pairs, max_n=4):
    """Textbook corpus BLEU with no smoothing, in plain floats."""
    import math

    matches = [0] * max_n
    totals = [0] * max_n
    c = r = 0
    for h, ref in pairs:
        c += len(h)
        r += len(ref)
        for n in range(1, max_n + 1):
            hc, rc = ngram_counts(h, n), ngram_counts(ref, n)
            matches[n - 1] += sum(min(k, rc.get(g, 0)) for g, k in hc.items())
            totals[n - 1] += max(len(h) - n + 1, 0)
    if c == 0 or 0 in matches:
        return 0.0
    logp = sum(math.log(m / t) for m, t in zip(matches, totals)) / max_n
    bp = 1.0 if c >= r else math.exp(1 - r / c)
    return 100 * bp * math.exp(logp)


def sentence_chrf(h, r, max_n=6, beta=3.0):
    """chrF over whitespace-free character streams, averaging P and R over
    the orders where both sides have n-grams."""
    h, r = "".join(h.split()), "".join(r.split())
    ps, rs = [], []
    for n in range(1, max_n + 1):
        hc, rc = ngram_counts(h, n), ngram_counts(r, n)
        if not hc or not rc:
            continue
        common = sum(min(k, rc.get(g, 0)) for g, k in hc.items())
        ps.append(common / sum(hc.values()))
        rs.append(common / sum(rc.values()))
    if not ps:
        return 0.0
    p, rec = sum(ps) / len(ps), sum(rs) / len(rs)
    if p + rec == 0:
        return 0.0
    return 100 * (1 + beta ** 2) * p * rec / (beta ** 2 * p + rec)
