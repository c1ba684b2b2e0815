"""Compiled inner loops for the degree solvers."""
import numpy as np
from numba import njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(cache=True, inline="always")
def popcount64(v):
    v = v - ((v >> np.uint64(1)) & _M1)
    v = (v & _M2) + ((v >> np.uint64(2)) & _M2)
    v = (v + (v >> np.uint64(4))) & _M4
    return (v * _H01) >> np.uint64(56)


@njit(cache=True)
def popcount_words(words):
    total = 0
    for w in range(words.shape[0]):
        total += popcount64(words[w])
    return total


@njit(cache=True)
def _trailing_zeros(t):
    k = 0
    while (t & 1) == 0:
        t >>= 1
        k += 1
    return k


@njit(cache=True)
def gray_min_weight(masks, start, n_high):
    """Minimum weight of ``start ^ (XOR of any subset of masks)``.

    The ``n_high`` last masks are fixed per partition (prefix-major order);
    the remaining ones are walked in Gray-code order, flipping one mask per
    step. Returns ``(best, subset)`` where ``subset`` is the bit pattern of
    the first minimiser met, bit ``i`` selecting ``masks[i]``.
    """
    k, n_words = masks.shape
    n_low = k - n_high
    best = popcount_words(start) + 1
    best_subset = 0
    cur = np.empty(n_words, dtype=np.uint64)
    for prefix in range(1 << n_high):
        for w in range(n_words):
            cur[w] = start[w]
        for j in range(n_high):
            if (prefix >> j) & 1:
                for w in range(n_words):
                    cur[w] ^= masks[n_low + j, w]
        base = prefix << n_low
        c = popcount_words(cur)
        if c < best:
            best = c
            best_subset = base
        for t in range(1, 1 << n_low):
            bit = _trailing_zeros(t)
            c = 0
            for w in range(n_words):
                cur[w] ^= masks[bit, w]
                c += popcount64(cur[w])
            if c < best:
                best = c
                best_subset = base | (t ^ (t >> 1))
                if best == 0:
                    return best, best_subset
    return best, best_subset


@njit(cache=True)
def anneal(line_pts, sign_bits, lines_through, degree_of, x0, n_flips, t_start, t_end, seed):
    """Single-flip simulated annealing on the unsatisfied-line count.

    Returns the best assignment met and its count.
    """
    np.random.seed(seed)
    n_pts = x0.shape[0]
    n_lines = line_pts.shape[0]
    x = x0.copy()
    viol = np.zeros(n_lines, dtype=np.uint8)
    count = 0
    for l in range(n_lines):
        v = x[line_pts[l, 0]] ^ x[line_pts[l, 1]] ^ x[line_pts[l, 2]] ^ sign_bits[l]
        viol[l] = v
        count += v
    best = count
    best_x = x.copy()
    if n_flips <= 1:
        return best, best_x
    cool = (t_end / t_start) ** (1.0 / (n_flips - 1))
    temp = t_start
    for _ in range(n_flips):
        p = np.random.randint(n_pts)
        delta = 0
        for j in range(degree_of[p]):
            delta += 1 - 2 * viol[lines_through[p, j]]
        if delta <= 0 or np.random.random() < np.exp(-delta / temp):
            x[p] ^= 1
            for j in range(degree_of[p]):
                viol[lines_through[p, j]] ^= 1
            count += delta
            if count < best:
                best = count
                best_x[:] = x
        temp *= cool
    return best, best_x
