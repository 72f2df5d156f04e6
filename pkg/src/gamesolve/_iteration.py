"""JIT-compiled inner loops of the two pseudo-polynomial value iterations.

Both kernels work on CSR adjacency (``start``/``dst``/``wt`` int64 arrays)
and advance an integer potential vector by a given number of sweeps.  All
interpretation of the potentials (stopping rules, rational reconstruction)
stays in the callers; the kernels only do exact int64 arithmetic.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def mp_sweeps(start, dst, wt, is_p1, v, steps):
    """One-step max/min recurrence: v'(q) = max/min over edges of w + v(dst)."""
    n = v.shape[0]
    cur = v.copy()
    nxt = v.copy()
    for _ in range(steps):
        for q in range(n):
            a = start[q]
            b = start[q + 1]
            best = wt[a] + cur[dst[a]]
            if is_p1[q]:
                for e in range(a + 1, b):
                    c = wt[e] + cur[dst[e]]
                    if c > best:
                        best = c
            else:
                for e in range(a + 1, b):
                    c = wt[e] + cur[dst[e]]
                    if c < best:
                        best = c
            nxt[q] = best
        tmp = cur
        cur = nxt
        nxt = tmp
    return cur


@njit(cache=True)
def penalty_sweeps(start, dst, wt, is_p1, sur2, v, steps):
    """Two-step recurrence of the blocking game, run on original states only.

    Player-1 state: successors sorted by current potential ascending (ties by
    adjacency position); choice i blocks everything strictly below it in that
    order, so v'(q) = -sur2(q) + max_i (-2 * blocked_prefix(i) + v(succ_i)),
    where sur2 is twice the per-visit surcharge for edges already blocked by
    an enclosing subarena restriction.
    Player-2 state: v'(q) = min over successors of v.
    """
    n = v.shape[0]
    maxdeg = 0
    for q in range(n):
        d = start[q + 1] - start[q]
        if d > maxdeg:
            maxdeg = d
    vals = np.empty(maxdeg, dtype=np.int64)
    ws = np.empty(maxdeg, dtype=np.int64)
    order = np.empty(maxdeg, dtype=np.int64)
    cur = v.copy()
    nxt = v.copy()
    for _ in range(steps):
        for q in range(n):
            a = start[q]
            b = start[q + 1]
            deg = b - a
            if not is_p1[q]:
                best = cur[dst[a]]
                for e in range(a + 1, b):
                    c = cur[dst[e]]
                    if c < best:
                        best = c
                nxt[q] = best
                continue
            for i in range(deg):
                vals[i] = cur[dst[a + i]]
                ws[i] = wt[a + i]
                order[i] = i
            # insertion sort by (value, position): deterministic, deg is small
            for i in range(1, deg):
                key = order[i]
                kv = vals[key]
                j = i - 1
                while j >= 0 and (vals[order[j]] > kv or (vals[order[j]] == kv and order[j] > key)):
                    order[j + 1] = order[j]
                    j -= 1
                order[j + 1] = key
            blocked = np.int64(0)
            best = -2 * blocked + vals[order[0]]
            blocked += ws[order[0]]
            for i in range(1, deg):
                c = -2 * blocked + vals[order[i]]
                if c > best:
                    best = c
                blocked += ws[order[i]]
            nxt[q] = best - sur2[q]
        tmp = cur
        cur = nxt
        nxt = tmp
    return cur
