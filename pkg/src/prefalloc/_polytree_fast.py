"""Numba-compiled inner loop of the polytree solver.

Imported lazily; the pure-Python twin in ``solvers`` implements the same
deterministic traversal, so both paths produce identical labelings.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def polytree_core(n, k, s, out_flat, out_start, in_flat, in_start):
    q = np.full(n, -1, dtype=np.int32)
    label = np.full(n, -1, dtype=np.int32)
    cur = in_start[:n].copy()
    work = np.empty(2 * n + 2, dtype=np.int32)
    head = n
    tail = n + 1
    work[head] = s
    q[s] = k - 1
    while head < tail:
        v = work[head]
        c = cur[v]
        end = in_start[v + 1]
        while c < end and q[in_flat[c]] >= 0:
            c += 1
        cur[v] = c
        if c < end:
            u = in_flat[c]
            q[u] = q[v]
            head -= 1
            work[head] = u
        else:
            qv = q[v]
            label[v] = qv
            qn = qv + 1
            if qn == k:
                qn = 0
            for j in range(out_start[v], out_start[v + 1]):
                u = out_flat[j]
                if q[u] < 0:
                    work[tail] = u
                    tail += 1
                q[u] = qn
            head += 1
    return label
