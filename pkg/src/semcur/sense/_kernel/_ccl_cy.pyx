# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel: two-pass 4-connected labeling fused with region stats."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

# Stats row layout shared with the numpy fallback:
# [area, sum_u, sum_v, sum_absdelta, min_u, max_u, min_v, max_v]


cdef inline int _find(int* parent, int i) nogil:
    cdef int root = i
    while parent[root] != root:
        root = parent[root]
    cdef int nxt
    while parent[i] != root:
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


def _polarity_stats(float[:, ::1] delta, double h_min, int polarity):
    cdef int h = delta.shape[0]
    cdef int w = delta.shape[1]
    cdef cnp.ndarray[cnp.int32_t, ndim=2] label_arr = np.zeros((h, w), dtype=np.int32)
    cdef int[:, ::1] labels = label_arr
    cdef cnp.ndarray[cnp.int32_t, ndim=1] parent_arr = np.zeros(h * w // 2 + 2, dtype=np.int32)
    cdef int* parent = <int*> parent_arr.data

    cdef int n_labels = 0
    cdef int v, u, up, left, ra, rb
    cdef float val
    cdef bint inside

    with nogil:
        for v in range(h):
            for u in range(w):
                val = delta[v, u]
                inside = (val >= h_min) if polarity > 0 else (val <= -h_min)
                if not inside:
                    labels[v, u] = 0
                    continue
                up = labels[v - 1, u] if v > 0 else 0
                left = labels[v, u - 1] if u > 0 else 0
                if up and left:
                    ra = _find(parent, up)
                    rb = _find(parent, left)
                    if ra != rb:
                        if ra < rb:
                            parent[rb] = ra
                            labels[v, u] = ra
                        else:
                            parent[ra] = rb
                            labels[v, u] = rb
                    else:
                        labels[v, u] = ra
                elif up:
                    labels[v, u] = _find(parent, up)
                elif left:
                    labels[v, u] = _find(parent, left)
                else:
                    n_labels += 1
                    parent[n_labels] = n_labels
                    labels[v, u] = n_labels

    if n_labels == 0:
        return np.empty((0, 8), dtype=np.float64)

    # Map roots to dense indices.
    cdef cnp.ndarray[cnp.int32_t, ndim=1] dense_arr = np.zeros(n_labels + 1, dtype=np.int32)
    cdef int[::1] dense = dense_arr
    cdef int k = 0
    cdef int i
    for i in range(1, n_labels + 1):
        if _find(parent, i) == i:
            dense[i] = k
            k += 1

    cdef cnp.ndarray[cnp.float64_t, ndim=2] stats_arr = np.zeros((k, 8), dtype=np.float64)
    cdef double[:, ::1] stats = stats_arr
    for i in range(k):
        stats[i, 4] = w
        stats[i, 6] = h
        stats[i, 5] = -1.0
        stats[i, 7] = -1.0

    cdef int lab, d
    with nogil:
        for v in range(h):
            for u in range(w):
                lab = labels[v, u]
                if lab == 0:
                    continue
                d = dense[_find(parent, lab)]
                stats[d, 0] += 1.0
                stats[d, 1] += u
                stats[d, 2] += v
                val = delta[v, u]
                stats[d, 3] += val if val >= 0 else -val
                if u < stats[d, 4]:
                    stats[d, 4] = u
                if u > stats[d, 5]:
                    stats[d, 5] = u
                if v < stats[d, 6]:
                    stats[d, 6] = v
                if v > stats[d, 7]:
                    stats[d, 7] = v

    order = np.lexsort((stats_arr[:, 4], stats_arr[:, 6]))
    return stats_arr[order]


def region_stats(delta, double h_min):
    """4-connected regions of |delta| >= h_min, split by sign."""
    cdef cnp.ndarray[cnp.float32_t, ndim=2] d32 = np.ascontiguousarray(delta, dtype=np.float32)
    raised = _polarity_stats(d32, h_min, 1)
    lowered = _polarity_stats(d32, h_min, -1)
    return raised, lowered
