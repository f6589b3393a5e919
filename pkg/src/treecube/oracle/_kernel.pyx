# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled subset search; same traversal and counters as ``_kernel_py``."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free


def first_resolving_subset(codes, int k, long long budget):
    cdef cnp.ndarray[cnp.int32_t, ndim=2, mode="c"] rows = np.ascontiguousarray(codes, dtype=np.int32)
    cdef int n = rows.shape[0]
    cdef int width = int(rows.max()) + 1
    cdef int *cls = <int *> malloc((k + 1) * n * sizeof(int))
    cdef int *ncls = <int *> malloc((k + 1) * sizeof(int))
    cdef int *cap = <int *> malloc((k + 1) * sizeof(int))
    cdef int *stack = <int *> malloc((k + 1) * sizeof(int))
    cdef int *table = <int *> malloc(n * width * sizeof(int))
    cdef int *chosen = <int *> malloc((k + 1) * sizeof(int))
    cdef int *used = <int *> malloc(n * width * sizeof(int))
    cdef int j, w, c, depth, key, label, nused, i
    cdef long long checks = 0
    cdef long long prod
    if (cls == NULL or ncls == NULL or cap == NULL or stack == NULL
            or table == NULL or chosen == NULL or used == NULL):
        raise MemoryError()
    try:
        for i in range(n * width):
            table[i] = -1
        for w in range(n):
            cls[w] = 0
        ncls[0] = 1
        cap[0] = 1
        for j in range(1, k + 1):
            prod = <long long> cap[j - 1] * width
            cap[j] = n if prod > n else <int> prod
        depth = 0
        stack[0] = 0
        while depth >= 0:
            c = stack[depth]
            if c > n - (k - depth):
                depth -= 1
                if depth >= 0:
                    stack[depth] += 1
                continue
            nused = 0
            for w in range(n):
                key = cls[depth * n + w] * width + rows[w, c]
                label = table[key]
                if label < 0:
                    label = nused
                    table[key] = label
                    used[nused] = key
                    nused += 1
                cls[(depth + 1) * n + w] = label
            for i in range(nused):
                table[used[i]] = -1
            ncls[depth + 1] = nused
            chosen[depth] = c
            if depth + 1 == k:
                checks += 1
                if nused == n:
                    return tuple([chosen[i] for i in range(k)]), checks, False
                if checks >= budget:
                    return None, checks, True
                stack[depth] += 1
            elif <long long> nused * cap[k - depth - 1] < n:
                stack[depth] += 1
            else:
                depth += 1
                stack[depth] = c + 1
        return None, checks, False
    finally:
        free(cls); free(ncls); free(cap); free(stack); free(table); free(chosen); free(used)
