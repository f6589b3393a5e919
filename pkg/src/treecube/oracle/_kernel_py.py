"""Pure-Python subset search; mirrors ``_kernel.pyx`` step for step."""
from __future__ import annotations


def first_resolving_subset(codes, k: int, budget: int):
    """Lexicographically first k-subset of columns whose rows are all distinct.

    ``codes`` is an ``n x n`` integer array (row w = distances from w).
    Returns ``(subset_or_None, leaves_checked, exceeded)``.

    Depth-first over combinations in lexicographic order.  Each level refines
    the partition of rows by one more column; a branch is cut when even a
    perfect split by every remaining column could not reach ``n`` classes.
    """
    n = len(codes)
    rows = [list(map(int, r)) for r in codes]
    width = max(max(r) for r in rows) + 1
    chosen = [0] * k
    cls = [[0] * n for _ in range(k + 1)]
    ncls = [1] * (k + 1)
    checks = 0
    cap = [1] * (k + 1)  # cap[j] = width ** j, clipped at n
    for j in range(1, k + 1):
        cap[j] = min(n, cap[j - 1] * width)

    stack = [0]  # next candidate column at each depth
    depth = 0
    while depth >= 0:
        c = stack[depth]
        if c > n - (k - depth):
            stack.pop()
            depth -= 1
            if depth >= 0:
                stack[depth] += 1
            continue
        # refine classes at depth by column c
        src = cls[depth]
        dst = cls[depth + 1]
        table = {}
        for w in range(n):
            key = src[w] * width + rows[w][c]
            label = table.get(key)
            if label is None:
                label = len(table)
                table[key] = label
            dst[w] = label
        ncls[depth + 1] = len(table)
        chosen[depth] = c
        if depth + 1 == k:
            checks += 1
            if ncls[k] == n:
                return tuple(chosen), checks, False
            if checks >= budget:
                return None, checks, True
            stack[depth] += 1
        elif ncls[depth + 1] * cap[k - depth - 1] < n:
            stack[depth] += 1
        else:
            depth += 1
            stack.append(c + 1)
    return None, checks, False
