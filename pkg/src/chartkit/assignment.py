"""Minimum-cost assignment on square matrices.

The Hungarian solver below is the O(n^3) potentials-and-augmenting-paths
formulation; tables in this package stay tiny (a handful of entries), so
clarity beats micro-optimization. exhaustive_assignment brute-forces every
permutation and exists as the cross-check oracle for small instances.
"""

from __future__ import annotations

from itertools import permutations

INF = float("inf")


def hungarian(cost: list[list[float]]) -> tuple[list[int], float]:
    """Optimal assignment for an n x n cost matrix.

    Returns (assign, total) where assign[i] is the column matched to row i
    and total is the summed cost of the chosen cells.
    """
    n = len(cost)
    if n == 0:
        return [], 0.0
    if any(len(row) != n for row in cost):
        raise ValueError("cost matrix must be square")

    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)  # p[j]: row assigned to column j (1-based, 0 = none)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = INF
            j1 = 0
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1

    assign = [0] * n
    for j in range(1, n + 1):
        if p[j]:
            assign[p[j] - 1] = j - 1
    total = sum(cost[i][assign[i]] for i in range(n))
    return assign, total


def exhaustive_assignment(cost: list[list[float]]) -> tuple[list[int], float]:
    """Permutation search over the same problem; oracle for small n."""
    n = len(cost)
    if n == 0:
        return [], 0.0
    best_perm, best_total = None, INF
    for perm in permutations(range(n)):
        total = sum(cost[i][perm[i]] for i in range(n))
        if total < best_total:
            best_perm, best_total = perm, total
    return list(best_perm), best_total


def pad_square(
    matrix: list[list[float]], n_rows: int, n_cols: int, fill: float
) -> list[list[float]]:
    """Embed a rectangular cost matrix into a square one, padding with fill."""
    n = max(n_rows, n_cols)
    out = [[fill] * n for _ in range(n)]
    for i in range(n_rows):
        for j in range(n_cols):
            out[i][j] = matrix[i][j]
    return out
