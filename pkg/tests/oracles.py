"""Independent brute-force oracles used to cross-check library results.

Kept deliberately free of the library's own linear-algebra paths: the null
space here comes from hand-rolled Gaussian elimination on Python lists, not
from numpy decompositions.
"""

from __future__ import annotations

import math


def gaussian_null_space(matrix, tol: float = 1e-10) -> list[list[float]]:
    """Kernel basis of a small dense matrix via reduced row echelon form.

    Partial pivoting, elimination above and below the pivot, free columns
    turned into basis vectors. Returns a list of row vectors (not normalized).
    """
    rows = [[float(v) for v in row] for row in matrix]
    if not rows:
        return []
    n_cols = len(rows[0])
    scale = max((abs(v) for row in rows for v in row), default=0.0)
    threshold = tol * max(scale, 1.0)

    pivot_cols: list[int] = []
    r = 0
    for c in range(n_cols):
        pivot_row = None
        best = threshold
        for i in range(r, len(rows)):
            if abs(rows[i][c]) > best:
                best = abs(rows[i][c])
                pivot_row = i
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pv = rows[r][c]
        rows[r] = [v / pv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and abs(rows[i][c]) > 0.0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivot_cols.append(c)
        r += 1
        if r == len(rows):
            break

    free_cols = [c for c in range(n_cols) if c not in pivot_cols]
    basis = []
    for f in free_cols:
        vec = [0.0] * n_cols
        vec[f] = 1.0
        for row_idx, c in enumerate(pivot_cols):
            vec[c] = -rows[row_idx][f]
        basis.append(vec)
    return basis


def rotate_via_matrix(axis, angle: float, v):
    """Rodrigues check path: build the rotation matrix R = I + sin K + (1-cos) K^2
    explicitly and multiply."""
    kx, ky, kz = axis
    k_mat = [
        [0.0, -kz, ky],
        [kz, 0.0, -kx],
        [-ky, kx, 0.0],
    ]
    identity = [[1.0 if i == j else 0.0 for j in range(3)] for i in range(3)]

    def matmul(a, b):
        return [
            [sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3)]
            for i in range(3)
        ]

    k2 = matmul(k_mat, k_mat)
    s, c = math.sin(angle), math.cos(angle)
    rot = [
        [identity[i][j] + s * k_mat[i][j] + (1.0 - c) * k2[i][j] for j in range(3)]
        for i in range(3)
    ]
    return [sum(rot[i][j] * v[j] for j in range(3)) for i in range(3)]
