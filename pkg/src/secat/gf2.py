"""Dense linear algebra over GF(2) on numpy uint8 arrays.

Matrices hold 0/1 entries; addition is XOR.  Everything here returns
fresh arrays and never mutates its arguments.
"""

from __future__ import annotations

import numpy as np


def as_matrix(rows, width):
    """Stack an iterable of 1-D uint8 vectors into a matrix of given width."""
    rows = list(rows)
    if not rows:
        return np.zeros((0, width), dtype=np.uint8)
    return np.array(rows, dtype=np.uint8) % 2


def row_echelon(mat):
    """Row echelon form over GF(2).

    Args:
        mat: 2-D uint8 array.

    Returns:
        (echelon, pivot_cols): the reduced matrix and the list of pivot
        column indices, one per nonzero row.
    """
    m = (np.array(mat, dtype=np.uint8) % 2).copy()
    rows, cols = m.shape
    pivot_cols = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        hits = np.nonzero(m[r:, c])[0]
        if hits.size == 0:
            continue
        pivot = r + hits[0]
        if pivot != r:
            m[[r, pivot]] = m[[pivot, r]]
        for other in range(rows):
            if other != r and m[other, c]:
                m[other] ^= m[r]
        pivot_cols.append(c)
        r += 1
    return m, pivot_cols


def rank(mat):
    if mat.size == 0:
        return 0
    _, pivots = row_echelon(mat)
    return len(pivots)


def nullspace(mat):
    """Basis of the right null space, as matrix rows.

    Args:
        mat: 2-D uint8 array, shape (m, n).

    Returns:
        2-D uint8 array whose rows span {x : mat @ x = 0 mod 2}.
    """
    mat = np.array(mat, dtype=np.uint8) % 2
    m, n = mat.shape
    ech, pivots = row_echelon(mat)
    pivot_set = set(pivots)
    free = [c for c in range(n) if c not in pivot_set]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for r, pc in enumerate(pivots):
            if ech[r, fc]:
                basis[k, pc] = 1
    return basis


def solve(mat, vec):
    """One solution x of mat @ x = vec over GF(2), or None.

    Args:
        mat: 2-D uint8 array, shape (m, n).
        vec: 1-D uint8 array, length m.

    Returns:
        1-D uint8 array of length n, or None when inconsistent.
    """
    mat = np.array(mat, dtype=np.uint8) % 2
    vec = np.array(vec, dtype=np.uint8) % 2
    m, n = mat.shape
    aug = np.concatenate([mat, vec.reshape(m, 1)], axis=1)
    ech, pivots = row_echelon(aug)
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.uint8)
    for r, pc in enumerate(pivots):
        x[pc] = ech[r, n]
    return x


def in_row_space(basis, vec):
    """Whether vec lies in the span of the rows of basis."""
    if basis.shape[0] == 0:
        return not vec.any()
    return solve(basis.T, vec) is not None


def independent_rows(mat):
    """Indices of a maximal set of linearly independent rows, greedily."""
    keep = []
    acc = np.zeros((0, mat.shape[1]), dtype=np.uint8)
    r = 0
    for i in range(mat.shape[0]):
        cand = np.vstack([acc, mat[i : i + 1]])
        if rank(cand) > r:
            acc = cand
            r += 1
            keep.append(i)
    return keep
