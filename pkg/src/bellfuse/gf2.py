"""Linear algebra over GF(2) on numpy uint8 arrays.

Rows are bit vectors; all arithmetic is mod 2. These routines back the
stabilizer-group membership tests, syndrome decoders and byproduct solvers,
so they favour clarity over asymptotics (matrices here are tiny).
"""

from __future__ import annotations

import numpy as np


def as_bits(rows) -> np.ndarray:
    a = np.atleast_2d(np.asarray(rows, dtype=np.uint8))
    return a & 1


def row_reduce(mat: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form.

    Returns (rref, pivot_columns). Zero rows are kept at the bottom.
    """
    a = as_bits(mat).copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        hits = np.nonzero(a[r:, c])[0]
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        elim = np.nonzero(a[:, c])[0]
        for i in elim:
            if i != r:
                a[i] ^= a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(mat: np.ndarray) -> int:
    return len(row_reduce(mat)[1])


def solve(mat: np.ndarray, rhs: np.ndarray) -> np.ndarray | None:
    """Solve x @ mat == rhs for a row vector x, or return None.

    `mat` has shape (k, m); the solution expresses rhs as a combination of
    the rows of `mat`.
    """
    a = as_bits(mat)
    b = as_bits(rhs)[0]
    k, m = a.shape
    if b.shape[0] != m:
        raise ValueError("dimension mismatch")
    # Augment with an identity to track which rows were combined.
    aug = np.concatenate([a, np.eye(k, dtype=np.uint8)], axis=1)
    red, pivots = row_reduce(aug)
    x = np.zeros(k, dtype=np.uint8)
    need = b.copy()
    for i, c in enumerate(pivots):
        if c >= m:
            break
        if need[c]:
            need ^= red[i, :m]
            x ^= red[i, m:]
    if need.any():
        return None
    return x


def null_space(mat: np.ndarray) -> np.ndarray:
    """Basis (rows) of {x : mat @ x == 0}."""
    a = as_bits(mat)
    rows, cols = a.shape
    red, pivots = row_reduce(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(pivots):
            if red[r, f]:
                basis[i, p] = 1
    return basis


def in_row_space(mat: np.ndarray, vec: np.ndarray) -> bool:
    return solve(mat, vec) is not None
