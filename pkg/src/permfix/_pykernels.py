"""Pure numpy versions of the compiled kernels in ``_ckernels.pyx``."""
from __future__ import annotations

import numpy as np


def cycle_type_rows(perms) -> np.ndarray:
    p = np.ascontiguousarray(perms, dtype=np.int64)
    N, n = p.shape
    out = np.zeros((N, n + 1), dtype=np.int64)
    if N == 0 or n == 0:
        return out
    ident = np.arange(n, dtype=np.int64)
    length = np.zeros((N, n), dtype=np.int64)
    cur = p.copy()
    # cur holds p^t(x); the first t with p^t(x) == x is the cycle length of x
    for t in range(1, n + 1):
        length[(cur == ident) & (length == 0)] = t
        if t == n or length.all():
            break
        cur = np.take_along_axis(p, cur, axis=1)
    for j in range(1, n + 1):
        out[:, j] = (length == j).sum(axis=1) // j
    return out


def preserves_any_partition(perms, labels, nblocks: int) -> np.ndarray:
    p = np.ascontiguousarray(perms, dtype=np.int64)
    lab = np.ascontiguousarray(labels, dtype=np.int64)
    N, n = p.shape
    size = n // nblocks
    out = np.zeros(N, dtype=bool)
    for row_labels in lab:
        todo = np.flatnonzero(~out)
        if todo.size == 0:
            break
        order = np.argsort(row_labels, kind="stable")
        img = row_labels[p[np.ix_(todo, order)]].reshape(todo.size, nblocks, size)
        out[todo[(img == img[:, :, :1]).all(axis=(1, 2))]] = True
    return out


def product_action(base, sigma) -> np.ndarray:
    bs = np.ascontiguousarray(base, dtype=np.int64)
    sg = np.ascontiguousarray(sigma, dtype=np.int64)
    r, M = bs.shape
    inv = np.empty(r, dtype=np.int64)
    inv[sg] = np.arange(r)
    shape = (M,) * r
    coords = np.indices(shape).reshape(r, -1)
    new = np.stack([bs[w][coords[inv[w]]] for w in range(r)])
    return np.ravel_multi_index(tuple(new), shape).astype(np.int64)


def count_cycles(img) -> int:
    f = np.ascontiguousarray(img, dtype=np.int64)
    N = f.shape[0]
    if N == 0:
        return 0
    # pointer doubling: lab[x] becomes the least point on the cycle of x
    lab = np.arange(N, dtype=np.int64)
    step = f.copy()
    covered = 1
    while covered < N:
        lab = np.minimum(lab, lab[step])
        step = step[step]
        covered *= 2
    lab = np.minimum(lab, lab[step])
    return int((lab == np.arange(N)).sum())


def count_fixed(img) -> int:
    f = np.ascontiguousarray(img, dtype=np.int64)
    return int((f == np.arange(f.shape[0])).sum())
