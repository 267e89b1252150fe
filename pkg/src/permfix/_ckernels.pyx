# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Same signatures and results as ``_pykernels``."""
import numpy as np

cimport cython
from libc.stdlib cimport free, malloc


def cycle_type_rows(perms):
    """Cycle-type counts of each row of an ``(N, n)`` zero-based array.

    Column ``j`` of the result holds the number of ``j``-cycles; column 0 is
    always zero.
    """
    cdef long long[:, ::1] p = np.ascontiguousarray(perms, dtype=np.int64)
    cdef Py_ssize_t N = p.shape[0], n = p.shape[1]
    out_arr = np.zeros((N, n + 1), dtype=np.int64)
    cdef long long[:, ::1] out = out_arr
    cdef char *seen = <char *> malloc(n + 1)
    cdef Py_ssize_t row, x, y, length
    try:
        for row in range(N):
            for x in range(n):
                seen[x] = 0
            for x in range(n):
                if seen[x]:
                    continue
                length = 0
                y = x
                while not seen[y]:
                    seen[y] = 1
                    y = p[row, y]
                    length += 1
                out[row, length] += 1
    finally:
        free(seen)
    return out_arr


def preserves_any_partition(perms, labels, long long nblocks):
    """Flag rows of ``perms`` that map every block of some partition onto a block.

    ``labels`` is ``(P, n)``: ``labels[q, x]`` is the block of point ``x`` in
    the ``q``-th partition.
    """
    cdef long long[:, ::1] p = np.ascontiguousarray(perms, dtype=np.int64)
    cdef long long[:, ::1] lab = np.ascontiguousarray(labels, dtype=np.int64)
    cdef Py_ssize_t N = p.shape[0], n = p.shape[1], P = lab.shape[0]
    out_arr = np.zeros(N, dtype=np.bool_)
    cdef unsigned char[::1] out = out_arr.view(np.uint8)
    cdef long long *target = <long long *> malloc(nblocks * sizeof(long long))
    cdef Py_ssize_t row, q, x, b
    cdef long long img_block
    cdef bint ok
    try:
        for row in range(N):
            for q in range(P):
                for b in range(nblocks):
                    target[b] = -1
                ok = True
                for x in range(n):
                    b = lab[q, x]
                    img_block = lab[q, p[row, x]]
                    if target[b] < 0:
                        target[b] = img_block
                    elif target[b] != img_block:
                        ok = False
                        break
                if ok:
                    out[row] = 1
                    break
    finally:
        free(target)
    return out_arr


def product_action(base, sigma):
    """Image array of ``(base; sigma)`` acting on ``M**r`` ranked tuples.

    Tuples are ranked in mixed radix ``M`` with coordinate 0 most significant;
    output coordinate ``w`` is ``base[w][x[sigma^{-1}(w)]]``.
    """
    cdef long long[:, ::1] bs = np.ascontiguousarray(base, dtype=np.int64)
    cdef long long[::1] sg = np.ascontiguousarray(sigma, dtype=np.int64)
    cdef Py_ssize_t r = bs.shape[0], M = bs.shape[1]
    cdef Py_ssize_t total = 1, i, w, idx, rank
    for i in range(r):
        total *= M
    inv_arr = np.empty(r, dtype=np.int64)
    cdef long long[::1] inv = inv_arr
    for i in range(r):
        inv[sg[i]] = i
    out_arr = np.empty(total, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef long long *coords = <long long *> malloc(r * sizeof(long long))
    try:
        for i in range(r):
            coords[i] = 0
        for idx in range(total):
            rank = 0
            for w in range(r):
                rank = rank * M + bs[w, coords[inv[w]]]
            out[idx] = rank
            # advance the odometer, last coordinate fastest
            w = r - 1
            while w >= 0:
                coords[w] += 1
                if coords[w] < M:
                    break
                coords[w] = 0
                w -= 1
    finally:
        free(coords)
    return out_arr


def count_cycles(img):
    """Number of cycles of the permutation given by a zero-based image array."""
    cdef long long[::1] f = np.ascontiguousarray(img, dtype=np.int64)
    cdef Py_ssize_t N = f.shape[0], x, y
    cdef long long cycles = 0
    cdef char *seen = <char *> malloc(N + 1)
    try:
        for x in range(N):
            seen[x] = 0
        for x in range(N):
            if seen[x]:
                continue
            cycles += 1
            y = x
            while not seen[y]:
                seen[y] = 1
                y = f[y]
    finally:
        free(seen)
    return int(cycles)


def count_fixed(img):
    """Number of fixed points of a zero-based image array."""
    cdef long long[::1] f = np.ascontiguousarray(img, dtype=np.int64)
    cdef Py_ssize_t N = f.shape[0], x
    cdef long long fixed = 0
    for x in range(N):
        if f[x] == x:
            fixed += 1
    return int(fixed)
