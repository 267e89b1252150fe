from __future__ import annotations

import itertools
import os
import subprocess
import sys

import numpy as np
import pytest

from permfix import _pykernels, blocksys, kernels

BACKENDS = kernels.backends()


def test_python_backend_always_available():
    assert "python" in BACKENDS
    assert kernels.BACKEND in BACKENDS


def test_compiled_backend_selected_when_built():
    if "cython" not in BACKENDS:
        pytest.skip("compiled extension not built")
    if os.environ.get("PERMFIX_PURE_PYTHON", "") not in ("", "0"):
        pytest.skip("fallback forced by environment")
    assert kernels.BACKEND == "cython"


def test_env_forces_fallback():
    code = "from permfix import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, PERMFIX_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def naive_cycle_counts(row):
    n = len(row)
    seen = [False] * n
    counts = [0] * (n + 1)
    for x in range(n):
        if not seen[x]:
            length, y = 0, x
            while not seen[y]:
                seen[y] = True
                y = row[y]
                length += 1
            counts[length] += 1
    return counts


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_cycle_type_rows(name):
    mod = BACKENDS[name]
    rng = np.random.default_rng(0)
    for n in (1, 2, 7, 30):
        perms = np.stack([rng.permutation(n) for _ in range(200)])
        got = mod.cycle_type_rows(perms)
        assert got.shape == (200, n + 1)
        assert got.tolist() == [naive_cycle_counts(r) for r in perms.tolist()]


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_preserves_any_partition(name):
    mod = BACKENDS[name]
    n, nu = 6, 3
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    systems = list(blocksys.block_partitions(n, nu))
    labels = np.zeros((len(systems), n), dtype=np.int64)
    for i, blocks in enumerate(systems):
        for b, block in enumerate(blocks):
            for x in block:
                labels[i, x - 1] = b
    got = mod.preserves_any_partition(perms, labels, nu)
    expected = []
    for row in perms.tolist():
        ok = False
        for lab in labels.tolist():
            images = [{lab[row[x]] for x in range(n) if lab[x] == b} for b in range(nu)]
            if all(len(s) == 1 for s in images):
                ok = True
                break
        expected.append(ok)
    assert got.tolist() == expected


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_product_action(name):
    mod = BACKENDS[name]
    rng = np.random.default_rng(1)
    for r, M in [(1, 5), (2, 3), (3, 4)]:
        base = np.stack([rng.permutation(M) for _ in range(r)])
        sigma = rng.permutation(r)
        inv = np.argsort(sigma)
        img = mod.product_action(base, sigma)
        for idx, x in enumerate(itertools.product(range(M), repeat=r)):
            y = tuple(int(base[w][x[inv[w]]]) for w in range(r))
            assert img[idx] == np.ravel_multi_index(y, (M,) * r)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_count_cycles_and_fixed(name):
    mod = BACKENDS[name]
    rng = np.random.default_rng(2)
    for n in (1, 5, 64, 1000):
        img = rng.permutation(n)
        counts = naive_cycle_counts(img.tolist())
        assert mod.count_cycles(img) == sum(counts)
        assert mod.count_fixed(img) == counts[1]
    assert mod.count_cycles(np.array([], dtype=np.int64)) == 0


def test_backends_agree_on_random_inputs():
    if len(BACKENDS) < 2:
        pytest.skip("only one backend")
    c = BACKENDS["cython"]
    rng = np.random.default_rng(3)
    perms = np.stack([rng.permutation(12) for _ in range(500)])
    assert np.array_equal(c.cycle_type_rows(perms), _pykernels.cycle_type_rows(perms))
    img = rng.permutation(10_000)
    assert c.count_cycles(img) == _pykernels.count_cycles(img)
