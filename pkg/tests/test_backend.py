import importlib
import os
import random

import numpy as np
import pytest

from qtwist import _kernels_py, kernels

compiled = pytest.importorskip("qtwist._kernels")


def random_poly(rng, terms=30):
    return {rng.randrange(1 << 48): rng.randint(-50, 50) or 1 for _ in range(terms)}


@pytest.mark.skipif(bool(os.environ.get("QTWIST_PURE_PYTHON")), reason="fallback forced")
def test_compiled_backend_selected_by_default():
    assert kernels.BACKEND == "compiled"


def test_env_forces_pure_python(monkeypatch):
    monkeypatch.setenv("QTWIST_PURE_PYTHON", "1")
    mod = importlib.reload(kernels)
    try:
        assert mod.BACKEND == "python"
        assert mod.poly_mul is _kernels_py.poly_mul
    finally:
        monkeypatch.delenv("QTWIST_PURE_PYTHON")
        importlib.reload(kernels)


@pytest.mark.parametrize("seed", range(5))
def test_poly_mul_parity(seed):
    rng = random.Random(seed)
    a, b = random_poly(rng), random_poly(rng)
    assert compiled.poly_mul(a, b) == _kernels_py.poly_mul(a, b)
    # bignum coefficients
    a = {e: c * 10 ** 30 for e, c in a.items()}
    assert compiled.poly_mul(a, b) == _kernels_py.poly_mul(a, b)


@pytest.mark.parametrize("seed", range(5))
def test_poly_scale_add_parity(seed):
    rng = random.Random(seed)
    acc, a = random_poly(rng), random_poly(rng)
    factor, shift = rng.randint(-9, 9), rng.randrange(1 << 16)
    assert compiled.poly_scale_add(dict(acc), a, factor, shift) == \
        _kernels_py.poly_scale_add(dict(acc), a, factor, shift)
    # cancellation to zero drops the term
    assert compiled.poly_scale_add({0: 3}, {0: 1}, -3, 0) == {}


@pytest.mark.parametrize("n", [1, 2, 5, 12])
def test_charpoly_mod_parity(n):
    rng = np.random.default_rng(n)
    rows = rng.integers(-100, 100, size=(n, n)).tolist()
    for p in (7, 65521, 2147483629):
        assert list(compiled.charpoly_mod(rows, p)) == list(_kernels_py.charpoly_mod(rows, p))
