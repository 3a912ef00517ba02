import os
import random
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from sheafmorse import _kernel_py, kernel

BACKENDS = kernel.backends()

matrices = st.integers(1, 8).flatmap(
    lambda m: st.integers(1, 8).flatmap(
        lambda n: st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=m, max_size=m)))


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled extension not built")
@given(matrices)
def test_backends_agree_on_snf(A):
    m, n = len(A), len(A[0])
    want = _kernel_py.snf_invariants([r[:] for r in A], m, n)
    for mod in BACKENDS.values():
        assert mod.snf_invariants([r[:] for r in A], m, n) == want


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled extension not built")
def test_overflow_falls_back_to_big_integers():
    big = 2 ** 40
    A = [[big, 1], [3, big]]
    for mod in BACKENDS.values():
        assert mod.snf_invariants([r[:] for r in A], 2, 2) == [1, big * big - 3]
    A = [[2 ** 70, 0], [0, 6]]
    for mod in BACKENDS.values():
        assert mod.snf_invariants([r[:] for r in A], 2, 2) == [2, 3 * 2 ** 70]


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled extension not built")
@given(st.integers(0, 10 ** 9))
def test_backends_agree_on_unit_elimination(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 30)
    entries = {(rng.randrange(n), rng.randrange(n)): rng.choice([1, -1, 2, 3]) for _ in range(rng.randint(0, 3 * n))}
    groups = [rng.randrange(3) for _ in range(n)]
    results = []
    for mod in BACKENDS.values():
        log = []
        results.append((mod.eliminate_units(n, dict(entries), log, groups), log))
    assert all(r == results[0] for r in results)


def test_forced_python_backend():
    env = dict(os.environ, SHEAFMORSE_KERNEL="python")
    out = subprocess.run([sys.executable, "-c", "import sheafmorse.kernel as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_default_backend_is_listed():
    assert kernel.BACKEND in BACKENDS
