"""Compiled and pure-Python kernels against each other and against brute force."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from patternlab import kernels
from patternlab.combi import SetPartition, enumerate_set_partitions

BACKENDS = [kernels.python_backend]
if kernels.compiled_backend is not None:
    BACKENDS.append(kernels.compiled_backend)

PATTERNS = ["1", "12", "21", "123", "132", "213", "231", "312", "321", "2413", "3142", "1234", "4321", "25314"]
ARC_PATTERNS = [
    ((1, 2),), ((1, 3),), ((1, 3), (2, 4)), ((1, 4), (2, 3)), ((1, 2), (3, 4)),
    ((1, 2), (2, 3)), ((2, 4),), ((1, 5), (2, 4)), ((1, 3), (2, 5), (4, 6)),
]


def test_compiled_backend_is_built():
    assert kernels.compiled_backend is not None, "Cython extension failed to build"
    assert kernels.compiled_backend.NAME == "cython"
    assert kernels.python_backend.NAME == "python"


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.NAME)
@settings(max_examples=150, deadline=None)
@given(word=st.lists(st.integers(1, 4), min_size=0, max_size=9), pat=st.sampled_from(PATTERNS))
def test_word_kernel_matches_brute_force(backend, word, pat):
    from conftest import brute_count_word

    tau = tuple(int(c) for c in pat)
    assert backend.count_word_pattern(np.array(word, dtype=np.int64), tau) == brute_count_word(word, tau)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.NAME)
def test_arc_kernel_matches_brute_force(backend, brute_arcs):
    for n in range(1, 8):
        for pi in enumerate_set_partitions(n):
            nxt = np.array(pi.next_array(), dtype=np.int64)
            for arcs in ARC_PATTERNS:
                length = max(j for _, j in arcs)
                for extra in (0, 1):
                    L = length + extra
                    assert backend.count_arc_pattern(nxt, arcs, L) == brute_arcs(pi, arcs, L), (pi, arcs, L)


def test_backends_agree_on_large_inputs():
    if kernels.compiled_backend is None:
        pytest.skip("no compiled backend")
    rng = np.random.default_rng(3)
    words = rng.integers(1, 6, size=(20, 60))
    for pat in ["21", "231", "2413"]:
        tau = tuple(int(c) for c in pat)
        a = kernels.python_backend.count_word_pattern_many(words, tau)
        b = kernels.compiled_backend.count_word_pattern_many(words, tau)
        assert list(a) == list(b)
    urns = rng.integers(0, 10, size=80)
    n1, o1 = kernels.python_backend.urns_to_next(urns, 10)
    n2, o2 = kernels.compiled_backend.urns_to_next(urns, 10)
    assert list(n1) == list(n2) and o1 == o2
    for arcs in ARC_PATTERNS:
        L = max(j for _, j in arcs)
        assert kernels.python_backend.count_arc_pattern(n1, arcs, L) == kernels.compiled_backend.count_arc_pattern(n2, arcs, L)


@pytest.mark.parametrize("backend", BACKENDS, ids=lambda b: b.NAME)
def test_urns_to_next_matches_partition(backend):
    rng = np.random.default_rng(11)
    for _ in range(200):
        m = int(rng.integers(1, 8))
        urns = rng.integers(0, m, size=9)
        nxt, occupied = backend.urns_to_next(urns, m)
        pi = SetPartition.from_labels(urns.tolist())
        assert list(nxt) == pi.next_array()
        assert occupied == len(set(urns.tolist()))


def test_pure_python_fallback_selected_by_env():
    import os
    import subprocess
    import sys

    code = "from patternlab import kernels; from patternlab.patterns import count_perm_pattern; print(kernels.BACKEND, count_perm_pattern('23112', '21'))"
    env = dict(os.environ, PATTERNLAB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout.split()
    assert out == ["python", "5"]
    env.pop("PATTERNLAB_PURE_PYTHON")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout.split()
    assert out[1] == "5"
