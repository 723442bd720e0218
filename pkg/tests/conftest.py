import itertools

import pytest

from patternlab.combi import SetPartition


def brute_count_word(word, tau):
    """Occurrences by scanning every index subset (ground truth)."""
    ell = len(tau)
    total = 0
    for idx in itertools.combinations(range(len(word)), ell):
        sub = [word[i] for i in idx]
        if len(set(sub)) != ell:
            continue
        if all((sub[a] < sub[b]) == (tau[a] < tau[b]) for a in range(ell) for b in range(ell) if a != b):
            total += 1
    return total


def brute_count_arcs(pi: SetPartition, arcs, length):
    have = set(pi.arcs)
    total = 0
    for x in itertools.combinations(range(1, pi.n + 1), length):
        if all((x[i - 1], x[j - 1]) in have for i, j in arcs):
            total += 1
    return total


@pytest.fixture
def brute_word():
    return brute_count_word


@pytest.fixture
def brute_arcs():
    return brute_count_arcs


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        passed, detail, elapsed = RESULTS[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if passed else 'FAIL'}  ({elapsed:.1f}s)  {detail}")
