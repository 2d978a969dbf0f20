import itertools
from functools import reduce

import numpy as np
import pytest

# (N, D) entries exercised by the acceptance criteria
MATRIX = [(1, 2), (2, 2), (3, 2), (4, 2), (2, 3), (3, 3), (2, 4), (2, 5)]


def brute_force_pairing_count(d):
    """Count index sets by mapping every permutation of 0..d-1 to a set of pairs."""
    seen = set()
    for perm in itertools.permutations(range(d)):
        pairs = frozenset(tuple(sorted(perm[2 * r:2 * r + 2])) for r in range(d // 2))
        seen.add((pairs, perm[-1] if d % 2 else None))
    return len(seen)


def dense_kron(mats):
    return reduce(np.kron, mats)


def haar_batch(rng, count, d):
    v = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20200130)


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
