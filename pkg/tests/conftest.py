import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mvd.core import VoteProfile  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def random_profile(rng: random.Random, n: int, m: int, weighted: bool = True) -> VoteProfile:
    rankings = []
    for _ in range(m):
        r = list(range(n))
        rng.shuffle(r)
        rankings.append(tuple(r))
    if not weighted:
        return VoteProfile.from_rankings(rankings)
    weights = [Fraction(rng.randint(0, 4), rng.randint(1, 3)) for _ in range(m)]
    if not any(weights):
        weights[0] = Fraction(1)
    return VoteProfile.from_rankings(rankings, weights)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def record_criterion():
    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
