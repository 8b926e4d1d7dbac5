import random

import pytest

from ghzbell.core import DeterministicStrategy

# lines recorded by test_acceptance, echoed in the terminal summary
ACCEPTANCE_LOG: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return random.Random(1234)


def random_strategy(rng, n, m, allow_empty=False):
    low = 0 if allow_empty else 1
    return DeterministicStrategy(m=m, masks=tuple(rng.randrange(low, 1 << m) for _ in range(n)))
