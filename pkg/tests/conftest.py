import os
import sys

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

from trie_smooth import Alphabet, StringSpec, make_del, make_ins, make_sub, to_star_like  # noqa: E402


@pytest.fixture
def binary():
    return Alphabet.binary()


@pytest.fixture
def zeros(binary):
    return StringSpec.periodic(binary, "", "0")


@pytest.fixture
def ones(binary):
    return StringSpec.periodic(binary, "", "1")


@pytest.fixture
def sub03():
    return to_star_like(make_sub(0.3))


@pytest.fixture
def ins55():
    return to_star_like(make_ins(0.5, 0.5))


@pytest.fixture
def del02():
    return to_star_like(make_del(0.2))


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


ACCEPTANCE_LINES = {}


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion, printed in the summary."""

    def record(number, title, ok, detail):
        ACCEPTANCE_LINES[number] = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
        print(ACCEPTANCE_LINES[number])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
