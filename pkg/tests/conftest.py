import random

import pytest

from resetmon.core import build_product
from resetmon.models import builtin_dra, gen_fig1, gen_fig2

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report_criterion():
    """Record one acceptance line; printed in the terminal summary."""

    def record(number, ok, detail):
        ACCEPTANCE_LINES.append(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        print(ACCEPTANCE_LINES[-1])
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fig1_fp():
    return {n: build_product(gen_fig1(n), builtin_dra("Fp")) for n in range(1, 8)}


@pytest.fixture(scope="session")
def fig2_fp():
    return {n: build_product(gen_fig2(n), builtin_dra("Fp")) for n in range(1, 13)}


def random_walk(product, length, rng: random.Random, start=None):
    """Walk along product edges (uniform successor choice), from an initial state by default."""
    s = rng.choice(product.initial_states()) if start is None else start
    path = [s]
    for _ in range(length - 1):
        s = rng.choice(product.succ[s])
        path.append(s)
    return path
