from __future__ import annotations

import functools

import pytest

from bose_kramers.exact import phase_curve
from bose_kramers.kernel import KernelContext
from bose_kramers.neumann import build_expansion


@functools.lru_cache(maxsize=None)
def context(alpha: float) -> KernelContext:
    return KernelContext(alpha)


@functools.lru_cache(maxsize=None)
def expansion(alpha: float, order: int = 3):
    return build_expansion(context(alpha), N=order)


@functools.lru_cache(maxsize=None)
def exact_v1(alpha: float) -> float:
    return phase_curve(context(alpha)).V1()


@pytest.fixture(scope="session")
def classical():
    return context(-30.0)


@pytest.fixture(scope="session")
def degenerate():
    return context(0.0)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
