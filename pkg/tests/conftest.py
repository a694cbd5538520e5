from __future__ import annotations

from functools import lru_cache

import pytest

from sqglab.regularize import smooth_vortex
from sqglab.vortex import build_vortex

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@lru_cache(maxsize=None)
def smooth(sigma: float, eps: float):
    return smooth_vortex(build_vortex(sigma), eps)


@pytest.fixture(scope="session")
def box_vortex():
    """Smooth vortex resolvable on the simulation box."""
    return smooth(0.6, 0.12)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
