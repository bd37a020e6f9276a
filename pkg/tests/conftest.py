"""Shared fixtures and the acceptance-summary terminal hook."""

from __future__ import annotations

import time
import warnings

import pytest

from geomrep import make_field, pgl_aut_via_extension, pgl_cross_ratio_geometry

_ACCEPTANCE_RESULTS: dict[str, str] = {}
_FIXTURE_TIMES: dict[str, float] = {}


def fixture_time(name: str) -> float:
    return _FIXTURE_TIMES.get(name, 0.0)


@pytest.fixture(scope="session")
def pgl34():
    """The n=3, q=4 cross-ratio geometry; built once per session."""
    started = time.perf_counter()
    geom = pgl_cross_ratio_geometry(3, make_field(2, 2), base_degree=1)
    _FIXTURE_TIMES["pgl34_build"] = time.perf_counter() - started
    return geom


@pytest.fixture(scope="session")
def pgl34_pipeline(pgl34):
    """Restriction-extension correlation analysis of the q=4 geometry."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        started = time.perf_counter()
        report = pgl_aut_via_extension(pgl34)
    _FIXTURE_TIMES["pgl34_pipeline"] = time.perf_counter() - started
    return report


def record_acceptance(name: str, passed: bool, detail: str) -> None:
    _ACCEPTANCE_RESULTS[name] = f"{'PASS' if passed else 'FAIL'} — {detail}"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"{name}: {_ACCEPTANCE_RESULTS[name]}")
