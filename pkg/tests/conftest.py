import functools
import sys

import numpy as np
import pytest

from spinorsurf.analysis import VerifySuiteConfig, analyze, verify
from spinorsurf.catalog import catalog_surface, default_grid, get_entry
from spinorsurf.geometry import mean_curvature
from spinorsurf.spinor import maurer_cartan, spinor_from_Z


@functools.lru_cache(maxsize=None)
def pipeline(name, n=64, params=()):
    """Immersion, grid, Z, spinor and H for a catalog entry (cached)."""
    e = get_entry(name)
    g = default_grid(name, n)
    f = catalog_surface(name, dict(params) or None, g)
    zf = maurer_cartan(f, g)
    s = spinor_from_Z(zf, g)
    H = mean_curvature(zf, e.group, g)
    return e, g, f, zf, s, H


@functools.lru_cache(maxsize=None)
def report(name, n=64, params=(), fault=None):
    return analyze(name, grid=default_grid(name, n), params=dict(params) or None, fault=fault)


@functools.lru_cache(maxsize=None)
def suite(fault=None):
    return verify(VerifySuiteConfig(fault=fault))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = mod.summary_lines() if mod else []
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
