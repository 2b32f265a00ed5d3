import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from putowalk import _kernels

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

BACKENDS = sorted(_kernels.available_backends())


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Route the hot kernels through one backend for the duration of a test."""
    mod = _kernels.available_backends()[request.param]
    monkeypatch.setattr(_kernels, "apply_stage", mod.apply_stage)
    monkeypatch.setattr(_kernels, "extreme_singular_values", mod.extreme_singular_values)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_torus(rng, d, n=None):
    shape = (d,) if n is None else (n, d)
    return np.exp(2j * np.pi * rng.random(shape))


def random_unitary(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


ACCEPTANCE_LINES = []


def report_criterion(number, passed, detail):
    """Record one acceptance line; printed now and again in the terminal summary."""
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
