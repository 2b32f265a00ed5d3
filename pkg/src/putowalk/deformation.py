"""Reflection coins that deform the Grover coin, and a path of lazy-walk coins.

:func:`mu_path` builds a curve of unit vectors mu(t) from the uniform
vector (Grover coin) at t = 0 to a target mu at t = 1.  Along the curve the
lazy walk keeps eigenvalue 1; it gains -1 only where the rest component of
mu(t) vanishes.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .criteria import lazy_both_eigen, reflection_no_minus, scan_symbol, symmetric_sufficient
from .torus import TorusGrid
from .walks import Coin, builtin_walk, reflection_coin

PATH_TOL = 1e-12


def wkkk_coin(p) -> Coin:
    """4x4 reflection coin with vector (sqrt q, sqrt q, sqrt p, sqrt p)/sqrt 2, q = 1 - p."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    q = 1.0 - p
    r = np.sqrt(p * q)
    m = np.array([
        [-p, q, r, r],
        [q, -p, r, r],
        [r, r, -q, p],
        [r, r, p, -q],
    ], dtype=np.complex128)
    return Coin(m)


def wkkk_vector(p):
    q = 1.0 - p
    return np.array([np.sqrt(q), np.sqrt(q), np.sqrt(p), np.sqrt(p)]) / np.sqrt(2.0)


def sbj_vector(rho):
    s = np.sqrt((1.0 - rho ** 2) / 2.0)
    return np.array([s, rho, s])


def sbj_coin(rho) -> Coin:
    """3x3 reflection coin with vector (s, rho, s), s = sqrt((1 - rho**2) / 2)."""
    if not 0.0 <= rho <= 1.0 / np.sqrt(2.0) + PATH_TOL:
        raise ValueError(f"rho must lie in [0, 1/sqrt(2)], got {rho!r}")
    c = rho * np.sqrt(2.0 * (1.0 - rho ** 2))
    m = np.array([
        [-rho ** 2, c, 1.0 - rho ** 2],
        [c, 2.0 * rho ** 2 - 1.0, c],
        [1.0 - rho ** 2, c, -rho ** 2],
    ], dtype=np.complex128)
    return Coin(m)


def _realify(v):
    return np.concatenate([v.real, v.imag])


def _complexify(u):
    d = u.size // 2
    return u[:d] + 1j * u[d:]


@dataclass(frozen=True, eq=False)
class MuPath:
    """Curve mu(t) = [f nu(t), rho(t) e^{i t phase}, f D(t) nu(t)] in C^{2d+1}."""

    target: np.ndarray
    theta: np.ndarray
    p: float
    phase: float
    f: Callable[[float], float]
    start: np.ndarray
    turn: np.ndarray
    angle: float

    @property
    def d(self):
        return self.theta.size

    def nu(self, t):
        """Point on the great circle of radius p from nu_0 (t = 0) to nu (t = 1)."""
        u = np.cos(self.angle * t) * self.start + np.sin(self.angle * t) * self.turn
        return self.p * _complexify(u)

    def rho(self, t):
        # 1 - 2 p^2 f^2 rewritten via 1 = 2 p^2 + |a_{d+1}|^2; exact at f = 1
        rest = abs(self.target[self.d])
        return float(np.sqrt(max(0.0, rest ** 2 + 2.0 * self.p ** 2 * (1.0 - self.f(t) ** 2))))

    def evaluate(self, t):
        if not 0.0 <= t <= 1.0:
            raise ValueError(f"t must lie in [0, 1], got {t!r}")
        ft = self.f(t)
        nu = self.nu(t)
        rest = self.rho(t) * np.exp(1j * t * self.phase)
        return np.concatenate([ft * nu, [rest], ft * np.exp(1j * t * self.theta) * nu])


def default_shape(p, d):
    """f(t) = f0 + (1 - f0) t with f0 = sqrt(d / (2d + 1)) / p."""
    f0 = np.sqrt(d / (2.0 * d + 1.0)) / p
    return lambda t: f0 + (1.0 - f0) * t


def mu_path(mu, f=None, check_points=101) -> MuPath:
    """Path of unit vectors from the uniform vector to ``mu`` (lazy layout)."""
    mu = np.asarray(mu, dtype=np.complex128).ravel()
    if mu.size < 3 or mu.size % 2 == 0:
        raise ValueError(f"mu must have odd length >= 3, got {mu.size}")
    if abs(np.linalg.norm(mu) - 1.0) > PATH_TOL:
        raise ValueError("mu must be a unit vector")
    d = (mu.size - 1) // 2
    nu, rest, tail = mu[:d], mu[d], mu[d + 1:]
    if np.max(np.abs(np.abs(nu) - np.abs(tail))) > PATH_TOL:
        raise ValueError("|a_j| != |a_{d+1+j}| for some j: target has no +1 path")
    p = float(np.linalg.norm(nu))
    if p < PATH_TOL:
        raise ValueError("nu = 0 (diagonal coin case) is outside the path construction")
    theta = np.array([np.angle(b / a) if abs(a) > PATH_TOL else 0.0 for a, b in zip(nu, tail)])
    phase = float(np.angle(rest)) if abs(rest) > PATH_TOL else 0.0

    shape = default_shape(p, d) if f is None else f
    f0 = np.sqrt(d / (2.0 * d + 1.0)) / p
    ts = np.linspace(0.0, 1.0, check_points)
    vals = np.array([shape(t) for t in ts])
    if abs(vals[0] - f0) > PATH_TOL:
        raise ValueError(f"f(0) must equal {f0:.15g}, got {vals[0]:.15g}")
    if abs(vals[-1] - 1.0) > PATH_TOL:
        raise ValueError(f"f(1) must equal 1, got {vals[-1]:.15g}")
    bound = 1.0 / (p * np.sqrt(2.0))
    if np.any(vals < -PATH_TOL) or np.any(vals > bound + PATH_TOL):
        raise ValueError(f"f must stay within [0, {bound:.15g}]")

    start = _realify(np.full(d, 1.0 / np.sqrt(d), dtype=np.complex128))
    end = _realify(nu / p)
    cos = float(np.clip(start @ end, -1.0, 1.0))
    angle = float(np.arccos(cos))
    resid = end - cos * start
    if np.linalg.norm(resid) > 1e-9:
        turn = resid / np.linalg.norm(resid)
    elif cos > 0:
        turn = np.zeros_like(start)
        angle = 0.0
    else:
        # antiparallel: go through the first basis direction orthogonal to start
        turn = None
        for k in range(start.size):
            e = np.zeros_like(start)
            e[k] = 1.0
            r = e - (e @ start) * start
            if np.linalg.norm(r) > 1e-6:
                turn = r / np.linalg.norm(r)
                break
        angle = np.pi
    return MuPath(mu.copy(), theta, p, phase, shape, start, turn, angle)


def evaluate(path: MuPath, t):
    return path.evaluate(t)


@dataclass
class SweepRow:
    t: float
    mu: np.ndarray
    rest_component: float
    plus_verdict: str
    plus_symbol_max: float
    minus_verdict: str
    minus_symbol_min: float
    minus_symbol_max: float
    symmetric_plus: bool
    excludes_minus: bool
    both_signs: bool


SWEEP_COLUMNS = (
    "t", "rest_component", "plus_verdict", "plus_symbol_max",
    "minus_verdict", "minus_symbol_min", "minus_symbol_max",
    "symmetric_plus", "excludes_minus", "both_signs",
)


def sweep(mu, samples=5, grid_points=64, f=None, ts=None):
    """Eigenvalue verdicts for +-1 of the lazy walk with coin C_{mu(t)}."""
    path = mu_path(mu, f)
    d = path.d
    ts = np.linspace(0.0, 1.0, samples) if ts is None else np.asarray(ts, dtype=float)
    grid = TorusGrid(d, grid_points)
    rows = []
    for t in ts:
        m = path.evaluate(float(t))
        walk = builtin_walk("lazy", d, reflection_coin(m / np.linalg.norm(m)))
        plus = scan_symbol(walk, 1.0, grid)
        minus = scan_symbol(walk, -1.0, grid)
        rows.append(SweepRow(
            t=float(t),
            mu=m,
            rest_component=float(abs(m[d])),
            plus_verdict=plus.verdict.value,
            plus_symbol_max=plus.symbol_max,
            minus_verdict=minus.verdict.value,
            minus_symbol_min=minus.symbol_min,
            minus_symbol_max=minus.symbol_max,
            symmetric_plus=symmetric_sufficient(walk, 1).holds,
            excludes_minus=reflection_no_minus(walk).holds,
            both_signs=lazy_both_eigen(m).holds,
        ))
    return rows


def sweep_csv(rows, out=None):
    buf = io.StringIO() if out is None else out
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in rows:
        writer.writerow([repr(getattr(r, c)) if isinstance(getattr(r, c), float) else getattr(r, c)
                         for c in SWEEP_COLUMNS])
    return buf.getvalue() if out is None else None
