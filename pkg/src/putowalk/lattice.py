"""Exact evolution of finitely supported states on Z^d.

A state lives in a dense box {-R..R}^d x C^D.  The walk reaches at most
``reach`` sites per step, so ``R = n * reach`` always contains the support
and nothing outside the propagation cone is ever written.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .walks import PLAIN, Walk, symbols

UNIT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LatticeState:
    """Amplitudes on the box of half-width ``radius``; shape ``(2R+1,)*d + (D,)``."""

    amplitudes: np.ndarray
    step_count: int = 0

    def __post_init__(self):
        a = self.amplitudes
        if a.ndim < 2 or len(set(a.shape[:-1])) != 1 or a.shape[0] % 2 != 1:
            raise ValueError(f"amplitudes must have shape (2R+1,)*d + (D,), got {a.shape}")
        a.setflags(write=False)

    @property
    def dimension(self):
        return self.amplitudes.ndim - 1

    @property
    def coin_dim(self):
        return self.amplitudes.shape[-1]

    @property
    def radius(self):
        return (self.amplitudes.shape[0] - 1) // 2

    def amplitude(self, x):
        """Amplitude vector at site ``x`` (zero outside the box)."""
        x = tuple(int(c) for c in x)
        if len(x) != self.dimension:
            raise ValueError(f"site {x} is not in Z^{self.dimension}")
        if max(abs(c) for c in x) > self.radius:
            return np.zeros(self.coin_dim, dtype=np.complex128)
        return self.amplitudes[tuple(c + self.radius for c in x)].copy()

    def items(self):
        """(site, amplitude) for every site with a nonzero amplitude, lexicographic."""
        nz = np.any(self.amplitudes != 0, axis=-1)
        for idx in zip(*np.nonzero(nz)):
            yield tuple(int(i) - self.radius for i in idx), self.amplitudes[idx]

    def as_dict(self):
        return {x: v.copy() for x, v in self.items()}

    def norm(self):
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def support_radius(self):
        """Largest |x|_inf over sites with nonzero amplitude (-1 for the zero state)."""
        sites = [max((abs(c) for c in x), default=0) for x, _ in self.items()]
        return max(sites, default=-1)


def initial_state(d, D, phi) -> LatticeState:
    """delta_0 tensor phi."""
    phi = np.asarray(phi, dtype=np.complex128).ravel()
    if phi.size != D:
        raise ValueError(f"phi has {phi.size} entries, coin space is C^{D}")
    norm = np.linalg.norm(phi)
    if abs(norm - 1.0) > UNIT_TOL:
        raise ValueError(f"phi must be a unit vector, got norm {norm:.12g}")
    amps = np.zeros((1,) * d + (D,), dtype=np.complex128)
    amps[(0,) * d] = phi
    return LatticeState(amps, 0)


def _flat_offsets(steps, side, sign):
    d = steps.shape[1]
    strides = np.array([side ** (d - 1 - j) for j in range(d)], dtype=np.intp)
    return (sign * steps.astype(np.intp)) @ strides


class Propagator:
    """Preallocated buffers for repeated steps inside a box of fixed radius.

    Each step is one or two *stages*; a stage writes
    ``out[x + alpha] += P_alpha C psi[x]`` for every step alpha.
    """

    def __init__(self, walk: Walk, radius):
        self.walk = walk
        self.d = walk.dimension
        self.D = walk.coin_dim
        self.box_radius = int(radius)
        self.side = 2 * self.box_radius + 1
        proj = walk.resolution.projections
        blocks = np.ascontiguousarray(proj @ walk.coin.matrix)
        steps = walk.steps.array
        self.stages = [(blocks, _flat_offsets(steps, self.side, 1), walk.steps.reach)]
        if walk.kind != PLAIN:
            self.stages.append((blocks, _flat_offsets(steps, self.side, -1), walk.steps.reach))
        nsites = self.side ** self.d
        self._buf = [np.zeros((nsites, self.D), dtype=np.complex128) for _ in range(2)]
        self._cur = 0
        self.radius = 0

    def load(self, state: LatticeState):
        if state.dimension != self.d or state.coin_dim != self.D:
            raise ValueError("state and walk dimensions differ")
        if state.radius > self.box_radius:
            raise ValueError("state does not fit in the propagation box")
        for buf in self._buf:
            buf[...] = 0
        box = self._buf[self._cur].reshape((self.side,) * self.d + (self.D,))
        lo = self.box_radius - state.radius
        sl = tuple(slice(lo, lo + 2 * state.radius + 1) for _ in range(self.d))
        box[sl] = state.amplitudes
        self.radius = state.radius

    def _flat_ranges(self, r):
        """Contiguous runs of flat indices covering the sub-box of radius ``r``."""
        lo = self.box_radius - r
        outer = np.arange(lo, lo + 2 * r + 1, dtype=np.intp)
        base = np.zeros(1, dtype=np.intp)
        for _ in range(self.d - 1):
            base = (base[:, None] * self.side + outer[None, :]).ravel()
        starts = base * self.side + lo
        return starts, starts + 2 * r + 1

    def _sub_box(self, flat, r):
        lo = self.box_radius - r
        sl = tuple(slice(lo, lo + 2 * r + 1) for _ in range(self.d))
        return flat.reshape((self.side,) * self.d + (self.D,))[sl]

    def step(self):
        for blocks, offsets, reach in self.stages:
            if self.radius + reach > self.box_radius:
                raise ValueError("propagation box too small for another step")
            src = self._buf[self._cur]
            out = self._buf[1 - self._cur]
            # older contents lie inside the new radius, so this clears them all
            self._sub_box(out, self.radius + reach)[...] = 0
            starts, stops = self._flat_ranges(self.radius)
            _kernels.apply_stage(src, out, blocks, offsets, starts, stops)
            self._cur = 1 - self._cur
            self.radius += reach

    def box(self):
        return self._buf[self._cur].reshape((self.side,) * self.d + (self.D,))

    def snapshot(self, step_count):
        return LatticeState(self._sub_box(self._buf[self._cur], self.radius).copy(), step_count)

    def site_probability(self, x):
        idx = tuple(int(c) + self.box_radius for c in x)
        return float(np.sum(np.abs(self.box()[idx]) ** 2))


def step(walk: Walk, state: LatticeState) -> LatticeState:
    """One application of the walk."""
    return evolve(walk, state, 1)


def evolve(walk: Walk, state: LatticeState, n) -> LatticeState:
    """``n`` applications of the walk."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return state
    prop = Propagator(walk, state.radius + n * walk.reach)
    prop.load(state)
    for _ in range(n):
        prop.step()
    return prop.snapshot(state.step_count + n)


def distribution(state: LatticeState):
    """Site probabilities ||psi(x)||**2 over the nonzero support, lexicographic."""
    return {x: float(np.sum(np.abs(v) ** 2)) for x, v in state.items()}


def time_average(walk: Walk, phi, x, N):
    """(1/N) sum_{n=1..N} p_n(phi; x) in a single evolution pass."""
    if N < 1:
        raise ValueError("N must be >= 1")
    x = tuple(int(c) for c in x)
    if len(x) != walk.dimension:
        raise ValueError(f"site {x} is not in Z^{walk.dimension}")
    dist = max(abs(c) for c in x)
    if dist > N * walk.reach:
        return 0.0
    prop = Propagator(walk, N * walk.reach)
    prop.load(initial_state(walk.dimension, walk.coin_dim, phi))
    total = 0.0
    for n in range(1, N + 1):
        prop.step()
        if dist <= prop.radius:
            total += prop.site_probability(x)
    return total / N


def time_average_series(walk: Walk, phi, N):
    """Running Cesaro averages of the whole distribution, as a box after N steps."""
    if N < 1:
        raise ValueError("N must be >= 1")
    prop = Propagator(walk, N * walk.reach)
    prop.load(initial_state(walk.dimension, walk.coin_dim, phi))
    acc = np.zeros(prop.box().shape[:-1])
    for _ in range(N):
        prop.step()
        acc += np.sum(np.abs(prop.box()) ** 2, axis=-1)
    return acc / N, prop.box_radius


def fourier_field(walk: Walk, phi, n, M):
    """Amplitudes of U**n (delta_0 tensor phi) from the symbol, on all of Z^d mod M.

    Trapezoid rule on the unshifted M-point grid per axis; exact (up to
    rounding) when M > 2 n reach because the integrand is a trigonometric
    polynomial of degree at most n reach.  Returns an array ``(M,)*d + (D,)``
    indexed by x mod M.
    """
    need = 2 * n * walk.reach
    if M <= need:
        raise ValueError(f"M={M} too small for exact quadrature; need M >= {need + 1}")
    d, D = walk.dimension, walk.coin_dim
    phi = np.asarray(phi, dtype=np.complex128).ravel()
    if phi.size != D:
        raise ValueError(f"phi has {phi.size} entries, coin space is C^{D}")
    axis = np.exp(2j * np.pi * np.arange(M) / M)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    zs = np.stack([m.ravel() for m in mesh], axis=1)
    syms = symbols(walk, zs)
    v = np.broadcast_to(phi, (zs.shape[0], D)).copy()
    for _ in range(n):
        v = np.einsum("nij,nj->ni", syms, v)
    v = v.reshape((M,) * d + (D,))
    return np.fft.fftn(v, axes=tuple(range(d))) / M ** d


def fourier_oracle(walk: Walk, phi, n, x, M):
    """Amplitude at ``x`` after ``n`` steps, computed on the Fourier side."""
    field = fourier_field(walk, phi, n, M)
    return field[tuple(int(c) % M for c in x)].copy()


def write_distribution_csv(dist, d, out=None, average=None):
    """CSV with columns x_1..x_d, probability[, average]; rows in lexicographic order.

    ``average`` optionally maps sites to Cesaro averages; sites appearing in
    either map are written.  Returns the text when ``out`` is None.
    """
    sites = set(dist)
    if average is not None:
        sites |= set(average)
    header = [f"x_{j + 1}" for j in range(d)] + ["probability"]
    if average is not None:
        header.append("average")
    buf = io.StringIO() if out is None else out
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for x in sorted(sites):
        row = list(x) + [repr(dist.get(x, 0.0))]
        if average is not None:
            row.append(repr(average.get(x, 0.0)))
        writer.writerow(row)
    return buf.getvalue() if out is None else None


def read_distribution_csv(text):
    """Inverse of :func:`write_distribution_csv` for the probability column."""
    rows = list(csv.reader(io.StringIO(text)))
    header = rows[0]
    d = sum(1 for h in header if h.startswith("x_"))
    return {tuple(int(v) for v in r[:d]): float(r[d]) for r in rows[1:]}

