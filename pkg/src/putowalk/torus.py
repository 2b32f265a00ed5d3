"""Offset grids on the d-torus and the singular loci z**alpha = +-1."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .walks import Walk, as_torus_point, monomials

# 1 / (2 * golden ratio)
GOLDEN_OFFSET = 1.0 / (1.0 + np.sqrt(5.0))
SINGULAR_TOL = 1e-12


def default_offsets(d):
    """Per-axis offsets frac(j * GOLDEN_OFFSET), j = 1..d.

    Distinct fractional offsets keep the grid off z_j = +-1, off
    z_i z_j = +-1 and off the diagonals z_i = z_j.
    """
    return tuple(float((j * GOLDEN_OFFSET) % 1.0) for j in range(1, d + 1))


@dataclass(frozen=True)
class TorusGrid:
    """Product grid with phases 2 pi (k + offset_j) / N on axis j."""

    dimension: int
    points_per_axis: int
    offset: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.dimension < 1 or self.points_per_axis < 1:
            raise ValueError("grid needs dimension >= 1 and points_per_axis >= 1")
        off = default_offsets(self.dimension) if self.offset is None else tuple(map(float, self.offset))
        if len(off) != self.dimension:
            raise ValueError(f"offset has {len(off)} entries for a {self.dimension}-torus")
        object.__setattr__(self, "offset", off)

    @property
    def size(self):
        return self.points_per_axis ** self.dimension

    def axes(self):
        n = self.points_per_axis
        return [np.exp(2j * np.pi * (np.arange(n) + t) / n) for t in self.offset]

    def points(self):
        """All grid points, shape (N**d, d), C order (last axis fastest)."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def meta(self):
        return {
            "dimension": self.dimension,
            "points_per_axis": self.points_per_axis,
            "offset": list(self.offset),
        }


def singular_mask(walk: Walk, zs, which, tol=SINGULAR_TOL):
    """Boolean mask of points lying in L (z**alpha = 1) or E (z**alpha = -1).

    E never involves alpha = 0; L does, so L is the whole torus for lazy walks.
    """
    mono = monomials(walk.steps, zs)
    if which == "L":
        return np.any(np.abs(mono - 1.0) < tol, axis=1)
    if which == "E":
        nonzero = np.any(walk.steps.array != 0, axis=1)
        return np.any(np.abs(mono[:, nonzero] + 1.0) < tol, axis=1)
    raise ValueError(f"which must be 'L' or 'E', got {which!r}")


def in_singular_set(walk: Walk, z, which, tol=SINGULAR_TOL) -> bool:
    z = as_torus_point(z, walk.dimension)
    return bool(singular_mask(walk, z[None], which, tol)[0])


def random_points(d, count, rng):
    return np.exp(2j * np.pi * rng.random((count, d)))


def random_regular_points(walk: Walk, count, rng, margin=1e-6):
    """Random torus points with every nonzero z**alpha away from +-1."""
    out = []
    nonzero = np.any(walk.steps.array != 0, axis=1)
    while sum(len(o) for o in out) < count:
        zs = random_points(walk.dimension, count, rng)
        mono = monomials(walk.steps, zs)[:, nonzero]
        ok = np.all((np.abs(mono - 1) > margin) & (np.abs(mono + 1) > margin), axis=1)
        out.append(zs[ok])
    return np.concatenate(out)[:count]


def iter_chunks(zs, size=4096):
    for start in range(0, zs.shape[0], size):
        yield zs[start:start + size]


def map_chunks(fn, zs, size=4096):
    """Apply ``fn`` chunk-wise, threaded per ``PUTOWALK_NUM_THREADS``; results in order."""
    chunks = list(iter_chunks(zs, size))
    workers = _kernels.num_threads()
    if workers == 1 or len(chunks) == 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))


def lattice_box(radius, d):
    """All points of {-radius..radius}^d in lexicographic order."""
    rng = range(-radius, radius + 1)
    return [tuple(p) for p in itertools.product(rng, repeat=d)]
