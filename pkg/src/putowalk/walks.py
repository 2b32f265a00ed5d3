"""Walk definitions: step sets, resolutions of unity, coins and symbols.

A walk moves the ``P_alpha`` component of each site's coin vector by the
step ``alpha`` after applying the coin.  On the Fourier side it becomes
multiplication by the unitary symbol ``V(z) C`` with
``V(z) = sum_alpha z**alpha P_alpha``; a product walk (shift back, coin,
shift, coin) has symbol ``V(z)* C V(z) C``.

Torus points are arrays of ``d`` unit-modulus complex numbers.

Coordinate order for the built-in layouts (zero-based coin indices):

* ``std``:  ``+u_j -> 2j``, ``-u_j -> 2j + 1``
* ``lazy``: ``+u_j -> j``, ``0 -> d``, ``-u_j -> d + 1 + j``
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .linalg import (
    CLUSTER_TOL,
    EigenSystem,
    as_cmatrix,
    dagger,
    eig_normal,
    unitarity_defect,
)

PROJ_TOL = 1e-12
UNITARY_TOL = 1e-12
TORUS_TOL = 1e-12


@dataclass(frozen=True)
class StepSet:
    steps: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        steps = tuple(tuple(int(c) for c in s) for s in self.steps)
        if not steps:
            raise ValueError("a step set needs at least one step")
        dims = {len(s) for s in steps}
        if len(dims) != 1 or 0 in dims:
            raise ValueError(f"steps must share one positive dimension, got {sorted(dims)}")
        if len(set(steps)) != len(steps):
            raise ValueError("steps must be pairwise distinct")
        object.__setattr__(self, "steps", steps)

    @property
    def dimension(self):
        return len(self.steps[0])

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    @cached_property
    def array(self):
        return np.array(self.steps, dtype=np.int64)

    @cached_property
    def symmetric_about_origin(self):
        present = set(self.steps)
        return all(tuple(-c for c in s) in present for s in self.steps)

    @property
    def contains_origin(self):
        return (0,) * self.dimension in self.steps

    @property
    def reach(self):
        """max_alpha |alpha|_inf"""
        return int(np.max(np.abs(self.array)))

    def index(self, step):
        return self.steps.index(tuple(int(c) for c in step))

    def half_set(self):
        """Nonzero steps with one representative per +-pair (S = S_o u -S_o u {0})."""
        if not self.symmetric_about_origin:
            raise ValueError("step set is not symmetric about the origin")
        chosen, seen = [], set()
        for s in self.steps:
            if not any(s) or s in seen:
                continue
            chosen.append(s)
            seen.add(s)
            seen.add(tuple(-c for c in s))
        return chosen


@dataclass(frozen=True, eq=False)
class ResolutionOfUnity:
    projections: np.ndarray  # (|S|, D, D)

    def __post_init__(self):
        p = np.array(self.projections, dtype=np.complex128)
        if p.ndim != 3 or p.shape[1] != p.shape[2]:
            raise ValueError(f"projections must be square matrices of one size, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValueError("projections have non-finite entries")
        p.setflags(write=False)
        object.__setattr__(self, "projections", p)

    @classmethod
    def from_partition(cls, dim, parts):
        """Diagonal 0/1 projections from a partition of coordinate indices."""
        mats = []
        for idx in parts:
            m = np.zeros((dim, dim), dtype=np.complex128)
            for k in idx:
                if not 0 <= int(k) < dim:
                    raise ValueError(f"coordinate index {k} outside 0..{dim - 1}")
                m[int(k), int(k)] = 1.0
            mats.append(m)
        return cls(np.array(mats))

    @property
    def dim(self):
        return self.projections.shape[1]

    def __len__(self):
        return self.projections.shape[0]

    def __getitem__(self, k):
        return self.projections[k]

    def rank(self, k):
        return int(round(float(np.trace(self.projections[k]).real)))


@dataclass(frozen=True)
class ResolutionReport:
    ok: bool
    condition: str | None = None
    indices: tuple[int, ...] = ()
    defect: float = 0.0

    def __bool__(self):
        return self.ok

    def describe(self):
        if self.ok:
            return "ok"
        where = ", ".join(str(i) for i in self.indices)
        return f"{self.condition} violated at ({where}): defect {self.defect:.3e}"


def validate_resolution(res, tol=PROJ_TOL) -> ResolutionReport:
    """Check projection, mutual orthogonality and sum-to-identity."""
    p = res.projections if isinstance(res, ResolutionOfUnity) else np.asarray(res)
    if p.ndim != 3 or p.shape[1] != p.shape[2]:
        raise ValueError(f"projections must be square matrices of equal size, got shape {p.shape}")
    n, dim, _ = p.shape
    for a in range(n):
        herm = float(np.max(np.abs(p[a] - dagger(p[a]))))
        idem = float(np.max(np.abs(p[a] @ p[a] - p[a])))
        if max(herm, idem) >= tol:
            return ResolutionReport(False, "projection", (a,), max(herm, idem))
    for a in range(n):
        for b in range(a + 1, n):
            d = float(np.max(np.abs(p[a] @ p[b])))
            if d >= tol:
                return ResolutionReport(False, "orthogonality", (a, b), d)
    d = float(np.max(np.abs(p.sum(axis=0) - np.eye(dim))))
    if d >= tol:
        return ResolutionReport(False, "sum", tuple(range(n)), d)
    return ResolutionReport(True)


class CoinType(enum.Flag):
    SCALAR = enum.auto()
    GROVER = enum.auto()
    REFLECTION = enum.auto()
    FOURIER = enum.auto()
    GENERAL = enum.auto()

    def names(self):
        return [m.name.lower() for m in CoinType if m in self]


_ROOTS4 = (1.0 + 0j, 1j, -1.0 + 0j, -1j)


def classify(c, tol=1e-10) -> CoinType:
    """Scalar > Grover (+reflection) > Fourier > general.

    A Grover coin also carries the FOURIER flag since C**2 = I implies C**4 = I.
    """
    c = as_cmatrix(c)
    dim = c.shape[0]
    eye = np.eye(dim)
    if np.max(np.abs(c - c[0, 0] * eye)) < tol:
        return CoinType.SCALAR
    c2 = c @ c
    flags = None
    if np.max(np.abs(c2 - eye)) < tol:
        flags = CoinType.GROVER
        mult = eig_normal(c, CLUSTER_TOL).multiplicity(1.0)
        if mult == 1:
            flags |= CoinType.REFLECTION
    if np.max(np.abs(c2 @ c2 - eye)) < tol:
        flags = CoinType.FOURIER if flags is None else flags | CoinType.FOURIER
    return CoinType.GENERAL if flags is None else flags


@dataclass(frozen=True, eq=False)
class Coin:
    matrix: np.ndarray
    eig: EigenSystem = field(init=False, repr=False, compare=False)
    kind: CoinType = field(init=False, compare=False)

    def __post_init__(self):
        m = as_cmatrix(self.matrix, "coin")
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"coin must be square, got {m.shape}")
        defect = unitarity_defect(m)
        if defect >= UNITARY_TOL:
            raise ValueError(f"coin not unitary: ||C*C - I||_max = {defect:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "eig", eig_normal(m, CLUSTER_TOL))
        object.__setattr__(self, "kind", classify(m))

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def spectrum(self):
        """Distinct eigenvalues, snapped to exact fourth roots of unity when close."""
        out = []
        for v in self.eig.values:
            for r in _ROOTS4:
                if abs(v - r) < CLUSTER_TOL:
                    v = r
                    break
            out.append(complex(v))
        return out

    def projector(self, value):
        """Eigenprojection onto E(value); zero matrix if value is not an eigenvalue."""
        return self.eig.projector(value)

    def basis(self, value):
        return self.eig.basis(value)

    def multiplicity(self, value):
        return self.eig.multiplicity(value)

    @property
    def is_grover(self):
        return CoinType.GROVER in self.kind

    @property
    def is_reflection(self):
        return CoinType.REFLECTION in self.kind

    @property
    def is_fourier(self):
        return CoinType.FOURIER in self.kind

    def reflection_vector(self):
        """Unit vector spanning E(1) of a reflection-type coin."""
        if not self.is_reflection:
            raise ValueError("coin is not of reflection type")
        v = self.basis(1.0)[:, 0]
        # fix the phase so the largest entry is real positive
        k = int(np.argmax(np.abs(v)))
        return v * (abs(v[k]) / v[k])


def grover_coin(dim) -> Coin:
    if dim < 2:
        raise ValueError(f"Grover coin needs dimension >= 2, got {dim}")
    return Coin(2.0 / dim * np.ones((dim, dim)) - np.eye(dim))


def fourier_coin(dim) -> Coin:
    if dim < 2:
        raise ValueError(f"Fourier coin needs dimension >= 2, got {dim}")
    j = np.arange(dim)
    q = np.exp(2j * np.pi * np.outer(j, j) / dim)
    return Coin(q / np.sqrt(dim))


def reflection_coin(mu) -> Coin:
    """2 mu mu* - I for a unit vector mu."""
    mu = np.asarray(mu, dtype=np.complex128).ravel()
    norm = np.linalg.norm(mu)
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"reflection vector must have unit norm, got {norm!r}")
    return Coin(2.0 * np.outer(mu, np.conj(mu)) - np.eye(mu.size))


def uniform_vector(dim):
    return np.ones(dim, dtype=np.complex128) / np.sqrt(dim)


def as_coin(c) -> Coin:
    return c if isinstance(c, Coin) else Coin(c)


PLAIN = "plain"
PRODUCT = "product"


@dataclass(frozen=True, eq=False)
class Walk:
    steps: StepSet
    resolution: ResolutionOfUnity
    coin: Coin
    kind: str = PLAIN
    name: str | None = None

    def __post_init__(self):
        if self.kind not in (PLAIN, PRODUCT):
            raise ValueError(f"kind must be 'plain' or 'product', got {self.kind!r}")
        if len(self.resolution) != len(self.steps):
            raise ValueError(
                f"{len(self.resolution)} projections for {len(self.steps)} steps"
            )
        if self.resolution.dim != self.coin.dim:
            raise ValueError(
                f"projections act on C^{self.resolution.dim}, coin on C^{self.coin.dim}"
            )

    @property
    def dimension(self):
        return self.steps.dimension

    @property
    def coin_dim(self):
        return self.coin.dim

    @property
    def reach(self):
        """Largest |displacement|_inf per time step."""
        r = self.steps.reach
        return 2 * r if self.kind == PRODUCT else r

    def projection(self, step):
        return self.resolution[self.steps.index(step)]

    def with_coin(self, coin) -> "Walk":
        return Walk(self.steps, self.resolution, as_coin(coin), self.kind, self.name)


def as_torus_point(z, dimension=None):
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    if z.ndim != 1:
        raise ValueError("a torus point is a 1-D sequence of complex numbers")
    if dimension is not None and z.size != dimension:
        raise ValueError(f"torus point has {z.size} coordinates, walk lives on Z^{dimension}")
    if np.any(np.abs(np.abs(z) - 1.0) > TORUS_TOL):
        raise ValueError(f"point {z} is off the torus (|z_j| != 1)")
    return z


def monomials(steps: StepSet, zs):
    """z**alpha for every point (rows of ``zs``) and step: shape (n, |S|)."""
    zs = np.asarray(zs, dtype=np.complex128)
    exps = steps.array
    out = np.ones((zs.shape[0], exps.shape[0]), dtype=np.complex128)
    for j in range(exps.shape[1]):
        col = zs[:, j]
        for a in range(exps.shape[0]):
            e = int(exps[a, j])
            if e > 0:
                out[:, a] *= col ** e
            elif e < 0:
                out[:, a] *= np.conj(col) ** (-e)
    return out


def shift_symbols(walk: Walk, zs):
    """V(z) for a batch of points: shape (n, D, D)."""
    mono = monomials(walk.steps, zs)
    return np.einsum("na,aij->nij", mono, walk.resolution.projections)


def symbols(walk: Walk, zs):
    """Symbol at a batch of torus points (no torus check): shape (n, D, D)."""
    v = shift_symbols(walk, zs)
    c = walk.coin.matrix
    vc = v @ c
    if walk.kind == PLAIN:
        return vc
    return dagger(v) @ c @ vc


def symbol(walk: Walk, z):
    """The D x D unitary symbol at one torus point."""
    z = as_torus_point(z, walk.dimension)
    return symbols(walk, z[None])[0]


def _unit(d, j, sign=1):
    v = [0] * d
    v[j] = sign
    return tuple(v)


BUILTIN_WALKS = ("std", "lazy", "triangular6", "product-triangular3")


def builtin_walk(name, d=1, coin=None) -> Walk:
    """One of the named walks; ``coin`` overrides the default Grover coin."""
    if name == "std":
        if d < 1:
            raise ValueError("dimension must be >= 1")
        steps, parts = [], []
        for j in range(d):
            steps += [_unit(d, j, 1), _unit(d, j, -1)]
            parts += [[2 * j], [2 * j + 1]]
        dim, kind = 2 * d, PLAIN
    elif name == "lazy":
        if d < 1:
            raise ValueError("dimension must be >= 1")
        steps = [_unit(d, j, 1) for j in range(d)] + [(0,) * d]
        steps += [_unit(d, j, -1) for j in range(d)]
        parts = [[k] for k in range(2 * d + 1)]
        dim, kind = 2 * d + 1, PLAIN
    elif name == "triangular6":
        steps = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)]
        parts = [[k] for k in range(6)]
        dim, kind = 6, PLAIN
    elif name == "product-triangular3":
        steps = [(1, 0), (0, 1), (-1, -1)]
        parts = [[0], [1], [2]]
        dim, kind = 3, PRODUCT
    else:
        raise ValueError(f"unknown walk {name!r}; choose from {', '.join(BUILTIN_WALKS)}")
    c = grover_coin(dim) if coin is None else as_coin(coin)
    return Walk(StepSet(tuple(steps)), ResolutionOfUnity.from_partition(dim, parts), c, kind, name)


def fourier_walk_2d() -> Walk:
    """The standard 2-D walk with the 4x4 Fourier coin."""
    return builtin_walk("std", 2, fourier_coin(4))
