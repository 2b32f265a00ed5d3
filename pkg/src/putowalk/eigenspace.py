"""Eigenvectors of the symbol and eigenprojections of the walk.

For a reflection coin C = 2 mu mu* - I on a symmetric step set with
||P_alpha mu|| = ||P_-alpha mu||, the symbol has the explicit +1
eigenvector :func:`plus_eigenvector` off E.  Eigenprojections of the walk
are inverse Fourier transforms of pointwise symbol projectors, evaluated by
the trapezoid rule on an offset torus grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .criteria import _eta_grover_batch, candidate_spectrum, is_lazy_layout
from .lattice import time_average
from .linalg import dagger, eig_normal
from .torus import TorusGrid, singular_mask
from .walks import PLAIN, Walk, as_torus_point, monomials, symbol, symbols

FORM_TOL = 1e-10
HYPOTHESIS_TOL = 1e-12


def check_plus_hypotheses(walk: Walk):
    """Raise ``ValueError`` naming the first failed hypothesis; return mu otherwise."""
    if walk.kind != PLAIN:
        raise ValueError("plus eigenvector needs a plain walk")
    if not walk.coin.is_reflection:
        raise ValueError("coin is not of reflection type (C = 2 mu mu* - I)")
    if not walk.steps.symmetric_about_origin:
        raise ValueError("step set not symmetric about the origin")
    mu = walk.coin.reflection_vector()
    for alpha in walk.steps:
        minus = tuple(-c for c in alpha)
        a = np.linalg.norm(walk.projection(alpha) @ mu)
        b = np.linalg.norm(walk.projection(minus) @ mu)
        if abs(a - b) > HYPOTHESIS_TOL:
            raise ValueError(f"||P_alpha mu|| != ||P_-alpha mu|| for alpha={alpha} ({a:.6g} vs {b:.6g})")
    return mu


def _plus_batch(walk: Walk, mu, zs):
    """Two closed forms of the +1 eigenvector at every row of ``zs``; cross-checked."""
    mono = monomials(walk.steps, zs)
    proj = walk.resolution.projections
    pmu = proj @ mu                                        # (|S|, D)
    weights = np.sum(np.abs(pmu) ** 2, axis=1)             # ||P_alpha mu||^2
    norm2 = np.abs(1.0 + mono) ** -2 @ weights
    direct = (mono / (1.0 + mono)) @ pmu / np.sqrt(norm2)[:, None]

    eta = _eta_grover_batch(walk, zs)
    raw = mu[None] - np.einsum("nij,j->ni", eta, mu)
    via_eta = raw / np.linalg.norm(raw, axis=1)[:, None]

    gap = float(np.max(np.abs(direct - via_eta))) if zs.shape[0] else 0.0
    if gap > FORM_TOL:
        raise ArithmeticError(f"closed forms of the +1 eigenvector disagree by {gap:.3e}")
    if is_lazy_layout(walk) and walk.coin.is_grover and _is_uniform(mu):
        lazy = lazy_grover_plus_eigenvector(zs)
        gap = float(np.max(np.abs(direct - lazy))) if zs.shape[0] else 0.0
        if gap > FORM_TOL:
            raise ArithmeticError(f"lazy Grover form disagrees by {gap:.3e}")
    return direct


def _is_uniform(mu):
    return bool(np.allclose(mu, np.full(mu.size, 1 / np.sqrt(mu.size)), atol=1e-12))


def lazy_grover_norm(zs):
    """D(z) with D(z)**2 = 1/4 + 2 sum_j 1/|1 + z_j|**2."""
    zs = np.atleast_2d(zs)
    return np.sqrt(0.25 + 2.0 * np.sum(np.abs(1.0 + zs) ** -2, axis=1))


def lazy_grover_plus_eigenvector(zs):
    """Specialized +1 eigenvector of the lazy Grover walk (coordinates +u_j, 0, -u_j)."""
    zs = np.atleast_2d(np.asarray(zs, dtype=np.complex128))
    n, d = zs.shape
    out = np.empty((n, 2 * d + 1), dtype=np.complex128)
    out[:, :d] = zs / (1.0 + zs)
    out[:, d] = 0.5
    out[:, d + 1:] = 1.0 / (1.0 + zs)
    return out / lazy_grover_norm(zs)[:, None]


def plus_eigenvector(walk: Walk, z):
    """Unit +1 eigenvector of the symbol at ``z`` (off E)."""
    mu = check_plus_hypotheses(walk)
    z = as_torus_point(z, walk.dimension)
    if singular_mask(walk, z[None], "E")[0]:
        raise ValueError(f"point {z} lies in the singular set E")
    return _plus_batch(walk, mu, z[None])[0]


def projector_spectral(walk: Walk, omega, z, tol=1e-8):
    """Orthogonal projector onto the omega-eigenspace of the symbol at ``z``."""
    es = eig_normal(symbol(walk, z), tol)
    basis = es.basis(omega, tol)
    if basis.shape[1] == 0:
        raise ValueError(f"{omega} is not an eigenvalue of the symbol at z={z}")
    return basis @ dagger(basis)


def spectral_projectors(walk: Walk, omega, zs, tol=1e-8):
    """Batched :func:`projector_spectral`; points without omega get the zero matrix."""
    vals, vecs = np.linalg.eig(symbols(walk, zs))
    mask = np.abs(vals - omega) < tol
    out = np.zeros((zs.shape[0], walk.coin_dim, walk.coin_dim), dtype=np.complex128)
    counts = mask.sum(axis=1)
    for k in np.unique(counts):
        if k == 0:
            continue
        rows = np.nonzero(counts == k)[0]
        b = np.stack([vecs[r][:, mask[r]] for r in rows])
        q, _ = np.linalg.qr(b)
        out[rows] = q @ dagger(q)
    return out


def _quadrature_nodes(walk, quad_points, avoid_e):
    grid = TorusGrid(walk.dimension, quad_points)
    zs = grid.points()
    keep = ~singular_mask(walk, zs, "E") if avoid_e else np.ones(zs.shape[0], bool)
    return grid, zs, keep


@dataclass(frozen=True, eq=False)
class ProjectionField:
    """Trapezoid values of the eigenprojection of delta_0 tensor phi at all sites.

    Valid for sites with |x_j| < quad_points / 2; beyond that the FFT aliases.
    """

    eigenvalue: complex
    values: np.ndarray = field(repr=False)
    offset: tuple
    quad_points: int

    def at(self, x):
        check_resolved(x, self.quad_points)
        x = np.asarray(x, dtype=float)
        q = self.quad_points
        phase = np.exp(-2j * np.pi * float(np.dot(self.offset, x)) / q)
        return phase * self.values[tuple(int(c) % q for c in x)]


def check_resolved(x, quad_points):
    """Raise unless site ``x`` is resolved by ``quad_points`` trapezoid nodes per axis."""
    if max(abs(int(c)) for c in x) * 2 >= quad_points:
        raise ValueError(f"site {tuple(int(c) for c in x)} aliases with {quad_points} quadrature "
                         f"points; need quad_points > {2 * max(abs(int(c)) for c in x)}")


def _field_from_samples(samples, grid, omega):
    q, d = grid.points_per_axis, grid.dimension
    vals = samples.reshape((q,) * d + (samples.shape[-1],))
    fft = np.fft.fftn(vals, axes=tuple(range(d))) / q ** d
    return ProjectionField(complex(omega), fft, grid.offset, q)


def plus_projection_field(walk: Walk, phi, quad_points) -> ProjectionField:
    """Projection onto the +1 eigenspace via the explicit eigenvector, for all sites."""
    mu = check_plus_hypotheses(walk)
    phi = np.asarray(phi, dtype=np.complex128).ravel()
    grid, zs, keep = _quadrature_nodes(walk, quad_points, True)
    samples = np.zeros((zs.shape[0], walk.coin_dim), dtype=np.complex128)
    w = _plus_batch(walk, mu, zs[keep])
    samples[keep] = (np.conj(w) @ phi)[:, None] * w
    return _field_from_samples(samples, grid, 1.0)


def spectral_projection_field(walk: Walk, omega, phi, quad_points) -> ProjectionField:
    """Projection onto the omega eigenspace from pointwise symbol projectors."""
    phi = np.asarray(phi, dtype=np.complex128).ravel()
    grid, zs, keep = _quadrature_nodes(walk, quad_points, False)
    samples = np.zeros((zs.shape[0], walk.coin_dim), dtype=np.complex128)
    chunk = 8192
    for s in range(0, zs.shape[0], chunk):
        p = spectral_projectors(walk, omega, zs[s:s + chunk])
        samples[s:s + chunk] = p @ phi
    return _field_from_samples(samples, grid, omega)


def project_plus(walk: Walk, phi, x, quad_points):
    """+1 eigenprojection of delta_0 tensor phi evaluated at site ``x``.

    Direct trapezoid sum (no FFT); ``x`` must satisfy |x_j| < quad_points / 2.
    """
    mu = check_plus_hypotheses(walk)
    phi = np.asarray(phi, dtype=np.complex128).ravel()
    if phi.size != walk.coin_dim:
        raise ValueError(f"phi has {phi.size} entries, coin space is C^{walk.coin_dim}")
    x = tuple(int(c) for c in x)
    check_resolved(x, quad_points)
    grid, zs, keep = _quadrature_nodes(walk, quad_points, True)
    zs = zs[keep]
    w = _plus_batch(walk, mu, zs)
    phase = np.prod(zs ** -np.asarray(x, dtype=float), axis=1)
    amp = (np.conj(w) @ phi) * phase
    return (amp @ w) / grid.size


def idempotence_defect(walk: Walk, phi, quad_points, radius):
    """Max difference between projecting once and projecting the windowed result again.

    The first projection is truncated to |x|_inf <= radius before the second.
    """
    mu = check_plus_hypotheses(walk)
    phi = np.asarray(phi, dtype=np.complex128).ravel()
    grid, zs, keep = _quadrature_nodes(walk, quad_points, True)
    zs = zs[keep]
    w = _plus_batch(walk, mu, zs)
    d = walk.dimension
    sites = np.array(list(np.ndindex(*(2 * radius + 1,) * d))) - radius
    phase = np.prod(zs[:, None, :] ** sites[None, :, :].astype(float), axis=2)  # z**y
    once = dagger(phase) @ ((np.conj(w) @ phi)[:, None] * w) / grid.size       # (sites, D)
    g_hat = phase @ once                                                        # (nodes, D)
    coef = np.sum(np.conj(w) * g_hat, axis=1)
    twice = dagger(phase) @ (coef[:, None] * w) / grid.size
    return float(np.max(np.abs(twice - once)))


@dataclass
class WienerResult:
    lhs: float
    rhs: float
    gap: float
    eigenvalues: list
    methods: list
    N: int
    quad_points: int
    x: tuple

    def to_dict(self):
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "eigenvalues": [[float(np.real(w)), float(np.imag(w))] for w in self.eigenvalues],
            "methods": self.methods,
            "N": self.N,
            "quad_points": self.quad_points,
            "x": list(self.x),
        }


def _plus_applies(walk):
    try:
        check_plus_hypotheses(walk)
    except ValueError:
        return False
    return True


def wiener_check(walk: Walk, phi, x, N, quad_points, samples=50, seed=0) -> WienerResult:
    """Compare the Cesaro average of p_n(phi; x) with the squared eigenprojections at x."""
    x = tuple(int(c) for c in x)
    check_resolved(x, quad_points)
    lhs = time_average(walk, phi, x, N)
    spectrum = candidate_spectrum(walk, samples, seed)
    rhs, methods = 0.0, []
    for omega in spectrum:
        if abs(omega - 1) < 1e-6 and _plus_applies(walk):
            v = project_plus(walk, phi, x, quad_points)
            methods.append("plus-eigenvector")
        else:
            v = spectral_projection_field(walk, omega, phi, quad_points).at(x)
            methods.append("symbol-projector")
        rhs += float(np.sum(np.abs(v) ** 2))
    return WienerResult(lhs, rhs, abs(lhs - rhs), spectrum, methods, N, quad_points, x)
