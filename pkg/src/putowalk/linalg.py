"""Dense complex linear algebra for small matrices (D <= 32).

Matrices are plain ``numpy`` complex128 arrays.  Everything here is a pure
function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _kernels

CLUSTER_TOL = 1e-8


def as_cmatrix(m, name="matrix"):
    """Return ``m`` as a finite 2-D complex128 array or raise ``ValueError``."""
    arr = np.array(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def unitarity_defect(u):
    """max-abs entry of U*U - I."""
    u = np.asarray(u)
    return float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[-1]))))


def min_singular_value(m) -> float:
    """Smallest singular value of ``m``.

    Computed by a one-sided Jacobi SVD (or LAPACK in the fallback backend) on
    ``m`` itself rather than from the eigenvalues of ``M*M``: squaring loses
    half the digits, which would put exactly singular matrices at ~1e-8.
    """
    m = as_cmatrix(m)
    if 0 in m.shape:
        raise ValueError("min_singular_value of a dimension-zero matrix")
    smin, _ = _kernels.extreme_singular_values(m[None])
    return float(smin[0])


def batch_extreme_singular_values(mats):
    """(smallest, largest) singular values over a ``(n, r, c)`` batch."""
    return _kernels.extreme_singular_values(np.ascontiguousarray(mats, dtype=np.complex128))


@dataclass(frozen=True)
class Cluster:
    value: complex
    indices: tuple[int, ...]

    @property
    def multiplicity(self):
        return len(self.indices)


@dataclass(frozen=True)
class EigenSystem:
    """Eigen-decomposition of a normal matrix.

    ``eigenvectors`` holds orthonormal columns; ``clusters`` groups indices
    of eigenvalues that agree within the clustering tolerance.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    clusters: tuple[Cluster, ...]
    tol: float

    @property
    def values(self):
        return [c.value for c in self.clusters]

    def find(self, value, tol=None):
        tol = self.tol if tol is None else tol
        best = None
        for c in self.clusters:
            dist = abs(c.value - value)
            if dist < tol and (best is None or dist < abs(best.value - value)):
                best = c
        return best

    def basis(self, value, tol=None):
        """Orthonormal basis (columns) of the eigenspace; empty if absent."""
        c = self.find(value, tol)
        if c is None:
            return np.zeros((self.eigenvectors.shape[0], 0), dtype=np.complex128)
        return self.eigenvectors[:, list(c.indices)]

    def projector(self, value, tol=None):
        b = self.basis(value, tol)
        return b @ dagger(b)

    def multiplicity(self, value, tol=None):
        c = self.find(value, tol)
        return 0 if c is None else c.multiplicity


def cluster_values(values, tol):
    """Single-linkage grouping of complex numbers closer than ``tol``."""
    n = len(values)
    parent = list(range(n))

    def root(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) < tol:
                parent[root(i)] = root(j)
    groups = {}
    for i in range(n):
        groups.setdefault(root(i), []).append(i)
    clusters = [
        Cluster(complex(np.mean([values[i] for i in idx])), tuple(idx))
        for idx in groups.values()
    ]
    clusters.sort(key=lambda c: (round(float(np.angle(c.value)), 12), abs(c.value)))
    return tuple(clusters)


def eig_normal(m, tol=CLUSTER_TOL) -> EigenSystem:
    """Full eigensystem of a normal matrix via the complex Schur form.

    For a normal matrix the Schur factor is diagonal, so the unitary Schur
    vectors are orthonormal eigenvectors even inside degenerate clusters.
    """
    m = as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"eig_normal needs a square matrix, got {m.shape}")
    scale = max(1.0, float(np.linalg.norm(m, 2)) ** 2)
    defect = float(np.linalg.norm(m @ dagger(m) - dagger(m) @ m)) / scale
    if defect >= tol:
        raise ValueError(f"matrix is not normal: ||MM* - M*M|| = {defect:.3e}")
    t, z = scipy.linalg.schur(m, output="complex")
    values = np.diag(t).copy()
    return EigenSystem(values, z, cluster_values(values, tol), tol)


def projector_onto_span(vectors, dim=None, tol=1e-12):
    """Orthogonal projector onto the span of ``vectors``.

    ``dim`` is needed only when ``vectors`` is empty.
    """
    vecs = [np.asarray(v, dtype=np.complex128).ravel() for v in vectors]
    if not vecs:
        if dim is None:
            raise ValueError("dim is required for an empty vector list")
        return np.zeros((dim, dim), dtype=np.complex128)
    lengths = {v.size for v in vecs}
    if len(lengths) != 1:
        raise ValueError(f"inconsistent vector lengths {sorted(lengths)}")
    if dim is not None and dim not in lengths:
        raise ValueError(f"vectors have length {lengths.pop()}, expected {dim}")
    a = np.stack(vecs, axis=1)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    q = u[:, :rank]
    p = q @ dagger(q)
    return 0.5 * (p + dagger(p))


def kernel_basis(m, tol=1e-9):
    """Orthonormal basis of the numerical kernel of ``m`` (list of vectors)."""
    m = as_cmatrix(m)
    rows, cols = m.shape
    if cols == 0:
        return []
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    small = [k for k in range(cols) if k >= len(s) or s[k] < tol]
    return [np.conj(vh[k]) for k in small]
