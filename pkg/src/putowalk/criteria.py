"""Eigenvalue existence and exclusion for walks.

Two layers:

* grid scans, which test a pointwise condition at every point of a
  :class:`~putowalk.torus.TorusGrid` and return a :class:`SpectralReport`;
* structural criteria, which read the answer off the step set, the
  resolution of unity and the coin directly.

A point value below ``zero_tol`` means "the condition holds here"; a value
above ``sep_tol`` means "it certainly fails here".  Since an eigenvalue of
the walk must show up at *every* torus point, one certain failure is enough
for ABSENT, while PRESENT needs every grid point to pass.  Anything else is
INCONCLUSIVE.  Verdicts are grid-certified, not proofs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .linalg import batch_extreme_singular_values, dagger
from .torus import (
    TorusGrid,
    map_chunks,
    random_regular_points,
    singular_mask,
)
from .walks import (
    PLAIN,
    PRODUCT,
    Coin,
    Walk,
    as_torus_point,
    builtin_walk,
    monomials,
    symbols,
)

ZERO_TOL = 1e-9
SEP_TOL = 1e-3
MAX_LISTED_POINTS = 20


class Verdict(str, enum.Enum):
    PRESENT = "present"
    ABSENT = "absent"
    INCONCLUSIVE = "inconclusive"


def _cx(v):
    return [float(np.real(v)), float(np.imag(v))]


@dataclass
class SpectralReport:
    """Outcome of a grid scan for one candidate eigenvalue ``omega``.

    ``value_min``/``value_max`` are extremes of the criterion's own pointwise
    statistic; ``symbol_min``/``symbol_max`` are extremes of
    ``sigma_min(symbol(z) - omega I)`` over the same points.
    """

    omega: complex
    verdict: Verdict
    criterion: str
    grid: dict
    value_min: float = float("nan")
    value_max: float = float("nan")
    symbol_min: float = float("nan")
    symbol_max: float = float("nan")
    n_points: int = 0
    n_skipped: int = 0
    n_pass: int = 0
    n_fail: int = 0
    grey_points: list = field(default_factory=list)
    witnesses: np.ndarray | None = field(default=None, repr=False)
    points: np.ndarray | None = field(default=None, repr=False)
    note: str = ""

    @property
    def uniform_gap(self):
        """True when every grid point fails by more than the separation threshold."""
        return self.n_points > 0 and self.n_fail == self.n_points

    def to_dict(self):
        return {
            "omega": _cx(self.omega),
            "verdict": self.verdict.value,
            "criterion": self.criterion,
            "grid": self.grid,
            "value_min": self.value_min,
            "value_max": self.value_max,
            "symbol_min": self.symbol_min,
            "symbol_max": self.symbol_max,
            "n_points": self.n_points,
            "n_skipped": self.n_skipped,
            "n_pass": self.n_pass,
            "n_fail": self.n_fail,
            "uniform_gap": self.uniform_gap,
            "grey_points": [[_cx(c) for c in z] for z in self.grey_points],
            "note": self.note,
        }


def _verdict(stat, zero_tol, sep_tol):
    if stat.size == 0:
        return Verdict.INCONCLUSIVE
    if stat.max() < zero_tol:
        return Verdict.PRESENT
    if stat.max() > sep_tol:
        return Verdict.ABSENT
    return Verdict.INCONCLUSIVE


def symbol_sigma_min(walk: Walk, omega, zs):
    """sigma_min(symbol(z) - omega I) for each row of ``zs``."""
    eye = np.eye(walk.coin_dim)

    def chunk(c):
        return batch_extreme_singular_values(symbols(walk, c) - omega * eye)[0]

    parts = map_chunks(chunk, zs)
    return np.concatenate(parts) if parts else np.empty(0)


def _report(walk, omega, criterion, grid, zs, stat, zero_tol, sep_tol,
            n_skipped=0, witnesses=None, note=""):
    verdict = _verdict(stat, zero_tol, sep_tol)
    sym = symbol_sigma_min(walk, omega, zs) if zs.shape[0] else np.empty(0)
    grey = np.nonzero((stat >= zero_tol) & (stat <= sep_tol))[0][:MAX_LISTED_POINTS]
    empty = stat.size == 0
    return SpectralReport(
        omega=complex(omega),
        verdict=verdict,
        criterion=criterion,
        grid=grid.meta() if isinstance(grid, TorusGrid) else dict(grid),
        value_min=float("nan") if empty else float(stat.min()),
        value_max=float("nan") if empty else float(stat.max()),
        symbol_min=float("nan") if empty else float(sym.min()),
        symbol_max=float("nan") if empty else float(sym.max()),
        n_points=int(stat.size),
        n_skipped=int(n_skipped),
        n_pass=int(np.sum(stat < zero_tol)),
        n_fail=int(np.sum(stat > sep_tol)),
        grey_points=[tuple(zs[k]) for k in grey],
        witnesses=witnesses,
        points=zs,
        note=note,
    )


def scan_symbol(walk: Walk, omega, grid: TorusGrid, zero_tol=ZERO_TOL, sep_tol=SEP_TOL):
    """Scan sigma_min(symbol(z) - omega I) over the grid.

    omega is an eigenvalue of the walk iff it is an eigenvalue of the symbol at
    every torus point, so this needs no coin structure and works for products.
    """
    if grid.dimension != walk.dimension:
        raise ValueError("grid and walk dimensions differ")
    zs = grid.points()
    stat = symbol_sigma_min(walk, omega, zs)
    return _report(walk, omega, "symbol-scan", grid, zs, stat, zero_tol, sep_tol)


# -- eta maps -------------------------------------------------------------------


def _check_no_origin(walk):
    if walk.steps.contains_origin:
        raise ValueError("general eta undefined with lazy term (0 in step set)")
    if walk.kind != PLAIN:
        raise ValueError("eta maps are defined for plain walks only")


def _coin_value_projectors(coin: Coin, omega):
    others = [lam for lam in coin.spectrum if abs(lam - omega) >= 1e-8]
    return others, [coin.projector(lam) for lam in others]


def _eta_general_batch(walk: Walk, omega, zs):
    mono = monomials(walk.steps, zs)
    proj = walk.resolution.projections
    others, pis = _coin_value_projectors(walk.coin, omega)
    dim = walk.coin_dim
    out = np.zeros((zs.shape[0], dim, dim), dtype=np.complex128)
    inv = 1.0 / omega
    for a in range(len(walk.steps)):
        za = mono[:, a]
        for lam, pi in zip(others, pis):
            coef = (1.0 - inv * lam * za) / (1.0 - za)
            out += coef[:, None, None] * (proj[a] @ pi)[None]
    return out


def _regular_point(walk, z, which):
    z = as_torus_point(z, walk.dimension)
    if singular_mask(walk, z[None], which)[0]:
        raise ValueError(f"point {z} lies in the singular set {which}")
    return z


def eta_general(walk: Walk, omega, z):
    """Sum over steps alpha and coin eigenvalues lambda != omega of
    (1 - lambda z**alpha / omega) / (1 - z**alpha) P_alpha pi_lambda."""
    _check_no_origin(walk)
    z = _regular_point(walk, z, "L")
    return _eta_general_batch(walk, complex(omega), z[None])[0]


def eta_general_forms(walk: Walk, omega, z):
    """The defining sum and its two closed rewrites (three matrices that must agree)."""
    _check_no_origin(walk)
    z = _regular_point(walk, z, "L")
    omega = complex(omega)
    first = _eta_general_batch(walk, omega, z[None])[0]
    dim = walk.coin_dim
    eye = np.eye(dim)
    c = walk.coin.matrix
    perp = eye - walk.coin.projector(omega)
    mono = monomials(walk.steps, z[None])[0]
    second = perp.astype(np.complex128)
    third = np.zeros((dim, dim), dtype=np.complex128)
    for a, za in enumerate(mono):
        p = walk.resolution[a]
        second = second + za / (1 - za) * p @ (eye - c / omega) @ perp
        third = third + 1 / (1 - za) * p @ (eye - za * c / omega) @ perp
    return first, second, third


@dataclass(frozen=True)
class FourierEta:
    eta: np.ndarray
    K: np.ndarray
    L: np.ndarray
    M: np.ndarray


def fourier_kernels(walk: Walk, z):
    """The diagonal-in-steps matrices K, L, M at a point off L."""
    _check_no_origin(walk)
    z = _regular_point(walk, z, "L")
    mono = monomials(walk.steps, z[None])[0]
    proj = walk.resolution.projections
    k = sum((1 + za) / (1 - za) * p for za, p in zip(mono, proj))
    l = sum((1 + 1j * za) / (1 - za) * p for za, p in zip(mono, proj))
    m = sum((1 - 1j * za) / (1 - za) * p for za, p in zip(mono, proj))
    return k, l, m


# which of K, L, M multiplies pi_{i^j} in eta(i^k; z): _FOURIER_TABLE[k][j]
_FOURIER_TABLE = (
    (None, "M", "K", "L"),
    ("L", None, "M", "K"),
    ("K", "L", None, "M"),
    ("M", "K", "L", None),
)


def eta_fourier(walk: Walk, k, z) -> FourierEta:
    """eta(i**k; z) assembled from K, L, M and the coin's four eigenprojections."""
    if not walk.coin.is_fourier:
        raise ValueError("coin is not of Fourier type (C**4 != I)")
    if k not in (0, 1, 2, 3):
        raise ValueError(f"k must be 0, 1, 2 or 3, got {k!r}")
    K, L, M = fourier_kernels(walk, z)
    mats = {"K": K, "L": L, "M": M}
    dim = walk.coin_dim
    eta = np.zeros((dim, dim), dtype=np.complex128)
    for j, key in enumerate(_FOURIER_TABLE[k]):
        if key is not None:
            eta += mats[key] @ walk.coin.projector(1j ** j)
    return FourierEta(eta, K, L, M)


def _eta_grover_batch(walk: Walk, zs):
    mono = monomials(walk.steps, zs)
    coef = (1.0 - mono) / (1.0 + mono)
    zero = ~np.any(walk.steps.array != 0, axis=1)
    coef[:, zero] = 0.0
    return np.einsum("na,aij->nij", coef, walk.resolution.projections)


def eta_grover(walk: Walk, z):
    """Sum over steps of (1 - z**alpha) / (1 + z**alpha) P_alpha (zero on P_0)."""
    if not walk.coin.is_grover:
        raise ValueError("coin is not of Grover type (C**2 != I)")
    z = _regular_point(walk, z, "E")
    return _eta_grover_batch(walk, z[None])[0]


def reconstruct_eigenvector(eta, psi):
    """phi = psi - eta psi, the symbol eigenvector built from a witness."""
    psi = np.asarray(psi)
    return psi - eta @ psi


# -- grid-certified criteria ------------------------------------------------------


def _kernel_stat(mats, basis):
    """Scaled sigma_min of each matrix and a minimizing witness in coin space."""
    _, s, vh = np.linalg.svd(mats, full_matrices=False)
    smin = s[:, -1]
    scale = np.maximum(1.0, s[:, 0])
    coeffs = np.conj(vh[:, -1, :])
    witnesses = coeffs @ basis.T
    return smin / scale, witnesses


def _regular_grid_points(walk, grid, which):
    zs = grid.points()
    bad = singular_mask(walk, zs, which)
    return zs[~bad], int(bad.sum())


def criterion_general(walk: Walk, omega, grid: TorusGrid, zero_tol=ZERO_TOL, sep_tol=SEP_TOL):
    """For each grid point off L, look for nonzero psi orthogonal to E(omega)
    with eta(omega; z) psi in E(omega).

    The pointwise statistic is the smallest singular value of
    (I - pi_omega) eta(omega; z) B, B an orthonormal basis of E(omega)-perp,
    divided by max(1, largest singular value).
    """
    _check_no_origin(walk)
    if grid.dimension != walk.dimension:
        raise ValueError("grid and walk dimensions differ")
    coin = walk.coin
    omega = complex(omega)
    if coin.multiplicity(omega) == 0:
        return SpectralReport(
            omega=omega, verdict=Verdict.ABSENT, criterion="coin-spectrum",
            grid=grid.meta(), note="not an eigenvalue of the coin",
        )
    others = [lam for lam in coin.spectrum if abs(lam - omega) >= 1e-8]
    if not others:
        raise ValueError("coin is a scalar multiple of the identity")
    basis = np.concatenate([coin.basis(lam) for lam in others], axis=1)
    perp = np.eye(coin.dim) - coin.projector(omega)
    zs, skipped = _regular_grid_points(walk, grid, "L")

    def chunk(c):
        return _kernel_stat(perp @ _eta_general_batch(walk, omega, c) @ basis, basis)

    parts = map_chunks(chunk, zs)
    stat = np.concatenate([p[0] for p in parts]) if parts else np.empty(0)
    wit = np.concatenate([p[1] for p in parts]) if parts else None
    return _report(walk, omega, "eta-general", grid, zs, stat, zero_tol, sep_tol,
                   skipped, wit)


def criterion_grover(walk: Walk, sign, grid: TorusGrid, zero_tol=ZERO_TOL, sep_tol=SEP_TOL):
    """For each grid point off E, look for nonzero psi in E(sign) with
    eta(z) psi in E(-sign); statistic as in :func:`criterion_general`."""
    if not walk.coin.is_grover:
        raise ValueError("coin is not of Grover type (C**2 != I)")
    if walk.kind != PLAIN:
        raise ValueError("Grover criterion applies to plain walks")
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    if grid.dimension != walk.dimension:
        raise ValueError("grid and walk dimensions differ")
    coin = walk.coin
    basis = coin.basis(float(sign))
    proj = coin.projector(float(sign))
    zs, skipped = _regular_grid_points(walk, grid, "E")

    def chunk(c):
        return _kernel_stat(proj @ _eta_grover_batch(walk, c) @ basis, basis)

    parts = map_chunks(chunk, zs)
    stat = np.concatenate([p[0] for p in parts]) if parts else np.empty(0)
    wit = np.concatenate([p[1] for p in parts]) if parts else None
    return _report(walk, float(sign), "eta-grover", grid, zs, stat, zero_tol, sep_tol,
                   skipped, wit)


# -- structural criteria ---------------------------------------------------------


@dataclass(frozen=True)
class StructuralResult:
    """``applies``: hypotheses met; ``holds``: the conclusion is established.

    ``effect`` says what ``holds`` establishes for ``eigenvalue``:
    "present" or "absent".
    """

    criterion: str
    eigenvalue: complex
    effect: str
    applies: bool
    holds: bool
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "criterion": self.criterion,
            "eigenvalue": _cx(self.eigenvalue),
            "effect": self.effect,
            "applies": self.applies,
            "holds": self.holds,
            "detail": self.detail,
        }


def symmetric_sufficient(walk: Walk, sign, tol=1e-10) -> StructuralResult:
    """Symmetric step set with ||P_alpha phi|| = ||P_-alpha phi|| on E(sign).

    The norm condition for all phi in E(sign) is checked in its exact
    linear form: the compression pi_s (P_alpha - P_-alpha) pi_s vanishes.
    """
    name = "symmetric-steps"
    if not walk.coin.is_grover or walk.kind != PLAIN:
        return StructuralResult(name, float(sign), "present", False, False,
                                {"reason": "needs a plain walk with a Grover-type coin"})
    if not walk.steps.symmetric_about_origin:
        return StructuralResult(name, float(sign), "present", False, False,
                                {"reason": "step set not symmetric about the origin"})
    pi = walk.coin.projector(float(sign))
    worst = 0.0
    for alpha in walk.steps.half_set():
        minus = tuple(-c for c in alpha)
        diff = walk.projection(alpha) - walk.projection(minus)
        worst = max(worst, float(np.max(np.abs(pi @ diff @ pi))))
    return StructuralResult(name, float(sign), "present", True, worst < tol,
                            {"max_compressed_defect": worst})


def reflection_no_minus(walk: Walk, tol=1e-12) -> StructuralResult:
    """0 in S, rank P_0 = 1, reflection coin C_mu: P_0 mu != 0 excludes -1."""
    name = "lazy-reflection"
    steps = walk.steps
    if walk.kind != PLAIN or not steps.contains_origin:
        return StructuralResult(name, -1.0, "absent", False, False,
                                {"reason": "needs a plain walk with 0 in the step set"})
    p0 = walk.projection((0,) * steps.dimension)
    if walk.resolution.rank(steps.index((0,) * steps.dimension)) != 1:
        return StructuralResult(name, -1.0, "absent", False, False, {"reason": "rank P_0 != 1"})
    if not walk.coin.is_reflection:
        return StructuralResult(name, -1.0, "absent", False, False,
                                {"reason": "coin not of reflection type"})
    mu = walk.coin.reflection_vector()
    norm = float(np.linalg.norm(p0 @ mu))
    return StructuralResult(name, -1.0, "absent", True, norm > tol, {"norm_P0_mu": norm})


def lazy_both_eigen(mu, tol=1e-12) -> StructuralResult:
    """Lazy layout, mu = (a_1..a_2d+1): |a_j| = |a_d+1+j| and a_d+1 = 0 give both +-1."""
    mu = np.asarray(mu, dtype=np.complex128).ravel()
    if mu.size < 3 or mu.size % 2 == 0:
        raise ValueError(f"reflection vector for a lazy walk needs odd length >= 3, got {mu.size}")
    d = (mu.size - 1) // 2
    pair_gap = float(np.max(np.abs(np.abs(mu[:d]) - np.abs(mu[d + 1:]))))
    rest = float(abs(mu[d]))
    applies = pair_gap < tol and rest < tol
    return StructuralResult("lazy-both-signs", -1.0, "present", applies, applies,
                            {"pair_gap": pair_gap, "rest_component": rest})


def product_dim_criterion(coin: Coin) -> StructuralResult:
    """Product walk with dim E(1) < dim E(-1) has eigenvalue 1."""
    if not coin.is_grover:
        return StructuralResult("product-dimension", 1.0, "present", False, False,
                                {"reason": "coin not of Grover type"})
    plus, minus = coin.multiplicity(1.0), coin.multiplicity(-1.0)
    return StructuralResult("product-dimension", 1.0, "present", True, plus < minus,
                            {"dim_plus": plus, "dim_minus": minus})


def is_lazy_layout(walk: Walk):
    """True when steps and projections are exactly the built-in lazy layout."""
    d = walk.dimension
    if walk.kind != PLAIN or walk.coin_dim != 2 * d + 1:
        return False
    ref = builtin_walk("lazy", d)
    if walk.steps.steps != ref.steps.steps:
        return False
    return bool(np.allclose(walk.resolution.projections, ref.resolution.projections, atol=1e-12))


def structural_criteria(walk: Walk):
    """Every structural criterion whose setting matches the walk."""
    out = []
    coin = walk.coin
    if walk.kind == PRODUCT:
        out.append(product_dim_criterion(coin))
        return out
    if coin.is_grover:
        out.append(symmetric_sufficient(walk, 1))
        out.append(symmetric_sufficient(walk, -1))
        out.append(reflection_no_minus(walk))
        if coin.is_reflection and is_lazy_layout(walk):
            out.append(lazy_both_eigen(coin.reflection_vector()))
    return out


# -- candidate spectrum ------------------------------------------------------------


def candidate_spectrum(walk: Walk, sample_count=50, seed=0, tol=1e-6):
    """Values that are eigenvalues of the symbol at every sampled point.

    Only these can be eigenvalues of the walk.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    zs = random_regular_points(walk, sample_count, rng)
    vals = np.linalg.eigvals(symbols(walk, zs))
    survivors = []
    for lam in vals[0]:
        hits = [row[np.argmin(np.abs(row - lam))] for row in vals]
        if max(abs(h - lam) for h in hits) < tol:
            mean = complex(np.mean(hits))
            if all(abs(mean - s) >= tol for s in survivors):
                survivors.append(mean)
    survivors.sort(key=lambda v: (round(float(np.angle(v)), 9), abs(v)))
    return survivors


# -- 2-D Fourier walk condition matrices -----------------------------------------


def fourier4_condition_matrix(omega, z):
    """Reduced linear system for the 2-D Fourier walk at eigenvalue ``omega``.

    Coordinates parametrize E(omega)-perp for the order-4 DFT coin: (a, b) for
    omega = 1, (a, b, c) for omega = i and -1.  A nonzero kernel vector exists
    exactly when eta(omega; z) maps some psi in E(omega)-perp into E(omega).
    """
    z1, z2 = as_torus_point(z, 2)
    if abs(omega - 1) < 1e-12:
        return np.array([
            [-2j + (3 + 1j) * z1 - (1 - 1j) * z2 - 2 * z1 * z2,
             2j + (1 - 1j) * z1 - (3 + 1j) * z2 + 2 * z1 * z2],
            [2 * (-1j + 2 * z1 - (1 - 1j) * z2 - z1 * z2),
             2 * (1j - (1 + 1j) * z2 + z1 * z2)],
        ])
    if abs(omega - 1j) < 1e-12:
        return np.array([
            [1j * (2 - z1 - z2), 2 * (z1 + z2 - 2 * z1 * z2), -1j * (2 - z1 - z2)],
            [2 + 1j * z1, 2j * z1, 1j * z1],
            [1j * z2, -2j * z2, 2 + 1j * z2],
        ])
    if abs(omega + 1) < 1e-12:
        return np.array([
            [(1 + z1) * (1 - z2), 2 * (1 - z1 * z2), (1 + z1) * (1 - z2)],
            [1 - 1j, 2 * (1 + z1), 1 + 1j + 2 * z1],
            [1 - 1j, 2 * (1 + z2), 1 + 1j + 2 * z2],
        ])
    raise ValueError(f"no condition matrix for omega={omega!r} (coin eigenvalues are 1, i, -1)")


def fourier4_perp_parametrization(omega):
    """Columns map condition-matrix coordinates to vectors in E(omega)-perp."""
    if abs(omega - 1) < 1e-12:
        return np.array([[1, 1], [-2, 0], [-1, -1], [0, -2]], dtype=np.complex128)
    if abs(omega - 1j) < 1e-12:
        return np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [0, 1, 0]], dtype=np.complex128)
    if abs(omega + 1) < 1e-12:
        return np.array([[1, 1, 1], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=np.complex128)
    raise ValueError(f"no parametrization for omega={omega!r}")
