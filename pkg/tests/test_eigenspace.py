import mpmath
import numpy as np
import pytest

from putowalk.eigenspace import (
    check_plus_hypotheses,
    idempotence_defect,
    lazy_grover_norm,
    lazy_grover_plus_eigenvector,
    plus_eigenvector,
    plus_projection_field,
    project_plus,
    projector_spectral,
    spectral_projection_field,
    wiener_check,
)
from putowalk.deformation import sbj_coin, wkkk_coin
from putowalk.criteria import eta_grover
from putowalk.torus import TorusGrid, random_regular_points, singular_mask
from putowalk.walks import PLAIN, Walk, builtin_walk, fourier_walk_2d, reflection_coin, symbol

# DERIVED: mpmath quadrature of the +1 projection for lazy Grover, phi = e2, x = 0
# (see test_rhs_matches_mpmath_oracle); closed form 5 - 2 sqrt 6.
LAZY_RHS = 0.10102051443364381

REFLECTION_WALKS = [
    builtin_walk("lazy", 1),
    builtin_walk("lazy", 2),
    builtin_walk("std", 2),
    builtin_walk("std", 3),
    builtin_walk("lazy", 1, sbj_coin(0.3)),
    builtin_walk("std", 2, wkkk_coin(0.3)),
]


def _mp_projection_component(k):
    def integrand(theta):
        z = mpmath.expj(theta)
        d2 = mpmath.mpf(1) / 4 + 2 / abs(1 + z) ** 2
        comp = [z / (1 + z), mpmath.mpf(1) / 2, 1 / (1 + z)][k]
        return comp / (2 * d2)
    return mpmath.quad(integrand, [-mpmath.pi, 0, mpmath.pi]) / (2 * mpmath.pi)


def test_rhs_matches_mpmath_oracle():
    mpmath.mp.dps = 30
    rhs = sum(abs(_mp_projection_component(k)) ** 2 for k in range(3))
    assert abs(rhs - (5 - 2 * mpmath.sqrt(6))) < 1e-20
    assert float(rhs) == pytest.approx(LAZY_RHS, abs=1e-16)


def test_project_plus_lazy_grover_value():
    v = project_plus(builtin_walk("lazy", 1), [0, 1, 0], (0,), 2048)
    assert np.sum(np.abs(v) ** 2) == pytest.approx(LAZY_RHS, abs=1e-12)
    assert np.allclose(v[0], v[2]) and v[1].real > 0


def test_lazy_grover_closed_form_at_one():
    assert lazy_grover_norm(np.array([[1.0]]))[0] == pytest.approx(np.sqrt(3) / 2)
    w = plus_eigenvector(builtin_walk("lazy", 1), [1])
    assert np.allclose(w, np.full(3, 1 / np.sqrt(3)))


@pytest.mark.parametrize("walk", REFLECTION_WALKS, ids=lambda w: f"{w.name}-{w.dimension}")
def test_plus_eigenvector_properties(walk, rng):
    mu = check_plus_hypotheses(walk)
    for z in random_regular_points(walk, 100, rng):
        w = plus_eigenvector(walk, z)
        assert abs(np.linalg.norm(w) - 1) < 1e-9
        assert np.linalg.norm(symbol(walk, z) @ w - w) < 1e-9
        raw = mu - eta_grover(walk, z) @ mu
        assert np.max(np.abs(raw / np.linalg.norm(raw) - w)) < 1e-10


def test_lazy_grover_norm_matches_eta_form(rng):
    w = builtin_walk("lazy", 2)
    mu = check_plus_hypotheses(w)
    zs = random_regular_points(w, 50, rng)
    d = lazy_grover_norm(zs)
    for z, dz, vec in zip(zs, d, lazy_grover_plus_eigenvector(zs)):
        raw = mu - eta_grover(w, z) @ mu
        # mu - eta mu = (2/sqrt(5)) * (the unnormalized D(z) vector)
        assert abs(np.linalg.norm(raw) - 2 * dz / np.sqrt(5)) < 1e-10
        assert np.max(np.abs(vec - plus_eigenvector(w, z))) < 1e-10


def test_plus_eigenvector_errors():
    with pytest.raises(ValueError, match="singular set E"):
        plus_eigenvector(builtin_walk("lazy", 1), [-1])
    with pytest.raises(ValueError, match="reflection"):
        plus_eigenvector(fourier_walk_2d(), [1j, 1j])
    with pytest.raises(ValueError, match="symmetric"):
        prod = builtin_walk("product-triangular3", 2)
        plus_eigenvector(Walk(prod.steps, prod.resolution, prod.coin, PLAIN), [1j, 1j])
    lazy = builtin_walk("lazy", 1)
    skew = lazy.with_coin(reflection_coin(np.array([0.8, 0.0, 0.6])))
    with pytest.raises(ValueError, match="P_alpha mu"):
        plus_eigenvector(skew, [1j])


def test_projector_spectral_examples(rng):
    lazy = builtin_walk("lazy", 1)
    for z in random_regular_points(lazy, 20, rng):
        p = projector_spectral(lazy, 1, z)
        w = plus_eigenvector(lazy, z)
        assert np.trace(p).real == pytest.approx(1.0)
        assert np.max(np.abs(p - np.outer(w, w.conj()))) < 1e-8
    std = builtin_walk("std", 2)
    for z in random_regular_points(std, 20, rng):
        p = projector_spectral(std, 1, z)
        assert np.max(np.abs(p @ p - p)) < 1e-10
        assert np.max(np.abs(p - p.conj().T)) < 1e-10
    with pytest.raises(ValueError, match="not an eigenvalue"):
        projector_spectral(fourier_walk_2d(), 1, [np.exp(0.3j), np.exp(1.1j)])


def test_projection_window_is_contraction():
    walk = builtin_walk("lazy", 1)
    field = plus_projection_field(walk, [0, 1, 0], 2048)
    total = sum(np.sum(np.abs(field.at((x,))) ** 2) for x in range(-40, 41))
    assert total <= 1 + 1e-6
    # the projection has norm^2 <phi, Pi phi>, the x = 0 coin-2 entry
    assert total == pytest.approx(field.at((0,))[1].real, abs=1e-10)


def test_field_and_direct_sum_agree_and_translate():
    walk = builtin_walk("lazy", 1)
    phi = np.array([0.6, 0, 0.8j])
    field = plus_projection_field(walk, phi, 256)
    for x in (-5, 0, 3, 17):
        assert np.max(np.abs(field.at((x,)) - project_plus(walk, phi, (x,), 256))) < 1e-10
    # shifting x by y multiplies the integrand by z^{-y}
    grid = TorusGrid(1, 256)
    zs = grid.points()[~singular_mask(walk, grid.points(), "E")]
    ws = np.array([plus_eigenvector(walk, z) for z in zs])
    amp = ws.conj() @ phi
    for x, y in [(0, 4), (2, -3)]:
        shifted = ((amp * zs[:, 0] ** -(x + y)) @ ws) / grid.size
        assert np.max(np.abs(shifted - project_plus(walk, phi, (x + y,), 256))) < 1e-10


def test_unresolved_site_is_rejected():
    walk = builtin_walk("lazy", 1)
    with pytest.raises(ValueError, match="aliases"):
        project_plus(walk, [0, 1, 0], (32,), 64)
    with pytest.raises(ValueError, match="aliases"):
        plus_projection_field(walk, [0, 1, 0], 64).at((-40,))


def test_idempotence_defect_is_small():
    assert idempotence_defect(builtin_walk("lazy", 1), [0, 1, 0], 2048, 30) < 1e-3
    assert idempotence_defect(builtin_walk("lazy", 2), [0, 0, 1, 0, 0], 64, 6) < 1e-3


def test_spectral_field_matches_plus_field():
    walk = builtin_walk("lazy", 1)
    a = plus_projection_field(walk, [0, 1, 0], 128)
    b = spectral_projection_field(walk, 1, [0, 1, 0], 128)
    for x in range(-5, 6):
        assert np.max(np.abs(a.at((x,)) - b.at((x,)))) < 1e-8


def test_wiener_lazy_grover():
    res = wiener_check(builtin_walk("lazy", 1), [0, 1, 0], (0,), 4000, 2048)
    assert res.gap < 5e-3
    assert res.methods == ["plus-eigenvector"]
    assert res.rhs == pytest.approx(LAZY_RHS, abs=1e-12)


def test_wiener_gap_shrinks_with_n():
    walk = builtin_walk("lazy", 1)
    gaps = [wiener_check(walk, [0, 1, 0], (0,), n, 512).gap for n in (250, 500, 1000, 2000)]
    for a, b in zip(gaps, gaps[1:]):
        assert b < 1.1 * a


def test_wiener_far_site_and_fourier_walk():
    res = wiener_check(builtin_walk("lazy", 1), [0, 1, 0], (500,), 100, 2048)
    assert res.lhs == 0.0 and res.rhs < 1e-20
    four = wiener_check(fourier_walk_2d(), np.ones(4) / 2, (0, 0), 100, 32)
    assert four.eigenvalues == [] and four.rhs == 0.0


def test_wiener_std_grover_uses_both_projectors():
    res = wiener_check(builtin_walk("std", 2), [0.5, 0.5, 0.5, 0.5], (0, 0), 200, 64)
    assert len(res.eigenvalues) == 2
    assert res.methods == ["plus-eigenvector", "symbol-projector"]
    assert res.gap < 0.05
