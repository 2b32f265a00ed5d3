import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from putowalk.linalg import unitarity_defect
from putowalk.walks import (
    BUILTIN_WALKS,
    PRODUCT,
    Coin,
    CoinType,
    ResolutionOfUnity,
    StepSet,
    builtin_walk,
    classify,
    fourier_coin,
    fourier_walk_2d,
    grover_coin,
    reflection_coin,
    shift_symbols,
    symbol,
    symbols,
    uniform_vector,
    validate_resolution,
)

from conftest import random_torus

ALL_WALKS = [("std", 1), ("std", 2), ("std", 3), ("lazy", 1), ("lazy", 2),
             ("triangular6", 2), ("product-triangular3", 2)]


def test_step_set_flags():
    s = StepSet(((1, 0), (-1, 0), (0, 1), (0, -1)))
    assert s.symmetric_about_origin and not s.contains_origin
    assert StepSet(((1, 0), (0, 1), (-1, -1))).symmetric_about_origin is False
    with pytest.raises(ValueError, match="distinct"):
        StepSet(((1,), (1,)))
    assert set(StepSet(((1,), (0,), (-1,))).half_set()) in ({(1,)}, {(-1,)})


def test_validate_resolution_examples():
    std = ResolutionOfUnity(np.array([np.diag([1, 0]), np.diag([0, 1])]))
    assert validate_resolution(std)
    twice = validate_resolution(np.array([np.diag([1, 0]), np.diag([1, 0])]))
    assert not twice and twice.condition in ("orthogonality", "sum")
    assert validate_resolution(np.array([np.diag([1, 0]), np.zeros((2, 2))])).condition == "sum"
    overlap = validate_resolution(np.array([np.diag([1, 0]), np.eye(2)]))
    assert overlap.condition == "orthogonality" and overlap.indices == (0, 1)
    bad = validate_resolution(np.array([np.array([[1, 1], [0, 0]]), np.eye(2)]))
    assert bad.condition == "projection"
    with pytest.raises(ValueError):
        validate_resolution(np.zeros((2, 2, 3)))


def test_grover_coin_examples():
    assert np.allclose(grover_coin(2).matrix, [[0, 1], [1, 0]])
    g3 = grover_coin(3).matrix
    assert np.allclose(np.diag(g3), -1 / 3) and np.isclose(g3[0, 1], 2 / 3)
    for d in (2, 4, 7):
        assert np.allclose(grover_coin(d).matrix, reflection_coin(uniform_vector(d)).matrix, atol=1e-14)
    with pytest.raises(ValueError):
        grover_coin(1)


def test_fourier_coin_examples():
    assert np.allclose(fourier_coin(2).matrix, np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    assert np.allclose(fourier_coin(4).matrix[1], np.array([1, 1j, -1, -1j]) / 2)
    with pytest.raises(ValueError):
        fourier_coin(1)


@pytest.mark.parametrize("dim", range(2, 13))
def test_grover_squares_and_fourier_fourth_powers_are_identity(dim):
    g = grover_coin(dim).matrix
    f = fourier_coin(dim).matrix
    assert np.max(np.abs(g @ g - np.eye(dim))) < 1e-12
    assert np.max(np.abs(np.linalg.matrix_power(f, 4) - np.eye(dim))) < 1e-12


def test_fourier4_eigenbasis_and_projections_from_display():
    c = fourier_coin(4)
    assert c.multiplicity(1) == 2 and c.multiplicity(-1) == 1 and c.multiplicity(1j) == 1
    pi1 = np.array([[3, 1, 1, 1], [1, 1, -1, 1], [1, -1, 3, -1], [1, 1, -1, 1]]) / 4
    pii = np.array([[0, 0, 0, 0], [0, 1, 0, -1], [0, 0, 0, 0], [0, -1, 0, 1]]) / 2
    pim = np.array([[1, -1, -1, -1], [-1, 1, 1, 1], [-1, 1, 1, 1], [-1, 1, 1, 1]]) / 4
    assert np.allclose(c.projector(1), pi1, atol=1e-12)
    assert np.allclose(c.projector(1j), pii, atol=1e-12)
    assert np.allclose(c.projector(-1), pim, atol=1e-12)
    v = np.array([0, 1, 0, -1]) / np.sqrt(2)
    assert np.allclose(c.matrix @ v, 1j * v)


def test_reflection_coin_examples(rng):
    assert np.allclose(reflection_coin([1, 0]).matrix, np.diag([1, -1]))
    assert np.allclose(reflection_coin(uniform_vector(4)).matrix, grover_coin(4).matrix)
    with pytest.raises(ValueError, match="unit norm"):
        reflection_coin([1, 1])
    mu = rng.normal(size=5) + 1j * rng.normal(size=5)
    mu /= np.linalg.norm(mu)
    c = reflection_coin(mu)
    assert np.max(np.abs(c.matrix @ c.matrix - np.eye(5))) < 1e-12
    assert np.max(np.abs(c.projector(1) - np.outer(mu, mu.conj()))) < 1e-12
    assert np.max(np.abs(c.projector(-1) - (np.eye(5) - np.outer(mu, mu.conj())))) < 1e-12


def test_classify_examples():
    assert classify(grover_coin(4).matrix) == CoinType.GROVER | CoinType.REFLECTION | CoinType.FOURIER
    assert classify(fourier_coin(4).matrix) == CoinType.FOURIER
    assert classify(np.eye(3)) == CoinType.SCALAR
    assert classify(np.diag([1, 1, -1])) == CoinType.GROVER | CoinType.FOURIER
    assert classify(np.diag([1, np.exp(0.3j)])) == CoinType.GENERAL


def test_coin_rejects_non_unitary():
    with pytest.raises(ValueError, match="coin not unitary"):
        Coin(np.array([[1, 1], [0, 1]]))


def test_builtin_walk_layouts():
    std = builtin_walk("std", 2)
    assert std.coin_dim == 4 and set(std.steps) == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    assert np.allclose(std.projection((0, -1)), np.diag([0, 0, 0, 1]))
    lazy = builtin_walk("lazy", 1)
    assert lazy.coin_dim == 3 and lazy.steps.steps == ((1,), (0,), (-1,))
    assert np.allclose(lazy.projection((0,)), np.diag([0, 1, 0]))
    prod = builtin_walk("product-triangular3", 2)
    assert prod.kind == PRODUCT and set(prod.steps) == {(1, 0), (0, 1), (-1, -1)}
    with pytest.raises(ValueError, match="unknown walk"):
        builtin_walk("hexagonal")
    assert set(BUILTIN_WALKS) == {"std", "lazy", "triangular6", "product-triangular3"}


def test_symbol_examples():
    assert np.allclose(symbol(builtin_walk("std", 1), [1]), grover_coin(2).matrix)
    assert np.allclose(symbol(builtin_walk("lazy", 1), [1]), grover_coin(3).matrix)
    with pytest.raises(ValueError, match="off the torus"):
        symbol(builtin_walk("std", 1), [1.1])
    with pytest.raises(ValueError, match="coordinates"):
        symbol(builtin_walk("std", 2), [1])


@pytest.mark.parametrize("name,d", ALL_WALKS)
def test_symbols_are_unitary(name, d, rng):
    w = builtin_walk(name, d)
    u = symbols(w, random_torus(rng, d, 1000))
    eye = np.eye(w.coin_dim)
    assert np.max(np.abs(np.conj(np.swapaxes(u, 1, 2)) @ u - eye)) < 1e-12


def test_fourier_walk_symbol_is_unitary(rng):
    u = symbols(fourier_walk_2d(), random_torus(rng, 2, 200))
    assert max(unitarity_defect(m) for m in u) < 1e-12


def product_identity_defect(walk, z):
    """Largest deviation from U(z) +- I = +-2 V*(pi_+- V pi_+ + pi_-+ V pi_-)."""
    pp, pm = walk.coin.projector(1), walk.coin.projector(-1)
    u = symbol(walk, z)
    v = shift_symbols(walk, np.asarray(z)[None])[0]
    vh = v.conj().T
    eye = np.eye(walk.coin_dim)
    plus = 2 * vh @ (pp @ v @ pp + pm @ v @ pm)
    minus = -2 * vh @ (pm @ v @ pp + pp @ v @ pm)
    return max(np.max(np.abs(u + eye - plus)), np.max(np.abs(u - eye - minus)))


def test_product_symbol_identity(rng):
    w = builtin_walk("product-triangular3", 2)
    for z in random_torus(rng, 2, 100):
        assert product_identity_defect(w, z) < 1e-10


def test_product_identity_with_adjoints_swapped_does_not_hold():
    # the V <-> V* swapped form is not an identity for the V* C V C symbol
    w = builtin_walk("product-triangular3", 2)
    z = np.exp(2j * np.pi * np.array([0.13, 0.71]))
    pp, pm = w.coin.projector(1), w.coin.projector(-1)
    v = shift_symbols(w, z[None])[0]
    swapped = 2 * v @ (pp @ v.conj().T @ pp + pm @ v.conj().T @ pm)
    assert np.max(np.abs(symbol(w, z) + np.eye(3) - swapped)) > 0.1



@given(st.integers(2, 8), st.integers(0, 2 ** 32 - 1))
def test_reflection_coins_are_reflections(dim, seed):
    r = np.random.default_rng(seed)
    mu = r.normal(size=dim) + 1j * r.normal(size=dim)
    c = reflection_coin(mu / np.linalg.norm(mu))
    assert c.is_reflection and c.multiplicity(1) == 1 and c.multiplicity(-1) == dim - 1
