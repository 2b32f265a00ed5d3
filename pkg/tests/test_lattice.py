import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from putowalk.lattice import (
    LatticeState,
    distribution,
    evolve,
    fourier_field,
    fourier_oracle,
    initial_state,
    read_distribution_csv,
    step,
    time_average,
    time_average_series,
    write_distribution_csv,
)
from putowalk.walks import PLAIN, StepSet, Walk, builtin_walk, fourier_walk_2d

ALL_WALKS = [("std", 1), ("std", 2), ("lazy", 1), ("lazy", 2), ("triangular6", 2),
             ("product-triangular3", 2)]


def unit(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def test_initial_state_examples():
    s = initial_state(1, 3, [1, 0, 0])
    assert s.norm() == pytest.approx(1.0)
    assert distribution(s) == {(0,): 1.0}
    assert s.support_radius() == 0
    with pytest.raises(ValueError, match="unit vector"):
        initial_state(1, 3, [1, 1, 0])
    with pytest.raises(ValueError, match="entries"):
        initial_state(1, 3, [1, 0])


def test_state_is_read_only():
    s = initial_state(2, 4, [1, 0, 0, 0])
    with pytest.raises(ValueError):
        s.amplitudes[0, 0, 0] = 2
    with pytest.raises(ValueError):
        LatticeState(np.zeros((2, 3)))


def test_lazy_one_step_matches_hand_evaluation(backend):
    s = step(builtin_walk("lazy", 1), initial_state(1, 3, [0, 1, 0]))
    dist = distribution(s)
    assert dist[(-1,)] == pytest.approx(4 / 9, abs=1e-15)
    assert dist[(0,)] == pytest.approx(1 / 9, abs=1e-15)
    assert dist[(1,)] == pytest.approx(4 / 9, abs=1e-15)
    # G3 e2 = (2/3, -1/3, 2/3); the +u component moves to +1
    assert np.allclose(s.amplitude((1,)), [2 / 3, 0, 0])
    assert np.allclose(s.amplitude((-1,)), [0, 0, 2 / 3])


@pytest.mark.parametrize("name,d", ALL_WALKS)
def test_unitarity_and_cone(name, d, backend, rng):
    w = builtin_walk(name, d)
    s = initial_state(d, w.coin_dim, unit(rng, w.coin_dim))
    for n in range(1, 201 if d == 1 else 41):
        s = step(w, s)
        assert abs(s.norm() - 1) < 1e-12
        assert s.support_radius() <= n * w.reach
        assert abs(sum(distribution(s).values()) - 1) < 1e-10
    # nothing outside the cone is ever written: the box is exactly the cone
    assert s.radius == s.step_count * w.reach


def test_std_support_radius_is_attained():
    w = builtin_walk("std", 2)
    s = evolve(w, initial_state(2, 4, [1, 0, 0, 0]), 7)
    assert s.support_radius() == 7


@pytest.mark.parametrize("name,d", ALL_WALKS)
def test_lattice_matches_fourier_oracle(name, d, backend, rng):
    w = builtin_walk(name, d)
    phi = unit(rng, w.coin_dim)
    s = initial_state(d, w.coin_dim, phi)
    for n in (1, 5, 12, 20):
        s_n = evolve(w, s, n)
        m = 2 * n * w.reach + 1
        field = fourier_field(w, phi, n, m)
        worst = 0.0
        for idx in np.ndindex(*(2 * s_n.radius + 1,) * d):
            x = tuple(i - s_n.radius for i in idx)
            worst = max(worst, np.max(np.abs(s_n.amplitude(x) - field[tuple(c % m for c in x)])))
        assert worst < 1e-10


def test_fourier_oracle_examples(rng):
    w = builtin_walk("lazy", 1)
    phi = unit(rng, 3)
    assert np.allclose(fourier_oracle(w, phi, 0, (0,), 8), phi)
    assert np.allclose(fourier_oracle(w, phi, 0, (3,), 8), 0)
    s = initial_state(1, 3, phi)
    for n in range(1, 21):
        s = step(w, s)
        for x in range(-n, n + 1):
            assert np.max(np.abs(fourier_oracle(w, phi, n, (x,), 64) - s.amplitude((x,)))) < 1e-12
    std = builtin_walk("std", 2)
    phi4 = unit(rng, 4)
    s10 = evolve(std, initial_state(2, 4, phi4), 10)
    for _ in range(10):
        x = tuple(rng.integers(-10, 11, size=2))
        assert np.max(np.abs(fourier_oracle(std, phi4, 10, x, 64) - s10.amplitude(x))) < 1e-10
    with pytest.raises(ValueError, match="need M >= 41"):
        fourier_oracle(std, phi4, 20, (0, 0), 40)


def test_product_step_is_two_plain_half_steps(backend, rng):
    prod = builtin_walk("product-triangular3", 2)
    forward = Walk(prod.steps, prod.resolution, prod.coin, PLAIN)
    back = Walk(StepSet(tuple(tuple(-c for c in a) for a in prod.steps)), prod.resolution, prod.coin, PLAIN)
    s = initial_state(2, 3, unit(rng, 3))
    a, b = s, s
    for _ in range(6):
        a = step(prod, a)
        b = step(back, step(forward, b))
        r = max(a.radius, b.radius)
        for idx in np.ndindex(2 * r + 1, 2 * r + 1):
            x = (idx[0] - r, idx[1] - r)
            assert np.max(np.abs(a.amplitude(x) - b.amplitude(x))) < 1e-12


def test_time_average_examples():
    lazy = builtin_walk("lazy", 1)
    assert time_average(lazy, [0, 1, 0], (50,), 10) == 0.0
    first = time_average(lazy, [0, 1, 0], (1,), 1)
    assert first == pytest.approx(4 / 9)
    two = evolve(lazy, initial_state(1, 3, [0, 1, 0]), 2)
    assert time_average(lazy, [0, 1, 0], (0,), 2) == pytest.approx(
        (1 / 9 + distribution(two)[(0,)]) / 2)
    phi = np.array([1, 1, 1, 1]) / 2
    assert time_average(fourier_walk_2d(), phi, (0, 0), 500) < 0.02
    with pytest.raises(ValueError):
        time_average(lazy, [0, 1, 0], (0,), 0)


def test_time_average_series_matches_pointwise():
    lazy = builtin_walk("lazy", 1)
    acc, r = time_average_series(lazy, [0, 1, 0], 30)
    for x in (-3, 0, 5):
        assert acc[x + r] == pytest.approx(time_average(lazy, [0, 1, 0], (x,), 30), abs=1e-15)


def test_distribution_csv_round_trip():
    s = evolve(builtin_walk("std", 2), initial_state(2, 4, [0.5, 0.5, 0.5, 0.5]), 4)
    dist = distribution(s)
    text = write_distribution_csv(dist, 2)
    lines = text.splitlines()
    assert lines[0] == "x_1,x_2,probability"
    sites = [tuple(int(v) for v in ln.split(",")[:2]) for ln in lines[1:]]
    assert sites == sorted(sites)
    assert read_distribution_csv(text) == dist
    avg = write_distribution_csv({(0,): 0.5}, 1, average={(0,): 0.25, (1,): 0.1})
    assert avg.splitlines() == ["x_1,probability,average", "0,0.5,0.25", "1,0.0,0.1"]


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 25))
def test_random_states_stay_normalized(seed, n):
    r = np.random.default_rng(seed)
    w = builtin_walk("lazy", 1)
    s = evolve(w, initial_state(1, 3, unit(r, 3)), n)
    p = distribution(s)
    assert abs(sum(p.values()) - 1) < 1e-10
    assert all(0 <= v <= 1 + 1e-15 for v in p.values())
