import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from okas.effective import (LONE_DROPLET_MASS, E0_energy, EqualSplitViolation,
                            WeightPartition, e0_2d, e0_2d_envelope, e0_attained, e0_conjectured,
                            f0_2d, f_ball, m_star, partition_bruteforce, split_threshold_2d,
                            weights_admissible)
from okas.green import AtomicMeasure

SIGMA_2D = 1 / 3


def ball_energy_oracle(m, sigma):
    # area of the sphere plus int_B phi with -Laplace phi = 1_B in free space,
    # phi(r) = R^2/2 - r^2/6 inside
    R = (3 * m / (4 * math.pi)) ** (1 / 3)
    coulomb, _ = integrate.quad(lambda r: 4 * math.pi * r**2 * (R**2 / 2 - r**2 / 6), 0, R)
    return sigma * 4 * math.pi * R**2 + coulomb


@given(st.floats(0.01, 100), st.floats(0.1, 3))
def test_f_ball_matches_radial_integral(m, sigma):
    assert f_ball(m, sigma) == pytest.approx(ball_energy_oracle(m, sigma), rel=1e-10)


def test_m_star_value():
    assert m_star(1.0) == pytest.approx(22.066, abs=0.01)
    m = m_star(1.0)
    assert f_ball(m) == pytest.approx(2 * f_ball(m / 2), rel=1e-10)


@given(st.floats(0.05, 5))
def test_m_star_is_linear_in_sigma(sigma):
    assert m_star(sigma) == pytest.approx(sigma * m_star(1.0), rel=1e-8)


def test_conjectured_split_at_thirty():
    value, n = e0_conjectured(30.0)
    assert n == 2
    assert value == pytest.approx(2 * f_ball(15.0), rel=1e-14)
    assert value < f_ball(30.0)


def test_single_ball_below_m_star():
    ms = m_star()
    for m in np.arange(0.1, ms - 0.1, 0.1):
        assert e0_conjectured(m)[1] == 1
    assert e0_attained(ms - 1e-6) and not e0_attained(ms + 1e-3)


@given(st.floats(0.1, 500))
def test_e0_is_subadditive_and_bounded_by_f(m):
    value, n = e0_conjectured(m)
    assert value <= f_ball(m) + 1e-12
    half, _ = e0_conjectured(m / 2)
    assert value <= 2 * half * (1 + 1e-12)
    assert n == 1 or m / n <= m_star() + 1e-9


def test_large_mass_search_extends_past_n_max():
    value, n = e0_conjectured(5000.0, n_max=4)
    assert n > 4
    assert value == pytest.approx(e0_conjectured(5000.0, n_max=1024)[0])


def test_E0_sums_over_atoms():
    mu = AtomicMeasure([[0, 0, 0], [0.5, 0, 0]], [3.0, 30.0])
    assert E0_energy(mu) == pytest.approx(f_ball(3.0) + 2 * f_ball(15.0))


def test_e0_2d_closed_form():
    assert e0_2d(1.0, SIGMA_2D) == pytest.approx(1 / (4 * math.pi) + 2 / 3 * math.sqrt(math.pi))
    assert e0_2d(0.0, SIGMA_2D) == 0.0


def test_split_threshold_2d():
    t = split_threshold_2d(SIGMA_2D)
    expected = (16 * math.pi**1.5 * SIGMA_2D * (math.sqrt(2) - 1)) ** (2 / 3)
    assert t == pytest.approx(expected, rel=1e-10)
    assert e0_2d_envelope(t * 0.99, SIGMA_2D)[1] == 1
    assert e0_2d_envelope(t * 1.01, SIGMA_2D)[1] == 2


def test_f0_2d():
    assert f0_2d(math.pi) == pytest.approx(3 * math.pi / 8)
    with pytest.raises(ValueError):
        f0_2d(0.0)


@pytest.mark.parametrize("M", [1, 5, 20, 60])
def test_equal_split_beats_random_partitions(M):
    part = partition_bruteforce(M, perturbations=500, seed=M)
    assert part.is_equal_split()
    assert part.min_margin >= -1e-10
    assert part.n == e0_2d_envelope(M, SIGMA_2D)[1]


def test_small_mass_stays_whole():
    assert 1.0 < LONE_DROPLET_MASS
    assert partition_bruteforce(1.0).n == 1


def test_weight_partition_validation():
    with pytest.raises(ValueError):
        WeightPartition((1.0, 2.0), 4.0)
    with pytest.raises(ValueError):
        WeightPartition((1.0, -1.0), 0.0)
    assert not WeightPartition((1.0, 2.0), 3.0).is_equal_split()


def test_violation_type_is_an_assertion():
    assert issubclass(EqualSplitViolation, AssertionError)


def test_admissible_weights():
    assert weights_admissible([1.0], 3, 1 / 3)
    assert weights_admissible([15.0, 15.0], 3, 1.0)
    assert not weights_admissible([30.0], 3, 1.0)
    assert not weights_admissible([1.0, 1.0], 3, 1.0)
    n = e0_2d_envelope(20.0, SIGMA_2D)[1]
    assert weights_admissible([20.0 / n] * n, 2, SIGMA_2D)
    assert not weights_admissible([1.0, 1.0], 2, SIGMA_2D)
    assert not weights_admissible([0.0], 2, SIGMA_2D)
