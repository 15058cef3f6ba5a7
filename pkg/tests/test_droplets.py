import numpy as np
import pytest
from hypothesis import given, strategies as st

from okas.droplets import (DropletConfiguration, mass_from_radius, radius_from_mass, rasterize,
                           read_config, write_config)
from okas.grid import TorusGrid


@given(st.floats(1e-3, 50), st.sampled_from([2, 3]), st.floats(0.01, 1))
def test_radius_mass_round_trip(m, d, eta):
    assert mass_from_radius(radius_from_mass(m, d, eta), d, eta) == pytest.approx(m, rel=1e-12)


def test_radius_values():
    assert radius_from_mass(np.pi, 2) == pytest.approx(1.0)
    assert radius_from_mass(4 * np.pi / 3, 3, eta=0.2) == pytest.approx(0.2)


def test_configuration_validation():
    with pytest.raises(ValueError):
        DropletConfiguration(2, [[0, 0]], [-1.0])
    with pytest.raises(ValueError):
        DropletConfiguration(2, [[0, 0]], [1.0])  # radius 0.56 wraps onto itself
    with pytest.raises(ValueError):
        DropletConfiguration(2, [[0, 0], [0.1, 0]], [0.1, 0.1])


def test_centers_are_wrapped_and_distances_periodic():
    c = DropletConfiguration(2, [[0.45, 0.0], [1.55, 0.0]], [0.001, 0.001])
    np.testing.assert_allclose(c.centers[1], [-0.45, 0.0])
    assert c.center_distances()[0, 1] == pytest.approx(0.1)
    assert c.min_gap() == pytest.approx(0.1 - 2 * np.sqrt(0.001 / np.pi))


def test_min_gap_of_a_single_droplet_is_infinite():
    assert DropletConfiguration(3, [[0, 0, 0]], [0.1]).min_gap() == np.inf


def test_signed_distance():
    c = DropletConfiguration(2, [[0, 0]], [np.pi * 0.04])
    d = c.signed_distance(np.array([[0.0, 0.0], [0.3, 0.0], [0.5, 0.5]]))
    np.testing.assert_allclose(d, [-0.2, 0.1, np.sqrt(0.5) - 0.2])


@pytest.mark.parametrize("d,n", [(2, 128), (3, 64)])
def test_rasterized_volume_matches_ball_volume(d, n):
    c = DropletConfiguration(d, [np.full(d, 0.03), np.full(d, -0.27)], [0.02, 0.03])
    frac = rasterize(c, TorusGrid(d, n))
    assert frac.values.min() >= 0 and frac.values.max() <= 1
    assert frac.mean() == pytest.approx(c.total_mass, rel=3e-3)


def test_config_file_round_trip(tmp_path):
    c = DropletConfiguration(3, [[0.1, 0.2, 0.3], [-0.2, 0.1, 0.0]], [0.5, 0.25], eta=0.2)
    write_config(c, tmp_path / "c.txt")
    back = read_config(tmp_path / "c.txt", eta=0.2)
    np.testing.assert_array_equal(back.centers, c.centers)
    np.testing.assert_array_equal(back.masses, c.masses)


def test_config_file_parsing(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("# two droplets\n0, 0, 0.01  # first\n\n0.3 0.3 0.02\n")
    c = read_config(p)
    assert c.d == 2 and len(c) == 2
    p.write_text("0 0 0.1\n0 0 0 0.1\n")
    with pytest.raises(ValueError):
        read_config(p)
    p.write_text("# nothing\n")
    assert len(read_config(p, d=3)) == 0
    with pytest.raises(ValueError):
        read_config(p)


@given(st.integers(0, 10**6))
def test_relabeling_preserves_geometry(seed):
    rng = np.random.default_rng(seed)
    c = DropletConfiguration(2, [[0, 0], [0.5, 0.5], [0.0, 0.5]], rng.uniform(0.01, 0.1, 3))
    r = c.relabeled([2, 0, 1])
    assert r.perimeter == pytest.approx(c.perimeter)
    assert r.min_gap() == pytest.approx(c.min_gap())
