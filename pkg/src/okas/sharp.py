"""Sharp-interface energies of ball and disk configurations.

A configuration with rescaled field ``v = eta^-d`` on the droplets has

3-D: ``eta sigma int |grad v| + eta ||v - int v||^2_{H^-1}``
2-D: ``sigma eta int |grad v| + |log eta|^-1 ||v - int v||^2_{H^-1}``

Perimeters are always analytic; the nonlocal part is either computed on a
grid from the rasterized droplets or expanded for small droplets. Ball-based
energies are upper bounds for the true minimal energy.
"""

from __future__ import annotations

import math

import numpy as np

from okas.diffuse import EnergyBreakdown, ScalingParams
from okas.droplets import DropletConfiguration, rasterize
from okas.effective import f0_2d, f_ball
from okas.green import pair_energy, regular_part_at_zero
from okas.grid import ScalarField, TorusGrid, hminus1_sq

_BALL_COULOMB = 0.4 * (3.0 / (4.0 * math.pi)) ** (2.0 / 3.0)


def _check(config: DropletConfiguration, p: ScalingParams) -> None:
    if config.d != p.d:
        raise ValueError("configuration and parameter dimensions differ")
    if not math.isclose(config.eta, p.eta, rel_tol=1e-12):
        raise ValueError(f"configuration eta {config.eta} differs from parameter eta {p.eta}")


def rescaled_field(config: DropletConfiguration, grid: TorusGrid) -> ScalarField:
    """Rasterized ``v``: volume fraction divided by ``eta^d``."""
    frac = rasterize(config, grid)
    return frac.with_values(frac.values / config.eta**config.d)


def sharp_energy_grid(config: DropletConfiguration, grid: TorusGrid,
                      p: ScalingParams) -> EnergyBreakdown:
    _check(config, p)
    if len(config) == 0:
        return EnergyBreakdown(0.0, 0.0, 0.0)
    if config.radii.min() < 4.0 * grid.spacing:
        raise ValueError("droplet radius below 4 grid cells")
    eta, d = p.eta, p.d
    total_variation = config.perimeter / eta**d
    v = rescaled_field(config, grid)
    _, _, c = p.coefficients
    return EnergyBreakdown(p.sigma * eta * total_variation, 0.0, c * hminus1_sq(v))


def ball_self_energy_free(m: float, d: int) -> float:
    """Free-space Coulomb energy of one droplet, renormalized by ``log`` in 2-D."""
    if m <= 0:
        raise ValueError("mass must be positive")
    if d == 3:
        return _BALL_COULOMB * m ** (5.0 / 3.0)
    if d == 2:
        return f0_2d(m)
    raise ValueError("dimension must be 2 or 3")


def _separation_ratio(config: DropletConfiguration) -> float:
    dist = np.ones(len(config))
    if len(config) > 1:
        cd = config.center_distances()
        np.fill_diagonal(cd, np.inf)
        dist = np.minimum(dist, cd.min(axis=1))
    return float(config.radii.max() / dist.min())


def sharp_energy_asymptotic(config: DropletConfiguration, p: ScalingParams) -> tuple[float, float]:
    """Small-droplet expansion of the sharp energy: ``(leading, correction)``.

    3-D: ``leading = sum f(m_i)`` and
    ``correction = eta [g(0) sum m_i^2 + sum_{i != j} m_i m_j G(x_i - x_j)]``.

    2-D (from the same energy, with the disk's logarithmic self-energy):
    ``leading = sum [2 sigma sqrt(pi m) + m^2 / (2 pi)]`` and
    ``correction = |log eta|^-1 [sum m^2 ((1/4 - log(m/pi)/2) / (2 pi) + g(0)) + sum_{i != j} ...]``.
    """
    _check(config, p)
    if len(config) == 0:
        return 0.0, 0.0
    if _separation_ratio(config) >= 0.25:
        raise ValueError("droplets too large relative to their separation (ratio >= 1/4)")
    m = config.masses
    interaction = pair_energy(config.measure(), p.d, include_self=True)
    if p.d == 3:
        leading = float(np.sum(f_ball(m, p.sigma)))
        return leading, p.eta * interaction
    leading = float(np.sum(2.0 * p.sigma * np.sqrt(math.pi * m) + m**2 / (2.0 * math.pi)))
    disk = float(np.sum(m**2 * (0.25 - 0.5 * np.log(m / math.pi)))) / (2.0 * math.pi)
    return leading, (disk + interaction) / p.log_eta
