"""Double well, surface tension, optimal profile and mollified indicators.

The well is ``W(u) = u^2 (1 - u)^2`` with minima at 0 and 1. Its surface
tension is ``sigma = 2 int_0^1 sqrt(W) = 1/3`` and ``phi(s) = 2 int_0^s sqrt(W)``
has the closed form ``s^2 (3 - 2s) / 3``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize
from scipy.special import expit

from okas.droplets import DropletConfiguration, _grid_slabs
from okas.grid import ScalarField, TorusGrid, perimeter_estimate

SIGMA = 1.0 / 3.0


def well(u):
    u = np.asarray(u, dtype=float)
    return u**2 * (1.0 - u) ** 2


def well_derivative(u):
    u = np.asarray(u, dtype=float)
    return 2.0 * u * (1.0 - u) * (1.0 - 2.0 * u)


def well_rescaled(v, eta: float, d: int):
    """``v^2 (1 - eta^d v)^2``, the well in rescaled units (second minimum at ``eta^-d``)."""
    v = np.asarray(v, dtype=float)
    return v**2 * (1.0 - eta**d * v) ** 2


def well_rescaled_derivative(v, eta: float, d: int):
    v = np.asarray(v, dtype=float)
    a = eta**d
    return 2.0 * v * (1.0 - a * v) * (1.0 - 2.0 * a * v)


def sigma(well_fn=None) -> float:
    """Surface tension ``2 int_0^1 sqrt(W)`` by adaptive quadrature."""
    well_fn = well if well_fn is None else well_fn
    value, _ = integrate.quad(lambda t: np.sqrt(max(float(well_fn(t)), 0.0)), 0.0, 1.0,
                              epsabs=1e-14, epsrel=1e-13)
    return 2.0 * value


@dataclass(frozen=True)
class WellSpec:
    """The fixed double well together with its surface tension."""

    sigma: float = field(default_factory=sigma)

    def __post_init__(self) -> None:
        if not (well(0.0) == 0.0 and well(1.0) == 0.0):
            raise ValueError("well must vanish at 0 and 1")

    def __call__(self, u):
        return well(u)


def phi(s):
    """``2 int_0^s sqrt(W)`` after clipping ``s`` to ``[0, 1]``."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    return s**2 * (3.0 - 2.0 * s) / 3.0


def phi_inverse(t):
    """Inverse of :func:`phi` on ``[0, sigma]`` (trigonometric root of the cubic)."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, SIGMA)
    return 0.5 + np.cos((np.arccos(1.0 - 6.0 * t) - 2.0 * np.pi) / 3.0)


def optimal_profile(t, eps: float):
    """Heteroclinic ``q`` with ``eps q' = sqrt(W(q))`` and ``q(0) = 1/2``: ``1 / (1 + exp(-t/eps))``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return expit(np.asarray(t, dtype=float) / eps)


def modica_mortola_density(u, grad_sq, eps: float):
    """``eps |grad u|^2 + W(u) / eps``."""
    return eps * np.asarray(grad_sq) + well(u) / eps


def mollifier_constant(alpha: float) -> float:
    """L1 constant used for mollified indicators: ``2 log 2 (1 + alpha / sigma)``.

    A flat logistic interface has ``int |chi - u| = 2 log 2 * eps`` per unit
    area; the ``alpha / sigma`` factor leaves room for curvature corrections of
    the same relative size as the energy allowance.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return float(2.0 * np.log(2.0) * (1.0 + alpha / SIGMA))


@dataclass(frozen=True)
class MollifiedIndicator:
    """Mollified droplet field with the two a-posteriori approximation checks."""

    field: ScalarField
    c0: float
    interfacial_energy: float
    l1_distance: float
    perimeter: float
    alpha: float
    eps: float

    @property
    def energy_bound(self) -> float:
        return float((SIGMA + self.alpha) * self.perimeter)

    @property
    def l1_bound(self) -> float:
        return float(self.c0 * self.eps * self.perimeter)

    @property
    def energy_ok(self) -> bool:
        return self.interfacial_energy <= self.energy_bound

    @property
    def l1_ok(self) -> bool:
        return self.l1_distance <= self.l1_bound

    def report_rows(self) -> list[tuple[str, float, float, bool]]:
        return [
            ("interfacial_energy", self.interfacial_energy, self.energy_bound, self.energy_ok),
            ("l1_distance", self.l1_distance, self.l1_bound, self.l1_ok),
        ]


def mollify_indicator(config: DropletConfiguration, grid: TorusGrid, eps: float,
                      alpha: float) -> MollifiedIndicator:
    """Replace each droplet indicator by the optimal profile of its signed distance.

    ``u = q(-dist)`` where ``dist`` is the signed torus distance to the droplet
    boundaries. The diffuse interfacial energy is integrated from the exact
    gradient ``|grad u| = u (1 - u) / eps`` (the distance has unit gradient),
    which makes both terms equal to ``u^2 (1 - u)^2 / eps``. The perimeter is
    the analytic boundary measure of the droplets.
    """
    if config.d != grid.d:
        raise ValueError("configuration and grid dimensions differ")
    if eps < 3.0 * grid.spacing:
        n_needed = 1 << int(np.ceil(np.log2(3.0 / eps)))
        raise ValueError(f"eps={eps} under-resolved: need eps >= 3h, use n_cells >= {n_needed}")
    c0 = mollifier_constant(alpha)
    if len(config) == 0:
        return MollifiedIndicator(grid.zeros(), c0, 0.0, 0.0, 0.0, alpha, eps)
    if config.min_gap() <= 10.0 * eps:
        raise ValueError("droplets closer than 10*eps: diffuse profiles would overlap")
    values = np.empty(grid.shape)
    energy = 0.0
    l1 = 0.0
    for sl, pts in _grid_slabs(grid):
        dist = config.signed_distance(pts)
        u = optimal_profile(-dist, eps)
        values[sl] = u
        energy += 2.0 * float(np.sum(well(u))) / eps
        l1 += float(np.sum(np.abs((dist < 0) - u)))
    vol = grid.cell_volume
    return MollifiedIndicator(ScalarField(grid, values), c0, energy * vol, l1 * vol,
                              config.perimeter, alpha, eps)


def truncation_delta(eta: float, zeta: float) -> float:
    """``delta`` with ``phi(1 - 2 delta) - phi(2 delta) = sigma - eta^zeta``."""
    target = SIGMA - eta**zeta
    if target <= 0:
        raise ValueError("eta^zeta must be below sigma")
    return float(optimize.brentq(lambda dl: phi(1 - 2 * dl) - phi(2 * dl) - target, 0.0, 0.25,
                                 xtol=1e-15))


def threshold_to_sharp(field: ScalarField, delta: float = 0.25,
                       n_levels: int = 101) -> tuple[ScalarField, float]:
    """Pick the super-level set of least face-count perimeter.

    The field is clipped to ``[0, 1]``; ``n_levels`` levels are spaced evenly in
    ``phi`` over ``[phi(delta), phi(1 - delta)]``. Returns the indicator and the
    chosen level in ``u`` units.
    """
    if not 0.0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")
    u = np.clip(field.values, 0.0, 1.0)
    if np.ptp(u) == 0.0:
        raise ValueError("constant field has no interface")
    best = None
    for t in np.linspace(phi(delta), phi(1.0 - delta), n_levels):
        level = float(phi_inverse(t))
        chi = (u > level).astype(float)
        if chi.all() or not chi.any():
            continue
        per = perimeter_estimate(field.with_values(chi))
        if best is None or per < best[0]:
            best = (per, chi, level)
    if best is None:
        raise ValueError("no level in the scan range cuts the field")
    return field.with_values(best[1]), best[2]
