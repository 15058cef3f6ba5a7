"""First-order effective energies of droplet masses.

3-D: ``f(m)`` is the energy of one ball of volume ``m``; the per-particle energy
``e0`` is taken from the conjecture that the optimum is a finite union of
equal balls, ``e0(m) = min_n n f(m / n)``. Every 3-D value here depends on that
conjecture.

2-D: ``e0_2d(m) = m^2 / (4 pi) + 2 sigma sqrt(pi m)`` in closed form, with the
lower-semicontinuous envelope attained by equal splits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from okas.green import AtomicMeasure

DEFAULT_N_MAX = 64
LONE_DROPLET_MASS = 2.0 ** (-2.0 / 3.0) * math.pi
_SURFACE = (36.0 * math.pi) ** (1.0 / 3.0)
_COULOMB = 0.4 * (3.0 / (4.0 * math.pi)) ** (2.0 / 3.0)


def f_ball(m, sigma: float = 1.0):
    """``sigma (36 pi)^(1/3) m^(2/3) + (2/5)(3 / 4 pi)^(2/3) m^(5/3)``."""
    m = np.asarray(m, dtype=float)
    if np.any(m < 0):
        raise ValueError("mass must be nonnegative")
    out = sigma * _SURFACE * m ** (2.0 / 3.0) + _COULOMB * m ** (5.0 / 3.0)
    return float(out) if out.ndim == 0 else out


def _best_split(energy, m: float, n_max: int) -> tuple[float, int]:
    """``min_n n energy(m / n)`` over ``1 <= n <= n_max``, doubling ``n_max`` until the argmin is interior."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if m == 0:
        return 0.0, 1
    while True:
        n = np.arange(1, n_max + 1)
        values = n * energy(m / n)
        k = int(np.argmin(values))
        if k + 1 < n_max or n_max >= 1 << 20:
            return float(values[k]), k + 1
        n_max *= 2


def e0_conjectured(m: float, sigma: float = 1.0, n_max: int = DEFAULT_N_MAX) -> tuple[float, int]:
    """Conjectured ``e0(m) = min_n n f(m / n)``; returns ``(value, n_opt)``."""
    if m < 0:
        raise ValueError("mass must be nonnegative")
    return _best_split(lambda x: f_ball(x, sigma), float(m), n_max)


def m_star(sigma: float = 1.0) -> float:
    """Positive root of ``f(m) - 2 f(m/2)``: the largest mass a single ball can carry optimally."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    g = lambda m: f_ball(m, sigma) - 2.0 * f_ball(m / 2.0, sigma)  # noqa: E731
    return float(optimize.bisect(g, 1e-6 * sigma, 1e4 * sigma, xtol=1e-12, rtol=1e-15, maxiter=500))


def e0_attained(m: float, sigma: float = 1.0) -> bool:
    """Whether the conjectured minimizer exists, i.e. ``m <= m*``."""
    return m <= m_star(sigma)


def E0_energy(mu: AtomicMeasure, sigma: float = 1.0) -> float:
    """``sum_i e0(m_i)``; positions play no role."""
    if np.any(mu.weights < 0):
        raise ValueError("weights must be nonnegative")
    return float(sum(e0_conjectured(w, sigma)[0] for w in mu.weights))


def e0_2d(m, sigma: float):
    m = np.asarray(m, dtype=float)
    if np.any(m < 0):
        raise ValueError("mass must be nonnegative")
    out = m**2 / (4.0 * math.pi) + 2.0 * sigma * np.sqrt(math.pi * m)
    return float(out) if out.ndim == 0 else out


def e0_2d_envelope(m: float, sigma: float, n_max: int = DEFAULT_N_MAX) -> tuple[float, int]:
    """Envelope ``min_n n e0_2d(m / n)``; equal splits suffice since optimal partitions are equal."""
    if m < 0:
        raise ValueError("mass must be nonnegative")
    return _best_split(lambda x: e0_2d(x, sigma), float(m), n_max)


def split_threshold_2d(sigma: float) -> float:
    """Mass at which two equal disks start to beat one: root of ``2 e0_2d(m/2) - e0_2d(m)``."""
    g = lambda m: 2.0 * e0_2d(m / 2.0, sigma) - e0_2d(m, sigma)  # noqa: E731
    return float(optimize.bisect(g, 1e-6 * sigma**(2 / 3), 1e4 * max(sigma, 1.0),
                                 xtol=1e-12, rtol=1e-15, maxiter=500))


def f0_2d(m: float) -> float:
    """``(m^2 / 8 pi)(3 - 2 log(m / pi))``."""
    if m <= 0:
        raise ValueError("mass must be positive")
    return m**2 / (8.0 * math.pi) * (3.0 - 2.0 * math.log(m / math.pi))


@dataclass(frozen=True)
class WeightPartition:
    """Finite list of positive droplet masses adding up to ``total``."""

    masses: tuple[float, ...]
    total: float
    trials: int = field(default=0, compare=False)
    min_margin: float = field(default=math.inf, compare=False)

    def __post_init__(self) -> None:
        masses = tuple(float(m) for m in self.masses)
        if any(m <= 0 for m in masses):
            raise ValueError("partition masses must be positive")
        if abs(sum(masses) - self.total) > 1e-12 * max(1.0, abs(self.total)):
            raise ValueError("masses do not add up to the total")
        object.__setattr__(self, "masses", masses)

    @property
    def n(self) -> int:
        return len(self.masses)

    def is_equal_split(self, rtol: float = 1e-12) -> bool:
        return max(self.masses) - min(self.masses) <= rtol * max(self.masses)


class EqualSplitViolation(AssertionError):
    """An unequal partition beat the best equal split."""


def partition_energy_2d(masses, sigma: float) -> float:
    return float(np.sum(e0_2d(np.asarray(masses, dtype=float), sigma)))


def partition_bruteforce(M: float, sigma: float = 1.0 / 3.0, n_max: int = DEFAULT_N_MAX,
                         perturbations: int = 500, seed: int = 0) -> WeightPartition:
    """Best equal split of ``M`` checked against random unequal partitions.

    Trials are multiplicative perturbations of the optimal equal split and
    Dirichlet partitions into random numbers of parts. Raises
    :class:`EqualSplitViolation` if any trial wins by more than ``1e-10``
    or if the lone-droplet rule fails.
    """
    if M <= 0:
        raise ValueError("M must be positive")
    best, n_opt = e0_2d_envelope(M, sigma, n_max)
    rng = np.random.default_rng(seed)
    margin = math.inf
    for trial in range(perturbations):
        if trial % 2 == 0:
            scale = rng.uniform(0.0, 0.9)
            w = np.full(n_opt, M / n_opt) * (1.0 + scale * rng.uniform(-1.0, 1.0, n_opt))
            if n_opt == 1:
                w = np.append(w, rng.uniform(0.01, 0.5) * M)
        else:
            parts = int(rng.integers(2, max(3, 2 * n_opt + 2)))
            w = rng.dirichlet(np.full(parts, rng.uniform(0.5, 20.0)))
        w = np.abs(w)
        w *= M / w.sum()
        gap = partition_energy_2d(w, sigma) - best
        margin = min(margin, gap)
        if gap < -1e-10:
            raise EqualSplitViolation(f"unequal partition {w} beats the equal split by {-gap:.3e}")
    mass = M / n_opt
    if mass < LONE_DROPLET_MASS and n_opt != 1:
        raise EqualSplitViolation("a droplet below 2^(-2/3) pi shares the mass")
    return WeightPartition((mass,) * n_opt, M, perturbations, margin)


def weights_admissible(masses, d: int, sigma: float) -> bool:
    """Membership of a weight list in the admissible set.

    3-D (conjecture-dependent): every mass is at most ``m*`` and the split is
    optimal, ``sum e0(m_i) = e0(sum m_i)``. 2-D: nonzero masses are equal,
    ``n x m`` is an optimal partition and the envelope equals ``e0_2d`` at ``m``.
    """
    w = np.asarray(masses, dtype=float).ravel()
    if np.any(w < 0):
        raise ValueError("masses must be nonnegative")
    w = w[w > 0]
    if w.size == 0:
        return False
    total = float(w.sum())
    if d == 3:
        if np.any(w > m_star(sigma)):
            return False
        parts = sum(e0_conjectured(m, sigma)[0] for m in w)
        whole = e0_conjectured(total, sigma)[0]
        return abs(parts - whole) <= 1e-9 * max(1.0, abs(whole))
    if d != 2:
        raise ValueError("dimension must be 2 or 3")
    m = float(w[0])
    if np.ptp(w) > 1e-12 * m:
        return False
    tol = 1e-12 * max(1.0, e0_2d(total, sigma))
    if w.size * e0_2d(m, sigma) - e0_2d_envelope(total, sigma)[0] > tol:
        return False
    return e0_2d(m, sigma) - e0_2d_envelope(m, sigma)[0] <= tol
