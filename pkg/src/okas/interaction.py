"""Second-order point-particle energies and optimal droplet placement.

3-D: ``F0 = g(0) sum m_i^2 + sum_{i != j} m_i m_j G(x_i - x_j)``.
2-D, ``n`` equal masses ``m``: ``F0 = n (f0(m) + m^2 g(0)) + (m^2 / 2) sum_{i != j} G(x_i - x_j)``.

Both are ``+inf`` for inadmissible weights or coincident points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from okas.effective import f0_2d, weights_admissible
from okas.green import AtomicMeasure, pair_energy, pair_energy_gradient, regular_part_at_zero, wrap
from okas.wells import SIGMA

INFINITE = math.inf


def F0_energy(mu: AtomicMeasure, d: int, sigma: float = SIGMA) -> float:
    if mu.d != d:
        raise ValueError(f"measure lives in {mu.d}-D, expected {d}-D")
    if len(mu) == 0 or not weights_admissible(mu.weights, d, sigma):
        return INFINITE
    if len(mu) > 1 and mu.min_separation() < 1e-12:
        return INFINITE
    if d == 3:
        return pair_energy(mu, 3, include_self=True)
    n, m = len(mu), float(mu.weights[0])
    unit = AtomicMeasure(mu.points, np.ones(n))
    return n * (f0_2d(m) + m**2 * regular_part_at_zero(2)) + 0.5 * m**2 * pair_energy(unit, 2)


def interaction_gradient(mu: AtomicMeasure) -> np.ndarray:
    """Position gradient of the off-diagonal pair sum (the only position-dependent part)."""
    return pair_energy_gradient(mu, mu.d)


@dataclass(frozen=True)
class InteractionResult:
    energy: float
    positions: np.ndarray = field(repr=False)
    gradient_norm: float
    restarts_used: int
    best_by_restart: tuple[float, ...] = field(default=(), repr=False)


def _random_start(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    min_sep = 0.1 / n ** (1.0 / d)
    pts = np.empty((0, d))
    while len(pts) < n:
        x = rng.uniform(-0.5, 0.5, d)
        if len(pts) == 0 or np.linalg.norm(wrap(pts - x), axis=1).min() > min_sep:
            pts = np.vstack([pts, x])
    return pts


def _descend(points: np.ndarray, d: int, tol: float, max_iter: int) -> tuple[np.ndarray, float, float]:
    """Gradient descent with Barzilai-Borwein trial steps and Armijo backtracking,
    finished by Newton steps once the gradient is small."""
    n = len(points)
    weights = np.ones(n)

    def energy(x):
        mu = AtomicMeasure(x, weights)
        if mu.min_separation() < 1e-9:
            return math.inf
        return pair_energy(mu, d)

    x = wrap(points)
    e = energy(x)
    g = pair_energy_gradient(AtomicMeasure(x, weights), d)
    step = 1e-2
    x_prev = g_prev = None
    for _ in range(max_iter):
        gnorm = float(np.linalg.norm(g))
        if gnorm <= max(tol, 1e-5):
            break
        if x_prev is not None:
            s = wrap(x - x_prev).ravel()
            y = (g - g_prev).ravel()
            sy = float(s @ y)
            if sy > 0:
                step = min(float(s @ s) / sy, 1.0)
        t = step
        while True:
            trial = wrap(x - t * g)
            e_trial = energy(trial)
            if e_trial <= e - 1e-4 * t * gnorm**2 or t < 1e-16:
                break
            t *= 0.5
        if t < 1e-16:
            break
        x_prev, g_prev = x, g
        x, e = trial, e_trial
        g = pair_energy_gradient(AtomicMeasure(x, weights), d)
    return _newton_polish(x, e, g, d, energy, tol)


def _newton_polish(x, e, g, d, energy, tol, steps: int = 30, h: float = 1e-6):
    """Newton steps with a finite-difference Hessian of the analytic gradient.

    Only steps that lower the energy or the gradient norm are accepted; the
    pseudo-inverse discards the common-translation null space.
    """
    weights = np.ones(len(x))
    grad = lambda y: pair_energy_gradient(AtomicMeasure(y, weights), d).ravel()  # noqa: E731
    gflat = g.ravel()
    for _ in range(steps):
        gnorm = float(np.linalg.norm(gflat))
        if gnorm <= tol:
            break
        dim = x.size
        hess = np.empty((dim, dim))
        for k in range(dim):
            dx = np.zeros(dim)
            dx[k] = h
            hess[:, k] = (grad(x + dx.reshape(x.shape)) - grad(x - dx.reshape(x.shape))) / (2 * h)
        hess = 0.5 * (hess + hess.T)
        if np.linalg.eigvalsh(hess).min() < -1e-8 * max(1.0, np.abs(hess).max()):
            break
        trial = wrap(x - (np.linalg.pinv(hess, rcond=1e-10) @ gflat).reshape(x.shape))
        e_trial = energy(trial)
        g_trial = grad(trial)
        if not (e_trial <= e + 1e-14 * max(1.0, abs(e)) and np.linalg.norm(g_trial) < gnorm):
            break
        x, e, gflat = trial, e_trial, g_trial
    return x, e, float(np.linalg.norm(gflat))


def optimize_positions(n: int, m: float, d: int, restarts: int = 10, seed: int = 0,
                       sigma: float = SIGMA, tol: float = 1e-10,
                       max_iter: int = 300) -> InteractionResult:
    """Place ``n`` particles of mass ``m`` to minimize their pairwise interaction.

    Returns the best of ``restarts`` descents; the reported energy is ``F0`` of
    the final measure (``+inf`` if the weights are inadmissible) and
    ``gradient_norm`` is that of the ``F0`` pair term.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    rng = np.random.default_rng(seed)
    if n == 1:
        pts = np.zeros((1, d))
        mu = AtomicMeasure(pts, [m])
        return InteractionResult(F0_energy(mu, d, sigma), pts, 0.0, 1, (pair_energy(mu, d),))
    pair_scale = m**2 if d == 3 else 0.5 * m**2
    best = None
    history = []
    for _ in range(restarts):
        x, e, gnorm = _descend(_random_start(n, d, rng), d, tol / pair_scale, max_iter)
        if best is None or e < best[1]:
            best = (x, e, gnorm)
        history.append(best[1])
    x, _, gnorm = best
    mu = AtomicMeasure(x, np.full(n, m))
    return InteractionResult(F0_energy(mu, d, sigma), x, pair_scale * gnorm, restarts,
                             tuple(pair_scale * h for h in history))


@dataclass(frozen=True)
class LatticeReport:
    nn_distances: np.ndarray
    cv: float
    angle_histogram: np.ndarray | None
    angle_bins: np.ndarray | None


def lattice_report(positions, d: int, n_bins: int = 12) -> LatticeReport:
    """Nearest-neighbour distances (sorted), their coefficient of variation and, in 2-D,
    a histogram of nearest-neighbour directions folded into ``[0, pi)``."""
    pts = wrap(np.asarray(positions, dtype=float).reshape(-1, d))
    n = len(pts)
    if n < 2:
        raise ValueError("need at least two points")
    diff = wrap(pts[:, None, :] - pts[None, :, :])
    dist = np.linalg.norm(diff, axis=-1)
    np.fill_diagonal(dist, np.inf)
    nearest = dist.argmin(axis=1)
    nn = dist[np.arange(n), nearest]
    cv = float(nn.std() / nn.mean())
    hist = bins = None
    if d == 2:
        vec = diff[nearest, np.arange(n)]
        angles = np.mod(np.arctan2(vec[:, 1], vec[:, 0]), np.pi)
        hist, bins = np.histogram(angles, bins=n_bins, range=(0.0, np.pi))
    return LatticeReport(np.sort(nn), cv, hist, bins)
