"""Periodic Green's function of -Laplace on the unit torus via Ewald summation.

``G`` solves ``-Laplace G = delta - 1`` with zero mean. With screening
parameter ``alpha`` it splits as

    G(x) = sum_n S(|x + n|) + sum_{k != 0} exp(-pi^2 |k|^2 / alpha^2) cos(2 pi k.x) / (4 pi^2 |k|^2)
           - 1 / (4 alpha^2)

where ``S(r) = erfc(alpha r) / (4 pi r)`` in 3-D and ``E1(alpha^2 r^2) / (4 pi)``
in 2-D. The constant keeps the mean zero: every screened kernel integrates to
``1 / (4 alpha^2)`` over R^d.

The free-space kernels are ``1 / (4 pi |x|)`` (3-D) and ``-log|x| / (2 pi)``
(2-D); the regular part ``g(x) = G(x) - free(x)`` is taken with ``x`` wrapped
into ``[-1/2, 1/2)^d``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product

import numpy as np
from scipy import integrate
from scipy.special import erf, erfc, exp1

from okas.grid import ScalarField, TorusGrid, laplacian, norms

DEFAULT_CUTOFFS = {3: (3, 9), 2: (6, 12)}

# chunk size (points x lattice terms) for vectorized lattice sums
_CHUNK_ELEMENTS = 2_000_000


class SingularityError(ValueError):
    """Raised when G is requested at the lattice origin."""


def _lattice(d: int, shells: int, exclude_origin: bool = False) -> np.ndarray:
    vecs = np.array(list(product(range(-shells, shells + 1), repeat=d)), dtype=float)
    if exclude_origin:
        vecs = vecs[np.any(vecs != 0, axis=1)]
    return vecs


def _half_lattice(d: int, shells: int) -> np.ndarray:
    """Nonzero integer vectors with max-norm <= shells, one of each +-k pair."""
    vecs = _lattice(d, shells, exclude_origin=True)
    keep = np.zeros(len(vecs), dtype=bool)
    undecided = np.ones(len(vecs), dtype=bool)
    for ax in range(d):
        keep |= undecided & (vecs[:, ax] > 0)
        undecided &= vecs[:, ax] == 0
    return vecs[keep]


def wrap(x) -> np.ndarray:
    """Map points to their representative in ``[-1/2, 1/2)^d``."""
    x = np.asarray(x, dtype=float)
    return x - np.floor(x + 0.5)


def screened_kernel(r: np.ndarray, alpha: float, d: int) -> np.ndarray:
    """Short-range Ewald kernel ``S(r)``."""
    if d == 3:
        return erfc(alpha * r) / (4.0 * np.pi * r)
    return exp1((alpha * r) ** 2) / (4.0 * np.pi)


def screened_kernel_derivative(r: np.ndarray, alpha: float, d: int) -> np.ndarray:
    """``dS/dr``."""
    if d == 3:
        gauss = 2.0 * alpha / np.sqrt(np.pi) * np.exp(-((alpha * r) ** 2))
        return -(erfc(alpha * r) / r + gauss) / (4.0 * np.pi * r)
    return -np.exp(-((alpha * r) ** 2)) / (2.0 * np.pi * r)


def free_kernel(r: np.ndarray, d: int) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if d == 3:
        return 1.0 / (4.0 * np.pi * r)
    return -np.log(r) / (2.0 * np.pi)


def near_field(r: np.ndarray, alpha: float, d: int) -> np.ndarray:
    """``free(r) - S(r)``, smooth at ``r = 0`` and evaluated without cancellation."""
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    zero = r == 0.0
    rr = r[~zero]
    if d == 3:
        out[zero] = alpha / (2.0 * np.pi**1.5)
        out[~zero] = erf(alpha * rr) / (4.0 * np.pi * rr)
        return out
    # -(E1(z) + log z) / (4 pi) + log(alpha) / (2 pi), z = alpha^2 r^2;
    # E1(z) + log z = -gamma + Ein(z) and Ein has an alternating series.
    z = (alpha * rr) ** 2
    ein = np.empty_like(z)
    small = z < 0.5
    zs = z[small]
    term = zs.copy()
    acc = zs.copy()
    for j in range(2, 30):
        term = -term * zs * (j - 1) / (j * j)
        acc += term
    ein[small] = acc
    zl = z[~small]
    ein[~small] = exp1(zl) + np.log(zl) + np.euler_gamma
    e1_plus_log = -np.euler_gamma + ein
    out[~zero] = -e1_plus_log / (4.0 * np.pi) + np.log(alpha) / (2.0 * np.pi)
    out[zero] = np.euler_gamma / (4.0 * np.pi) + np.log(alpha) / (2.0 * np.pi)
    return out


@dataclass(frozen=True)
class EwaldEvaluator:
    """Ewald evaluation of ``G_{T^d}``, its gradient and its regular part.

    Cutoffs count lattice shells in max-norm: real-space images ``n`` with
    ``max|n_i| <= real_cutoff`` and modes ``k`` with ``max|k_i| <= recip_cutoff``.
    """

    d: int
    splitting: float = float(np.sqrt(np.pi))
    real_cutoff: int | None = None
    recip_cutoff: int | None = None

    def __post_init__(self) -> None:
        if self.d not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.d}")
        if self.splitting <= 0:
            raise ValueError("splitting must be positive")
        real, recip = DEFAULT_CUTOFFS[self.d]
        if self.real_cutoff is None:
            object.__setattr__(self, "real_cutoff", real)
        if self.recip_cutoff is None:
            object.__setattr__(self, "recip_cutoff", recip)

    def refined(self, extra: int = 1) -> "EwaldEvaluator":
        """Same evaluator with both cutoffs increased by ``extra`` shells."""
        return EwaldEvaluator(self.d, self.splitting, self.real_cutoff + extra, self.recip_cutoff + extra)

    @cached_property
    def images(self) -> np.ndarray:
        return _lattice(self.d, self.real_cutoff)

    @cached_property
    def far_images(self) -> np.ndarray:
        return _lattice(self.d, self.real_cutoff, exclude_origin=True)

    @cached_property
    def modes(self) -> np.ndarray:
        return _half_lattice(self.d, self.recip_cutoff)

    @cached_property
    def mode_weights(self) -> np.ndarray:
        """Weight of ``cos(2 pi k.x)`` per half-lattice mode (factor 2 for +-k)."""
        k2 = np.sum(self.modes**2, axis=1)
        return 2.0 * np.exp(-np.pi**2 * k2 / self.splitting**2) / (4.0 * np.pi**2 * k2)

    @property
    def background(self) -> float:
        return 1.0 / (4.0 * self.splitting**2)

    def _points(self, x) -> tuple[np.ndarray, tuple[int, ...]]:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.d:
            raise ValueError(f"points must have trailing dimension {self.d}")
        return wrap(x.reshape(-1, self.d)), x.shape[:-1]

    def _chunks(self, n_points: int, n_terms: int):
        step = max(1, _CHUNK_ELEMENTS // max(n_terms, 1))
        for start in range(0, n_points, step):
            yield slice(start, min(start + step, n_points))

    def _real_sum(self, x: np.ndarray, images: np.ndarray) -> np.ndarray:
        out = np.empty(len(x))
        for sl in self._chunks(len(x), len(images)):
            r = np.linalg.norm(x[sl, None, :] + images[None, :, :], axis=-1)
            out[sl] = screened_kernel(r, self.splitting, self.d).sum(axis=1)
        return out

    def _recip_sum(self, x: np.ndarray) -> np.ndarray:
        out = np.empty(len(x))
        for sl in self._chunks(len(x), len(self.modes)):
            out[sl] = np.cos(2.0 * np.pi * x[sl] @ self.modes.T) @ self.mode_weights
        return out

    def value(self, x) -> np.ndarray | float:
        """``G(x)`` for one point or an array of points (trailing axis ``d``)."""
        pts, shape = self._points(x)
        if np.any(np.all(np.abs(pts) < 1e-14, axis=1)):
            raise SingularityError("G is singular at the origin; use regular_part instead")
        vals = self._real_sum(pts, self.images) + self._recip_sum(pts) - self.background
        return vals.reshape(shape) if shape else float(vals[0])

    def regular_part(self, x) -> np.ndarray | float:
        """``g(x) = G(x) - free(x)`` with ``x`` wrapped into the unit cube."""
        pts, shape = self._points(x)
        r = np.linalg.norm(pts, axis=1)
        vals = (
            self._real_sum(pts, self.far_images)
            + self._recip_sum(pts)
            - self.background
            - near_field(r, self.splitting, self.d)
        )
        return vals.reshape(shape) if shape else float(vals[0])

    def regular_part_at_zero(self) -> float:
        return float(self.regular_part(np.zeros(self.d)))

    def gradient(self, x) -> np.ndarray:
        """``grad G(x)``; same leading shape as ``x``."""
        pts, shape = self._points(x)
        out = np.zeros_like(pts)
        n_terms = max(len(self.images), len(self.modes))
        for sl in self._chunks(len(pts), n_terms * self.d):
            disp = pts[sl, None, :] + self.images[None, :, :]
            r = np.linalg.norm(disp, axis=-1)
            if np.any(r < 1e-14):
                raise SingularityError("grad G is singular at the origin")
            radial = screened_kernel_derivative(r, self.splitting, self.d) / r
            out[sl] += np.einsum("pm,pmd->pd", radial, disp)
            phase = np.sin(2.0 * np.pi * pts[sl] @ self.modes.T)
            out[sl] -= 2.0 * np.pi * (phase * self.mode_weights) @ self.modes
        return out.reshape(shape + (self.d,))

    def smeared(self, x, width: float) -> np.ndarray:
        """Interaction kernel of two periodic Gaussians of standard deviation ``width``.

        Equals ``(G * gamma * gamma)(x)``; its Fourier multiplier is
        ``exp(-4 pi^2 |k|^2 width^2) / (4 pi^2 |k|^2)``. Evaluated in real space
        from ``G`` (through its regular part) minus a screened sum with
        ``alpha = 1 / (2 width)``, so it is finite at ``x = 0``.
        """
        pts, shape = self._points(x)
        alpha_b = 1.0 / (2.0 * width)
        shells = int(np.ceil(7.0 / alpha_b)) + 1
        images = _lattice(self.d, shells, exclude_origin=True)
        r = np.linalg.norm(pts, axis=1)
        screened = np.empty(len(pts))
        for sl in self._chunks(len(pts), len(images)):
            rr = np.linalg.norm(pts[sl, None, :] + images[None, :, :], axis=-1)
            screened[sl] = screened_kernel(rr, alpha_b, self.d).sum(axis=1)
        vals = (
            self.regular_part(pts)
            + near_field(r, alpha_b, self.d)
            - screened
            + 1.0 / (4.0 * alpha_b**2)
        )
        return vals.reshape(shape)


@lru_cache(maxsize=None)
def default_evaluator(d: int) -> EwaldEvaluator:
    return EwaldEvaluator(d)


def green_value(x, d: int):
    """``G_{T^d}(x)``; raises :class:`SingularityError` at the origin."""
    return default_evaluator(d).value(x)


def green_gradient(x, d: int) -> np.ndarray:
    return default_evaluator(d).gradient(x)


def regular_part(x, d: int):
    return default_evaluator(d).regular_part(x)


@lru_cache(maxsize=None)
def regular_part_at_zero(d: int) -> float:
    """Self-interaction constant ``g^(d)(0)``, computed by Ewald summation."""
    return default_evaluator(d).regular_part_at_zero()


def self_constant_report(d: int, max_extra: int = 3) -> list[tuple[int, int, float, float]]:
    """``g(0)`` at increasing cutoffs: rows of (real_cutoff, recip_cutoff, value, delta)."""
    rows = []
    base = default_evaluator(d)
    previous = None
    for extra in range(-2, max_extra + 1):
        ev = EwaldEvaluator(d, base.splitting, base.real_cutoff + extra, base.recip_cutoff + extra)
        value = ev.regular_part_at_zero()
        delta = float("nan") if previous is None else value - previous
        rows.append((ev.real_cutoff, ev.recip_cutoff, value, delta))
        previous = value
    return rows


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite weighted point set ``sum_i m_i delta_{x_i}`` on the torus."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if pts.size == 0:
            pts = pts.reshape(0, pts.shape[-1] if pts.ndim == 2 else 3)
        if len(pts) != len(w):
            raise ValueError("points and weights must have the same length")
        object.__setattr__(self, "points", wrap(pts))
        object.__setattr__(self, "weights", w)

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def min_separation(self) -> float:
        n = len(self)
        if n < 2:
            return np.inf
        diff = wrap(self.points[:, None, :] - self.points[None, :, :])
        dist = np.linalg.norm(diff, axis=-1)
        return float(dist[~np.eye(n, dtype=bool)].min())

    def translated(self, shift) -> "AtomicMeasure":
        return AtomicMeasure(self.points + np.asarray(shift, dtype=float), self.weights)


def _pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, k=1)


def pair_energy(mu: AtomicMeasure, d: int, include_self: bool = False) -> float:
    """``sum_{i != j} m_i m_j G(x_i - x_j)``, plus ``sum m_i^2 g(0)`` if requested."""
    if mu.d != d:
        raise ValueError(f"measure lives in {mu.d}-D, expected {d}-D")
    total = 0.0
    if len(mu) > 1:
        if mu.min_separation() < 1e-12:
            raise ValueError("coincident points in atomic measure")
        i, j = _pair_indices(len(mu))
        g = green_value(mu.points[i] - mu.points[j], d)
        total = 2.0 * float(np.sum(mu.weights[i] * mu.weights[j] * g))
    if include_self:
        total += regular_part_at_zero(d) * float(np.sum(mu.weights**2))
    return total


def pair_energy_gradient(mu: AtomicMeasure, d: int) -> np.ndarray:
    """Gradient of the off-diagonal pair sum with respect to each point, shape (n, d)."""
    n = len(mu)
    grad = np.zeros((n, d))
    if n < 2:
        return grad
    i, j = _pair_indices(n)
    g = green_gradient(mu.points[i] - mu.points[j], d)
    contrib = 2.0 * (mu.weights[i] * mu.weights[j])[:, None] * g
    np.add.at(grad, i, contrib)
    np.add.at(grad, j, -contrib)
    return grad


def _offset_kernel(grid: TorusGrid, width: float, evaluator: EwaldEvaluator) -> np.ndarray:
    offsets = grid.points() + 0.5  # j * h for j = 0..n-1 along each axis
    return evaluator.smeared(offsets, width).reshape(grid.shape)


def smeared_pair_energy(charges: np.ndarray, grid: TorusGrid, width: float,
                        evaluator: EwaldEvaluator | None = None) -> float:
    """Pairwise Coulomb energy of Gaussian-smeared charges at the grid points.

    Returns ``sum_{i,j} q_i q_j K(x_i - x_j)`` with ``K`` from
    :meth:`EwaldEvaluator.smeared`. The diagonal uses ``K(0)``, which is built
    from ``g(0)``. The sum is accumulated offset by offset, without FFTs.
    """
    evaluator = evaluator or default_evaluator(grid.d)
    q = np.asarray(charges, dtype=float).reshape(grid.shape)
    kernel = _offset_kernel(grid, width, evaluator)
    axes = tuple(range(grid.d))
    total = 0.0
    for idx in np.ndindex(*grid.shape):
        total += kernel[idx] * float(np.sum(q * np.roll(q, idx, axis=axes)))
    return total


def smeared_potential(charges: np.ndarray, grid: TorusGrid, width: float,
                      evaluator: EwaldEvaluator | None = None) -> ScalarField:
    """Potential ``phi(x_i) = sum_j q_j K(x_i - x_j)`` of Gaussian-smeared charges."""
    evaluator = evaluator or default_evaluator(grid.d)
    q = np.asarray(charges, dtype=float).reshape(grid.shape)
    kernel = _offset_kernel(grid, width, evaluator)
    axes = tuple(range(grid.d))
    phi = np.zeros(grid.shape)
    for idx in np.ndindex(*grid.shape):
        phi += kernel[idx] * np.roll(q, idx, axis=axes)
    return ScalarField(grid, phi)


def interp_ratio(f: ScalarField) -> float:
    """``|f|_{H^-1}^2 / (|f|_1^2 (1 + log(|f|_inf / |f|_1)))`` for zero-mean 2-D ``f``."""
    from okas.grid import hminus1_sq

    if f.grid.d != 2:
        raise ValueError("interp_ratio is defined on the 2-D torus")
    l1, _, linf = norms(f)
    if linf == 0.0:
        raise ValueError("field is identically zero")
    if abs(f.mean()) > 1e-10 * l1:
        raise ValueError("field must have zero mean")
    return hminus1_sq(f) / (l1**2 * (1.0 + np.log(linf / l1)))


def brezis_merle_check(phi: ScalarField) -> float:
    """``int exp|phi|`` for a zero-mean 2-D potential with ``int |Laplace phi| = 1``."""
    if phi.grid.d != 2:
        raise ValueError("brezis_merle_check is defined on the 2-D torus")
    if not np.any(phi.values):
        return 1.0
    mass = norms(laplacian(phi))[0]
    if abs(mass - 1.0) > 1e-8:
        raise ValueError(f"need int |Laplace phi| = 1, got {mass:.12g}")
    if abs(phi.mean()) > 1e-8 * (1.0 + np.abs(phi.values).max()):
        raise ValueError("phi must have zero mean")
    return float(np.mean(np.exp(np.abs(phi.values))))


def regular_part_sup(samples: int = 65) -> float:
    """Upper estimate of ``sup |g^(2)|`` over the closed unit square.

    Maximum over a uniform sample grid plus the largest neighbour difference
    (a bound on the variation inside each sample cell).
    """
    s = np.linspace(-0.5, 0.5, samples)
    pts = np.stack(np.meshgrid(s, s, indexing="ij"), axis=-1)
    g = np.abs(regular_part(pts, 2))
    slack = max(np.abs(np.diff(g, axis=0)).max(), np.abs(np.diff(g, axis=1)).max())
    return float(g.max() + slack)


def brezis_merle_bound() -> float:
    """Constructive ``C0 = e^C int_{(-1/2,1/2)^2} |y|^(-1/(2 pi)) dy`` with ``C = sup|g^(2)|``.

    Valid because ``|y| < 1`` on the square, so ``|G(y)| <= C - log|y| / (2 pi)``.
    """
    a = 1.0 / (2.0 * np.pi)
    radial = 0.5 ** (2.0 - a) / (2.0 - a)
    angular = integrate.quad(lambda s: (1.0 + s * s) ** (-a / 2.0), 0.0, 1.0, epsabs=1e-14)[0]
    return float(np.exp(regular_part_sup()) * 8.0 * radial * angular)
