"""Ball and disk droplet configurations on the torus.

A droplet of rescaled mass ``m`` occupies volume ``m * eta^d``, so its radius is
``eta * (3m / 4pi)^(1/3)`` in 3-D and ``eta * sqrt(m / pi)`` in 2-D.

Configuration files hold one droplet per line, ``x y [z] mass``; ``#`` starts a
comment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np

from okas.green import AtomicMeasure, wrap
from okas.grid import ScalarField, TorusGrid


def radius_from_mass(m, d: int, eta: float = 1.0):
    m = np.asarray(m, dtype=float)
    if d == 3:
        return eta * np.cbrt(3.0 * m / (4.0 * np.pi))
    return eta * np.sqrt(m / np.pi)


def mass_from_radius(r, d: int, eta: float = 1.0):
    r = np.asarray(r, dtype=float) / eta
    if d == 3:
        return 4.0 * np.pi * r**3 / 3.0
    return np.pi * r**2


def boundary_measure(r, d: int):
    """Surface area of a sphere (3-D) or circumference of a circle (2-D)."""
    r = np.asarray(r, dtype=float)
    return 4.0 * np.pi * r**2 if d == 3 else 2.0 * np.pi * r


@dataclass(frozen=True)
class DropletConfiguration:
    """Disjoint balls (3-D) or disks (2-D) with centers on the torus and rescaled masses."""

    d: int
    centers: np.ndarray = field(repr=False)
    masses: np.ndarray = field(repr=False)
    eta: float = 1.0

    def __post_init__(self) -> None:
        if self.d not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.d}")
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        masses = np.atleast_1d(np.asarray(self.masses, dtype=float))
        centers = np.asarray(self.centers, dtype=float).reshape(len(masses), self.d)
        if np.any(masses <= 0):
            raise ValueError("droplet masses must be positive")
        object.__setattr__(self, "centers", wrap(centers))
        object.__setattr__(self, "masses", masses)
        radii = self.radii
        if np.any(radii >= 0.5):
            raise ValueError("droplet overlaps its own periodic image")
        if len(masses) > 1:
            gaps = self.center_distances() - (radii[:, None] + radii[None, :])
            np.fill_diagonal(gaps, np.inf)
            if gaps.min() <= 0:
                raise ValueError("droplets overlap")

    @classmethod
    def from_droplets(cls, d: int, droplets, eta: float = 1.0) -> "DropletConfiguration":
        """Build from an iterable of ``(center, mass)`` pairs."""
        droplets = list(droplets)
        centers = np.array([c for c, _ in droplets], dtype=float).reshape(len(droplets), d)
        masses = np.array([m for _, m in droplets], dtype=float)
        return cls(d, centers, masses, eta)

    @classmethod
    def empty(cls, d: int, eta: float = 1.0) -> "DropletConfiguration":
        return cls(d, np.zeros((0, d)), np.zeros(0), eta)

    @property
    def droplets(self) -> list[tuple[np.ndarray, float]]:
        return [(c.copy(), float(m)) for c, m in zip(self.centers, self.masses)]

    def __len__(self) -> int:
        return len(self.masses)

    @property
    def radii(self) -> np.ndarray:
        return radius_from_mass(self.masses, self.d, self.eta)

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    @property
    def perimeter(self) -> float:
        """Total boundary measure, in torus units."""
        return float(boundary_measure(self.radii, self.d).sum())

    def center_distances(self) -> np.ndarray:
        diff = wrap(self.centers[:, None, :] - self.centers[None, :, :])
        return np.linalg.norm(diff, axis=-1)

    def min_gap(self) -> float:
        """Smallest boundary-to-boundary distance between two distinct droplets."""
        if len(self) < 2:
            return np.inf
        r = self.radii
        pair = self.center_distances() - (r[:, None] + r[None, :])
        return float(pair[np.triu_indices(len(self), 1)].min())

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        """Torus distance to the union of droplets, negative inside."""
        points = np.asarray(points, dtype=float)
        out = np.full(points.shape[:-1], np.inf)
        for c, r in zip(self.centers, self.radii):
            out = np.minimum(out, np.linalg.norm(wrap(points - c), axis=-1) - r)
        return out

    def measure(self) -> AtomicMeasure:
        return AtomicMeasure(self.centers, self.masses)

    def relabeled(self, order) -> "DropletConfiguration":
        order = np.asarray(order)
        return DropletConfiguration(self.d, self.centers[order], self.masses[order], self.eta)

    def with_eta(self, eta: float) -> "DropletConfiguration":
        return DropletConfiguration(self.d, self.centers, self.masses, eta)


def _grid_slabs(grid: TorusGrid, max_points: int = 4_000_000):
    """Yield ``(index, points)`` for slabs of the grid along the first axis."""
    n = grid.n_cells
    per_row = n ** (grid.d - 1)
    rows = max(1, max_points // per_row)
    axis = grid.axis
    rest = np.meshgrid(*([axis] * (grid.d - 1)), indexing="ij")
    rest = np.stack([r.ravel() for r in rest], axis=-1)
    for start in range(0, n, rows):
        stop = min(start + rows, n)
        first = np.repeat(axis[start:stop], per_row)[:, None]
        pts = np.hstack([first, np.tile(rest, (stop - start, 1))])
        yield slice(start, stop), pts.reshape((stop - start,) + grid.shape[1:] + (grid.d,))


def rasterize(config: DropletConfiguration, grid: TorusGrid, subsamples: int = 3) -> ScalarField:
    """Volume fraction of droplets in each cell (values in ``[0, 1]``).

    Cells whose center lies within half a cell diagonal of an interface are
    refined with ``subsamples^d`` evenly spaced sample points.
    """
    if config.d != grid.d:
        raise ValueError("configuration and grid dimensions differ")
    h = grid.spacing
    frac = np.zeros(grid.shape)
    if len(config) == 0:
        return ScalarField(grid, frac)
    offsets = (np.arange(subsamples) + 0.5) / subsamples - 0.5
    sub = np.array(list(product(offsets, repeat=grid.d))) * h
    reach = 0.5 * h * np.sqrt(grid.d)
    for sl, pts in _grid_slabs(grid):
        dist = config.signed_distance(pts)
        block = (dist < 0).astype(float)
        edge = np.abs(dist) < reach
        if np.any(edge):
            edge_pts = pts[edge]
            inside = config.signed_distance(edge_pts[:, None, :] + sub[None, :, :]) < 0
            block[edge] = inside.mean(axis=1)
        frac[sl] = block
    return ScalarField(grid, frac)


def read_config(path: str | Path, d: int | None = None, eta: float = 1.0) -> DropletConfiguration:
    """Parse a droplet configuration file (``x y [z] mass`` per line)."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            rows.append([float(tok) for tok in text.replace(",", " ").split()])
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: cannot parse {line!r}") from exc
    if not rows:
        if d is None:
            raise ValueError(f"{path}: empty configuration and no dimension given")
        return DropletConfiguration.empty(d, eta)
    widths = {len(r) for r in rows}
    if len(widths) != 1 or widths.pop() not in (3, 4):
        raise ValueError(f"{path}: every line needs 'x y [z] mass'")
    data = np.array(rows)
    file_d = data.shape[1] - 1
    if d is not None and d != file_d:
        raise ValueError(f"{path}: has {file_d}-D droplets, expected {d}-D")
    return DropletConfiguration(file_d, data[:, :-1], data[:, -1], eta)


def write_config(config: DropletConfiguration, path: str | Path) -> None:
    axes = "x y z"[: 2 * config.d - 1]
    lines = [f"# {axes} mass"]
    for c, m in zip(config.centers, config.masses):
        lines.append(" ".join(f"{v:.17g}" for v in (*c, m)))
    Path(path).write_text("\n".join(lines) + "\n")
