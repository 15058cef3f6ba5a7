"""Expansion checks: recovery fields over an eta sweep and the fit ``E(eta) ~ a + b eta``.

For each ``eta`` the recovery field is built from the optimal droplet count,
optimized droplet positions and the optimal 1-D profile, with ``eps`` slaved
to ``eta``. The fitted intercept is compared with the first-order energy of
the mass and the slope with the second-order energy of the configuration.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import optimize

from okas.diffuse import (EnergyBreakdown, ScalingParams, constant_state_energy, energy_rescaled,
                          minimize)
from okas.droplets import DropletConfiguration, _grid_slabs, mass_from_radius
from okas.effective import e0_2d_envelope, e0_conjectured
from okas.grid import ScalarField, TorusGrid
from okas.interaction import F0_energy, optimize_positions
from okas.sharp import sharp_energy_grid
from okas.wells import SIGMA, MollifiedIndicator, mollify_indicator, optimal_profile

DEFAULT_GRID = {2: 256, 3: 64}


def _check_decreasing(etas) -> list[float]:
    etas = [float(e) for e in etas]
    if not etas:
        raise ValueError("empty eta list")
    if any(not 0.0 < e < 1.0 for e in etas):
        raise ValueError("eta values must lie in (0, 1)")
    if any(b >= a for a, b in zip(etas, etas[1:])):
        raise ValueError("eta list must be strictly decreasing")
    return etas


def slaving_schedule(eta_list, d: int, zeta: float = 1.0, regime: str = "second") -> list[float]:
    """``eps(eta)``: ``eta^(4 + zeta + 1/2)`` in 3-D; ``eta / |log eta|^2`` (first order) or
    ``eta / |log eta|^3`` (second order) in 2-D."""
    etas = _check_decreasing(eta_list)
    if d == 3:
        return [e ** (4.0 + zeta + 0.5) for e in etas]
    if d != 2:
        raise ValueError("dimension must be 2 or 3")
    power = {"first": 2, "second": 3}.get(regime)
    if power is None:
        raise ValueError("regime must be 'first' or 'second'")
    return [e / abs(math.log(e)) ** power for e in etas]


def first_order_energy(M: float, d: int, sigma: float) -> float:
    if d == 2:
        return e0_2d_envelope(M, sigma)[0]
    return e0_conjectured(M, sigma)[0]


def optimal_count(M: float, d: int, sigma: float) -> int:
    if d == 2:
        return e0_2d_envelope(M, sigma)[1]
    return e0_conjectured(M, sigma)[1]


@dataclass(frozen=True)
class SweepPlan:
    d: int
    mass_M: float
    etas: tuple[float, ...]
    zeta: float = 1.0
    regime: str = "second"
    grid_sizes: tuple[int, ...] | None = None
    sigma: float = SIGMA
    minimize_steps: int = 0
    restarts: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        etas = tuple(_check_decreasing(self.etas))
        object.__setattr__(self, "etas", etas)
        sizes = self.grid_sizes
        if sizes is None:
            sizes = (DEFAULT_GRID[self.d],) * len(etas)
        elif isinstance(sizes, int):
            sizes = (sizes,) * len(etas)
        sizes = tuple(int(n) for n in sizes)
        if len(sizes) == 1:
            sizes = sizes * len(etas)
        if len(sizes) != len(etas):
            raise ValueError("need one grid size per eta")
        object.__setattr__(self, "grid_sizes", sizes)
        for p, n in zip(self.params(), sizes):
            if not p.regime_ok(self.regime):
                raise ValueError(f"(eta={p.eta}, eps={p.eps}) outside the slaving regime")
            if p.eps < 3.0 / n:
                raise ValueError(f"eps={p.eps:.3g} not resolved by {n} cells (need eps >= 3h)")

    @property
    def epsilons(self) -> list[float]:
        return slaving_schedule(self.etas, self.d, self.zeta, self.regime)

    def params(self) -> list[ScalingParams]:
        return [ScalingParams(self.d, eta, eps, self.mass_M, self.zeta, self.sigma)
                for eta, eps in zip(self.etas, self.epsilons)]


@dataclass(frozen=True)
class Recovery:
    config: DropletConfiguration
    field: ScalarField
    mollified: MollifiedIndicator
    radius_scale: float
    eps: float


def _profile_mass(centers, radii, eps: float, grid: TorusGrid) -> float:
    from okas.green import wrap

    total = 0.0
    for _, pts in _grid_slabs(grid):
        dist = np.full(pts.shape[:-1], np.inf)
        for c, r in zip(centers, radii):
            dist = np.minimum(dist, np.linalg.norm(wrap(pts - c), axis=-1) - r)
        total += float(optimal_profile(-dist, eps).sum())
    return total / grid.size


def recovery_details(M: float, d: int, eta: float, grid: TorusGrid, sigma: float = SIGMA,
                     eps: float | None = None, regime: str = "second", zeta: float = 1.0,
                     restarts: int = 10, seed: int = 0) -> Recovery:
    """Recovery field with its diagnostics; see :func:`build_recovery`."""
    if M <= 0:
        raise ValueError("M must be positive")
    if grid.d != d:
        raise ValueError("grid dimension differs from d")
    if eps is None:
        eps = slaving_schedule([eta], d, zeta, regime)[0]
    n = optimal_count(M, d, sigma)
    if n == 1:
        centers = np.zeros((1, d))
    else:
        centers = optimize_positions(n, M / n, d, restarts=restarts, seed=seed,
                                     sigma=sigma).positions
    config = DropletConfiguration(d, centers, np.full(n, M / n), eta)
    h = grid.spacing
    need = max(3.0 / eps, 4.0 / config.radii.min())
    if grid.n_cells < need:
        suggested = 1 << int(math.ceil(math.log2(need)))
        raise ValueError(f"droplets unresolved on {grid.n_cells} cells (eps={eps:.3g}, "
                         f"radius={config.radii.min():.3g}, h={h:.3g}); use n_cells >= {suggested}")
    # Common radius scale s so that the profile carries exactly the mass M eta^d.
    radii = config.radii
    target = M * eta**d
    s_max = 0.4999 / radii.max()
    if n > 1:
        dist = config.center_distances()
        np.fill_diagonal(dist, np.inf)
        s_max = min(s_max, 0.9999 * (dist / (radii[:, None] + radii[None, :])).min())
    excess = lambda s: _profile_mass(centers, s * radii, eps, grid) - target  # noqa: E731
    lo, hi = 1e-6, s_max
    if excess(lo) > 0:
        raise ValueError(f"interface width eps={eps:.3g} too large: the profile tails alone "
                         f"exceed the mass {target:.3g}")
    if excess(hi) < 0:
        raise ValueError("cannot reach the mass without droplets touching")
    scale = float(optimize.brentq(excess, lo, hi, xtol=1e-15, rtol=1e-15))
    adjusted = DropletConfiguration(d, centers, mass_from_radius(scale * radii, d, eta), eta)
    moll = mollify_indicator(adjusted, grid, eps, alpha=eta)
    v = moll.field.with_values(moll.field.values / eta**d)
    if abs(v.mean() - M) > 1e-6:
        raise RuntimeError(f"mass correction failed: int v = {v.mean():.12g}, expected {M}")
    return Recovery(config, v, moll, scale, eps)


def build_recovery(M: float, d: int, eta: float, grid: TorusGrid, sigma: float = SIGMA,
                   eps: float | None = None, **kwargs) -> tuple[DropletConfiguration, ScalarField]:
    """Droplet configuration at mass ``M`` and its diffuse recovery field ``v``.

    Droplets: the optimal number of equal masses, placed by the interaction
    optimizer (a single droplet sits at the origin). Field: optimal profile of
    the signed distance at width ``eps`` (slaved to ``eta`` by default), with
    all radii rescaled by a common factor so that ``int v = M``.
    """
    rec = recovery_details(M, d, eta, grid, sigma, eps, **kwargs)
    return rec.config, rec.field


@dataclass(frozen=True)
class SweepPoint:
    eta: float
    eps: float
    n_cells: int
    energy: EnergyBreakdown
    constant: float
    sharp: EnergyBreakdown
    radius_scale: float
    mass: float
    minimized: EnergyBreakdown | None = None


@dataclass(frozen=True)
class LinearFit:
    intercept: float
    slope: float
    residuals: tuple[float, ...]


def fit_line(etas, values) -> LinearFit | None:
    """Least squares ``values ~ a + b eta``; ``None`` if the design is singular."""
    x = np.asarray(etas, dtype=float)
    y = np.asarray(values, dtype=float)
    design = np.column_stack([np.ones_like(x), x])
    if len(x) < 2 or np.linalg.cond(design) > 1e12:
        return None
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return LinearFit(float(coef[0]), float(coef[1]), tuple(float(r) for r in y - design @ coef))


@dataclass(frozen=True)
class ExpansionReport:
    plan: SweepPlan
    points: list[SweepPoint]
    first_order: float
    second_order: float
    fit: LinearFit | None
    sharp_fit: LinearFit | None
    minimized_fit: LinearFit | None = None
    config: DropletConfiguration | None = field(default=None, repr=False)

    @property
    def limit_gaps(self) -> list[float]:
        """``E(eta) - first_order`` along the sweep."""
        return [p.energy.total - self.first_order for p in self.points]

    @property
    def intercept_rel_error(self) -> float:
        if self.fit is None:
            return math.nan
        return abs(self.fit.intercept - self.first_order) / abs(self.first_order)

    @property
    def gaps_shrinking(self) -> bool:
        gaps = [abs(g) for g in self.limit_gaps]
        return all(b < a for a, b in zip(gaps, gaps[1:]))

    @property
    def slope_sign_matches(self) -> bool:
        return self.fit is not None and np.sign(self.fit.slope) == np.sign(self.second_order)

    @property
    def constant_exceeds_recovery(self) -> bool:
        return all(p.constant > p.energy.total for p in self.points)


def expansion_check(plan: SweepPlan) -> ExpansionReport:
    points = []
    config = None
    minimized_totals = []
    for p, n in zip(plan.params(), plan.grid_sizes):
        grid = TorusGrid(plan.d, n)
        rec = recovery_details(plan.mass_M, plan.d, p.eta, grid, plan.sigma, p.eps,
                               restarts=plan.restarts, seed=plan.seed)
        config = rec.config
        minimized = None
        if plan.minimize_steps > 0:
            v_min, _ = minimize(rec.field, p, steps=plan.minimize_steps)
            minimized = energy_rescaled(v_min, p)
            minimized_totals.append(minimized.total)
        points.append(SweepPoint(
            p.eta, p.eps, n, energy_rescaled(rec.field, p), constant_state_energy(p),
            sharp_energy_grid(rec.config, grid, p), rec.radius_scale, rec.field.mean(), minimized,
        ))
    etas = [pt.eta for pt in points]
    f0 = F0_energy(config.measure(), plan.d, plan.sigma)
    return ExpansionReport(
        plan, points, first_order_energy(plan.mass_M, plan.d, plan.sigma), f0,
        fit_line(etas, [pt.energy.total for pt in points]),
        fit_line(etas, [pt.sharp.total for pt in points]),
        fit_line(etas, minimized_totals) if minimized_totals else None,
        config,
    )


def _svg_plot(report: ExpansionReport) -> str:
    etas = np.array([p.eta for p in report.points])
    vals = np.array([p.energy.total for p in report.points])
    sharp = np.array([p.sharp.total for p in report.points])
    lo_x, hi_x = 0.0, etas.max() * 1.1
    ys = np.concatenate([vals, sharp, [report.first_order]])
    lo_y, hi_y = ys.min() * 0.95, ys.max() * 1.05
    w, h, pad = 480, 320, 40

    def px(x, y):
        return (pad + (x - lo_x) / (hi_x - lo_x) * (w - 2 * pad),
                h - pad - (y - lo_y) / (hi_y - lo_y) * (h - 2 * pad))

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">',
             f'<rect width="{w}" height="{h}" fill="white"/>',
             f'<line x1="{pad}" y1="{h - pad}" x2="{w - pad}" y2="{h - pad}" stroke="black"/>',
             f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{h - pad}" stroke="black"/>',
             f'<text x="{w / 2}" y="{h - 8}" text-anchor="middle">eta</text>']
    for series, colour in ((vals, "steelblue"), (sharp, "darkorange")):
        for x, y in zip(etas, series):
            cx, cy = px(x, y)
            parts.append(f'<circle cx="{cx:.1f}" cy="{cy:.1f}" r="4" fill="{colour}"/>')
    if report.fit is not None:
        (x0, y0), (x1, y1) = px(lo_x, report.fit.intercept), px(hi_x, report.fit.intercept
                                                               + report.fit.slope * hi_x)
        parts.append(f'<line x1="{x0:.1f}" y1="{y0:.1f}" x2="{x1:.1f}" y2="{y1:.1f}" '
                     'stroke="steelblue" stroke-dasharray="4"/>')
    _, ly = px(0.0, report.first_order)
    parts.append(f'<line x1="{pad}" y1="{ly:.1f}" x2="{w - pad}" y2="{ly:.1f}" stroke="gray"/>')
    parts.append("</svg>")
    return "\n".join(parts)


def write_report(report: ExpansionReport, outdir: str | Path, svg: bool = True) -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["eta", "eps", "grid", "E", "interfacial", "well", "nonlocal",
                         "constant_state", "sharp_E", "radius_scale", "mass", "E_minimized"])
        for p in report.points:
            writer.writerow([repr(p.eta), repr(p.eps), p.n_cells, repr(p.energy.total),
                             repr(p.energy.interfacial), repr(p.energy.well),
                             repr(p.energy.nonlocal_), repr(p.constant), repr(p.sharp.total),
                             repr(p.radius_scale), repr(p.mass),
                             "" if p.minimized is None else repr(p.minimized.total)])
    lines = [f"first_order_prediction = {report.first_order!r}",
             f"second_order_prediction = {report.second_order!r}"]
    for name, fit in (("recovery", report.fit), ("sharp", report.sharp_fit),
                      ("minimized", report.minimized_fit)):
        if fit is None:
            lines.append(f"{name}_fit = unavailable")
            continue
        rel = abs(fit.intercept - report.first_order) / abs(report.first_order)
        lines += [f"{name}_intercept = {fit.intercept!r}",
                  f"{name}_slope = {fit.slope!r}",
                  f"{name}_intercept_rel_error = {rel!r}",
                  f"{name}_residuals = {','.join(repr(r) for r in fit.residuals)}"]
    lines += [f"limit_gaps = {','.join(repr(g) for g in report.limit_gaps)}",
              f"limit_gaps_shrinking = {report.gaps_shrinking}",
              f"slope_sign_matches_second_order = {report.slope_sign_matches}",
              f"constant_state_exceeds_recovery = {report.constant_exceeds_recovery}"]
    (out / "fit.txt").write_text("\n".join(lines) + "\n")
    if svg:
        (out / "energy_vs_eta.svg").write_text(_svg_plot(report))
