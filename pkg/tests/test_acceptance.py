"""Acceptance criteria 1-10, each at its stated tolerance and time budget.

Run under pytest (a PASS/FAIL line per criterion is printed in the terminal
summary) or directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import dataclasses
import math
import time
from functools import lru_cache

import numpy as np
import pytest

from okas.diffuse import ScalingParams, constant_state_energy, energy_rescaled
from okas.droplets import DropletConfiguration, mass_from_radius
from okas.effective import (LONE_DROPLET_MASS, e0_2d_envelope, e0_conjectured, f_ball, m_star,
                            partition_bruteforce)
from okas.green import (AtomicMeasure, brezis_merle_bound, brezis_merle_check, green_value,
                        interp_ratio, pair_energy, pair_energy_gradient, smeared_pair_energy, wrap)
from okas.grid import ScalarField, TorusGrid, hminus1_sq, poisson_solve
from okas.harness import SweepPlan, expansion_check
from okas.interaction import F0_energy, optimize_positions
from okas.wells import mollifier_constant, mollify_indicator

RESULTS: dict[int, tuple[bool, str]] = {}


def record(number: int, ok: bool, detail: str, elapsed: float, budget: float) -> None:
    within = elapsed < budget
    RESULTS[number] = (ok and within, f"{detail}; {elapsed:.2f}s of {budget:.0f}s")
    line = f"criterion {number:2d}: {'PASS' if ok and within else 'FAIL'}  {RESULTS[number][1]}"
    print(line)
    assert ok, line
    assert within, line


def test_criterion_01_m_star():
    t0 = time.perf_counter()
    value = m_star(1.0)
    ok = abs(value - 22.066) <= 0.01
    record(1, ok, f"m* = {value:.6f}", time.perf_counter() - t0, 1)


def test_criterion_02_cosine_hminus1():
    t0 = time.perf_counter()
    worst = 0.0
    for d, sizes in ((2, (16, 32, 64, 128, 256)), (3, (16, 32, 64))):
        for n in sizes:
            u = TorusGrid(d, n).from_function(lambda x, *rest: np.cos(2 * np.pi * x))
            worst = max(worst, abs(hminus1_sq(u) * 8 * np.pi**2 - 1))
    record(2, worst <= 1e-10, f"max rel error {worst:.2e}", time.perf_counter() - t0, 1)


def band_limited(grid: TorusGrid, rng, band: int = 3) -> ScalarField:
    ks = grid.wavevectors()
    mask = np.ones(grid.shape, dtype=bool)
    for k in ks:
        mask &= np.abs(k) <= band
    hat = np.fft.fftn(rng.normal(size=grid.shape))
    hat[~mask] = 0.0
    hat.flat[0] = 0.0
    return ScalarField(grid, np.fft.ifftn(hat).real)


def test_criterion_03_ewald_vs_spectral():
    # charges are the field deconvolved by a Gaussian of width beta; the pairwise Ewald
    # sum of the smeared charges then reproduces the continuum quadratic form
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    worst = 0.0
    for d, n in ((2, 32), (3, 16)):
        grid = TorusGrid(d, n)
        beta = math.sqrt(36 / (2 * math.pi**2 * (n - 3) ** 2))
        gain = np.exp(2 * math.pi**2 * beta**2 * grid.k_squared)
        for _ in range(20):
            f = band_limited(grid, rng)
            q = np.fft.ifftn(np.fft.fftn(f.values) * gain).real * grid.cell_volume
            pairwise = smeared_pair_energy(q, grid, beta)
            worst = max(worst, abs(pairwise / hminus1_sq(f) - 1))
    record(3, worst <= 1e-6, f"max rel error {worst:.2e} over 40 densities",
           time.perf_counter() - t0, 60)


def test_criterion_04_mollification_bounds():
    t0 = time.perf_counter()
    r = 0.2
    failures, rows = [], 0
    for d in (2, 3):
        config = DropletConfiguration(d, [np.zeros(d)], [mass_from_radius(r, d)])
        for eps, n in ((0.04, 128), (0.02, 256), (0.01, 512)):
            base = mollify_indicator(config, TorusGrid(d, n), eps, alpha=0.1)
            for alpha in (0.1, 0.05):
                res = dataclasses.replace(base, alpha=alpha, c0=mollifier_constant(alpha))
                rows += 1
                if not (res.energy_ok and res.l1_ok):
                    failures.append((d, eps, alpha))
            del base
    record(4, not failures, f"{rows - len(failures)}/{rows} cases within both bounds",
           time.perf_counter() - t0, 120)


def test_criterion_05_equal_splits():
    t0 = time.perf_counter()
    splits = {M: partition_bruteforce(M, sigma=1 / 3, perturbations=500, seed=M).n
              for M in (1, 5, 20, 60)}
    ok = splits[1] == 1 and 1 < LONE_DROPLET_MASS
    record(5, ok, f"equal splits n_opt = {splits}", time.perf_counter() - t0, 60)


def test_criterion_06_splitting_structure():
    t0 = time.perf_counter()
    value, n = e0_conjectured(30.0, sigma=1.0)
    ok = n == 2 and value == pytest.approx(2 * f_ball(15.0)) and value < f_ball(30.0)
    top = m_star(1.0) - 0.1
    singles = all(e0_conjectured(m, 1.0)[1] == 1 for m in np.arange(0.1, top + 1e-12, 0.1))
    record(6, ok and singles, f"e0(30) = {value:.6f} with n_opt = {n}; singletons up to m*-0.1",
           time.perf_counter() - t0, 1)


def test_criterion_07_interaction_machinery():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst = 0.0
    h = 1e-6
    for d in (2, 3):
        done = 0
        while done < 20:
            n = int(rng.integers(2, 7))
            mu = AtomicMeasure(rng.uniform(-0.5, 0.5, (n, d)), rng.uniform(0.5, 2.0, n))
            if mu.min_separation() < 0.05:
                continue
            grad = pair_energy_gradient(mu, d)
            fd = np.zeros_like(grad)
            for i in range(n):
                for k in range(d):
                    step = np.zeros((n, d))
                    step[i, k] = h
                    fd[i, k] = (pair_energy(AtomicMeasure(mu.points + step, mu.weights), d)
                                - pair_energy(AtomicMeasure(mu.points - step, mu.weights), d)) / (2 * h)
            worst = max(worst, float(np.linalg.norm(grad - fd) / np.linalg.norm(grad)))
            done += 1
    m = 3.0
    best = optimize_positions(2, m, 2, restarts=10, seed=1)
    axis = np.arange(64) / 64 - 0.5
    offsets = np.stack(np.meshgrid(axis, axis, indexing="ij"), -1).reshape(-1, 2)
    offsets = offsets[np.linalg.norm(offsets, axis=1) > 0]
    # two particles: F0 = (position-free self terms) + m^2 G(offset)
    reference = np.array([0.5, 0.5])
    self_terms = F0_energy(AtomicMeasure([np.zeros(2), reference], [m, m]), 2) \
        - m**2 * float(green_value(reference, 2))
    scan = self_terms + m**2 * float(green_value(offsets, 2).min())
    gap = abs(best.energy - scan)
    ok = worst <= 1e-6 and gap <= 1e-8
    record(7, ok, f"max gradient rel error {worst:.1e}; optimum vs scan {gap:.1e}",
           time.perf_counter() - t0, 120)


@lru_cache(maxsize=1)
def sweep():
    t0 = time.perf_counter()
    report = expansion_check(SweepPlan(2, 1.0, (0.25, 0.2, 0.15), grid_sizes=256))
    return report, time.perf_counter() - t0


def test_criterion_08_expansion():
    report, elapsed = sweep()
    gaps = ", ".join(f"{g:+.3f}" for g in report.limit_gaps)
    ok = report.intercept_rel_error <= 0.05 and report.gaps_shrinking
    record(8, ok, f"intercept {report.fit.intercept:.4f} vs {report.first_order:.4f} "
           f"({100 * report.intercept_rel_error:.1f}%), gaps to the limit {gaps}", elapsed, 1800)


def test_criterion_09_constant_state():
    t0 = time.perf_counter()
    worst = 0.0
    for eta, eps, M in ((0.2, 0.2**5.5, 1.0), (0.3, 1e-3, 2.5), (0.1, 1e-5, 7.0)):
        p = ScalingParams(3, eta, eps, M)
        numeric = energy_rescaled(TorusGrid(3, 16).constant(M), p).total
        formula = eta**4 / eps * M**2 * (1 - eta**3 * M) ** 2
        worst = max(worst, abs(numeric / formula - 1), abs(constant_state_energy(p) / formula - 1))
    report, elapsed = sweep()
    pairs = ", ".join(f"{pt.constant:.3f} vs {pt.energy.total:.3f}" for pt in report.points)
    ok = worst <= 1e-12 and report.constant_exceeds_recovery
    record(9, ok, f"formula rel error {worst:.1e}; constant vs recovery: {pairs}",
           time.perf_counter() - t0 + elapsed, 60)


def dipole_field(grid: TorusGrid, pts: np.ndarray, rng) -> ScalarField:
    """Zero-mean field of k positive and k negative Gaussian bumps of one resolved width."""
    width = rng.uniform(0.02, 0.05)
    values = np.zeros(grid.shape)
    k = int(rng.integers(1, 3))
    for sign in (1.0, -1.0):
        for _ in range(k):
            c = rng.uniform(-0.5, 0.5, 2)
            values += sign * np.exp(-(wrap(pts - c) ** 2).sum(-1) / (2 * width**2))
    return ScalarField(grid, values - values.mean())


def test_criterion_10_empirical_bounds():
    t0 = time.perf_counter()
    grid = TorusGrid(2, 128)
    pts = grid.points().reshape(grid.shape + (2,))
    rng = np.random.default_rng(10)
    ratios = [interp_ratio(dipole_field(grid, pts, rng)) for _ in range(400)]
    first, both = max(ratios[:200]), max(ratios)
    stable = math.isfinite(both) and abs(both / first - 1) <= 0.05
    bound = brezis_merle_bound()
    worst = 0.0
    for _ in range(50):
        src = dipole_field(grid, pts, rng)
        src = src * (1.0 / np.abs(src.values).mean())
        worst = max(worst, brezis_merle_check(poisson_solve(src)))
    ok = stable and worst < bound
    record(10, ok, f"ratio max {first:.5f} -> {both:.5f}; exp|phi| max {worst:.4f} < {bound:.4f}",
           time.perf_counter() - t0, 300)


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                pass
