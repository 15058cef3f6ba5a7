"""Diffuse, sharp and point-particle energies of small-volume-fraction diblock copolymers
on the unit torus."""

from okas.diffuse import EnergyBreakdown, ScalingParams, constant_state_energy, energy_rescaled, minimize
from okas.droplets import DropletConfiguration, rasterize, read_config, write_config
from okas.effective import e0_2d, e0_2d_envelope, e0_conjectured, f_ball, m_star, partition_bruteforce
from okas.green import AtomicMeasure, EwaldEvaluator, green_value, pair_energy, regular_part_at_zero
from okas.grid import ScalarField, TorusGrid, hminus1_sq, read_field, write_field
from okas.harness import SweepPlan, build_recovery, expansion_check, slaving_schedule
from okas.interaction import F0_energy, optimize_positions
from okas.sharp import sharp_energy_asymptotic, sharp_energy_grid
from okas.wells import SIGMA, mollify_indicator, optimal_profile, phi

__all__ = [
    "AtomicMeasure", "DropletConfiguration", "EnergyBreakdown", "EwaldEvaluator", "F0_energy",
    "SIGMA", "ScalarField", "ScalingParams", "SweepPlan", "TorusGrid", "build_recovery",
    "constant_state_energy", "e0_2d", "e0_2d_envelope", "e0_conjectured", "energy_rescaled",
    "expansion_check", "f_ball", "green_value", "hminus1_sq", "m_star", "minimize",
    "mollify_indicator", "optimal_profile", "optimize_positions", "pair_energy",
    "partition_bruteforce", "phi", "rasterize", "read_config", "read_field",
    "regular_part_at_zero", "sharp_energy_asymptotic", "sharp_energy_grid", "slaving_schedule",
    "write_config", "write_field",
]
