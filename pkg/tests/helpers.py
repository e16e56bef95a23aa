"""Shared builders for the test suite: feasible random ground truths and
random QP instances with a strictly feasible interior point."""

from __future__ import annotations

import numpy as np

from impedfit.impedance import (
    EquilibriumSchedule,
    ImpedanceParameters,
    ImpedanceProfile,
)


def positive_profile(rng, order: int, lo: float, hi: float,
                     stance_end: float = 0.63,
                     floor: float = 0.05) -> ImpedanceProfile:
    """Random stance polynomial of the given order, lifted so it stays
    above `floor` on a dense grid (positivity by construction)."""
    knots = np.linspace(0.0, stance_end, order + 1)
    controls = rng.uniform(lo, hi, size=order + 1)
    coeffs = np.linalg.solve(np.vander(knots, increasing=True), controls)
    t = np.linspace(0.0, stance_end, 2001)
    values = np.polynomial.polynomial.polyval(t, coeffs)
    short = floor - float(values.min())
    if short > 0.0:
        coeffs[0] += short
    return ImpedanceProfile(coeffs=coeffs, stance_end=stance_end)


def random_params(rng, order: int, boundaries,
                  label: str | None = None) -> ImpedanceParameters:
    """Feasible random controller: positive profiles, angles in (-0.4, 0.4)."""
    n_sections = len(boundaries) - 1
    return ImpedanceParameters(
        stiffness=positive_profile(rng, order, 5.0, 130.0),
        damping=positive_profile(rng, order, 0.05, 2.0, floor=0.02),
        schedule=EquilibriumSchedule(
            boundaries=np.asarray(boundaries, dtype=np.float64),
            angles=rng.uniform(-0.4, 0.4, size=n_sections),
            label=label),
    )


def quartic_truth(boundaries=(0.0, 0.4, 0.63, 1.0),
                  angles=(-0.4, -0.3, 0.0),
                  label: str | None = None) -> ImpedanceParameters:
    """Fixed feasible quartic controller used for exact round-trip tests."""
    knots = np.linspace(0.0, 0.63, 5)
    V = np.vander(knots, increasing=True)
    k_coeffs = np.linalg.solve(V, np.array([4.0, 60.0, 140.0, 125.0, 12.0]))
    d_coeffs = np.linalg.solve(V, np.array([0.2, 2.2, 1.0, 0.4, 0.1]))
    grid = np.linspace(0.0, 0.63, 2001)
    assert np.polynomial.polynomial.polyval(grid, k_coeffs).min() > 0
    assert np.polynomial.polynomial.polyval(grid, d_coeffs).min() > 0
    return ImpedanceParameters(
        stiffness=ImpedanceProfile(coeffs=k_coeffs, stance_end=0.63),
        damping=ImpedanceProfile(coeffs=d_coeffs, stance_end=0.63),
        schedule=EquilibriumSchedule(
            boundaries=np.asarray(boundaries, dtype=np.float64),
            angles=np.asarray(angles, dtype=np.float64), label=label),
    )


def random_qp_instance(rng):
    """Random PSD instance (dim <= 12, <= 20 rows) with nonempty interior."""
    dim = int(rng.integers(2, 13))
    m = int(rng.integers(1, 21))
    M = rng.normal(size=(dim, dim))
    H = M @ M.T + 1e-3 * dim * np.eye(dim)
    g = rng.normal(size=dim)
    A = rng.normal(size=(m, dim))
    # b chosen so a known point is strictly feasible
    x_feas = rng.normal(size=dim)
    b = A @ x_feas + rng.uniform(0.1, 1.0, size=m)
    return H, g, A, b


def qp_objective(H, g, x) -> float:
    return float(0.5 * x @ H @ x + g @ x)
