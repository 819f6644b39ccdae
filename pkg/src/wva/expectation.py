"""Quadrature of position/momentum expectation values and their shifts.

Position acts in momentum space as i d/dp, so its expectation is the real
part of i * integral(conj(psi) psi') / integral(|psi|^2); the quotient form
makes every result independent of normalization.  Composite Simpson is used
throughout (grids enforce odd point counts).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroNorm
from .evolution import PostSelectedEvolution, apply_postselection
from .probe import MomentumGrid, ProbeWavefunction

_ZERO_NORM_FLOOR = 1e-14


def _norm_squared(values: np.ndarray, grid: MomentumGrid) -> float:
    norm_sq = float(grid.integrate(np.abs(values) ** 2))
    if norm_sq < _ZERO_NORM_FLOOR:
        raise ZeroNorm(f"norm^2 = {norm_sq:.3e} is numerically zero")
    return norm_sq


def expect_q_with_residual(
    values: np.ndarray, derivative: np.ndarray, grid: MomentumGrid
) -> tuple[float, float]:
    """Mean position and the imaginary residual of its quadrature.

    The residual vanishes (up to rounding) whenever |psi|^2 takes equal
    values at the two grid ends; it is surfaced as a diagnostic rather than
    subtracted.
    """
    norm_sq = _norm_squared(values, grid)
    moment = 1j * complex(grid.integrate(np.conj(values) * derivative)) / norm_sq
    return moment.real, moment.imag


def expect_q(values: np.ndarray, derivative: np.ndarray, grid: MomentumGrid) -> float:
    """Mean position of a momentum-space wavefunction (normalization-free).

    Raises
    ------
    ZeroNorm
        If the quadrature norm of ``values`` is numerically zero.
    """
    return expect_q_with_residual(values, derivative, grid)[0]


def expect_p(values: np.ndarray, grid: MomentumGrid) -> float:
    """Mean momentum, integral(p |psi|^2) / integral(|psi|^2)."""
    norm_sq = _norm_squared(values, grid)
    return float(grid.integrate(grid.points * np.abs(values) ** 2)) / norm_sq


@dataclass(frozen=True)
class ShiftReport:
    """Initial/final expectations, their differences, and the post-selection
    success weight for one probe-evolution pair."""

    q_initial: float
    q_final: float
    p_initial: float
    p_final: float
    delta_q: float
    delta_p: float
    weight: float

    def __post_init__(self) -> None:
        entries = (
            self.q_initial,
            self.q_final,
            self.p_initial,
            self.p_final,
            self.delta_q,
            self.delta_p,
            self.weight,
        )
        if not all(math.isfinite(x) for x in entries):
            raise ValueError("shift report entries must be finite")
        if self.delta_q != self.q_final - self.q_initial:
            raise ValueError("delta_q must equal q_final - q_initial exactly")
        if self.delta_p != self.p_final - self.p_initial:
            raise ValueError("delta_p must equal p_final - p_initial exactly")


def shift_report(evo: PostSelectedEvolution, probe: ProbeWavefunction) -> ShiftReport:
    """Initial expectations, post-selected evolution, final expectations.

    Final-state expectations are taken on the unnormalized evolved values;
    the expectation quotients make that legitimate, and the weight stays
    available as the success probability.

    Raises
    ------
    ZeroNorm
        If post-selection annihilated the state.
    """
    grid = probe.grid
    derivative = probe.derivative_or_numeric()
    q_initial = expect_q(probe.values, derivative, grid)
    p_initial = expect_p(probe.values, grid)
    evolved = apply_postselection(evo, probe)
    q_final = expect_q(evolved.values, evolved.derivative, grid)
    p_final = expect_p(evolved.values, grid)
    return ShiftReport(
        q_initial=q_initial,
        q_final=q_final,
        p_initial=p_initial,
        p_final=p_final,
        delta_q=q_final - q_initial,
        delta_p=p_final - p_initial,
        weight=evolved.weight,
    )
