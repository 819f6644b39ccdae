"""Post-selected impulsive von Neumann evolution of momentum-space probes.

Because the observable squares to the identity, post-selection acts on the
momentum wavefunction as multiplication by overlap * (cos gp - i A sin gp).
States come back unnormalized together with their squared norm: that weight
is the post-selection success probability and carrying it explicitly keeps
the measurement back-action testable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import evolution_factor, evolution_factor_derivative
from .probe import MomentumGrid, ProbeWavefunction
from .system import WeakValue


@dataclass(frozen=True, eq=False)
class PostSelectedEvolution:
    """Impulsive coupling of strength ``coupling`` followed by the selection
    summarized in ``weak``."""

    coupling: float
    weak: WeakValue

    def __post_init__(self) -> None:
        if not (math.isfinite(self.coupling) and self.coupling > 0):
            raise ValueError("coupling must be positive and finite")

    def factor(self, p):
        """Multiplicative momentum-space factor cos(gp) - i A sin(gp)."""
        return evolution_factor(self.coupling, self.weak.value, p)

    def factor_derivative(self, p):
        """Momentum derivative of :meth:`factor`."""
        return evolution_factor_derivative(self.coupling, self.weak.value, p)

    def density_factor_derivative(self, p):
        """d/dp of |factor|^2 via the closed form 2ig Re A + 2 conj(B) B';
        the imaginary parts cancel identically, leaving the real derivative."""
        b = self.factor(p)
        bd = self.factor_derivative(p)
        z = 2j * self.coupling * complex(self.weak.value).real + 2.0 * np.conj(b) * bd
        return z.real


@dataclass(frozen=True, eq=False)
class EvolvedProbe:
    """Unnormalized post-selected probe plus its squared norm (the
    post-selection success weight)."""

    grid: MomentumGrid
    values: np.ndarray
    derivative: np.ndarray
    weight: float


def apply_postselection(evo: PostSelectedEvolution, probe: ProbeWavefunction) -> EvolvedProbe:
    """Exact post-selected evolution, valid at any coupling strength.

    The output values are overlap * factor(p) * probe values, pointwise; the
    derivative follows by the product rule with the analytic factor
    derivative.  ``weight`` is the quadrature of |output|^2.
    """
    p = probe.grid.points
    b = evo.factor(p)
    bd = evo.factor_derivative(p)
    overlap = evo.weak.overlap
    values = overlap * b * probe.values
    derivative = overlap * (bd * probe.values + b * probe.derivative_or_numeric())
    weight = float(probe.grid.integrate(np.abs(values) ** 2))
    return EvolvedProbe(probe.grid, values, derivative, weight)


def apply_weak_order(evo: PostSelectedEvolution, probe: ProbeWavefunction) -> EvolvedProbe:
    """First-order weak-coupling evolution: multiplication by
    overlap * exp(-i g A p).

    A complex weak value makes this non-unitary (the density is reweighted by
    exp(2 g Im A p)).  Whether g |A| is small enough for the approximation is
    the caller's judgment; the exact route is :func:`apply_postselection`.
    """
    p = probe.grid.points
    aw = complex(evo.weak.value)
    phase = np.exp(-1j * evo.coupling * aw * p)
    overlap = evo.weak.overlap
    values = overlap * phase * probe.values
    derivative = overlap * (
        -1j * evo.coupling * aw * phase * probe.values + phase * probe.derivative_or_numeric()
    )
    weight = float(probe.grid.integrate(np.abs(values) ** 2))
    return EvolvedProbe(probe.grid, values, derivative, weight)
