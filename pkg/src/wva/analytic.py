"""Closed-form shift predictions, bounds, and integral identities.

This is the oracle layer: every quadrature or optimizer result elsewhere in
the package is tested against the expressions here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DegenerateDenominator, ZeroRealPart
from .system import Observable, SystemState, compute_weak_value

#: |Re A| below this is treated as a vanishing real part.
ZERO_REAL_EPS = 1e-12


def evolution_factor(coupling: float, weak_value: complex, p):
    """Momentum-space factor cos(g p) - i A sin(g p) applied by post-selection
    when the observable squares to the identity."""
    gp = coupling * np.asarray(p, dtype=float)
    return np.cos(gp) - 1j * weak_value * np.sin(gp)


def evolution_factor_derivative(coupling: float, weak_value: complex, p):
    """Derivative of :func:`evolution_factor` with respect to momentum."""
    gp = coupling * np.asarray(p, dtype=float)
    return coupling * (-np.sin(gp) - 1j * weak_value * np.cos(gp))


def _require_real_part(weak_value: complex) -> complex:
    aw = complex(weak_value)
    if abs(aw.real) < ZERO_REAL_EPS:
        raise ZeroRealPart(f"|Re A| = {abs(aw.real):.3e} is below {ZERO_REAL_EPS:.0e}")
    return aw


@dataclass(frozen=True)
class GaussianShiftPrediction:
    """Exact position/momentum shifts for a Gaussian probe, with the
    back-action denominator that caps its amplification."""

    delta_q: float
    delta_p: float
    denominator: float


def gaussian_exact_shifts(
    coupling: float, width: float, weak_value: complex
) -> GaussianShiftPrediction:
    """Full-order shifts for the Gaussian probe of momentum-space width ``width``.

    delta_q = g Re A / D and delta_p = 2 g W^2 Im A e^{-2 g^2 W^2} / D with
    D = 1 + (1 - |A|^2)(e^{-2 g^2 W^2} - 1) / 2.

    Raises
    ------
    DegenerateDenominator
        If |D| < 1e-12.
    """
    aw = complex(weak_value)
    damping = math.exp(-2.0 * coupling**2 * width**2)
    denominator = 1.0 + 0.5 * (1.0 - abs(aw) ** 2) * (damping - 1.0)
    if abs(denominator) < 1e-12:
        raise DegenerateDenominator(f"denominator = {denominator:.3e}")
    delta_q = coupling * aw.real / denominator
    delta_p = 2.0 * coupling * width**2 * aw.imag * damping / denominator
    return GaussianShiftPrediction(delta_q, delta_p, denominator)


def max_shift(coupling: float, weak_value: complex) -> float:
    """Largest attainable position shift, g (|A|^2 + 1) / (2 Re A).

    Achieved by the hard-support probe of :func:`wva.probe.optimal_probe`;
    grows without bound as |A| does.
    """
    aw = _require_real_part(weak_value)
    return coupling * (abs(aw) ** 2 + 1.0) / (2.0 * aw.real)


def shift_lower_bound(coupling: float, weak_value: complex) -> float:
    """Lower bound g sqrt((Im A)^2 + 1) on |max_shift|; itself never below g.

    The whole chain is tight at A = +/-1, where the measurement reduces to a
    projective one and the probe is displaced by exactly g.
    """
    aw = _require_real_part(weak_value)
    return coupling * math.sqrt(aw.imag**2 + 1.0)


def inverse_square_factor_integral(coupling: float, weak_value: complex) -> float:
    """Closed form of the integral of |factor|^-2 over one support period
    [-pi/2g, pi/2g]: pi / (g |Re A|).

    Its reciprocal is the squared normalization constant of the optimal probe.
    """
    aw = _require_real_part(weak_value)
    return math.pi / (coupling * abs(aw.real))


def inverse_fourth_factor_integral(coupling: float, weak_value: complex) -> float:
    """Closed form of the integral of |factor|^-4 over [-pi/2g, pi/2g]:
    (|A|^2 + 1) / (2 (Re A)^2) times :func:`inverse_square_factor_integral`."""
    aw = _require_real_part(weak_value)
    ratio = (abs(aw) ** 2 + 1.0) / (2.0 * aw.real**2)
    return ratio * inverse_square_factor_integral(coupling, aw)


def orthogonality_limit_check(
    pre: SystemState,
    post_family: Callable[[float], SystemState],
    angles: Iterable[float],
    observable: Observable,
    coupling: float,
) -> list[tuple[float, float]]:
    """Products <q>_f * |overlap| along a post-selection family.

    For each angle the weak value is computed from the selection and <q>_f is
    the optimal-probe final position, i.e. :func:`max_shift` (the optimal
    probe starts centered at zero).  As the post state approaches
    orthogonality the product tends to g/2, which lets the coupling constant
    be recovered by extrapolation.

    Returns
    -------
    list of (|overlap|, <q>_f * |overlap|) pairs, in input order.
    """
    samples = []
    for angle in angles:
        wv = compute_weak_value(pre, post_family(angle), observable)
        q_final = max_shift(coupling, wv.value)
        samples.append((abs(wv.overlap), q_final * abs(wv.overlap)))
    return samples


def extrapolate_orthogonality_limit(
    samples: Sequence[tuple[float, float]], n_smallest: int = 5
) -> float:
    """Linear least-squares extrapolation of the product to zero overlap.

    Fits product = a * |overlap| + b over the ``n_smallest`` samples with the
    smallest |overlap| and returns the intercept b.
    """
    if len(samples) < 2:
        raise ValueError("extrapolation needs at least two samples")
    ordered = sorted(samples, key=lambda s: s[0])[: max(2, n_smallest)]
    overlaps = np.array([s[0] for s in ordered])
    products = np.array([s[1] for s in ordered])
    slope, intercept = np.polyfit(overlaps, products, 1)
    return float(intercept)
