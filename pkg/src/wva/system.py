"""Pre/post-selected finite-dimensional systems and their weak values.

The shipped constructors are two-level, but states and observables carry an
arbitrary dimension d >= 2.  Observables are validated to be Hermitian and
involutory (M @ M == identity), which is what makes the momentum-space
evolution factor of :mod:`wva.evolution` exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, OrthogonalSelection

#: Largest |<post|pre>| treated as orthogonal selection (configurable per call).
ORTHOGONALITY_EPS = 1e-12

_MATRIX_TOL = 1e-12


def _finite(arr: np.ndarray) -> bool:
    return bool(np.all(np.isfinite(arr.real)) and np.all(np.isfinite(arr.imag)))


@dataclass(frozen=True, eq=False)
class SystemState:
    """State vector of the system, normalized at construction.

    Parameters
    ----------
    amplitudes : array_like of complex
        Basis amplitudes; any nonzero finite vector of dimension >= 2.
        The stored vector is rescaled to unit norm (global scale and phase
        never enter a weak value).
    """

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.amplitudes, dtype=np.complex128)
        if arr.ndim != 1 or arr.size < 2:
            raise ValueError("a state needs a 1-d amplitude vector of dimension >= 2")
        if not _finite(arr):
            raise ValueError("state amplitudes must be finite")
        norm = math.sqrt(np.vdot(arr, arr).real)
        if norm < 1e-12:
            raise ValueError("cannot normalize a zero state vector")
        arr = arr / norm
        arr.flags.writeable = False
        object.__setattr__(self, "amplitudes", arr)

    @property
    def dimension(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True, eq=False)
class Observable:
    """Hermitian involutory observable (its square is the identity)."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise ValueError("observable must be a square matrix of dimension >= 2")
        if not _finite(m):
            raise ValueError("observable entries must be finite")
        if np.max(np.abs(m - m.conj().T)) > _MATRIX_TOL:
            raise ValueError("observable must be Hermitian")
        eye = np.eye(m.shape[0])
        if np.max(np.abs(m @ m - eye)) > _MATRIX_TOL:
            raise ValueError("observable must square to the identity")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class WeakValue:
    """Weak value together with the selection overlap that produced it.

    ``value`` is <post|M|pre> / <post|pre> and can be any complex number;
    ``overlap`` is <post|pre> and ``success_probability`` its squared modulus,
    i.e. the probability cost of the post-selection.
    """

    value: complex
    overlap: complex
    success_probability: float

    def __post_init__(self) -> None:
        if self.overlap == 0:
            raise ValueError("weak value requires a nonzero selection overlap")
        for x in (self.value, self.overlap):
            if not (math.isfinite(x.real) and math.isfinite(x.imag)):
                raise ValueError("weak value fields must be finite")
        if not 0.0 <= self.success_probability <= 1.0 + 1e-12:
            raise ValueError("success probability must lie in [0, 1]")

    @classmethod
    def from_value(cls, value: complex) -> "WeakValue":
        """Wrap a bare weak value, folding the selection into a unit overlap."""
        return cls(complex(value), 1.0 + 0.0j, 1.0)


def compute_weak_value(
    pre: SystemState,
    post: SystemState,
    observable: Observable,
    epsilon: float = ORTHOGONALITY_EPS,
) -> WeakValue:
    """Weak value of ``observable`` for the given pre-/post-selection.

    Raises
    ------
    DimensionMismatch
        If the states and the observable do not share one dimension.
    OrthogonalSelection
        If |<post|pre>| < ``epsilon``; the weak value is undefined there.
    """
    d = observable.dimension
    if pre.dimension != d or post.dimension != d:
        raise DimensionMismatch(
            f"dimensions differ: pre={pre.dimension}, post={post.dimension}, obs={d}"
        )
    overlap = complex(np.vdot(post.amplitudes, pre.amplitudes))
    if abs(overlap) < epsilon:
        raise OrthogonalSelection(
            f"|<post|pre>| = {abs(overlap):.3e} below epsilon = {epsilon:.3e}"
        )
    numerator = complex(np.vdot(post.amplitudes, observable.matrix @ pre.amplitudes))
    return WeakValue(numerator / overlap, overlap, abs(overlap) ** 2)


def mach_zehnder_setup(
    path_angle: float, polarizer_angle: float
) -> tuple[SystemState, SystemState, Observable]:
    """Interferometer selection: polarizing splitter in, polarizer out.

    A polarization state cos(chi)|H> + sin(chi)|V> enters a polarizing beam
    splitter that routes H into one arm and V into the other, so the reachable
    product states span the two-dimensional subspace {|H, arm-1>, |V, arm-2>}.
    The recombining balanced splitter followed by a polarizer at angle phi in
    the detected port acts, pulled back onto that subspace, along the
    direction (-cos(phi), sin(phi)); the splitter's 1/sqrt(2) port factor
    drops out on normalization.  The returned observable is twice the
    projector onto the second arm minus the identity, which squares to one.

    Returns
    -------
    (pre, post, observable)
        Ready for :func:`compute_weak_value`.
    """
    pre = SystemState(np.array([math.cos(path_angle), math.sin(path_angle)]))
    post = SystemState(np.array([-math.cos(polarizer_angle), math.sin(polarizer_angle)]))
    observable = Observable(np.diag([-1.0, 1.0]))
    return pre, post, observable


def mach_zehnder_weak_value(
    path_angle: float, polarizer_angle: float, epsilon: float = ORTHOGONALITY_EPS
) -> WeakValue:
    """Closed-form weak value of the second-arm projector for the setup above.

    Equals -sin(chi) sin(phi) / cos(chi + phi) and agrees with the
    matrix-element route through :func:`mach_zehnder_setup` via the affine map
    2 * value - 1 (the setup ships the involutory observable, not the
    projector).

    Raises
    ------
    OrthogonalSelection
        When |cos(chi + phi)| < ``epsilon``.
    """
    overlap = -math.cos(path_angle + polarizer_angle)
    if abs(overlap) < epsilon:
        raise OrthogonalSelection(
            f"|cos(chi + phi)| = {abs(overlap):.3e} below epsilon = {epsilon:.3e}"
        )
    numerator = math.sin(path_angle) * math.sin(polarizer_angle)
    return WeakValue(complex(numerator / overlap), complex(overlap), overlap**2)
