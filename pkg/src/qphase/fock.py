"""Pure states as real amplitude vectors in the photon-number basis.

Moments are evaluated by direct summation over the retained amplitudes, which
makes this module the ground truth against which every closed-form expression
in :mod:`qphase.closed_forms` is checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import DimensionError, InvalidAmplitude, NormalizationError

NORM_TOL = 1e-9

# Above this order the falling product is replaced by log-gamma differences.
_DIRECT_PRODUCT_MAX_ORDER = 16


@dataclass(frozen=True)
class FockState:
    """Truncated pure state ``sum_n c_n |n>`` with real amplitudes.

    Attributes
    ----------
    amplitudes : numpy.ndarray
        Read-only vector ``c_0 .. c_{n_max}``.
    residual_mass : float
        Probability weight discarded by truncation (0 for finite states).
    """

    amplitudes: np.ndarray
    residual_mass: float = 0.0

    @property
    def n_max(self) -> int:
        return len(self.amplitudes) - 1

    @property
    def probabilities(self) -> np.ndarray:
        return self.amplitudes ** 2

    def norm_defect(self) -> float:
        """``sum c_n^2 + residual - 1``; zero for a perfectly normalized state."""
        return float(np.sum(self.probabilities) + self.residual_mass - 1.0)


def make_state(
    amplitudes: Sequence[float] | np.ndarray,
    residual_mass: float = 0.0,
    epsilon: Optional[float] = None,
) -> FockState:
    """Validate amplitudes and wrap them in an immutable :class:`FockState`.

    Parameters
    ----------
    amplitudes : sequence of float
        Amplitudes ``c_0 .. c_{n_max}``.
    residual_mass : float
        Truncated probability weight.
    epsilon : float, optional
        If given, ``residual_mass`` must not exceed it.

    Raises
    ------
    InvalidAmplitude
        On empty input or non-finite entries.
    NormalizationError
        If ``|sum c_n^2 + residual - 1| > 1e-9`` or the residual is out of range.
    """
    amps = np.array(amplitudes, dtype=float).ravel()
    if amps.size == 0:
        raise InvalidAmplitude("amplitude vector is empty")
    if not np.all(np.isfinite(amps)):
        raise InvalidAmplitude("amplitudes must be finite real numbers")
    residual_mass = float(residual_mass)
    if not np.isfinite(residual_mass) or residual_mass < 0.0 or residual_mass > 1.0:
        raise NormalizationError(f"residual mass {residual_mass!r} not in [0, 1]")
    if epsilon is not None and residual_mass > epsilon:
        raise NormalizationError(
            f"residual mass {residual_mass:.3e} exceeds tolerance {epsilon:.3e}"
        )
    defect = float(np.sum(amps ** 2)) + residual_mass - 1.0
    if abs(defect) > NORM_TOL:
        raise NormalizationError(
            f"sum of squared amplitudes plus residual differs from 1 by {defect:.3e}"
        )
    amps.flags.writeable = False
    return FockState(amps, residual_mass)


def fock_number_state(n: int) -> FockState:
    """Number state ``|n>``."""
    if n < 0:
        raise DimensionError("photon number must be nonnegative")
    amps = np.zeros(n + 1)
    amps[n] = 1.0
    return make_state(amps)


def _falling_pair(n: np.ndarray, j: int, k: int) -> np.ndarray:
    """``sqrt((n+j)!/n! * (n+k)!/n!)`` elementwise for integer-valued array ``n``."""
    if max(j, k) <= _DIRECT_PRODUCT_MAX_ORDER:
        # exact integer products below 2**53; one sqrt keeps j == k exact
        prod = np.ones(n.shape)
        for i in range(1, j + 1):
            prod = prod * (n + i)
        for i in range(1, k + 1):
            prod = prod * (n + i)
        return np.sqrt(prod)
    lg = gammaln(n + 1.0)
    return np.exp(0.5 * (gammaln(n + j + 1.0) - lg) + 0.5 * (gammaln(n + k + 1.0) - lg))


def normally_ordered_moment(state: FockState, j: int, k: int) -> float:
    """Expectation value ``<a^dag^j a^k>`` by direct summation.

    ``sum_n c_{n+j} c_{n+k} sqrt((n+j)!/n!) sqrt((n+k)!/n!)``
    """
    if j < 0 or k < 0:
        raise DimensionError("moment orders must be nonnegative")
    if j > state.n_max or k > state.n_max:
        raise DimensionError(
            f"order ({j}, {k}) exceeds retained dimension n_max={state.n_max}"
        )
    c = state.amplitudes
    length = len(c) - max(j, k)
    n = np.arange(length, dtype=float)
    terms = c[j:j + length] * c[k:k + length] * _falling_pair(n, j, k)
    return math.fsum(terms)


def mean_photon(state: FockState) -> float:
    """``<a^dag a>``."""
    if state.n_max == 0:
        return 0.0
    return normally_ordered_moment(state, 1, 1)


def _factorial_moment(state: FockState, order: int) -> float:
    if order > state.n_max:
        # every retained term vanishes
        return 0.0
    return normally_ordered_moment(state, order, order)


def photon_variance(state: FockState) -> float:
    """``<a^dag^2 a^2> + <a^dag a> - <a^dag a>^2``."""
    n_mean = mean_photon(state)
    return _factorial_moment(state, 2) + n_mean - n_mean ** 2


def amplitude_moment(state: FockState, k: int) -> float:
    """``<a^k>`` for ``k`` in ``{1, 2}``."""
    if k not in (1, 2):
        raise DimensionError("amplitude_moment supports k = 1 or 2 only")
    if k > state.n_max:
        return 0.0
    return normally_ordered_moment(state, 0, k)


def moment_error_bound(state: FockState, j: int, k: int) -> float:
    """Heuristic bound on the truncation error of ``<a^dag^j a^k>``.

    The discarded mass is weighted by the operator's matrix-element scale at
    the truncation edge. Returns 0 for intrinsically finite states.
    """
    if state.residual_mass == 0.0:
        return 0.0
    edge = state.n_max + 1 + max(j, k)
    return state.residual_mass * float(edge) ** (0.5 * (j + k)) * 10.0


@dataclass(frozen=True)
class MomentSet:
    """Normally ordered moments used by the phase metrics.

    ``mean_a2`` may be NaN when a source (such as a printed closed form) does
    not provide it.
    """

    mean_a: float
    mean_a2: float
    n_mean: float
    n2_normord: float
    higher: Dict[int, float] = field(default_factory=dict)

    @property
    def variance(self) -> float:
        return self.n2_normord + self.n_mean - self.n_mean ** 2


def moments(state: FockState, orders: Iterable[int] = ()) -> MomentSet:
    """Collect the standard moments plus ``<a^dag^l a^l>`` for each ``l`` in ``orders``."""
    higher = {int(l): _factorial_moment(state, int(l)) for l in orders}
    return MomentSet(
        mean_a=amplitude_moment(state, 1) if state.n_max >= 1 else 0.0,
        mean_a2=amplitude_moment(state, 2) if state.n_max >= 2 else 0.0,
        n_mean=mean_photon(state),
        n2_normord=_factorial_moment(state, 2),
        higher=higher,
    )
