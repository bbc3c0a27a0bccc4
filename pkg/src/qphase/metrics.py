"""Barnett-Pegg phase quantities and antibunching witnesses.

The phase exponential is ``E = (N + 1/2)^(-1/2) a`` with ``N = <a^dag a>``;
cosine and sine are ``C = (E + E^dag)/2`` and ``S = -i(E - E^dag)/2``. The
symmetric fluctuation parameter is ``U = dN^2 T / (1 - T)`` with total phase
noise ``T = dC^2 + dS^2``. For amplitude vectors with real entries ``<a>`` and
``<a^2>`` are real, so ``<S> = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable

from .errors import DimensionError, PhaseUndefined
from .fock import FockState, amplitude_moment, mean_photon, normally_ordered_moment, photon_variance

MEAN_FIELD_THRESHOLD = 1e-12
PATH_AGREEMENT_TOL = 1e-10


@dataclass(frozen=True)
class PhaseReport:
    n_bar: float
    variance: float
    mean_a: float
    cos_mean: float
    sin_mean: float
    var_c: float
    var_s: float
    total_phase_noise: float
    b_factor: float
    u_value: float
    u_reduced: float
    d_u: float
    amplitude_noise: float

    @property
    def path_disagreement(self) -> float:
        return abs(self.u_value - self.u_reduced)


@dataclass(frozen=True)
class WitnessSet:
    antibunch: float
    hoa: Dict[int, float]


def u_from_moments(n2_normord: float, n_mean: float, mean_a: float) -> float:
    """Reduced BP form of U from normally ordered moments.

    ``(<a^dag2 a^2> + N - N^2) (N - <a>^2 + 1/2) / <a>^2``
    """
    a2 = mean_a * mean_a
    if a2 == 0.0:
        raise PhaseUndefined("<a> = 0: phase fluctuation parameter undefined")
    return (n2_normord + n_mean - n_mean ** 2) * (n_mean - a2 + 0.5) / a2


def total_amplitude_noise(state: FockState) -> float:
    """``dX^2 + dP^2`` for quadratures ``X = (a + a^dag)/sqrt2`` and ``P = -i(a - a^dag)/sqrt2``.

    With real ``<a>`` this is ``2<a^dag a> + 1 - 2<a>^2``.
    """
    mean_a = amplitude_moment(state, 1) if state.n_max >= 1 else 0.0
    return 2.0 * mean_photon(state) + 1.0 - 2.0 * mean_a ** 2


def bp_phase_report(state: FockState) -> PhaseReport:
    """All Barnett-Pegg phase quantities for ``state``.

    ``U`` is evaluated from the cosine/sine variances; the reduced moment
    formula is carried alongside as ``u_reduced`` for cross-checking.

    Raises
    ------
    PhaseUndefined
        If ``|<a>| <= 1e-12`` (number-like states).
    """
    n_bar = mean_photon(state)
    mean_a = amplitude_moment(state, 1) if state.n_max >= 1 else 0.0
    if abs(mean_a) <= MEAN_FIELD_THRESHOLD:
        raise PhaseUndefined(f"<a> = {mean_a:.3e} is below {MEAN_FIELD_THRESHOLD:g}")
    mean_a2 = amplitude_moment(state, 2) if state.n_max >= 2 else 0.0
    variance = photon_variance(state)

    scale = n_bar + 0.5
    # real amplitudes: <a^dag> = <a>, <a^dag^2> = <a^2>
    cos_mean = mean_a / scale ** 0.5
    sin_mean = 0.0
    cos2 = (2.0 * mean_a2 + 2.0 * n_bar + 1.0) / (4.0 * scale)
    sin2 = (-2.0 * mean_a2 + 2.0 * n_bar + 1.0) / (4.0 * scale)
    var_c = cos2 - cos_mean ** 2
    var_s = sin2 - sin_mean ** 2
    total = var_c + var_s
    b_factor = total / (1.0 - total)
    u_value = variance * b_factor
    n2 = normally_ordered_moment(state, 2, 2) if state.n_max >= 2 else 0.0
    u_reduced = u_from_moments(n2, n_bar, mean_a)

    return PhaseReport(
        n_bar=n_bar,
        variance=variance,
        mean_a=mean_a,
        cos_mean=cos_mean,
        sin_mean=sin_mean,
        var_c=var_c,
        var_s=var_s,
        total_phase_noise=total,
        b_factor=b_factor,
        u_value=u_value,
        u_reduced=u_reduced,
        d_u=u_value - 0.5,
        amplitude_noise=2.0 * n_bar + 1.0 - 2.0 * mean_a ** 2,
    )


def u_parameter(state: FockState) -> float:
    return bp_phase_report(state).u_value


def d_u(state: FockState) -> float:
    """``U - 1/2``; negative values mark reduced phase fluctuation."""
    return bp_phase_report(state).d_u


def antibunching_witness(state: FockState) -> float:
    """``dN^2 - <N>``; negative for sub-Poissonian (antibunched) light."""
    return photon_variance(state) - mean_photon(state)


def hoa_witness(state: FockState, order: int) -> float:
    """``<a^dag^l a^l> - <a^dag a>^l``; negative marks antibunching of order ``l - 1``."""
    if order < 2:
        raise DimensionError("higher-order antibunching needs l >= 2")
    if order > state.n_max:
        raise DimensionError(f"order {order} exceeds n_max={state.n_max}")
    return normally_ordered_moment(state, order, order) - mean_photon(state) ** order


def witnesses(state: FockState, orders: Iterable[int] = (2, 3)) -> WitnessSet:
    """Antibunching witness plus every HOA order that fits in the retained basis."""
    hoa = {l: hoa_witness(state, l) for l in orders if l <= state.n_max}
    return WitnessSet(antibunching_witness(state), hoa)
