"""Intermediate photon states built from log-space combinatorial weights.

Finite families (binomial, generalized binomial, hypergeometric) have exact
support ``0..M``; their weights sum to one analytically, so the small rounding
defect left by ``gammaln`` is divided out after validation. Infinite families
(negative binomial, photon-added coherent, coherent) are cut at the smallest
``n_max`` whose discarded tail is below ``epsilon``; the tail is recorded, not
renormalized away.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Mapping, Tuple

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, ParamError, TruncationError
from .fock import FockState, fock_number_state, make_state

DEFAULT_EPSILON = 1e-12
DEFAULT_NMAX_CAP = 10 ** 6
FINITE_SUM_TOL = 1e-9

_BLOCK = 512


class Family(str, Enum):
    BINOMIAL = "binomial"
    GENERALIZED_BINOMIAL = "generalized_binomial"
    NEGATIVE_BINOMIAL = "negative_binomial"
    HYPERGEOMETRIC = "hypergeometric"
    PHOTON_ADDED_COHERENT = "pacs"
    COHERENT = "coherent"


# Parameter names per family, in CSV column order.
FAMILY_PARAMS: Dict[Family, Tuple[str, ...]] = {
    Family.BINOMIAL: ("p", "M"),
    Family.GENERALIZED_BINOMIAL: ("alpha", "beta", "N"),
    Family.NEGATIVE_BINOMIAL: ("p", "M"),
    Family.HYPERGEOMETRIC: ("L", "M", "p"),
    Family.PHOTON_ADDED_COHERENT: ("alpha", "m"),
    Family.COHERENT: ("alpha",),
}

INTEGER_PARAMS = {"M", "N", "m"}


@dataclass(frozen=True)
class TruncationReport:
    n_max: int
    residual_mass: float
    tail_bound_used: str


# ---------------------------------------------------------------------------
# validation helpers


def _as_int(name: str, value: Any, minimum: int) -> int:
    if isinstance(value, bool):
        raise ParamError(f"{name} must be an integer, got {value!r}")
    if isinstance(value, numbers.Integral):
        ivalue = int(value)
    elif isinstance(value, numbers.Real) and float(value).is_integer():
        ivalue = int(value)
    else:
        raise ParamError(f"{name} must be an integer, got {value!r}")
    if ivalue < minimum:
        raise ParamError(f"{name} must be >= {minimum}, got {ivalue}")
    return ivalue


def _as_real(name: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ParamError(f"{name} must be a real number, got {value!r}")
    fvalue = float(value)
    if not math.isfinite(fvalue):
        raise ParamError(f"{name} must be finite, got {value!r}")
    return fvalue


def _open_unit(name: str, value: Any) -> float:
    fvalue = _as_real(name, value)
    if not 0.0 < fvalue < 1.0:
        raise ParamError(f"{name} must lie strictly inside (0, 1), got {fvalue}")
    return fvalue


def _check_epsilon(epsilon: float) -> float:
    epsilon = _as_real("epsilon", epsilon)
    if not 0.0 < epsilon < 1.0:
        raise ParamError(f"epsilon must lie in (0, 1), got {epsilon}")
    return epsilon


def _ln_binom(x, k):
    """Log of the generalized binomial coefficient ``Gamma(x+1)/(Gamma(k+1)Gamma(x-k+1))``."""
    return gammaln(np.add(x, 1.0)) - gammaln(np.add(k, 1.0)) - gammaln(np.subtract(x, k) + 1.0)


def _ln_poch(x, r):
    """Log of the rising factorial ``(x)_r`` for ``x > 0``."""
    return gammaln(np.add(x, r)) - gammaln(x)


def _finite_state(log_weights: np.ndarray, what: str) -> FockState:
    weights = np.exp(log_weights)
    total = float(np.sum(weights))
    if not np.all(np.isfinite(weights)) or abs(total - 1.0) > FINITE_SUM_TOL:
        raise DomainError(f"{what} weights sum to {total!r}, not 1")
    return make_state(np.sqrt(weights / total))


# ---------------------------------------------------------------------------
# finite families


def binomial_state(p: float, M: int) -> FockState:
    """Binomial state with weights ``C(M,n) p^n (1-p)^(M-n)``.

    Parameters
    ----------
    p : float
        Success probability, strictly inside (0, 1).
    M : int
        Maximum photon number, at least 1.
    """
    p = _open_unit("p", p)
    M = _as_int("M", M, 1)
    n = np.arange(M + 1, dtype=float)
    lw = _ln_binom(M, n) + n * math.log(p) + (M - n) * math.log1p(-p)
    return _finite_state(lw, "binomial")


def generalized_binomial_state(alpha: float, beta: float, N: int) -> FockState:
    """Roy-Roy generalized binomial state (beta-binomial photon statistics).

    ``w_n = N!/(alpha+beta+2)_N * (alpha+1)_n (beta+1)_{N-n} / (n! (N-n)!)``
    """
    alpha = _as_real("alpha", alpha)
    beta = _as_real("beta", beta)
    if alpha <= -1.0 or beta <= -1.0:
        raise ParamError("alpha and beta must both exceed -1")
    N = _as_int("N", N, 1)
    n = np.arange(N + 1, dtype=float)
    lw = (
        gammaln(N + 1.0)
        - _ln_poch(alpha + beta + 2.0, N)
        + _ln_poch(alpha + 1.0, n)
        + _ln_poch(beta + 1.0, N - n)
        - gammaln(n + 1.0)
        - gammaln(N - n + 1.0)
    )
    return _finite_state(lw, "generalized binomial")


def hypergeometric_state(L: float, M: int, p: float) -> FockState:
    """Hypergeometric state ``H_n = [C(Lp,n) C(L(1-p),M-n) / C(L,M)]^(1/2)``.

    Non-integer binomial coefficients are defined through the gamma function.
    Only the region ``Lp >= M`` and ``L(1-p) >= M`` is accepted, where every
    coefficient is positive.
    """
    L = _as_real("L", L)
    if L <= 0.0:
        raise ParamError(f"L must be positive, got {L}")
    M = _as_int("M", M, 1)
    p = _open_unit("p", p)
    lp, lq = L * p, L * (1.0 - p)
    if lp < M or lq < M:
        raise ParamError(
            f"hypergeometric state needs L*p >= M and L*(1-p) >= M "
            f"(got L*p={lp:g}, L*(1-p)={lq:g}, M={M})"
        )
    n = np.arange(M + 1, dtype=float)
    lw = _ln_binom(lp, n) + _ln_binom(lq, M - n) - _ln_binom(L, M)
    return _finite_state(lw, "hypergeometric")


# ---------------------------------------------------------------------------
# infinite families


def _truncated_expansion(
    log_weight: Callable[[np.ndarray], np.ndarray],
    log_ratio: Callable[[float], float],
    start: int,
    epsilon: float,
    nmax_cap: int,
) -> Tuple[FockState, TruncationReport]:
    """Cut an infinite expansion supported on ``n >= start``.

    ``log_ratio(n)`` is ``log(w_{n+1}/w_n)``; it must be nonincreasing in
    ``n``. Once the ratio ``r`` drops below one the remaining tail is at most
    ``w_n r / (1 - r)``. Terms are generated until that bound is negligible,
    then exact suffix sums pick the smallest ``n_max`` with tail < epsilon.
    """
    chunks = []
    hi = start
    while True:
        n = np.arange(hi, hi + _BLOCK, dtype=float)
        chunks.append(log_weight(n))
        last = hi + _BLOCK - 1
        lr = log_ratio(last)
        if lr < 0.0:
            r = math.exp(lr)
            bound = math.exp(chunks[-1][-1]) * r / (1.0 - r)
            if bound < epsilon * 1e-6:
                break
        hi += _BLOCK
        if hi - start > nmax_cap + _BLOCK:
            raise TruncationError(
                f"expansion needs more than nmax_cap={nmax_cap} terms for epsilon={epsilon:g}"
            )
    weights = np.exp(np.concatenate(chunks))
    # tail[i] = mass beyond index i (exact suffix sum plus geometric remainder)
    suffix = np.cumsum(weights[::-1])[::-1]
    tail = np.append(suffix[1:], 0.0) + bound
    idx = int(np.argmax(tail < epsilon))
    n_max = start + idx
    if n_max > nmax_cap:
        raise TruncationError(f"n_max={n_max} exceeds nmax_cap={nmax_cap}")
    amps = np.zeros(n_max + 1)
    amps[start:] = np.sqrt(weights[: idx + 1])
    residual = float(tail[idx])
    state = make_state(amps, residual, epsilon=epsilon)
    report = TruncationReport(
        n_max=n_max,
        residual_mass=residual,
        tail_bound_used="exact suffix sum + geometric ratio bound w_n r/(1-r)",
    )
    return state, report


def _finite_report(state: FockState) -> TruncationReport:
    return TruncationReport(state.n_max, 0.0, "finite support")


def negative_binomial_state(
    p: float, M: int, epsilon: float = DEFAULT_EPSILON, nmax_cap: int = DEFAULT_NMAX_CAP
) -> Tuple[FockState, TruncationReport]:
    """Negative binomial state, weights ``C(n,M) p^(M+1) (1-p)^(n-M)`` for ``n >= M``."""
    p = _open_unit("p", p)
    M = _as_int("M", M, 0)
    epsilon = _check_epsilon(epsilon)
    lp, lq = math.log(p), math.log1p(-p)

    def log_weight(n):
        return _ln_binom(n, M) + (M + 1) * lp + (n - M) * lq

    def log_ratio(n):
        return math.log(n + 1.0) - math.log(n + 1.0 - M) + lq

    return _truncated_expansion(log_weight, log_ratio, M, epsilon, nmax_cap)


def laguerre_neg(m: int, x: float) -> float:
    """``L_m(-x)`` for ``x >= 0`` by the three-term recurrence.

    ``(k+1) L_{k+1} = (2k+1+x) L_k - k L_{k-1}``; every iterate is positive.
    """
    if m < 0:
        raise ParamError("Laguerre order must be nonnegative")
    prev, cur = 1.0, 1.0 + x
    if m == 0:
        return prev
    for k in range(1, m):
        prev, cur = cur, ((2 * k + 1 + x) * cur - k * prev) / (k + 1)
    return cur


def photon_added_coherent_state(
    alpha: float, m: int, epsilon: float = DEFAULT_EPSILON, nmax_cap: int = DEFAULT_NMAX_CAP
) -> Tuple[FockState, TruncationReport]:
    """``a^dag^m |alpha>`` normalized by ``[L_m(-alpha^2) m!]^(1/2)``.

    The amplitude on ``|n+m>`` is
    ``exp(-alpha^2/2) alpha^n sqrt((n+m)!) / (n! sqrt(L_m(-alpha^2) m!))``.
    """
    alpha = _as_real("alpha", alpha)
    if alpha < 0.0:
        raise ParamError(f"alpha must be nonnegative, got {alpha}")
    m = _as_int("m", m, 0)
    epsilon = _check_epsilon(epsilon)
    if alpha == 0.0:
        state = fock_number_state(m)
        return state, _finite_report(state)
    a2 = alpha * alpha
    ln_alpha = math.log(alpha)
    ln_norm = -a2 - math.log(laguerre_neg(m, a2)) - math.lgamma(m + 1.0)

    def log_weight(k):
        n = k - m
        return ln_norm + 2.0 * n * ln_alpha + gammaln(k + 1.0) - 2.0 * gammaln(n + 1.0)

    def log_ratio(k):
        n = k - m
        return math.log(a2) + math.log(k + 1.0) - 2.0 * math.log(n + 1.0)

    return _truncated_expansion(log_weight, log_ratio, m, epsilon, nmax_cap)


def coherent_state(
    alpha: float, epsilon: float = DEFAULT_EPSILON, nmax_cap: int = DEFAULT_NMAX_CAP
) -> Tuple[FockState, TruncationReport]:
    """Real coherent state with Poisson amplitudes ``exp(-alpha^2/2) alpha^n / sqrt(n!)``."""
    alpha = _as_real("alpha", alpha)
    if alpha < 0.0:
        raise ParamError(f"alpha must be nonnegative, got {alpha}")
    epsilon = _check_epsilon(epsilon)
    if alpha == 0.0:
        state = fock_number_state(0)
        return state, _finite_report(state)
    a2 = alpha * alpha
    ln_a2 = math.log(a2)

    def log_weight(n):
        return -a2 + n * ln_a2 - gammaln(n + 1.0)

    def log_ratio(n):
        return ln_a2 - math.log(n + 1.0)

    return _truncated_expansion(log_weight, log_ratio, 0, epsilon, nmax_cap)


# ---------------------------------------------------------------------------
# tagged parameter records


def _check_ranges(family: Family, p: Mapping[str, float]) -> None:
    if family in (Family.BINOMIAL, Family.NEGATIVE_BINOMIAL, Family.HYPERGEOMETRIC):
        _open_unit("p", p["p"])
    if family in (Family.BINOMIAL, Family.HYPERGEOMETRIC):
        _as_int("M", p["M"], 1)
    if family is Family.GENERALIZED_BINOMIAL:
        if p["alpha"] <= -1.0 or p["beta"] <= -1.0:
            raise ParamError("alpha and beta must both exceed -1")
        _as_int("N", p["N"], 1)
    if family is Family.HYPERGEOMETRIC:
        L, M, q = p["L"], p["M"], p["p"]
        if L <= 0.0 or L * q < M or L * (1.0 - q) < M:
            raise ParamError("hypergeometric state needs L > 0, L*p >= M and L*(1-p) >= M")
    if family in (Family.PHOTON_ADDED_COHERENT, Family.COHERENT) and p["alpha"] < 0.0:
        raise ParamError("alpha must be nonnegative")


@dataclass(frozen=True)
class StateSpec:
    """One state family plus its parameters.

    Parameter names, types and ranges are checked on construction; integer
    parameters are coerced to ``int``. :meth:`build` constructs the state.
    """

    family: Family
    params: Mapping[str, float] = field(default_factory=dict)
    epsilon: float = DEFAULT_EPSILON
    nmax_cap: int = DEFAULT_NMAX_CAP

    def __post_init__(self):
        family = Family(self.family)
        object.__setattr__(self, "family", family)
        expected = FAMILY_PARAMS[family]
        missing = [k for k in expected if k not in self.params]
        extra = [k for k in self.params if k not in expected]
        if missing or extra:
            raise ParamError(
                f"{family.value} takes parameters {expected}; "
                f"missing={missing} unexpected={extra}"
            )
        clean = {}
        for key in expected:
            value = self.params[key]
            clean[key] = _as_int(key, value, 0) if key in INTEGER_PARAMS else _as_real(key, value)
        object.__setattr__(self, "params", clean)
        _check_ranges(family, clean)
        _check_epsilon(self.epsilon)

    def build(self) -> Tuple[FockState, TruncationReport]:
        """Construct the state; finite families get a zero-residual report."""
        p = self.params
        f = self.family
        if f is Family.BINOMIAL:
            state = binomial_state(p["p"], p["M"])
        elif f is Family.GENERALIZED_BINOMIAL:
            state = generalized_binomial_state(p["alpha"], p["beta"], p["N"])
        elif f is Family.HYPERGEOMETRIC:
            state = hypergeometric_state(p["L"], p["M"], p["p"])
        elif f is Family.NEGATIVE_BINOMIAL:
            return negative_binomial_state(p["p"], p["M"], self.epsilon, self.nmax_cap)
        elif f is Family.PHOTON_ADDED_COHERENT:
            return photon_added_coherent_state(p["alpha"], p["m"], self.epsilon, self.nmax_cap)
        else:
            return coherent_state(p["alpha"], self.epsilon, self.nmax_cap)
        return state, _finite_report(state)


def build_state(spec: StateSpec) -> FockState:
    return spec.build()[0]
