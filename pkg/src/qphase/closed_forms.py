"""Published closed-form expressions for d_U and PACS moments, and their cross-check.

Each ``*_closed`` function evaluates an expression exactly as typeset in the
source literature, in log space where it contains large combinatorial
factors. None of them is corrected: when a printed expression disagrees with
direct Fock-space summation, :func:`cross_check` reports a ``MISMATCH`` and
the summation result stands.

Readings chosen where the printed text is ambiguous:

* generalized binomial: the unbound index ``n`` in the bracketed ratio is
  summed over ``0..N-1``;
* photon-added coherent moments: the three series are summed from ``n = 0``
  with powers of ``alpha`` exactly as printed (``alpha^(2(n+1))`` for the
  mean photon number, ``alpha^(n+2)`` for the second factorial moment);
* negative binomial: ``(1-p)^(n+1)`` sits under the square root, as printed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import ClosedFormUndefined, PhaseUndefined, QPhaseError
from .fock import MomentSet, moments
from .metrics import bp_phase_report, u_from_moments
from .states import (
    DEFAULT_EPSILON,
    DEFAULT_NMAX_CAP,
    Family,
    StateSpec,
    _as_int,
    _as_real,
    _check_epsilon,
    _ln_binom,
    _ln_poch,
    _open_unit,
    generalized_binomial_state,
    hypergeometric_state,
    laguerre_neg,
)


class Verdict(str, Enum):
    MATCH = "Match"
    MISMATCH = "Mismatch"
    UNDEFINED = "ClosedFormUndefined"


@dataclass(frozen=True)
class CrossCheckReport:
    family: Family
    params: Dict[str, float]
    quantity: str
    closed_value: float
    oracle_value: float
    abs_diff: float
    tolerance: float
    verdict: Verdict
    note: str = ""


def _log_series(
    log_term: Callable[[np.ndarray], np.ndarray],
    start: int,
    epsilon: float,
    cap: int = DEFAULT_NMAX_CAP,
    block: int = 256,
) -> float:
    """Log of ``sum_{n >= start} exp(log_term(n))`` for a series with eventually shrinking ratios.

    Summation stops once the ratio of consecutive terms ``r`` is below one
    and the geometric remainder ``t r / (1 - r)`` is below ``epsilon`` times
    the running sum.
    """
    pieces = []
    lo = start
    while lo - start <= cap:
        n = np.arange(lo, lo + block + 1, dtype=float)
        lt = log_term(n)
        if not np.all(np.isfinite(lt) | (lt == -np.inf)):
            raise ClosedFormUndefined("series term is not finite")
        pieces.append(lt[:-1])
        log_sum = logsumexp(np.concatenate(pieces))
        lr = lt[-1] - lt[-2]
        if lr < 0.0:
            r = math.exp(lr)
            if lt[-2] + math.log(r / (1.0 - r)) < log_sum + math.log(epsilon):
                return float(logsumexp([log_sum, lt[-1]]))
        lo += block
    raise ClosedFormUndefined(f"series did not converge within {cap} terms")


# ---------------------------------------------------------------------------
# binomial


def _binomial_overlap(p: float, M: int) -> float:
    """``K = sum_{n<M} B_n^{M-1} B_n^M`` with ``B_n^M = sqrt(C(M,n) p^n (1-p)^(M-n))``."""
    n = np.arange(M, dtype=float)
    lq = math.log1p(-p)
    ln_b_lo = 0.5 * (_ln_binom(M - 1, n) + n * math.log(p) + (M - 1 - n) * lq)
    ln_b_hi = 0.5 * (_ln_binom(M, n) + n * math.log(p) + (M - n) * lq)
    return float(np.exp(logsumexp(ln_b_lo + ln_b_hi)))


def du_binomial_closed(p: float, M: int) -> float:
    """``Mp(1-p)/K^2 [1/(2Mp) + 1 - K^2] - 1/2`` for the binomial state."""
    p = _open_unit("p", p)
    M = _as_int("M", M, 1)
    k2 = _binomial_overlap(p, M) ** 2
    return M * p * (1.0 - p) / k2 * (1.0 / (2.0 * M * p) + 1.0 - k2) - 0.5


# ---------------------------------------------------------------------------
# negative binomial


def du_nbs_closed(p: float, M: int, epsilon: float = DEFAULT_EPSILON) -> float:
    """Printed negative-binomial d_U; the overlap series is cut at relative tail ``epsilon``."""
    p = _open_unit("p", p)
    M = _as_int("M", M, 0)
    epsilon = _check_epsilon(epsilon)
    lq = math.log1p(-p)

    def log_term(n):
        return 0.5 * (_ln_binom(n + 1.0, M) + _ln_binom(n, M) + (n + 1.0) * lq + np.log(n + 1.0))

    s2 = math.exp(2.0 * _log_series(log_term, M, epsilon))
    prefactor = (M + 1) * (1.0 - p) ** (2 * M + 1) / p ** (2 * (M + 2))
    inner = (M + 1 - p) / p - p ** (2 * (M + 1)) / (1.0 - p) ** (2 * M) * s2 + 0.5
    value = prefactor * inner / s2 - 0.5
    if not math.isfinite(value):
        raise ClosedFormUndefined("negative binomial closed form overflowed")
    return value


# ---------------------------------------------------------------------------
# hypergeometric


def du_hs_closed(L: float, M: int, p: float) -> float:
    """Printed hypergeometric d_U (contains ``sqrt(Lp)`` factors as typeset)."""
    hypergeometric_state(L, M, p)  # domain validation
    L = float(L)
    M = int(M)
    lp, lq = L * p, L * (1.0 - p)
    n = np.arange(M, dtype=float)
    ln_s = logsumexp(
        0.5 * (_ln_binom(lp, n) + _ln_binom(lq, M - n) + _ln_binom(lp - 1.0, n) + _ln_binom(lq, M - n - 1.0))
    )
    ln_c = float(_ln_binom(L, M))
    ratio = math.exp(2.0 * ln_c - 2.0 * ln_s)  # C(L,M)^2 / S^2
    root = math.sqrt(lp)
    first = p * M * (1.0 - p) * (L - M) * ratio / ((L - 1.0) * root)
    value = first * (M * p - root / ratio + 0.5) - 0.5
    if not math.isfinite(value):
        raise ClosedFormUndefined("hypergeometric closed form is not finite")
    return value


# ---------------------------------------------------------------------------
# generalized binomial (experimental)


def du_gbs_closed(alpha: float, beta: float, N: int) -> float:
    """Printed generalized-binomial d_U with its free index summed over ``0..N-1``.

    Experimental: the typeset expression leaves ``n`` unbound.
    """
    generalized_binomial_state(alpha, beta, N)  # domain validation
    a, b, N = float(alpha), float(beta), int(N)
    n = np.arange(N, dtype=float)
    ln_x = (
        gammaln(N)
        + _ln_poch(a + 2.0, n)
        + _ln_poch(b + 1.0, N - n)
        - _ln_poch(a + b + 3.0, N - 1)
        - gammaln(N - n)
    )
    x = float(np.exp(logsumexp(ln_x)))
    if not math.isfinite(x) or x <= 0.0:
        raise ClosedFormUndefined("bracketed ratio is not a positive finite number")
    lead = (b + 1.0) * (a + b + N + 2.0) / (N ** 3 * (a + 1.0) * (a + b + 3.0) * x)
    n2 = N * (N - 1) * (a + 1.0) * (a + 2.0) / ((a + b + 2.0) * (a + b + 3.0))
    inner = n2 - N ** 4 * (a + 1.0) ** 2 * x / (a + b + 2.0) ** 2 + 0.5
    return lead * inner - 0.5


# ---------------------------------------------------------------------------
# photon-added coherent (experimental)


def pacs_moments_closed(alpha: float, m: int, epsilon: float = DEFAULT_EPSILON) -> MomentSet:
    """Printed PACS series for ``<a^dag a>``, ``<a^dag2 a^2>`` and ``<a>``.

    ``<a^2>`` is not given in closed form and is returned as NaN.
    """
    alpha = _as_real("alpha", alpha)
    if alpha <= 0.0:
        raise ClosedFormUndefined("printed PACS series need alpha > 0")
    m = _as_int("m", m, 0)
    epsilon = _check_epsilon(epsilon)
    a2 = alpha * alpha
    la = math.log(alpha)
    ln_pref = -a2 - math.log(laguerre_neg(m, a2)) - math.lgamma(m + 1.0)

    def n_mean_term(n):
        return gammaln(n + m + 1.0) + 2.0 * (n + 1.0) * la + 2.0 * np.log(m + n + 1.0) - 2.0 * gammaln(n + 2.0)

    def n2_term(n):
        return (
            gammaln(n + m + 1.0)
            + (n + 2.0) * la
            + 2.0 * np.log(m + n + 1.0)
            + 2.0 * np.log(m + n + 2.0)
            - 2.0 * gammaln(n + 3.0)
        )

    def mean_a_term(n):
        return gammaln(n + m + 1.0) + (2.0 * n + 1.0) * la + np.log(m + n + 1.0) - np.log(n + 1.0) - 2.0 * gammaln(n + 1.0)

    return MomentSet(
        mean_a=math.exp(ln_pref + _log_series(mean_a_term, 0, epsilon)),
        mean_a2=float("nan"),
        n_mean=math.exp(ln_pref + _log_series(n_mean_term, 0, epsilon)),
        n2_normord=math.exp(ln_pref + _log_series(n2_term, 0, epsilon)),
    )


# ---------------------------------------------------------------------------
# cross-check driver

PACS_QUANTITIES = ("d_u", "n_mean", "n2_normord", "mean_a")


def _closed_value(spec: StateSpec, quantity: str) -> float:
    p = spec.params
    f = spec.family
    if f is Family.PHOTON_ADDED_COHERENT:
        ms = pacs_moments_closed(p["alpha"], p["m"], spec.epsilon)
        if quantity == "d_u":
            return u_from_moments(ms.n2_normord, ms.n_mean, ms.mean_a) - 0.5
        return getattr(ms, quantity)
    if quantity != "d_u":
        raise ClosedFormUndefined(f"no printed closed form for {quantity} of {f.value}")
    if f is Family.BINOMIAL:
        return du_binomial_closed(p["p"], p["M"])
    if f is Family.NEGATIVE_BINOMIAL:
        return du_nbs_closed(p["p"], p["M"], spec.epsilon)
    if f is Family.HYPERGEOMETRIC:
        return du_hs_closed(p["L"], p["M"], p["p"])
    if f is Family.GENERALIZED_BINOMIAL:
        return du_gbs_closed(p["alpha"], p["beta"], p["N"])
    # coherent: U = 1/2 exactly
    return 0.0


def _oracle_value(spec: StateSpec, quantity: str) -> float:
    state = spec.build()[0]
    if quantity == "d_u":
        return bp_phase_report(state).d_u
    return getattr(moments(state), quantity)


def cross_check(spec: StateSpec, tol: float = 1e-8, quantity: str = "d_u") -> CrossCheckReport:
    """Compare the printed closed form for ``spec`` with direct Fock-space summation.

    Both paths use ``spec.epsilon`` for truncation. Failures to evaluate either
    side become a ``ClosedFormUndefined`` verdict rather than an exception.
    """
    if quantity not in PACS_QUANTITIES:
        raise ValueError(f"quantity must be one of {PACS_QUANTITIES}")
    closed = oracle = float("nan")
    note = ""
    try:
        oracle = _oracle_value(spec, quantity)
        closed = _closed_value(spec, quantity)
    except (ClosedFormUndefined, PhaseUndefined, QPhaseError, OverflowError, ZeroDivisionError) as exc:
        note = f"{type(exc).__name__}: {exc}"
    if note or not (math.isfinite(closed) and math.isfinite(oracle)):
        return CrossCheckReport(
            spec.family, dict(spec.params), quantity, closed, oracle,
            float("nan"), tol, Verdict.UNDEFINED, note or "non-finite value",
        )
    diff = abs(closed - oracle)
    verdict = Verdict.MATCH if diff <= tol else Verdict.MISMATCH
    return CrossCheckReport(spec.family, dict(spec.params), quantity, closed, oracle, diff, tol, verdict)
