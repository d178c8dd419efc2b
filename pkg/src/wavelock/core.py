"""Problem parameters, derived constants, the bound kernel G and regime logic.

Everything here is a pure function of its inputs; all values are plain
floats or frozen dataclasses and safe to share between threads.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

FOUR_PI = 4.0 * math.pi

# Relative tolerance used to flag B/A sitting on a regime threshold.
BOUNDARY_RTOL = 1e-12


class ParameterError(ValueError):
    """Invalid problem parameters (nonpositive values, p = q, ...)."""


class RegimeError(RuntimeError):
    """An operation was invoked outside the parameter regime it covers."""


@dataclass(frozen=True)
class ProblemParams:
    """One problem instance: wavelet exponent, Lebesgue exponents and budgets.

    ``beta`` is the Cauchy-wavelet exponent, ``p`` and ``q`` the two
    Lebesgue exponents (both > 1, distinct), ``A`` and ``B`` the
    corresponding norm budgets.
    """

    beta: float
    p: float
    q: float
    A: float
    B: float

    def __post_init__(self):
        if not (self.beta > 0):
            raise ParameterError(f"beta must be positive, got {self.beta}")
        for name in ("p", "q"):
            v = getattr(self, name)
            if not (v > 1):
                raise ParameterError(f"{name} must exceed 1, got {v}")
        if self.p == self.q:
            raise ParameterError(
                "p and q must be distinct; the two-constraint problem "
                f"degenerates at p = q = {self.p}"
            )
        for name in ("A", "B"):
            v = getattr(self, name)
            if not (v > 0):
                raise ParameterError(f"{name} must be positive, got {v}")

    @property
    def ratio(self) -> float:
        """The budget ratio B/A that selects the regime."""
        return self.B / self.A

    def swapped(self) -> "ProblemParams":
        """The same instance with the roles of the two constraints exchanged."""
        return ProblemParams(self.beta, self.q, self.p, self.B, self.A)


def canonical_order(params: ProblemParams) -> tuple[ProblemParams, bool]:
    """Return an equivalent instance with p < q, plus a flag when swapped."""
    if params.p > params.q:
        return params.swapped(), True
    return params, False


@dataclass(frozen=True)
class DerivedConstants:
    """Exponent constants and the two budget-ratio thresholds.

    ``r1``/``r2`` are ``None`` when the corresponding cross-norm diverges
    (p <= alpha_q, resp. q <= alpha_p); at most one can be undefined.
    """

    alpha_p: float
    alpha_q: float
    sigma_p: float
    sigma_q: float
    kappa_p: float
    kappa_q: float
    r1: float | None
    r2: float | None


@dataclass(frozen=True)
class Regime:
    """Which constraints bind: tag in {"SingleP", "SingleQ", "Dual"}."""

    tag: str
    boundary: bool = False


def _alpha(e: float, beta: float) -> float:
    return (e - 1.0) / (2.0 * beta + 1.0)


def _sigma(e: float, beta: float) -> float:
    return (e - 1.0) / (2.0 * beta * e + 1.0)


def derive_constants(params: ProblemParams) -> DerivedConstants:
    """Compute alpha/sigma/kappa for both exponents and the thresholds r1, r2.

    r2 = (4pi)^(1/q-1/p) (alpha_p/(q-alpha_p))^(1/q) sigma_p^(-1/p) is the
    ratio above which only the p-constraint binds; r1 is the mirrored
    threshold below which only the q-constraint binds.  A threshold whose
    exponent condition fails (q <= alpha_p for r2, p <= alpha_q for r1) is
    returned as ``None`` rather than any float sentinel.
    """
    beta, p, q = params.beta, params.p, params.q
    ap, aq = _alpha(p, beta), _alpha(q, beta)
    sp, sq = _sigma(p, beta), _sigma(q, beta)

    pref = FOUR_PI ** (1.0 / q - 1.0 / p)
    r1 = None
    if p > aq:
        r1 = pref * (aq / (p - aq)) ** (-1.0 / p) * sq ** (1.0 / q)
    r2 = None
    if q > ap:
        r2 = pref * (ap / (q - ap)) ** (1.0 / q) * sp ** (-1.0 / p)

    if r1 is not None and r2 is not None and not (r1 < r2):
        # Not expected for any valid instance; surfaced, not fatal.
        warnings.warn(
            f"threshold ordering violated: r1={r1!r} >= r2={r2!r} for {params}",
            RuntimeWarning,
            stacklevel=2,
        )

    return DerivedConstants(
        alpha_p=ap,
        alpha_q=aq,
        sigma_p=sp,
        sigma_q=sq,
        kappa_p=(p - 1.0) / p,
        kappa_q=(q - 1.0) / q,
        r1=r1,
        r2=r2,
    )


def classify_regime(params: ProblemParams, consts: DerivedConstants) -> Regime:
    """Decide which constraints are active for this instance.

    Ratios within ``BOUNDARY_RTOL`` of a threshold are classified into the
    adjacent single-constraint regime (the two cases agree there and the
    closed form is exact) with the ``boundary`` flag set.
    """
    ratio = params.ratio
    on_r1 = consts.r1 is not None and abs(ratio - consts.r1) <= BOUNDARY_RTOL * consts.r1
    on_r2 = consts.r2 is not None and abs(ratio - consts.r2) <= BOUNDARY_RTOL * consts.r2

    if consts.r2 is not None and (ratio >= consts.r2 or on_r2):
        return Regime("SingleP", boundary=on_r2)
    if consts.r1 is not None and (ratio <= consts.r1 or on_r1):
        return Regime("SingleQ", boundary=on_r1)
    return Regime("Dual")


def g_eval(s, beta: float):
    """The concentration kernel G(s) = 1 - (1 + s/4pi)^(-2 beta), s >= 0.

    Strictly increasing and concave, ranges over [0, 1).  Accepts scalars
    or arrays; negative arguments are rejected.
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise ValueError("g_eval requires s >= 0")
    out = 1.0 - (1.0 + s_arr / FOUR_PI) ** (-2.0 * beta)
    return float(out) if np.isscalar(s) or s_arr.ndim == 0 else out


def g_prime(s, beta: float):
    """Derivative of G: (2 beta / 4pi) (1 + s/4pi)^(-2 beta - 1).

    At s = 0 this equals beta/(2 pi), the Lipschitz constant of G.
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise ValueError("g_prime requires s >= 0")
    out = (2.0 * beta / FOUR_PI) * (1.0 + s_arr / FOUR_PI) ** (-2.0 * beta - 1.0)
    return float(out) if np.isscalar(s) or s_arr.ndim == 0 else out


def g_curvature_bound(beta: float) -> float:
    """Upper bound on |G''| over s >= 0, attained at s = 0."""
    return 2.0 * beta * (2.0 * beta + 1.0) / FOUR_PI**2
