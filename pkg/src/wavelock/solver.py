"""Dual-constraint solver: multipliers, moments and the bound integral.

In the dual regime the extremal distribution function is

    u(t) = 4 pi max{ (l1 t^(p-1) + l2 t^(q-1))^(-1/(2 beta + 1)) - 1, 0 },

supported on (0, T] with T the unique root of l1 T^(p-1) + l2 T^(q-1) = 1.
The multipliers are pinned by the two moment equations
p int t^(p-1) u dt = A^p and q int t^(q-1) u dt = B^q.  Both moments are
strictly decreasing in each multiplier, which gives the nested bracketed
root-find used by :func:`solve_multipliers` guaranteed enclosures.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import closed_form
from .core import (
    FOUR_PI,
    DerivedConstants,
    ProblemParams,
    canonical_order,
    classify_regime,
    derive_constants,
)


class SolverError(RuntimeError):
    """The nested multiplier solve could not enclose or verify a solution."""


class QuadratureError(RuntimeError):
    """A quadrature failed to reach its configured tolerance."""


@dataclass(frozen=True)
class QuadratureConfig:
    """Accuracy knobs shared by every integral in this module."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 60

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 10:
            raise ValueError("max_subdivisions must be at least 10")


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass(frozen=True)
class Multipliers:
    """Multiplier pair and the support endpoint T they determine."""

    lambda1: float
    lambda2: float
    T: float


def find_T(lambda1: float, lambda2: float, params: ProblemParams) -> float:
    """Unique positive root of l1 T^(p-1) + l2 T^(q-1) = 1.

    The left side is strictly increasing from 0 to infinity, so a root
    always exists for nonnegative multipliers that are not both zero.
    """
    p, q = params.p, params.q
    if lambda1 < 0 or lambda2 < 0 or (lambda1 == 0 and lambda2 == 0):
        raise ValueError("multipliers must be nonnegative and not both zero")
    if lambda2 == 0:
        return lambda1 ** (-1.0 / (p - 1.0))
    if lambda1 == 0:
        return lambda2 ** (-1.0 / (q - 1.0))

    def phi(t: float) -> float:
        return lambda1 * t ** (p - 1.0) + lambda2 * t ** (q - 1.0)

    # Whichever single-term root is smaller makes phi >= 1 there, up to
    # rounding when the other term is negligible; expand until certain.
    hi = min(lambda1 ** (-1.0 / (p - 1.0)), lambda2 ** (-1.0 / (q - 1.0)))
    while phi(hi) < 1.0:
        hi *= 2.0
    lo = 0.5 * hi
    while phi(lo) >= 1.0:
        lo *= 0.5
    return brentq(lambda t: phi(t) - 1.0, lo, hi, xtol=1e-300, rtol=1e-15)


def multipliers(lambda1: float, lambda2: float, params: ProblemParams) -> Multipliers:
    """Bundle a multiplier pair with its support endpoint."""
    return Multipliers(lambda1, lambda2, find_T(lambda1, lambda2, params))


def u_eval(t, m: Multipliers, params: ProblemParams):
    """The dual-regime distribution function u(t); zero for t >= T.

    Continuous and strictly decreasing on (0, T], with a power blow-up
    at t -> 0 governed by the smaller exponent.
    """
    p, q, beta = params.p, params.q, params.beta
    t_arr = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        phi = m.lambda1 * t_arr ** (p - 1.0) + m.lambda2 * t_arr ** (q - 1.0)
        out = FOUR_PI * np.maximum(phi ** (-1.0 / (2.0 * beta + 1.0)) - 1.0, 0.0)
    return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out


def _graded_gauss(f, upper: float, panels: int, nodes: int) -> float:
    """Integral of f over (0, upper] on panels graded toward both endpoints.

    Gauss-Legendre within each panel, with panel widths shrinking
    geometrically into 0 and into ``upper``.  The grading at 0 absorbs
    algebraic behaviour with any exponent above -1; the grading at the
    far end resolves the boundary layer of width upper/max(p, q) that a
    large exponent carves there.  All panels go through one vectorized
    evaluation of f.
    """
    x, w = np.polynomial.legendre.leggauss(nodes)
    half_up = 0.5 * upper
    down = half_up * 2.0 ** (-np.arange(panels + 1, dtype=float))
    left_his = down
    left_los = np.concatenate([down[1:], [0.0]])
    right_los = upper - down
    right_his = np.concatenate([upper - down[1:], [upper]])
    los = np.concatenate([left_los, right_los])
    his = np.concatenate([left_his, right_his])
    mids = 0.5 * (los + his)
    halfs = 0.5 * (his - los)
    pts = mids[:, None] + halfs[:, None] * x[None, :]
    vals = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
    return float(np.sum(halfs * (vals @ w)))


def _checked_integral(f, upper: float, cfg: QuadratureConfig, what: str) -> float:
    value = _graded_gauss(f, upper, cfg.max_subdivisions, 16)
    coarse = _graded_gauss(f, upper, cfg.max_subdivisions, 8)
    err = abs(value - coarse)
    if err > 100.0 * (cfg.abs_tol + cfg.rel_tol * abs(value)):
        raise QuadratureError(
            f"{what}: error estimate {err:.3e} exceeds tolerance "
            f"(rel_tol={cfg.rel_tol:g}, abs_tol={cfg.abs_tol:g})"
        )
    return value


def moment(
    m: Multipliers,
    params: ProblemParams,
    which: str,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """e * int_0^T t^(e-1) u(t) dt for e = p ("P") or q ("Q").

    The integrand vanishes at the origin like t to the power
    (e-1) - (min(p,q)-1)/(2 beta + 1), which is positive for every
    admissible instance; the remaining fractional-power behaviour is
    absorbed by the geometric panel grading.
    """
    if which not in ("P", "Q"):
        raise ValueError(f'which must be "P" or "Q", got {which!r}')
    e = params.p if which == "P" else params.q

    def f(t):
        return e * t ** (e - 1.0) * u_eval(t, m, params)

    return _checked_integral(f, m.T, cfg, f"moment {which}")


def bound_integral(
    m: Multipliers,
    params: ProblemParams,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """int_0^T G(u(t)) dt, the sharp bound in the dual regime.

    On (0, T) the integrand collapses to 1 - phi(t)^(2 beta/(2 beta + 1))
    with phi = l1 t^(p-1) + l2 t^(q-1): bounded by 1, tending to 1 at the
    origin, vanishing at T.
    """
    p, q, beta = params.p, params.q, params.beta
    gamma = 2.0 * beta / (2.0 * beta + 1.0)

    def f(t):
        phi = m.lambda1 * t ** (p - 1.0) + m.lambda2 * t ** (q - 1.0)
        return 1.0 - phi**gamma

    return _checked_integral(f, m.T, cfg, "bound integral")


def _single_moment_closed(e: float, alpha: float, other: float, T: float) -> float:
    """other-moment of a one-multiplier profile with support endpoint T.

    For u built from exponent e alone, the own moment is 4 pi sigma_e T^e;
    the cross moment is 4 pi alpha_e/(other - alpha_e) T^other, infinite
    when other <= alpha_e.
    """
    if other <= alpha:
        return math.inf
    return FOUR_PI * alpha / (other - alpha) * T**other


def solve_multipliers(
    params: ProblemParams,
    consts: DerivedConstants | None = None,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> Multipliers:
    """Solve the two moment equations for (lambda1, lambda2) in the dual regime.

    Nested bracketed root-find: the inner stage matches the p-moment to
    A^p by a monotone solve for lambda1 at fixed lambda2, the outer stage
    drives the q-moment of the matched pair to B^q.  Monotonicity of both
    moments in both multipliers makes every bracket rigorous; brackets are
    grown geometrically from the single-constraint seeds.  Raises
    :class:`SolverError` if an enclosure cannot be established or the
    final residuals exceed 1e-8 relative.
    """
    work, swapped = canonical_order(params)
    cw = derive_constants(work)
    regime = classify_regime(work, cw)
    if regime.tag != "Dual":
        raise SolverError(
            f"solve_multipliers requires the dual regime, got {regime.tag} "
            f"at B/A = {work.ratio:.6g}"
        )

    p, q, beta = work.p, work.q, work.beta
    Ap, Bq = work.A**p, work.B**q
    alpha_q = cw.alpha_q

    # Single-constraint support endpoints seed both brackets; in canonical
    # order (p < q) the lambda2 = 0 anchor is always available.
    T_p = work.A * (FOUR_PI * cw.sigma_p) ** (-1.0 / p)
    T_q = work.B * (FOUR_PI * cw.sigma_q) ** (-1.0 / q)
    l1_seed = T_p ** (-(p - 1.0))
    l2_seed = T_q ** (-(q - 1.0))

    def p_moment(l1: float, l2: float) -> float:
        return moment(multipliers(l1, l2, work), work, "P", cfg)

    def match_lambda1(l2: float) -> float | None:
        """lambda1 with p-moment = A^p at this lambda2, None if unattainable."""
        if l2 == 0.0:
            return l1_seed
        p_at_zero = _single_moment_closed(q, alpha_q, p, l2 ** (-1.0 / (q - 1.0)))
        if p_at_zero <= Ap:
            # Even lambda1 -> 0 cannot restore the p-moment: no root here.
            return None
        hi = l1_seed  # p_moment falls in lambda2, so the seed stays an upper bracket
        while p_moment(hi, l2) >= Ap:
            hi *= 2.0
            if hi > 1e280:
                raise SolverError("lambda1 bracket grew past overflow")
        if math.isfinite(p_at_zero):
            gap = lambda l1: (p_moment(l1, l2) if l1 > 0.0 else p_at_zero) - Ap
            lo = 0.0
        else:
            gap = lambda l1: p_moment(l1, l2) - Ap
            lo = 0.5 * hi
            while gap(lo) < 0.0:
                lo *= 0.5
                if lo < 1e-280:
                    return None
        return brentq(gap, lo, hi, xtol=1e-300, rtol=1e-15)

    # q-moment along the p-matched curve; at lambda2 = 0 it equals the
    # cross-moment of the single-constraint profile, (r2 A)^q.
    q_gap_at_zero = _single_moment_closed(p, cw.alpha_p, q, T_p) - Bq
    if not q_gap_at_zero > 0.0:
        raise SolverError(
            f"dual solve started outside its regime: q-gap at lambda2=0 is "
            f"{q_gap_at_zero:.3e} (B/A = {work.ratio:.6g}, r2 = {cw.r2!r})"
        )

    def q_gap(l2: float) -> float:
        if l2 == 0.0:
            return q_gap_at_zero
        l1 = match_lambda1(l2)
        if l1 is None:
            # lambda2 alone already undershoots the p-budget; continue the
            # gap with the one-multiplier q-moment, which matches the true
            # branch exactly where the inner root vanishes.
            return _single_moment_closed(
                q, alpha_q, q, l2 ** (-1.0 / (q - 1.0))
            ) - Bq
        return moment(multipliers(l1, l2, work), work, "Q", cfg) - Bq

    hi = l2_seed
    while q_gap(hi) > 0.0:
        hi *= 2.0
        if hi > 1e280:
            raise SolverError("lambda2 bracket grew past overflow")
    l2 = brentq(q_gap, 0.0, hi, xtol=1e-300, rtol=1e-15)
    l1 = match_lambda1(l2)
    if l1 is None or l2 <= 0.0 or l1 <= 0.0:
        raise SolverError(
            f"nested solve left the open dual quadrant: lambda1={l1!r}, "
            f"lambda2={l2!r} (B/A = {work.ratio:.6g})"
        )

    m = multipliers(l1, l2, work)
    res_p = abs(moment(m, work, "P", cfg) - Ap) / Ap
    res_q = abs(moment(m, work, "Q", cfg) - Bq) / Bq
    if max(res_p, res_q) > 1e-8:
        raise SolverError(
            f"moment residuals {res_p:.3e}, {res_q:.3e} exceed 1e-8 "
            f"(lambda1={l1!r}, lambda2={l2!r}, T={m.T!r})"
        )

    if swapped:
        m = Multipliers(lambda1=m.lambda2, lambda2=m.lambda1, T=m.T)
    return m


@dataclass(frozen=True)
class BoundReport:
    """Everything a bound computation produced, ready for serialization.

    Fields that do not exist in a regime (T and the inactive residual in
    the single-constraint cases, thresholds whose cross-norm diverges)
    are ``None``, never a placeholder number.
    """

    beta: float
    p: float
    q: float
    A: float
    B: float
    regime: str
    boundary: bool
    bound: float
    r1: float | None
    r2: float | None
    lambda1: float
    lambda2: float
    T: float | None
    residual_p: float | None
    residual_q: float | None
    wall_time_s: float

    def multipliers(self) -> Multipliers:
        params = ProblemParams(self.beta, self.p, self.q, self.A, self.B)
        T = self.T if self.T is not None else find_T(self.lambda1, self.lambda2, params)
        return Multipliers(self.lambda1, self.lambda2, T)


def compute_bound(
    params: ProblemParams, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> BoundReport:
    """Classify the instance and evaluate the sharp bound for its regime.

    Single regimes use the closed form with the inactive multiplier
    recorded as exactly zero; the dual regime runs the nested solve and
    the bound integral.
    """
    start = time.perf_counter()
    consts = derive_constants(params)
    regime = classify_regime(params, consts)

    if regime.tag == "Dual":
        m = solve_multipliers(params, consts, cfg)
        bound = bound_integral(m, params, cfg)
        res_p = abs(moment(m, params, "P", cfg) - params.A**params.p) / params.A**params.p
        res_q = abs(moment(m, params, "Q", cfg) - params.B**params.q) / params.B**params.q
        lam1, lam2, T = m.lambda1, m.lambda2, m.T
        residual_p, residual_q = res_p, res_q
    else:
        side = "P" if regime.tag == "SingleP" else "Q"
        single = closed_form.single_bound(params, consts, side)
        bound = single.bound
        e = params.p if side == "P" else params.q
        seed = single.lam ** (-(e - 1.0))
        if side == "P":
            lam1, lam2 = seed, 0.0
            residual_p, residual_q = 0.0, None
        else:
            lam1, lam2 = 0.0, seed
            residual_p, residual_q = None, 0.0
        T = None

    return BoundReport(
        beta=params.beta,
        p=params.p,
        q=params.q,
        A=params.A,
        B=params.B,
        regime=regime.tag,
        boundary=regime.boundary,
        bound=bound,
        r1=consts.r1,
        r2=consts.r2,
        lambda1=lam1,
        lambda2=lam2,
        T=T,
        residual_p=residual_p,
        residual_q=residual_q,
        wall_time_s=time.perf_counter() - start,
    )
