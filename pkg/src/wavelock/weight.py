"""Extremal weights on the upper half-plane.

A weight is radial about its centre z0 in the squared pseudo-hyperbolic
coordinate d(z, z0) = |z - z0|^2 / |z - conj(z0)|^2, carries a constant
phase, and its magnitude profile is either the single-constraint power
lam (1 - d)^(1/alpha_e) or, in the dual regime, psi(d/(1 - d)) where psi
inverts t -> (l1 t^(p-1) + l2 t^(q-1))^(-1/(2 beta + 1)) - 1 on (0, T].

Everything is evaluated on demand; all norm and distribution checks
reduce to one-dimensional integrals through the disc measure
nu({d < r}) = 4 pi r / (1 - r).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .core import FOUR_PI, ProblemParams, derive_constants
from .closed_form import RadialProfile, single_bound
from .solver import BoundReport, Multipliers, QuadratureConfig, DEFAULT_QUADRATURE, u_eval

# Beyond this d the double-precision map d/(1-d) saturates; the profile
# value there is below any representable scale, so we return 0.
_D_CUTOFF = 1.0 - 1e-14


@dataclass(frozen=True)
class HalfPlanePoint:
    """A point x + i y of the upper half-plane (y > 0)."""

    x: float
    y: float

    def __post_init__(self):
        if not (self.y > 0):
            raise ValueError(f"half-plane points need y > 0, got y = {self.y}")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


def pseudo_hyperbolic(z, z0) -> float | np.ndarray:
    """d(z, z0) = |z - z0|^2 / |z - conj(z0)|^2, in [0, 1).

    Symmetric, zero exactly at z = z0.  Accepts HalfPlanePoint, complex
    scalars or complex arrays (upper half-plane assumed for arrays).
    """
    zc = z.z if isinstance(z, HalfPlanePoint) else np.asarray(z, dtype=complex)
    z0c = z0.z if isinstance(z0, HalfPlanePoint) else complex(z0)
    if np.any(np.imag(zc) <= 0) or np.imag(z0c) <= 0:
        raise ValueError("pseudo_hyperbolic is defined on the open upper half-plane")
    d = np.abs(zc - z0c) ** 2 / np.abs(zc - np.conj(z0c)) ** 2
    return float(d) if np.ndim(d) == 0 else d


def psi_inverse(s, m: Multipliers, params: ProblemParams):
    """Invert the dual profile map on (0, T]: psi(0) = T, psi -> 0 at infinity.

    Solves (l1 t^(p-1) + l2 t^(q-1))^(-1/(2 beta+1)) - 1 = s by bisection
    on the equivalent monotone form phi(t) = (1 + s)^(-(2 beta + 1)).
    Vectorized; 200 halvings put the iterate at the rounding floor of the
    answer, comfortably below the 1e-12 relative target.
    """
    p, q, beta = params.p, params.q, params.beta
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise ValueError("psi_inverse requires s >= 0")
    target = (1.0 + s_arr) ** (-(2.0 * beta + 1.0))
    lo = np.zeros_like(target)
    hi = np.full_like(target, m.T)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        with np.errstate(divide="ignore"):
            high = m.lambda1 * mid ** (p - 1.0) + m.lambda2 * mid ** (q - 1.0) > target
        hi = np.where(high, mid, hi)
        lo = np.where(high, lo, mid)
    out = 0.5 * (lo + hi)
    return float(out) if np.isscalar(s) or s_arr.ndim == 0 else out


@dataclass(frozen=True)
class ExtremalWeight:
    """A reconstructed extremal weight: centre, phase and radial profile data.

    ``mode`` selects the profile: "SingleP"/"SingleQ" use ``lam`` with the
    matching alpha exponent, "Dual" uses the inverse profile of
    ``multipliers``.  The magnitude depends on z only through d(z, centre);
    the phase is a global unimodular constant.
    """

    params: ProblemParams
    mode: str
    center: HalfPlanePoint
    phase: float = 0.0
    lam: float | None = None
    mults: Multipliers | None = None

    def __post_init__(self):
        if self.mode in ("SingleP", "SingleQ"):
            if self.lam is None or self.lam < 0:
                raise ValueError(f"{self.mode} weight needs a nonnegative lam")
        elif self.mode == "Dual":
            if self.mults is None:
                raise ValueError("Dual weight needs multipliers")
        else:
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def peak(self) -> float:
        """Magnitude at the centre: lam for single modes, T for dual."""
        return self.lam if self.mode != "Dual" else self.mults.T

    def profile(self) -> RadialProfile:
        """Magnitude as a function of d in [0, 1)."""
        consts = derive_constants(self.params)
        if self.mode == "SingleP":
            alpha, lam = consts.alpha_p, self.lam
        elif self.mode == "SingleQ":
            alpha, lam = consts.alpha_q, self.lam
        else:
            alpha = lam = None

        def fn(d):
            d = np.asarray(d, dtype=float)
            if np.any((d < 0) | (d >= 1)):
                raise ValueError("profile argument d must lie in [0, 1)")
            inside = d <= _D_CUTOFF
            dd = np.where(inside, d, 0.0)
            if self.mode == "Dual":
                vals = psi_inverse(dd / (1.0 - dd), self.mults, self.params)
            else:
                vals = lam * (1.0 - dd) ** (1.0 / alpha)
            return np.where(inside, vals, 0.0)

        return RadialProfile(fn=fn, domain=(0.0, 1.0), label=f"weight-{self.mode}")


def weight_from_report(
    params: ProblemParams,
    report: BoundReport,
    center: HalfPlanePoint | None = None,
    phase: float = 0.0,
) -> ExtremalWeight:
    """Build the extremal weight matching a bound report."""
    center = center or HalfPlanePoint(0.0, 1.0)
    if report.regime == "Dual":
        return ExtremalWeight(
            params=params, mode="Dual", center=center, phase=phase,
            mults=report.multipliers(),
        )
    consts = derive_constants(params)
    side = "P" if report.regime == "SingleP" else "Q"
    lam = single_bound(params, consts, side).lam
    return ExtremalWeight(
        params=params, mode=report.regime, center=center, phase=phase, lam=lam
    )


def eval_weight(w: ExtremalWeight, z):
    """Value of the weight at z (complex scalar/array or HalfPlanePoint)."""
    d = pseudo_hyperbolic(z, w.center)
    mag = w.profile()(d)
    return np.exp(1j * w.phase) * mag


def weight_norms(
    w: ExtremalWeight, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> tuple[float, float]:
    """(p-norm, q-norm) of the weight under the hyperbolic measure.

    The norm integrals reduce to one dimension: int_0^1 profile(d)^e
    4 pi/(1-d)^2 dd, computed after the substitution s = d/(1-d) which
    flattens the boundary into int_0^inf profile-at-s^e ds.
    """
    prof = w.profile()

    def norm_e(e: float) -> float:
        def f(s):
            d = s / (1.0 + s)
            return prof(d) ** e

        val, err = integrate.quad(
            f, 0.0, np.inf, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol, limit=300
        )
        return (FOUR_PI * val) ** (1.0 / e)

    return norm_e(w.params.p), norm_e(w.params.q)


def measured_distribution(w: ExtremalWeight, t, *, bisect_steps: int = 120):
    """Distribution function of |w| measured geometrically from its profile.

    For each level t the super-level set {|w| > t} is a disc {d < r};
    r is found by a bisection on the monotone profile, run simultaneously
    for all requested levels, and converted through the disc measure
    4 pi r/(1 - r).  This is the measurement route: it never touches the
    analytic distribution formula it is checked against.
    """
    prof = w.profile()
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise ValueError("levels must be nonnegative")

    lo = np.zeros_like(t_arr)
    hi = np.full_like(t_arr, _D_CUTOFF)
    for _ in range(bisect_steps):
        mid = 0.5 * (lo + hi)
        above = prof(mid) > t_arr
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    r = 0.5 * (lo + hi)
    out = FOUR_PI * r / (1.0 - r)
    out = np.where(prof(0.0) > t_arr, out, 0.0)
    saturated = prof(np.full_like(t_arr, _D_CUTOFF)) > t_arr
    out = np.where(saturated, FOUR_PI * _D_CUTOFF / (1.0 - _D_CUTOFF), out)
    if np.asarray(t, dtype=float).ndim == 0:
        return float(out[0])
    return out.reshape(np.asarray(t).shape)


def distribution_matches_solver(
    w: ExtremalWeight, n_samples: int = 200, rtol: float = 1e-4
) -> tuple[bool, float]:
    """Compare the measured distribution of a dual weight against u(t).

    Samples t over the interior of (0, T) and returns (all within rtol,
    worst relative deviation).
    """
    if w.mode != "Dual":
        raise ValueError("distribution comparison applies to dual weights")
    T = w.mults.T
    ts = np.linspace(0.01 * T, 0.99 * T, n_samples)
    measured = measured_distribution(w, ts)
    expected = u_eval(ts, w.mults, w.params)
    rel = np.abs(measured - expected) / expected
    worst = float(np.max(rel))
    return worst <= rtol, worst


def export_weight_grid(w: ExtremalWeight, xs, ys, path: str) -> None:
    """Write the weight on a rectangular grid as CSV (x, y, |F|, Re F, Im F)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    vals = eval_weight(w, X + 1j * Y)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["x", "y", "abs_F", "re_F", "im_F"])
        for i in range(xs.size):
            for j in range(ys.size):
                v = vals[i, j]
                out.writerow(
                    [
                        repr(float(xs[i])),
                        repr(float(ys[j])),
                        repr(float(abs(v))),
                        repr(float(v.real)),
                        repr(float(v.imag)),
                    ]
                )


def export_profile(w: ExtremalWeight, path: str, n: int = 1000) -> None:
    """Write (d, |F|) profile samples as CSV."""
    ds = np.linspace(0.0, 1.0, n, endpoint=False)
    mags = w.profile()(ds)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["d", "abs_F"])
        for d, mv in zip(ds, mags):
            out.writerow([repr(float(d)), repr(float(mv))])


def hyperbolic_circle(z0: HalfPlanePoint, d: float, angles) -> np.ndarray:
    """Points z with d(z, z0) = d, parameterized by angle via the Cayley map.

    Useful for isometry-invariance checks: the weight magnitude must be
    constant along each such circle.
    """
    if not 0.0 <= d < 1.0:
        raise ValueError(f"d must lie in [0, 1), got {d}")
    angles = np.asarray(angles, dtype=float)
    # Cayley transform centred at z0: w = (z - z0)/(z - conj(z0)), |w|^2 = d.
    wv = math.sqrt(d) * np.exp(1j * angles)
    z0c = z0.z
    return (z0c - wv * np.conj(z0c)) / (1.0 - wv)
