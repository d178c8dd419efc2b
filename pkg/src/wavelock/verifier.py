"""First-principles operator check: transform, localization, power iteration.

The Hardy space is represented on the frequency side, where the analyzing
wavelet is elementary and the positive-frequency constraint is exact.
With the unitary Fourier normalization the transform reads

    Wf(x, y) = sqrt(y) int_0^inf fhat(w) psi_hat(y w) e^{i x w} dw,

and the localization operator with weight F acts as

    (LF f)(w') = sum_{x,y} F Wf sqrt(y) psi_hat(y w') e^{-i x w'} dnu.

The wavelet normalization constant is fixed by requiring the squared
frequency norm against dw/w to equal 1/(2 pi); that is the unique reading
under which the discretized transform is an isometry, and the isometry
defect measured below is the arbiter.

Grid notes: frequency quadrature uses unit-width Gauss panels (plus a
graded head near 0) so the oscillatory factor e^{i x w} stays resolved up
to the largest |x| of the plane grid; the plane grid is uniform in x and
geometric in y with the hyperbolic weights dx dy / y^2 built in.  All
reductions are plain numpy sums (pairwise summation), so results are
deterministic for a given grid.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import gamma as gamma_fn

from .core import FOUR_PI, ProblemParams
from .oracle import run_oracle
from .solver import BoundReport, compute_bound, u_eval
from .weight import ExtremalWeight, eval_weight, weight_from_report


class VerificationError(RuntimeError):
    """A verification run breached one of its tolerances."""


def wavelet_normalization(beta: float) -> float:
    """c_beta = 2^beta / sqrt(2 pi Gamma(2 beta)).

    Chosen so that 2 pi times the squared L^2(dw/w) norm of the frequency
    profile equals one, the condition equivalent to the transform being
    an isometry.
    """
    return 2.0**beta / math.sqrt(2.0 * math.pi * gamma_fn(2.0 * beta))


def cauchy_wavelet_hat(omega, beta: float):
    """Frequency profile c_beta w^beta e^{-w} on w > 0 (0 elsewhere)."""
    w = np.asarray(omega, dtype=float)
    out = np.where(w > 0, wavelet_normalization(beta) * np.abs(w) ** beta * np.exp(-np.abs(w)), 0.0)
    return float(out) if np.isscalar(omega) or w.ndim == 0 else out


def wavelet_norm_check(beta: float) -> float:
    """Quadrature value of 2 pi int |psi_hat|^2 dw/w; equals 1 by design."""
    val, _ = integrate.quad(
        lambda w: cauchy_wavelet_hat(w, beta) ** 2 / w,
        0.0,
        np.inf,
        epsabs=1e-14,
        epsrel=1e-13,
        limit=300,
    )
    return 2.0 * math.pi * val


@dataclass(frozen=True)
class FrequencyGrid:
    """Gauss-type rule on (0, omega_max]: positive increasing nodes."""

    omega: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if np.any(self.omega <= 0) or not np.all(np.diff(self.omega) > 0):
            raise ValueError("frequency nodes must be positive and increasing")
        if np.any(self.weights <= 0):
            raise ValueError("frequency weights must be positive")

    @classmethod
    def default(cls, omega_max: float = 44.0, nodes_per_panel: int = 20) -> "FrequencyGrid":
        """Unit-width Gauss panels with a geometric head toward 0.

        nodes_per_panel = 20 keeps e^{i x w} resolved for |x| up to ~30
        per unit panel; raise it together with the x half-width.
        """
        xg, wg = np.polynomial.legendre.leggauss(nodes_per_panel)
        edges = np.concatenate([[0.0, 1 / 16, 1 / 4, 1.0], np.arange(2.0, omega_max + 0.5)])
        nodes, wts = [], []
        for lo, hi in zip(edges[:-1], edges[1:]):
            mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
            nodes.append(mid + half * xg)
            wts.append(half * wg)
        return cls(np.concatenate(nodes), np.concatenate(wts))

    @property
    def size(self) -> int:
        return self.omega.size

    def inner(self, f: np.ndarray, g: np.ndarray) -> complex:
        """Discrete Hardy inner product <f, g> = sum f conj(g) w."""
        return complex(np.sum(f * np.conj(g) * self.weights))

    def norm(self, f: np.ndarray) -> float:
        return math.sqrt(max(float(np.real(self.inner(f, f))), 0.0))


@dataclass(frozen=True)
class PlaneGrid:
    """Uniform-x, geometric-y sampling of the upper half-plane.

    ``weight_x`` and ``weight_y`` carry the trapezoid factors and the
    hyperbolic density, so sum(field * nu_weights) approximates the
    integral against dnu = dx dy / y^2.
    """

    x: np.ndarray
    y: np.ndarray
    weight_x: np.ndarray
    weight_y: np.ndarray

    def __post_init__(self):
        if np.any(self.y <= 0):
            raise ValueError("plane grid needs y > 0")
        if np.any(self.weight_x <= 0) or np.any(self.weight_y <= 0):
            raise ValueError("plane weights must be positive")

    @classmethod
    def default(
        cls,
        x_half: float = 30.0,
        nx: int = 301,
        y_min: float = 2e-5,
        y_max: float = 40.0,
        ny: int = 280,
    ) -> "PlaneGrid":
        x = np.linspace(-x_half, x_half, nx)
        wx = np.full(nx, x[1] - x[0])
        wx[0] *= 0.5
        wx[-1] *= 0.5
        y = np.geomspace(y_min, y_max, ny)
        h = math.log(y[1] / y[0])
        wy = np.full(ny, h)
        wy[0] *= 0.5
        wy[-1] *= 0.5
        wy = wy / y  # d(ln y)/y realizes dy/y^2
        return cls(x=x, y=y, weight_x=wx, weight_y=wy)

    @property
    def nu_weights(self) -> np.ndarray:
        return np.outer(self.weight_x, self.weight_y)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.y, indexing="ij")

    def describe(self) -> dict:
        return {
            "nx": int(self.x.size),
            "x_half": float(self.x[-1]),
            "ny": int(self.y.size),
            "y_min": float(self.y[0]),
            "y_max": float(self.y[-1]),
        }


class CauchyTransform:
    """Precomputed transform/localization machinery for one grid pair.

    Holds the oscillation matrix e^{i x w} and the scale profiles
    sqrt(y) psi_hat(y w); both transforms are then matrix products.
    """

    def __init__(self, fgrid: FrequencyGrid, pgrid: PlaneGrid, beta: float):
        self.fgrid = fgrid
        self.pgrid = pgrid
        self.beta = beta
        self._E = np.exp(1j * np.outer(pgrid.x, fgrid.omega))
        self._scale = cauchy_wavelet_hat(
            np.outer(pgrid.y, fgrid.omega), beta
        ) * np.sqrt(pgrid.y)[:, None]
        self._wnu = pgrid.nu_weights

    def transform(self, fhat: np.ndarray) -> np.ndarray:
        """Wf on the plane grid, shape (nx, ny)."""
        my = self._scale * (fhat * self.fgrid.weights)[None, :]
        return self._E @ my.T

    def localize(self, F: np.ndarray, fhat: np.ndarray) -> np.ndarray:
        """Frequency-side action of the localization operator with weight F."""
        wf = self.transform(fhat)
        h = F * wf * self._wnu
        s = self._E.conj().T @ h
        return np.sum(self._scale.T * s, axis=1)

    def isometry_defect(self, fhat: np.ndarray) -> float:
        """| ||Wf||^2_nu / ||f||^2 - 1 | for one test vector."""
        wf = self.transform(fhat)
        plane = float(np.sum(np.abs(wf) ** 2 * self._wnu))
        freq = float(np.real(self.fgrid.inner(fhat, fhat)))
        return abs(plane / freq - 1.0)


def wavelet_transform(
    fhat: np.ndarray, fgrid: FrequencyGrid, pgrid: PlaneGrid, beta: float
) -> np.ndarray:
    """One-shot transform; build a :class:`CauchyTransform` for repeated use."""
    return CauchyTransform(fgrid, pgrid, beta).transform(fhat)


def localization_apply(
    F: np.ndarray,
    fhat: np.ndarray,
    fgrid: FrequencyGrid,
    pgrid: PlaneGrid,
    beta: float,
) -> np.ndarray:
    """One-shot operator application (self-adjoint for real F)."""
    return CauchyTransform(fgrid, pgrid, beta).localize(F, fhat)


@dataclass
class PowerIterationResult:
    norm: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)


def operator_norm(
    F: np.ndarray,
    machine: CauchyTransform,
    seed_vector: np.ndarray | None = None,
    tol: float = 1e-8,
    max_iter: int = 600,
) -> PowerIterationResult:
    """Largest eigenvalue of the discretized operator by power iteration.

    For real nonnegative F the operator is self-adjoint and positive in
    the weighted frequency inner product, so the Rayleigh quotients
    increase toward the top eigenvalue; iteration stops when their
    relative change drops below ``tol``.
    """
    fg = machine.fgrid
    if seed_vector is None:
        seed_vector = cauchy_wavelet_hat(fg.omega, machine.beta).astype(complex)
    v = seed_vector / fg.norm(seed_vector)
    history: list[float] = []
    lam_prev = 0.0
    for it in range(1, max_iter + 1):
        lv = machine.localize(F, v)
        lam = float(np.real(fg.inner(lv, v)))
        history.append(lam)
        nrm = fg.norm(lv)
        if nrm == 0.0:
            return PowerIterationResult(0.0, it, True, history)
        v = lv / nrm
        if it > 2 and abs(lam - lam_prev) <= tol * abs(lam):
            return PowerIterationResult(lam, it, True, history)
        lam_prev = lam
    return PowerIterationResult(lam_prev, max_iter, False, history)


def sample_weight(w: ExtremalWeight, pgrid: PlaneGrid) -> np.ndarray:
    """|F| on the plane grid; the phase is removable for norm purposes."""
    X, Y = pgrid.mesh()
    return np.abs(eval_weight(w, X + 1j * Y))


def grid_lebesgue_norm(F: np.ndarray, pgrid: PlaneGrid, e: float) -> float:
    """Discrete L^e(dnu) norm of a field on the plane grid."""
    return float(np.sum(np.abs(F) ** e * pgrid.nu_weights)) ** (1.0 / e)


def feasible_perturbation(
    base: np.ndarray,
    params: ProblemParams,
    pgrid: PlaneGrid,
    rng: np.random.Generator,
) -> np.ndarray:
    """A non-radial bounded modulation of |F|, rescaled inside both budgets."""
    X, _ = pgrid.mesh()
    c1 = rng.uniform(0.2, 0.45)
    c2 = rng.uniform(0.2, 0.45)
    k = rng.uniform(0.8, 2.5)
    Y = pgrid.y[None, :]
    mod = 1.0 + c1 * np.sin(k * X) + c2 * np.cos(0.7 * k * X) * np.tanh(Y - 1.0)
    F = base * np.abs(mod)
    scale = min(
        params.A / grid_lebesgue_norm(F, pgrid, params.p),
        params.B / grid_lebesgue_norm(F, pgrid, params.q),
    )
    return F * scale


def indicator_disc(pgrid: PlaneGrid, measure: float, center: complex = 1j) -> np.ndarray:
    """Indicator of the hyperbolic disc about ``center`` with given nu-measure."""
    r = measure / (FOUR_PI + measure)  # invert 4 pi r/(1-r)
    X, Y = pgrid.mesh()
    Z = X + 1j * Y
    d = np.abs((Z - center) / (Z - np.conj(center))) ** 2
    return (d < r).astype(float)


@dataclass
class VerificationReport:
    """Outcome of the oracle and operator checks for one instance."""

    params: ProblemParams
    regime: str
    bound: float
    oracle_objective: float | None = None
    oracle_rel_gap: float | None = None
    oracle_pointwise_err: float | None = None
    oracle_converged: bool | None = None
    isometry_defects: list = field(default_factory=list)
    operator_norm: float | None = None
    operator_rel_gap: float | None = None
    operator_iterations: int | None = None
    grid: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    wall_time_s: float = 0.0

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failures(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]


# Default acceptance windows for run_verification.
ORACLE_GAP_TOL = 0.01
OPERATOR_LOW = -0.10
OPERATOR_HIGH = 0.02
ISOMETRY_TOL = 1e-3


def default_test_vectors(fgrid: FrequencyGrid) -> list[np.ndarray]:
    """Three concentrated Hardy vectors with distinct shapes and a phase ramp."""
    w = fgrid.omega
    return [
        (w * np.exp(-w)).astype(complex),
        (w**2 * np.exp(-1.5 * w)).astype(complex),
        w * np.exp(-w) * np.exp(1j * w),
    ]


def run_verification(
    params: ProblemParams,
    report: BoundReport | None = None,
    fgrid: FrequencyGrid | None = None,
    pgrid: PlaneGrid | None = None,
    oracle_points: int = 2000,
    skip_operator: bool = False,
    corrupt_weight: bool = False,
    seed: int = 7,
) -> VerificationReport:
    """Check a computed bound against the two independent oracles.

    Runs the discrete variational solver (objective within 1 percent,
    profile pointwise within 2 percent away from the endpoints when the
    instance is dual) and, unless skipped, the direct operator check
    (isometry defect of three test vectors below 1e-3, power-iteration
    norm of the extremal weight within [-10 percent, +2 percent] of the
    bound).  ``corrupt_weight`` is a test hook that inflates the weight
    past its budgets so the operator check must fail.
    """
    t0 = time.perf_counter()
    report = report or compute_bound(params)
    out = VerificationReport(params=params, regime=report.regime, bound=report.bound)

    t_max = 2.0 * report.T if report.T is not None else None
    prob, sol = run_oracle(params, t_max=t_max, n=oracle_points)
    out.oracle_objective = sol.objective
    out.oracle_rel_gap = (report.bound - sol.objective) / report.bound
    out.oracle_converged = sol.converged
    out.checks["oracle_gap"] = abs(out.oracle_rel_gap) <= ORACLE_GAP_TOL
    out.checks["oracle_feasible"] = max(sol.residual_p, sol.residual_q) <= 1e-9
    if report.regime == "Dual":
        m = report.multipliers()
        window = (prob.t > 0.05 * m.T) & (prob.t < 0.9 * m.T)
        u_ref = u_eval(prob.t[window], m, params)
        out.oracle_pointwise_err = float(
            np.max(np.abs(sol.v[window] - u_ref) / u_ref)
        )
        out.checks["oracle_pointwise"] = out.oracle_pointwise_err <= 0.02

    if not skip_operator:
        fgrid = fgrid or FrequencyGrid.default()
        pgrid = pgrid or PlaneGrid.default()
        out.grid = {"n_omega": fgrid.size, **pgrid.describe()}
        machine = CauchyTransform(fgrid, pgrid, params.beta)

        out.isometry_defects = [
            machine.isometry_defect(f) for f in default_test_vectors(fgrid)
        ]
        out.checks["isometry"] = max(out.isometry_defects) <= ISOMETRY_TOL

        w = weight_from_report(params, report)
        F = sample_weight(w, pgrid)
        if corrupt_weight:
            # Test hook: breaks both budget constraints on purpose.
            F = F * 1.5
        power = operator_norm(F, machine)
        out.operator_norm = power.norm
        out.operator_rel_gap = (power.norm - report.bound) / report.bound
        out.operator_iterations = power.iterations
        out.checks["operator_window"] = (
            OPERATOR_LOW <= out.operator_rel_gap <= OPERATOR_HIGH
        ) and power.converged

    out.wall_time_s = time.perf_counter() - t0
    return out


def refinement_ladder(
    params: ProblemParams,
    report: BoundReport,
    levels: int = 3,
    base_nx: int = 81,
    base_ny: int = 72,
    base_nodes: int = 8,
    seed_defect_vector: int = 0,
) -> list[dict]:
    """Isometry defect and bound gap on successively refined grids.

    Each level multiplies the panel node count and both plane resolutions
    by 1.5x; used to demonstrate that both discretization measures shrink
    together.
    """
    rows = []
    for lvl in range(levels):
        f = 1.5**lvl
        fgrid = FrequencyGrid.default(nodes_per_panel=int(base_nodes * f) + 4)
        pgrid = PlaneGrid.default(nx=int(base_nx * f) | 1, ny=int(base_ny * f))
        machine = CauchyTransform(fgrid, pgrid, params.beta)
        defect = machine.isometry_defect(default_test_vectors(fgrid)[seed_defect_vector])
        w = weight_from_report(params, report)
        F = sample_weight(w, pgrid)
        power = operator_norm(F, machine)
        rows.append(
            {
                "level": lvl,
                "defect": defect,
                "gap": abs(power.norm - report.bound) / report.bound,
                "norm": power.norm,
            }
        )
    return rows
