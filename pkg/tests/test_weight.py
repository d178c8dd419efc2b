import csv
import math

import numpy as np
import pytest

import wavelock as wl
from wavelock.weight import (
    HalfPlanePoint,
    distribution_matches_solver,
    export_profile,
    export_weight_grid,
    hyperbolic_circle,
)


@pytest.fixture(scope="module")
def dual_weight(ref_params, ref_report):
    return wl.weight_from_report(ref_params, ref_report)


class TestPseudoHyperbolic:
    def test_examples(self):
        i = HalfPlanePoint(0.0, 1.0)
        assert wl.pseudo_hyperbolic(i, i) == 0.0
        assert wl.pseudo_hyperbolic(HalfPlanePoint(0.0, 2.0), i) == pytest.approx(1 / 9, rel=1e-15)
        assert wl.pseudo_hyperbolic(HalfPlanePoint(1.0, 1.0), i) == pytest.approx(1 / 5, rel=1e-15)

    def test_symmetry_and_range(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            z = complex(rng.normal(), rng.uniform(0.01, 10))
            z0 = complex(rng.normal(), rng.uniform(0.01, 10))
            d1 = wl.pseudo_hyperbolic(z, z0)
            d2 = wl.pseudo_hyperbolic(z0, z)
            assert d1 == pytest.approx(d2, rel=1e-12)
            assert 0.0 <= d1 < 1.0

    def test_rejects_lower_half_plane(self):
        with pytest.raises(ValueError):
            wl.pseudo_hyperbolic(complex(0, -1), complex(0, 1))


class TestPsiInverse:
    def test_at_zero_is_T(self, ref_params):
        m = wl.solve_multipliers(ref_params)
        assert wl.psi_inverse(0.0, m, ref_params) == pytest.approx(m.T, rel=1e-12)

    def test_single_multiplier_example(self):
        # forward(t) = t^(-1/2) - 1 at (beta, p, l1, l2) = (1/2, 2, 1, 0),
        # so psi(1) solves t^(-1/2) = 2.
        params = wl.ProblemParams(0.5, 2.0, 4.0, 1.0, 1.0)
        m = wl.multipliers(1.0, 0.0, params)
        assert wl.psi_inverse(1.0, m, params) == pytest.approx(0.25, rel=1e-12)

    def test_round_trips(self, ref_params):
        m = wl.solve_multipliers(ref_params)
        beta, p, q = ref_params.beta, ref_params.p, ref_params.q

        def forward(t):
            return (m.lambda1 * t ** (p - 1) + m.lambda2 * t ** (q - 1)) ** (
                -1.0 / (2 * beta + 1)
            ) - 1.0

        rng = np.random.default_rng(11)
        ts = rng.uniform(1e-4, m.T, size=100)
        s_back = np.array([forward(wl.psi_inverse(forward(t), m, ref_params)) for t in ts[:10]])
        assert np.allclose(s_back, [forward(t) for t in ts[:10]], rtol=1e-10, atol=1e-10)
        t_back = wl.psi_inverse(np.array([forward(t) for t in ts]), m, ref_params)
        assert np.allclose(t_back, ts, rtol=1e-10)

    def test_monotone_decreasing(self, ref_params):
        m = wl.solve_multipliers(ref_params)
        s = np.linspace(0.0, 50.0, 200)
        vals = wl.psi_inverse(s, m, ref_params)
        assert np.all(np.diff(vals) < 0)
        assert wl.psi_inverse(1e8, m, ref_params) < 1e-6


class TestEvalWeight:
    def test_center_value_is_peak(self, dual_weight, ref_report):
        val = wl.eval_weight(dual_weight, dual_weight.center)
        assert abs(val) == pytest.approx(ref_report.T, rel=1e-12)
        assert dual_weight.peak == pytest.approx(ref_report.T, rel=1e-12)

    def test_vanishes_toward_the_boundary(self, dual_weight):
        # Past the floating saturation of d/(1-d) the magnitude is exactly 0;
        # before it, it decays with y.
        assert abs(wl.eval_weight(dual_weight, complex(0.0, 1e-15))) == 0.0
        assert abs(wl.eval_weight(dual_weight, complex(0.0, 1e-13))) < 1e-20
        assert abs(wl.eval_weight(dual_weight, complex(0.0, 1e-4))) < 1e-3

    def test_phase_is_global_constant(self, ref_params, ref_report):
        theta = 1.1
        w0 = wl.weight_from_report(ref_params, ref_report)
        w1 = wl.weight_from_report(ref_params, ref_report, phase=theta)
        zs = np.array([0.3 + 0.8j, -1.0 + 2.0j, 5.0 + 0.1j])
        v0, v1 = wl.eval_weight(w0, zs), wl.eval_weight(w1, zs)
        assert np.allclose(v1, np.exp(1j * theta) * v0, rtol=1e-14)
        assert np.allclose(np.abs(v1), np.abs(v0), rtol=1e-14)

    def test_magnitude_constant_on_hyperbolic_circles(self, dual_weight):
        rng = np.random.default_rng(5)
        for d in (0.1, 0.5, 0.9):
            zs = hyperbolic_circle(dual_weight.center, d, rng.uniform(0, 2 * math.pi, 40))
            mags = np.abs(wl.eval_weight(dual_weight, zs))
            assert np.max(np.abs(mags / mags[0] - 1.0)) < 1e-10

    def test_magnitude_nonincreasing_in_d(self, dual_weight):
        prof = dual_weight.profile()
        ds = np.linspace(0.0, 0.999999, 1000)
        vals = prof(ds)
        assert np.all(np.diff(vals) <= 0)

    def test_off_center_weight(self, ref_params, ref_report):
        center = HalfPlanePoint(2.0, 3.0)
        w = wl.weight_from_report(ref_params, ref_report, center=center)
        val = wl.eval_weight(w, center)
        assert abs(val) == pytest.approx(ref_report.T, rel=1e-12)


class TestWeightNorms:
    def test_dual_weights_hit_budgets(self, dual_weight, ref_params):
        pn, qn = wl.weight_norms(dual_weight)
        assert pn == pytest.approx(ref_params.A, rel=1e-6)
        assert qn == pytest.approx(ref_params.B, rel=1e-6)

    def test_single_p_norms(self):
        params = wl.ProblemParams(0.5, 2.0, 4.0, 1.0, 1.0)
        report = wl.compute_bound(params)
        w = wl.weight_from_report(params, report)
        pn, qn = wl.weight_norms(w)
        consts = wl.derive_constants(params)
        assert pn == pytest.approx(1.0, rel=1e-8)
        assert qn == pytest.approx(consts.r2, rel=1e-8)

    def test_zero_weight(self, ref_params):
        w = wl.ExtremalWeight(
            params=ref_params, mode="SingleP", center=HalfPlanePoint(0.0, 1.0), lam=0.0
        )
        assert wl.weight_norms(w) == (0.0, 0.0)


class TestDistribution:
    def test_matches_solver_u(self, dual_weight):
        ok, worst = distribution_matches_solver(dual_weight)
        assert ok, f"worst relative deviation {worst:.3e}"
        assert worst <= 1e-4

    def test_levels_above_peak_measure_zero(self, dual_weight, ref_report):
        assert wl.measured_distribution(dual_weight, ref_report.T * 1.0001) == 0.0
        assert wl.measured_distribution(dual_weight, ref_report.T * 10) == 0.0


class TestExports:
    def test_profile_csv(self, dual_weight, tmp_path):
        path = tmp_path / "profile.csv"
        export_profile(dual_weight, str(path), n=64)
        rows = list(csv.reader(path.open()))
        assert rows[0] == ["d", "abs_F"]
        assert len(rows) == 65
        mags = [float(r[1]) for r in rows[1:]]
        assert mags[0] == pytest.approx(dual_weight.peak, rel=1e-12)
        assert all(b <= a for a, b in zip(mags, mags[1:]))

    def test_grid_csv(self, dual_weight, tmp_path):
        path = tmp_path / "grid.csv"
        xs = np.linspace(-1, 1, 5)
        ys = np.geomspace(0.5, 2.0, 4)
        export_weight_grid(dual_weight, xs, ys, str(path))
        rows = list(csv.reader(path.open()))
        assert rows[0] == ["x", "y", "abs_F", "re_F", "im_F"]
        assert len(rows) == 1 + 5 * 4
        x, y, mag, re, im = (float(v) for v in rows[1])
        assert mag == pytest.approx(math.hypot(re, im), rel=1e-12)


class TestValidation:
    def test_half_plane_point(self):
        with pytest.raises(ValueError):
            HalfPlanePoint(0.0, 0.0)
        with pytest.raises(ValueError):
            HalfPlanePoint(1.0, -2.0)

    def test_mode_validation(self, ref_params):
        with pytest.raises(ValueError):
            wl.ExtremalWeight(
                params=ref_params, mode="Dual", center=HalfPlanePoint(0, 1)
            )
        with pytest.raises(ValueError):
            wl.ExtremalWeight(
                params=ref_params, mode="Elliptic", center=HalfPlanePoint(0, 1), lam=1.0
            )
