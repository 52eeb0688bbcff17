"""Closed-form orbit tests: classification, residuals, periods, windows."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doublewell import orbits as ob
from doublewell.errors import DomainError, NonPeriodicError, WindowError
from doublewell.reduced import ReducedParams, StateQP, hamiltonian_qp, integrate

# (q0, zeta) spanning all three periodic classes; beating q0 kept inside
# the invariant circle q0 <= sqrt(1 + zeta).
ORBIT_CASES = [
    (1.0, 0.0), (0.45, 0.0), (0.8, 0.0),
    (0.2, -0.5), (0.45, -0.5), (0.65, -0.5),
    (0.3, -0.1), (0.6, -0.1), (0.9, -0.1),
    (0.5, 0.2), (0.7, 0.2), (1.0, 0.2),
    (0.7, 0.4), (0.9, 0.4), (1.05, 0.4),
    (0.33, 0.2), (0.38, 0.2), (0.43, 0.2), (0.25, 0.2),
    (0.46, 0.4), (0.55, 0.4), (0.62, 0.4), (0.3, 0.4),
]


def orbit_params(zeta):
    return ReducedParams.from_zeta(1.0, zeta)


class TestClassify:
    def test_examples(self):
        assert ob.classify(1.0, -0.5) is ob.OrbitClass.NONLINEAR_BEATING
        assert ob.classify(math.sqrt(0.2), 0.2) is ob.OrbitClass.SEPARATRIX
        assert ob.classify(0.35, 0.2) is ob.OrbitClass.SELF_TRAPPED
        assert ob.classify(0.5, 0.2) is ob.OrbitClass.JOSEPHSON
        assert ob.classify(math.sqrt(0.1), 0.2) is ob.OrbitClass.FIXED_POINT
        assert ob.classify(0.0, 0.2) is ob.OrbitClass.FIXED_POINT
        assert ob.classify(0.0, -0.3) is ob.OrbitClass.FIXED_POINT

    def test_inner_turning_points_are_self_trapped(self):
        assert ob.classify(0.1, 0.2) is ob.OrbitClass.SELF_TRAPPED

    @given(
        q0=st.floats(min_value=0.0, max_value=1.5),
        zeta=st.floats(min_value=-0.9, max_value=0.9),
    )
    @settings(max_examples=300)
    def test_total_partition(self, q0, zeta):
        cls = ob.classify(q0, zeta)
        assert isinstance(cls, ob.OrbitClass)

    def test_negative_q0_rejected(self):
        with pytest.raises(DomainError):
            ob.classify(-0.1, 0.2)


class TestBuild:
    def test_closed_case(self):
        # The degenerate-modulus orbit: k = 0, w = sqrt(2), T = sqrt(2) pi.
        orb = ob.build(1.0, 0.0)
        assert orb.k == 0.0
        assert orb.omega == pytest.approx(math.sqrt(2.0), rel=1e-15)
        assert orb.T_tau == pytest.approx(math.sqrt(2.0) * math.pi, rel=1e-14)

    def test_rejects_non_periodic(self):
        with pytest.raises(NonPeriodicError):
            ob.build(math.sqrt(0.2), 0.2)
        with pytest.raises(NonPeriodicError):
            ob.build(0.0, -0.5)

    def test_rejects_outside_invariant_circle(self):
        with pytest.raises(DomainError):
            ob.build(1.2, 0.0)

    def test_period_decreasing_in_q0(self):
        zeta = 0.2
        q0s = np.linspace(math.sqrt(zeta) * 1.02, 1.05, 15)
        Ts = [ob.build(float(q), zeta).T_tau for q in q0s]
        assert np.all(np.diff(Ts) < 0)

    @pytest.mark.parametrize("q0,zeta", ORBIT_CASES)
    def test_modulus_below_one(self, q0, zeta):
        assert 0.0 <= ob.build(q0, zeta).k < 1.0


class TestEval:
    @pytest.mark.parametrize("q0,zeta", ORBIT_CASES)
    def test_starts_at_turning_point(self, q0, zeta):
        orb = ob.build(q0, zeta)
        q, p = ob.eval_orbit(orb, 0.0)
        assert q == pytest.approx(q0 * (1 if orb.sign > 0 else -1), rel=1e-13)
        assert abs(p) < 1e-13

    @pytest.mark.parametrize("q0,zeta", ORBIT_CASES)
    def test_periodicity(self, q0, zeta):
        orb = ob.build(q0, zeta)
        q, p = ob.eval_orbit(orb, orb.T_tau)
        assert abs(q - orb.q0) < 1e-10 and abs(p) < 1e-10

    @pytest.mark.parametrize("q0,zeta", ORBIT_CASES)
    def test_qdot_relation_residual(self, q0, zeta):
        orb = ob.build(q0, zeta)
        taus = np.linspace(0.0, orb.T_tau, 1000)
        q, p = ob.eval_orbit(orb, taus)
        qdot = (1 + q * q) * p
        rhs = (1 + q * q) * (q0**2 - q * q) * (q * q + q0**2 - zeta)
        assert np.max(np.abs(qdot**2 - rhs)) < 1e-8

    @pytest.mark.parametrize("q0,zeta", ORBIT_CASES)
    def test_energy_constant(self, q0, zeta):
        orb = ob.build(q0, zeta)
        P = orbit_params(zeta)
        taus = np.linspace(0.0, orb.T_tau, 1000)
        q, p = ob.eval_orbit(orb, taus)
        H = 0.5 * (1 + q * q) * p * p + 0.5 * (q * q - zeta / 2) ** 2
        scale = max(abs(H[0]), 1e-3)
        assert np.max(np.abs(H - H[0])) / scale < 1e-10

    @pytest.mark.parametrize("q0,zeta", ORBIT_CASES[:8])
    def test_time_reversal_symmetry(self, q0, zeta):
        orb = ob.build(q0, zeta)
        taus = np.linspace(0.0, orb.T_tau, 503)
        q1, p1 = ob.eval_orbit(orb, taus)
        q2, p2 = ob.eval_orbit(orb, orb.T_tau - taus)
        assert np.max(np.abs(q1 - q2)) < 1e-10
        assert np.max(np.abs(p1 + p2)) < 1e-10

    def test_self_trapped_sign_branch(self):
        orb = ob.build(0.55, 0.4, sign=-1)
        q, _ = ob.eval_orbit(orb, 0.0)
        assert q == pytest.approx(-0.55, rel=1e-14)

    def test_matches_integration_oracle(self):
        orb = ob.build(0.7, 0.2)
        P = orbit_params(0.2)
        traj = integrate(StateQP(0.7, 0.0), P, orb.T_tau, tol=1e-12, n_samples=800)
        qe, pe = ob.eval_orbit(orb, traj.t)
        dev = np.max(np.hypot(qe - traj.y[:, 0], pe - traj.y[:, 1]))
        assert dev < 1e-6


class TestReturnTime:
    @pytest.mark.parametrize("q0,zeta", ORBIT_CASES)
    def test_period_against_integration(self, q0, zeta):
        orb = ob.build(q0, zeta)
        T_ret = ob.return_time(orb, orbit_params(zeta), tol=1e-12)
        assert abs(T_ret - orb.T_tau) / orb.T_tau < 1e-6


class TestWindow:
    def test_supercritical_window(self):
        P = ReducedParams.from_zeta(1.0, 0.02)
        lo, hi = ob.admissible_q0_window(P)
        assert lo == pytest.approx(math.sqrt(0.03), rel=1e-14)
        assert hi == 1.0
        k_lo = ob.build(lo * (1 + 1e-9), 0.02).k
        assert k_lo <= 7 / 8

    def test_zeta_zero_moduli(self):
        P = ReducedParams.from_zeta(1.0, 0.0)
        lo, hi = ob.admissible_q0_window(P)
        assert lo == 0.0 and hi == 1.0
        for q0 in np.linspace(0.05, 1.0, 9):
            orb = ob.build(float(q0), 0.0)
            assert orb.k < math.sqrt(0.5) + 1e-12

    def test_subcritical_nonempty(self):
        P = ReducedParams.from_zeta(1.0, -0.4)
        lo, hi = ob.admissible_q0_window(P)
        assert lo == 0.0 and hi == pytest.approx(math.sqrt(0.6), rel=1e-14)

    def test_empty_window_raises(self):
        P = ReducedParams.from_zeta(1.0, 0.9)
        with pytest.raises(WindowError):
            ob.admissible_q0_window(P, q0_max=0.5)


class TestAmplitudeReport:
    def test_scaling_orders(self):
        # admissible supercritical orbit: |alpha|,|beta| = O(sigma^1/2), A = O(sigma^gamma/2)
        sigma, gamma = 1e-3, 0.8
        P = ReducedParams.from_scaling(sigma, gamma)
        lo, _ = ob.admissible_q0_window(P)
        orb = ob.build(1.2 * lo, P.zeta)
        rep = ob.amplitude_report(orb, P)
        assert 0.3 < rep.max_abs_alpha / sigma**0.5 < 3.0
        assert 0.3 < rep.max_abs_beta / sigma**0.5 < 3.0
        assert 0.3 < rep.max_A / sigma ** (gamma / 2) < 3.0

    def test_alpha_max_at_start(self):
        P = ReducedParams.from_zeta(1.0, 0.2)
        orb = ob.build(0.8, 0.2)
        rep = ob.amplitude_report(orb, P)
        al0, _, _ = ob.mode_amplitudes(orb, P, 0.0)
        assert rep.max_abs_alpha == pytest.approx(abs(al0), rel=1e-9)

    def test_extrema_match_integration(self):
        P = ReducedParams.from_zeta(1.0, 0.2)
        orb = ob.build(0.8, 0.2)
        rep = ob.amplitude_report(orb, P)
        from doublewell.reduced import StateABA
        al0, be0, A0 = ob.mode_amplitudes(orb, P, 0.0)
        traj = integrate(
            StateABA(float(al0), float(be0), float(A0)),
            P,
            orb.T_tau / P.omega10,
            tol=1e-12,
            n_samples=8192,
        )
        assert rep.max_abs_alpha == pytest.approx(np.max(np.abs(traj.y[:, 0])), abs=1e-8)
        assert rep.min_A == pytest.approx(np.min(traj.y[:, 2]), abs=1e-8)


class TestPeriodScaling:
    def test_log_log_slope(self):
        gamma = 0.8
        sigmas = [1e-2, 1e-3, 1e-4]
        Ts = []
        for s in sigmas:
            P = ReducedParams.from_scaling(s, gamma)
            lo, _ = ob.admissible_q0_window(P)
            orb = ob.build(lo * (1 + 1e-9), P.zeta)
            Ts.append(ob.period_t(orb, P))
        slope = np.polyfit(np.log(sigmas), np.log(Ts), 1)[0]
        assert abs(slope - (-(1 + gamma) / 2)) < 0.05

    def test_degenerate_modulus_period(self):
        orb = ob.build(1.0, 0.0)
        P = ReducedParams.from_zeta(0.5, 0.0)
        assert ob.period_t(orb, P) == pytest.approx(2 * math.pi / (orb.omega * 0.5), rel=1e-13)

    def test_near_separatrix_flag(self):
        P = ReducedParams.from_scaling(1e-3, 0.8)
        near = ob.build(math.sqrt(P.zeta) * 1.0001, P.zeta)
        rep = ob.period_scaling_check(P, near, cap=10.0)
        lo, _ = ob.admissible_q0_window(P)
        good = ob.build(1.2 * lo, P.zeta)
        rep_good = ob.period_scaling_check(P, good, cap=10.0)
        assert rep.ratio > rep_good.ratio
