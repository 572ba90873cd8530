"""Liouville-Green machinery: transforms, coefficients, constants, and the
accuracy orders of the approximate kernel evaluators."""

import mpmath
import pytest
from mpmath import mp, mpf

from moment_lab import kernels as kn
from moment_lab import lgreen as lg
from moment_lab.errors import (DomainError, InsufficientPointsError,
                               PoleError, RegimeError)
from moment_lab.precision import DEFAULT_CTX as CTX

OSC = lg.LGCase.OSCILLATORY
EXP = lg.LGCase.EXPONENTIAL
TOL = CTX.tail_tol


def test_transform_midpoint():
    tr = lg.lg_transform(OSC, mpf(1) / 2)
    with mp.workprec(300):
        assert abs(tr.xi - mpmath.pi ** 2 / 4) < TOL * 10


def test_transform_parametric_points():
    with mp.workprec(300):
        for t in (mpf("0.5"), mpf(1)):
            x = mpmath.sin(t / 2) ** 2
            tr = lg.lg_transform(OSC, x)
            assert abs(tr.xi - t * t) < TOL * 100
        for t in (mpf("0.5"), mpf(2)):
            x = 1 / mpmath.cosh(t / 2) ** 2
            tr = lg.lg_transform(EXP, x)
            assert abs(tr.xi - t * t) < TOL * 100


def test_transform_round_trip():
    with mp.workprec(300):
        for case in (OSC, EXP):
            for x in (mpf("0.07"), mpf("0.4"), mpf("0.9")):
                xi = lg.lg_transform(case, x).xi
                assert abs(lg.lg_inverse(case, xi) - x) < TOL * 100


def test_potential_small_xi_limits():
    # Taylor oracle: 1/sin^2(t) = 1/t^2 + 1/3 + O(t^2) and
    # 1/sinh^2(t) = 1/t^2 - 1/3 + O(t^2) give +1/48 for BOTH potentials
    # (confirmed against the transformed ODE residual directly)
    assert abs(lg.lg_potential(OSC, mpf(10) ** -8) - mpf(1) / 48) < mpf(10) ** -6
    assert abs(lg.lg_potential(EXP, mpf(10) ** -8) - mpf(1) / 48) < mpf(10) ** -6


def test_potential_large_xi_exponential():
    with mp.workprec(300):
        v = lg.lg_potential(EXP, mpf(100))
        assert abs(v - mpf(1) / 1600) < mpf(10) ** -8


def test_potential_pole_error():
    with pytest.raises(PoleError):
        lg.lg_potential(OSC, mpmath.pi ** 2 * mpf("1.44"))


def test_coefficients_at_xi2():
    # B0 = 1/(2 pi^2), A1 = -1/16 + 15/(32 pi^2) + lambda1 at xi2 = pi^2/4
    with mp.workprec(300):
        lam = lg.lambda1_oscillatory()
        co = lg.lg_coefficients(OSC, lam, mpmath.pi ** 2 / 4)
        assert abs(co.B0 - 1 / (2 * mpmath.pi ** 2)) < TOL * 100
        expect = -mpf(1) / 16 + 15 / (32 * mpmath.pi ** 2) + lam
        assert abs(co.A1 - expect) < TOL * 100
        assert co.A0 == 1


def test_coefficients_small_xi():
    # cot expansion gives B0 -> 1/24
    with mp.workprec(300):
        co = lg.lg_coefficients(OSC, 0, mpf(10) ** -6)
        assert abs(co.B0 - mpf(1) / 24) < mpf(10) ** -5


def test_coefficients_exponential_limits():
    with mp.workprec(300):
        co = lg.lg_coefficients(EXP, mpf(-1) / 128, mpf(900))
        assert abs(mpmath.sqrt(mpf(900)) * co.B0 - mpf(1) / 8) < mpf("1e-2")
        lam = mpf("0.25")
        co2 = lg.lg_coefficients(EXP, lam, mpf(900))
        assert abs(co2.A1 - (mpf(1) / 128 + lam)) < mpf("1e-2")
        co3 = lg.lg_coefficients(EXP, lam, mpf(10) ** -6)
        assert abs(co3.A1 - lam) < mpf(10) ** -5


def test_derivative_closed_forms_match_numeric():
    with mp.workprec(300):
        for case in (OSC, EXP):
            for xi in (mpf("0.4"), mpf("1.9")):
                assert abs(lg._a1_prime(case, xi)
                           - mpmath.diff(lambda z: lg._a1(case, z, 0), xi)) < mpf(10) ** -60
                assert abs(lg._b0_prime(case, xi)
                           - mpmath.diff(lambda z: lg._b0(case, z), xi)) < mpf(10) ** -60


def test_comparison_function_derivative_relations():
    # d/dxi [sqrt(xi) Y0(u sqrt xi)] = W/(2 xi) - (u / 2 xi) V
    with mp.workprec(300):
        u = mpf(39) / 2
        for xi in (mpf("0.5"), mpf("1.5"), mpf("2.2")):
            W = lambda z: mpmath.sqrt(z) * mpmath.bessely(0, u * mpmath.sqrt(z))
            V = xi * mpmath.bessely(1, u * mpmath.sqrt(xi))
            lhs = mpmath.diff(W, xi)
            rhs = W(xi) / (2 * xi) - (u / (2 * xi)) * V
            assert abs(lhs - rhs) < mpf(10) ** -55


def test_zy_leading_asymptotics():
    # -(-1)^{k/2} Z_Y(xi2) sqrt(u) -> 1 + (lambda1 - 1/16)/u^2 + O(u^-4)
    with mp.workprec(300):
        lam = lg.lambda1_oscillatory()
        for k in (20, 40, 80):
            u = mpf(2 * k - 1) / 2
            zy = lg.lg_constants(k).Z_Y_at_xi2
            sign = -1 if (k // 2) % 2 else 1
            lead = -sign * zy * mpmath.sqrt(u)
            predicted = 1 + (lam - mpf(1) / 16) / u**2
            assert abs(lead - predicted) < 2 / u**4 * 100


def test_ck_approaches_four():
    assert abs(lg.lg_constants(6).C_K - 4) < mpf("0.2")
    assert abs(lg.lg_constants(60).C_K - 4) < mpf("0.02")


def test_ck_one_over_k_rate():
    # fit |C_K - 4| <= C/k on {8..24}, verify on a disjoint k-set
    with mp.workprec(200):
        C = max(abs(lg.lg_constants(k).C_K - 4) * k for k in (8, 12, 16, 20, 24))
        for k in (32, 48, 72):
            assert abs(lg.lg_constants(k).C_K - 4) <= C / k


def test_cy_approaches_minus_two_pi():
    with mp.workprec(200):
        assert abs(lg.lg_constants(80).C_Y + 2 * mpmath.pi) < 1


def test_cj_decay_exponent():
    with mp.workprec(300):
        ks = [12, 16, 24, 32, 48, 64, 96]
        pts = []
        for k in ks:
            cj = abs(lg.lg_constants(k).C_J)
            pts.append((mpmath.log(k), mpmath.log(cj)))
        n = len(pts)
        sx = sum(p[0] for p in pts)
        sy = sum(p[1] for p in pts)
        sxx = sum(p[0] ** 2 for p in pts)
        sxy = sum(p[0] * p[1] for p in pts)
        slope = (n * sxy - sx * sy) / (n * sxx - sx**2)
        assert slope <= mpf("-4.5")


def test_cj_degrades_with_perturbed_lambda1():
    # the integration constant is the unique value recovering O(k^-5)
    with mp.workprec(300):
        lam_bad = lg.lambda1_oscillatory() + mpf(1) / 10
        ks = [16, 32, 64]
        pts = []
        for k in ks:
            cj = abs(lg.lg_constants(k, lambda1_osc=lam_bad).C_J)
            pts.append((mpmath.log(k), mpmath.log(cj)))
        n = len(pts)
        sx = sum(p[0] for p in pts)
        sy = sum(p[1] for p in pts)
        sxx = sum(p[0] ** 2 for p in pts)
        sxy = sum(p[0] * p[1] for p in pts)
        slope = (n * sxy - sx * sy) / (n * sxx - sx**2)
        assert slope > mpf("-4")


def test_exactness_at_xi2_series_vs_closed_form():
    # partial sums are exact at xi2: the C_Y normalization reproduces the
    # closed half-point value, so the series evaluation must match it
    with mp.workprec(300):
        for k in range(2, 202, 2):
            series = kn.phi_k(mpmath.mpf(1) / 2, k).value
            closed = kn.phi_k_closed_half(k)
            assert abs(series - closed) < mpf(2) ** (-CTX.prec_bits + 16)


def test_approx_phi_within_envelope():
    a = lg.lg_approx_phi(mpf("0.25"), 40, N=1)
    e = kn.phi_k(mpf("0.25"), 40).value
    assert abs(a.value - e) <= a.error_envelope


def test_approx_phi_error_shrinks_toward_xi2():
    # epsilon carries sqrt(xi2 - xi): approaching x = 1/2 the Y-side error
    # dies; the J-side floor is ~|C_J| and stays far below
    with mp.workprec(300):
        errs = []
        for x in (mpf("0.40"), mpf("0.49")):
            a = lg.lg_approx_phi(x, 40, N=1)
            errs.append(abs(a.value - kn.phi_k(x, 40).value))
        assert errs[1] < errs[0]


def test_approx_phi_matches_closed_form_at_half():
    with mp.workprec(300):
        for k in (20, 40):
            a = lg.lg_approx_phi(mpf(1) / 2, k, N=1)
            closed = kn.phi_k_closed_half(k)
            assert abs(a.value - closed) <= a.error_envelope


def test_approx_phi_regime_error():
    with pytest.raises(RegimeError):
        lg.lg_approx_phi(mpf(10) ** -8, 20, N=1)


def test_approx_Phi_within_envelope():
    for (k, x) in ((40, mpf("0.5")), (20, mpf("0.3")), (40, mpf("0.8"))):
        a = lg.lg_approx_Phi(x, k, N=1)
        e = kn.Phi_k(x, kn.KernelParams(k)).value
        assert abs(a.value - e) <= a.error_envelope


def test_approx_Phi_positive():
    for x in (mpf("0.2"), mpf("0.5"), mpf("0.9")):
        for k in (20, 40):
            assert lg.lg_approx_Phi(x, k, N=1).value > 0


def test_approx_Phi_exponential_decay_shape():
    # value at x = l/(l+1) consistent with an exp(-c k / sqrt(l)) envelope
    with mp.workprec(300):
        l = 4
        x = mpf(l) / (l + 1)
        xi = lg.lg_transform(EXP, x).xi
        vals = []
        for k in (20, 40, 80):
            vals.append(lg.lg_approx_Phi(x, k, N=1).value)
        # consecutive ratio ~ exp(-(u2-u1) sqrt(xi))
        for (k1, k2, v1, v2) in ((20, 40, vals[0], vals[1]),
                                 (40, 80, vals[1], vals[2])):
            predicted = mpmath.exp(-(k2 - k1) * mpmath.sqrt(xi))
            ratio = v2 / v1
            assert predicted / 3 < ratio < predicted * 3


def test_error_orders_oscillatory():
    s1 = lg.error_order_fit(OSC, 1, [20, 40, 80, 160], mpf("0.3"))
    assert abs(s1 + 3) < mpf("0.3")
    s0 = lg.error_order_fit(OSC, 0, [20, 40, 80, 160], mpf("0.3"))
    assert abs(s0 + 1) < mpf("0.3")


def test_error_orders_exponential():
    s1 = lg.error_order_fit(EXP, 1, [20, 40, 80], mpf("0.5"))
    assert abs(s1 + 3) < mpf("0.3")
    s0 = lg.error_order_fit(EXP, 0, [20, 40, 80], mpf("0.6"))
    assert abs(s0 + 1) < mpf("0.3")


def test_error_order_needs_three_points():
    with pytest.raises(InsufficientPointsError):
        lg.error_order_fit(OSC, 1, [20, 40], mpf("0.3"))


def test_envelope_verification_on_disjoint_grid():
    # constants are fitted on k in {20, 40}; check the envelope still
    # dominates on weights and x-points outside the calibration set
    for k in (28, 56):
        for x in (mpf("0.17"), mpf("0.33"), mpf("0.47")):
            a = lg.lg_approx_phi(x, k, N=1)
            e = kn.phi_k(x, k).value
            assert abs(a.value - e) <= a.error_envelope
        for x in (mpf("0.26"), mpf("0.62")):
            aP = lg.lg_approx_Phi(x, k, N=1)
            eP = kn.Phi_k(x, kn.KernelParams(k)).value
            assert abs(aP.value - eP) <= aP.error_envelope


def test_constants_domain_checks():
    with pytest.raises(DomainError):
        lg.lg_constants(7)
    with pytest.raises(DomainError):
        lg.lg_approx_phi(mpf("0.3"), 20, N=2)
