"""Kernel functions phi_k, Phi_k, psi_k: closed values, symmetries, ODEs."""

import random
from fractions import Fraction

import mpmath
import pytest
from mpmath import mp, mpc, mpf

from moment_lab import kernels as kn
from moment_lab.errors import DomainError, ParityError
from moment_lab.precision import DEFAULT_CTX as CTX
from moment_lab.specialfn import gauss_2f1

TOL = CTX.tail_tol


def test_phi_half_k2_value():
    # closed form at k = 2: 2 sqrt(pi) (-1) Gamma(1)/Gamma(3/2) = -4
    val = kn.phi_k(Fraction(1, 2), 2).value
    assert abs(val + 4) < TOL * 10


def test_phi_half_closed_form_family():
    for k in (2, 4, 6, 12, 20):
        series = kn.phi_k(Fraction(1, 2), k).value
        closed = kn.phi_k_closed_half(k)
        assert abs(series - closed) < mpf(2) ** (-CTX.prec_bits + 16)


def test_phi_matches_shift_derivative_oracle():
    # phi_k(x) as the v-derivative at 0 of
    # -2 Gamma(k+v) x^v / (Gamma(1+2v) Gamma(k-v)) 2F1(k+v, 1-k+v, 1+2v; x),
    # by central differences in v with one Richardson step.
    x, k = mpf("0.3"), 6

    def bracket(v):
        with mp.workprec(CTX.prec_bits + 96):
            pref = (-2 * mpmath.gamma(k + v) * mpmath.power(x, v)
                    / (mpmath.gamma(1 + 2 * v) * mpmath.gamma(k - v)))
            return pref * gauss_2f1(k + v, 1 - k + v, 1 + 2 * v, x)

    def central(h):
        return (bracket(h) - bracket(-h)) / (2 * h)

    with mp.workprec(CTX.prec_bits + 96):
        d1 = central(mpf(10) ** -6)
        d2 = central(mpf(10) ** -6 / 2)
        richardson = (4 * d2 - d1) / 3
    val = kn.phi_k(x, k).value
    assert abs(val - richardson) < mpf(10) ** -8


def test_phi_reflection_identity_series_both_sides():
    # both sides from the series path directly (no reflection shortcut)
    xs = [Fraction(j, 20) for j in range(1, 20)]
    worst = mpf(0)
    with mp.workprec(CTX.prec_bits + 64):
        for k in (2, 4, 6, 12):
            for xq in xs:
                v1 = kn.phi_k_series_direct(xq, k).value
                v2 = kn.phi_k_series_direct(1 - xq, k).value
                worst = max(worst, abs(v1 - (-1) ** k * v2))
    assert worst <= mpf(2) ** -240


def test_phi_derivative_vanishes_at_half():
    for k in (2, 4, 6, 12):
        _, d1, _ = kn.phi_k_derivatives(Fraction(1, 2), k)
        assert abs(d1) < mpf(10) ** -30


def test_phi_rejects_odd_k_and_bad_domain():
    with pytest.raises(ParityError):
        kn.phi_k(Fraction(1, 3), 5)
    with pytest.raises(DomainError):
        kn.phi_k(Fraction(3, 2), 6)


def test_terminating_2f1_exact_zero_even_k():
    for k in range(2, 42, 2):
        assert gauss_2f1(k, 1 - k, 1, Fraction(1, 2)) == 0


def test_phi_uv_limit_matches_central():
    # v -> 0 limit of the (u=0, v) kernel via Richardson in v
    for k in (6, 8):
        for xq in (Fraction(1, 10), Fraction(3, 10), Fraction(1, 2)):
            x = mpf(xq.numerator) / xq.denominator
            with mp.workprec(CTX.prec_bits + 96):
                def fval(t):
                    p = kn.KernelParams(k, 0, mpc(0, t))
                    return mpmath.re(kn.phi_k_uv(x, p))
                f1 = fval(mpf(10) ** -4)
                f2 = fval(mpf(10) ** -4 / 2)
                lim = (4 * f2 - f1) / 3
            assert abs(lim - kn.phi_k(xq, k).value) < mpf(10) ** -8


def test_phi_uv_small_x_prefactor():
    # leading behavior ~ pref * x^v as x -> 0
    k, u, v = 6, mpf("0.1"), mpc(0, "0.2")
    p = kn.KernelParams(k, u, v)
    x = mpf(10) ** -30
    with mp.workprec(CTX.prec_bits + 96):
        pref = (mpmath.power(2 * mpmath.pi, 2 * u + 1)
                / (2 * mpmath.cos(mpmath.pi * (mpf(1) / 2 + v)))
                * mpmath.gamma(k - u + v)
                / (mpmath.gamma(2 * v + 1) * mpmath.gamma(k + u - v)))
        lead = pref * mpmath.power(x, v)
        got = kn.phi_k_uv_tilde(x, p)
        assert abs(got - lead) / abs(lead) < mpf(10) ** -25


def test_phi_uv_v_symmetry():
    rng = random.Random(5)
    for _ in range(5):
        k = rng.choice((6, 8, 10))
        u = mpf(rng.uniform(-0.4, 0.4))
        v = mpc(0, rng.uniform(0.05, 0.5))
        x = mpf(rng.uniform(0.1, 0.8))
        a = kn.phi_k_uv(x, kn.KernelParams(k, u, v))
        b = kn.phi_k_uv(x, kn.KernelParams(k, u, -v))
        assert abs(a - b) < 64 * TOL * (1 + abs(a))


def test_Phi_small_x_leading_term():
    k = 6
    x = mpf(10) ** -3
    val = kn.Phi_k(x, kn.KernelParams(k)).value
    with mp.workprec(300):
        lead = (2 * mpmath.gamma(k) ** 2 / mpmath.gamma(2 * k)
                * mpmath.power(x, k))
        assert abs(val - lead) / lead < mpf("0.005")


def test_Phi_double_precision_consistency():
    from moment_lab.precision import PrecisionContext
    p = kn.KernelParams(6)
    a = kn.Phi_k(mpf(1) / 2, p, PrecisionContext(prec_bits=128)).value
    b = kn.Phi_k(mpf(1) / 2, p, PrecisionContext(prec_bits=320)).value
    assert abs(a - b) < mpf(2) ** -110


def test_Phi_psi_relation_exact_points():
    # psi_k(l/n) = Phi_k(l/(n+l)) at the central point
    k = 6
    p = kn.KernelParams(k)
    for (l, n) in ((1, 1), (2, 3), (5, 7)):
        a = kn.psi_k(Fraction(l, n), p).value
        b = kn.Phi_k(Fraction(l, n + l), p).value
        assert abs(a - b) < 16 * TOL * (1 + abs(a))


def test_psi_grid_matches_Phi_multiple_k():
    for k in (6, 10):
        p = kn.KernelParams(k)
        for x in (Fraction(1, 10), Fraction(1), Fraction(10)):
            a = kn.psi_k(x, p).value
            b = kn.Phi_k(x / (1 + x), p).value
            assert abs(a - b) < 16 * TOL * (1 + abs(a))


def test_psi_alternating_partial_sums_bracket():
    # partial sums of 2F1(k,k,2k;-x) alternate around the limit for x <= 1
    k = 6
    x = mpf("0.8")
    with mp.workprec(200):
        t = mpf(1)
        s = mpf(1)
        partials = [s]
        for n in range(60):
            t *= mpf((k + n) ** 2) / ((2 * k + n) * (n + 1)) * (-x)
            s += t
            partials.append(s)
        p = kn.KernelParams(k)
        pref = 2 * mpmath.gamma(k) ** 2 / mpmath.gamma(2 * k) * mpmath.power(x, k)
        limit = kn.psi_k(x, p).value / pref
        for i in range(40, 50):
            lo, hi = sorted((partials[i], partials[i + 1]))
            assert lo <= limit <= hi


def test_Phi_x_to_zero_psi_leading():
    k = 6
    x = mpf(10) ** -4
    val = kn.psi_k(x, kn.KernelParams(k)).value
    with mp.workprec(300):
        lead = 2 * mpmath.gamma(k) ** 2 / mpmath.gamma(2 * k) * mpmath.power(x, k)
        assert abs(val - lead) / lead < mpf("0.001")


def test_Phi_monotone_decreasing_in_k():
    # regression sentinel: log-prefactor dominance at fixed x
    for x in (mpf("0.2"), mpf("0.5"), mpf("0.8")):
        vals = [kn.Phi_k(x, kn.KernelParams(k)).value for k in (6, 8, 10, 12)]
        assert all(vals[i + 1] < vals[i] for i in range(len(vals) - 1))


def test_kernels_real_at_central_point():
    p = kn.KernelParams(6)
    for x in (mpf("0.3"), mpf("0.7")):
        assert isinstance(kn.Phi_k(x, p).value, mpf)
        assert isinstance(kn.psi_k(x, p).value, mpf)
        assert isinstance(kn.phi_k(x, 6).value, mpf)


def test_ode_residual_phi():
    assert kn.ode_residual("phi", mpf("0.3"), 6) < mpf(10) ** -60


def test_ode_residual_y_form():
    assert kn.ode_residual("Y_form", mpf("0.25"), 8) < mpf(10) ** -60


def test_ode_residual_Phi_form():
    assert kn.ode_residual("Phi_form", mpf("0.5"), 6) < mpf(10) ** -60


def test_ode_residual_grid():
    for x in (mpf("0.1"), mpf("0.45"), mpf("0.9")):
        for k in (4, 10):
            assert kn.ode_residual("phi", x, k) < mpf(10) ** -60
    for x in (mpf("0.2"), mpf("0.6")):
        assert kn.ode_residual("Y_form", x, 6) < mpf(10) ** -60
        assert kn.ode_residual("Phi_form", x, 8) < mpf(10) ** -60


def test_ode_residual_endpoint_error():
    from moment_lab.errors import EndpointError
    with pytest.raises(EndpointError):
        kn.ode_residual("phi", mpf(10) ** -5, 6)


def test_kernel_params_validation():
    with pytest.raises(DomainError):
        kn.KernelParams(6, 0, mpc(0.2, 0.1))   # Re v != 0
    with pytest.raises(DomainError):
        kn.KernelParams(6, 5.5, 0)             # |Re u| >= k - 1
