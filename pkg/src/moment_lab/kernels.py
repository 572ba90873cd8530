"""The three hypergeometric kernels of the second-moment convolution formula.

Central-point kernel (k even, 0 < x < 1):

    phi_k(x) = -2 log(x) F(x) + sum_{n<k} c_n d_n x^n
               + 2 (-1)^k sum_{n>=k} C(n) x^n,

with F(x) = 2F1(k, 1-k, 1; x) (a reversed Legendre polynomial),
c_n = (-1)^n Gamma(k+n) / (Gamma(k-n) n!^2),
d_n = 4 H_n - 2 H_{k+n-1} - 2 H_{k-n-1}  (Euler constants cancel exactly),
C(n) = Gamma(n+k) Gamma(n-k+1) / Gamma(n+1)^2.

The polynomial block is assembled in exact big rationals and rounded once:
its coefficients alternate with huge magnitudes, so any floating assembly
would cancel catastrophically.  The tail has positive terms with ratio <= x,
hence a certified geometric remainder; the series path is restricted to
x <= 1/2 and the reflection phi_k(x) = (-1)^k phi_k(1-x) covers the rest.

General-parameter kernels (Re v = 0, |Re u| < k-1):

    phi_k(x; u, v)  = tilde(x; u, v) + tilde(x; u, -v)
    Phi_k(x; u, v)  = 2 (2 pi)^{2u} G(k,u,v) sin(pi(1/2+u)) x^k (1-x)^{-u}
                      2F1(k-u+v, k-u-v, 2k; x)
    psi_k(x; u, v)  = same prefactor with sin(pi(1/2+v)), argument -x,
                      evaluated through the Pfaff map -x -> x/(1+x) so the
                      series always converges (this map is also the exact
                      identity psi_k(l/n) = Phi_k(l/(n+l)) at u = v = 0).

Gamma ratios ~ 4^{-k} are carried in log space throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp, mpc, mpf

from .errors import (ConvergenceError, DomainError, EndpointError,
                     ParityError, PoleError)
from .precision import DEFAULT_CTX, PrecisionContext, to_fraction
from .specialfn import hyp2f1_series

SERIES_TERM_CAP = 10**6


@dataclass(frozen=True)
class KernelParams:
    """(k, u, v) with weight 2k; Re v = 0; |Re u| + |Re v| < k - 1."""

    k: int
    u: object = 0
    v: object = 0

    def __post_init__(self):
        if int(self.k) < 1:
            raise DomainError("KernelParams requires k >= 1")
        object.__setattr__(self, "k", int(self.k))
        u = mpmath.mpmathify(self.u)
        v = mpmath.mpmathify(self.v)
        if mpmath.re(v) != 0:
            raise DomainError("KernelParams requires Re v = 0")
        if abs(mpmath.re(u)) + abs(mpmath.re(v)) >= self.k - 1:
            raise DomainError("KernelParams outside |Re u| + |Re v| < k - 1")


@dataclass(frozen=True)
class KernelValue:
    x: object
    value: object
    tail_bound: object
    slow: bool = False


@lru_cache(maxsize=64)
def _phi_poly_coeffs(k: int):
    """Exact (c_n, d_n) for n < k and the first tail coefficient C(k)."""
    H = [Fraction(0)] * (2 * k)
    for i in range(1, 2 * k):
        H[i] = H[i - 1] + Fraction(1, i)
    c = []
    d = []
    cn = Fraction(1)
    for n in range(k):
        c.append(cn)
        d.append(4 * H[n] - 2 * H[k + n - 1] - 2 * H[k - n - 1])
        cn *= Fraction(-(k + n) * (k - n - 1), (n + 1) ** 2)
    Ck = Fraction(math.factorial(2 * k - 1), math.factorial(k) ** 2)
    return tuple(c), tuple(d), Ck


def _phi_tail_sums(k: int, xq: Fraction, tol, orders=(0,)):
    """Tail sums sum_{n>=k} C(n) w(n) x^n for w in {1, n, n(n-1)}.

    All terms are positive; the stopping bound uses the worst weighted term
    ratio, so each returned (sum, bound) pair is certified.
    """
    _, _, Ck = _phi_poly_coeffs(k)
    x = mpf(xq.numerator) / xq.denominator
    t = (mpf(Ck.numerator) / Ck.denominator) * x**k
    sums = {o: mpf(0) for o in orders}
    n = k
    while True:
        for o in orders:
            w = 1 if o == 0 else (n if o == 1 else n * (n - 1))
            sums[o] += t * w
        ratio = x * mpf((n + k) * (n - k + 1)) / (n + 1) ** 2
        wratio = mpf(n + 1) / max(n - 1, 1)   # covers the n(n-1) weight
        r = ratio * wratio
        if n > k + 4 and r < 1:
            # remainder starts at the first omitted term t_{n+1} w(n+1)
            worst = t * ratio * (n + 1) * n / (1 - r)
            if worst < tol:
                bounds = {o: t * ratio * (1 if o == 0 else (n + 1) if o == 1
                                          else (n + 1) * n) / (1 - r)
                          for o in orders}
                return sums, bounds, n
        t *= ratio
        n += 1
        if n - k > SERIES_TERM_CAP:
            raise ConvergenceError("phi_k tail exceeded the term cap",
                                   slow_convergence=True)


def _phi_pieces(x, k: int, ctx: PrecisionContext, derivs: bool,
                reflect: bool = True):
    """phi_k and (optionally) its first two derivatives at exact rational x."""
    xq = to_fraction(x)
    if not (0 < xq < 1):
        raise DomainError("phi_k requires 0 < x < 1")
    if reflect and xq > Fraction(1, 2):
        inner = _phi_pieces(1 - xq, k, ctx, derivs)
        sign = 1 if k % 2 == 0 else -1
        val, d1, d2, tail = inner
        return (sign * val,
                None if d1 is None else -sign * d1,
                None if d2 is None else sign * d2,
                tail)
    c, d, _ = _phi_poly_coeffs(k)
    # exact rational assembly of the polynomial blocks
    xpow = [Fraction(1)]
    for _ in range(k - 1):
        xpow.append(xpow[-1] * xq)
    F = sum(c[n] * xpow[n] for n in range(k))
    P = sum(c[n] * d[n] * xpow[n] for n in range(k))
    F1 = sum(n * c[n] * xpow[n - 1] for n in range(1, k))
    P1 = sum(n * c[n] * d[n] * xpow[n - 1] for n in range(1, k))
    if derivs:
        F2 = sum(n * (n - 1) * c[n] * xpow[n - 2] for n in range(2, k))
        P2 = sum(n * (n - 1) * c[n] * d[n] * xpow[n - 2] for n in range(2, k))

    orders = (0, 1, 2) if derivs else (0,)
    # push the tail to the working precision floor, not just tail_tol: the
    # polynomial block is exact, so the tail is the only truncation source
    tail_tol = min(ctx.tail_tol, mpmath.ldexp(1, -(mp.prec - 16)))
    tails, tbounds, _ = _phi_tail_sums(k, xq, tail_tol, orders)
    sgn = 1 if k % 2 == 0 else -1

    xm = mpf(xq.numerator) / xq.denominator
    lx = mpmath.log(xm)
    Fm = mpf(F.numerator) / F.denominator
    Pm = mpf(P.numerator) / P.denominator
    val = -2 * lx * Fm + Pm + 2 * sgn * tails[0]
    d1 = d2 = None
    if derivs:
        F1m = mpf(F1.numerator) / F1.denominator
        P1m = mpf(P1.numerator) / P1.denominator
        F2m = mpf(F2.numerator) / F2.denominator
        P2m = mpf(P2.numerator) / P2.denominator
        d1 = -2 * Fm / xm - 2 * lx * F1m + P1m + 2 * sgn * tails[1] / xm
        d2 = (2 * Fm / xm**2 - 4 * F1m / xm - 2 * lx * F2m + P2m
              + 2 * sgn * tails[2] / xm**2)
    tail_bound = 2 * max(tbounds.values())
    return val, d1, d2, tail_bound


def _phi_extra_bits(x, k: int) -> int:
    """Guard bits for the cancellation between the exact polynomial block
    and the tail: both grow like (4x)^k while phi_k itself stays O(log x)."""
    xq = to_fraction(x)
    xq = min(xq, 1 - xq)
    if xq <= Fraction(1, 4):
        return 64
    return 64 + int(k * math.log2(float(4 * xq))) + 16


def phi_k(x, k: int, ctx: PrecisionContext = DEFAULT_CTX) -> KernelValue:
    """Central-point kernel phi_k(x) for even k, 0 < x < 1."""
    if k < 2:
        raise DomainError("phi_k requires k >= 2")
    if k % 2 != 0:
        raise ParityError("phi_k at the central point needs even k; "
                          "odd k is reachable only through phi_k_uv")
    with ctx.working(extra=_phi_extra_bits(x, k)):
        val, _, _, tail = _phi_pieces(x, k, ctx, derivs=False)
        return KernelValue(x=x, value=+val, tail_bound=+tail)


def phi_k_series_direct(x, k: int, ctx: PrecisionContext = DEFAULT_CTX):
    """phi_k from the series at any x in (0, 1), never reflecting.

    Verification path: lets tests check the reflection identity with both
    sides computed independently.  Slower than phi_k for x near 1 (the tail
    ratio approaches x).
    """
    if k % 2 != 0:
        raise ParityError("phi_k series path needs even k")
    xq = to_fraction(x)
    extra = 64 if xq <= Fraction(1, 4) else 64 + int(k * math.log2(float(4 * xq))) + 16
    with ctx.working(extra=extra):
        val, _, _, tail = _phi_pieces(x, k, ctx, derivs=False, reflect=False)
        return KernelValue(x=x, value=+val, tail_bound=+tail)


def phi_k_derivatives(x, k: int, ctx: PrecisionContext = DEFAULT_CTX):
    """(phi, phi', phi'') by term-wise analytic differentiation."""
    if k % 2 != 0:
        raise ParityError("phi_k derivative path needs even k")
    with ctx.working(extra=_phi_extra_bits(x, k)):
        val, d1, d2, _ = _phi_pieces(x, k, ctx, derivs=True)
        return +val, +d1, +d2


def phi_k_closed_half(k: int, ctx: PrecisionContext = DEFAULT_CTX):
    """Closed form 2 sqrt(pi) (-1)^{k/2} Gamma(k/2) / Gamma((k+1)/2)."""
    if k % 2 != 0:
        raise ParityError("closed form needs even k")
    with ctx.working():
        sign = -1 if (k // 2) % 2 else 1
        return (2 * mpmath.sqrt(mpmath.pi) * sign
                * mpmath.gamma(mpf(k) / 2) / mpmath.gamma(mpf(k + 1) / 2))


def phi_k_uv_tilde(x, p: KernelParams, ctx: PrecisionContext = DEFAULT_CTX):
    """One summand tilde-phi_k(x; u, v); phi_k(x;u,v) symmetrizes over +-v."""
    k, u, v = p.k, mpmath.mpmathify(p.u), mpmath.mpmathify(p.v)
    if v == 0:
        raise DomainError("tilde kernel requires v != 0 (use phi_k at v = 0)")
    with ctx.working(extra=96):
        xv = mpmath.mpmathify(x)
        if not (0 < mpmath.re(xv) < 1) or mpmath.im(xv) != 0:
            raise DomainError("phi_k_uv requires real x in (0, 1)")
        one = mpf(1)
        cosf = 2 * mpmath.cos(mpmath.pi * (one / 2 + v))
        if abs(cosf) == 0:
            raise PoleError("phi_k_uv prefactor pole: cos(pi(1/2+v)) = 0")
        logpref = ((2 * u + 1) * mpmath.log(2 * mpmath.pi)
                   + mpmath.loggamma(k - u + v)
                   - mpmath.loggamma(2 * v + 1) - mpmath.loggamma(k + u - v))
        pref = mpmath.exp(logpref) / cosf
        body = (mpmath.power(xv, v) * mpmath.power(1 - xv, -u))
        f, _, _, _ = hyp2f1_series(k - u + v, 1 - k - u + v, 1 + 2 * v, xv,
                                   ctx, max_terms=SERIES_TERM_CAP)
        return pref * body * f


def phi_k_uv(x, p: KernelParams, ctx: PrecisionContext = DEFAULT_CTX):
    """General-parameter kernel phi_k(x; u, v) (two-term +-v sum)."""
    with ctx.working(extra=96):
        pm = KernelParams(p.k, p.u, -mpmath.mpmathify(p.v))
        return phi_k_uv_tilde(x, p, ctx) + phi_k_uv_tilde(x, pm, ctx)


def _log_gamma_ratio(k: int, u, v, ctx: PrecisionContext):
    """log[ Gamma(k-u+v) Gamma(k-u-v) / Gamma(2k) ]."""
    return (mpmath.loggamma(k - u + v) + mpmath.loggamma(k - u - v)
            - mpmath.loggamma(2 * k))


def Phi_k(x, p: KernelParams, ctx: PrecisionContext = DEFAULT_CTX) -> KernelValue:
    """Exponentially-decaying kernel Phi_k(x; u, v) on 0 < x < 1.

    Raises ConvergenceError(slow_convergence=True) past the series cap;
    the `slow` flag is set (without failing) once x > 0.99 so callers can
    switch to the Liouville-Green evaluator.
    """
    k, u, v = p.k, mpmath.mpmathify(p.u), mpmath.mpmathify(p.v)
    with ctx.working(extra=96):
        xv = mpmath.mpmathify(x)
        if not (0 < mpmath.re(xv) < 1) or mpmath.im(xv) != 0:
            raise DomainError("Phi_k requires real x in (0, 1)")
        xv = mpmath.re(xv)
        slow = xv > mpf("0.99")
        pref = 2 * mpmath.exp(2 * u * mpmath.log(2 * mpmath.pi)
                              + _log_gamma_ratio(k, u, v, ctx)
                              + k * mpmath.log(xv) - u * mpmath.log(1 - xv))
        if u == 0 and v == 0:
            pref_s = pref
        else:
            pref_s = pref * mpmath.sin(mpmath.pi * (mpf(1) / 2 + u))
        f, ftail, _, _ = hyp2f1_series(k - u + v, k - u - v, 2 * k, xv, ctx,
                                       max_terms=SERIES_TERM_CAP)
        val = pref_s * f
        if u == 0 and v == 0:
            val = mpmath.re(val)
        return KernelValue(x=x, value=+val, tail_bound=abs(pref_s) * ftail,
                           slow=slow)


def psi_k(x, p: KernelParams, ctx: PrecisionContext = DEFAULT_CTX) -> KernelValue:
    """Kernel psi_k(x; u, v) for x > 0, via the always-convergent Pfaff map.

    2F1(a, b, 2k; -x) = (1+x)^{-a} 2F1(a, 2k-b, 2k; x/(1+x)); at u = v = 0
    this is exactly psi_k(x) = Phi_k(x / (1 + x)).
    """
    k, u, v = p.k, mpmath.mpmathify(p.u), mpmath.mpmathify(p.v)
    with ctx.working(extra=96):
        xv = mpmath.mpmathify(x)
        if not mpmath.re(xv) > 0 or mpmath.im(xv) != 0:
            raise DomainError("psi_k requires real x > 0")
        xv = mpmath.re(xv)
        a = k - u + v
        y = xv / (1 + xv)
        pref = 2 * mpmath.exp(2 * u * mpmath.log(2 * mpmath.pi)
                              + _log_gamma_ratio(k, u, v, ctx)
                              + k * mpmath.log(xv) - u * mpmath.log(1 + xv)
                              - a * mpmath.log(1 + xv))
        if u == 0 and v == 0:
            pref_s = pref
        else:
            pref_s = pref * mpmath.sin(mpmath.pi * (mpf(1) / 2 + v))
        f, ftail, _, _ = hyp2f1_series(a, k + u + v, 2 * k, y, ctx,
                                       max_terms=SERIES_TERM_CAP)
        val = pref_s * f
        if u == 0 and v == 0:
            val = mpmath.re(val)
        return KernelValue(x=x, value=+val, tail_bound=abs(pref_s) * ftail)


def _hyp2f1_kk2k_derivs(k: int, x, tol):
    """(W, W', W'') for W = 2F1(k, k, 2k; x), term-wise, positive terms."""
    t = mpf(1)
    s0, s1, s2 = mpf(1), mpf(0), mpf(0)
    n = 0
    while True:
        r = mpf((k + n) * (k + n)) / ((2 * k + n) * (n + 1)) * x
        t *= r
        n += 1
        s0 += t
        s1 += t * n
        s2 += t * n * (n - 1)
        if n > 2 * k + 4:
            rbar = r * mpf(n + 1) / (n - 1)
            if rbar < 1 and t * n * n * rbar / (1 - rbar) < tol:
                break
        if n > SERIES_TERM_CAP:
            raise ConvergenceError("2F1(k,k,2k;x) derivative series cap",
                                   slow_convergence=True)
    return s0, s1 / x, s2 / x**2


def ode_residual(which: str, x, k: int, ctx: PrecisionContext = DEFAULT_CTX):
    """Normalized ODE residual with all derivatives taken analytically.

    which = 'phi':      (x - x^2) phi'' + (1 - 2x) phi' + k(k-1) phi
    which = 'Y_form':   Y'' + [1/(4x^2(1-x)^2) + k(k-1)/(x(1-x))] Y,
                        Y = sqrt(x(1-x)) phi_k(x)
    which = 'Phi_form': y'' - (u^2 f + g) y for y = 2F1(k,k,2k;x) x^k sqrt(1-x),
                        u = k - 1/2, f = 1/(x^2(1-x)),
                        g = -1/(4x^2(1-x)^2) + 1/(4x(1-x))

    Returns |residual| / max(|term|).
    """
    with ctx.working(extra=96):
        xv = mpf(mpmath.mpmathify(x))
        lo = mpf(1) / 1000
        if not (lo <= xv <= 1 - lo):
            raise EndpointError("ode_residual needs x in [1e-3, 1 - 1e-3]")
        if which == "phi":
            f0, f1, f2 = phi_k_derivatives(x, k, ctx)
            terms = ((xv - xv**2) * f2, (1 - 2 * xv) * f1, k * (k - 1) * f0)
            res = terms[0] + terms[1] + terms[2]
        elif which == "Y_form":
            f0, f1, f2 = phi_k_derivatives(x, k, ctx)
            w = xv - xv**2
            w1 = 1 - 2 * xv
            sq = mpmath.sqrt(w)
            Y = sq * f0
            Y2 = ((-2 / (2 * sq) - w1**2 / (4 * w * sq)) * f0
                  + w1 / sq * f1 + sq * f2)
            q = 1 / (4 * w**2) + k * (k - 1) / w
            terms = (Y2, q * Y)
            res = Y2 + q * Y
        elif which == "Phi_form":
            W0, W1, W2 = _hyp2f1_kk2k_derivs(k, xv, ctx.tail_tol)
            g = mpmath.power(xv, k) * mpmath.sqrt(1 - xv)
            gl = k / xv - 1 / (2 * (1 - xv))             # g'/g
            gl2 = gl * gl - k / xv**2 - 1 / (2 * (1 - xv) ** 2)   # g''/g
            y0 = W0 * g
            y1 = W1 * g + W0 * g * gl
            y2 = W2 * g + 2 * W1 * g * gl + W0 * g * gl2
            uu = mpf(2 * k - 1) / 2
            fco = 1 / (xv**2 * (1 - xv))
            gco = -1 / (4 * xv**2 * (1 - xv) ** 2) + 1 / (4 * xv * (1 - xv))
            terms = (y2, (uu**2 * fco + gco) * y0)
            res = y2 - (uu**2 * fco + gco) * y0
        else:
            raise DomainError(f"unknown ODE residual form {which!r}")
        scale = max(abs(t) for t in terms)
        return abs(res) / scale
