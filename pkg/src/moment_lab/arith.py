"""Elementary multiplicative number theory on exact integers.

Shifted divisor sums tau_v(n) = sum_{n1 n2 = n} (n1/n2)^v, the classical
multiplicative functions mu / phi / rho(m) = prod_{p|m} (1 + 1/p), and
classical Kloosterman sums S(m, n; c) by direct enumeration over invertible
residues.  Factorization is trial division: desk scale keeps n <= 10^9 and
Kloosterman moduli c <= 10^4, so nothing fancier is warranted.

All operations are pure functions of (inputs, context) and safe for
concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

import mpmath
from mpmath import mpc, mpf

from .errors import DomainError
from .precision import DEFAULT_CTX, PrecisionContext


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division, n >= 1."""
    n = int(n)
    if n < 1:
        raise DomainError("factorize requires n >= 1")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    """Sorted list of positive divisors."""
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**j for d in divs for j in range(e + 1)]
    return sorted(divs)


def tau0(n: int) -> int:
    """Number of divisors."""
    out = 1
    for e in factorize(n).values():
        out *= e + 1
    return out


def divisor_sigma(n: int, w, ctx: PrecisionContext = DEFAULT_CTX):
    """sigma_w(n) = sum_{d | n} d^w for complex w (exact int for int w >= 0)."""
    if isinstance(w, int) and w >= 0:
        return sum(d**w for d in divisors(n))
    with ctx.working():
        w = mpmath.mpmathify(w)
        return sum(mpmath.power(d, w) for d in divisors(n))


def divisor_tau(n: int, v, ctx: PrecisionContext = DEFAULT_CTX):
    """Shifted divisor function sum_{d | n} (d^2 / n)^v.

    Symmetric under v -> -v; at v = 0 it counts divisors.  Returns an mpf
    for real v and an mpc otherwise.
    """
    n = int(n)
    if n < 1:
        raise DomainError("divisor_tau requires n >= 1")
    if v == 0:
        return mpf(tau0(n))
    with ctx.working():
        v = mpmath.mpmathify(v)
        terms = [mpmath.exp(v * (2 * mpmath.log(d) - mpmath.log(n)))
                 for d in divisors(n)]
        total = sum(terms)
        if mpmath.im(v) == 0 and not isinstance(total, mpc):
            return mpf(total)
        return mpc(total)


@dataclass(frozen=True)
class MultiplicativeBasics:
    mu: int
    phi: int
    rho: Fraction


def multiplicative_basics(n: int) -> MultiplicativeBasics:
    """Moebius mu(n), Euler phi(n), and rho(n) = prod_{p|n} (1 + 1/p)."""
    n = int(n)
    if n < 1:
        raise DomainError("multiplicative_basics requires n >= 1")
    fac = factorize(n)
    mu = 0 if any(e > 1 for e in fac.values()) else (-1) ** len(fac)
    phi = 1
    rho = Fraction(1)
    for p, e in fac.items():
        phi *= (p - 1) * p ** (e - 1)
        rho *= Fraction(p + 1, p)
    return MultiplicativeBasics(mu=mu, phi=phi, rho=rho)


def mobius(n: int) -> int:
    return multiplicative_basics(n).mu


def kloosterman(m: int, n: int, c: int, ctx: PrecisionContext = DEFAULT_CTX) -> mpf:
    """Classical Kloosterman sum S(m, n; c) over a (mod c), (a, c) = 1.

    Direct O(c) enumeration with modular inverses.  The sum is real; the
    computed imaginary part is asserted below tail_tol and discarded, which
    catches inverse-computation bugs rather than trusting the symmetry.
    """
    c = int(c)
    if c < 1:
        raise DomainError("kloosterman requires c >= 1")
    m, n = int(m), int(n)
    if c == 1:
        return mpf(1)
    with ctx.working(extra=32):
        re = mpf(0)
        im = mpf(0)
        for a in range(1, c):
            if gcd(a, c) != 1:
                continue
            astar = pow(a, -1, c)
            r = (a * n + astar * m) % c
            # e(r/c) = cos(2 pi r / c) + i sin(2 pi r / c)
            re += mpmath.cospi(mpf(2 * r) / c)
            im += mpmath.sinpi(mpf(2 * r) / c)
        if abs(im) > ctx.tail_tol:
            raise ArithmeticError(
                f"Kloosterman imaginary part {im} above tolerance; "
                "modular inverses are suspect")
        return +re


def weil_bound(m: int, n: int, c: int) -> mpf:
    """tau0(c) * sqrt(gcd(m, n, c)) * sqrt(c)."""
    g = gcd(m, n, c)
    return mpf(tau0(c)) * mpmath.sqrt(g) * mpmath.sqrt(c)


def sieve_tau0(limit: int) -> list[int]:
    """tau0(n) for 0 <= n <= limit via a divisor sieve (index 0 unused)."""
    counts = [0] * (limit + 1)
    for d in range(1, limit + 1):
        for m in range(d, limit + 1, d):
            counts[m] += 1
    return counts


def isqrt_exact(n: int) -> int:
    return isqrt(n)
