"""Working-precision carrier and small numeric helpers.

Every public operation in the package takes a PrecisionContext.  The context
fixes the binary working precision and the default series-truncation target;
individual operations raise the local mpmath precision further when an
evaluation is known to cancel (oscillatory series, alternating sums), so the
context's `prec_bits` is the *accuracy* target, not the internal precision.

mpmath keeps its precision in module-global state.  All escalation here goes
through `mp.workprec`, which restores the previous precision on exit, so
nested calls compose; contexts themselves are immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .errors import DomainError

_TOL_MARGIN_BITS = 32  # default tail_tol = 2^-(prec_bits - margin)
_GUARD_BITS = 32       # baseline guard digits for plain evaluations


@dataclass(frozen=True)
class PrecisionContext:
    """Immutable carrier of working precision and truncation tolerance.

    prec_bits: binary working precision (>= 64, default 256).
    tail_tol:  positive truncation target; defaults to 2^-(prec_bits-32).
    """

    prec_bits: int = 256
    tail_tol: object = None

    def __post_init__(self):
        if int(self.prec_bits) < 64:
            raise DomainError("prec_bits must be at least 64")
        object.__setattr__(self, "prec_bits", int(self.prec_bits))
        if self.tail_tol is None:
            with mp.workprec(64):
                tol = mpmath.ldexp(1, -(self.prec_bits - _TOL_MARGIN_BITS))
        else:
            with mp.workprec(max(64, self.prec_bits)):
                tol = mpf(self.tail_tol)
            if tol <= 0:
                raise DomainError("tail_tol must be positive")
        object.__setattr__(self, "tail_tol", tol)

    def working(self, extra: int = 0):
        """mp.workprec context at prec_bits + guard + extra bits."""
        return mp.workprec(self.prec_bits + _GUARD_BITS + max(0, int(extra)))

    def dps(self) -> int:
        """Decimal digits corresponding to prec_bits (for serialization)."""
        return int(self.prec_bits / 3.3219280948873626) + 2


DEFAULT_CTX = PrecisionContext()


def to_fraction(x) -> Fraction:
    """Exact conversion of int/Fraction/float/str/mpf input to Fraction.

    Binary floats and mpf values convert exactly (no decimal rounding);
    strings go through Fraction's decimal parser.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, mpf):
        sign, man, exp, _ = x._mpf_
        if man == 0 and exp != 0:
            raise DomainError("cannot convert non-finite mpf to Fraction")
        val = Fraction(man, 1) * Fraction(2) ** exp
        return -val if sign else val
    raise DomainError(f"cannot convert {type(x).__name__} to Fraction")


def fraction_to_mpf(q: Fraction) -> mpf:
    """Round a Fraction once to the current working precision."""
    return mpf(q.numerator) / mpf(q.denominator)


def is_int(x) -> bool:
    """True when x is an exact integer (int, integral Fraction, or mpf)."""
    if isinstance(x, int):
        return True
    if isinstance(x, Fraction):
        return x.denominator == 1
    if isinstance(x, mpf):
        return mpmath.isint(x)
    if isinstance(x, float):
        return x == int(x)
    return False
