"""moment-lab: high-precision moments of level-1 automorphic L-functions.

The library evaluates exact convolution formulas for the first and second
moments of Hecke L-functions at the central point in the weight aspect,
uniform Liouville-Green (WKB) approximations of the hypergeometric kernels
that appear in those formulas, mollified moments and non-vanishing bounds,
and cross-validates everything against an independent modular-forms oracle
(Miller basis, Hecke eigenvalues, harmonic weights solved from the trace
formula, incomplete-gamma central values).

All arithmetic runs on mpmath with a caller-supplied PrecisionContext.
"""

from .precision import PrecisionContext, DEFAULT_CTX

__all__ = ["PrecisionContext", "DEFAULT_CTX"]
__version__ = "0.1.0"
