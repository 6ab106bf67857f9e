from quadrature.gauss import (QuadratureRule, QuadratureBaseError, QuadratureOrderError,
                              UnsupportedCaseError, gauss_legendre, split_rule)
from quadrature.oracle import (Kernel, RegularizedIntegrand, oracle_pair_integral,
                               oracle_pair_batch, oracle_certificate, singular_rule,
                               duffy_triangle_rule, slp_kernel, dlp_kernel)
