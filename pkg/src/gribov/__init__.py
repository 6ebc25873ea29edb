"""Spectral numerics for the Gribov operator family on Bargmann space.

Modules:

* :mod:`gribov.basis_ops`: ladder operators and their composites in coefficient space;
* :mod:`gribov.jacobi`: truncated spectra, ``sigma0(mu)`` and block Jacobi data;
* :mod:`gribov.ortho_poly`: first/second-kind polynomials, the Gaussian tail ``phi``
  and two integer polynomial families;
* :mod:`gribov.deficiency`: zero-energy solutions and complete-indeterminacy tests;
* :mod:`gribov.inverse_op`: the integral right inverse, its ledger and Nystrom Perron root;
* :mod:`gribov.verify`: the named invariant suite.
"""
__version__ = "0.1.0"

from .basis_ops import (
    CoefficientVector,
    OperatorParams,
    gribov_apply,
    heun_pm_apply,
    ladder_down,
    ladder_up,
    shift_apply,
)
from .deficiency import (
    DeficiencyReport,
    SeriesClassification,
    SolutionTail,
    classify_series,
    eigenvector_at,
    hellinger_disc_check,
    km_block_test,
    scalar_zero_solutions,
)
from .errors import (
    BoundViolation,
    DomainError,
    GribovError,
    IdentityViolation,
    NonConvergence,
    NonPositiveTerm,
    RecurrenceOverflow,
)
from .inverse_op import (
    InverseLedger,
    KernelSpec,
    apply_quadrature,
    apply_recurrence,
    finite_rank_error,
    hs_norm_estimate,
    kernel_eval,
    ledger_build,
    nystrom_perron,
    right_inverse_residual,
    stirling_sandwich_check,
    v1_eval,
    v1_series,
)
from .jacobi import (
    BlockJacobiSpec,
    ScalarJacobiSpec,
    SpectrumResult,
    block_entries,
    charpoly_eval,
    sigma0_curve,
    truncated_spectrum,
)
from .ortho_poly import (
    PolySeq,
    first_second_eval,
    kouba_polys,
    phi_tail,
    plasma_polys,
    wronskian_residual,
)
