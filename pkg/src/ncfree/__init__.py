"""Exact non-crossing partition calculus, free cumulants, and the moment
model of one free Poisson generator coupled to a matrix algebra, with Monte
Carlo random-matrix cross-checks.

The exact layers (everything except :mod:`ncfree.rmt` and the Monte Carlo
acceptance check) work over ``int`` and ``fractions.Fraction`` only.
:mod:`ncfree.rmt` and :mod:`ncfree.verify` import numpy and scipy lazily via
their own modules and are not pulled in by ``import ncfree``.
"""
from ._caches import clear_all as clear_caches
from .errors import (
    ArityError,
    ConfigError,
    GroundMismatchError,
    MalformedPartitionError,
    MobiusOrderError,
    NcfreeError,
    SizeLimitError,
    UnsupportedProductError,
    WordSyntaxError,
)
from .factors import (
    FactorDescription,
    Summand,
    dykema_free_product,
    free_product_with_matrix,
    m3_parameter,
    vn_z_description,
)
from .freeprob import (
    AlgebraOracle,
    FreenessReport,
    FreePoissonOracle,
    FreeProduct,
    MatrixTraceOracle,
    TracialLetter,
    free_poisson_cumulant,
    free_poisson_moment,
    free_product_moment,
    freeness_check,
    mixed_cumulant,
)
from .model import (
    ModelLetter,
    ModelParams,
    PiTermBreakdown,
    Z,
    centering_moment,
    dim_box,
    floating_loops,
    matrix_letter,
    pi_term,
    tau_word,
    tilde_kappa,
    z_cumulant,
    z_moment,
)
from .ncpart import (
    NonCrossingPartition,
    catalan,
    cumulants_to_moments,
    enumerate_nc,
    is_noncrossing,
    kreweras_complement,
    mobius,
    moments_to_cumulants,
    multiplicative_extension,
    partitioned_forms_check,
    pi_tilde,
    pi_tilde_bruteforce,
    refines,
)

__version__ = "0.1.0"

__all__ = [
    "__version__", "clear_caches",
    # errors
    "NcfreeError", "MalformedPartitionError", "GroundMismatchError",
    "MobiusOrderError", "SizeLimitError", "ArityError",
    "UnsupportedProductError", "ConfigError", "WordSyntaxError",
    # partitions
    "NonCrossingPartition", "catalan", "enumerate_nc", "is_noncrossing",
    "refines", "mobius", "kreweras_complement", "pi_tilde",
    "pi_tilde_bruteforce", "multiplicative_extension", "moments_to_cumulants",
    "cumulants_to_moments", "partitioned_forms_check",
    # free probability
    "AlgebraOracle", "MatrixTraceOracle", "FreePoissonOracle", "TracialLetter",
    "FreeProduct", "FreenessReport", "free_poisson_cumulant",
    "free_poisson_moment", "free_product_moment", "mixed_cumulant",
    "freeness_check",
    # model
    "ModelParams", "ModelLetter", "Z", "matrix_letter", "dim_box",
    "z_cumulant", "z_moment", "tau_word", "pi_term", "PiTermBreakdown",
    "floating_loops", "tilde_kappa", "centering_moment",
    # factors
    "Summand", "FactorDescription", "vn_z_description", "dykema_free_product",
    "free_product_with_matrix", "m3_parameter",
]
