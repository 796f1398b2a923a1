"""Boundedness analysis for alternating matrix products A_n B_n ... A_1 B_1.

The library computes the finite game values mu_n (worst-case A commitment
against a best B-response), constructs adversarial A-sequences whose
products outgrow every bound when those values diverge, reproduces the
squeeze/rotation pointwise-stabilization example, and offers finite-horizon
contractivity and pointwise-boundedness checks.
"""

from .adversary import (
    AdversaryCertificate,
    AdversaryMode,
    build_adversary,
    eta_bound,
    find_block,
    omega_bound,
    verify_certificate,
)
from .certify import (
    ContractivityResult,
    ContractivityVerdict,
    ProbeOutcome,
    ProbeResult,
    certify_contractivity,
    pointwise_probe,
)
from .errors import AltboundError
from .linalg import (
    Matrix,
    NormKind,
    apply_to_ones,
    as_matrix,
    determinant,
    identity,
    inverse,
    op_norm,
    spectral_radius,
)
from .minimax import (
    BestResponse,
    MuRecord,
    MuTable,
    ProductTrace,
    best_response,
    brute_force_mu,
    eval_trace,
    min_final_norm,
    min_running_max,
    mu_n,
    mu_table,
)
from .stanford import (
    SectorConfig,
    StanfordParams,
    build_counterexample,
    check_products_lower_bound,
    counterexample_pointwise_run,
    make_incommensurable,
    make_stanford,
    stabilize_pointwise,
)
from .system import (
    AlternatingSystem,
    HypothesisReport,
    Orientation,
    check_hypotheses,
    load_system,
    save_system,
    to_left_variant,
)

__version__ = "0.1.0"

__all__ = [
    "AdversaryCertificate",
    "AdversaryMode",
    "AltboundError",
    "AlternatingSystem",
    "BestResponse",
    "ContractivityResult",
    "ContractivityVerdict",
    "HypothesisReport",
    "Matrix",
    "MuRecord",
    "MuTable",
    "NormKind",
    "Orientation",
    "ProbeOutcome",
    "ProbeResult",
    "ProductTrace",
    "SectorConfig",
    "StanfordParams",
    "apply_to_ones",
    "as_matrix",
    "best_response",
    "brute_force_mu",
    "build_adversary",
    "build_counterexample",
    "certify_contractivity",
    "check_hypotheses",
    "check_products_lower_bound",
    "counterexample_pointwise_run",
    "determinant",
    "eta_bound",
    "eval_trace",
    "find_block",
    "identity",
    "inverse",
    "load_system",
    "make_incommensurable",
    "make_stanford",
    "min_final_norm",
    "min_running_max",
    "mu_n",
    "mu_table",
    "omega_bound",
    "op_norm",
    "pointwise_probe",
    "save_system",
    "spectral_radius",
    "stabilize_pointwise",
    "to_left_variant",
    "verify_certificate",
]
