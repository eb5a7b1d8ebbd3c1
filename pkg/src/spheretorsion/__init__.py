"""Quillen metrics and analytic torsion for circle-invariant metrics on
line bundles over the Riemann sphere, including non-smooth limits."""

from .gram import (
    GramData,
    gram,
    gram_canonical_closed,
    gram_convergence,
    gram_fs_closed,
    l2_det_metric,
    log_det_canonical_closed,
    log_det_fs_closed,
)
from .metrics import (
    CounterexampleParams,
    SpecError,
    canonical,
    counterexample_energy_oracle,
    counterexample_potential,
    dual,
    fubini_study,
    load_grid,
    lse,
    mollified_max,
    parse_spec,
    parse_volume,
    sup_distance,
    tensor,
    write_grid,
    zhang_iterate,
)
from .quadrature import DEFAULT_QUAD, NumericalError, QuadConfig, integrate_line
from .radial import (
    ConvergenceReport,
    RadialMeasure,
    RadialPotential,
    VolumeForm,
    bedford_taylor_check,
    c1_measure,
    integrate_volume,
    logistic_density,
    measure_mass,
    pair,
    volume_canonical,
    volume_from_potential,
    volume_fs,
)
from .torsion import (
    ROUTES,
    SPECTRUM_SCALE,
    AnomalyTerm,
    GeneralizedLimit,
    QuillenResult,
    TorsionResult,
    bundle_anomaly,
    fs_reference_torsion,
    generalized_quillen_limit,
    generalized_torsion_curve,
    quillen,
    torsion,
    volume_anomaly,
    zeta_prime_minus1_em,
    zeta_zero,
)

__version__ = "0.1.0"

__all__ = [
    "AnomalyTerm",
    "ConvergenceReport",
    "CounterexampleParams",
    "DEFAULT_QUAD",
    "GeneralizedLimit",
    "GramData",
    "NumericalError",
    "QuadConfig",
    "QuillenResult",
    "ROUTES",
    "RadialMeasure",
    "RadialPotential",
    "SPECTRUM_SCALE",
    "SpecError",
    "TorsionResult",
    "VolumeForm",
    "bedford_taylor_check",
    "bundle_anomaly",
    "c1_measure",
    "canonical",
    "counterexample_energy_oracle",
    "counterexample_potential",
    "dual",
    "fs_reference_torsion",
    "fubini_study",
    "generalized_quillen_limit",
    "generalized_torsion_curve",
    "gram",
    "gram_canonical_closed",
    "gram_convergence",
    "gram_fs_closed",
    "integrate_line",
    "integrate_volume",
    "l2_det_metric",
    "load_grid",
    "log_det_canonical_closed",
    "log_det_fs_closed",
    "logistic_density",
    "lse",
    "measure_mass",
    "mollified_max",
    "pair",
    "parse_spec",
    "parse_volume",
    "quillen",
    "sup_distance",
    "tensor",
    "torsion",
    "volume_anomaly",
    "volume_canonical",
    "volume_from_potential",
    "volume_fs",
    "write_grid",
    "zeta_prime_minus1_em",
    "zeta_zero",
    "zhang_iterate",
]
