"""accsens: accuracy/sensitivity analysis of scalar boundary classifiers
under adversarial shifts of the observation distributions."""

from .densities import CustomDensity, DensityModel, Family, HypothesisPair
from .classifier import (
    BoundarySet,
    ClassifierSpec,
    GeneralSpec,
    Label,
    LinearSpec,
    MLSpec,
    Norm,
    Orientation,
    accuracy,
    accuracy_gradient,
    classify,
    resolve,
    sensitivity,
)
from .boundary_solver import (
    LikelihoodRootReport,
    LinearOptimum,
    RootMethod,
    default_search_interval,
    ml_boundaries,
    ml_boundaries_gaussian,
    ml_boundaries_generic,
    optimal_linear_boundary,
)
from .theory_checks import (
    AssumptionReport,
    Verdict,
    check_a1,
    check_a2,
    check_a3,
    run_all_checks,
    sensitivity_slope_witness,
)
from .tradeoff import (
    TradeoffCurve,
    TradeoffPoint,
    constrained_min_sensitivity,
    general_curve,
    linear_curve,
    ml_curve,
)
from .param_designer import (
    DesignResult,
    ExponentialLaw,
    ParamDesignProblem,
    design_params,
    exponential_law,
    fig3_box,
    gamma_sweep,
    gaussian_equal_variance_law,
)
from .adversary_sim import (
    SCENARIOS,
    ExperimentReport,
    PerturbationSpec,
    analytic_perturbed_accuracy,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "BoundarySet",
    "ClassifierSpec",
    "CustomDensity",
    "DensityModel",
    "DesignResult",
    "ExperimentReport",
    "ExponentialLaw",
    "Family",
    "GeneralSpec",
    "HypothesisPair",
    "Label",
    "LikelihoodRootReport",
    "LinearOptimum",
    "LinearSpec",
    "MLSpec",
    "Norm",
    "Orientation",
    "ParamDesignProblem",
    "PerturbationSpec",
    "RootMethod",
    "SCENARIOS",
    "TradeoffCurve",
    "TradeoffPoint",
    "AssumptionReport",
    "Verdict",
    "accuracy",
    "accuracy_gradient",
    "analytic_perturbed_accuracy",
    "check_a1",
    "check_a2",
    "check_a3",
    "classify",
    "constrained_min_sensitivity",
    "default_search_interval",
    "design_params",
    "exponential_law",
    "fig3_box",
    "gamma_sweep",
    "gaussian_equal_variance_law",
    "general_curve",
    "linear_curve",
    "ml_boundaries",
    "ml_boundaries_gaussian",
    "ml_boundaries_generic",
    "ml_curve",
    "optimal_linear_boundary",
    "resolve",
    "run_all_checks",
    "run_experiment",
    "sensitivity",
    "sensitivity_slope_witness",
]
