//! Error type shared by all modules, with stable machine-readable codes.

use crate::rat::Rat;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("evaluation at x <= 0 with a fractional x-exponent present")]
    NegativeBaseFractionalPower,

    #[error("x-derivative of order {order} would produce a negative exponent on x^{exponent}")]
    NegativeExponentResult { exponent: Rat, order: u32 },

    #[error("operation requires integer x-exponents")]
    FractionalExponentLinearSub,

    #[error("syntax error at byte {pos}: expected {expected}")]
    SyntaxError { pos: usize, expected: String },

    #[error("negative exponent at byte {pos}")]
    NegativeExponent { pos: usize },

    #[error("fractional exponent on y at byte {pos}")]
    FractionalYExponent { pos: usize },

    #[error("division involving a variable at byte {pos}; only rational literals p/q may use '/'")]
    DivisionByVariable { pos: usize },

    #[error("interval endpoint is a root; nudge the endpoint")]
    EndpointIsRoot,

    #[error("input must vanish to second order at the origin (no constant or degree-1 terms)")]
    CriticalPointViolation,

    #[error("adaptation step needs an irrational shift; root isolated in ({lo}, {hi})")]
    IrrationalShiftRequired { lo: Rat, hi: Rat },

    #[error("adaptation did not finish within the step budget of {max_steps}")]
    StepBudgetExhausted { max_steps: u32 },

    #[error("no genericizing linear map found within {trials} trials")]
    GenericityNotFound { trials: u32 },

    #[error("input is not in generic adapted coordinates")]
    NotGenericAdapted,

    #[error("edge does not belong to the Newton polygon of this polynomial")]
    EdgeNotOfPolygon,

    #[error("sliver coverage failure: sampled point ({x}, {y}) lies in no region")]
    CoverageFailure { x: f64, y: f64 },

    #[error("degenerate-band sliver demanded at weight {weight} but shift order is {psi_order}; input is exceptional")]
    ExceptionalInput { weight: Rat, psi_order: Rat },

    #[error("constant search exhausted its budget: {what}")]
    SearchBudgetExhausted { what: String },

    #[error("degenerate sublevel measure: {what}")]
    DegenerateMeasure { what: String },

    #[error("region is empty at the configured radius")]
    EmptyRegion,

    #[error("quadrature under-resolved: node doublings disagree by {disagreement:.1}% at lambda = {lambda}")]
    QuadratureUnderResolved { lambda: f64, disagreement: f64 },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    /// Stable error code for machine-readable output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroPolynomial => "zero_polynomial",
            Error::NegativeBaseFractionalPower => "negative_base_fractional_power",
            Error::NegativeExponentResult { .. } => "negative_exponent_result",
            Error::FractionalExponentLinearSub => "fractional_exponent_linear_sub",
            Error::SyntaxError { .. } => "syntax_error",
            Error::NegativeExponent { .. } => "negative_exponent",
            Error::FractionalYExponent { .. } => "fractional_y_exponent",
            Error::DivisionByVariable { .. } => "division_by_variable",
            Error::EndpointIsRoot => "endpoint_is_root",
            Error::CriticalPointViolation => "critical_point_violation",
            Error::IrrationalShiftRequired { .. } => "irrational_shift_required",
            Error::StepBudgetExhausted { .. } => "step_budget_exhausted",
            Error::GenericityNotFound { .. } => "genericity_not_found",
            Error::NotGenericAdapted => "not_generic_adapted",
            Error::EdgeNotOfPolygon => "edge_not_of_polygon",
            Error::CoverageFailure { .. } => "coverage_failure",
            Error::ExceptionalInput { .. } => "exceptional_input",
            Error::SearchBudgetExhausted { .. } => "search_budget_exhausted",
            Error::DegenerateMeasure { .. } => "degenerate_measure",
            Error::EmptyRegion => "empty_region",
            Error::QuadratureUnderResolved { .. } => "quadrature_under_resolved",
            Error::Invalid(_) => "invalid",
        }
    }

    /// Byte position for parse-stage errors, if the error carries one.
    pub fn position(&self) -> Option<usize> {
        match self {
            Error::SyntaxError { pos, .. }
            | Error::NegativeExponent { pos }
            | Error::FractionalYExponent { pos }
            | Error::DivisionByVariable { pos } => Some(*pos),
            _ => None,
        }
    }
}
