//! Numerical laboratory for relative (p,q)-th growth indicators of growth
//! scales, including maximum-modulus and Nevanlinna-characteristic scales of
//! entire and meromorphic functions, with empirical tests of the
//! integral-representation equivalences on a catalog of pairs with
//! analytically known answers.

// Domain guards are written `!(x > 0.0)` on purpose: the negation also
// rejects NaN, which `x <= 0.0` would wave through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod indicators;
pub mod integralrep;
pub mod models;
pub mod nevanlinna;
pub mod parse;
pub mod scales;
pub mod tower;
pub mod verify;

pub use error::{Error, Result};
pub use indicators::{
    rel_order, rel_type, rel_type_inverse_form, rel_weak_type, Divergence, GridSpec,
    IndicatorEstimate, IndicatorKind,
};
pub use integralrep::{
    classify, integrand_log, lemma_ratio, transition, ConvergenceVerdict, RatioBehavior,
    TransitionResult, Verdict,
};
pub use models::FunctionModel;
pub use nevanlinna::{
    breakdown, characteristic, counting, proximity, NevanlinnaBreakdown,
};
pub use parse::{parse_complex_literal, parse_model, parse_scale};
pub use scales::{composed_ratio, scale_eval, scale_inverse, GrowthScale, ScaleKind};
pub use tower::TowerReal;
pub use verify::{
    check_equivalence_type, check_equivalence_weak, check_regular_growth,
    check_reparametrization, run_suite, standard_catalog, CatalogPair, EquivalenceCheck,
    EquivalenceReport, EstimateEntry, GroundTruth, PairRow, RegularGrowthCheck,
    ReparamCheck, ReparamEntry, RowStatus, Summary,
};
