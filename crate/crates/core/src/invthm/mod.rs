//! Inverse-theorem tooling: the verifier, van der Corput differencing, the
//! Taylor shift along progressions, condensation, rescaling of progressions,
//! and an end-to-end demonstration of one inductive step.

mod condense;
mod induction;
mod inverse;
mod rescale;
mod taylor;
mod vdc;

pub use condense::{condense, CondenseOutcome, CondenseReport};
pub use induction::{
    induction_demo, DifferenceRecord, FinalCertificate, InductionParams, InductionTrace, StageTrace,
    DEFAULT_DEMO_POINTS, STAGE_CONDENSE, STAGE_INVERSE, STAGE_PIGEONHOLE, STAGE_VDC,
};
pub use inverse::{
    best_denominator, delta_power_bound, inverse_verify, inverse_verify_with, nonconstant_terms, terms_defects,
    verify_certificate, CounterexampleReport, Defect, InverseCertificate, InverseOptions, InverseOutcome,
    InverseReport, DEFAULT_C_MAX, DEFAULT_MAX_Q,
};
pub use rescale::{rescale, verify_partition, RescaleReport, DEFAULT_PIECE_BUDGET, DEFAULT_VERIFY_BUDGET};
pub use taylor::{taylor_shift_check, TaylorReport, DEFAULT_SHIFT_BUDGET};
pub use vdc::{vdc_analytic_constant, vdc_difference, VdcReport};
