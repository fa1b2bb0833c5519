//! Discrete maximally modulated singular integrals: dyadic kernel pieces,
//! grid suprema, the oscillatory/error split and `TT*` kernels.

pub mod kernel;
pub mod operator;
pub mod split;
pub mod ttstar;

pub use kernel::{build_psi, build_psi_with_budget, cz_certificate, eta, CustomKernel, CzCertificate, DyadicKernelFamily, FamilyReport, KernelSpec, PieceCertificate, DEFAULT_LATTICE_BUDGET};
pub use operator::{carleson_apply, delta_response, refinement_stability, ApplyParams, ApplyReport, Grid, LambdaGrid, RefinementReport, DEFAULT_TAP_BUDGET, GRID_LABEL};
pub use split::{split_as_ek, PieceClass, SplitReport, SplitRow, DEFAULT_A0};
pub use ttstar::{
    autocorrelation_l1, error_norm_sweep, error_op_norm, gram_schur, gram_schur_with_budget, sample_linearizer, schur_rows, schur_sweep, single_scale_sup,
    ttstar_kernel, ErrorNormParams, ErrorNormRow, ErrorNormSweep, Linearizer, SchurLevel, SchurReport, SchurSweep, SchurSweepParams,
};
