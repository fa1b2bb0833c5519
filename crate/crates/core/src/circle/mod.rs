//! Circle-method layer: complete Gauss sums, the multipliers `m_{j,λ}` and
//! `Φ_{j,ν}`, the glued approximation `L_{j,λ}` and the diagonal kernel
//! averages.

pub mod density;
pub mod gauss;
pub mod major;
pub mod multiplier;

pub use density::{kernel_k0_density, DensityReport};
pub use gauss::{
    check_vanishing, cyclotomic, expected_vanishing_pairs, gauss_sum, orthogonality, recovery_identity, vanishes_at_root,
    vanishing_sweep, GaussSum, OrthogonalityCheck, RationalPoint, RecoveryCheck, ResidueTable, SweepBudget, VanishingCheck,
    VanishingCoverage,
};
pub use major::{
    assemble_l, chi_profile, chi_s, chi_width, major_arc_sweep, LReport, LTerm, MajorParams, MajorRow, MajorSweep, MajorSweepParams,
    DEFAULT_EPS0, DEFAULT_RHO, DEFAULT_S_CAP,
};
pub use multiplier::{
    centred, in_phi_window, multiplier_m, multiplier_phi, multiplier_phi_star, offset_beta, offset_poly, phase_scale, riemann_check,
    PhiValue, RiemannCheck, DEFAULT_PHI_NODES,
};
