//! Exponential sums over multi-dimensional progressions, decay sweeps against
//! the coefficient norm, discrete and continuous sublevel measurements, and
//! oscillatory integrals.

mod continuous;
mod decay;
mod progression;
mod sublevel;
mod sum;

pub use continuous::{continuous_sublevel, oscillatory_integral, ContinuousSublevel, OscillatoryIntegral, DEFAULT_NODE_BUDGET};
pub use decay::{
    decay_bound, small_norm_deviation, small_norm_suite, verify_sum_decay, DecayParams, DecayRow, DecayTable,
    SmallNormCase, SmallNormSuite,
};
pub use progression::{Amplitude, Axis, Progression};
pub use sublevel::{
    count_sublevel, sublevel_large_norm, sublevel_small_norm, LargeNormSublevel, SmallNormSublevel,
    DEFAULT_ENUMERATION_BUDGET,
};
pub use sum::{
    amplitude_mean, exp_sum, exp_sum_with, fejer, fejer_majorant, scaled_phase, SumReport, DEFAULT_PARTITIONS,
    FEJER_MAJORANT_CONST,
};
