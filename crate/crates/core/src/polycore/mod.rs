//! Multi-index polynomials without constant or linear part, torus arithmetic,
//! Euclidean coefficient norms, dyadic scale profiles and shift differences.

mod coeff;
mod io;
mod multiindex;
mod poly;
mod scale;

pub use coeff::{torus_norm_exact, Coeff, CoeffLiteral};
pub use io::parse_literal;
pub use multiindex::{IndexSet, MultiIndex};
pub use poly::{torus_norm, Poly, RatPoly, RealPoly};
pub use scale::{LevelSet, ScaleProfile, ScaleVec};
