//! Spectra constrained by their first `n - 1` power sums.
//!
//! For `c_1, ..., c_{n-1}` fixed, the characteristic polynomial of a spectrum
//! with top power sum `f = p_n` splits as `F(x) = F0(x) - f/n + (-1)^n C`,
//! where `F0` depends only on the constraints. The crate computes the
//! interval of `f` with a real spectrum, the spectra at its endpoints, the
//! finitely many degenerate spectra, pointwise rational quantities in the
//! eigenvalues, and the scalar curvature of isoparametric hypersurfaces.

pub mod degenerate;
pub mod error;
pub mod isopar;
pub mod pointwise;
pub mod poly;
pub mod sampling;
pub mod spectrum;
pub mod symfunc;

pub use degenerate::{
    all_degenerate_values, enumerate_patterns, solve_all_patterns, solve_pattern,
    DegenerateSolution, MultiplicityPattern, PatternOutcome,
};
pub use error::{Error, Result};
pub use isopar::{CurvatureProfile, IsoparametricFamily};
pub use poly::{Poly, Root, RootList, DEFAULT_TOL};
pub use sampling::Sampler;
pub use spectrum::{
    BoundaryPattern, Classification, ConstraintModel, Endpoint, FeasibleInterval, RegionLabel,
    Spectrum,
};
pub use symfunc::{ElementarySymmetric, PowerSums};
