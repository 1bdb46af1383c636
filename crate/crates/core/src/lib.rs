//! Rational approximation with exponentially clustered poles, potential-theory
//! diagnostics, tanh and tanh-sinh quadrature, and a small lightning Laplace solver.

pub mod approximants;
pub mod clustering;
pub mod error;
pub mod fitting;
pub mod gauss;
pub mod grid;
pub mod lightning;
pub mod linalg;
pub mod potential;
pub mod quadrature;
pub mod rate;

pub use approximants::{newman, stenger_interpolant, trapezoidal_sqrt, RationalApproximant, XiMode};
pub use clustering::{analyze_taper, lightning_poles, tapered_poles, uniform_poles, ClusterKind, ClusteredPoleSet, TaperDiagnostic};
pub use error::{Error, Result};
pub use grid::{build_graded_grid, sup_error, ErrorCurve, GradedGrid};
pub use lightning::{LightningBasis, LightningSolution, PolygonDomain};
pub use rate::{fit_rate, RateAxis, RateFit};
