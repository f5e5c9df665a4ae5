//! Pointwise curvature algebra for submanifolds of space forms.
//!
//! Given the second fundamental form of `Mⁿ ⊂ F^{n+p}(c)` at a point, this
//! crate evaluates the Gauss and Ricci equations, encloses the minimum
//! sectional curvature, checks the Simons-type trace identities and the DDVV
//! inequality, and renders verdicts against the sectional-curvature pinching
//! constants of the Yau-type rigidity theorems. Closed-form model geometries
//! and numerically differentiated immersions serve as independent oracles.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod curvature;
pub mod ddvv;
pub mod error;
pub mod immersion;
pub mod json;
pub mod models;
pub mod pinching;
pub mod rng;
pub mod simons;
pub mod symmat;

pub use curvature::{
    align_mean_frame, gram_diagonalize, invariants, kmin_bracket, normal_curvature, riemann,
    sectional, CurvatureTensor, FundamentalData, KminBracket, PlaneSpec, ScalarInvariants,
};

pub use ddvv::DdvvReport;
pub use error::{GeometryError, Result};
pub use immersion::{ImmersionSpec, PointSample};
pub use models::ModelSpec;
pub use pinching::{ModelLabel, PinchStatus, PinchVerdict, Theorem};
pub use symmat::{Matrix, MatrixTuple, SymMatrix};
