//! Vertex-model biunitaries and the standard invariants of their subfactors.

pub mod algebra;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod group;
pub mod intertwiner;
pub mod linsolve;
pub mod matrix;
pub mod scalar;
pub mod square;
pub mod vertex;

pub use error::{Error, Result};
pub use matrix::{DynMatrix, Leg, Matrix};
pub use scalar::{DynScalar, GaussRational, Mode, Scalar, DEFAULT_TOL};
pub use exec::{Config, Exec};
pub use vertex::{TwistQ, VertexOperator};
