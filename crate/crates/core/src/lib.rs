//! Exact computation of i-canonical bases on tensor modules of the quantum
//! symmetric pair of type AIII, with Kazhdan-Lusztig bases of Hecke algebras
//! of types A and B as an independent cross-check.

pub mod bar;
pub mod coxeter;
pub mod error;
pub mod hecke;
pub mod laurent;
pub mod linalg;
pub mod oracle;
pub mod pipeline;
pub mod qsp;
pub mod ratfunc;
pub mod scalar;
pub mod sparse;
pub mod tensor;
pub mod transition;
pub mod uq;

pub use bar::{BarOperator, BasedModuleReport, TieBreak};
pub use coxeter::{CoxeterGroup, CoxeterType};
pub use error::{Error, Result};
pub use hecke::{HeckeAlgebra, HeckeElement};
pub use laurent::{Lattice, LaurentPoly};
pub use oracle::{kl_oracle, OracleComparison};
pub use pipeline::{compute, verify, Computation, GridPoint, Verification};
pub use qsp::{IModule, QSPConfig, Upsilon};
pub use ratfunc::RatFunc;
pub use scalar::{Field, Scalar};
pub use sparse::{SparseMat, SparseVec};
pub use tensor::{build_module, levi_to_shape, Factor, TensorModule, TensorShape, TensorVector};
pub use transition::TransitionMatrix;
pub use uq::{Convention, RootLatticeVec, UModule, UPlusElement};
