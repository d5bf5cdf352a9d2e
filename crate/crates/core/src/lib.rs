//! Tensor PCA from eigentensor bases.
//!
//! Three routes to an orthonormal basis of a tensor space and the optimal
//! truncated representation built on each:
//!
//! * [`operator`]: eigentensors of a self-adjoint order-2d operator, found by
//!   flattening it through the α index map to a symmetric matrix.
//! * [`rank1`]: rank-1 basis from mode-wise Gram operators, with the SVD of
//!   the coefficient matrix ordering the components.
//! * [`subspace`]: orthonormal basis of the span of a dataset via its
//!   sample Gram matrix (snapshot method).
//!
//! [`pca`] projects, truncates and reports reconstruction error uniformly for
//! all three, and [`io`] handles image ingestion and the binary formats.
//!
//! ```
//! use tenpca_core::operator::{covariance_operator, eigentensor_basis};
//! use tenpca_core::pca::pca_truncate;
//! use tenpca_core::synth::{random_dataset, seeded};
//! use tenpca_core::Shape;
//!
//! let shape = Shape::new(vec![4, 4, 3])?;
//! let x = random_dataset(&mut seeded(1), &shape, 50)?;
//! let basis = eigentensor_basis(&covariance_operator(&x, false)?)?;
//! let model = pca_truncate(&x, &basis, 10)?;
//! assert!(model.report().identity_holds());
//! # Ok::<(), tenpca_core::Error>(())
//! ```

pub mod dataset;
pub mod error;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod pca;
pub mod rank1;
pub mod settings;
pub mod subspace;
pub mod synth;
pub mod tensor;

pub use dataset::TensorDataset;
pub use error::{Error, Result};
pub use linalg::{Matrix, Svd, SymmetricEig};
pub use operator::{SelfAdjointOperator, TensorBasis};
pub use pca::{ErrorReport, Method, SubspaceModel};
pub use rank1::{CoefficientSvd, Rank1Basis};
pub use settings::Settings;
pub use subspace::SubspaceBasis;
pub use tensor::{DenseTensor, IndexTable, MultiIndex, Shape};
