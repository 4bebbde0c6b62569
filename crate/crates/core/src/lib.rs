//! Independence-preserving involutions of the plane and the four law families
//! they characterize: generalized inverse Gaussian, asymmetric Laplace,
//! shifted exponential and shifted truncated exponential.
//!
//! The crate is organized bottom-up:
//!
//! * [`specfun`]: the modified Bessel function of the second kind `K_nu(x)`.
//! * [`quadrature`]: adaptive Gauss-Kronrod integration.
//! * [`distributions`]: validated parameters, densities, CDFs and samplers.
//! * [`transforms`]: the maps `F1`, `F2`, `F3`, their region partitions and Jacobians.
//! * [`theorems`]: input/output law predictions, density transport and fixed-point chains.
//! * [`stats`]: Kolmogorov-Smirnov and distance-correlation permutation tests.

pub mod distributions;
pub mod error;
pub mod qmc;
pub mod quadrature;
pub mod rng;
pub mod specfun;
pub mod stats;
pub mod theorems;
pub mod transforms;

pub use distributions::{DistributionSpec, Law, SampleBatch};
pub use error::{Error, Result};
pub use theorems::{LawQuadruple, TheoremCase};
pub use transforms::{PlanePoint, TransformSpec};
