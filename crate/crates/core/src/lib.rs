//! Bounds on the weighted spectral-norm distance from a matrix polynomial to
//! the matrix polynomials that have a prescribed set of distinct eigenvalues,
//! together with the perturbation that attains the upper bound.

pub mod bounds;
pub mod error;
pub mod fgamma;
pub mod fixtures;
pub mod matpoly;
pub mod numkernel;
pub mod perturb;

pub use bounds::{optimize_bounds, sweep, BoundsReport, OptimizeOptions, Problem, Sample, Strategy};
pub use error::{Error, Infeasibility, Result};
pub use fgamma::{GammaMatrix, RhoTriple};
pub use matpoly::{MatrixPolynomial, TargetSet, WeightSet};
pub use num_complex::Complex64;
pub use numkernel::{CMatrix, CVector};
pub use perturb::{PerturbationResult, StandardPerturbation};
