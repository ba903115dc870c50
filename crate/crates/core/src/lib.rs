//! Numerical lab for products of i.i.d. random matrices: the norm cocycle and the
//! matrix coefficients `log |⟨f, S_n v⟩|`, the Markov chain on projective space,
//! complex perturbations of its transfer operator, smoothing inequalities, and
//! empirical Berry–Esseen / local limit checks.

pub mod error;
pub mod linalg;
pub mod measure;
pub mod montecarlo;
pub mod projective;
pub mod rng;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use measure::{MatrixMeasure, Verdict};
pub use projective::{DualPoint, GroupAtom, ProjPoint};
pub mod estimators;
pub mod fourier;
pub mod harness;
pub mod spectral;
pub mod stats;
