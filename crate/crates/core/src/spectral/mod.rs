//! Complex perturbations `𝒫_z` of the Markov operator on projective space,
//! discretized on a grid, with power-iteration spectral estimates.

mod curve;
mod eigen;
mod grid;
mod operator;

pub use curve::{lambda_curve, lambda_estimates_check, CurveOptions, LambdaEstimates, SpectralCurve};
pub use eigen::{
    high_frequency_decay, leading_eigen, spectral_gap_at_zero, DecayReport, Eigenpair, GapEstimate,
    PowerOptions,
};
pub use grid::OperatorGrid;
pub use operator::{ExactOperator, TransferOperator, TwistedOperator};
