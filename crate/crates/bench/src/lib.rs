//! Shared fixtures for the criterion benches.

use rmp_core::spectral::{OperatorGrid, TransferOperator};
use rmp_core::{DualPoint, MatrixMeasure, ProjPoint};

pub struct Fixture {
    pub measure: MatrixMeasure,
    pub x: ProjPoint,
    pub y: DualPoint,
}

impl Fixture {
    pub fn benchmark() -> Self {
        Fixture {
            measure: MatrixMeasure::benchmark(),
            x: ProjPoint::basis(2, 0),
            y: DualPoint::new(&[1.0, 1.0]).unwrap(),
        }
    }

    pub fn operator(&self, size: usize) -> TransferOperator {
        TransferOperator::new(&self.measure, OperatorGrid::circle(size).unwrap()).unwrap()
    }
}
