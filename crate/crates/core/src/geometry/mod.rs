//! Cones, joins, mapping cylinders, Euclidean and rectilinear cone models,
//! and uniform moduli of continuity for families of maps.

mod cone;
mod cylinder;
mod euclid;
mod uniform;

pub use cone::{cone_metric, join_amalgam_equality, join_metric, ConeSpace, JoinAmalgamReport, JoinClass, JoinSpace};
pub use cylinder::{mapping_cylinder_certificate, mapping_cylinder_metric, sub_cylinder_check, CylinderCertificate, CylinderSpace};
pub use euclid::{
    cone_comparison_bounds, euclidean_cone_distance, euclidean_cone_metric, independent_rectilinear_join,
    rectilinear_cone, ComparisonSample, ConeComparisonReport, EuclideanCone, Norm, NormedPointSet, PI_TOLERANCE,
};
pub use uniform::{uniform_modulus, UniformModulus};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Checks a parameter grid: strictly increasing, inside `[lo, hi]`, both endpoints present.
pub fn validate_grid(grid: &[Scalar], lo: &Scalar, hi: &Scalar) -> Result<()> {
    if grid.first() != Some(lo) || grid.last() != Some(hi) {
        return Err(Error::precondition(format!("grid must start at {lo} and end at {hi}")));
    }
    if let Some(w) = grid.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::precondition(format!(
            "grid must be strictly increasing, found {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// `k + 1` equally spaced points from `lo` to `hi`.
pub fn uniform_grid(lo: &Scalar, hi: &Scalar, k: usize) -> Vec<Scalar> {
    let k = k.max(1);
    let step = (hi - lo) / Scalar::from_int(k as i64);
    (0..=k).map(|i| lo + &step * Scalar::from_int(i as i64)).collect()
}
