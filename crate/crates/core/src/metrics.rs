//! Distances, error statistics and the volume energy of a field.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::TensorField;
use crate::geometry::{spd_check, SpdMatrix};
use crate::immersion::FieldGeometry;
use crate::linalg;

/// Affine-invariant distance `‖log(P^{-1/2} Q P^{-1/2})‖_F`.
pub fn geodesic_distance(p: &SpdMatrix, q: &SpdMatrix) -> f64 {
    if p == q {
        return 0.0;
    }
    let s = linalg::inv_sqrtm(p.matrix());
    let m = linalg::symmetrize(&(s * q.matrix() * s));
    let (values, _) = linalg::sym_eigen(&m);
    values.iter().map(|l| l.ln().powi(2)).sum::<f64>().sqrt()
}

/// Voxelwise comparison of a field against a reference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorReport {
    /// Mean squared geodesic distance over voxels that are SPD in both fields.
    pub riemannian_mse: f64,
    /// Mean of `‖P − Q‖²_F` over all voxels.
    pub frobenius_mse: f64,
    pub max_pointwise: f64,
    /// Voxels of either field that fail the SPD check.
    pub spd_violation_count: usize,
}

impl ErrorReport {
    pub fn to_key_values(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ErrorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "riemannian_mse={:e}", self.riemannian_mse)?;
        writeln!(f, "frobenius_mse={:e}", self.frobenius_mse)?;
        writeln!(f, "max_pointwise={:e}", self.max_pointwise)?;
        writeln!(f, "spd_violation_count={}", self.spd_violation_count)
    }
}

pub fn field_error(field: &TensorField, reference: &TensorField) -> Result<ErrorReport> {
    if field.dims() != reference.dims() {
        return Err(Error::DimensionMismatch(format!(
            "field extents {:?} vs reference extents {:?}",
            field.dims().extents(),
            reference.dims().extents()
        )));
    }
    let n = field.len();
    let mut geo_sum = 0.0;
    let mut geo_count = 0usize;
    let mut frob_sum = 0.0;
    let mut max_pointwise: f64 = 0.0;
    let mut violations = 0usize;
    for i in 0..n {
        frob_sum += (field.matrix(i) - reference.matrix(i)).norm_squared();
        match (field.spd(i), reference.spd(i)) {
            (Ok(p), Ok(q)) => {
                let d = geodesic_distance(&p, &q);
                geo_sum += d * d;
                geo_count += 1;
                max_pointwise = max_pointwise.max(d);
            }
            (p, q) => violations += usize::from(p.is_err()) + usize::from(q.is_err()),
        }
    }
    Ok(ErrorReport {
        riemannian_mse: if geo_count > 0 { geo_sum / geo_count as f64 } else { 0.0 },
        frobenius_mse: frob_sum / n as f64,
        max_pointwise,
        spd_violation_count: violations,
    })
}

/// Discrete volume of the graph: `Σ √det γ · voxel volume`.
pub fn volume_energy(field: &TensorField) -> Result<f64> {
    Ok(FieldGeometry::new(field)?.volume())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpdViolations {
    pub count: usize,
    /// Smallest eigenvalue found anywhere in the field.
    pub worst_min_eigenvalue: f64,
}

pub fn spd_violations(field: &TensorField) -> SpdViolations {
    let mut count = 0;
    let mut worst = f64::INFINITY;
    for i in 0..field.len() {
        let s = spd_check(&field.matrix(i));
        if !s.is_spd {
            count += 1;
        }
        worst = worst.min(s.min_eigenvalue);
    }
    SpdViolations {
        count,
        worst_min_eigenvalue: worst,
    }
}
