//! Discrete differential operators of a tensor field viewed as the graph
//! `x ↦ (x, P(x))` in the space-feature manifold `Ω × P(3)`.
//!
//! The target metric is block diagonal (Euclidean on the spatial block, the
//! affine-invariant metric on the tensor block), so the spatial components of
//! the immersion are the identity map with vanishing Christoffel symbols and
//! only the six tensor channels carry curvature.
//!
//! Stencils use replicate padding, i.e. a zero normal derivative at every
//! face:
//!
//! * gradients are central differences of the padded field, so a boundary
//!   voxel sees `(p₁ − p₀)/2h`;
//! * the Laplace–Beltrami operator is in flux form with face-averaged
//!   coefficients `√det γ·γ^{αα}`, and mixed terms use the four-corner cross
//!   stencil.

use nalgebra::{Matrix3, Matrix6, SMatrix};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::TensorField;
use crate::geometry::{christoffel, metric_tensor, SpdMatrix, Vech};

/// `∂_α p^i` as a 6×3 matrix, one column per spatial axis. Columns past `m`
/// are zero.
pub type Gradient = SMatrix<f64, 6, 3>;

/// Slack below zero tolerated in the Beltrami quadratic form before it is
/// treated as a broken inverse.
pub const QUADRATIC_FORM_SLACK: f64 = 1e-12;

/// Metric on the tensor block of the space-feature manifold.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum TargetGeometry {
    /// `tr(P⁻¹ dP P⁻¹ dP)` with its Christoffel symbols.
    #[default]
    AffineInvariant,
    /// `scale · I₆` with zero Christoffel symbols. `scale = 0` makes the
    /// induced metric exactly the identity.
    Euclidean { scale: f64 },
}

impl TargetGeometry {
    pub fn metric(&self, p: &SpdMatrix) -> Matrix6<f64> {
        match self {
            Self::AffineInvariant => metric_tensor(p).g,
            Self::Euclidean { scale } => Matrix6::identity() * *scale,
        }
    }

    /// `Σ_{αβ} γ^{αβ} Γ^i_{jk} ∂_α p^j ∂_β p^k`.
    fn christoffel_term(
        &self,
        p: &SpdMatrix,
        gradient: &Gradient,
        inverse: &Matrix3<f64>,
        m: usize,
    ) -> Vech {
        match self {
            Self::AffineInvariant => {
                let set = christoffel(p);
                let mut acc = Vech::zeros();
                for a in 0..m {
                    for b in 0..m {
                        let u = gradient.column(a).into_owned();
                        let v = gradient.column(b).into_owned();
                        acc += set.contract(&u, &v) * inverse[(a, b)];
                    }
                }
                acc
            }
            Self::Euclidean { .. } => Vech::zeros(),
        }
    }
}

/// Pull-back metric `γ = I_m + (∇p)ᵀ G ∇p` at a voxel.
///
/// Stored as 3×3; for `m = 2` the third row and column are those of the
/// identity, so `det` and `inverse` agree with the 2×2 block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InducedMetric {
    pub m: usize,
    pub gamma: Matrix3<f64>,
    pub inverse: Matrix3<f64>,
    pub det: f64,
}

impl InducedMetric {
    pub fn from_gradient(gradient: &Gradient, metric: &Matrix6<f64>, m: usize) -> Self {
        let mut gamma = Matrix3::identity() + gradient.transpose() * metric * gradient;
        // Exact symmetry; the product above can differ in the last bit.
        for a in 0..3 {
            for b in a + 1..3 {
                gamma[(b, a)] = gamma[(a, b)];
            }
        }
        let det = crate::linalg::det3(&gamma);
        let inverse = crate::linalg::adjugate3(&gamma) / det;
        Self {
            m,
            gamma,
            inverse,
            det,
        }
    }

    /// `√det γ · γ⁻¹`, the coefficient inside the divergence.
    pub fn flux_coefficient(&self) -> Matrix3<f64> {
        self.inverse * self.det.sqrt()
    }
}

/// Everything the stencils need at one voxel.
#[derive(Clone, Copy, Debug)]
pub struct VoxelGeometry {
    pub point: SpdMatrix,
    pub gradient: Gradient,
    pub metric: Matrix6<f64>,
    pub induced: InducedMetric,
}

impl VoxelGeometry {
    pub fn compute(field: &TensorField, voxel: usize, target: TargetGeometry) -> Result<Self> {
        let point = field.spd(voxel)?;
        let gradient = channel_gradient(field, voxel);
        let metric = target.metric(&point);
        let induced = InducedMetric::from_gradient(&gradient, &metric, field.m());
        Ok(Self {
            point,
            gradient,
            metric,
            induced,
        })
    }

    /// `γ^{αβ} g_{ij} ∂_α p^i ∂_β p^j`.
    pub fn quadratic_form(&self) -> f64 {
        let m = self.induced.m;
        let pulled = self.gradient.transpose() * self.metric * self.gradient;
        let mut q = 0.0;
        for a in 0..m {
            for b in 0..m {
                q += self.induced.inverse[(a, b)] * pulled[(a, b)];
            }
        }
        q
    }

    pub fn magnitude(&self) -> Result<f64> {
        let q = self.quadratic_form();
        if q < -QUADRATIC_FORM_SLACK {
            return Err(Error::Numerical(format!(
                "negative Beltrami quadratic form {q:e}"
            )));
        }
        Ok(q.max(0.0).sqrt())
    }
}

/// Central differences on the replicate-padded field, scaled by spacing.
pub fn channel_gradient(field: &TensorField, voxel: usize) -> Gradient {
    let dims = field.dims();
    let mut g = Gradient::zeros();
    for axis in 0..field.m() {
        let fwd = field.get(dims.offset(voxel, axis, 1));
        let bwd = field.get(dims.offset(voxel, axis, -1));
        g.set_column(axis, &((fwd - bwd) / (2.0 * field.h(axis))));
    }
    g
}

pub fn induced_metric(field: &TensorField, voxel: usize) -> Result<InducedMetric> {
    Ok(VoxelGeometry::compute(field, voxel, TargetGeometry::AffineInvariant)?.induced)
}

/// `Δ_M p^channel` at one voxel, `channel` in `0..6` (υ order).
pub fn laplace_beltrami(field: &TensorField, channel: usize, voxel: usize) -> Result<f64> {
    if channel >= 6 {
        return Err(Error::Argument(format!("channel index {channel} out of 0..6")));
    }
    let lookup = |i| VoxelGeometry::compute(field, i, TargetGeometry::AffineInvariant);
    Ok(laplace_beltrami_stencil(field, voxel, &lookup)?[channel])
}

/// Mean curvature vector `H` (tensor channels) at one voxel.
pub fn mean_curvature(field: &TensorField, voxel: usize) -> Result<Vech> {
    let target = TargetGeometry::AffineInvariant;
    let lookup = |i| VoxelGeometry::compute(field, i, target);
    mean_curvature_stencil(field, voxel, target, &lookup)
}

/// `γ^{αβ} g_{ij} ∂_α p^i ∂_β p^j` at one voxel.
pub fn beltrami_quadratic_form(field: &TensorField, voxel: usize) -> Result<f64> {
    Ok(VoxelGeometry::compute(field, voxel, TargetGeometry::AffineInvariant)?.quadratic_form())
}

/// Square root of [`beltrami_quadratic_form`].
pub fn beltrami_magnitude(field: &TensorField, voxel: usize) -> Result<f64> {
    VoxelGeometry::compute(field, voxel, TargetGeometry::AffineInvariant)?.magnitude()
}

fn laplace_beltrami_stencil<F>(field: &TensorField, voxel: usize, lookup: &F) -> Result<Vech>
where
    F: Fn(usize) -> Result<VoxelGeometry>,
{
    let dims = field.dims();
    let m = field.m();
    let centre = lookup(voxel)?;
    let coeff = centre.induced.flux_coefficient();
    let p = field.get(voxel);
    let mut acc = Vech::zeros();
    for a in 0..m {
        let h = field.h(a);
        let fwd_i = dims.offset(voxel, a, 1);
        let bwd_i = dims.offset(voxel, a, -1);
        let fwd = lookup(fwd_i)?;
        let bwd = lookup(bwd_i)?;
        let fwd_c = fwd.induced.flux_coefficient();
        let bwd_c = bwd.induced.flux_coefficient();

        let face_fwd = 0.5 * (fwd_c[(a, a)] + coeff[(a, a)]);
        let face_bwd = 0.5 * (coeff[(a, a)] + bwd_c[(a, a)]);
        acc += ((field.get(fwd_i) - p) * face_fwd - (p - field.get(bwd_i)) * face_bwd) / (h * h);

        for b in (0..m).filter(|&b| b != a) {
            let flux_fwd = fwd.gradient.column(b) * fwd_c[(a, b)];
            let flux_bwd = bwd.gradient.column(b) * bwd_c[(a, b)];
            acc += (flux_fwd - flux_bwd) / (2.0 * h);
        }
    }
    Ok(acc / centre.induced.det.sqrt())
}

fn mean_curvature_stencil<F>(
    field: &TensorField,
    voxel: usize,
    target: TargetGeometry,
    lookup: &F,
) -> Result<Vech>
where
    F: Fn(usize) -> Result<VoxelGeometry>,
{
    let m = field.m();
    let centre = lookup(voxel)?;
    let lb = laplace_beltrami_stencil(field, voxel, lookup)?;
    let term =
        target.christoffel_term(&centre.point, &centre.gradient, &centre.induced.inverse, m);
    Ok((lb + term) / m as f64)
}

/// Per-voxel geometry of a frozen field snapshot, computed once and shared by
/// all operators evaluated during a step.
#[derive(Clone, Debug)]
pub struct FieldGeometry<'a> {
    field: &'a TensorField,
    target: TargetGeometry,
    voxels: Vec<VoxelGeometry>,
}

impl<'a> FieldGeometry<'a> {
    pub fn new(field: &'a TensorField) -> Result<Self> {
        Self::with_target(field, TargetGeometry::AffineInvariant)
    }

    pub fn with_target(field: &'a TensorField, target: TargetGeometry) -> Result<Self> {
        let voxels = (0..field.len())
            .into_par_iter()
            .map(|i| VoxelGeometry::compute(field, i, target))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            field,
            target,
            voxels,
        })
    }

    pub fn field(&self) -> &TensorField {
        self.field
    }

    pub fn voxel(&self, index: usize) -> &VoxelGeometry {
        &self.voxels[index]
    }

    pub fn laplace_beltrami(&self, voxel: usize) -> Vech {
        let lookup = |i: usize| Ok(self.voxels[i]);
        laplace_beltrami_stencil(self.field, voxel, &lookup).expect("cached lookup is infallible")
    }

    pub fn mean_curvature(&self, voxel: usize) -> Vech {
        let lookup = |i: usize| Ok(self.voxels[i]);
        mean_curvature_stencil(self.field, voxel, self.target, &lookup)
            .expect("cached lookup is infallible")
    }

    /// Mean curvature at every voxel.
    pub fn mean_curvature_field(&self) -> Vec<Vech> {
        (0..self.voxels.len())
            .into_par_iter()
            .map(|i| self.mean_curvature(i))
            .collect()
    }

    /// Beltrami magnitude at every voxel.
    pub fn magnitude_field(&self) -> Result<Vec<f64>> {
        self.voxels.par_iter().map(VoxelGeometry::magnitude).collect()
    }

    /// `Σ √det γ · voxel volume`.
    pub fn volume(&self) -> f64 {
        let sum: f64 = self.voxels.iter().map(|v| v.induced.det.sqrt()).sum();
        sum * self.field.voxel_volume()
    }
}
