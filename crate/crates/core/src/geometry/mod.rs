//! Riemannian geometry of `P(3)` under the affine-invariant metric
//! `ds² = tr(P⁻¹ dP P⁻¹ dP)`.
//!
//! Points are parametrized by their half-vectorization
//! `υ(P) = [P₁₁, P₂₂, P₃₃, P₁₂, P₂₃, P₁₃]`. In these coordinates the metric
//! tensor is `G = Dᵀ(P⁻¹⊗P⁻¹)D`, its inverse is `D⁺(P⊗P)D⁺ᵀ`, and
//! `det G = 8·det(P)⁻⁴`.
//!
//! The per-voxel routines ([`metric_tensor`], [`inverse_metric_tensor`],
//! [`christoffel`]) use closed forms. The Kronecker-product routes in
//! [`duplication`] compute the same objects from the duplication matrix and
//! are kept for cross-validation.

mod christoffel;
pub mod duplication;

pub use christoffel::{christoffel, ChristoffelSet};
pub use duplication::{duplication_matrix, DuplicationMatrix};

use nalgebra::{Matrix3, Matrix6, Vector6};

use crate::error::{Error, Result};
use crate::linalg;

/// Half-vectorization of a symmetric 3×3 matrix, ordered
/// `[P₁₁, P₂₂, P₃₃, P₁₂, P₂₃, P₁₃]`.
pub type Vech = Vector6<f64>;

/// Matrix position `(row, col)` of each υ-coordinate.
pub const VECH_INDEX: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)];

/// Relative eigenvalue floor below which a matrix is treated as outside the
/// cone: `λ_min < 1e-12 · tr(P)/3`.
pub const CONDITION_GUARD: f64 = 1e-12;

/// `υ(A)`. Fails unless `A` is exactly symmetric.
pub fn vech(a: &Matrix3<f64>) -> Result<Vech> {
    if a != &a.transpose() {
        return Err(Error::Argument(format!(
            "vech of a non-symmetric matrix (max asymmetry {:e})",
            (a - a.transpose()).abs().max()
        )));
    }
    Ok(vech_upper(a))
}

/// `υ(A)` read from the upper triangle, without a symmetry check.
pub fn vech_upper(a: &Matrix3<f64>) -> Vech {
    Vech::from_fn(|k, _| {
        let (i, j) = VECH_INDEX[k];
        a[(i, j)]
    })
}

pub fn unvech(v: &Vech) -> Matrix3<f64> {
    Matrix3::new(v[0], v[3], v[5], v[3], v[1], v[4], v[5], v[4], v[2])
}

/// Result of an SPD membership test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpdStatus {
    pub is_spd: bool,
    pub min_eigenvalue: f64,
}

/// Symmetric eigensolve; `is_spd` iff the smallest eigenvalue is positive.
pub fn spd_check(p: &Matrix3<f64>) -> SpdStatus {
    let min_eigenvalue = linalg::min_eigenvalue(p);
    SpdStatus {
        is_spd: min_eigenvalue > 0.0,
        min_eigenvalue,
    }
}

/// A 3×3 symmetric positive-definite matrix.
///
/// Construction enforces exact symmetry and the [`CONDITION_GUARD`]; every
/// geometric quantity below is only evaluated on values of this type.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpdMatrix(Matrix3<f64>);

impl SpdMatrix {
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        if m != m.transpose() {
            return Err(Error::Argument("matrix is not symmetric".into()));
        }
        let min_eigenvalue = linalg::min_eigenvalue(&m);
        let scale = m.trace() / 3.0;
        if !(min_eigenvalue > 0.0) || min_eigenvalue < CONDITION_GUARD * scale {
            return Err(Error::NotPositiveDefinite { min_eigenvalue });
        }
        Ok(Self(m))
    }

    pub fn from_vech(v: &Vech) -> Result<Self> {
        Self::new(unvech(v))
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    pub fn diagonal(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(Matrix3::from_diagonal(&nalgebra::Vector3::new(a, b, c)))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn vech(&self) -> Vech {
        vech_upper(&self.0)
    }

    /// `det P` by cofactor expansion.
    pub fn det(&self) -> f64 {
        linalg::det3(&self.0)
    }

    /// `adj(P) = det(P)·P⁻¹`.
    pub fn adjugate(&self) -> Matrix3<f64> {
        linalg::adjugate3(&self.0)
    }

    pub fn inverse(&self) -> Matrix3<f64> {
        self.adjugate() / self.det()
    }
}

/// `⟨A, B⟩_P = tr(P⁻¹ A P⁻¹ B)`.
pub fn inner_product(p: &SpdMatrix, a: &Matrix3<f64>, b: &Matrix3<f64>) -> Result<f64> {
    if a != &a.transpose() || b != &b.transpose() {
        return Err(Error::Argument("inner product arguments must be symmetric".into()));
    }
    let q = p.inverse();
    Ok((q * a * q * b).trace())
}

/// The metric tensor `G(P)` at a base point.
#[derive(Clone, Copy, Debug)]
pub struct MetricTensor {
    pub g: Matrix6<f64>,
    pub base_point: SpdMatrix,
}

/// `G_{αβ}(P) = tr(P⁻¹ A_α P⁻¹ A_β)` where `A_α` is the symmetric basis
/// matrix of coordinate `α`.
pub fn metric_tensor(p: &SpdMatrix) -> MetricTensor {
    MetricTensor {
        g: metric_from_inverse(&p.inverse()),
        base_point: *p,
    }
}

/// Metric tensor entries from `Q = P⁻¹`.
pub(crate) fn metric_from_inverse(q: &Matrix3<f64>) -> Matrix6<f64> {
    // A_α = Σ e_a e_bᵀ over its (a, b) terms, so
    // tr(Q e_a e_bᵀ Q e_c e_dᵀ) = Q_da Q_bc.
    let mut g = Matrix6::zeros();
    for alpha in 0..6 {
        for beta in alpha..6 {
            let mut acc = 0.0;
            for (a, b) in basis_terms(alpha) {
                for (c, d) in basis_terms(beta) {
                    acc += q[(d, a)] * q[(b, c)];
                }
            }
            g[(alpha, beta)] = acc;
            g[(beta, alpha)] = acc;
        }
    }
    g
}

fn basis_terms(alpha: usize) -> impl Iterator<Item = (usize, usize)> {
    let (i, j) = VECH_INDEX[alpha];
    let second = (i != j).then_some((j, i));
    std::iter::once((i, j)).chain(second)
}

/// Explicit inverse metric `G⁻¹(P)`, entry `(ij),(kl)` equal to
/// `½(P_ik P_jl + P_il P_jk)`.
pub fn inverse_metric_tensor(p: &SpdMatrix) -> Matrix6<f64> {
    let v = p.vech();
    let (p1, p2, p3, p4, p5, p6) = (v[0], v[1], v[2], v[3], v[4], v[5]);
    let h = 0.5;
    Matrix6::from_row_slice(&[
        p1 * p1, p4 * p4, p6 * p6, p1 * p4, p4 * p6, p1 * p6,
        p4 * p4, p2 * p2, p5 * p5, p2 * p4, p2 * p5, p4 * p5,
        p6 * p6, p5 * p5, p3 * p3, p6 * p5, p5 * p3, p6 * p3,
        p1 * p4, p2 * p4, p6 * p5, h * (p1 * p2 + p4 * p4), h * (p4 * p5 + p6 * p2), h * (p1 * p5 + p4 * p6),
        p4 * p6, p2 * p5, p5 * p3, h * (p4 * p5 + p6 * p2), h * (p5 * p5 + p2 * p3), h * (p6 * p5 + p4 * p3),
        p1 * p6, p4 * p5, p6 * p3, h * (p1 * p5 + p4 * p6), h * (p6 * p5 + p4 * p3), h * (p1 * p3 + p6 * p6),
    ])
}

/// `det G(P) = 2^{n(n-1)/2} det(P)^{-(n+1)}`, i.e. `8·det(P)⁻⁴` for `n = 3`.
pub fn metric_determinant(p: &SpdMatrix) -> f64 {
    8.0 / p.det().powi(4)
}
