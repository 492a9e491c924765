//! Duplication matrices and the Kronecker-product forms of the `P(3)`
//! geometry.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, Matrix3, Matrix6};

use super::{SpdMatrix, VECH_INDEX};
use crate::error::{Error, Result};

/// `D_n` with `vec A = D_n υ(A)` and its Moore–Penrose inverse
/// `D_n⁺ = (D_nᵀD_n)⁻¹D_nᵀ`.
///
/// The half-vectorization lists the diagonal first, then each superdiagonal in
/// turn. For `n = 3` this is `[a₁₁, a₂₂, a₃₃, a₁₂, a₂₃, a₁₃]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DuplicationMatrix {
    pub n: usize,
    pub d: DMatrix<f64>,
    pub d_plus: DMatrix<f64>,
}

pub const MAX_DUPLICATION_ORDER: usize = 8;

/// Matrix positions `(row, col)`, `row ≤ col`, in half-vectorization order.
pub fn vech_positions(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|offset| (0..n - offset).map(move |i| (i, i + offset)))
        .collect()
}

pub fn duplication_matrix(n: usize) -> Result<DuplicationMatrix> {
    if !(1..=MAX_DUPLICATION_ORDER).contains(&n) {
        return Err(Error::Argument(format!(
            "duplication matrix order must be in 1..={MAX_DUPLICATION_ORDER}, got {n}"
        )));
    }
    let positions = vech_positions(n);
    let dim = positions.len();
    let mut d = DMatrix::zeros(n * n, dim);
    for (col, &(i, j)) in positions.iter().enumerate() {
        // Column-stacked vec: entry (r, c) lives at r + c·n.
        d[(i + j * n, col)] = 1.0;
        d[(j + i * n, col)] = 1.0;
    }
    // DᵀD is diagonal (1 for diagonal coordinates, 2 otherwise), so the
    // pseudo-inverse is a row scaling of Dᵀ.
    let dtd = d.transpose() * &d;
    let mut d_plus = d.transpose();
    for (row, mut r) in d_plus.row_iter_mut().enumerate() {
        r /= dtd[(row, row)];
    }
    Ok(DuplicationMatrix { n, d, d_plus })
}

impl DuplicationMatrix {
    pub fn dim(&self) -> usize {
        self.d.ncols()
    }

    pub fn vec(a: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_column_slice(a.as_slice())
    }

    pub fn vech(&self, a: &DMatrix<f64>) -> DVector<f64> {
        &self.d_plus * Self::vec(a)
    }
}

fn d3() -> &'static DuplicationMatrix {
    static D3: OnceLock<DuplicationMatrix> = OnceLock::new();
    D3.get_or_init(|| duplication_matrix(3).expect("n = 3 is in range"))
}

fn dense(m: &Matrix3<f64>) -> DMatrix<f64> {
    DMatrix::from_column_slice(3, 3, m.as_slice())
}

fn to_matrix6(m: &DMatrix<f64>) -> Matrix6<f64> {
    Matrix6::from_column_slice(m.as_slice())
}

/// `G = D₃ᵀ(P⁻¹⊗P⁻¹)D₃`.
pub fn metric_tensor_kron(p: &SpdMatrix) -> Matrix6<f64> {
    let q = dense(&p.inverse());
    let d = &d3().d;
    to_matrix6(&(d.transpose() * q.kronecker(&q) * d))
}

/// `G⁻¹ = D₃⁺(P⊗P)D₃⁺ᵀ`.
pub fn inverse_metric_kron(p: &SpdMatrix) -> Matrix6<f64> {
    let pm = dense(p.matrix());
    let dp = &d3().d_plus;
    to_matrix6(&(dp * pm.kronecker(&pm) * dp.transpose()))
}

/// Trace-dual basis: `tr(E^γ B) = υ(B)^γ` for every symmetric `B`.
pub fn dual_basis(gamma: usize) -> Matrix3<f64> {
    let (i, j) = VECH_INDEX[gamma];
    let mut e = Matrix3::zeros();
    if i == j {
        e[(i, i)] = 1.0;
    } else {
        e[(i, j)] = 0.5;
        e[(j, i)] = 0.5;
    }
    e
}

/// `Γ^γ_{αβ} = −[D₃ᵀ(P⁻¹⊗E^γ)D₃]_{αβ}`.
pub fn christoffel_kron(p: &SpdMatrix) -> [Matrix6<f64>; 6] {
    let q = dense(&p.inverse());
    let d = &d3().d;
    std::array::from_fn(|gamma| {
        let e = dense(&dual_basis(gamma));
        -to_matrix6(&(d.transpose() * q.kronecker(&e) * d))
    })
}
