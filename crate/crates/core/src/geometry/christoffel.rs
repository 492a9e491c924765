use nalgebra::{Matrix6, Vector6};

use super::{vech_upper, SpdMatrix};

/// Christoffel symbols `Γ^γ_{αβ}` of `P(3)` at a base point, stored as six
/// symmetric 6×6 matrices indexed by the upper index `γ`.
#[derive(Clone, Copy, Debug)]
pub struct ChristoffelSet {
    pub gammas: [Matrix6<f64>; 6],
    pub base_point: SpdMatrix,
}

impl ChristoffelSet {
    /// `Γ^i_{jk} u^j v^k` for each upper index `i`.
    pub fn contract(&self, u: &Vector6<f64>, v: &Vector6<f64>) -> Vector6<f64> {
        Vector6::from_fn(|i, _| u.dot(&(self.gammas[i] * v)))
    }
}

// Nonzero upper-triangle entries of each Γ^γ before scaling, as
// (row, col, s-index, multiplier), 0-based. Γ¹..Γ³ carry −1/ρ, Γ⁴..Γ⁶ carry
// −1/(2ρ).
const PATTERN: [&[(usize, usize, usize, f64)]; 6] = [
    &[(0, 0, 0, 1.0), (0, 3, 3, 1.0), (0, 5, 5, 1.0), (3, 3, 1, 1.0), (3, 5, 4, 1.0), (5, 5, 2, 1.0)],
    &[(1, 1, 1, 1.0), (1, 3, 3, 1.0), (1, 4, 4, 1.0), (3, 3, 0, 1.0), (3, 4, 5, 1.0), (4, 4, 2, 1.0)],
    &[(2, 2, 2, 1.0), (2, 4, 4, 1.0), (2, 5, 5, 1.0), (4, 4, 1, 1.0), (4, 5, 3, 1.0), (5, 5, 0, 1.0)],
    &[
        (0, 1, 3, 1.0), (0, 3, 0, 1.0), (0, 4, 5, 1.0),
        (1, 3, 1, 1.0), (1, 5, 4, 1.0),
        (3, 3, 3, 2.0), (3, 4, 4, 1.0), (3, 5, 5, 1.0),
        (4, 5, 2, 1.0),
    ],
    &[
        (1, 2, 4, 1.0), (1, 4, 1, 1.0), (1, 5, 3, 1.0),
        (2, 3, 5, 1.0), (2, 4, 2, 1.0),
        (3, 4, 3, 1.0), (3, 5, 0, 1.0),
        (4, 4, 4, 2.0), (4, 5, 5, 1.0),
    ],
    &[
        (0, 2, 5, 1.0), (0, 4, 3, 1.0), (0, 5, 0, 1.0),
        (2, 3, 4, 1.0), (2, 5, 2, 1.0),
        (3, 4, 1, 1.0), (3, 5, 3, 1.0),
        (4, 5, 4, 1.0),
        (5, 5, 5, 2.0),
    ],
];

/// Closed-form Christoffel symbols from `ρ = det P` and `s = υ(adj P)`.
///
/// Every nonzero symbol is an entry of `P⁻¹` or half of one.
pub fn christoffel(p: &SpdMatrix) -> ChristoffelSet {
    let rho = p.det();
    let s = vech_upper(&p.adjugate());
    let mut gammas = [Matrix6::zeros(); 6];
    for (k, (gamma, entries)) in gammas.iter_mut().zip(PATTERN).enumerate() {
        let scale = if k < 3 { -1.0 / rho } else { -0.5 / rho };
        for &(r, c, si, mult) in entries {
            let value = scale * mult * s[si];
            gamma[(r, c)] = value;
            gamma[(c, r)] = value;
        }
    }
    ChristoffelSet {
        gammas,
        base_point: *p,
    }
}
