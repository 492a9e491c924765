#![allow(dead_code)]

use nalgebra::{Matrix3, Matrix6, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use spdflow::geometry::{metric_tensor, unvech, SpdMatrix, Vech};
use spdflow::{Dims, TensorField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng) -> Matrix3<f64> {
    Matrix3::from_fn(|_, _| rng.sample(StandardNormal))
}

pub fn random_symmetric(rng: &mut impl Rng) -> Matrix3<f64> {
    let a = random_matrix(rng);
    let s = a + a.transpose();
    // Rebuild from the upper triangle so symmetry is exact.
    let v = Vech::from_fn(|k, _| {
        let (i, j) = spdflow::geometry::VECH_INDEX[k];
        s[(i, j)]
    });
    unvech(&v)
}

pub fn random_rotation(rng: &mut impl Rng) -> Matrix3<f64> {
    let qr = random_matrix(rng).qr();
    let mut q = qr.q();
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// SPD matrix with log10 eigenvalues spread over at most `decades`.
pub fn random_spd_with(rng: &mut impl Rng, decades: f64) -> SpdMatrix {
    let r = random_rotation(rng);
    let lo: f64 = rng.random_range(-2.0..1.0);
    let lambda = Vector3::from_fn(|_, _| 10f64.powf(lo + rng.random_range(0.0..decades)));
    let m = r * Matrix3::from_diagonal(&lambda) * r.transpose();
    let v = Vech::from_fn(|k, _| {
        let (i, j) = spdflow::geometry::VECH_INDEX[k];
        m[(i, j)]
    });
    SpdMatrix::from_vech(&v).expect("well-conditioned by construction")
}

/// Condition number ≤ 10⁶.
pub fn random_spd(rng: &mut impl Rng) -> SpdMatrix {
    random_spd_with(rng, 6.0)
}

pub fn random_invertible(rng: &mut impl Rng) -> Matrix3<f64> {
    loop {
        let l = random_matrix(rng);
        let s = l.singular_values();
        if s.min() > 0.2 && s.max() / s.min() < 20.0 {
            return l;
        }
    }
}

pub fn congruence(l: &Matrix3<f64>, p: &Matrix3<f64>) -> Matrix3<f64> {
    let m = l * p * l.transpose();
    (m + m.transpose()) * 0.5
}

pub fn spd_of(m: &Matrix3<f64>) -> SpdMatrix {
    SpdMatrix::new(congruence(&Matrix3::identity(), m)).unwrap()
}

/// Smooth analytic field on a grid covering [0, 1]^m with node spacing
/// 1/(n − 1).
pub fn smooth_field(extents: &[usize]) -> TensorField {
    let dims = Dims::new(extents).unwrap();
    let m = extents.len();
    let spacing: Vec<f64> = extents.iter().map(|&n| 1.0 / (n - 1) as f64).collect();
    TensorField::from_fn(dims, &spacing, |c| {
        let x = c[0] as f64 * spacing[0];
        let y = c[1] as f64 * spacing[1];
        let z = if m == 3 { c[2] as f64 * spacing[2] } else { 0.0 };
        smooth_value(x, y, z)
    })
    .unwrap()
}

pub fn smooth_value(x: f64, y: f64, z: f64) -> SpdMatrix {
    let theta = 0.8 * x + 0.5 * y * y + 0.3 * z;
    let r = spdflow::linalg::rotation_z(theta);
    let d = Matrix3::from_diagonal(&Vector3::new(
        2.0 + 0.5 * (2.0 * y).sin(),
        1.0 + 0.3 * x * x,
        0.8 + 0.2 * (x + z).cos(),
    ));
    spd_of(&(r * d * r.transpose()))
}

/// Field with small random smooth-ish perturbations; deterministic per seed.
pub fn random_field(extents: &[usize], seed: u64) -> TensorField {
    let dims = Dims::new(extents).unwrap();
    let mut rng = rng(seed);
    let spacing = vec![1.0; extents.len()];
    TensorField::from_fn(dims, &spacing, |_| {
        let base = Matrix3::from_diagonal(&Vector3::new(2.0, 1.5, 1.0));
        let w = random_symmetric(&mut rng) * 0.15;
        let r = spdflow::linalg::sqrtm(&base);
        spd_of(&(r * spdflow::linalg::expm(&w) * r))
    })
    .unwrap()
}
pub mod oracle;

/// SPD matrix with eigenvalues log-uniform in `[lo, hi]`.
pub fn random_spd_in(rng: &mut impl Rng, lo: f64, hi: f64) -> SpdMatrix {
    let r = random_rotation(rng);
    let (a, b) = (lo.log10(), hi.log10());
    let lambda = Vector3::from_fn(|_, _| 10f64.powf(rng.random_range(a..=b)));
    let m = r * Matrix3::from_diagonal(&lambda) * r.transpose();
    spd_of(&m)
}

/// Two-region ground truth (diag(3,1,1) and its quarter turn) on an `n × n`
/// grid and its congruence-noised copy.
pub fn noisy_two_region(n: usize, sigma: f64, seed: u64) -> (TensorField, TensorField) {
    use spdflow::io::{add_noise, generate_synthetic, Pattern, SyntheticSpec};
    let spec = SyntheticSpec {
        pattern: Pattern::two_region(SpdMatrix::diagonal(3.0, 1.0, 1.0).unwrap()).unwrap(),
        dims: Dims::new(&[n, n]).unwrap(),
        spacing: vec![1.0, 1.0],
    };
    let truth = generate_synthetic(&spec).unwrap();
    let noisy = add_noise(&truth, sigma, seed).unwrap();
    (truth, noisy)
}

/// `½ G^{γδ}(∂_α G_{δβ} + ∂_β G_{δα} − ∂_δ G_{αβ})` with central differences
/// of step `h` in υ-coordinates.
pub fn christoffel_fd(p: &SpdMatrix, h: f64) -> [Matrix6<f64>; 6] {
    let v = p.vech();
    let dg: Vec<Matrix6<f64>> = (0..6)
        .map(|k| {
            let mut plus = v;
            let mut minus = v;
            plus[k] += h;
            minus[k] -= h;
            let gp = metric_tensor(&SpdMatrix::from_vech(&plus).unwrap()).g;
            let gm = metric_tensor(&SpdMatrix::from_vech(&minus).unwrap()).g;
            (gp - gm) / (2.0 * h)
        })
        .collect();
    let ginv = metric_tensor(p).g.try_inverse().unwrap();
    std::array::from_fn(|gamma| {
        Matrix6::from_fn(|a, b| {
            let mut acc = 0.0;
            for d in 0..6 {
                acc += ginv[(gamma, d)] * (dg[a][(d, b)] + dg[b][(d, a)] - dg[d][(a, b)]);
            }
            0.5 * acc
        })
    })
}
