//! Naive reference implementation of the field operators and flow steps.
//!
//! Shares no code with the library beyond the field container: the metric
//! comes from `tr(Q A Q B)` with an LU inverse, Christoffel contractions from
//! `Γ(U, V) = −½(U Q V + V Q U)`, and every stencil is written out with its
//! own index arithmetic.

use nalgebra::{DMatrix, Matrix3};
use spdflow::geometry::{unvech, Vech};
use spdflow::TensorField;

pub struct Oracle<'a> {
    field: &'a TensorField,
    shape: [usize; 3],
    m: usize,
}

fn basis(alpha: usize) -> Matrix3<f64> {
    const POS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)];
    let (i, j) = POS[alpha];
    let mut a = Matrix3::zeros();
    a[(i, j)] = 1.0;
    a[(j, i)] = 1.0;
    a
}

fn vech_of(a: &Matrix3<f64>) -> Vech {
    Vech::new(a[(0, 0)], a[(1, 1)], a[(2, 2)], a[(0, 1)], a[(1, 2)], a[(0, 2)])
}

impl<'a> Oracle<'a> {
    pub fn new(field: &'a TensorField) -> Self {
        let mut shape = [1; 3];
        shape[..field.m()].copy_from_slice(field.dims().extents());
        Self {
            field,
            shape,
            m: field.m(),
        }
    }

    fn at(&self, c: [i64; 3]) -> usize {
        let cl = |v: i64, n: usize| v.clamp(0, n as i64 - 1) as usize;
        let x = cl(c[0], self.shape[0]);
        let y = cl(c[1], self.shape[1]);
        let z = cl(c[2], self.shape[2]);
        x + self.shape[0] * (y + self.shape[1] * z)
    }

    fn coords(&self, i: usize) -> [i64; 3] {
        let nx = self.shape[0];
        let ny = self.shape[1];
        [(i % nx) as i64, ((i / nx) % ny) as i64, (i / (nx * ny)) as i64]
    }

    fn shifted(&self, i: usize, axis: usize, d: i64) -> usize {
        let mut c = self.coords(i);
        c[axis] += d;
        self.at(c)
    }

    fn p(&self, i: usize) -> Matrix3<f64> {
        unvech(self.field.get(i))
    }

    fn q(&self, i: usize) -> Matrix3<f64> {
        self.p(i).try_inverse().expect("invertible")
    }

    /// ∂_axis P as a matrix.
    pub fn derivative(&self, i: usize, axis: usize) -> Matrix3<f64> {
        let h = self.field.spacing()[axis];
        (self.p(self.shifted(i, axis, 1)) - self.p(self.shifted(i, axis, -1))) / (2.0 * h)
    }

    pub fn metric(&self, i: usize) -> DMatrix<f64> {
        let q = self.q(i);
        DMatrix::from_fn(6, 6, |a, b| (q * basis(a) * q * basis(b)).trace())
    }

    pub fn gamma(&self, i: usize) -> DMatrix<f64> {
        let q = self.q(i);
        DMatrix::from_fn(self.m, self.m, |a, b| {
            let da = self.derivative(i, a);
            let db = self.derivative(i, b);
            let delta = if a == b { 1.0 } else { 0.0 };
            delta + (q * da * q * db).trace()
        })
    }

    fn coefficient(&self, i: usize) -> DMatrix<f64> {
        let g = self.gamma(i);
        g.clone().try_inverse().unwrap() * g.determinant().sqrt()
    }

    pub fn laplace_beltrami(&self, i: usize) -> Vech {
        let mut acc = Matrix3::zeros();
        let c0 = self.coefficient(i);
        let h = self.field.spacing();
        for a in 0..self.m {
            let f = self.shifted(i, a, 1);
            let b_ = self.shifted(i, a, -1);
            let cf = self.coefficient(f);
            let cb = self.coefficient(b_);
            let flux_f = (cf[(a, a)] + c0[(a, a)]) / 2.0 * (self.p(f) - self.p(i));
            let flux_b = (c0[(a, a)] + cb[(a, a)]) / 2.0 * (self.p(i) - self.p(b_));
            acc += (flux_f - flux_b) / (h[a] * h[a]);
            for b in 0..self.m {
                if b == a {
                    continue;
                }
                let corner = |sa: i64, sb: i64| {
                    let mut c = self.coords(i);
                    c[a] += sa;
                    let mut c = self.coords(self.at(c));
                    c[b] += sb;
                    self.p(self.at(c))
                };
                let upper = cf[(a, b)] * (corner(1, 1) - corner(1, -1)) / (2.0 * h[b]);
                let lower = cb[(a, b)] * (corner(-1, 1) - corner(-1, -1)) / (2.0 * h[b]);
                acc += (upper - lower) / (2.0 * h[a]);
            }
        }
        vech_of(&acc) / self.gamma(i).determinant().sqrt()
    }

    /// `Σ γ^{αβ} Γ(∂_α P, ∂_β P)`.
    pub fn christoffel_term(&self, i: usize) -> Vech {
        let q = self.q(i);
        let ginv = self.gamma(i).try_inverse().unwrap();
        let mut acc = Matrix3::zeros();
        for a in 0..self.m {
            for b in 0..self.m {
                let u = self.derivative(i, a);
                let v = self.derivative(i, b);
                acc -= ginv[(a, b)] * 0.5 * (u * q * v + v * q * u);
            }
        }
        vech_of(&acc)
    }

    pub fn mean_curvature(&self, i: usize) -> Vech {
        (self.laplace_beltrami(i) + self.christoffel_term(i)) / self.m as f64
    }

    pub fn magnitude(&self, i: usize) -> f64 {
        let q = self.q(i);
        let ginv = self.gamma(i).try_inverse().unwrap();
        let mut s = 0.0;
        for a in 0..self.m {
            for b in 0..self.m {
                s += ginv[(a, b)] * (q * self.derivative(i, a) * q * self.derivative(i, b)).trace();
            }
        }
        s.max(0.0).sqrt()
    }

    /// Product-kernel Gaussian blur, written as one nested sum.
    pub fn smooth(&self, values: &[f64], sigma: f64) -> Vec<f64> {
        if sigma == 0.0 {
            return values.to_vec();
        }
        let r = (3.0 * sigma).ceil() as i64;
        let w: Vec<f64> = (-r..=r).map(|t| (-((t * t) as f64) / (2.0 * sigma * sigma)).exp()).collect();
        let total: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|x| x / total).collect();
        let zr = if self.m == 3 { r } else { 0 };
        (0..values.len())
            .map(|i| {
                let c = self.coords(i);
                let mut acc = 0.0;
                for tz in -zr..=zr {
                    for ty in -r..=r {
                        for tx in -r..=r {
                            let wz = if self.m == 3 { w[(tz + r) as usize] } else { 1.0 };
                            let weight = w[(tx + r) as usize] * w[(ty + r) as usize] * wz;
                            acc += weight * values[self.at([c[0] + tx, c[1] + ty, c[2] + tz])];
                        }
                    }
                }
                acc
            })
            .collect()
    }

    pub fn edge(&self, k: f64, sigma: f64) -> Vec<f64> {
        let mags: Vec<f64> = (0..self.field.len()).map(|i| self.magnitude(i)).collect();
        self.smooth(&mags, sigma)
            .into_iter()
            .map(|s| k * k / (k * k + s * s))
            .collect()
    }

    pub fn shock(&self, i: usize, c: &[f64]) -> Vech {
        let ginv = self.gamma(i).try_inverse().unwrap();
        let h = self.field.spacing();
        let mut acc = Matrix3::zeros();
        for a in 0..self.m {
            let dc = (c[self.shifted(i, a, 1)] - c[self.shifted(i, a, -1)]) / (2.0 * h[a]);
            for b in 0..self.m {
                acc += ginv[(a, b)] * dc * self.derivative(i, b);
            }
        }
        vech_of(&acc)
    }

    /// Right-hand side of `kind` ∈ {tv, rmc, modified_rmc, self_snakes}.
    pub fn rhs(&self, kind: &str, k: f64, sigma: f64) -> Vec<Vech> {
        let n = self.field.len();
        let c = self.edge(k, sigma);
        (0..n)
            .map(|i| {
                let h = self.mean_curvature(i);
                match kind {
                    "tv" => h,
                    "rmc" => h * self.magnitude(i),
                    "modified_rmc" => h * (c[i] * self.magnitude(i)),
                    "self_snakes" => h * (c[i] * self.magnitude(i)) + self.shock(i, &c),
                    other => panic!("unknown kind {other}"),
                }
            })
            .collect()
    }

    pub fn step(&self, kind: &str, dt: f64, k: f64, sigma: f64) -> Vec<Vech> {
        self.rhs(kind, k, sigma)
            .into_iter()
            .enumerate()
            .map(|(i, r)| self.field.get(i) + r * dt)
            .collect()
    }
}

pub fn max_diff(a: &[Vech], b: &[Vech]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs().max()).fold(0.0, f64::max)
}
