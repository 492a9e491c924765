use nalgebra::Matrix3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::TensorField;
use crate::geometry::{spd_check, unvech, vech_upper, Vech};
use crate::linalg;

/// Attempts per voxel before additive noise gives up.
const MAX_REDRAWS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum NoiseModel {
    /// `P ← P^{1/2} exp(σW) P^{1/2}`, `W = (X + Xᵀ)/2`, `X` i.i.d. N(0, 1).
    #[default]
    Congruence,
    /// `υ(P) ← υ(P) + σ·N(0, I₆)`, redrawn until the result is SPD.
    Additive,
}

impl NoiseModel {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Congruence => "congruence",
            Self::Additive => "additive",
        }
    }
}

impl std::str::FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "congruence" => Ok(Self::Congruence),
            "additive" => Ok(Self::Additive),
            other => Err(Error::Argument(format!("unknown noise model '{other}'"))),
        }
    }
}

/// ChaCha8 seeded with `seed`, one stream per voxel index.
fn voxel_rng(seed: u64, voxel: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(voxel as u64);
    rng
}

fn symmetric_gaussian(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
    let x = Matrix3::from_fn(|_, _| StandardNormal.sample(rng));
    linalg::symmetrize(&x)
}

/// Congruence-exponential noise; see [`NoiseModel::Congruence`].
pub fn add_noise(field: &TensorField, sigma: f64, seed: u64) -> Result<TensorField> {
    add_noise_with(field, sigma, seed, NoiseModel::Congruence)
}

pub fn add_noise_with(
    field: &TensorField,
    sigma: f64,
    seed: u64,
    model: NoiseModel,
) -> Result<TensorField> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::Argument(format!("noise sigma must be non-negative, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(field.clone());
    }
    let data = (0..field.len())
        .into_par_iter()
        .map(|i| {
            let mut rng = voxel_rng(seed, i);
            let p = field.get(i);
            match model {
                NoiseModel::Congruence => {
                    let root = linalg::sqrtm(&unvech(p));
                    let e = linalg::expm(&(symmetric_gaussian(&mut rng) * sigma));
                    Ok(vech_upper(&linalg::symmetrize(&(root * e * root))))
                }
                NoiseModel::Additive => (0..MAX_REDRAWS)
                    .map(|_| p + Vech::from_fn(|_, _| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        sigma * z
                    }))
                    .find(|v| spd_check(&unvech(v)).is_spd)
                    .ok_or_else(|| {
                        Error::Numerical(format!(
                            "additive noise left the SPD cone {MAX_REDRAWS} times at voxel {i}"
                        ))
                    }),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    field.with_data(data)
}
