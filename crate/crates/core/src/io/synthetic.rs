use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::field::{Dims, TensorField};
use crate::geometry::{vech_upper, SpdMatrix};
use crate::linalg;

/// Exact 90° rotation about z.
pub fn quarter_turn_z() -> Matrix3<f64> {
    Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0)
}

fn rotate(r: &Matrix3<f64>, p: &SpdMatrix) -> Result<SpdMatrix> {
    let m = r * p.matrix() * r.transpose();
    SpdMatrix::from_vech(&vech_upper(&linalg::symmetrize(&m)))
}

/// Ground-truth patterns.
#[derive(Clone, Debug, PartialEq)]
pub enum Pattern {
    Constant { tensor: SpdMatrix },
    /// `left` for `x < nx/2`, `right` elsewhere: one sharp vertical interface.
    TwoRegion { left: SpdMatrix, right: SpdMatrix },
    /// `R_z(θ) P R_z(θ)ᵀ` with `θ = rate·(x + y)` in voxel units.
    SmoothRotation { tensor: SpdMatrix, rate: f64 },
    /// A horizontal band holding `tensor`, a vertical band holding its
    /// quarter-turn, their average where they cross, and the isotropic tensor
    /// of the same trace elsewhere.
    Crossing { tensor: SpdMatrix, width: usize },
}

impl Pattern {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Constant { .. } => "constant",
            Self::TwoRegion { .. } => "two_region",
            Self::SmoothRotation { .. } => "smooth_rotation",
            Self::Crossing { .. } => "crossing",
        }
    }

    /// Two regions whose right half is the quarter-turn of `tensor` about z.
    pub fn two_region(tensor: SpdMatrix) -> Result<Self> {
        Ok(Self::TwoRegion {
            left: tensor,
            right: rotate(&quarter_turn_z(), &tensor)?,
        })
    }
}

/// Pattern kinds without parameters, for command-line parsing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatternKind {
    Constant,
    TwoRegion,
    SmoothRotation,
    Crossing,
}

impl FromStr for PatternKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(Self::Constant),
            "two_region" => Ok(Self::TwoRegion),
            "smooth_rotation" => Ok(Self::SmoothRotation),
            "crossing" => Ok(Self::Crossing),
            other => Err(Error::Argument(format!("unknown pattern '{other}'"))),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub pattern: Pattern,
    pub dims: Dims,
    pub spacing: Vec<f64>,
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<TensorField> {
    let [nx, ny, _] = spec.dims.shape();
    let values: Vec<SpdMatrix> = match &spec.pattern {
        Pattern::Constant { tensor } => vec![*tensor; spec.dims.len()],
        Pattern::TwoRegion { left, right } => (0..spec.dims.len())
            .map(|i| if spec.dims.coords(i)[0] < nx / 2 { *left } else { *right })
            .collect(),
        Pattern::SmoothRotation { tensor, rate } => {
            if !rate.is_finite() {
                return Err(Error::Argument(format!("rotation rate must be finite, got {rate}")));
            }
            (0..spec.dims.len())
                .map(|i| {
                    let [x, y, _] = spec.dims.coords(i);
                    rotate(&linalg::rotation_z(rate * (x + y) as f64), tensor)
                })
                .collect::<Result<_>>()?
        }
        Pattern::Crossing { tensor, width } => {
            if *width == 0 {
                return Err(Error::Argument("crossing band width must be positive".into()));
            }
            let turned = rotate(&quarter_turn_z(), tensor)?;
            let mean = SpdMatrix::new(Matrix3::identity() * (tensor.matrix().trace() / 3.0))?;
            let mixed = SpdMatrix::from_vech(&((tensor.vech() + turned.vech()) * 0.5))?;
            let in_band = |c: usize, n: usize| (2 * c + 1).abs_diff(n) < *width;
            (0..spec.dims.len())
                .map(|i| {
                    let [x, y, _] = spec.dims.coords(i);
                    match (in_band(y, ny), in_band(x, nx)) {
                        (true, true) => mixed,
                        (true, false) => *tensor,
                        (false, true) => turned,
                        (false, false) => mean,
                    }
                })
                .collect()
        }
    };
    TensorField::from_raw(
        spec.dims,
        &spec.spacing,
        values.iter().map(SpdMatrix::vech).collect(),
    )
}
