use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::geometry::{spd_check, vech_upper, SpdMatrix, Vech};
use crate::linalg;

/// What to do when an explicit step pushes a voxel out of the cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SafeguardPolicy {
    /// Floor the eigenvalues and recompose.
    #[default]
    Clamp,
    /// Keep the previous value at that voxel.
    RejectStep,
    /// Fail the run.
    Strict,
}

impl SafeguardPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Clamp => "clamp",
            Self::RejectStep => "reject_step",
            Self::Strict => "strict",
        }
    }
}

impl fmt::Display for SafeguardPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SafeguardPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clamp" => Ok(Self::Clamp),
            "reject_step" => Ok(Self::RejectStep),
            "strict" => Ok(Self::Strict),
            other => Err(Error::Argument(format!("unknown safeguard policy '{other}'"))),
        }
    }
}

/// Outcome of the safeguard at one voxel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Guarded {
    pub value: Vech,
    pub activated: bool,
    /// Smallest eigenvalue of the returned value.
    pub min_eigenvalue: f64,
}

/// Applies `policy` to a proposed update.
///
/// The safeguard fires when the smallest eigenvalue of `proposed` falls below
/// `eig_floor · tr(P_old)/3`. Otherwise the proposal is returned bitwise
/// unchanged.
pub fn spd_safeguard(
    proposed: &Vech,
    previous: &SpdMatrix,
    policy: SafeguardPolicy,
    eig_floor: f64,
) -> Result<Guarded> {
    let floor = eig_floor * previous.matrix().trace() / 3.0;
    let m = crate::geometry::unvech(proposed);
    let (values, vectors) = linalg::sym_eigen(&m);
    let min_eigenvalue = values[0];
    if min_eigenvalue >= floor && min_eigenvalue > 0.0 {
        return Ok(Guarded {
            value: *proposed,
            activated: false,
            min_eigenvalue,
        });
    }
    let keep = Guarded {
        value: previous.vech(),
        activated: true,
        min_eigenvalue: linalg::min_eigenvalue(previous.matrix()),
    };
    match policy {
        SafeguardPolicy::Strict => Err(Error::NotPositiveDefinite { min_eigenvalue }),
        SafeguardPolicy::RejectStep => Ok(keep),
        SafeguardPolicy::Clamp => {
            let floored = values.map(|l| l.max(floor));
            let recomposed = vectors * Matrix3::from_diagonal(&floored) * vectors.transpose();
            let value = vech_upper(&linalg::symmetrize(&recomposed));
            let check = spd_check(&crate::geometry::unvech(&value));
            if check.is_spd && SpdMatrix::from_vech(&value).is_ok() {
                Ok(Guarded {
                    value,
                    activated: true,
                    min_eigenvalue: check.min_eigenvalue,
                })
            } else {
                Ok(keep)
            }
        }
    }
}
