//! Explicit time stepping of the four curvature-driven flows.
//!
//! Every step reads a frozen snapshot of the field, evaluates the right-hand
//! side voxel by voxel, takes a forward-Euler step in υ-coordinates and passes
//! each voxel through the SPD safeguard.

mod safeguard;
mod smoothing;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

pub use safeguard::{spd_safeguard, Guarded, SafeguardPolicy};
pub use smoothing::{edge_stopping_c, gaussian_kernel, gaussian_smooth};

use crate::error::{Error, Result};
use crate::field::TensorField;
use crate::geometry::Vech;
use crate::immersion::FieldGeometry;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FlowKind {
    /// `∂ₜp = H`.
    #[default]
    Tv,
    /// `∂ₜp = |∇p|_γ H`.
    Rmc,
    /// `∂ₜp = c(K⋆|∇p|_γ) |∇p|_γ H`.
    ModifiedRmc,
    /// Modified flow plus the shock term `∇c·∇p`.
    SelfSnakes,
}

impl FlowKind {
    pub const ALL: [FlowKind; 4] = [Self::Tv, Self::Rmc, Self::ModifiedRmc, Self::SelfSnakes];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Tv => "tv",
            Self::Rmc => "rmc",
            Self::ModifiedRmc => "modified_rmc",
            Self::SelfSnakes => "self_snakes",
        }
    }

    fn uses_edge_stopping(&self) -> bool {
        matches!(self, Self::ModifiedRmc | Self::SelfSnakes)
    }
}

impl fmt::Display for FlowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FlowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown flow kind '{s}'")))
    }
}

/// How the shock term pairs `∇c` with `∇p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ShockPairing {
    /// `γ^{αβ} ∂_α c ∂_β p`.
    #[default]
    Metric,
    /// `Σ_α ∂_α c ∂_α p`.
    Euclidean,
}

impl ShockPairing {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Metric => "metric",
            Self::Euclidean => "euclidean",
        }
    }
}

impl FromStr for ShockPairing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "metric" => Ok(Self::Metric),
            "euclidean" => Ok(Self::Euclidean),
            other => Err(Error::Argument(format!("unknown shock pairing '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig {
    pub kind: FlowKind,
    pub dt: f64,
    pub steps: usize,
    /// Edge-stopping constant; `None` selects the median of the initial
    /// smoothed Beltrami magnitude.
    pub k: Option<f64>,
    /// Gaussian standard deviation in voxels for the edge detector.
    pub sigma: f64,
    pub safeguard: SafeguardPolicy,
    /// Eigenvalue floor relative to `tr(P)/3` of the previous value.
    pub eig_floor: f64,
    /// Recorded for reproducibility; the flows themselves are deterministic.
    pub seed: u64,
    pub shock_pairing: ShockPairing,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            kind: FlowKind::Tv,
            dt: 0.01,
            steps: 50,
            k: None,
            sigma: 1.0,
            safeguard: SafeguardPolicy::Clamp,
            eig_floor: 1e-8,
            seed: 0,
            shock_pairing: ShockPairing::Metric,
        }
    }
}

impl FlowConfig {
    pub fn new(kind: FlowKind) -> Self {
        Self {
            kind,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Argument(format!("dt must be positive, got {}", self.dt)));
        }
        if let Some(k) = self.k {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::Argument(format!("k must be positive, got {k}")));
            }
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::Argument(format!(
                "sigma must be non-negative, got {}",
                self.sigma
            )));
        }
        if !(self.eig_floor > 0.0 && self.eig_floor < 1.0) {
            return Err(Error::Argument(format!(
                "eig_floor must lie in (0, 1), got {}",
                self.eig_floor
            )));
        }
        Ok(())
    }
}

/// One record per executed step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    /// Volume energy of the field after the step.
    pub volume_energy: f64,
    /// Largest Euclidean norm of `H` over the field before the step.
    pub max_curvature: f64,
    pub safeguard_activations: usize,
    /// Smallest eigenvalue over the field after the step.
    pub min_eigenvalue: f64,
    pub wall_clock: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowDiagnostics {
    pub kind: FlowKind,
    /// Edge-stopping constant actually used (edge-stopping flows only).
    pub k: Option<f64>,
    pub initial_energy: f64,
    pub records: Vec<StepRecord>,
}

impl FlowDiagnostics {
    pub fn total_activations(&self) -> usize {
        self.records.iter().map(|r| r.safeguard_activations).sum()
    }

    pub fn energies(&self) -> Vec<f64> {
        std::iter::once(self.initial_energy)
            .chain(self.records.iter().map(|r| r.volume_energy))
            .collect()
    }
}

/// Result of a single explicit step.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub field: TensorField,
    pub activations: usize,
    pub max_curvature: f64,
    pub min_eigenvalue: f64,
}

/// Diffusion and shock parts of the self-snakes right-hand side.
#[derive(Clone, Debug)]
pub struct SelfSnakesTerms {
    pub diffusion: Vec<Vech>,
    pub shock: Vec<Vech>,
}

/// Per-voxel `c(K⋆|∇p|_γ)`.
fn edge_field(geo: &FieldGeometry, magnitude: &[f64], k: f64, sigma: f64) -> Vec<f64> {
    gaussian_smooth(magnitude, geo.field().dims(), sigma)
        .into_iter()
        .map(|s| edge_stopping_c(s, k))
        .collect()
}

fn shock_term(geo: &FieldGeometry, c: &[f64], voxel: usize, pairing: ShockPairing) -> Vech {
    let field = geo.field();
    let dims = field.dims();
    let m = field.m();
    let vg = geo.voxel(voxel);
    let dc: Vec<f64> = (0..m)
        .map(|a| {
            let fwd = c[dims.offset(voxel, a, 1)];
            let bwd = c[dims.offset(voxel, a, -1)];
            (fwd - bwd) / (2.0 * field.h(a))
        })
        .collect();
    let mut acc = Vech::zeros();
    match pairing {
        ShockPairing::Metric => {
            for a in 0..m {
                for b in 0..m {
                    acc += vg.gradient.column(b) * (vg.induced.inverse[(a, b)] * dc[a]);
                }
            }
        }
        ShockPairing::Euclidean => {
            for a in 0..m {
                acc += vg.gradient.column(a) * dc[a];
            }
        }
    }
    acc
}

struct Rhs {
    rhs: Vec<Vech>,
    curvature: Vec<Vech>,
}

fn rhs_from_geometry(
    geo: &FieldGeometry,
    kind: FlowKind,
    k: f64,
    sigma: f64,
    pairing: ShockPairing,
) -> Result<Rhs> {
    let curvature = geo.mean_curvature_field();
    let rhs = match kind {
        FlowKind::Tv => curvature.clone(),
        FlowKind::Rmc => {
            let mag = geo.magnitude_field()?;
            curvature.iter().zip(&mag).map(|(h, s)| h * *s).collect()
        }
        FlowKind::ModifiedRmc | FlowKind::SelfSnakes => {
            let mag = geo.magnitude_field()?;
            let c = edge_field(geo, &mag, k, sigma);
            let diffusion = (0..curvature.len()).map(|i| curvature[i] * (c[i] * mag[i]));
            if kind == FlowKind::SelfSnakes {
                diffusion
                    .enumerate()
                    .map(|(i, d)| d + shock_term(geo, &c, i, pairing))
                    .collect()
            } else {
                diffusion.collect()
            }
        }
    };
    Ok(Rhs { rhs, curvature })
}

/// Right-hand side `∂ₜp` of the chosen flow at every voxel. `k` and `sigma`
/// are ignored by the flows without edge stopping.
pub fn flow_rhs(
    field: &TensorField,
    kind: FlowKind,
    k: f64,
    sigma: f64,
    pairing: ShockPairing,
) -> Result<Vec<Vech>> {
    let geo = FieldGeometry::new(field)?;
    Ok(rhs_from_geometry(&geo, kind, k, sigma, pairing)?.rhs)
}

/// The self-snakes right-hand side split into its diffusion and shock parts.
pub fn self_snakes_terms(
    field: &TensorField,
    k: f64,
    sigma: f64,
    pairing: ShockPairing,
) -> Result<SelfSnakesTerms> {
    let geo = FieldGeometry::new(field)?;
    let curvature = geo.mean_curvature_field();
    let mag = geo.magnitude_field()?;
    let c = edge_field(&geo, &mag, k, sigma);
    let diffusion = (0..field.len()).map(|i| curvature[i] * (c[i] * mag[i])).collect();
    let shock = (0..field.len()).map(|i| shock_term(&geo, &c, i, pairing)).collect();
    Ok(SelfSnakesTerms { diffusion, shock })
}

/// Median of the smoothed Beltrami magnitude; 1 if the field is flat.
pub fn default_edge_constant(field: &TensorField, sigma: f64) -> Result<f64> {
    let geo = FieldGeometry::new(field)?;
    let mut s = gaussian_smooth(&geo.magnitude_field()?, field.dims(), sigma);
    s.sort_by(f64::total_cmp);
    let n = s.len();
    let median = if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    };
    Ok(if median.is_finite() && median > 0.0 {
        median
    } else {
        1.0
    })
}

fn advance(
    geo: &FieldGeometry,
    config: &FlowConfig,
    k: f64,
    step_index: usize,
) -> Result<StepOutcome> {
    let field = geo.field();
    let Rhs { rhs, curvature } =
        rhs_from_geometry(geo, config.kind, k, config.sigma, config.shock_pairing)?;
    let guarded: Vec<Result<Guarded>> = (0..field.len())
        .into_par_iter()
        .map(|i| {
            let proposed = field.get(i) + rhs[i] * config.dt;
            spd_safeguard(&proposed, &geo.voxel(i).point, config.safeguard, config.eig_floor)
        })
        .collect();
    let mut data = Vec::with_capacity(field.len());
    let mut activations = 0;
    let mut min_eigenvalue = f64::INFINITY;
    for (voxel, g) in guarded.into_iter().enumerate() {
        let g = g.map_err(|e| match e {
            Error::NotPositiveDefinite { min_eigenvalue } => Error::SpdViolation {
                step: step_index,
                voxel,
                min_eigenvalue,
            },
            other => other,
        })?;
        activations += usize::from(g.activated);
        min_eigenvalue = min_eigenvalue.min(g.min_eigenvalue);
        data.push(g.value);
    }
    let max_curvature = curvature.iter().map(|h| h.norm()).fold(0.0, f64::max);
    Ok(StepOutcome {
        field: field.with_data(data)?,
        activations,
        max_curvature,
        min_eigenvalue,
    })
}

/// One explicit step of `config.kind` with an already resolved `k`.
pub fn step(field: &TensorField, config: &FlowConfig, k: f64) -> Result<StepOutcome> {
    config.validate()?;
    let geo = FieldGeometry::new(field)?;
    advance(&geo, config, k, 0)
}

fn default_step(field: &TensorField, kind: FlowKind, dt: f64, k: f64, sigma: f64) -> Result<TensorField> {
    let config = FlowConfig {
        kind,
        dt,
        sigma,
        k: Some(k),
        ..FlowConfig::default()
    };
    Ok(step(field, &config, k)?.field)
}

/// `p ← p + dt·H`, then the clamp safeguard.
pub fn tv_step(field: &TensorField, dt: f64) -> Result<TensorField> {
    default_step(field, FlowKind::Tv, dt, 1.0, 0.0)
}

/// `p ← p + dt·|∇p|_γ·H`, then the clamp safeguard.
pub fn rmc_step(field: &TensorField, dt: f64) -> Result<TensorField> {
    default_step(field, FlowKind::Rmc, dt, 1.0, 0.0)
}

pub fn modified_rmc_step(field: &TensorField, dt: f64, k: f64, sigma: f64) -> Result<TensorField> {
    default_step(field, FlowKind::ModifiedRmc, dt, k, sigma)
}

pub fn self_snakes_step(field: &TensorField, dt: f64, k: f64, sigma: f64) -> Result<TensorField> {
    default_step(field, FlowKind::SelfSnakes, dt, k, sigma)
}

/// Runs `config.steps` explicit steps. Each step reads only the previous
/// field; the result is deterministic for fixed inputs.
pub fn run_flow(field: &TensorField, config: &FlowConfig) -> Result<(TensorField, FlowDiagnostics)> {
    config.validate()?;
    let k = if config.kind.uses_edge_stopping() {
        Some(match config.k {
            Some(k) => k,
            None => default_edge_constant(field, config.sigma)?,
        })
    } else {
        None
    };
    let mut current = field.clone();
    let mut records: Vec<StepRecord> = Vec::with_capacity(config.steps);
    let mut initial_energy = f64::NAN;
    for step_index in 0..config.steps {
        let start = Instant::now();
        let geo = FieldGeometry::new(&current)?;
        let energy = geo.volume();
        match records.last_mut() {
            Some(last) => last.volume_energy = energy,
            None => initial_energy = energy,
        }
        let outcome = advance(&geo, config, k.unwrap_or(1.0), step_index)?;
        drop(geo);
        current = outcome.field;
        records.push(StepRecord {
            volume_energy: f64::NAN,
            max_curvature: outcome.max_curvature,
            safeguard_activations: outcome.activations,
            min_eigenvalue: outcome.min_eigenvalue,
            wall_clock: start.elapsed(),
        });
    }
    let final_energy = crate::metrics::volume_energy(&current)?;
    match records.last_mut() {
        Some(last) => last.volume_energy = final_energy,
        None => initial_energy = final_energy,
    }
    Ok((
        current,
        FlowDiagnostics {
            kind: config.kind,
            k,
            initial_energy,
            records,
        },
    ))
}
