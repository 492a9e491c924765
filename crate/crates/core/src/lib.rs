//! Curvature-driven PDE flows for fields of 3×3 symmetric positive-definite
//! matrices.
//!
//! A tensor field is treated as the graph of a map from the image domain into
//! the space-feature manifold `Ω × P(3)`, where `P(3)` carries the
//! affine-invariant metric `tr(P⁻¹ dP P⁻¹ dP)`. The flows move the tensor
//! channels along the mean curvature vector of that graph:
//!
//! * [`FlowKind::Tv`]: `∂ₜp = H`
//! * [`FlowKind::Rmc`]: `∂ₜp = |∇p|_γ H`
//! * [`FlowKind::ModifiedRmc`]: `∂ₜp = c(K⋆|∇p|_γ) |∇p|_γ H`
//! * [`FlowKind::SelfSnakes`]: the modified flow plus the shock term `∇c·∇p`
//!
//! Module map:
//!
//! * [`geometry`]: duplication matrices, metric tensor, inverse metric,
//!   Christoffel symbols and the base-point inner product on `P(3)`.
//! * [`field`]: the [`TensorField`] grid container.
//! * [`immersion`]: induced metric, Laplace–Beltrami, mean curvature.
//! * [`flows`]: explicit time stepping with Neumann boundaries.
//! * [`io`]: field files, synthetic fields, noise, glyph export.
//! * [`metrics`]: geodesic distance, error reports, volume energy.

pub mod error;
pub mod field;
pub mod flows;
pub mod geometry;
pub mod immersion;
pub mod io;
pub mod linalg;
pub mod metrics;

pub use error::{Error, Result};
pub use field::{Dims, TensorField};
pub use flows::{FlowConfig, FlowDiagnostics, FlowKind, SafeguardPolicy};
pub use geometry::{SpdMatrix, Vech};
