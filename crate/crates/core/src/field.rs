use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::geometry::{spd_check, unvech, SpdMatrix, Vech};

/// Grid extents of a 2D (`m = 2`) or 3D (`m = 3`) field.
///
/// Voxels are stored with x fastest and z slowest:
/// `index = (z·ny + y)·nx + x`. A 2D grid has a single z layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dims {
    m: usize,
    shape: [usize; 3],
}

impl Dims {
    /// Extents in (x, y[, z]) order; every axis needs at least 3 voxels.
    pub fn new(extents: &[usize]) -> Result<Self> {
        let m = extents.len();
        if !(2..=3).contains(&m) {
            return Err(Error::Argument(format!(
                "expected 2 or 3 grid extents, got {m}"
            )));
        }
        if let Some(&e) = extents.iter().find(|&&e| e < 3) {
            return Err(Error::Argument(format!(
                "grid extents must be at least 3 per axis, got {e}"
            )));
        }
        let mut shape = [1; 3];
        shape[..m].copy_from_slice(extents);
        Ok(Self { m, shape })
    }

    /// Number of spatial dimensions.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn extents(&self) -> &[usize] {
        &self.shape[..self.m]
    }

    /// All three extents, with a trailing 1 for 2D grids.
    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, [x, y, z]: [usize; 3]) -> usize {
        (z * self.shape[1] + y) * self.shape[0] + x
    }

    pub fn coords(&self, index: usize) -> [usize; 3] {
        let [nx, ny, _] = self.shape;
        [index % nx, (index / nx) % ny, index / (nx * ny)]
    }

    /// Index of the voxel `delta` steps along `axis`, clamped to the grid
    /// (replicate padding).
    pub fn offset(&self, index: usize, axis: usize, delta: isize) -> usize {
        let mut c = self.coords(index);
        let n = self.shape[axis] as isize;
        c[axis] = (c[axis] as isize + delta).clamp(0, n - 1) as usize;
        self.index(c)
    }

    /// Clamped neighbor displaced along two axes at once.
    pub fn offset2(&self, index: usize, a: (usize, isize), b: (usize, isize)) -> usize {
        self.offset(self.offset(index, a.0, a.1), b.0, b.1)
    }
}

/// A grid of SPD tensors stored as υ-vectors, with per-axis spacing.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    dims: Dims,
    spacing: [f64; 3],
    data: Vec<Vech>,
}

impl TensorField {
    /// Builds a field and checks that every voxel is SPD.
    pub fn new(dims: Dims, spacing: &[f64], data: Vec<Vech>) -> Result<Self> {
        let field = Self::from_raw(dims, spacing, data)?;
        if let Some((voxel, min_eigenvalue)) = field.first_violation() {
            return Err(Error::Argument(format!(
                "voxel {voxel} is not positive definite (min eigenvalue {min_eigenvalue:e})"
            )));
        }
        Ok(field)
    }

    /// Builds a field with shape and spacing checks only; voxel values are
    /// taken as given.
    pub fn from_raw(dims: Dims, spacing: &[f64], data: Vec<Vech>) -> Result<Self> {
        if spacing.len() != dims.m() {
            return Err(Error::DimensionMismatch(format!(
                "{} spacing values for a {}-dimensional grid",
                spacing.len(),
                dims.m()
            )));
        }
        if let Some(h) = spacing.iter().find(|h| !(h.is_finite() && **h > 0.0)) {
            return Err(Error::Argument(format!("spacing must be positive, got {h}")));
        }
        if data.len() != dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} voxels supplied for a grid of {}",
                data.len(),
                dims.len()
            )));
        }
        let mut full = [1.0; 3];
        full[..dims.m()].copy_from_slice(spacing);
        Ok(Self {
            dims,
            spacing: full,
            data,
        })
    }

    pub fn constant(dims: Dims, spacing: &[f64], value: &SpdMatrix) -> Result<Self> {
        Self::from_raw(dims, spacing, vec![value.vech(); dims.len()])
    }

    /// Evaluates `f` at every voxel's integer coordinates.
    pub fn from_fn(
        dims: Dims,
        spacing: &[f64],
        mut f: impl FnMut([usize; 3]) -> SpdMatrix,
    ) -> Result<Self> {
        let data = (0..dims.len()).map(|i| f(dims.coords(i)).vech()).collect();
        Self::from_raw(dims, spacing, data)
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn m(&self) -> usize {
        self.dims.m()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing[..self.dims.m()]
    }

    /// Spacing along `axis`; 1 for the inert z axis of a 2D grid.
    pub fn h(&self, axis: usize) -> f64 {
        self.spacing[axis]
    }

    pub fn voxel_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    pub fn data(&self) -> &[Vech] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Vech] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Vech> {
        self.data
    }

    pub fn get(&self, index: usize) -> &Vech {
        &self.data[index]
    }

    pub fn matrix(&self, index: usize) -> Matrix3<f64> {
        unvech(&self.data[index])
    }

    /// The voxel value as an [`SpdMatrix`], or a domain error.
    pub fn spd(&self, index: usize) -> Result<SpdMatrix> {
        SpdMatrix::from_vech(&self.data[index])
    }

    /// Same grid and spacing, new voxel values.
    pub fn with_data(&self, data: Vec<Vech>) -> Result<Self> {
        Self::from_raw(self.dims, self.spacing(), data)
    }

    pub fn map(&self, f: impl Fn(&Vech) -> Vech) -> Self {
        Self {
            dims: self.dims,
            spacing: self.spacing,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn first_violation(&self) -> Option<(usize, f64)> {
        self.data.iter().enumerate().find_map(|(i, v)| {
            let s = spd_check(&unvech(v));
            (!s.is_spd).then_some((i, s.min_eigenvalue))
        })
    }
}
