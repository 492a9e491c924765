//! Ellipsoid glyphs: principal directions are the eigenvectors of `P`, semi-axes
//! the eigenvalues of `P⁻¹`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::{Matrix3, Vector3};

use crate::error::Result;
use crate::field::TensorField;
use crate::geometry::SpdMatrix;
use crate::linalg;

pub const GLYPH_HEADER: &str = "x,y,z,a1,a2,a3,e1x,e1y,e1z,e2x,e2y,e2z,e3x,e3y,e3z";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Glyph {
    pub center: [f64; 3],
    /// Semi-axes `1/λ` in order of decreasing eigenvalue `λ` of `P`.
    pub axes: Vector3<f64>,
    /// Columns are the unit directions matching `axes`.
    pub frame: Matrix3<f64>,
}

/// Flips `v` so its largest-magnitude component is positive.
fn canonical_sign(v: Vector3<f64>) -> Vector3<f64> {
    let lead = (0..3).fold(0, |best, i| if v[i].abs() > v[best].abs() { i } else { best });
    if v[lead] < 0.0 {
        -v
    } else {
        v
    }
}

/// Glyph of a single tensor. The first two directions follow the sign
/// convention; the third is their cross product, so the frame is right-handed.
pub fn glyph(p: &SpdMatrix, center: [f64; 3]) -> Glyph {
    let (values, vectors) = linalg::sym_eigen(p.matrix());
    let mut order = [0usize, 1, 2];
    // Decreasing eigenvalue; ties keep the solver's order.
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let e1 = canonical_sign(vectors.column(order[0]).into_owned());
    let e2 = canonical_sign(vectors.column(order[1]).into_owned());
    let e3 = e1.cross(&e2);
    Glyph {
        center,
        axes: Vector3::from_fn(|i, _| 1.0 / values[order[i]]),
        frame: Matrix3::from_columns(&[e1, e2, e3]),
    }
}

/// One glyph per voxel in storage order; centres are `index · spacing`.
pub fn glyphs(field: &TensorField) -> Result<Vec<Glyph>> {
    let dims = field.dims();
    (0..field.len())
        .map(|i| {
            let c = dims.coords(i);
            let center = std::array::from_fn(|a| c[a] as f64 * field.h(a));
            Ok(glyph(&field.spd(i)?, center))
        })
        .collect()
}

pub fn write_glyphs(field: &TensorField, mut w: impl Write) -> Result<()> {
    writeln!(w, "{GLYPH_HEADER}")?;
    for g in glyphs(field)? {
        let mut cols: Vec<String> = g.center.iter().map(f64::to_string).collect();
        cols.extend(g.axes.iter().map(f64::to_string));
        cols.extend(g.frame.iter().map(f64::to_string));
        writeln!(w, "{}", cols.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_glyphs(field: &TensorField, path: impl AsRef<Path>) -> Result<()> {
    write_glyphs(field, BufWriter::new(File::create(path)?))
}
