//! Binary tensor-field container.
//!
//! ```text
//! SPDF
//! version 1
//! dims <nx> <ny> [<nz>]
//! spacing <hx> <hy> [<hz>]
//! ordering vech6:[11,22,33,12,23,13]
//! end
//! <payload>
//! ```
//!
//! Each header line ends in `\n`. The payload is little-endian `f64`, voxel
//! index varying slowest over (z, y, x) and the six υ-channels fastest.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{Dims, TensorField};
use crate::geometry::Vech;
use crate::metrics::spd_violations;

pub const MAGIC: &str = "SPDF";
pub const FORMAT_VERSION: u32 = 1;
pub const ORDERING_TAG: &str = "vech6:[11,22,33,12,23,13]";

pub fn encode_field(field: &TensorField, mut w: impl Write) -> Result<()> {
    let join = |xs: Vec<String>| xs.join(" ");
    writeln!(w, "{MAGIC}")?;
    writeln!(w, "version {FORMAT_VERSION}")?;
    writeln!(w, "dims {}", join(field.dims().extents().iter().map(|e| e.to_string()).collect()))?;
    writeln!(w, "spacing {}", join(field.spacing().iter().map(|h| h.to_string()).collect()))?;
    writeln!(w, "ordering {ORDERING_TAG}")?;
    writeln!(w, "end")?;
    let mut payload = Vec::with_capacity(field.len() * 48);
    for v in field.data() {
        for x in v.iter() {
            payload.extend_from_slice(&x.to_le_bytes());
        }
    }
    w.write_all(&payload)?;
    w.flush()?;
    Ok(())
}

fn header_line(r: &mut impl BufRead, key: &str) -> Result<String> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let line = line.strip_suffix('\n').ok_or_else(|| {
        Error::Format(format!("{key}: header ended before this field"))
    })?;
    Ok(line.to_string())
}

fn keyed<'a>(line: &'a str, key: &str) -> Result<&'a str> {
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(' '))
        .ok_or_else(|| Error::Format(format!("{key}: expected '{key} ...', found '{line}'")))
}

/// Decodes a field without checking voxel positivity.
pub fn decode_field(r: impl Read) -> Result<TensorField> {
    let mut r = BufReader::new(r);
    let magic = header_line(&mut r, "magic")?;
    if magic != MAGIC {
        return Err(Error::Format(format!("magic: expected '{MAGIC}', found '{magic}'")));
    }
    let version = header_line(&mut r, "version")?;
    let version: u32 = keyed(&version, "version")?
        .parse()
        .map_err(|_| Error::Format(format!("version: cannot parse '{version}'")))?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("version: unsupported version {version}")));
    }
    let dims_line = header_line(&mut r, "dims")?;
    let extents = keyed(&dims_line, "dims")?
        .split_whitespace()
        .map(str::parse::<usize>)
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Format(format!("dims: {e}")))?;
    let dims = Dims::new(&extents).map_err(|e| Error::Format(format!("dims: {e}")))?;
    let spacing_line = header_line(&mut r, "spacing")?;
    let spacing = keyed(&spacing_line, "spacing")?
        .split_whitespace()
        .map(str::parse::<f64>)
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Format(format!("spacing: {e}")))?;
    if spacing.len() != dims.m() {
        return Err(Error::Format(format!(
            "spacing: {} values for {} dims",
            spacing.len(),
            dims.m()
        )));
    }
    let ordering_line = header_line(&mut r, "ordering")?;
    let ordering = keyed(&ordering_line, "ordering")?;
    if ordering != ORDERING_TAG {
        return Err(Error::Format(format!(
            "ordering: unknown tag '{ordering}', expected '{ORDERING_TAG}'"
        )));
    }
    let end = header_line(&mut r, "end")?;
    if end != "end" {
        return Err(Error::Format(format!("end: expected 'end', found '{end}'")));
    }

    let expected = dims.len() * 6 * 8;
    let mut payload = Vec::with_capacity(expected);
    r.read_to_end(&mut payload)?;
    if payload.len() < expected {
        return Err(Error::Format(format!(
            "truncated payload: expected {expected} bytes, found {}",
            payload.len()
        )));
    }
    if payload.len() > expected {
        return Err(Error::Format(format!(
            "payload has {} trailing bytes",
            payload.len() - expected
        )));
    }
    let data = payload
        .chunks_exact(48)
        .map(|voxel| {
            Vech::from_fn(|c, _| {
                let bytes: [u8; 8] = voxel[c * 8..c * 8 + 8].try_into().expect("8-byte chunk");
                f64::from_le_bytes(bytes)
            })
        })
        .collect();
    TensorField::from_raw(dims, &spacing, data).map_err(|e| Error::Format(format!("spacing: {e}")))
}

pub fn write_field(field: &TensorField, path: impl AsRef<Path>) -> Result<()> {
    encode_field(field, BufWriter::new(File::create(path)?))
}

/// Reads a field; voxels outside the cone are kept as stored (inspect them with
/// [`spd_violations`]).
pub fn read_field(path: impl AsRef<Path>) -> Result<TensorField> {
    decode_field(File::open(path)?)
}

/// Reads a field and rejects it if any voxel fails the SPD check.
pub fn read_field_strict(path: impl AsRef<Path>) -> Result<TensorField> {
    let field = read_field(path)?;
    let v = spd_violations(&field);
    if v.count > 0 {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: v.worst_min_eigenvalue,
        });
    }
    Ok(field)
}
