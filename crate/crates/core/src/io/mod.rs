//! Text formats for fields, far-field patterns and particle clouds.
//!
//! Every float is written with the shortest representation that parses
//! back to the same value, so reading a written file reproduces it exactly.
//!
//! * Field files start with
//!   `wavefield v1 <nx> <ny> <nz> <xmin> <ymin> <zmin> <dx> <dy> <dz>`, where
//!   `(xmin, ymin, zmin)` is the lower corner of the box, followed by rows
//!   `ix,iy,iz,re,im` for the masked voxels with `ix` fastest.
//! * Far-field files have the header `theta,phi,weight,re,im` and one row
//!   per direction.
//! * Cloud files start with `# particles M=<m> a=<a> seed=<s>`, then the
//!   column header `x,y,z` and one row per particle.

mod cloud;
mod far_field;
mod field;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

pub use cloud::{read_cloud, write_cloud};
pub use far_field::{read_far_field, write_far_field, FAR_FIELD_HEADER};
pub use field::{read_field, read_real_field, write_field, write_real_field, FIELD_MAGIC};

use crate::error::{Error, Result};

pub(crate) fn parse<V: FromStr>(token: &str, line: usize, what: &str) -> Result<V> {
    token.trim().parse().map_err(|_| Error::Parse { line, message: format!("invalid {what} '{}'", token.trim()) })
}

pub(crate) fn split_row(row: &str, line: usize, fields: usize) -> Result<Vec<&str>> {
    let parts: Vec<&str> = row.split(',').collect();
    if parts.len() != fields {
        return Err(Error::Parse {
            line,
            message: format!("expected {fields} comma-separated values, found {}", parts.len()),
        });
    }
    Ok(parts)
}

/// Opens `path` for buffered reading.
pub fn open(path: impl AsRef<Path>) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path)?))
}

/// Writes to `path` through `body`, creating or truncating it.
pub fn create(path: impl AsRef<Path>, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}
