use std::io::{BufRead, Write};
use std::sync::Arc;

use super::{parse, split_row};
use crate::error::{Error, Result};
use crate::grid::{FarField, SphereGrid};
use crate::scalar::{Cplx, Real};

pub const FAR_FIELD_HEADER: &str = "theta,phi,weight,re,im";

pub fn write_far_field<T: Real, W: Write>(w: &mut W, f: &FarField<T>) -> Result<()> {
    writeln!(w, "{FAR_FIELD_HEADER}")?;
    let s = f.sphere();
    for ((&(theta, phi), wt), v) in s.angles().iter().zip(s.weights()).zip(f.values()) {
        writeln!(w, "{theta},{phi},{wt},{},{}", v.re, v.im)?;
    }
    Ok(())
}

pub fn read_far_field<T: Real, R: BufRead>(r: R) -> Result<FarField<T>> {
    let mut lines = r.lines();
    let header = lines.next().ok_or(Error::Parse { line: 1, message: "empty far-field file".into() })??;
    if header.trim() != FAR_FIELD_HEADER {
        return Err(Error::Parse { line: 1, message: format!("expected header '{FAR_FIELD_HEADER}'") });
    }
    let mut angles = Vec::new();
    let mut weights = Vec::new();
    let mut values = Vec::new();
    for (i, row) in lines.enumerate() {
        let line = i + 2;
        let row = row?;
        if row.trim().is_empty() {
            continue;
        }
        let p = split_row(&row, line, 5)?;
        let theta: T = parse(p[0], line, "theta")?;
        let phi: T = parse(p[1], line, "phi")?;
        let weight: T = parse(p[2], line, "weight")?;
        let re: T = parse(p[3], line, "re")?;
        let im: T = parse(p[4], line, "im")?;
        if [theta, phi, weight, re, im].iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse { line, message: "non-finite value".into() });
        }
        angles.push((theta, phi));
        weights.push(weight);
        values.push(Cplx::new(re, im));
    }
    let sphere =
        SphereGrid::from_parts(angles, weights).map_err(|e| Error::Parse { line: 1, message: e.to_string() })?;
    FarField::new(Arc::new(sphere), values)
}
