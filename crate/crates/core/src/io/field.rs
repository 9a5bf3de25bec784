use std::io::{BufRead, Write};
use std::sync::Arc;

use super::{parse, split_row};
use crate::error::{Error, Result};
use crate::grid::{ComplexField, DomainGrid, RealField};
use crate::scalar::{Cplx, Real};

/// First token of a field file header.
pub const FIELD_MAGIC: &str = "wavefield";
const VERSION: &str = "v1";

pub fn write_field<T: Real, W: Write>(w: &mut W, field: &ComplexField<T>) -> Result<()> {
    let grid = field.grid();
    write_header(w, grid)?;
    for (idx, v) in grid.voxels().iter().zip(field.values()) {
        writeln!(w, "{},{},{},{},{}", idx[0], idx[1], idx[2], v.re, v.im)?;
    }
    Ok(())
}

/// Writes a real field with zero imaginary parts.
pub fn write_real_field<T: Real, W: Write>(w: &mut W, field: &RealField<T>) -> Result<()> {
    let grid = field.grid();
    write_header(w, grid)?;
    for (idx, v) in grid.voxels().iter().zip(field.values()) {
        writeln!(w, "{},{},{},{},0", idx[0], idx[1], idx[2], v)?;
    }
    Ok(())
}

fn write_header<T: Real, W: Write>(w: &mut W, grid: &DomainGrid<T>) -> Result<()> {
    let [nx, ny, nz] = grid.shape();
    let min = grid.bounds().min;
    let d = grid.spacing();
    writeln!(w, "{FIELD_MAGIC} {VERSION} {nx} {ny} {nz} {} {} {} {} {} {}", min[0], min[1], min[2], d[0], d[1], d[2])?;
    Ok(())
}

pub fn read_field<T: Real, R: BufRead>(r: R) -> Result<ComplexField<T>> {
    let mut lines = r.lines();
    let header = lines.next().ok_or(Error::Parse { line: 1, message: "empty field file".into() })??;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 11 || tokens[0] != FIELD_MAGIC || tokens[1] != VERSION {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected '{FIELD_MAGIC} {VERSION} nx ny nz xmin ymin zmin dx dy dz'"),
        });
    }
    let shape: [usize; 3] = [parse(tokens[2], 1, "nx")?, parse(tokens[3], 1, "ny")?, parse(tokens[4], 1, "nz")?];
    let min = [parse(tokens[5], 1, "xmin")?, parse(tokens[6], 1, "ymin")?, parse(tokens[7], 1, "zmin")?];
    let spacing = [parse(tokens[8], 1, "dx")?, parse(tokens[9], 1, "dy")?, parse(tokens[10], 1, "dz")?];
    let total = shape[0]
        .checked_mul(shape[1])
        .and_then(|v| v.checked_mul(shape[2]))
        .ok_or(Error::Parse { line: 1, message: "grid shape overflows".into() })?;
    let mut mask = vec![false; total];
    let mut values: Vec<Cplx<T>> = Vec::new();
    let mut last: Option<usize> = None;
    for (i, row) in lines.enumerate() {
        let line = i + 2;
        let row = row?;
        if row.trim().is_empty() {
            continue;
        }
        let p = split_row(&row, line, 5)?;
        let idx: [usize; 3] = [parse(p[0], line, "ix")?, parse(p[1], line, "iy")?, parse(p[2], line, "iz")?];
        if (0..3).any(|a| idx[a] >= shape[a]) {
            return Err(Error::Parse { line, message: format!("voxel index {idx:?} outside shape {shape:?}") });
        }
        let l = idx[0] + shape[0] * (idx[1] + shape[1] * idx[2]);
        if last.is_some_and(|prev| l <= prev) {
            return Err(Error::Parse {
                line,
                message: "voxel rows must be strictly increasing with ix fastest".into(),
            });
        }
        last = Some(l);
        mask[l] = true;
        let re: T = parse(p[3], line, "re")?;
        let im: T = parse(p[4], line, "im")?;
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::Parse { line, message: "non-finite value".into() });
        }
        values.push(Cplx::new(re, im));
    }
    let grid = DomainGrid::from_mask(min, spacing, shape, mask)
        .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?;
    ComplexField::new(Arc::new(grid), values)
}

/// Reads a field file whose imaginary parts are all zero.
pub fn read_real_field<T: Real, R: BufRead>(r: R) -> Result<RealField<T>> {
    let field = read_field::<T, R>(r)?;
    if let Some(pos) = field.values().iter().position(|v| v.im != T::zero()) {
        return Err(Error::Parse { line: pos + 2, message: "real field has a nonzero imaginary part".into() });
    }
    let values = field.values().iter().map(|v| v.re).collect();
    RealField::new(Arc::clone(field.grid()), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Aabb, Region};
    use num_complex::Complex;

    fn ball_field() -> ComplexField<f64> {
        let g = Arc::new(
            DomainGrid::new(
                Aabb::new([-0.3, -0.2, 0.1], [0.7, 0.5, 1.3]),
                [5, 4, 6],
                Region::Ball { center: [0.2, 0.15, 0.7], radius: 0.35 },
            )
            .unwrap(),
        );
        ComplexField::from_fn(&g, |x| Complex::new(x[0].sin() / 3.0, -x[1] * x[2] * 1e-7))
    }

    #[test]
    fn roundtrip_is_exact() {
        let f = ball_field();
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        let back: ComplexField<f64> = read_field(&buf[..]).unwrap();
        assert!(back.grid().same_as(f.grid()));
        assert_eq!(back.grid().centers(), f.grid().centers());
        assert_eq!(back.values(), f.values());
        let mut again = Vec::new();
        write_field(&mut again, &back).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn header_format() {
        let mut buf = Vec::new();
        write_field(&mut buf, &ball_field()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("wavefield v1 5 4 6 -0.3 -0.2 0.1 "));
    }

    #[test]
    fn bad_header_is_a_parse_error() {
        let err = read_field::<f64, _>(&b"wavefeld v1 2 2 2 0 0 0 1 1 1\n"[..]).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = read_field::<f64, _>(&b"wavefield v1 2 2 2 0 0 0 1 1\n"[..]).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(read_field::<f64, _>(&b""[..]).is_err());
    }

    #[test]
    fn bad_rows_are_parse_errors() {
        let h = "wavefield v1 2 2 2 0 0 0 0.5 0.5 0.5\n";
        for (rows, line) in [
            ("0,0,0,1,0\n0,0,0,1,0\n", 3),
            ("2,0,0,1,0\n", 2),
            ("0,0,0,1\n", 2),
            ("0,0,0,x,0\n", 2),
            ("0,0,0,NaN,0\n", 2),
        ] {
            match read_field::<f64, _>(format!("{h}{rows}").as_bytes()) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{rows}"),
                other => panic!("{rows}: {other:?}"),
            }
        }
    }

    #[test]
    fn real_field_roundtrip() {
        let g = ball_field().grid().clone();
        let rf = RealField::new(g.clone(), (0..g.len()).map(|i| i as f64 * 0.1 - 0.3).collect()).unwrap();
        let mut buf = Vec::new();
        write_real_field(&mut buf, &rf).unwrap();
        let back: RealField<f64> = read_real_field(&buf[..]).unwrap();
        assert_eq!(back.values(), rf.values());
        let mut cbuf = Vec::new();
        write_field(&mut cbuf, &ball_field()).unwrap();
        assert!(read_real_field::<f64, _>(&cbuf[..]).is_err());
    }
}
