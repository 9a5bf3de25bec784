use std::io::{BufRead, Write};

use super::{parse, split_row};
use crate::ensemble::ParticleCloud;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec3::Vec3;

const COLUMNS: &str = "x,y,z";

pub fn write_cloud<T: Real, W: Write>(w: &mut W, cloud: &ParticleCloud<T>) -> Result<()> {
    writeln!(w, "# particles M={} a={} seed={}", cloud.len(), cloud.radius(), cloud.seed())?;
    writeln!(w, "{COLUMNS}")?;
    for p in cloud.positions() {
        writeln!(w, "{},{},{}", p[0], p[1], p[2])?;
    }
    Ok(())
}

pub fn read_cloud<T: Real, R: BufRead>(r: R) -> Result<ParticleCloud<T>> {
    let mut lines = r.lines();
    let header = lines.next().ok_or(Error::Parse { line: 1, message: "empty cloud file".into() })??;
    let bad_header = || Error::Parse { line: 1, message: "expected '# particles M=<m> a=<a> seed=<s>'".into() };
    let rest = header.strip_prefix("# particles ").ok_or_else(bad_header)?;
    let fields: Vec<&str> = rest.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(bad_header());
    }
    let m: usize = parse(fields[0].strip_prefix("M=").ok_or_else(bad_header)?, 1, "M")?;
    let a: T = parse(fields[1].strip_prefix("a=").ok_or_else(bad_header)?, 1, "a")?;
    let seed: u64 = parse(fields[2].strip_prefix("seed=").ok_or_else(bad_header)?, 1, "seed")?;
    let columns = lines.next().ok_or(Error::Parse { line: 2, message: "missing column header".into() })??;
    if columns.trim() != COLUMNS {
        return Err(Error::Parse { line: 2, message: format!("expected column header '{COLUMNS}'") });
    }
    let mut positions: Vec<Vec3<T>> = Vec::with_capacity(m.min(1 << 20));
    for (i, row) in lines.enumerate() {
        let line = i + 3;
        let row = row?;
        if row.trim().is_empty() {
            continue;
        }
        let p = split_row(&row, line, 3)?;
        positions.push([parse(p[0], line, "x")?, parse(p[1], line, "y")?, parse(p[2], line, "z")?]);
    }
    if positions.len() != m {
        return Err(Error::Parse {
            line: 1,
            message: format!("header declares {m} particles, found {}", positions.len()),
        });
    }
    ParticleCloud::new(positions, a, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_exact() {
        let pts = vec![[0.1, 0.2, 0.3], [-1.0 / 3.0, 0.5, 2.0 / 7.0], [1e-9, -4.25, 0.0]];
        let c = ParticleCloud::new(pts, 0.01, 77).unwrap();
        let mut buf = Vec::new();
        write_cloud(&mut buf, &c).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("# particles M=3 a=0.01 seed=77\nx,y,z\n"));
        let back: ParticleCloud<f64> = read_cloud(&buf[..]).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn count_mismatch_is_rejected() {
        let text = "# particles M=2 a=0.01 seed=1\nx,y,z\n0,0,0\n";
        assert!(matches!(read_cloud::<f64, _>(text.as_bytes()), Err(Error::Parse { line: 1, .. })));
        assert!(read_cloud::<f64, _>(&b"# particle M=0 a=0.01 seed=1\nx,y,z\n"[..]).is_err());
    }
}
