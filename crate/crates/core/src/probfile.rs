//! `.prob` problem container.
//!
//! Layout, all integers and reals little-endian:
//!
//! ```text
//! b"TIKHPROB"                 8-byte magic
//! header_len: u64             length of the JSON header in bytes
//! header: [u8; header_len]    UTF-8 JSON {"n", "label", "weight"}
//! A:  n·n f64                 row-major
//! x*: n   f64
//! y:  n   f64
//! W:  n·n f64                 only when header.weight == "explicit"
//! ```

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TikhError};
use crate::linalg::{DenseMatrix, WeightSpec};
use crate::problems::ProblemInstance;

pub const MAGIC: &[u8; 8] = b"TIKHPROB";

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    n: usize,
    label: String,
    weight: String,
}

pub fn write_problem<W: Write>(mut out: W, p: &ProblemInstance) -> Result<()> {
    let header = serde_json::to_vec(&Header {
        n: p.n(),
        label: p.label.clone(),
        weight: p.weight.kind().to_string(),
    })?;
    out.write_all(MAGIC)?;
    out.write_all(&(header.len() as u64).to_le_bytes())?;
    out.write_all(&header)?;
    let mut arrays: Vec<&[f64]> = vec![p.a.as_slice(), &p.x_star, &p.y];
    if let WeightSpec::Explicit(w) = &p.weight {
        arrays.push(w.as_slice());
    }
    for arr in arrays {
        let mut buf = Vec::with_capacity(arr.len() * 8);
        for v in arr {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    Ok(())
}

fn read_f64s<R: Read>(input: &mut R, count: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; count * 8];
    input
        .read_exact(&mut buf)
        .map_err(|e| TikhError::Format(format!("truncated array: {e}")))?;
    Ok(buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

/// Reads a problem, recomputing nothing: the stored `y` is kept as written
/// but must match `A x*` to 1e-12 relative.
pub fn read_problem<R: Read>(mut input: R) -> Result<ProblemInstance> {
    let mut magic = [0u8; 8];
    input
        .read_exact(&mut magic)
        .map_err(|_| TikhError::Format("missing magic".into()))?;
    if &magic != MAGIC {
        return Err(TikhError::Format("bad magic".into()));
    }
    let mut len = [0u8; 8];
    input
        .read_exact(&mut len)
        .map_err(|_| TikhError::Format("missing header length".into()))?;
    let len = u64::from_le_bytes(len) as usize;
    if len > 1 << 20 {
        return Err(TikhError::Format(format!("header length {len} is implausible")));
    }
    let mut header = vec![0u8; len];
    input
        .read_exact(&mut header)
        .map_err(|_| TikhError::Format("truncated header".into()))?;
    let header: Header = serde_json::from_slice(&header)?;
    let n = header.n;
    let a = DenseMatrix::new(n, n, read_f64s(&mut input, n * n)?)?;
    let x_star = read_f64s(&mut input, n)?;
    let y = read_f64s(&mut input, n)?;
    let weight = match header.weight.as_str() {
        "identity" => WeightSpec::Identity,
        "explicit" => WeightSpec::explicit(DenseMatrix::new(n, n, read_f64s(&mut input, n * n)?)?)?,
        other => return Err(TikhError::Format(format!("unknown weight kind {other:?}"))),
    };
    let p = ProblemInstance::new(header.label, a, x_star, weight)?;
    let diff: f64 = p.y.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    if diff > 1e-12 * crate::linalg::norm(&y).max(f64::MIN_POSITIVE) {
        return Err(TikhError::Format("stored y disagrees with A x*".into()));
    }
    Ok(ProblemInstance { y, ..p })
}

pub fn save(path: impl AsRef<Path>, p: &ProblemInstance) -> Result<()> {
    let f = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(f);
    write_problem(&mut w, p)?;
    w.flush()?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<ProblemInstance> {
    let f = std::fs::File::open(path)?;
    read_problem(std::io::BufReader::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::build_fredholm;

    #[test]
    fn round_trip_identity_weight() {
        let p = build_fredholm(12).unwrap();
        let mut buf = Vec::new();
        write_problem(&mut buf, &p).unwrap();
        assert_eq!(&buf[..8], MAGIC);
        assert_eq!(read_problem(buf.as_slice()).unwrap(), p);
    }

    #[test]
    fn round_trip_explicit_weight() {
        let base = build_fredholm(5).unwrap();
        let w = WeightSpec::explicit(DenseMatrix::from_diag(&[1.0, 2.0, 3.0, 4.0, 5.0])).unwrap();
        let p = ProblemInstance::new("weighted", base.a, base.x_star, w).unwrap();
        let mut buf = Vec::new();
        write_problem(&mut buf, &p).unwrap();
        assert_eq!(read_problem(buf.as_slice()).unwrap(), p);
    }

    #[test]
    fn rejects_corruption() {
        let p = build_fredholm(4).unwrap();
        let mut buf = Vec::new();
        write_problem(&mut buf, &p).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_problem(bad.as_slice()), Err(TikhError::Format(_))));
        let truncated = &buf[..buf.len() - 3];
        assert!(matches!(read_problem(truncated), Err(TikhError::Format(_))));
        // perturb the last y entry
        let mut tampered = buf.clone();
        let last = tampered.len() - 8;
        tampered[last..].copy_from_slice(&1.0f64.to_le_bytes());
        assert!(read_problem(tampered.as_slice()).is_err());
    }
}
