//! Dataset encoding and decoding.
//!
//! Binary format (bit-exact): magic `"MEBD"` (4 bytes), format version as
//! u16 little-endian (currently 1), then u64 LE `n`, u64 LE `d`, then
//! `n * d` IEEE-754 f64 little-endian values, row-major. A CSV reader (one
//! point per line, comma-separated reals) covers small inputs. Both decoders
//! accept arbitrary untrusted bytes without panicking; headers are validated
//! against the actual payload length before anything is allocated.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::DataError;
use crate::geometry::PointSet;
use crate::stability::InstanceSpec;

pub const MAGIC: [u8; 4] = *b"MEBD";
pub const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 8 + 8;

/// Encodes a point set into the binary dataset format.
pub fn write_mebd(ps: &PointSet) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + ps.data().len() * 8);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(ps.n() as u64).to_le_bytes());
    out.extend_from_slice(&(ps.d() as u64).to_le_bytes());
    for x in ps.data() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

/// Decodes the binary dataset format. The whole input must be consumed.
pub fn read_mebd(bytes: &[u8]) -> Result<PointSet, DataError> {
    if bytes.len() < HEADER_LEN {
        return Err(DataError::Truncated { expected: HEADER_LEN, actual: bytes.len() });
    }
    if bytes[0..4] != MAGIC {
        return Err(DataError::BadMagic);
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(DataError::BadVersion(version));
    }
    let n = u64::from_le_bytes(bytes[6..14].try_into().unwrap());
    let d = u64::from_le_bytes(bytes[14..22].try_into().unwrap());
    if n == 0 || d == 0 {
        return Err(DataError::EmptyDeclared { n, d });
    }
    let cells = n
        .checked_mul(d)
        .and_then(|c| c.checked_mul(8))
        .and_then(|b| usize::try_from(b).ok())
        .ok_or(DataError::SizeOverflow { n, d })?;
    let expected = HEADER_LEN + cells;
    match bytes.len() {
        l if l < expected => return Err(DataError::Truncated { expected, actual: l }),
        l if l > expected => return Err(DataError::TrailingBytes(l - expected)),
        _ => {}
    }
    let mut data = Vec::with_capacity((n * d) as usize);
    for chunk in bytes[HEADER_LEN..].chunks_exact(8) {
        data.push(f64::from_le_bytes(chunk.try_into().unwrap()));
    }
    PointSet::new(d as usize, data)
}

/// Parses one point per line, comma-separated real coordinates. Blank lines
/// are ignored; every row must have the same width.
pub fn read_csv(text: &str) -> Result<PointSet, DataError> {
    let mut d = None;
    let mut data = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let width = fields.len();
        match d {
            None => d = Some(width),
            Some(w) if w != width => {
                return Err(DataError::RaggedRow { line: lineno + 1, expected: w, actual: width })
            }
            _ => {}
        }
        for f in fields {
            let v: f64 = f
                .trim()
                .parse()
                .map_err(|e| DataError::Csv { line: lineno + 1, msg: format!("{e}: {f:?}") })?;
            data.push(v);
        }
    }
    let d = d.ok_or(DataError::Empty)?;
    PointSet::new(d, data)
}

pub fn write_mebd_file<P: AsRef<Path>>(ps: &PointSet, path: P) -> Result<(), DataError> {
    fs::write(path, write_mebd(ps))?;
    Ok(())
}

pub fn read_mebd_file<P: AsRef<Path>>(path: P) -> Result<PointSet, DataError> {
    read_mebd(&fs::read(path)?)
}

pub fn read_csv_file<P: AsRef<Path>>(path: P) -> Result<PointSet, DataError> {
    read_csv(&fs::read_to_string(path)?)
}

/// Near-exact enclosing-ball reference cached next to a dataset so that
/// evaluation sweeps do not recompute it.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CachedReference {
    pub radius: f64,
    pub center: Vec<f64>,
    /// Accuracy parameter the reference was computed at.
    pub epsilon: f64,
}

/// Sidecar JSON written next to every generated dataset: the generating
/// spec, the ground-truth inlier indices when outliers were planted, and
/// lazily cached reference balls.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Sidecar {
    pub spec: InstanceSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth_inliers: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<CachedReference>,
    /// Reference ball of the ground-truth inlier subset only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inlier_reference: Option<CachedReference>,
}

impl Sidecar {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("sidecar serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> PointSet {
        PointSet::new(2, vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let ps = square();
        let bytes = write_mebd(&ps);
        let back = read_mebd(&bytes).unwrap();
        assert_eq!(ps, back);
        assert_eq!(bytes, write_mebd(&back));
    }

    #[test]
    fn header_arithmetic() {
        // 4 magic + 2 version + 8 n + 8 d, then n*d*8 payload.
        let ps = PointSet::new(3, vec![0.0; 12]).unwrap(); // 4 points in R^3
        assert_eq!(write_mebd(&ps).len(), 22 + 4 * 3 * 8);
    }

    #[test]
    fn rejects_bad_magic_and_version() {
        let mut bytes = write_mebd(&square());
        bytes[0] = b'X';
        assert!(matches!(read_mebd(&bytes), Err(DataError::BadMagic)));
        let mut bytes = write_mebd(&square());
        bytes[4] = 2;
        assert!(matches!(read_mebd(&bytes), Err(DataError::BadVersion(2))));
    }

    #[test]
    fn rejects_truncation_and_trailing() {
        let bytes = write_mebd(&square());
        assert!(matches!(read_mebd(&bytes[..bytes.len() - 1]), Err(DataError::Truncated { .. })));
        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(read_mebd(&long), Err(DataError::TrailingBytes(1))));
    }

    #[test]
    fn rejects_huge_declared_size_without_allocating() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&MAGIC);
        bytes.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        bytes.extend_from_slice(&u64::MAX.to_le_bytes());
        bytes.extend_from_slice(&u64::MAX.to_le_bytes());
        assert!(matches!(read_mebd(&bytes), Err(DataError::SizeOverflow { .. })));
    }

    #[test]
    fn rejects_non_finite_payload() {
        let mut ps_bytes = write_mebd(&square());
        ps_bytes[22..30].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(read_mebd(&ps_bytes), Err(DataError::NonFinite { row: 0, col: 0 })));
    }

    #[test]
    fn csv_small_input() {
        let ps = read_csv("0.5, 1.0\n-2.0,3.25\n\n1e-3,4\n").unwrap();
        assert_eq!((ps.n(), ps.d()), (3, 2));
        assert_eq!(ps.row(1), &[-2.0, 3.25]);
    }

    #[test]
    fn csv_rejects_ragged_and_garbage() {
        assert!(matches!(read_csv("1,2\n3\n"), Err(DataError::RaggedRow { line: 2, .. })));
        assert!(matches!(read_csv("1,x\n"), Err(DataError::Csv { line: 1, .. })));
        assert!(matches!(read_csv("nan,1\n"), Err(DataError::NonFinite { .. })));
        assert!(matches!(read_csv("  \n\n"), Err(DataError::Empty)));
    }

    #[test]
    fn file_readers_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let ps = square();
        let bin_path = dir.path().join("pts.mebd");
        write_mebd_file(&ps, &bin_path).unwrap();
        assert_eq!(read_mebd_file(&bin_path).unwrap(), ps);
        let csv_path = dir.path().join("pts.csv");
        std::fs::write(&csv_path, "0,0\n1,0\n0,1\n1,1\n").unwrap();
        assert_eq!(read_csv_file(&csv_path).unwrap(), ps);
        assert!(matches!(read_mebd_file(dir.path().join("missing.mebd")), Err(DataError::Io(_))));
    }
}
