//! `DHF1` field snapshots.
//!
//! Layout (little-endian): magic `DHF1`, `u32` dimension, `u32` points per
//! dimension, `f64` box length, then `M^n` `f64` physical samples row-major.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;

pub const MAGIC: &[u8; 4] = b"DHF1";

pub fn write_field<W: Write>(mut out: W, field: &SpectralField) -> Result<()> {
    let grid = field.grid();
    out.write_all(MAGIC)?;
    out.write_all(&(grid.dim() as u32).to_le_bytes())?;
    out.write_all(&(grid.points() as u32).to_le_bytes())?;
    out.write_all(&grid.box_length().to_le_bytes())?;
    let mut buf = Vec::with_capacity(grid.len() * 8);
    for v in field.to_physical() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_field<R: Read>(mut input: R) -> Result<SpectralField> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::BadSnapshot(format!("wrong magic {magic:?}")));
    }
    let mut word = [0u8; 4];
    input.read_exact(&mut word)?;
    let dim = u32::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let points = u32::from_le_bytes(word) as usize;
    if !points.is_multiple_of(2) {
        return Err(Error::BadSnapshot(format!("odd point count {points}")));
    }
    let mut double = [0u8; 8];
    input.read_exact(&mut double)?;
    let box_length = f64::from_le_bytes(double);
    let grid = Grid::new(dim, points, box_length).map_err(|e| Error::BadSnapshot(e.to_string()))?;

    let mut raw = vec![0u8; grid.len() * 8];
    input.read_exact(&mut raw)?;
    let values: Vec<f64> = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    SpectralField::forward(&grid, &values)
}

pub fn save(path: impl AsRef<Path>, field: &SpectralField) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_field(std::io::BufWriter::new(file), field)
}

pub fn load(path: impl AsRef<Path>) -> Result<SpectralField> {
    let file = std::fs::File::open(path)?;
    read_field(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn header_layout_is_exact() {
        let g = Grid::new(2, 8, 1.5).unwrap();
        let f = SpectralField::constant(&g, 3.0);
        let mut bytes = Vec::new();
        write_field(&mut bytes, &f).unwrap();
        assert_eq!(bytes.len(), 4 + 4 + 4 + 8 + 64 * 8);
        assert_eq!(&bytes[..4], b"DHF1");
        assert_eq!(&bytes[4..8], &2u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &8u32.to_le_bytes());
        assert_eq!(&bytes[12..20], &1.5f64.to_le_bytes());
        assert_eq!(&bytes[20..28], &3.0f64.to_le_bytes());
    }

    #[test]
    fn round_trip_preserves_samples() {
        let g = Grid::new(3, 8, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = random_field(&g, &mut rng, 0.0, f64::INFINITY);
        let mut bytes = Vec::new();
        write_field(&mut bytes, &f).unwrap();
        let back = read_field(bytes.as_slice()).unwrap();
        assert_eq!(back.grid(), f.grid());
        let (a, b) = (f.to_physical(), back.to_physical());
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn rejects_bad_headers() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let mut bytes = Vec::new();
        write_field(&mut bytes, &SpectralField::zeros(&g)).unwrap();
        let mut wrong_magic = bytes.clone();
        wrong_magic[3] = b'2';
        assert!(matches!(read_field(wrong_magic.as_slice()), Err(Error::BadSnapshot(_))));
        let mut odd = bytes.clone();
        odd[8..12].copy_from_slice(&9u32.to_le_bytes());
        assert!(matches!(read_field(odd.as_slice()), Err(Error::BadSnapshot(_))));
        assert!(read_field(&bytes[..30]).is_err());
    }
}
