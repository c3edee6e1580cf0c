//! Dataset files.
//!
//! Binary layout: magic `TCDS`, version `u16`, header (counts, snr_s,
//! impairment flag, seed), then per sample 128 little-endian `f64` values
//! followed by the label byte, train split first. A CSV export (one row per
//! sample: 128 floats then the label) is available for inspection.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Dataset, DatasetMeta, Sample, SAMPLE_DIM};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"TCDS";
const VERSION: u16 = 1;

pub fn save_dataset(ds: &Dataset, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(ds.train.len() as u32).to_le_bytes())?;
    w.write_all(&(ds.test.len() as u32).to_le_bytes())?;
    w.write_all(&ds.meta.snr_s_db.to_le_bytes())?;
    w.write_all(&[ds.meta.phase_impairment as u8])?;
    w.write_all(&ds.meta.seed.to_le_bytes())?;
    for s in ds.train.iter().chain(&ds.test) {
        for v in &s.iq {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&[s.label])?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Truncated("while reading magic".into()))?;
    if &magic != MAGIC {
        return Err(Error::Corrupt(format!("bad magic {magic:?}")));
    }
    let version = read_u16(&mut r)?;
    if version != VERSION {
        return Err(Error::Version { found: version, expected: VERSION });
    }
    let n_train = read_u32(&mut r)? as usize;
    let n_test = read_u32(&mut r)? as usize;
    if n_train + n_test > 1 << 24 {
        return Err(Error::Corrupt(format!(
            "implausible sample count {}",
            n_train + n_test
        )));
    }
    let snr_s_db = read_f64(&mut r)?;
    let mut flag = [0u8; 1];
    r.read_exact(&mut flag)
        .map_err(|_| Error::Truncated("while reading flags".into()))?;
    let seed = read_u64(&mut r)?;

    let mut read_samples = |n: usize| -> Result<Vec<Sample>> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let mut iq = vec![0.0; SAMPLE_DIM];
            for v in &mut iq {
                *v = read_f64(&mut r)?;
            }
            let mut label = [0u8; 1];
            r.read_exact(&mut label)
                .map_err(|_| Error::Truncated("while reading label".into()))?;
            out.push(Sample { iq, label: label[0] });
        }
        Ok(out)
    };
    let train = read_samples(n_train)?;
    let test = read_samples(n_test)?;
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Corrupt("trailing bytes after payload".into()));
    }

    let mut label_counts = [0usize; 2];
    for s in train.iter().chain(&test) {
        if s.label > 1 {
            return Err(Error::Corrupt(format!("unknown label {}", s.label)));
        }
        label_counts[s.label as usize] += 1;
    }
    Ok(Dataset {
        train,
        test,
        meta: DatasetMeta {
            snr_s_db,
            phase_impairment: flag[0] != 0,
            seed,
            n_train,
            n_test,
            label_counts,
        },
    })
}

/// Writes one row per sample: 128 floats then the label.
pub fn export_csv(ds: &Dataset, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for s in ds.train.iter().chain(&ds.test) {
        for v in &s.iq {
            write!(w, "{v},")?;
        }
        writeln!(w, "{}", s.label)?;
    }
    w.flush()?;
    Ok(())
}

fn read_u16(r: &mut impl Read) -> Result<u16> {
    let mut b = [0u8; 2];
    r.read_exact(&mut b).map_err(|_| Error::Truncated("while reading u16".into()))?;
    Ok(u16::from_le_bytes(b))
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(|_| Error::Truncated("while reading u32".into()))?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(|_| Error::Truncated("while reading u64".into()))?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(|_| Error::Truncated("while reading f64".into()))?;
    Ok(f64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{make_dataset, SensingConfig};

    fn sample_ds() -> Dataset {
        make_dataset(&SensingConfig {
            n_samples: 60,
            snr_s_db: 10.0,
            phase_impairment: false,
            seed: 4,
        })
        .unwrap()
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.tcds");
        let ds = sample_ds();
        save_dataset(&ds, &path).unwrap();
        let loaded = load_dataset(&path).unwrap();
        assert_eq!(ds, loaded);
    }

    #[test]
    fn header_records_snr() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.tcds");
        let mut ds = sample_ds();
        ds.meta.snr_s_db = 10.0;
        save_dataset(&ds, &path).unwrap();
        assert_eq!(load_dataset(&path).unwrap().meta.snr_s_db, 10.0);
    }

    #[test]
    fn mismatched_count_is_a_truncation_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.tcds");
        save_dataset(&sample_ds(), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        // inflate declared train count beyond the payload
        bytes[6..10].copy_from_slice(&500u32.to_le_bytes());
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load_dataset(&path), Err(Error::Truncated(_))));
    }

    #[test]
    fn corrupt_magic_is_distinct_from_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.tcds");
        save_dataset(&sample_ds(), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load_dataset(&path), Err(Error::Corrupt(_))));
    }

    #[test]
    fn csv_export_has_one_row_per_sample() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.csv");
        let ds = sample_ds();
        export_csv(&ds, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 60);
        assert_eq!(text.lines().next().unwrap().split(',').count(), 129);
    }
}
