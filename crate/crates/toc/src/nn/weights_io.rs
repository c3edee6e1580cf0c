//! Binary weight files.
//!
//! Layout: magic `TCNN`, version `u16`, training seed `u64`, layer-spec
//! table, then the dense parameters as little-endian 64-bit floats in layer
//! order (weights row-major, then bias). Round-trips are bit-exact.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Activation, LayerSpec, Network};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"TCNN";
const VERSION: u16 = 1;

pub fn save_weights(net: &Network, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&net.seed().to_le_bytes())?;
    w.write_all(&(net.specs().len() as u32).to_le_bytes())?;
    for spec in net.specs() {
        match spec {
            LayerSpec::Dense { input, output, activation } => {
                w.write_all(&[0u8, activation_tag(*activation)])?;
                w.write_all(&(*input as u32).to_le_bytes())?;
                w.write_all(&(*output as u32).to_le_bytes())?;
            }
            LayerSpec::Dropout { rate } => {
                w.write_all(&[1u8])?;
                w.write_all(&rate.to_le_bytes())?;
            }
            LayerSpec::PowerNorm => w.write_all(&[2u8])?,
            LayerSpec::GaussianNoise { snr_db } => {
                w.write_all(&[3u8])?;
                w.write_all(&snr_db.to_le_bytes())?;
            }
        }
    }
    for p in net.params() {
        for v in p.weights.iter().chain(&p.bias) {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn load_weights(path: &Path) -> Result<Network> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    read_exact(&mut r, &mut magic, "magic")?;
    if &magic != MAGIC {
        return Err(Error::Corrupt(format!("bad magic {magic:?}")));
    }
    let version = read_u16(&mut r)?;
    if version != VERSION {
        return Err(Error::Version { found: version, expected: VERSION });
    }
    let seed = read_u64(&mut r)?;
    let n_specs = read_u32(&mut r)? as usize;
    if n_specs > 1 << 16 {
        return Err(Error::Corrupt(format!("implausible layer count {n_specs}")));
    }
    let mut specs = Vec::with_capacity(n_specs);
    for _ in 0..n_specs {
        let mut tag = [0u8; 1];
        read_exact(&mut r, &mut tag, "layer tag")?;
        let spec = match tag[0] {
            0 => {
                let mut act = [0u8; 1];
                read_exact(&mut r, &mut act, "activation tag")?;
                let input = read_u32(&mut r)? as usize;
                let output = read_u32(&mut r)? as usize;
                LayerSpec::Dense { input, output, activation: activation_from_tag(act[0])? }
            }
            1 => LayerSpec::Dropout { rate: read_f64(&mut r)? },
            2 => LayerSpec::PowerNorm,
            3 => LayerSpec::GaussianNoise { snr_db: read_f64(&mut r)? },
            t => return Err(Error::Corrupt(format!("unknown layer tag {t}"))),
        };
        specs.push(spec);
    }
    // Validates shapes and dimension chaining before any payload is read.
    let mut net = Network::new(specs)?;
    net.set_seed(seed);
    for p in net.params_mut() {
        for v in p.weights.iter_mut().chain(p.bias.iter_mut()) {
            *v = read_f64(&mut r)?;
        }
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::Corrupt("trailing bytes after payload".into()));
    }
    Ok(net)
}

fn activation_tag(a: Activation) -> u8 {
    match a {
        Activation::Relu => 0,
        Activation::Tanh => 1,
        Activation::Softmax => 2,
        Activation::Linear => 3,
    }
}

fn activation_from_tag(t: u8) -> Result<Activation> {
    Ok(match t {
        0 => Activation::Relu,
        1 => Activation::Tanh,
        2 => Activation::Softmax,
        3 => Activation::Linear,
        _ => return Err(Error::Corrupt(format!("unknown activation tag {t}"))),
    })
}

fn read_exact(r: &mut impl Read, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|_| Error::Truncated(format!("while reading {what}")))
}

fn read_u16(r: &mut impl Read) -> Result<u16> {
    let mut b = [0u8; 2];
    read_exact(r, &mut b, "u16")?;
    Ok(u16::from_le_bytes(b))
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b, "u32")?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b, "u64")?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b, "f64")?;
    Ok(f64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{ForwardRngs, Matrix, Mode};
    use crate::rng::{stream, stream_rng};

    fn sample_net() -> Network {
        let mut net = Network::new(vec![
            LayerSpec::dense(4, 3, Activation::Relu),
            LayerSpec::Dropout { rate: 0.2 },
            LayerSpec::dense(3, 2, Activation::Softmax),
        ])
        .unwrap();
        net.init_weights(&mut stream_rng(11, stream::WEIGHT_INIT));
        net.set_seed(11);
        net
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.tcnn");
        let net = sample_net();
        save_weights(&net, &path).unwrap();
        let loaded = load_weights(&path).unwrap();
        assert_eq!(loaded.specs(), net.specs());
        assert_eq!(loaded.params(), net.params());
        assert_eq!(loaded.seed(), 11);

        let x = Matrix::from_row(&[0.1, -0.4, 2.0, 0.9]);
        let (a, _) = net.forward(&x, Mode::Eval, &mut ForwardRngs::from_seed(5)).unwrap();
        let (b, _) = loaded.forward(&x, Mode::Eval, &mut ForwardRngs::from_seed(5)).unwrap();
        assert_eq!(a.data(), b.data());
    }

    #[test]
    fn truncated_file_is_a_truncation_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.tcnn");
        save_weights(&sample_net(), &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 9]).unwrap();
        assert!(matches!(load_weights(&path), Err(Error::Truncated(_))));
    }

    #[test]
    fn wrong_version_is_a_version_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.tcnn");
        save_weights(&sample_net(), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[4] = 0xFF;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load_weights(&path), Err(Error::Version { .. })));
    }

    #[test]
    fn incompatible_declared_dimensions_are_a_shape_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.tcnn");
        save_weights(&sample_net(), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        // second dense layer's declared input starts after:
        // magic(4)+version(2)+seed(8)+count(4) + dense(1+1+4+4) + dropout(1+8) = 37
        let off = 37 + 2;
        bytes[off..off + 4].copy_from_slice(&7u32.to_le_bytes());
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load_weights(&path), Err(Error::Shape(_))));
    }

    #[test]
    fn bad_magic_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.tcnn");
        std::fs::write(&path, b"NOPE....").unwrap();
        assert!(matches!(load_weights(&path), Err(Error::Corrupt(_))));
    }
}
