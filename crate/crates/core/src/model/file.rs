//! Binary model container.
//!
//! Layout: 8-byte magic, format version (u32 LE), header length (u64 LE),
//! a JSON header with the model config and tensor lengths, then every tensor
//! as little-endian f64 in header order.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::value_model::{ModelConfig, ValueModel};

pub const MAGIC: &[u8; 8] = b"VKMODEL\0";
pub const FORMAT_VERSION: u32 = 1;

const TENSOR_NAMES: [&str; 4] = ["features", "prompts", "head_weights", "head_bias"];

#[derive(Serialize, Deserialize)]
struct Header {
    config: ModelConfig,
    hash: String,
    tensors: Vec<(String, usize)>,
}

const HASH_NAME: &str = "fnv1a64-seeded";

pub fn to_bytes(model: &ValueModel) -> Vec<u8> {
    let tensors = model.tensors();
    let header = Header {
        config: model.config().clone(),
        hash: HASH_NAME.into(),
        tensors: TENSOR_NAMES.iter().zip(&tensors).map(|(n, t)| (n.to_string(), t.len())).collect(),
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let total: usize = tensors.iter().map(|t| t.len()).sum();
    let mut out = Vec::with_capacity(20 + json.len() + 8 * total);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(json.len() as u64).to_le_bytes());
    out.extend_from_slice(&json);
    for t in tensors {
        for x in t {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

fn take<'a>(buf: &mut &'a [u8], n: usize) -> Result<&'a [u8]> {
    if buf.len() < n {
        return Err(Error::Decode("model file is truncated".into()));
    }
    let (head, rest) = buf.split_at(n);
    *buf = rest;
    Ok(head)
}

pub fn from_bytes(bytes: &[u8]) -> Result<ValueModel> {
    let mut buf = bytes;
    if take(&mut buf, 8)? != MAGIC {
        return Err(Error::Decode("not a model file (bad magic)".into()));
    }
    let version = u32::from_le_bytes(take(&mut buf, 4)?.try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::FormatVersion {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let hlen = u64::from_le_bytes(take(&mut buf, 8)?.try_into().unwrap());
    let hlen = usize::try_from(hlen).map_err(|_| Error::Decode("header length overflows".into()))?;
    let header: Header =
        serde_json::from_slice(take(&mut buf, hlen)?).map_err(|e| Error::Decode(format!("model header: {e}")))?;
    if header.hash != HASH_NAME {
        return Err(Error::Decode(format!("unsupported hash function {:?}", header.hash)));
    }
    if header.tensors.len() != TENSOR_NAMES.len()
        || header.tensors.iter().zip(TENSOR_NAMES).any(|((n, _), want)| n != want)
    {
        return Err(Error::Decode("unexpected tensor list in model header".into()));
    }
    let mut tensors: Vec<Vec<f64>> = Vec::with_capacity(4);
    for (name, len) in &header.tensors {
        let bytes_len = len
            .checked_mul(8)
            .ok_or_else(|| Error::Decode(format!("tensor {name} is too large")))?;
        let raw = take(&mut buf, bytes_len)?;
        tensors.push(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect());
    }
    if !buf.is_empty() {
        return Err(Error::Decode("trailing bytes after model tensors".into()));
    }
    let mut it = tensors.into_iter();
    let (f, p, w, b) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
    ValueModel::from_parts(header.config, f, p, w, b).map_err(|e| Error::Decode(e.to_string()))
}

pub fn save(model: &ValueModel, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&to_bytes(model)).map_err(|e| Error::io(path, e))?;
    f.flush().map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<ValueModel> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    from_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::value_model::Mode;

    fn model(mode: Mode) -> ValueModel {
        ValueModel::new(ModelConfig {
            hash_dim: 32,
            embed_dim: 3,
            mode,
            seed: 9,
            ..ModelConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        for mode in [Mode::Regression, Mode::Classification] {
            let m = model(mode);
            let bytes = to_bytes(&m);
            let back = from_bytes(&bytes).unwrap();
            assert_eq!(back, m);
            assert_eq!(to_bytes(&back), bytes);
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.bin");
        let m = model(Mode::Regression);
        save(&m, &p).unwrap();
        assert_eq!(load(&p).unwrap(), m);
    }

    #[test]
    fn rejects_version_mismatch() {
        let mut bytes = to_bytes(&model(Mode::Regression));
        bytes[8..12].copy_from_slice(&2u32.to_le_bytes());
        assert!(matches!(
            from_bytes(&bytes),
            Err(Error::FormatVersion { found: 2, expected: 1 })
        ));
    }

    #[test]
    fn rejects_corruption() {
        let bytes = to_bytes(&model(Mode::Regression));
        assert!(from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(from_bytes(&extra).is_err());
        let mut magic = bytes;
        magic[0] = b'X';
        assert!(from_bytes(&magic).is_err());
    }
}
