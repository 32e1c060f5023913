//! Parameter container files.
//!
//! Layout: the 8-byte magic `SPAPARSE`, a little-endian `u64` header
//! length, a JSON header, then one block per tensor. A block is a
//! little-endian `u32` name length, the UTF-8 name, and the tensor data
//! as raw little-endian floats. The header lists every block's name and
//! shape in file order.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::params::ParamStore;
use super::tensor::{Real, Tensor};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"SPAPARSE";
pub const FORMAT_VERSION: u32 = 1;

const SQ_GRAD: &str = "@sq_grad";
const SQ_DELTA: &str = "@sq_delta";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub name: String,
    pub shape: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub format_version: u32,
    pub dtype: String,
    /// Caller-defined metadata (configuration, vocabulary, hashes).
    pub meta: Value,
    pub tensors: Vec<TensorEntry>,
}

pub fn write_container<R: Real, W: Write>(mut w: W, meta: Value, tensors: &[(String, &Tensor<R>)]) -> Result<()> {
    let header = Header {
        format_version: FORMAT_VERSION,
        dtype: R::DTYPE.to_string(),
        meta,
        tensors: tensors
            .iter()
            .map(|(n, t)| TensorEntry {
                name: n.clone(),
                shape: t.shape().to_vec(),
            })
            .collect(),
    };
    let json = serde_json::to_vec(&header).map_err(|e| Error::model("header", e.to_string()))?;
    w.write_all(MAGIC)?;
    w.write_all(&(json.len() as u64).to_le_bytes())?;
    w.write_all(&json)?;
    let mut buf = Vec::new();
    for (name, t) in tensors {
        buf.clear();
        buf.extend_from_slice(&(name.len() as u32).to_le_bytes());
        buf.extend_from_slice(name.as_bytes());
        for &x in t.data() {
            x.write_le(&mut buf);
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

fn read_exact_field<Rd: Read>(r: &mut Rd, n: usize, field: &str) -> Result<Vec<u8>> {
    let mut buf = vec![0u8; n];
    r.read_exact(&mut buf)
        .map_err(|e| Error::model(field, format!("truncated ({e})")))?;
    Ok(buf)
}

/// Reads and checks the magic and header, leaving `r` at the first block.
pub fn read_header<Rd: Read>(mut r: Rd) -> Result<Header> {
    let magic = read_exact_field(&mut r, 8, "magic")?;
    if magic != MAGIC {
        return Err(Error::model("magic", "not a model file"));
    }
    let len = u64::from_le_bytes(read_exact_field(&mut r, 8, "header length")?.try_into().unwrap());
    if len > (1 << 32) {
        return Err(Error::model("header length", format!("implausible length {len}")));
    }
    let json = read_exact_field(&mut r, len as usize, "header")?;
    let header: Header = serde_json::from_slice(&json).map_err(|e| Error::model("header", e.to_string()))?;
    if header.format_version != FORMAT_VERSION {
        return Err(Error::model(
            "format_version",
            format!("expected {FORMAT_VERSION}, found {}", header.format_version),
        ));
    }
    Ok(header)
}

pub fn read_container<R: Real, Rd: Read>(mut r: Rd) -> Result<(Header, Vec<(String, Tensor<R>)>)> {
    let header = read_header(&mut r)?;
    if header.dtype != R::DTYPE {
        return Err(Error::model(
            "dtype",
            format!("expected {}, found {}", R::DTYPE, header.dtype),
        ));
    }
    let mut tensors = Vec::with_capacity(header.tensors.len());
    for entry in &header.tensors {
        let field = format!("tensor {}", entry.name);
        let nlen = u32::from_le_bytes(read_exact_field(&mut r, 4, &field)?.try_into().unwrap()) as usize;
        let name = read_exact_field(&mut r, nlen, &field)?;
        if name != entry.name.as_bytes() {
            return Err(Error::model(&field, "block name does not match header"));
        }
        let count: usize = entry.shape.iter().product();
        let raw = read_exact_field(&mut r, count * R::BYTES, &field)?;
        let data = raw.chunks_exact(R::BYTES).map(R::read_le).collect();
        tensors.push((entry.name.clone(), Tensor::from_vec(&entry.shape, data)?));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(Error::model("trailer", "unexpected bytes after the last tensor"));
    }
    Ok((header, tensors))
}

/// Values, and optionally optimizer state, of every parameter.
pub fn store_tensors<R: Real>(store: &ParamStore<R>, with_state: bool) -> Vec<(String, &Tensor<R>)> {
    let mut out = Vec::new();
    for (_, p) in store.iter() {
        out.push((p.name.clone(), &p.value));
        if with_state {
            out.push((format!("{}{SQ_GRAD}", p.name), &p.sq_grad));
            out.push((format!("{}{SQ_DELTA}", p.name), &p.sq_delta));
        }
    }
    out
}

/// Copies tensors into a store whose layout was built from the saved
/// configuration. Every parameter must be present with its exact shape;
/// optimizer state is restored when present.
pub fn load_into_store<R: Real>(store: &mut ParamStore<R>, tensors: Vec<(String, Tensor<R>)>) -> Result<()> {
    let mut seen = vec![false; store.len()];
    for (name, t) in tensors {
        let (base, slot) = if let Some(b) = name.strip_suffix(SQ_GRAD) {
            (b, 1)
        } else if let Some(b) = name.strip_suffix(SQ_DELTA) {
            (b, 2)
        } else {
            (name.as_str(), 0)
        };
        let id = store
            .id(base)
            .ok_or_else(|| Error::model(format!("tensor {name}"), "unknown parameter"))?;
        let p = store.param_mut(id);
        if p.value.shape() != t.shape() {
            return Err(Error::model(
                format!("tensor {name}"),
                format!("shape {:?} does not match expected {:?}", t.shape(), p.value.shape()),
            ));
        }
        match slot {
            0 => {
                p.value = t;
                seen[id.index()] = true;
            }
            1 => p.sq_grad = t,
            _ => p.sq_delta = t,
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        let name = &store.iter().nth(i).expect("index in range").1.name;
        return Err(Error::model(format!("tensor {name}"), "missing"));
    }
    Ok(())
}
