//! Binary spectrum files.
//!
//! Layout, all integers and floats little-endian:
//! `b"MRFSPEC1"`, node count (u64), state count `N` (u64), 32-byte model
//! hash, `N` stationary weights, `N` eigenvalues, then the `N` eigenvectors
//! one after another (`N` values each), and a SHA-256 digest of everything
//! before it.

use super::eigen::Spectrum;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use sha2::{Digest, Sha256};
use std::io::{Read, Write};

const MAGIC: &[u8; 8] = b"MRFSPEC1";

pub fn write_spectrum<W: Write>(mut out: W, nodes: usize, model_hash: &[u8; 32], spec: &Spectrum) -> Result<()> {
    let n = spec.len();
    let mut buf = Vec::with_capacity(8 * (3 + 2 * n + n * n) + 64);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(nodes as u64).to_le_bytes());
    buf.extend_from_slice(&(n as u64).to_le_bytes());
    buf.extend_from_slice(model_hash);
    for v in spec.pi().iter().chain(spec.eigenvalues()).chain(spec.vectors().as_slice()) {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);
    out.write_all(&buf)?;
    Ok(())
}

fn corrupt(msg: &str) -> Error {
    Error::Input(format!("corrupt spectrum file: {msg}"))
}

/// Reads a spectrum, verifying the digest and that it was written for `model_hash`.
pub fn read_spectrum<R: Read>(mut input: R, model_hash: &[u8; 32]) -> Result<(usize, Spectrum)> {
    let mut buf = Vec::new();
    input.read_to_end(&mut buf)?;
    if buf.len() < 8 + 16 + 32 + 32 {
        return Err(corrupt("truncated header"));
    }
    let (body, digest) = buf.split_at(buf.len() - 32);
    if Sha256::digest(body).as_slice() != digest {
        return Err(corrupt("digest mismatch"));
    }
    if &body[..8] != MAGIC {
        return Err(corrupt("bad magic"));
    }
    let word = |k: usize| u64::from_le_bytes(body[k..k + 8].try_into().expect("8 bytes"));
    let nodes = word(8) as usize;
    let n = word(16) as usize;
    if &body[24..56] != model_hash {
        return Err(corrupt("model hash mismatch"));
    }
    let floats = &body[56..];
    let expected = n.checked_mul(n + 2).and_then(|c| c.checked_mul(8));
    if expected != Some(floats.len()) {
        return Err(corrupt("payload length does not match state count"));
    }
    let values: Vec<f64> = floats.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    let pi = values[..n].to_vec();
    let lam = values[n..2 * n].to_vec();
    let vecs = Matrix::from_vec(n, n, values[2 * n..].to_vec());
    Ok((nodes, Spectrum::from_parts(pi, lam, vecs)?))
}
