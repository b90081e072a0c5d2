//! Content-addressed cache of full spectra, one file per model.
//!
//! The key hashes a format tag with the canonical model text, which already
//! names the graph, every parameter and the dynamics.

use std::fs;
use std::path::{Path, PathBuf};

use mrf_learn::io::model_to_text;
use mrf_learn::model::MrfModel;
use mrf_learn::spectral::persist::{read_spectrum, write_spectrum};
use mrf_learn::spectral::{ExactChain, Spectrum};
use sha2::{Digest, Sha256};

use crate::CliError;

const FORMAT_TAG: &str = "mrf-learn spectrum cache v1\n";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheOutcome {
    Disabled,
    Hit,
    Miss,
    /// The file existed but failed verification and was rewritten.
    Recomputed,
}

pub fn cache_key(model: &MrfModel) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(FORMAT_TAG.as_bytes());
    h.update(model_to_text(model).as_bytes());
    h.finalize().into()
}

pub fn cache_path(dir: &Path, model: &MrfModel) -> PathBuf {
    dir.join(format!("spectrum-{}.bin", hex::encode(cache_key(model))))
}

/// Reads the spectrum of `model` from `dir`, or computes and stores it.
pub fn spectrum_cached(dir: Option<&Path>, model: &MrfModel, cap: usize) -> Result<(Spectrum, CacheOutcome), CliError> {
    let compute = || -> Result<Spectrum, CliError> { Ok(ExactChain::new(model, cap)?.spectrum()?) };
    let Some(dir) = dir else {
        return Ok((compute()?, CacheOutcome::Disabled));
    };
    let key = cache_key(model);
    let path = cache_path(dir, model);
    let mut outcome = CacheOutcome::Miss;
    if let Ok(file) = fs::File::open(&path) {
        match read_spectrum(std::io::BufReader::new(file), &key) {
            Ok((nodes, spec)) if nodes == model.n() => return Ok((spec, CacheOutcome::Hit)),
            Ok(_) => eprintln!("warning: {} was written for another node count; recomputing", path.display()),
            Err(e) => eprintln!("warning: {}: {e}; recomputing", path.display()),
        }
        outcome = CacheOutcome::Recomputed;
    }
    let spec = compute()?;
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension("tmp");
    write_spectrum(std::io::BufWriter::new(fs::File::create(&tmp)?), model.n(), &key, &spec)?;
    fs::rename(&tmp, &path)?;
    Ok((spec, outcome))
}
