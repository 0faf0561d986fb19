//! Image ingestion, dataset layout, descriptor persistence and synthetic data.
//!
//! A dataset is a directory of `<palm_id>_<sample_id>.pgm` files. The palm id
//! is everything before the last underscore.

pub mod pgm;
pub mod store;
pub mod synth;

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::GrayImage;

pub use pgm::{decode_pgm, encode_pgm, load_pgm, write_pgm};
pub use store::{read_records, write_records, DescriptorRecord};
pub use synth::{render_identity_set, render_synthetic, SynthSpec, SyntheticImage};

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetEntry {
    pub palm_id: String,
    pub sample_id: String,
    pub image: GrayImage,
}

impl DatasetEntry {
    /// `<palm_id>_<sample_id>`, the identity stored with descriptors.
    pub fn key(&self) -> String {
        format!("{}_{}", self.palm_id, self.sample_id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedFile {
    pub path: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    /// Sorted by `(palm_id, sample_id)`.
    pub entries: Vec<DatasetEntry>,
    pub skipped: Vec<SkippedFile>,
}

/// Splits a file stem at its last underscore into `(palm, sample)`.
pub fn parse_sample_name(stem: &str) -> Option<(&str, &str)> {
    let (palm, sample) = stem.rsplit_once('_')?;
    (!palm.is_empty() && !sample.is_empty()).then_some((palm, sample))
}

pub fn load_dataset(dir: impl AsRef<Path>) -> Result<Dataset> {
    let dir = dir.as_ref();
    let mut named = Vec::new();
    let mut skipped = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if !path.is_file() {
            continue;
        }
        let is_pgm = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
        let stem = path.file_stem().and_then(|s| s.to_str());
        match (is_pgm, stem.and_then(parse_sample_name)) {
            (true, Some((palm, sample))) => {
                named.push((palm.to_string(), sample.to_string(), path.clone()));
            }
            (false, _) => skipped.push(SkippedFile {
                path,
                reason: "not a .pgm file".into(),
            }),
            (true, None) => skipped.push(SkippedFile {
                path,
                reason: "file name is not <palm>_<sample>.pgm".into(),
            }),
        }
    }
    named.sort();
    if let Some(w) = named.windows(2).find(|w| w[0].0 == w[1].0 && w[0].1 == w[1].1) {
        return Err(Error::input(format!(
            "duplicate sample {}_{} ({} and {})",
            w[0].0,
            w[0].1,
            w[0].2.display(),
            w[1].2.display()
        )));
    }
    skipped.sort_by(|a, b| a.path.cmp(&b.path));
    if named.is_empty() {
        log::warn!("no <palm>_<sample>.pgm images in {}", dir.display());
    }
    let entries = named
        .into_par_iter()
        .map(|(palm_id, sample_id, path)| {
            Ok(DatasetEntry {
                palm_id,
                sample_id,
                image: load_pgm(&path)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset { entries, skipped })
}

/// Writes entries as `<palm>_<sample>.pgm` files into `dir`.
pub fn write_dataset(dir: impl AsRef<Path>, entries: &[DatasetEntry]) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for e in entries {
        write_pgm(dir.join(format!("{}.pgm", e.key())), &e.image)?;
    }
    Ok(())
}
