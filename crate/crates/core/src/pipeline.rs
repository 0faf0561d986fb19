//! Image → label map → descriptor for any supported method.

use rayon::prelude::*;

use crate::baselines::{self, DEFAULT_LDP_K};
use crate::dataset::{DatasetEntry, DescriptorRecord};
use crate::descriptor::{block_histograms, build_label_map, Descriptor, LabelMap, Method, DEFAULT_BLOCK_SIZE};
use crate::error::{Error, Result};
use crate::filter_bank::{build_bank, FilterBank, GaborParams};
use crate::image::GrayImage;

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractorConfig {
    pub method: Method,
    pub gabor: GaborParams,
    pub block_size: usize,
    /// Number of set bits in LDP codes.
    pub ldp_k: usize,
}

impl Default for ExtractorConfig {
    fn default() -> Self {
        Self {
            method: Method::Lmdp,
            gabor: GaborParams::default(),
            block_size: DEFAULT_BLOCK_SIZE,
            ldp_k: DEFAULT_LDP_K,
        }
    }
}

/// Reusable extractor; the filter bank is built once.
#[derive(Debug, Clone)]
pub struct Extractor {
    config: ExtractorConfig,
    bank: Option<FilterBank>,
}

impl Extractor {
    pub fn new(config: ExtractorConfig) -> Result<Self> {
        if config.block_size == 0 || config.block_size > u16::MAX as usize {
            return Err(Error::param(format!("block size must be in 1..=65535, got {}", config.block_size)));
        }
        if config.method == Method::Ldp && !(1..=7).contains(&config.ldp_k) {
            return Err(Error::param(format!("LDP k must be in 1..=7, got {}", config.ldp_k)));
        }
        let bank = if config.method.uses_bank() {
            Some(build_bank(config.gabor)?)
        } else {
            None
        };
        Ok(Self { config, bank })
    }

    pub fn config(&self) -> &ExtractorConfig {
        &self.config
    }

    pub fn bank(&self) -> Option<&FilterBank> {
        self.bank.as_ref()
    }

    pub fn label_map(&self, image: &GrayImage) -> Result<LabelMap> {
        let bank = || self.bank.as_ref().expect("bank built for gabor methods");
        match self.config.method {
            Method::Lmdp => build_label_map(image, bank()),
            Method::Lldp => baselines::lldp_gabor_eldp(image, bank()),
            Method::Lbp => baselines::lbp_riu2(image),
            Method::Ldp => baselines::ldp(image, self.config.ldp_k),
            Method::Eldp => baselines::eldp(image),
            Method::Ldn => baselines::ldn(image),
        }
    }

    pub fn describe(&self, image: &GrayImage) -> Result<Descriptor> {
        let (w, h, p) = (image.width(), image.height(), self.config.block_size);
        if w < p || h < p {
            return Err(Error::input(format!("{w}x{h} image is smaller than one {p}x{p} block")));
        }
        block_histograms(&self.label_map(image)?, p)
    }

    /// One record per entry, in entry order. Images are processed in
    /// parallel; the output does not depend on the worker count.
    pub fn describe_entries(&self, entries: &[DatasetEntry]) -> Result<Vec<DescriptorRecord>> {
        entries
            .par_iter()
            .map(|e| {
                let d = self
                    .describe(&e.image)
                    .map_err(|err| Error::input(format!("{}: {err}", e.key())))?;
                Ok(DescriptorRecord::new(e.key(), d))
            })
            .collect()
    }
}
