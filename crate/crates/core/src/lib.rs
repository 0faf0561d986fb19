//! Palmprint texture descriptors built on local multiple directional patterns.
//!
//! The pipeline filters a grayscale region of interest with a bank of
//! oriented Gabor line detectors ([`filter_bank`], [`response`]), encodes the
//! circular response vector at every pixel into a label describing how many
//! dominant line directions meet there and where they point ([`pattern`]),
//! and summarizes the label map as block-wise histograms compared with the
//! Chi-square distance ([`descriptor`]). [`baselines`] provides LBP, the
//! Kirsch-mask family and a Gabor line pattern through the same histogram
//! path, and [`evaluation`] implements verification (EER) and rank-1
//! identification.
//!
//! ```
//! use lmdp::prelude::*;
//!
//! let bank = build_bank(GaborParams::default()).unwrap();
//! let spec = SynthSpec { angles: vec![0.5, 2.0], ..SynthSpec::default() };
//! let image = render_synthetic(&spec, 0).unwrap().image;
//! let labels = build_label_map(&image, &bank).unwrap();
//! let d = block_histograms(&labels, 16).unwrap();
//! assert_eq!(d.len(), 64 * 156);
//! assert_eq!(chi_square(&d, &d).unwrap(), 0.0);
//! ```

pub mod baselines;
pub mod dataset;
pub mod descriptor;
pub mod error;
pub mod evaluation;
pub mod filter_bank;
pub mod image;
pub mod pattern;
pub mod pipeline;
pub mod response;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::dataset::{
        load_dataset, load_pgm, render_synthetic, write_pgm, DatasetEntry, DescriptorRecord, SynthSpec,
    };
    pub use crate::descriptor::{block_histograms, build_label_map, chi_square, Descriptor, LabelMap, Method};
    pub use crate::error::{Error, Result};
    pub use crate::evaluation::{all_pairs_verification, compute_eer, identification, MatchTrial, Sample};
    pub use crate::filter_bank::{build_bank, FilterBank, GaborParams};
    pub use crate::image::GrayImage;
    pub use crate::pattern::{analyze_point, encode_bits, BitPattern, DirectionAnalysis};
    pub use crate::pipeline::{Extractor, ExtractorConfig};
    pub use crate::response::{convolve_responses, dominant_direction, ResponseStack};
}
