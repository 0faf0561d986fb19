//! Verification and identification protocols, plus dominant-direction statistics.
//!
//! Scores are Chi-square distances: a pair is accepted when its score is at
//! most the threshold.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::descriptor::{chi_square, lmdp_labels_and_counts, Descriptor};
use crate::error::{Error, Result};
use crate::filter_bank::FilterBank;
use crate::image::GrayImage;

/// A descriptor tagged with the palm it was extracted from.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub palm_id: String,
    pub descriptor: Descriptor,
}

impl Sample {
    pub fn new(palm_id: impl Into<String>, descriptor: Descriptor) -> Self {
        Self {
            palm_id: palm_id.into(),
            descriptor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchTrial {
    pub score: f64,
    pub genuine: bool,
}

/// Every unordered pair `(i, j)`, `i < j`, in row-major order.
pub fn all_pairs_verification(samples: &[Sample]) -> Result<Vec<MatchTrial>> {
    if samples.len() < 2 {
        return Err(Error::input(format!(
            "verification needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let first = &samples[0].palm_id;
    if samples.iter().all(|s| &s.palm_id == first) {
        return Err(Error::input("verification needs at least 2 identities"));
    }
    let rows: Vec<Vec<MatchTrial>> = (0..samples.len())
        .into_par_iter()
        .map(|i| {
            samples[i + 1..]
                .iter()
                .map(|other| {
                    Ok(MatchTrial {
                        score: chi_square(&samples[i].descriptor, &other.descriptor)?,
                        genuine: samples[i].palm_id == other.palm_id,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(rows.concat())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub threshold: f64,
    pub far: f64,
    pub frr: f64,
}

/// Operating points in increasing threshold order. The first point has
/// threshold `-inf` (everything rejected).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
}

impl RocCurve {
    /// `threshold,far,frr` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,far,frr\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{},{}", p.threshold, p.far, p.frr);
        }
        out
    }

    /// At most `max_points` points, evenly spaced by index and always keeping
    /// both ends. `0` keeps everything.
    pub fn downsample(&self, max_points: usize) -> RocCurve {
        let n = self.points.len();
        if max_points == 0 || n <= max_points {
            return self.clone();
        }
        if max_points == 1 {
            return RocCurve { points: vec![self.points[n - 1]] };
        }
        let points = (0..max_points)
            .map(|i| self.points[i * (n - 1) / (max_points - 1)])
            .collect();
        RocCurve { points }
    }
}

/// Equal error rate over the full threshold sweep.
///
/// Thresholds are the distinct trial scores. The crossing of FAR and FRR is
/// located between the last point with `FAR < FRR` and the first with
/// `FAR >= FRR`; both rates are interpolated linearly there.
pub fn compute_eer(trials: &[MatchTrial]) -> Result<(f64, RocCurve)> {
    if let Some(t) = trials.iter().find(|t| !(t.score.is_finite() && t.score >= 0.0)) {
        return Err(Error::input(format!("invalid score {}", t.score)));
    }
    let mut genuine: Vec<f64> = trials.iter().filter(|t| t.genuine).map(|t| t.score).collect();
    let mut impostor: Vec<f64> = trials.iter().filter(|t| !t.genuine).map(|t| t.score).collect();
    if genuine.is_empty() || impostor.is_empty() {
        return Err(Error::input(format!(
            "EER needs genuine and impostor trials, got {} and {}",
            genuine.len(),
            impostor.len()
        )));
    }
    genuine.sort_by(f64::total_cmp);
    impostor.sort_by(f64::total_cmp);
    let mut thresholds: Vec<f64> = genuine.iter().chain(&impostor).copied().collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();

    let (ng, ni) = (genuine.len() as f64, impostor.len() as f64);
    let mut points = Vec::with_capacity(thresholds.len() + 1);
    points.push(RocPoint {
        threshold: f64::NEG_INFINITY,
        far: 0.0,
        frr: 1.0,
    });
    let (mut gi, mut ii) = (0, 0);
    for t in thresholds {
        while gi < genuine.len() && genuine[gi] <= t {
            gi += 1;
        }
        while ii < impostor.len() && impostor[ii] <= t {
            ii += 1;
        }
        points.push(RocPoint {
            threshold: t,
            far: ii as f64 / ni,
            frr: (genuine.len() - gi) as f64 / ng,
        });
    }

    // The first point has FAR < FRR and the last accepts everything, so the
    // crossing always has a predecessor.
    let cross = points
        .iter()
        .position(|p| p.far >= p.frr)
        .expect("the last point accepts everything");
    let (a, b) = (points[cross - 1], points[cross]);
    let (da, db) = (a.far - a.frr, b.far - b.frr);
    let alpha = -da / (db - da);
    let eer = a.far + alpha * (b.far - a.far);
    Ok((eer, RocCurve { points }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentificationResult {
    pub train_k: usize,
    pub n_queries: usize,
    pub n_correct: usize,
}

impl IdentificationResult {
    pub fn accuracy(&self) -> f64 {
        self.n_correct as f64 / self.n_queries as f64
    }
}

/// Rank-1 nearest-neighbour identification.
///
/// The first `train_k` samples of each palm, in the given order, become
/// templates; the rest are queries. Ties go to the template met first.
pub fn identification(samples: &[Sample], train_k: usize) -> Result<IdentificationResult> {
    if train_k == 0 {
        return Err(Error::param("train_k must be at least 1"));
    }
    let mut per_palm: BTreeMap<&str, usize> = BTreeMap::new();
    for s in samples {
        *per_palm.entry(&s.palm_id).or_default() += 1;
    }
    if per_palm.is_empty() {
        return Err(Error::input("identification needs at least one sample"));
    }
    if let Some((palm, n)) = per_palm.iter().find(|(_, &n)| n <= train_k) {
        return Err(Error::input(format!(
            "palm {palm:?} has {n} samples; needs more than train_k = {train_k}"
        )));
    }

    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let mut templates = Vec::new();
    let mut queries = Vec::new();
    for s in samples {
        let k = seen.entry(&s.palm_id).or_default();
        if *k < train_k {
            templates.push(s);
        } else {
            queries.push(s);
        }
        *k += 1;
    }

    let hits: Vec<bool> = queries
        .par_iter()
        .map(|q| {
            let mut best: Option<(f64, &Sample)> = None;
            for t in &templates {
                let d = chi_square(&q.descriptor, &t.descriptor)?;
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, t));
                }
            }
            Ok(best.expect("templates are non-empty").1.palm_id == q.palm_id)
        })
        .collect::<Result<_>>()?;

    Ok(IdentificationResult {
        train_k,
        n_queries: queries.len(),
        n_correct: hits.iter().filter(|&&h| h).count(),
    })
}

/// Summary of a verification plus identification run.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub eer: f64,
    pub n_genuine: usize,
    pub n_impostor: usize,
    pub rank1: BTreeMap<usize, IdentificationResult>,
}

impl EvalReport {
    /// `key=value` lines; `config` pairs are echoed first.
    pub fn to_text(&self, config: &[(String, String)]) -> String {
        let mut out = String::new();
        for (k, v) in config {
            let _ = writeln!(out, "{k}={v}");
        }
        if self.n_genuine + self.n_impostor > 0 {
            let _ = writeln!(out, "genuine_trials={}", self.n_genuine);
            let _ = writeln!(out, "impostor_trials={}", self.n_impostor);
            let _ = writeln!(out, "eer={}", self.eer);
        }
        for (k, r) in &self.rank1 {
            let _ = writeln!(out, "rank1_train{k}={}", r.accuracy());
            let _ = writeln!(out, "queries_train{k}={}", r.n_queries);
        }
        out
    }
}

/// Counts of pixels by number of dominant directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DpnCounts {
    pub dpn0: u64,
    pub dpn1: u64,
    pub dpn2: u64,
    pub dpn3plus: u64,
}

impl DpnCounts {
    pub fn total(&self) -> u64 {
        self.dpn0 + self.dpn1 + self.dpn2 + self.dpn3plus
    }

    /// Percentages `(dpn1, dpn2, dpn3plus, dpn0)`.
    pub fn percentages(&self) -> (f64, f64, f64, f64) {
        let t = self.total().max(1) as f64;
        let pct = |c: u64| 100.0 * c as f64 / t;
        (pct(self.dpn1), pct(self.dpn2), pct(self.dpn3plus), pct(self.dpn0))
    }

    fn add(&mut self, other: &DpnCounts) {
        self.dpn0 += other.dpn0;
        self.dpn1 += other.dpn1;
        self.dpn2 += other.dpn2;
        self.dpn3plus += other.dpn3plus;
    }
}

/// Per-pixel dominant direction counts of one image.
pub fn dpn_counts(image: &GrayImage, bank: &FilterBank) -> Result<DpnCounts> {
    let (_, dpns) = lmdp_labels_and_counts(image, bank)?;
    let mut c = DpnCounts::default();
    for d in dpns {
        match d {
            0 => c.dpn0 += 1,
            1 => c.dpn1 += 1,
            2 => c.dpn2 += 1,
            _ => c.dpn3plus += 1,
        }
    }
    Ok(c)
}

/// Pooled counts over all pixels of all images.
pub fn dpn_distribution(images: &[GrayImage], bank: &FilterBank) -> Result<DpnCounts> {
    if images.is_empty() {
        return Err(Error::input("DPN statistics need at least one image"));
    }
    let per_image = images
        .iter()
        .map(|img| dpn_counts(img, bank))
        .collect::<Result<Vec<_>>>()?;
    let mut total = DpnCounts::default();
    for c in &per_image {
        total.add(c);
    }
    Ok(total)
}
