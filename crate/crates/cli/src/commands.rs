use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;

use lmdp::dataset::{
    load_dataset, read_records, render_identity_set, render_synthetic, write_dataset, write_pgm, write_records,
    DatasetEntry, DescriptorRecord, SynthSpec,
};
use lmdp::descriptor::{chi_square, Method};
use lmdp::evaluation::{all_pairs_verification, compute_eer, dpn_counts, identification, EvalReport, Sample};
use lmdp::filter_bank::{build_bank, GaborParams};
use lmdp::pipeline::{Extractor, ExtractorConfig};

use crate::{EvalInput, ExtractArgs, GaborArgs, SynthArgs};

type Config = Vec<(String, String)>;

fn push(config: &mut Config, key: &str, value: impl ToString) {
    config.push((key.to_string(), value.to_string()));
}

fn gabor_config(config: &mut Config, p: &GaborParams) {
    push(config, "mu", p.mu);
    push(config, "sigma", p.sigma);
    push(config, "kernel_size", p.kernel_size);
    push(config, "orientations", p.n_orientations);
    push(config, "zero_mean", p.zero_mean);
}

fn extract_config(config: &mut Config, args: &ExtractArgs) {
    push(config, "method", args.method);
    push(config, "block_size", args.block_size);
    if args.method == Method::Ldp {
        push(config, "ldp_k", args.ldp_k);
    }
    if args.method.uses_bank() {
        gabor_config(config, &args.gabor.params());
    }
}

fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_entries(dir: &Path) -> Result<Vec<DatasetEntry>> {
    let dataset = load_dataset(dir)?;
    for s in &dataset.skipped {
        log::warn!("skipping {}: {}", s.path.display(), s.reason);
    }
    if dataset.entries.is_empty() {
        bail!("no <palm>_<sample>.pgm images in {}", dir.display());
    }
    log::info!("loaded {} images from {}", dataset.entries.len(), dir.display());
    Ok(dataset.entries)
}

fn extract_records(entries: &[DatasetEntry], args: &ExtractArgs) -> Result<Vec<DescriptorRecord>> {
    let extractor = Extractor::new(ExtractorConfig {
        method: args.method,
        gabor: args.gabor.params(),
        block_size: args.block_size,
        ldp_k: args.ldp_k,
    })?;
    let done = AtomicUsize::new(0);
    let n = entries.len();
    entries
        .par_iter()
        .map(|e| {
            let d = extractor
                .describe(&e.image)
                .with_context(|| format!("extracting {}", e.key()))?;
            let k = done.fetch_add(1, Ordering::Relaxed) + 1;
            log::info!("[{k}/{n}] {}", e.key());
            Ok(DescriptorRecord::new(e.key(), d))
        })
        .collect()
}

pub fn bank(args: &GaborArgs, out: &Path) -> Result<()> {
    let bank = build_bank(args.params())?;
    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    for f in bank.filters() {
        let k = &f.kernel;
        let mut csv = String::with_capacity(k.size() * k.size() * 24);
        for r in 0..k.size() {
            let row: Vec<String> = k.row(r).iter().map(|v| v.to_string()).collect();
            csv.push_str(&row.join(","));
            csv.push('\n');
        }
        let path = out.join(format!("kernel_{:02}.csv", f.index));
        std::fs::write(&path, csv).with_context(|| format!("cannot write {}", path.display()))?;
        println!("{}\t{}", path.display(), f.theta);
    }
    log::info!("wrote {} kernels of {}x{}", bank.n_orientations(), bank.kernel_size(), bank.kernel_size());
    Ok(())
}

pub fn extract(dataset: &Path, out: &Path, args: &ExtractArgs) -> Result<()> {
    let entries = load_entries(dataset)?;
    let records = extract_records(&entries, args)?;
    write_records(out, &records)?;
    log::info!("wrote {} descriptors to {}", records.len(), out.display());
    Ok(())
}

fn find_record(path: &Path, id: Option<&str>) -> Result<DescriptorRecord> {
    let records = read_records(path)?;
    match id {
        Some(id) => records
            .into_iter()
            .find(|r| r.identity == id)
            .ok_or_else(|| anyhow!("no record {id:?} in {}", path.display())),
        None => records
            .into_iter()
            .next()
            .ok_or_else(|| anyhow!("{} holds no records", path.display())),
    }
}

pub fn match_files(a: &Path, b: &Path, id_a: Option<&str>, id_b: Option<&str>) -> Result<()> {
    let ra = find_record(a, id_a)?;
    let rb = find_record(b, id_b)?;
    let score = chi_square(&ra.descriptor, &rb.descriptor)?;
    println!("{score}");
    Ok(())
}

/// Samples in dataset order plus the configuration that produced them.
fn load_samples(input: &EvalInput, args: &ExtractArgs, config: &mut Config) -> Result<Vec<Sample>> {
    let records = if let Some(path) = &input.descriptors {
        push(config, "descriptors", path.display());
        let records = read_records(path)?;
        let first = records
            .first()
            .ok_or_else(|| anyhow!("{} holds no records", path.display()))?;
        push(config, "method", first.descriptor.method());
        push(config, "block_size", first.descriptor.block_size());
        push(config, "bins_per_block", first.descriptor.bins_per_block());
        records
    } else {
        let dir = input.dataset.as_ref().expect("clap requires one input");
        push(config, "dataset", dir.display());
        extract_config(config, args);
        extract_records(&load_entries(dir)?, args)?
    };
    push(config, "records", records.len());
    Ok(records
        .into_iter()
        .map(|r| Sample::new(r.palm_id().to_string(), r.descriptor))
        .collect())
}

pub fn eval_verify(
    input: &EvalInput,
    args: &ExtractArgs,
    roc: Option<&Path>,
    thresholds: usize,
    report: Option<&Path>,
) -> Result<()> {
    let mut config = vec![("command".to_string(), "eval-verify".to_string())];
    let samples = load_samples(input, args, &mut config)?;
    push(&mut config, "roc_points", thresholds);
    let trials = all_pairs_verification(&samples)?;
    let (eer, curve) = compute_eer(&trials)?;
    let n_genuine = trials.iter().filter(|t| t.genuine).count();
    if let Some(path) = roc {
        emit(&curve.downsample(thresholds).to_csv(), Some(path))?;
    }
    let r = EvalReport {
        eer,
        n_genuine,
        n_impostor: trials.len() - n_genuine,
        rank1: BTreeMap::new(),
    };
    emit(&r.to_text(&config), report)
}

pub fn eval_identify(
    input: &EvalInput,
    args: &ExtractArgs,
    train_k: Option<Vec<usize>>,
    report: Option<&Path>,
) -> Result<()> {
    let mut config = vec![("command".to_string(), "eval-identify".to_string())];
    let samples = load_samples(input, args, &mut config)?;
    let explicit = train_k.is_some();
    let ks = train_k.unwrap_or_else(|| vec![1, 2, 3]);
    let mut per_palm: BTreeMap<&str, usize> = BTreeMap::new();
    for s in &samples {
        *per_palm.entry(&s.palm_id).or_default() += 1;
    }
    let fewest = per_palm.values().copied().min().unwrap_or(0);

    let mut rank1 = BTreeMap::new();
    for &k in &ks {
        if !explicit && k >= fewest {
            log::warn!("skipping train_k={k}: some palm has only {fewest} samples");
            continue;
        }
        rank1.insert(k, identification(&samples, k)?);
    }
    if rank1.is_empty() {
        bail!("no palm has enough samples for train_k in {ks:?}");
    }
    let used: Vec<String> = rank1.keys().map(|k| k.to_string()).collect();
    push(&mut config, "train_k", used.join(","));
    let r = EvalReport {
        eer: 0.0,
        n_genuine: 0,
        n_impostor: 0,
        rank1,
    };
    emit(&r.to_text(&config), report)
}

pub fn dpn_stats(dataset: &Path, args: &GaborArgs, out: Option<&Path>) -> Result<()> {
    let params = args.params();
    let bank = build_bank(params)?;
    let entries = load_entries(dataset)?;
    let counts = entries
        .par_iter()
        .map(|e| dpn_counts(&e.image, &bank).with_context(|| e.key()))
        .collect::<Result<Vec<_>>>()?;

    let mut config = vec![("command".to_string(), "dpn-stats".to_string())];
    push(&mut config, "dataset", dataset.display());
    gabor_config(&mut config, &params);

    let mut csv = String::new();
    for (k, v) in &config {
        let _ = writeln!(csv, "# {k}={v}");
    }
    csv.push_str("image,pixels,pct_dpn1,pct_dpn2,pct_dpn3plus,pct_dpn0\n");
    let mut total = lmdp::evaluation::DpnCounts::default();
    let mut row = |name: &str, c: &lmdp::evaluation::DpnCounts| {
        let (p1, p2, p3, p0) = c.percentages();
        let _ = writeln!(csv, "{name},{},{p1:.4},{p2:.4},{p3:.4},{p0:.4}", c.total());
    };
    for (e, c) in entries.iter().zip(&counts) {
        row(&e.key(), c);
        total.dpn0 += c.dpn0;
        total.dpn1 += c.dpn1;
        total.dpn2 += c.dpn2;
        total.dpn3plus += c.dpn3plus;
    }
    row("all", &total);
    emit(&csv, out)
}

pub fn synth(args: &SynthArgs, seed: u64) -> Result<()> {
    let base = SynthSpec {
        size: args.image_size,
        // Degrees just below 180 can round up to pi after conversion.
        angles: args
            .angles
            .iter()
            .map(|d| d.rem_euclid(180.0).to_radians())
            .map(|a| if a >= PI { 0.0 } else { a })
            .collect(),
        width: args.width,
        depth: args.depth,
        background: args.background,
        noise: args.noise,
        offset: (0.0, 0.0),
    };

    if let Some(n) = args.identities {
        let dir = args.out_dir.as_ref().expect("clap requires --out-dir");
        let entries = render_identity_set(&base, n, args.samples, args.jitter, seed)?;
        write_dataset(dir, &entries)?;
        log::info!("wrote {} images of {n} identities to {}", entries.len(), dir.display());
        return Ok(());
    }

    let out = args.out.as_ref().expect("clap requires --out");
    let img = render_synthetic(&base, seed)?;
    write_pgm(out, &img.image)?;
    let mut truth = String::new();
    let degrees: Vec<String> = img.angles.iter().map(|a| a.to_degrees().to_string()).collect();
    let radians: Vec<String> = img.angles.iter().map(|a| a.to_string()).collect();
    let _ = writeln!(truth, "angles_deg={}", degrees.join(","));
    let _ = writeln!(truth, "angles_rad={}", radians.join(","));
    let _ = writeln!(truth, "size={}", base.size);
    let _ = writeln!(truth, "width={}", base.width);
    let _ = writeln!(truth, "depth={}", base.depth);
    let _ = writeln!(truth, "background={}", base.background);
    let _ = writeln!(truth, "noise={}", base.noise);
    let _ = writeln!(truth, "seed={seed}");
    let sidecar = out.with_extension("txt");
    std::fs::write(&sidecar, truth).with_context(|| format!("cannot write {}", sidecar.display()))?;
    println!("{}", out.display());
    Ok(())
}
