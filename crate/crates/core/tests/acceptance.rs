//! Acceptance gate. Each criterion prints one line:
//!
//! ```text
//! [PASS] 4 synthetic direction recovery: ...
//! ```
//!
//! Tolerances are pinned below. The process exits non-zero if any criterion
//! fails; SKIP does not count as a failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lmdp::dataset::store::encode_records;
use lmdp::dataset::{load_dataset, render_identity_set, render_synthetic, SynthSpec};
use lmdp::descriptor::{chi_square, Descriptor, Method};
use lmdp::evaluation::{all_pairs_verification, compute_eer, dpn_distribution, identification, Sample};
use lmdp::filter_bank::{build_bank, GaborParams};
use lmdp::pattern::{analyze_point, encode_bits, BitPattern};
use lmdp::pipeline::{Extractor, ExtractorConfig};
use lmdp::response::{convolve_responses, dominant_direction};

const EXHAUSTIVE_BUDGET: Duration = Duration::from_secs(1);
const RANDOM_VECTORS: usize = 10_000;

const LINE_NOISE: f64 = 2.0;
/// A pixel is on a line when its center is within this distance of the axis.
const ON_LINE_DIST: f64 = 1.0;
/// Pixels closer to the border than half the kernel see reflected copies.
const BORDER_MARGIN: usize = 17;
const SINGLE_LINE_MIN: f64 = 0.95;
const CROSSING_RADIUS: f64 = 3.0;
const CROSSING_MIN: f64 = 0.80;
const RECOVERY_BUDGET: Duration = Duration::from_secs(30);

const IDENTITIES: usize = 8;
const SAMPLES: usize = 6;
const SET_NOISE: f64 = 5.0;
const SET_JITTER: f64 = 2.0;
const MAX_EER: f64 = 0.02;
/// LMDP may trail LBP by this much before the ordering counts as reversed.
const ORDERING_SLACK: f64 = 0.01;
const SEPARABILITY_BUDGET: Duration = Duration::from_secs(300);

const REAL_DATA_ENV: &str = "LMDP_ROI_DIR";
const DPN1_RANGE: (f64, f64) = (44.0, 64.0);
const DPN2_RANGE: (f64, f64) = (35.0, 55.0);
const DPN3_MAX: f64 = 5.0;

const PER_IMAGE_BUDGET: Duration = Duration::from_secs(1);
const PARALLEL_JOBS: usize = 4;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn circular_gap(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b) % n;
    d.min(n - d)
}

// Criterion 1

fn bit_pattern_goldens() -> Outcome {
    let mut problems = Vec::new();

    let one = BitPattern::from_bits(&[1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 1, 1]).unwrap();
    if one.dpn() != 1 {
        problems.push(format!("first: dpn {}", one.dpn()));
    }
    if one.dpi_set() != vec![4] {
        problems.push(format!("first: dpi {:?}", one.dpi_set()));
    }
    if one.dpl(4).ok() != Some(12) {
        problems.push(format!("first: dpl {:?}", one.dpl(4).ok()));
    }
    if one.to_display_string() != "110000001111" || one.lmdp_integer() != 6174 {
        problems.push(format!("first: {} / {}", one.to_display_string(), one.lmdp_integer()));
    }

    let two_bits = [0, 0, 0, 1, 1, 0, 0, 0, 1, 1, 1, 0];
    let two = BitPattern::from_bits(&two_bits).unwrap();
    if two.dpn() != 2 || two.dpi_set() != vec![5, 11] {
        problems.push(format!("second: dpn {} dpi {:?}", two.dpn(), two.dpi_set()));
    }
    if two.dpl(5).ok() != Some(5) || two.dpl(11).ok() != Some(7) {
        problems.push(format!("second: dpl {:?} {:?}", two.dpl(5).ok(), two.dpl(11).ok()));
    }
    // Any response vector with this bit pattern: valleys at 5 and 11.
    let r = [6.0, 7.0, 9.0, 8.0, 7.0, 8.0, 9.0, 10.0, 6.0, 5.0, 4.0, 5.0];
    let a = analyze_point(&r).unwrap();
    if a.bits.bits() != two_bits || a.label != 137 {
        problems.push(format!("second: bits {:?} label {}", a.bits.bits(), a.label));
    }
    let (t5, t11) = (4.0 * PI / 12.0, 10.0 * PI / 12.0);
    let p = GaborParams::default();
    if (p.theta(4) - 3.0 * PI / 12.0).abs() > 1e-15 || (p.theta(5) - t5).abs() > 1e-15 || (p.theta(11) - t11).abs() > 1e-15 {
        problems.push("orientation angles".into());
    }

    verdict(
        problems.is_empty(),
        if problems.is_empty() {
            "DPN 1 at {4} DPL 12; DPN 2 at {5, 11} DPLs 5, 7, label 137".into()
        } else {
            problems.join("; ")
        },
    )
}

// Criterion 2

/// Direct reading of a 12-bit cycle: a direction pattern is a `1` at `j`
/// followed (circularly) by a `0` at `j + 1`.
fn scan_dps(bits: &[u8]) -> Vec<usize> {
    let n = bits.len();
    (0..n).filter(|&i| bits[i] == 1 && bits[(i + 1) % n] == 0).map(|i| i + 1).collect()
}

fn scan_dpl(bits: &[u8], dpi: usize) -> usize {
    let n = bits.len();
    let mut len = 0;
    let mut i = dpi - 1;
    while bits[i] == 1 && len < n {
        len += 1;
        i = (i + n - 1) % n;
    }
    let mut i = dpi % n;
    while bits[i] == 0 && len < n {
        len += 1;
        i = (i + 1) % n;
    }
    len
}

fn exhaustive_patterns() -> Outcome {
    let start = Instant::now();
    let mut mismatches = 0usize;
    let mut first = None;
    for code in 0u32..4096 {
        let bits: Vec<u8> = (0..12).map(|i| ((code >> i) & 1) as u8).collect();
        let pattern = match BitPattern::from_bits(&bits) {
            Ok(p) => p,
            Err(_) if code == 4095 => continue,
            Err(e) => {
                mismatches += 1;
                first.get_or_insert(format!("{code:012b}: rejected ({e})"));
                continue;
            }
        };
        let dps = scan_dps(&bits);
        let display = pattern.to_display_string();
        let cyc: Vec<char> = display.chars().collect();
        let pairs = |a: char, b: char| (0..12).filter(|&i| cyc[i] == a && cyc[(i + 1) % 12] == b).count();
        let dpl_sum: usize = dps.iter().map(|&d| pattern.dpl(d).unwrap_or(0)).sum();
        let dpl_ok = dps.iter().all(|&d| pattern.dpl(d).ok() == Some(scan_dpl(&bits, d)));
        let ok = pattern.dpn() == dps.len()
            && pattern.dpi_set() == dps
            && (dps.is_empty() || dpl_sum == 12)
            && dpl_ok
            && pairs('0', '1') == pairs('1', '0')
            && pairs('0', '1') == dps.len();
        if !ok {
            mismatches += 1;
            first.get_or_insert(format!("{code:012b}: dpn {} vs {}", pattern.dpn(), dps.len()));
        }
    }
    let rejects_all_ones = BitPattern::from_bits(&[1; 12]).is_err();
    let elapsed = start.elapsed();
    let detail = format!(
        "4095 patterns, {mismatches} mismatches, all-ones rejected: {rejects_all_ones}, {:.1} ms{}",
        elapsed.as_secs_f64() * 1e3,
        first.map(|f| format!(" (first: {f})")).unwrap_or_default()
    );
    verdict(mismatches == 0 && rejects_all_ones && elapsed < EXHAUSTIVE_BUDGET, detail)
}

// Criterion 3

/// Circular local minima: strictly below the predecessor, not above the successor.
fn brute_minima(r: &[f64]) -> Vec<usize> {
    let n = r.len();
    (0..n)
        .filter(|&i| r[i] < r[(i + n - 1) % n] && r[(i + 1) % n] >= r[i])
        .map(|i| i + 1)
        .collect()
}

fn response_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0usize;
    let mut first = None;
    for trial in 0..RANDOM_VECTORS {
        // Integer-valued vectors keep a·r + b exact; narrow ranges force ties.
        let range = [4, 50, 100_000][trial % 3];
        let r: Vec<f64> = (0..12).map(|_| rng.random_range(0..range) as f64).collect();
        let a = if rng.random_bool(0.5) {
            rng.random_range(1..100) as f64
        } else {
            0.5f64.powi(rng.random_range(1..6))
        };
        let b = rng.random_range(-10_000..10_000) as f64;
        let transformed: Vec<f64> = r.iter().map(|v| a * v + b).collect();

        let expect = brute_minima(&r);
        let got = encode_bits(&r).map(|p| p.dpi_set());
        let got_t = encode_bits(&transformed).map(|p| p.dpi_set());
        let mut from_analysis: Vec<usize> = analyze_point(&r).map(|x| x.dps.iter().map(|d| d.dpi).collect()).unwrap_or_default();
        from_analysis.sort_unstable();
        let ok = got.as_ref().ok() == Some(&expect) && got_t.as_ref().ok() == Some(&expect) && from_analysis == expect;
        if !ok {
            mismatches += 1;
            first.get_or_insert(format!("{r:?}: expected {expect:?}, got {got:?} / {got_t:?}"));
        }
    }
    verdict(
        mismatches == 0,
        format!(
            "{RANDOM_VECTORS} vectors, {mismatches} mismatches{}",
            first.map(|f| format!(" (first: {f})")).unwrap_or_default()
        ),
    )
}

// Criterion 4

fn direction_recovery() -> Outcome {
    let start = Instant::now();
    let params = GaborParams::default();
    let bank = build_bank(params).unwrap();
    let n = params.n_orientations;
    let mut worst = (f64::INFINITY, 0usize);
    let mut per_line = Vec::new();

    for j in 1..=n {
        let spec = SynthSpec {
            angles: vec![params.theta(j)],
            noise: LINE_NOISE,
            ..SynthSpec::default()
        };
        let img = render_synthetic(&spec, 100 + j as u64).unwrap().image;
        let stack = convolve_responses(&img, &bank).unwrap();
        let (mut on, mut good) = (0usize, 0usize);
        for y in BORDER_MARGIN..spec.size - BORDER_MARGIN {
            for x in BORDER_MARGIN..spec.size - BORDER_MARGIN {
                if spec.distance_to_line(spec.angles[0], x, y) > ON_LINE_DIST {
                    continue;
                }
                on += 1;
                if circular_gap(dominant_direction(&stack, x, y).unwrap(), j, n) <= 1 {
                    good += 1;
                }
            }
        }
        let frac = good as f64 / on as f64;
        per_line.push(format!("{:.0}", frac * 100.0));
        if frac < worst.0 {
            worst = (frac, j);
        }
    }

    let spec = SynthSpec {
        angles: vec![params.theta(5), params.theta(11)],
        noise: LINE_NOISE,
        ..SynthSpec::default()
    };
    let img = render_synthetic(&spec, 211).unwrap().image;
    let stack = convolve_responses(&img, &bank).unwrap();
    let (cx, cy) = spec.center();
    let (mut near, mut crossing_ok) = (0usize, 0usize);
    let mut r = vec![0.0; n];
    for y in 0..spec.size {
        for x in 0..spec.size {
            if (x as f64 - cx).hypot(y as f64 - cy) > CROSSING_RADIUS {
                continue;
            }
            near += 1;
            stack.pixel_into(x, y, &mut r);
            let a = analyze_point(&r).unwrap();
            let mut dpis: Vec<usize> = a.dps.iter().map(|d| d.dpi).collect();
            dpis.sort_unstable();
            let hit = a.dpn == 2
                && ((circular_gap(dpis[0], 5, n) <= 1 && circular_gap(dpis[1], 11, n) <= 1)
                    || (circular_gap(dpis[0], 11, n) <= 1 && circular_gap(dpis[1], 5, n) <= 1));
            if hit {
                crossing_ok += 1;
            }
        }
    }
    let crossing = crossing_ok as f64 / near as f64;
    let elapsed = start.elapsed();
    verdict(
        worst.0 >= SINGLE_LINE_MIN && crossing >= CROSSING_MIN && elapsed < RECOVERY_BUDGET,
        format!(
            "single lines worst {:.1}% at j={} (per line % [{}]); crossing DPN=2 on {crossing_ok}/{near} = {:.1}%; {:.1} s",
            worst.0 * 100.0,
            worst.1,
            per_line.join(" "),
            crossing * 100.0,
            elapsed.as_secs_f64()
        ),
    )
}

// Criterion 5

fn chi_square_contract() -> Outcome {
    let d = |c: Vec<u32>| Descriptor::new(Method::Lmdp, 16, 1, c.len(), c).unwrap();
    let hand = chi_square(&d(vec![2, 0]), &d(vec![0, 2])).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0usize;
    for _ in 0..2000 {
        let len = rng.random_range(1..40);
        let a: Vec<u32> = (0..len).map(|_| rng.random_range(0..6)).collect();
        let b: Vec<u32> = if rng.random_bool(0.2) {
            a.clone()
        } else {
            (0..len).map(|_| rng.random_range(0..6)).collect()
        };
        let (da, db) = (d(a.clone()), d(b.clone()));
        let ab = chi_square(&da, &db).unwrap();
        let ba = chi_square(&db, &da).unwrap();
        if ab != ba || ab < 0.0 || ((ab == 0.0) != (a == b)) || chi_square(&da, &da).unwrap() != 0.0 {
            violations += 1;
        }
    }
    verdict(
        hand == 4.0 && violations == 0,
        format!("(2,0) vs (0,2) = {hand}; 2000 random pairs, {violations} violations"),
    )
}

// Criterion 6

fn eer_of(entries: &[lmdp::dataset::DatasetEntry], method: Method) -> (f64, f64) {
    let ex = Extractor::new(ExtractorConfig {
        method,
        ..ExtractorConfig::default()
    })
    .unwrap();
    let samples: Vec<Sample> = ex
        .describe_entries(entries)
        .unwrap()
        .into_iter()
        .map(|r| Sample::new(r.palm_id().to_string(), r.descriptor))
        .collect();
    let (eer, _) = compute_eer(&all_pairs_verification(&samples).unwrap()).unwrap();
    let rank1 = identification(&samples, 1).unwrap().accuracy();
    (eer, rank1)
}

fn separability() -> Outcome {
    let start = Instant::now();
    let base = SynthSpec {
        noise: SET_NOISE,
        ..SynthSpec::default()
    };
    let entries = render_identity_set(&base, IDENTITIES, SAMPLES, SET_JITTER, 6).unwrap();
    let (eer, rank1) = eer_of(&entries, Method::Lmdp);
    let (lbp_eer, lbp_rank1) = eer_of(&entries, Method::Lbp);
    let elapsed = start.elapsed();
    verdict(
        eer <= MAX_EER && rank1 == 1.0 && eer <= lbp_eer + ORDERING_SLACK && elapsed < SEPARABILITY_BUDGET,
        format!(
            "LMDP EER {eer:.4} rank-1 {:.1}%; LBP EER {lbp_eer:.4} rank-1 {:.1}%; {:.1} s",
            rank1 * 100.0,
            lbp_rank1 * 100.0,
            elapsed.as_secs_f64()
        ),
    )
}

// Criterion 7

fn real_dpn_distribution() -> Outcome {
    let Some(dir) = std::env::var_os(REAL_DATA_ENV) else {
        return Outcome::Skip(format!("set {REAL_DATA_ENV} to a directory of palm ROI PGMs"));
    };
    let ds = match load_dataset(&dir) {
        Ok(ds) if !ds.entries.is_empty() => ds,
        Ok(_) => return Outcome::Fail(format!("no images in {}", dir.to_string_lossy())),
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let images: Vec<_> = ds.entries.into_iter().map(|e| e.image).collect();
    let bank = build_bank(GaborParams::default()).unwrap();
    let c = dpn_distribution(&images, &bank).unwrap();
    let (p1, p2, p3, p0) = c.percentages();
    let inside = |v: f64, (lo, hi): (f64, f64)| (lo..=hi).contains(&v);
    verdict(
        inside(p1, DPN1_RANGE) && inside(p2, DPN2_RANGE) && p3 < DPN3_MAX,
        format!(
            "{} images: DPN=1 {p1:.2}%, DPN=2 {p2:.2}%, DPN>=3 {p3:.2}%, DPN=0 {p0:.2}%",
            images.len()
        ),
    )
}

// Criterion 8

fn determinism_and_speed() -> Outcome {
    let spec = SynthSpec {
        angles: vec![0.4, 2.1],
        noise: 3.0,
        ..SynthSpec::default()
    };
    let image = render_synthetic(&spec, 8).unwrap().image;
    let ex = Extractor::new(ExtractorConfig::default()).unwrap();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();

    ex.describe(&image).unwrap();
    let runs = 3;
    let start = Instant::now();
    for _ in 0..runs {
        single.install(|| ex.describe(&image).unwrap());
    }
    let per_image = start.elapsed() / runs;

    let entries = render_identity_set(
        &SynthSpec {
            noise: 4.0,
            ..SynthSpec::default()
        },
        3,
        2,
        2.0,
        88,
    )
    .unwrap();
    let many = rayon::ThreadPoolBuilder::new().num_threads(PARALLEL_JOBS).build().unwrap();
    let bytes_1 = single.install(|| encode_records(&ex.describe_entries(&entries).unwrap()).unwrap());
    let bytes_n = many.install(|| encode_records(&ex.describe_entries(&entries).unwrap()).unwrap());
    let identical = bytes_1 == bytes_n;
    verdict(
        per_image < PER_IMAGE_BUDGET && identical,
        format!(
            "128x128 LMDP single worker {:.0} ms/image; 1 vs {PARALLEL_JOBS} workers byte-identical: {identical} ({} bytes)",
            per_image.as_secs_f64() * 1e3,
            bytes_1.len()
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("1 bit pattern goldens", bit_pattern_goldens),
        ("2 exhaustive pattern oracle", exhaustive_patterns),
        ("3 response-vector oracle", response_oracle),
        ("4 synthetic direction recovery", direction_recovery),
        ("5 chi-square contract", chi_square_contract),
        ("6 end-to-end separability", separability),
        ("7 real-data DPN distribution", real_dpn_distribution),
        ("8 determinism and speed", determinism_and_speed),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Outcome::Pass(d) => println!("[PASS] {name}: {d}"),
            Outcome::Fail(d) => {
                failed += 1;
                println!("[FAIL] {name}: {d}");
            }
            Outcome::Skip(d) => println!("[SKIP] {name}: {d}"),
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
