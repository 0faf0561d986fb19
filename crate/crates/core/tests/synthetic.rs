//! Label maps measured against the renderer's own ground truth.

use lmdp::baselines::lldp_gabor_eldp;
use lmdp::dataset::{render_synthetic, SynthSpec};
use lmdp::descriptor::{build_label_map, chi_square};
use lmdp::filter_bank::{build_bank, FilterBank, GaborParams};
use lmdp::pipeline::Extractor;

const N: usize = 12;

fn near(a: usize, b: usize) -> bool {
    let d = a.abs_diff(b) % N;
    d.min(N - d) <= 1
}

/// `(first, second)` orientations of a pair label, or `None` for other labels.
fn pair(label: u16) -> Option<(usize, usize)> {
    let l = label as usize;
    if l <= N || l >= N * N + N - 1 {
        return None;
    }
    let s = (l - 1) % N + 1;
    Some(((l - s) / N, s))
}

fn bank() -> FilterBank {
    build_bank(GaborParams::default()).unwrap()
}

fn line(indices: &[usize], noise: f64) -> SynthSpec {
    let p = GaborParams::default();
    SynthSpec {
        angles: indices.iter().map(|&j| p.theta(j)).collect(),
        noise,
        ..SynthSpec::default()
    }
}

/// Pixels at most `dist` from the first line, away from the border.
fn on_line(spec: &SynthSpec, dist: f64) -> Vec<(usize, usize)> {
    let m = 17;
    let mut v = Vec::new();
    for y in m..spec.size - m {
        for x in m..spec.size - m {
            if spec.distance_to_line(spec.angles[0], x, y) <= dist {
                v.push((x, y));
            }
        }
    }
    v
}

#[test]
fn single_line_labels_name_its_direction() {
    let spec = line(&[4], 2.0);
    let img = render_synthetic(&spec, 41).unwrap().image;
    let map = build_label_map(&img, &bank()).unwrap();
    let pixels = on_line(&spec, 1.0);
    let primary = |l: u16| match l as usize {
        l @ 1..=N => Some(l),
        _ => pair(l).map(|(p, _)| p),
    };
    let single = pixels.iter().filter(|&&(x, y)| (1..=N).contains(&(map.get(x, y) as usize))).count();
    let good = pixels
        .iter()
        .filter(|&&(x, y)| primary(map.get(x, y)).is_some_and(|p| near(p, 4)))
        .count();
    assert!(good as f64 >= 0.95 * pixels.len() as f64, "{good}/{}", pixels.len());
    // Noise adds shallow secondary minima, but most pixels keep one direction.
    assert!(2 * single > pixels.len(), "{single}/{}", pixels.len());
}

#[test]
fn crossing_labels_name_both_directions() {
    let spec = line(&[3, 9], 2.0);
    let img = render_synthetic(&spec, 42).unwrap().image;
    let map = build_label_map(&img, &bank()).unwrap();
    let (cx, cy) = spec.center();
    let (mut total, mut good) = (0, 0);
    for y in 0..spec.size {
        for x in 0..spec.size {
            if (x as f64 - cx).hypot(y as f64 - cy) > 3.0 {
                continue;
            }
            total += 1;
            if let Some((a, b)) = pair(map.get(x, y)) {
                if (near(a, 3) && near(b, 9)) || (near(a, 9) && near(b, 3)) {
                    good += 1;
                }
            }
        }
    }
    assert!(good as f64 >= 0.8 * total as f64, "{good}/{total}");
}

#[test]
fn lldp_first_index_follows_the_line() {
    let spec = line(&[4], 2.0);
    let img = render_synthetic(&spec, 43).unwrap().image;
    let map = lldp_gabor_eldp(&img, &bank()).unwrap();
    let pixels = on_line(&spec, 1.0);
    let good = pixels
        .iter()
        .filter(|&&(x, y)| near(map.get(x, y) as usize / N, 4))
        .count();
    assert!(good as f64 >= 0.95 * pixels.len() as f64, "{good}/{}", pixels.len());
}

#[test]
fn every_orientation_is_recovered_noise_free() {
    let bank = bank();
    for j in 1..=N {
        let spec = line(&[j], 0.0);
        let img = render_synthetic(&spec, 0).unwrap().image;
        let map = build_label_map(&img, &bank).unwrap();
        for (x, y) in on_line(&spec, 0.5) {
            assert_eq!(map.get(x, y) as usize, j, "line {j} at ({x},{y})");
        }
    }
}

#[test]
fn small_shifts_cost_less_than_other_lines() {
    let ex = Extractor::new(Default::default()).unwrap();
    let base = line(&[2, 8], 2.0);
    let a = ex.describe(&render_synthetic(&base, 1).unwrap().image).unwrap();
    let shifted = SynthSpec {
        offset: (1.5, -1.0),
        ..base.clone()
    };
    let b = ex.describe(&render_synthetic(&shifted, 2).unwrap().image).unwrap();
    let other = ex.describe(&render_synthetic(&line(&[5, 11], 2.0), 3).unwrap().image).unwrap();
    let genuine = chi_square(&a, &b).unwrap();
    let impostor = chi_square(&a, &other).unwrap();
    assert!(genuine < impostor, "{genuine} vs {impostor}");
}
