//! Local multiple directional pattern of a single response vector.
//!
//! Bit `b_j` is set when `r_j` is strictly smaller than its clockwise
//! neighbour `r_{j-1}` (index 1 wraps to `N_o`). A circular `"01"` pair, read
//! as `b_j = 1, b_{j+1} = 0`, marks a direction pattern (DP): a circular local
//! minimum of the responses and hence one dominant direction. Every DP gets a
//! confidence length (the run of ones ending at it plus the run of zeros
//! after it) and the pixel collapses to one integer label:
//!
//! | DP count | label                                   |
//! |----------|-----------------------------------------|
//! | 0        | `0` (flat point)                         |
//! | 1        | the DP index                             |
//! | 2        | `primary · N_o + secondary`              |
//! | ≥ 3      | `N_m = N_o² + N_o − 1`                   |
//!
//! Bits are stored in a `u64` mask with bit `j - 1` holding `b_j`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::filter_bank::MAX_ORIENTATIONS;

/// Label shared by all points with three or more dominant directions.
pub fn multi_direction_label(n_orientations: usize) -> u16 {
    (n_orientations * n_orientations + n_orientations - 1) as u16
}

/// Number of histogram bins needed for LMDP labels (`0..=N_m`).
pub fn label_count(n_orientations: usize) -> usize {
    n_orientations * n_orientations + n_orientations
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitPattern {
    n: usize,
    mask: u64,
}

impl BitPattern {
    /// Wraps a raw mask. The all-ones pattern is rejected because no real
    /// response vector can decrease all the way around the circle.
    pub fn from_mask(n_orientations: usize, mask: u64) -> Result<Self> {
        check_len(n_orientations)?;
        let full = full_mask(n_orientations);
        if mask & !full != 0 {
            return Err(Error::input(format!(
                "mask {mask:#x} has bits beyond {n_orientations} orientations"
            )));
        }
        if mask == full {
            return Err(Error::input("all-ones bit pattern is unreachable"));
        }
        Ok(Self { n: n_orientations, mask })
    }

    /// Builds a pattern from `b_1..b_No`.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut mask = 0u64;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => mask |= 1 << i,
                other => return Err(Error::input(format!("bit {} is {other}, not 0/1", i + 1))),
            }
        }
        Self::from_mask(bits.len(), mask)
    }

    pub fn n_orientations(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    /// `b_j` for 1-based `j`.
    pub fn bit(&self, j: usize) -> u8 {
        ((self.mask >> (j - 1)) & 1) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (1..=self.n).map(|j| self.bit(j)).collect()
    }

    /// Display form with `b_No` leftmost.
    pub fn to_display_string(&self) -> String {
        (1..=self.n).rev().map(|j| if self.bit(j) == 1 { '1' } else { '0' }).collect()
    }

    /// Weighted sum `Σ b_j 2^j`, exponents starting at 1.
    pub fn lmdp_integer(&self) -> u64 {
        self.mask << 1
    }

    /// Half the number of circular bit transitions.
    pub fn dpn(&self) -> usize {
        ((self.mask ^ self.prev_mask()).count_ones() / 2) as usize
    }

    /// DP positions in ascending order.
    pub fn dpi_set(&self) -> Vec<usize> {
        let dp = self.dp_mask();
        (1..=self.n).filter(|&j| (dp >> (j - 1)) & 1 == 1).collect()
    }

    /// Confidence length of the DP at `dpi`.
    pub fn dpl(&self, dpi: usize) -> Result<usize> {
        if dpi == 0 || dpi > self.n || (self.dp_mask() >> (dpi - 1)) & 1 == 0 {
            return Err(Error::input(format!(
                "{dpi} is not a direction pattern position of {}",
                self.to_display_string()
            )));
        }
        Ok(self.dpl_unchecked(dpi))
    }

    fn dpl_unchecked(&self, dpi: usize) -> usize {
        let n = self.n;
        let mut ones = 0;
        let mut j = dpi;
        while ones < n && self.bit(j) == 1 {
            ones += 1;
            j = if j == 1 { n } else { j - 1 };
        }
        let mut zeros = 0;
        let mut j = if dpi == n { 1 } else { dpi + 1 };
        while zeros < n && self.bit(j) == 0 {
            zeros += 1;
            j = if j == n { 1 } else { j + 1 };
        }
        ones + zeros
    }

    /// Bit `i` holds `b_{φ(i+1)}`, the clockwise neighbour.
    fn prev_mask(&self) -> u64 {
        ((self.mask << 1) | (self.mask >> (self.n - 1))) & full_mask(self.n)
    }

    /// Bit `i` holds `b_{i+2}`, the counter-clockwise neighbour.
    fn next_mask(&self) -> u64 {
        (self.mask >> 1) | ((self.mask & 1) << (self.n - 1))
    }

    fn dp_mask(&self) -> u64 {
        self.mask & !self.next_mask()
    }
}

#[inline]
fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_len(n: usize) -> Result<()> {
    if !(2..=MAX_ORIENTATIONS).contains(&n) {
        return Err(Error::input(format!(
            "response vector length must be in 2..={MAX_ORIENTATIONS}, got {n}"
        )));
    }
    Ok(())
}

fn check_responses(responses: &[f64]) -> Result<()> {
    check_len(responses.len())?;
    if let Some(i) = responses.iter().position(|r| !r.is_finite()) {
        return Err(Error::input(format!("response {} is not finite", i + 1)));
    }
    Ok(())
}

#[inline]
fn mask_of(responses: &[f64]) -> u64 {
    let n = responses.len();
    let mut mask = 0u64;
    let mut prev = responses[n - 1];
    for (i, &r) in responses.iter().enumerate() {
        if r - prev < 0.0 {
            mask |= 1 << i;
        }
        prev = r;
    }
    mask
}

/// Compares every response with its clockwise neighbour.
pub fn encode_bits(responses: &[f64]) -> Result<BitPattern> {
    check_responses(responses)?;
    Ok(BitPattern {
        n: responses.len(),
        mask: mask_of(responses),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionPatternInfo {
    /// 1-based orientation index of the DP.
    pub dpi: usize,
    /// Confidence length in bits.
    pub dpl: usize,
    /// Response `r_dpi` at the analysed pixel.
    pub response: f64,
}

/// Confidence order: longer DPL first, then smaller response, then smaller index.
fn by_confidence(a: &DirectionPatternInfo, b: &DirectionPatternInfo) -> Ordering {
    b.dpl
        .cmp(&a.dpl)
        .then(a.response.total_cmp(&b.response))
        .then(a.dpi.cmp(&b.dpi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionAnalysis {
    pub bits: BitPattern,
    pub dpn: usize,
    /// Sorted by descending confidence.
    pub dps: Vec<DirectionPatternInfo>,
    pub label: u16,
}

/// Label for a pixel given its DPs already sorted by confidence.
pub fn label(n_orientations: usize, sorted_dps: &[DirectionPatternInfo]) -> u16 {
    match sorted_dps {
        [] => 0,
        [only] => only.dpi as u16,
        [primary, secondary] => (primary.dpi * n_orientations + secondary.dpi) as u16,
        _ => multi_direction_label(n_orientations),
    }
}

pub fn analyze_point(responses: &[f64]) -> Result<DirectionAnalysis> {
    let bits = encode_bits(responses)?;
    let mut dps: Vec<DirectionPatternInfo> = bits
        .dpi_set()
        .into_iter()
        .map(|dpi| DirectionPatternInfo {
            dpi,
            dpl: bits.dpl_unchecked(dpi),
            response: responses[dpi - 1],
        })
        .collect();
    dps.sort_by(by_confidence);
    let label = label(bits.n, &dps);
    Ok(DirectionAnalysis {
        bits,
        dpn: dps.len(),
        dps,
        label,
    })
}

/// Allocation-free label and DP count for one pixel. Same result as
/// [`analyze_point`]; the caller guarantees a valid, finite response vector.
#[inline]
pub(crate) fn label_fast(responses: &[f64]) -> (u16, usize) {
    let n = responses.len();
    let bits = BitPattern {
        n,
        mask: mask_of(responses),
    };
    let dp = bits.dp_mask();
    let dpn = dp.count_ones() as usize;
    let label = match dpn {
        0 => 0,
        1 => (dp.trailing_zeros() + 1) as u16,
        2 => {
            let lo = dp.trailing_zeros() as usize + 1;
            let hi = 64 - dp.leading_zeros() as usize;
            let a = DirectionPatternInfo {
                dpi: lo,
                dpl: bits.dpl_unchecked(lo),
                response: responses[lo - 1],
            };
            let b = DirectionPatternInfo {
                dpi: hi,
                dpl: bits.dpl_unchecked(hi),
                response: responses[hi - 1],
            };
            let (p, s) = if by_confidence(&a, &b) == Ordering::Greater { (b, a) } else { (a, b) };
            (p.dpi * n + s.dpi) as u16
        }
        _ => multi_direction_label(n),
    };
    (label, dpn)
}
