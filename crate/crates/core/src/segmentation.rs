//! Sliding-pointer change detection.
//!
//! At every admissible pointer `p` the series is split into `x[..p]` and
//! `x[p..]`; each half is encoded on its own (windows straddling the pointer
//! are dropped) and the halves are scored with the weighted Burbea-Rao
//! centroid using length weights `(p/L, (L−p)/L)`.

use serde::{Deserialize, Serialize};

use crate::divergence::{weighted_brc_k, GammaGenerator, WeightVector};
use crate::error::{Error, Result};
use crate::ordinal::{encode_series, PatternCounts, PatternDistribution, SeriesEmbedding};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum ProfileMode {
    /// Split the whole series at each pointer in `[2·d!, L − 2·d!]`.
    Pointer,
    /// Compare the `width` samples before the pointer with the `width` after.
    RunningWindow { width: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProfileOptions {
    pub stride: usize,
    pub mode: ProfileMode,
    /// Update histograms in place instead of re-encoding both halves per pointer.
    pub incremental: bool,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            stride: 1,
            mode: ProfileMode::Pointer,
            incremental: true,
        }
    }
}

/// Divergence value at each pointer position.
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceProfile<T> {
    positions: Vec<usize>,
    values: Vec<T>,
    argmax: usize,
    max_value: T,
}

impl<T: Scalar> DivergenceProfile<T> {
    pub fn new(positions: Vec<usize>, values: Vec<T>) -> Result<Self> {
        if positions.is_empty() || positions.len() != values.len() {
            return Err(Error::invalid(format!(
                "profile needs matching non-empty positions/values ({} vs {})",
                positions.len(),
                values.len()
            )));
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("profile positions must be strictly increasing"));
        }
        let floor = -T::lit(1e-12);
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= floor)) {
            return Err(Error::invalid(format!("profile value {i} = {} is invalid", values[i])));
        }
        let mut argmax = 0;
        for (i, v) in values.iter().enumerate() {
            if *v > values[argmax] {
                argmax = i;
            }
        }
        let max_value = values[argmax];
        Ok(DivergenceProfile {
            positions,
            values,
            argmax,
            max_value,
        })
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Index into `positions`/`values` of the first maximum.
    pub fn argmax(&self) -> usize {
        self.argmax
    }

    /// Pointer position of the first maximum.
    pub fn argmax_position(&self) -> usize {
        self.positions[self.argmax]
    }

    pub fn max_value(&self) -> T {
        self.max_value
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Admissible pointer range `[first, last]` (1-based sample counts).
pub fn pointer_range(len: usize, emb: &SeriesEmbedding) -> Result<(usize, usize)> {
    emb.validate()?;
    let margin = 2 * emb.bins();
    if len < 2 * margin + 2 {
        return Err(Error::invalid(format!(
            "series of length {len} too short for d={}: need >= 4*d!+2 = {}",
            emb.d,
            2 * margin + 2
        )));
    }
    if margin <= emb.span() {
        return Err(Error::invalid(format!(
            "delay tau={} too large: no complete window within 2*d! = {margin} samples",
            emb.tau
        )));
    }
    Ok((margin, len - margin))
}

struct Halves {
    left: PatternCounts,
    right: PatternCounts,
}

/// Weighted divergence profile of `series`.
pub fn divergence_profile<T: Scalar>(
    series: &[T],
    emb: &SeriesEmbedding,
    g: &GammaGenerator<T>,
    opts: &ProfileOptions,
) -> Result<DivergenceProfile<T>> {
    if opts.stride == 0 {
        return Err(Error::invalid("stride must be >= 1"));
    }
    let len = series.len();
    let span = emb.span();
    // (first, last, left window start, right window end), windows half-open in samples
    let (first, last) = match opts.mode {
        ProfileMode::Pointer => pointer_range(len, emb)?,
        ProfileMode::RunningWindow { width } => {
            emb.validate()?;
            if width <= span {
                return Err(Error::invalid(format!(
                    "running window width {width} holds no complete pattern (span {span})"
                )));
            }
            if len < 2 * width {
                return Err(Error::invalid(format!(
                    "series of length {len} shorter than two windows of width {width}"
                )));
            }
            (width, len - width)
        }
    };
    let bounds = |p: usize| -> (usize, usize) {
        match opts.mode {
            ProfileMode::Pointer => (0, len),
            ProfileMode::RunningWindow { width } => (p - width, p + width),
        }
    };

    let weights = |p: usize| -> Result<WeightVector<T>> {
        let (lo, hi) = bounds(p);
        let total = T::from_count(hi - lo);
        WeightVector::pair(T::from_count(p - lo) / total, T::from_count(hi - p) / total)
    };
    let score = |h: &Halves, p: usize| -> Result<T> {
        let pl: PatternDistribution<T> = h.left.to_distribution()?;
        let pr: PatternDistribution<T> = h.right.to_distribution()?;
        weighted_brc_k(&[pl, pr], &weights(p)?, g)
    };

    let mut positions = Vec::new();
    let mut values = Vec::new();

    if opts.incremental {
        let idx = encode_series(series, emb)?;
        let (lo, hi) = bounds(first);
        let mut h = Halves {
            left: PatternCounts::from_indices(&idx[lo..first - span], emb.d)?,
            right: PatternCounts::from_indices(&idx[first..hi - span], emb.d)?,
        };
        let mut p = first;
        loop {
            positions.push(p);
            values.push(score(&h, p)?);
            let next = p + opts.stride;
            if next > last {
                break;
            }
            while p < next {
                let (lo, hi) = bounds(p);
                h.left.add(idx[p - span])?;
                h.right.remove(idx[p])?;
                if let ProfileMode::RunningWindow { .. } = opts.mode {
                    h.left.remove(idx[lo])?;
                    h.right.add(idx[hi - span])?;
                }
                p += 1;
            }
        }
    } else {
        let mut p = first;
        while p <= last {
            let (lo, hi) = bounds(p);
            let h = Halves {
                left: PatternCounts::from_indices(&encode_series(&series[lo..p], emb)?, emb.d)?,
                right: PatternCounts::from_indices(&encode_series(&series[p..hi], emb)?, emb.d)?,
            };
            positions.push(p);
            values.push(score(&h, p)?);
            p += opts.stride;
        }
    }
    DivergenceProfile::new(positions, values)
}

/// Pointer of the profile maximum when it reaches `threshold`.
pub fn detect_change<T: Scalar>(profile: &DivergenceProfile<T>, threshold: T) -> Result<Option<usize>> {
    if !(threshold >= T::zero()) {
        return Err(Error::invalid(format!("threshold {threshold} must be >= 0")));
    }
    Ok((profile.max_value() >= threshold).then(|| profile.argmax_position()))
}
