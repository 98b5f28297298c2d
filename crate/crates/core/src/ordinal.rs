//! Ordinal-pattern encoding of series and images.
//!
//! A window of `m` values is mapped to its rank vector: component `i` is the
//! ascending rank of element `i`, ties broken by position (earlier element
//! ranks lower). Rank vectors are binned by their lexicographic (Lehmer)
//! index in `0..m!`.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest pattern length for which a full histogram (`m!` bins) is built.
pub const MAX_PATTERN_LEN: usize = 10;

/// Samples per bin below which a distribution is flagged as undersampled.
pub const RELIABILITY_FACTOR: usize = 5;

pub fn factorial(m: usize) -> usize {
    (1..=m).product()
}

/// Embedding dimension and delay for a one-dimensional series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeriesEmbedding {
    pub d: usize,
    pub tau: usize,
}

impl SeriesEmbedding {
    pub fn new(d: usize, tau: usize) -> Result<Self> {
        let e = SeriesEmbedding { d, tau };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::invalid(format!("embedding dimension d={} < 2", self.d)));
        }
        if self.d > MAX_PATTERN_LEN {
            return Err(Error::invalid(format!(
                "embedding dimension d={} exceeds supported maximum {MAX_PATTERN_LEN}",
                self.d
            )));
        }
        if self.tau < 1 {
            return Err(Error::invalid("time delay tau must be >= 1"));
        }
        Ok(())
    }

    /// Distance between the first and last sample of a window.
    pub fn span(&self) -> usize {
        (self.d - 1) * self.tau
    }

    pub fn pattern_len(&self) -> usize {
        self.d
    }

    pub fn bins(&self) -> usize {
        factorial(self.d)
    }

    /// Number of windows in a series of length `n`, if there is at least one.
    pub fn window_count(&self, n: usize) -> Option<usize> {
        n.checked_sub(self.span()).filter(|&k| k > 0)
    }
}

/// Embedding dimensions and delays for a two-dimensional array.
///
/// `dx`/`tau_x` run along rows (first axis), `dy`/`tau_y` along columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImageEmbedding {
    pub dx: usize,
    pub dy: usize,
    pub tau_x: usize,
    pub tau_y: usize,
}

impl ImageEmbedding {
    pub fn new(dx: usize, dy: usize, tau_x: usize, tau_y: usize) -> Result<Self> {
        let e = ImageEmbedding { dx, dy, tau_x, tau_y };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dx < 1 || self.dy < 1 {
            return Err(Error::invalid("embedding dimensions dx, dy must be >= 1"));
        }
        let m = self.dx * self.dy;
        if m < 2 {
            return Err(Error::invalid("dx*dy must be >= 2"));
        }
        if m > MAX_PATTERN_LEN {
            return Err(Error::invalid(format!(
                "dx*dy={m} exceeds supported maximum {MAX_PATTERN_LEN}"
            )));
        }
        if self.tau_x < 1 || self.tau_y < 1 {
            return Err(Error::invalid("delays tau_x, tau_y must be >= 1"));
        }
        Ok(())
    }

    pub fn pattern_len(&self) -> usize {
        self.dx * self.dy
    }

    pub fn bins(&self) -> usize {
        factorial(self.pattern_len())
    }

    /// Output grid shape `(n_x, n_y)` for an `rows x cols` array.
    pub fn output_shape(&self, rows: usize, cols: usize) -> Option<(usize, usize)> {
        let nx = rows.checked_sub((self.dx - 1) * self.tau_x).filter(|&k| k > 0)?;
        let ny = cols.checked_sub((self.dy - 1) * self.tau_y).filter(|&k| k > 0)?;
        Some((nx, ny))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EmbeddingParams {
    Series(SeriesEmbedding),
    Image(ImageEmbedding),
}

impl EmbeddingParams {
    pub fn pattern_len(&self) -> usize {
        match self {
            EmbeddingParams::Series(e) => e.pattern_len(),
            EmbeddingParams::Image(e) => e.pattern_len(),
        }
    }
}

impl From<SeriesEmbedding> for EmbeddingParams {
    fn from(e: SeriesEmbedding) -> Self {
        EmbeddingParams::Series(e)
    }
}

impl From<ImageEmbedding> for EmbeddingParams {
    fn from(e: ImageEmbedding) -> Self {
        EmbeddingParams::Image(e)
    }
}

/// Rank vector of a window; always a permutation of `0..m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternSymbol(Vec<usize>);

impl PatternSymbol {
    pub fn new(ranks: Vec<usize>) -> Result<Self> {
        check_permutation(&ranks)?;
        Ok(PatternSymbol(ranks))
    }

    /// Inverse of [`pattern_index`]: decodes a Lehmer index into its permutation.
    pub fn from_index(index: usize, m: usize) -> Result<Self> {
        if m == 0 || m > MAX_PATTERN_LEN {
            return Err(Error::invalid(format!("pattern length {m} out of range")));
        }
        if index >= factorial(m) {
            return Err(Error::invalid(format!("index {index} >= {m}!")));
        }
        let mut pool: Vec<usize> = (0..m).collect();
        let mut rest = index;
        let mut ranks = Vec::with_capacity(m);
        for i in 0..m {
            let f = factorial(m - 1 - i);
            ranks.push(pool.remove(rest / f));
            rest %= f;
        }
        Ok(PatternSymbol(ranks))
    }

    pub fn ranks(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_permutation(ranks: &[usize]) -> Result<()> {
    let m = ranks.len();
    let mut seen = vec![false; m];
    for &r in ranks {
        if r >= m || std::mem::replace(&mut seen[r], true) {
            return Err(Error::invalid(format!("{ranks:?} is not a permutation of 0..{m}")));
        }
    }
    Ok(())
}

fn check_finite<T: Scalar>(values: &[T]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::invalid(format!("non-finite value at position {i}"))),
        None => Ok(()),
    }
}

/// Rank vector of `window` (stable ties).
pub fn encode_window<T: Scalar>(window: &[T]) -> Result<PatternSymbol> {
    if window.len() < 2 {
        return Err(Error::invalid("window length must be >= 2"));
    }
    check_finite(window)?;
    let ranks = window
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            window
                .iter()
                .enumerate()
                .filter(|&(j, &w)| w < v || (w == v && j < i))
                .count()
        })
        .collect();
    Ok(PatternSymbol(ranks))
}

/// Lexicographic rank of the permutation among all `m!` permutations.
pub fn pattern_index(symbol: &PatternSymbol) -> Result<usize> {
    let r = symbol.ranks();
    check_permutation(r)?;
    let m = r.len();
    if m > 20 {
        return Err(Error::invalid("pattern length > 20 overflows the index"));
    }
    let mut index = 0usize;
    for i in 0..m {
        let smaller_after = r[i + 1..].iter().filter(|&&x| x < r[i]).count();
        index += smaller_after * factorial(m - 1 - i);
    }
    Ok(index)
}

/// Lehmer index straight from window values, no allocation.
///
/// Under the stable tie rule, `rank[j] < rank[i]` for `j > i` holds exactly
/// when `x[j] < x[i]`, so the Lehmer digits can be counted on the raw values.
#[inline]
fn window_index<T: Scalar>(get: impl Fn(usize) -> T, m: usize, weights: &[usize]) -> usize {
    let mut index = 0;
    for i in 0..m {
        let xi = get(i);
        let mut c = 0;
        for j in i + 1..m {
            if get(j) < xi {
                c += 1;
            }
        }
        index += c * weights[i];
    }
    index
}

fn lehmer_weights(m: usize) -> Vec<usize> {
    (0..m).map(|i| factorial(m - 1 - i)).collect()
}

/// Pattern index of every delay window of `series`, in time order.
pub fn encode_series<T: Scalar>(series: &[T], emb: &SeriesEmbedding) -> Result<Vec<usize>> {
    emb.validate()?;
    let count = emb.window_count(series.len()).ok_or_else(|| {
        Error::invalid(format!(
            "series of length {} too short for d={}, tau={} (need >= {})",
            series.len(),
            emb.d,
            emb.tau,
            emb.span() + 1
        ))
    })?;
    check_finite(series)?;
    let (m, tau) = (emb.d, emb.tau);
    let weights = lehmer_weights(m);
    Ok((0..count)
        .map(|t| window_index(|k| series[t + k * tau], m, &weights))
        .collect())
}

/// Pattern index of every `dx x dy` partition, flattened row by row.
pub fn encode_image<T: Scalar>(
    matrix: ArrayView2<'_, T>,
    emb: &ImageEmbedding,
) -> Result<Array2<usize>> {
    emb.validate()?;
    let (rows, cols) = matrix.dim();
    let (nx, ny) = emb.output_shape(rows, cols).ok_or_else(|| {
        Error::invalid(format!(
            "{rows}x{cols} array too small for dx={}, dy={}, tau_x={}, tau_y={}",
            emb.dx, emb.dy, emb.tau_x, emb.tau_y
        ))
    })?;
    if let Some(((r, c), _)) = matrix.indexed_iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite value at ({r}, {c})")));
    }
    let m = emb.pattern_len();
    let weights = lehmer_weights(m);
    let offsets: Vec<(usize, usize)> = (0..emb.dx)
        .flat_map(|a| (0..emb.dy).map(move |b| (a * emb.tau_x, b * emb.tau_y)))
        .collect();
    Ok(Array2::from_shape_fn((nx, ny), |(i, j)| {
        window_index(
            |k| {
                let (di, dj) = offsets[k];
                matrix[[i + di, j + dj]]
            },
            m,
            &weights,
        )
    }))
}

/// Histogram of pattern indices; supports add/remove for sliding updates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternCounts {
    counts: Vec<u64>,
    total: u64,
    pattern_len: usize,
}

impl PatternCounts {
    pub fn new(pattern_len: usize) -> Result<Self> {
        if !(2..=MAX_PATTERN_LEN).contains(&pattern_len) {
            return Err(Error::invalid(format!("pattern length {pattern_len} out of range")));
        }
        Ok(PatternCounts {
            counts: vec![0; factorial(pattern_len)],
            total: 0,
            pattern_len,
        })
    }

    pub fn from_indices(indices: &[usize], pattern_len: usize) -> Result<Self> {
        let mut h = Self::new(pattern_len)?;
        for &i in indices {
            h.add(i)?;
        }
        Ok(h)
    }

    pub fn add(&mut self, index: usize) -> Result<()> {
        let slot = self.counts.get_mut(index).ok_or_else(|| {
            Error::invalid(format!("pattern index {index} >= {}!", self.pattern_len))
        })?;
        *slot += 1;
        self.total += 1;
        Ok(())
    }

    pub fn remove(&mut self, index: usize) -> Result<()> {
        match self.counts.get_mut(index) {
            Some(slot) if *slot > 0 => {
                *slot -= 1;
                self.total -= 1;
                Ok(())
            }
            _ => Err(Error::invalid(format!("pattern index {index} not present"))),
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn pattern_len(&self) -> usize {
        self.pattern_len
    }

    pub fn to_distribution<T: Scalar>(&self) -> Result<PatternDistribution<T>> {
        if self.total == 0 {
            return Err(Error::invalid("cannot normalize an empty histogram"));
        }
        let total = T::from_u64(self.total).expect("count fits scalar");
        let probs = self
            .counts
            .iter()
            .map(|&c| T::from_u64(c).expect("count fits scalar") / total)
            .collect();
        Ok(PatternDistribution {
            probs,
            sample_count: self.total as usize,
            pattern_len: self.pattern_len,
        })
    }
}

/// Probability vector over the `m!` ordinal patterns, in Lehmer order.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternDistribution<T> {
    probs: Vec<T>,
    sample_count: usize,
    pattern_len: usize,
}

impl<T: Scalar> PatternDistribution<T> {
    /// Builds a distribution from explicit probabilities, checking the simplex
    /// constraints.
    pub fn from_probs(probs: Vec<T>, pattern_len: usize, sample_count: usize) -> Result<Self> {
        if !(2..=MAX_PATTERN_LEN).contains(&pattern_len) {
            return Err(Error::invalid(format!("pattern length {pattern_len} out of range")));
        }
        if probs.len() != factorial(pattern_len) {
            return Err(Error::invalid(format!(
                "{} probabilities given for {}! = {} patterns",
                probs.len(),
                pattern_len,
                factorial(pattern_len)
            )));
        }
        check_simplex(&probs)?;
        Ok(PatternDistribution {
            probs,
            sample_count,
            pattern_len,
        })
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<T> {
        self.probs
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn pattern_len(&self) -> usize {
        self.pattern_len
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// True when fewer than `5 * m!` windows were counted.
    pub fn is_undersampled(&self) -> bool {
        self.sample_count < RELIABILITY_FACTOR * self.probs.len()
    }
}

impl<T> AsRef<[T]> for PatternDistribution<T> {
    fn as_ref(&self) -> &[T] {
        &self.probs
    }
}

/// Sum-to-one tolerance: 1e-12, widened to the precision of `T`.
pub(crate) fn simplex_tolerance<T: Scalar>(len: usize) -> T {
    T::lit(1e-12).max(T::epsilon() * T::from_count(8 * len.max(1)))
}

pub(crate) fn check_simplex<T: Scalar>(probs: &[T]) -> Result<()> {
    if let Some(i) = probs.iter().position(|p| !p.is_finite() || *p < T::zero()) {
        return Err(Error::invalid(format!("probability {i} is negative or non-finite")));
    }
    let sum: T = probs.iter().copied().sum();
    if (sum - T::one()).abs() > simplex_tolerance::<T>(probs.len()) {
        return Err(Error::invalid(format!("probabilities sum to {sum}, not 1")));
    }
    Ok(())
}

/// Relative frequency of each pattern index.
///
/// Logs a warning when the sample is smaller than `5 * m!`.
pub fn pattern_distribution<T: Scalar>(
    indices: &[usize],
    pattern_len: usize,
) -> Result<PatternDistribution<T>> {
    if indices.is_empty() {
        return Err(Error::invalid("no pattern indices to count"));
    }
    let dist = PatternCounts::from_indices(indices, pattern_len)?.to_distribution::<T>()?;
    if dist.is_undersampled() {
        log::warn!(
            "only {} windows for {} patterns (recommended >= {}); distribution may be unreliable",
            dist.sample_count(),
            dist.len(),
            RELIABILITY_FACTOR * dist.len()
        );
    }
    Ok(dist)
}

pub fn series_distribution<T: Scalar>(
    series: &[T],
    emb: &SeriesEmbedding,
) -> Result<PatternDistribution<T>> {
    pattern_distribution(&encode_series(series, emb)?, emb.d)
}

pub fn image_distribution<T: Scalar>(
    matrix: ArrayView2<'_, T>,
    emb: &ImageEmbedding,
) -> Result<PatternDistribution<T>> {
    let grid = encode_image(matrix, emb)?;
    let indices: Vec<usize> = grid.iter().copied().collect();
    pattern_distribution(&indices, emb.pattern_len())
}
