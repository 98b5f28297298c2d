//! End-to-end experiments: coupled Hénon sweep, mixed-signal change
//! detection and texture divergence matrices.

use std::collections::BTreeMap;

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::{divergence_matrix, gamma_divergence, GammaGenerator, GeneratorTag};
use crate::error::{Error, Result};
use crate::generators::{cubic, henon_with_redraw, logistic, rng, white_noise, HenonForm, HenonParams, MapParams};
use crate::io::{Cell, ImageMatrix, Table};
use crate::ordinal::{encode_series, image_distribution, series_distribution, ImageEmbedding, PatternCounts, SeriesEmbedding};
use crate::segmentation::{divergence_profile, DivergenceProfile, ProfileOptions};

/// Summary of a sample, with linearly interpolated quartiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

impl BoxStats {
    pub fn from_sample(values: &[f64]) -> Option<Self> {
        if values.is_empty() || values.iter().any(|v| v.is_nan()) {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(BoxStats {
            count: v.len(),
            min: v[0],
            q1: quantile_sorted(&v, 0.25),
            median: quantile_sorted(&v, 0.5),
            q3: quantile_sorted(&v, 0.75),
            max: v[v.len() - 1],
            mean: v.iter().sum::<f64>() / v.len() as f64,
        })
    }
}

fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    let h = q * (v.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    (va > 0.0 && vb > 0.0).then(|| cov / (va * vb).sqrt())
}

/// What is compared between driver and response in the Hénon sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepObservable {
    /// Joint distribution of co-occurring `(pattern_x, pattern_y)` pairs
    /// against its synchronized reference `(pattern_y, pattern_y)`.
    #[default]
    Joint,
    /// Pattern distribution of `x` against that of `y`.
    Marginal,
}

/// `D_γ` between the joint pattern-pair distribution of `(x, y)` and the
/// distribution the pair would have if `x` copied `y`.
pub fn coupling_divergence(
    response: &[f64],
    driver: &[f64],
    emb: &SeriesEmbedding,
    g: &GammaGenerator<f64>,
) -> Result<f64> {
    if response.len() != driver.len() {
        return Err(Error::invalid("driver and response lengths differ"));
    }
    let ix = encode_series(response, emb)?;
    let iy = encode_series(driver, emb)?;
    let bins = emb.bins();
    let mut joint = vec![0u64; bins * bins];
    let mut sync = vec![0u64; bins * bins];
    for (&a, &b) in ix.iter().zip(&iy) {
        joint[a * bins + b] += 1;
        sync[b * bins + b] += 1;
    }
    let total = ix.len() as f64;
    let p: Vec<f64> = joint.iter().map(|&c| c as f64 / total).collect();
    let q: Vec<f64> = sync.iter().map(|&c| c as f64 / total).collect();
    gamma_divergence(&p, &q, g)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HenonSweepConfig {
    pub epsilons: Vec<f64>,
    pub realizations: usize,
    pub n: usize,
    pub d: usize,
    pub tau: usize,
    pub generators: Vec<GeneratorTag>,
    pub seed: u64,
    pub transient: usize,
    pub b: f64,
    pub form: HenonForm,
    pub observable: SweepObservable,
    pub max_redraws: usize,
}

impl Default for HenonSweepConfig {
    fn default() -> Self {
        HenonSweepConfig {
            epsilons: (0..=10).map(|k| k as f64 / 10.0).collect(),
            realizations: 200,
            n: 100_000,
            d: 4,
            tau: 1,
            generators: GeneratorTag::EXPERIMENT.to_vec(),
            seed: 0,
            transient: 1000,
            b: 0.3,
            form: HenonForm::Standard,
            observable: SweepObservable::Joint,
            max_redraws: 10,
        }
    }
}

impl HenonSweepConfig {
    /// Lengths and realization counts divided by 10.
    pub fn desk_scale(mut self) -> Self {
        self.n = (self.n / 10).max(1);
        self.realizations = (self.realizations / 10).max(1);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationFailure {
    pub label: String,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub generator: GeneratorTag,
    pub stats: BoxStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HenonSweepResult {
    pub rows: Vec<SweepRow>,
    pub completed: usize,
    pub attempted: usize,
    pub failures: Vec<RealizationFailure>,
}

impl HenonSweepResult {
    /// Median per epsilon, in sweep order, for one generator.
    pub fn medians(&self, g: GeneratorTag) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.generator == g)
            .map(|r| (r.epsilon, r.stats.median))
            .collect()
    }

    /// Columns `epsilon, g, min, q1, median, q3, max, mean, count`.
    pub fn table(&self) -> Table {
        let mut t = Table::new(["epsilon", "g", "min", "q1", "median", "q3", "max", "mean", "count"]);
        for r in &self.rows {
            let s = r.stats;
            t.push(vec![
                Cell::Num(r.epsilon),
                Cell::from(r.generator.as_str()),
                s.min.into(),
                s.q1.into(),
                s.median.into(),
                s.q3.into(),
                s.max.into(),
                s.mean.into(),
                s.count.into(),
            ]);
        }
        t
    }
}

fn generators(tags: &[GeneratorTag]) -> Result<Vec<GammaGenerator<f64>>> {
    tags.iter().map(|&t| GammaGenerator::builtin(t)).collect()
}

/// Divergence between driver and response for every coupling, generator and
/// realization. Realization `r` uses seed `seed + r`.
pub fn henon_sweep(cfg: &HenonSweepConfig) -> Result<HenonSweepResult> {
    let emb = SeriesEmbedding::new(cfg.d, cfg.tau)?;
    let gens = generators(&cfg.generators)?;
    if cfg.realizations == 0 {
        return Err(Error::invalid("realizations must be >= 1"));
    }
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut completed = 0;
    for &eps in &cfg.epsilons {
        let outcomes: Vec<(u64, Result<Vec<f64>>)> = (0..cfg.realizations)
            .into_par_iter()
            .map(|r| {
                let seed = cfg.seed.wrapping_add(r as u64);
                let mut p = HenonParams::new(eps, cfg.n, seed);
                p.b = cfg.b;
                p.transient = cfg.transient;
                p.form = cfg.form;
                let out = henon_with_redraw(&p, cfg.max_redraws).and_then(|(s, _)| {
                    let px = match cfg.observable {
                        SweepObservable::Marginal => Some((
                            series_distribution(&s.response, &emb)?,
                            series_distribution(&s.driver, &emb)?,
                        )),
                        SweepObservable::Joint => None,
                    };
                    gens.iter()
                        .map(|g| match &px {
                            Some((a, b)) => gamma_divergence(a.probs(), b.probs(), g),
                            None => coupling_divergence(&s.response, &s.driver, &emb, g),
                        })
                        .collect()
                });
                (seed, out)
            })
            .collect();
        let mut per_g: Vec<Vec<f64>> = vec![Vec::new(); gens.len()];
        for (seed, out) in outcomes {
            match out {
                Ok(vals) => {
                    completed += 1;
                    for (k, v) in vals.into_iter().enumerate() {
                        per_g[k].push(v);
                    }
                }
                Err(e) => {
                    log::warn!("henon realization eps={eps} seed={seed} failed: {e}");
                    failures.push(RealizationFailure {
                        label: format!("eps={eps}"),
                        seed,
                        message: e.to_string(),
                    });
                }
            }
        }
        for (k, tag) in cfg.generators.iter().enumerate() {
            if let Some(stats) = BoxStats::from_sample(&per_g[k]) {
                rows.push(SweepRow {
                    epsilon: eps,
                    generator: *tag,
                    stats,
                });
            }
        }
    }
    Ok(HenonSweepResult {
        rows,
        completed,
        attempted: cfg.epsilons.len() * cfg.realizations,
        failures,
    })
}

/// The two halves of a mixed signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixtureKind {
    /// White noise followed by the logistic map.
    NoiseLogistic,
    /// Cubic map followed by the logistic map.
    CubicLogistic,
}

impl MixtureKind {
    pub const ALL: [MixtureKind; 2] = [MixtureKind::NoiseLogistic, MixtureKind::CubicLogistic];

    pub fn as_str(&self) -> &'static str {
        match self {
            MixtureKind::NoiseLogistic => "noise-logistic",
            MixtureKind::CubicLogistic => "cubic-logistic",
        }
    }
}

/// Iterations discarded before a chaotic segment is recorded.
const MAP_TRANSIENT: usize = 100;

/// Concatenation of two `segment`-long signals; the change sits at `segment`.
pub fn mixed_signal(kind: MixtureKind, segment: usize, seed: u64) -> Result<Vec<f64>> {
    let map = |s: u64| {
        let mut p = MapParams::new(segment, s);
        p.transient = MAP_TRANSIENT;
        p
    };
    let mut out = match kind {
        MixtureKind::NoiseLogistic => white_noise(segment, seed),
        MixtureKind::CubicLogistic => cubic(&map(seed))?,
    };
    // independent stream for the second half
    out.extend(logistic(&map(seed ^ 0x9E37_79B9_7F4A_7C15))?);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MixedSegmentationConfig {
    pub mixtures: Vec<MixtureKind>,
    pub realizations: usize,
    pub segment: usize,
    pub d: usize,
    pub tau: usize,
    pub generators: Vec<GeneratorTag>,
    pub seed: u64,
    pub stride: usize,
    /// Half-width of the window around the true change counted as a hit.
    pub tolerance: usize,
}

impl Default for MixedSegmentationConfig {
    fn default() -> Self {
        MixedSegmentationConfig {
            mixtures: MixtureKind::ALL.to_vec(),
            realizations: 100,
            segment: 2000,
            d: 4,
            tau: 1,
            generators: GeneratorTag::EXPERIMENT.to_vec(),
            seed: 0,
            stride: 1,
            tolerance: 100,
        }
    }
}

impl MixedSegmentationConfig {
    pub fn desk_scale(mut self) -> Self {
        self.segment = (self.segment / 10).max(1);
        self.realizations = (self.realizations / 10).max(1);
        self.tolerance = (self.tolerance / 10).max(1);
        self
    }
}

/// Profiles of one mixture under one generator, aggregated over realizations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedSummary {
    pub mixture: MixtureKind,
    pub generator: GeneratorTag,
    pub positions: Vec<usize>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Pointer where the mean profile peaks.
    pub argmax_of_mean: usize,
    pub mean_max_value: f64,
    pub argmax_positions: Vec<usize>,
    /// Realizations whose own argmax lies within the tolerance of the change.
    pub hits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedSegmentationResult {
    pub change_point: usize,
    pub summaries: Vec<MixedSummary>,
    pub completed: usize,
    pub attempted: usize,
    pub failures: Vec<RealizationFailure>,
}

impl MixedSegmentationResult {
    pub fn summary(&self, mixture: MixtureKind, g: GeneratorTag) -> Option<&MixedSummary> {
        self.summaries
            .iter()
            .find(|s| s.mixture == mixture && s.generator == g)
    }

    /// Long-format mean profiles: `mixture, g, position, mean, std`.
    pub fn profile_table(&self) -> Table {
        let mut t = Table::new(["mixture", "g", "position", "mean", "std"]);
        for s in &self.summaries {
            for ((p, m), sd) in s.positions.iter().zip(&s.mean).zip(&s.std) {
                t.push(vec![
                    s.mixture.as_str().into(),
                    s.generator.as_str().into(),
                    (*p).into(),
                    (*m).into(),
                    (*sd).into(),
                ]);
            }
        }
        t
    }

    /// One row per mixture and generator.
    pub fn summary_table(&self) -> Table {
        let mut t = Table::new(["mixture", "g", "change_point", "argmax_of_mean", "mean_max_value", "hits", "realizations"]);
        for s in &self.summaries {
            t.push(vec![
                s.mixture.as_str().into(),
                s.generator.as_str().into(),
                self.change_point.into(),
                s.argmax_of_mean.into(),
                s.mean_max_value.into(),
                s.hits.into(),
                s.argmax_positions.len().into(),
            ]);
        }
        t
    }
}

pub fn mixed_segmentation(cfg: &MixedSegmentationConfig) -> Result<MixedSegmentationResult> {
    let emb = SeriesEmbedding::new(cfg.d, cfg.tau)?;
    let gens = generators(&cfg.generators)?;
    let opts = ProfileOptions {
        stride: cfg.stride,
        ..Default::default()
    };
    let mut summaries = Vec::new();
    let mut failures = Vec::new();
    let mut completed = 0;
    for &kind in &cfg.mixtures {
        let outcomes: Vec<(u64, Result<Vec<DivergenceProfile<f64>>>)> = (0..cfg.realizations)
            .into_par_iter()
            .map(|r| {
                let seed = cfg.seed.wrapping_add(r as u64);
                let out = mixed_signal(kind, cfg.segment, seed).and_then(|s| {
                    gens.iter()
                        .map(|g| divergence_profile(&s, &emb, g, &opts))
                        .collect()
                });
                (seed, out)
            })
            .collect();
        let mut per_g: Vec<Vec<DivergenceProfile<f64>>> = vec![Vec::new(); gens.len()];
        for (seed, out) in outcomes {
            match out {
                Ok(profiles) => {
                    completed += 1;
                    for (k, p) in profiles.into_iter().enumerate() {
                        per_g[k].push(p);
                    }
                }
                Err(e) => {
                    log::warn!("{} realization seed={seed} failed: {e}", kind.as_str());
                    failures.push(RealizationFailure {
                        label: kind.as_str().to_string(),
                        seed,
                        message: e.to_string(),
                    });
                }
            }
        }
        for (k, profiles) in per_g.iter().enumerate() {
            if profiles.is_empty() {
                continue;
            }
            summaries.push(summarize(kind, cfg.generators[k], profiles, cfg.segment, cfg.tolerance));
        }
    }
    Ok(MixedSegmentationResult {
        change_point: cfg.segment,
        summaries,
        completed,
        attempted: cfg.mixtures.len() * cfg.realizations,
        failures,
    })
}

fn summarize(
    mixture: MixtureKind,
    generator: GeneratorTag,
    profiles: &[DivergenceProfile<f64>],
    change: usize,
    tolerance: usize,
) -> MixedSummary {
    let n = profiles.len() as f64;
    let positions = profiles[0].positions().to_vec();
    let len = positions.len();
    let mut mean = vec![0.0; len];
    for p in profiles {
        for (m, v) in mean.iter_mut().zip(p.values()) {
            *m += v / n;
        }
    }
    let mut std = vec![0.0; len];
    for p in profiles {
        for ((s, v), m) in std.iter_mut().zip(p.values()).zip(&mean) {
            *s += (v - m).powi(2) / n;
        }
    }
    std.iter_mut().for_each(|s| *s = s.sqrt());
    let mean_profile = DivergenceProfile::new(positions.clone(), mean.clone())
        .expect("mean of valid profiles is a valid profile");
    let argmax_positions: Vec<usize> = profiles.iter().map(|p| p.argmax_position()).collect();
    let hits = argmax_positions
        .iter()
        .filter(|&&p| p.abs_diff(change) <= tolerance)
        .count();
    MixedSummary {
        mixture,
        generator,
        positions,
        mean,
        std,
        argmax_of_mean: mean_profile.argmax_position(),
        mean_max_value: profiles.iter().map(|p| p.max_value()).sum::<f64>() / n,
        argmax_positions,
        hits,
    }
}

/// One image of the synthetic texture corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct Texture {
    pub label: String,
    pub family: String,
    pub image: ImageMatrix,
}

fn quantize(field: &[f64], size: usize, label: &str, family: &str) -> Texture {
    let (lo, hi) = field
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let scale = if hi > lo { 255.0 / (hi - lo) } else { 0.0 };
    let pixels = field
        .iter()
        .map(|&v| ((v - lo) * scale).round().clamp(0.0, 255.0) as u16)
        .collect();
    Texture {
        label: label.to_string(),
        family: family.to_string(),
        image: ImageMatrix {
            width: size,
            height: size,
            bits: 8,
            pixels,
        },
    }
}

fn gaussian_blur(field: &[f64], size: usize, sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let kernel: Vec<f64> = (-radius..=radius)
        .map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let norm: f64 = kernel.iter().sum();
    let reflect = |i: isize| -> usize {
        let n = size as isize;
        let mut i = i;
        if i < 0 {
            i = -i - 1;
        }
        if i >= n {
            i = 2 * n - i - 1;
        }
        i.clamp(0, n - 1) as usize
    };
    let pass = |src: &[f64], horizontal: bool| -> Vec<f64> {
        let mut out = vec![0.0; size * size];
        for r in 0..size {
            for c in 0..size {
                let mut acc = 0.0;
                for (k, w) in kernel.iter().enumerate() {
                    let off = k as isize - radius;
                    let (rr, cc) = if horizontal {
                        (r, reflect(c as isize + off))
                    } else {
                        (reflect(r as isize + off), c)
                    };
                    acc += w * src[rr * size + cc];
                }
                out[r * size + c] = acc / norm;
            }
        }
        out
    };
    pass(&pass(field, true), false)
}

/// Six `size x size` 8-bit textures in four families: two stripe
/// variants, two smooth checkerboards, blob noise and white noise.
pub fn synthetic_textures(size: usize, seed: u64) -> Vec<Texture> {
    use std::f64::consts::TAU;
    let mut r = rng(seed);
    let mut gauss = |s: f64| -> Vec<f64> {
        (0..size * size)
            .map(|_| s * r.sample::<f64, _>(StandardNormal))
            .collect()
    };
    let field = |f: &dyn Fn(f64, f64) -> f64, noise: Vec<f64>| -> Vec<f64> {
        (0..size * size)
            .map(|k| f((k / size) as f64, (k % size) as f64) + noise[k])
            .collect()
    };
    let stripe_a = field(&|i, _| (TAU * i / 7.0).sin(), gauss(0.05));
    let stripe_b = field(&|i, _| (TAU * i / 9.0 + 1.0).sin(), gauss(0.05));
    let check_a = field(&|i, j| (TAU * i / 8.0).sin() * (TAU * j / 8.0).sin(), gauss(0.05));
    let check_b = field(&|i, j| (TAU * i / 11.0).sin() * (TAU * j / 11.0).sin(), gauss(0.05));
    let blob = gaussian_blur(&gauss(1.0), size, 2.0);
    let white = gauss(1.0);
    vec![
        quantize(&stripe_a, size, "stripes-7", "stripes"),
        quantize(&stripe_b, size, "stripes-9", "stripes"),
        quantize(&check_a, size, "checker-8", "checker"),
        quantize(&check_b, size, "checker-11", "checker"),
        quantize(&blob, size, "blobs", "blobs"),
        quantize(&white, size, "white-noise", "white-noise"),
    ]
}

/// Pairwise divergence matrices between images, one per generator.
pub fn texture_matrices(
    images: &[ImageMatrix],
    emb: &ImageEmbedding,
    tags: &[GeneratorTag],
) -> Result<BTreeMap<GeneratorTag, Array2<f64>>> {
    let dists = images
        .par_iter()
        .map(|img| image_distribution(img.to_array::<f64>().view(), emb))
        .collect::<Result<Vec<_>>>()?;
    tags.iter()
        .map(|&t| Ok((t, divergence_matrix(&dists, &GammaGenerator::builtin(t)?)?)))
        .collect()
}

/// Total windows counted for each side of a pointer, exposed for diagnostics.
pub fn split_counts(series: &[f64], emb: &SeriesEmbedding, pointer: usize) -> Result<(u64, u64)> {
    let span = emb.span();
    if pointer <= span || pointer + span >= series.len() {
        return Err(Error::invalid("pointer leaves an empty half"));
    }
    let idx = encode_series(series, emb)?;
    let left = PatternCounts::from_indices(&idx[..pointer - span], emb.d)?;
    let right = PatternCounts::from_indices(&idx[pointer..], emb.d)?;
    Ok((left.total(), right.total()))
}
