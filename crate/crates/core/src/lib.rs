//! Ordinal-pattern distributions of series and images, compared with the
//! gamma-divergence family.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`, with `*32` variants.

pub mod divergence;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod io;
pub mod ordinal;
pub mod scalar;
pub mod segmentation;

pub use divergence::{
    csiszar_divergence, divergence_matrix, fisher_quadratic, gamma_divergence, gamma_term, jensen_shannon,
    potential, shannon_entropy, weighted_brc, weighted_brc_k, CsiszarGenerator, GammaGenerator, GeneratorTag,
    WeightVector,
};
pub use error::{Error, Result};
pub use generators::{
    cubic, henon_coupled, henon_with_redraw, logistic, white_noise, HenonForm, HenonParams, HenonSeries,
    HenonState, MapParams,
};
pub use ordinal::{
    encode_image, encode_series, encode_window, factorial, image_distribution, pattern_distribution,
    pattern_index, series_distribution, EmbeddingParams, ImageEmbedding, PatternCounts, PatternDistribution,
    PatternSymbol, SeriesEmbedding,
};
pub use scalar::Scalar;
pub use segmentation::{
    detect_change, divergence_profile, pointer_range, DivergenceProfile, ProfileMode, ProfileOptions,
};

pub type Distribution = PatternDistribution<f64>;
pub type Distribution32 = PatternDistribution<f32>;
pub type Generator = GammaGenerator<f64>;
pub type Generator32 = GammaGenerator<f32>;
pub type Profile = DivergenceProfile<f64>;
pub type Profile32 = DivergenceProfile<f32>;
pub type Weights = WeightVector<f64>;
pub type Weights32 = WeightVector<f32>;
