//! Burbea-Rao centroids over probability vectors.
//!
//! Every member of the family is built from a potential
//! `Φ(P) = Σ p_i g(p_i)` with `x g(x)` convex on `[0, 1]`. The gamma-divergence
//! carries a leading factor 2, so `gamma_divergence(P, Q, log) = 2 * JSD(P, Q)`.
//! All logarithms are natural.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordinal::simplex_tolerance;
use crate::scalar::Scalar;

/// Identifies a member of the gamma-divergence family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorTag {
    Exp,
    Log,
    Sqrt,
    Sinh,
    Euclid,
    Custom,
}

impl GeneratorTag {
    /// The four generators used throughout the experiments.
    pub const EXPERIMENT: [GeneratorTag; 4] = [
        GeneratorTag::Exp,
        GeneratorTag::Log,
        GeneratorTag::Sqrt,
        GeneratorTag::Sinh,
    ];

    pub const BUILTIN: [GeneratorTag; 5] = [
        GeneratorTag::Exp,
        GeneratorTag::Log,
        GeneratorTag::Sqrt,
        GeneratorTag::Sinh,
        GeneratorTag::Euclid,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            GeneratorTag::Exp => "exp",
            GeneratorTag::Log => "log",
            GeneratorTag::Sqrt => "sqrt",
            GeneratorTag::Sinh => "sinh",
            GeneratorTag::Euclid => "euclid",
            GeneratorTag::Custom => "custom",
        }
    }
}

impl fmt::Display for GeneratorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeneratorTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exp" => Ok(GeneratorTag::Exp),
            "log" | "ln" | "jsd" => Ok(GeneratorTag::Log),
            "sqrt" => Ok(GeneratorTag::Sqrt),
            "sinh" => Ok(GeneratorTag::Sinh),
            "euclid" | "identity" => Ok(GeneratorTag::Euclid),
            "custom" => Ok(GeneratorTag::Custom),
            other => Err(Error::invalid(format!(
                "unknown generator '{other}' (expected exp, log, sqrt, sinh or euclid)"
            ))),
        }
    }
}

type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Generator function `g` of a gamma-divergence.
#[derive(Clone)]
pub enum GammaGenerator<T> {
    Exp,
    Log,
    Sqrt,
    Sinh,
    /// `g(x) = x`; recovers half the squared Euclidean distance.
    Euclid,
    Custom { name: String, eval: ScalarFn<T> },
}

impl<T> fmt::Debug for GammaGenerator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaGenerator::Custom { name, .. } => write!(f, "Custom({name})"),
            other => f.write_str(other.name()),
        }
    }
}

const PROBE_POINTS: usize = 1000;

impl<T: Scalar> GammaGenerator<T> {
    pub fn builtin(tag: GeneratorTag) -> Result<Self> {
        Ok(match tag {
            GeneratorTag::Exp => GammaGenerator::Exp,
            GeneratorTag::Log => GammaGenerator::Log,
            GeneratorTag::Sqrt => GammaGenerator::Sqrt,
            GeneratorTag::Sinh => GammaGenerator::Sinh,
            GeneratorTag::Euclid => GammaGenerator::Euclid,
            GeneratorTag::Custom => {
                return Err(Error::invalid("custom generators need a function; use GammaGenerator::custom"))
            }
        })
    }

    /// Registers a user generator after probing `x g(x)` for convexity with
    /// second differences on a 1000-step grid over `[0, 1]`.
    ///
    /// The value at `x = 0` is taken as 0, so a generator whose `x g(x)` does
    /// not vanish at the origin also fails the probe.
    pub fn custom<F>(name: impl Into<String>, g: F) -> Result<Self>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        let name = name.into();
        let h: Vec<T> = (0..=PROBE_POINTS)
            .map(|k| {
                if k == 0 {
                    T::zero()
                } else {
                    let x = T::from_count(k) / T::from_count(PROBE_POINTS);
                    x * g(x)
                }
            })
            .collect();
        if let Some(k) = h.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "generator '{name}': x*g(x) is not finite at x = {}",
                k as f64 / PROBE_POINTS as f64
            )));
        }
        let scale = h.iter().fold(T::one(), |m, v| m.max(v.abs()));
        let tol = scale * T::epsilon() * T::lit(64.0);
        for k in 1..PROBE_POINTS {
            let second = h[k - 1] - T::lit(2.0) * h[k] + h[k + 1];
            if second < -tol {
                return Err(Error::invalid(format!(
                    "generator '{name}': x*g(x) is not convex near x = {} (second difference {:e})",
                    k as f64 / PROBE_POINTS as f64,
                    second.to_f64_lossy()
                )));
            }
        }
        Ok(GammaGenerator::Custom {
            name,
            eval: Arc::new(g),
        })
    }

    /// `g(x)` itself. Undefined at `x = 0` for `log`.
    pub fn eval(&self, x: T) -> T {
        match self {
            GammaGenerator::Exp => x.exp(),
            GammaGenerator::Log => x.ln(),
            GammaGenerator::Sqrt => x.sqrt(),
            GammaGenerator::Sinh => x.sinh(),
            GammaGenerator::Euclid => x,
            GammaGenerator::Custom { eval, .. } => eval(x),
        }
    }

    /// `x g(x)`, with the continuous limit 0 at `x = 0`.
    #[inline]
    pub fn weighted(&self, x: T) -> T {
        if x == T::zero() {
            T::zero()
        } else {
            x * self.eval(x)
        }
    }
}

impl<T> GammaGenerator<T> {
    pub fn tag(&self) -> GeneratorTag {
        match self {
            GammaGenerator::Exp => GeneratorTag::Exp,
            GammaGenerator::Log => GeneratorTag::Log,
            GammaGenerator::Sqrt => GeneratorTag::Sqrt,
            GammaGenerator::Sinh => GeneratorTag::Sinh,
            GammaGenerator::Euclid => GeneratorTag::Euclid,
            GammaGenerator::Custom { .. } => GeneratorTag::Custom,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            GammaGenerator::Custom { name, .. } => name,
            other => other.tag().as_str(),
        }
    }
}

/// Convex `f` of a Csiszar divergence `Σ q_i f(p_i / q_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CsiszarGenerator {
    /// `f(t) = t ln t`.
    Kl,
    /// `f(t) = ½[(t+1) ln(2/(t+1)) + t ln t]`, whose divergence is the JSD.
    Js,
}

impl CsiszarGenerator {
    pub fn eval<T: Scalar>(&self, t: T) -> T {
        let tlogt = if t == T::zero() { T::zero() } else { t * t.ln() };
        match self {
            CsiszarGenerator::Kl => tlogt,
            CsiszarGenerator::Js => {
                let s = t + T::one();
                T::lit(0.5) * (s * (T::lit(2.0) / s).ln() + tlogt)
            }
        }
    }

    /// `f''(1)`.
    pub fn fpp1<T: Scalar>(&self) -> T {
        match self {
            CsiszarGenerator::Kl => T::one(),
            CsiszarGenerator::Js => T::lit(0.25),
        }
    }

    /// `lim_{t→∞} f(t)/t`, the contribution per unit `p` of a bin with `q = 0`.
    fn slope_at_infinity<T: Scalar>(&self) -> T {
        match self {
            CsiszarGenerator::Kl => T::infinity(),
            CsiszarGenerator::Js => T::LN_2() * T::lit(0.5),
        }
    }
}

impl FromStr for CsiszarGenerator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kl" => Ok(CsiszarGenerator::Kl),
            "js" | "jsd" => Ok(CsiszarGenerator::Js),
            other => Err(Error::invalid(format!("unknown f-divergence '{other}' (expected kl or js)"))),
        }
    }
}

/// Non-negative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T>(Vec<T>);

impl<T: Scalar> WeightVector<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("empty weight vector"));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < T::zero()) {
            return Err(Error::invalid(format!("weight {i} is negative or non-finite")));
        }
        let sum: T = weights.iter().copied().sum();
        if (sum - T::one()).abs() > simplex_tolerance::<T>(weights.len()) {
            return Err(Error::invalid(format!("weights sum to {sum}, not 1")));
        }
        Ok(WeightVector(weights))
    }

    pub fn pair(a: T, b: T) -> Result<Self> {
        Self::new(vec![a, b])
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("empty weight vector"));
        }
        Ok(WeightVector(vec![T::one() / T::from_count(k); k]))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_unit_interval<T: Scalar>(x: T, what: &str) -> Result<()> {
    if x.is_finite() && x >= T::zero() && x <= T::one() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} = {x} is outside [0, 1]")))
    }
}

fn check_probability_vector<T: Scalar>(p: &[T], what: &str) -> Result<()> {
    match p.iter().position(|&x| !(x.is_finite() && x >= T::zero() && x <= T::one())) {
        Some(i) => Err(Error::invalid(format!("{what}[{i}] = {} is outside [0, 1]", p[i]))),
        None => Ok(()),
    }
}

fn check_pair<T: Scalar>(p: &[T], q: &[T]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::invalid(format!(
            "distribution lengths differ: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    check_probability_vector(p, "P")?;
    check_probability_vector(q, "Q")
}

#[inline]
fn term<T: Scalar>(p: T, q: T, g: &GammaGenerator<T>) -> T {
    let half = T::lit(0.5);
    half * g.weighted(p) + half * g.weighted(q) - g.weighted((p + q) * half)
}

/// Per-bin contribution `½p g(p) + ½q g(q) − ½(p+q) g((p+q)/2)`.
pub fn gamma_term<T: Scalar>(p: T, q: T, g: &GammaGenerator<T>) -> Result<T> {
    check_unit_interval(p, "p")?;
    check_unit_interval(q, "q")?;
    Ok(term(p, q, g))
}

/// `2 Σ_i gamma_term(p_i, q_i)`.
pub fn gamma_divergence<T: Scalar>(p: &[T], q: &[T], g: &GammaGenerator<T>) -> Result<T> {
    check_pair(p, q)?;
    let s: T = p.iter().zip(q).map(|(&a, &b)| term(a, b, g)).sum();
    Ok(T::lit(2.0) * s)
}

/// Jensen-Shannon divergence with natural log, bounded by `ln 2`.
///
/// Evaluated as the mean Kullback-Leibler divergence to the midpoint, which
/// keeps every summand well conditioned.
pub fn jensen_shannon<T: Scalar>(p: &[T], q: &[T]) -> Result<T> {
    check_pair(p, q)?;
    let half = T::lit(0.5);
    let mut acc = T::zero();
    for (&a, &b) in p.iter().zip(q) {
        let m = (a + b) * half;
        if a > T::zero() {
            acc += half * a * (a / m).ln();
        }
        if b > T::zero() {
            acc += half * b * (b / m).ln();
        }
    }
    Ok(acc.max(T::zero()))
}

/// `−Σ p_i ln p_i` of a distribution.
pub fn shannon_entropy<T: Scalar>(p: &[T]) -> Result<T> {
    crate::ordinal::check_simplex(p)?;
    let h: T = p
        .iter()
        .filter(|&&x| x > T::zero())
        .map(|&x| -x * x.ln())
        .sum();
    Ok(h)
}

/// `Φ(P) = Σ p_i g(p_i)`.
pub fn potential<T: Scalar>(p: &[T], g: &GammaGenerator<T>) -> T {
    p.iter().map(|&x| g.weighted(x)).sum()
}

/// `π_P Φ(P) + π_Q Φ(Q) − Φ(π_P P + π_Q Q)`.
pub fn weighted_brc<T: Scalar>(
    p: &[T],
    q: &[T],
    weights: &WeightVector<T>,
    g: &GammaGenerator<T>,
) -> Result<T> {
    check_pair(p, q)?;
    let [wp, wq] = match weights.as_slice() {
        &[a, b] => [a, b],
        w => return Err(Error::invalid(format!("expected 2 weights, got {}", w.len()))),
    };
    let mut mixed = T::zero();
    for (&a, &b) in p.iter().zip(q) {
        mixed += g.weighted(wp * a + wq * b);
    }
    Ok(wp * potential(p, g) + wq * potential(q, g) - mixed)
}

/// `Σ_k π_k Φ(P_k) − Φ(Σ_k π_k P_k)` over `K >= 2` distributions.
pub fn weighted_brc_k<T: Scalar, D: AsRef<[T]>>(
    dists: &[D],
    weights: &WeightVector<T>,
    g: &GammaGenerator<T>,
) -> Result<T> {
    if dists.len() < 2 {
        return Err(Error::invalid(format!("need at least 2 distributions, got {}", dists.len())));
    }
    if dists.len() != weights.len() {
        return Err(Error::invalid(format!(
            "{} distributions but {} weights",
            dists.len(),
            weights.len()
        )));
    }
    let n = dists[0].as_ref().len();
    for (k, d) in dists.iter().enumerate() {
        let d = d.as_ref();
        if d.len() != n {
            return Err(Error::invalid(format!(
                "distribution {k} has length {} (expected {n})",
                d.len()
            )));
        }
        check_probability_vector(d, "P_k")?;
    }
    let w = weights.as_slice();
    let mut mixture = vec![T::zero(); n];
    let mut spread = T::zero();
    for (d, &wk) in dists.iter().zip(w) {
        let d = d.as_ref();
        for (m, &x) in mixture.iter_mut().zip(d) {
            *m += wk * x;
        }
        spread += wk * potential(d, g);
    }
    Ok(spread - potential(&mixture, g))
}

/// `Σ_i q_i f(p_i / q_i)`; bins with `q_i = 0 < p_i` contribute
/// `p_i · lim f(t)/t` (`+∞` for KL).
pub fn csiszar_divergence<T: Scalar>(p: &[T], q: &[T], f: CsiszarGenerator) -> Result<T> {
    check_pair(p, q)?;
    let mut acc = T::zero();
    for (&a, &b) in p.iter().zip(q) {
        if b > T::zero() {
            acc += b * f.eval(a / b);
        } else if a > T::zero() {
            acc += a * f.slope_at_infinity::<T>();
        }
    }
    Ok(acc)
}

/// Second-order (Fisher metric) prediction `f''(1)/2 · Σ δp_i² / p_i`.
pub fn fisher_quadratic<T: Scalar>(p: &[T], delta: &[T], fpp1: T) -> Result<T> {
    if p.len() != delta.len() {
        return Err(Error::invalid("P and δP lengths differ"));
    }
    if let Some(i) = p.iter().position(|&x| !(x > T::zero() && x.is_finite())) {
        return Err(Error::invalid(format!("p[{i}] must be strictly positive")));
    }
    let drift: T = delta.iter().copied().sum();
    if drift.abs() > simplex_tolerance::<T>(delta.len()) {
        return Err(Error::invalid(format!("perturbation sums to {drift}, not 0")));
    }
    if p.iter().zip(delta).any(|(&a, &d)| a + d < T::zero()) {
        return Err(Error::invalid("P + δP has a negative entry"));
    }
    let s: T = p.iter().zip(delta).map(|(&a, &d)| d * d / a).sum();
    Ok(fpp1 * T::lit(0.5) * s)
}

/// Symmetric matrix of pairwise gamma-divergences with an exact zero diagonal.
pub fn divergence_matrix<T: Scalar, D: AsRef<[T]>>(
    dists: &[D],
    g: &GammaGenerator<T>,
) -> Result<Array2<T>> {
    let k = dists.len();
    let mut out = Array2::zeros((k, k));
    for i in 0..k {
        for j in i + 1..k {
            let v = gamma_divergence(dists[i].as_ref(), dists[j].as_ref(), g)?;
            out[[i, j]] = v;
            out[[j, i]] = v;
        }
    }
    Ok(out)
}
