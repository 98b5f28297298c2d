//! Seedable simulators: coupled Hénon maps, logistic and cubic maps, white noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Escape bound for the Hénon system.
pub const HENON_ESCAPE: f64 = 1e6;
/// Escape bound for the one-dimensional maps.
pub const MAP_ESCAPE: f64 = 10.0;

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Response update of the coupled system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HenonForm {
    /// `x1' = 1.4 − (ε y1 x1 + (1−ε) x1²) + b x2`
    #[default]
    Standard,
    /// `x1' = 1.4 − (ε y1 + (1−ε) x1 + b x2)`, affine in the response.
    Literal,
}

/// Full state `(y1, y2, x1, x2)`: driver `y`, response `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HenonState<T> {
    pub y1: T,
    pub y2: T,
    pub x1: T,
    pub x2: T,
}

impl<T: Scalar> HenonState<T> {
    /// One iteration of the unidirectionally coupled system.
    pub fn step(self, epsilon: T, b: T, form: HenonForm) -> Self {
        let a = T::lit(1.4);
        let one = T::one();
        let y1 = a - self.y1 * self.y1 + b * self.y2;
        let x1 = match form {
            HenonForm::Standard => {
                a - (epsilon * self.y1 * self.x1 + (one - epsilon) * self.x1 * self.x1) + b * self.x2
            }
            HenonForm::Literal => a - (epsilon * self.y1 + (one - epsilon) * self.x1 + b * self.x2),
        };
        HenonState {
            y1,
            y2: self.y1,
            x1,
            x2: self.x1,
        }
    }

    fn max_abs(&self) -> T {
        self.y1.abs().max(self.y2.abs()).max(self.x1.abs()).max(self.x2.abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HenonParams<T> {
    /// Coupling strength in `[0, 1]`.
    pub epsilon: T,
    pub b: T,
    pub n: usize,
    pub seed: u64,
    pub transient: usize,
    pub form: HenonForm,
    /// Fixed initial state; drawn uniformly from `(−0.1, 0.1)^4` when `None`.
    pub initial: Option<HenonState<T>>,
}

impl<T: Scalar> HenonParams<T> {
    pub fn new(epsilon: T, n: usize, seed: u64) -> Self {
        HenonParams {
            epsilon,
            b: T::lit(0.3),
            n,
            seed,
            transient: 1000,
            form: HenonForm::Standard,
            initial: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= T::zero() && self.epsilon <= T::one()) {
            return Err(Error::invalid(format!("coupling epsilon={} outside [0, 1]", self.epsilon)));
        }
        if !self.b.is_finite() {
            return Err(Error::invalid("b must be finite"));
        }
        if self.n == 0 {
            return Err(Error::invalid("series length n must be > 0"));
        }
        Ok(())
    }
}

/// Driver and response observables, each of length `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HenonSeries<T> {
    pub driver: Vec<T>,
    pub response: Vec<T>,
}

/// Simulates the coupled Hénon-Hénon system and returns `y1` and `x1`.
pub fn henon_coupled<T: Scalar>(params: &HenonParams<T>) -> Result<HenonSeries<T>> {
    params.validate()?;
    let mut state = match params.initial {
        Some(s) => s,
        None => {
            let mut r = rng(params.seed);
            let mut draw = || T::lit(r.random_range(-0.1..0.1));
            HenonState {
                y1: draw(),
                y2: draw(),
                x1: draw(),
                x2: draw(),
            }
        }
    };
    let limit = T::lit(HENON_ESCAPE);
    let mut driver = Vec::with_capacity(params.n);
    let mut response = Vec::with_capacity(params.n);
    for step in 1..=params.transient + params.n {
        state = state.step(params.epsilon, params.b, params.form);
        let m = state.max_abs();
        if !(m <= limit) {
            return Err(Error::NumericalEscape {
                step,
                value: m.to_f64_lossy(),
                limit: HENON_ESCAPE,
            });
        }
        if step > params.transient {
            driver.push(state.y1);
            response.push(state.x1);
        }
    }
    Ok(HenonSeries { driver, response })
}

/// Like [`henon_coupled`], but an escaping realization is redrawn with the
/// next seed, up to `max_redraws` times. Returns the seed actually used.
pub fn henon_with_redraw<T: Scalar>(
    params: &HenonParams<T>,
    max_redraws: usize,
) -> Result<(HenonSeries<T>, u64)> {
    let mut p = params.clone();
    let mut attempt = 0;
    loop {
        match henon_coupled(&p) {
            Ok(s) => return Ok((s, p.seed)),
            Err(e @ Error::NumericalEscape { .. }) if attempt < max_redraws && p.initial.is_none() => {
                log::warn!("henon realization with seed {} escaped ({e}); redrawing", p.seed);
                p.seed = p.seed.wrapping_add(1);
                attempt += 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Parameters shared by the logistic and cubic maps.
#[derive(Debug, Clone, PartialEq)]
pub struct MapParams<T> {
    /// Logistic parameter.
    pub r: T,
    /// Cubic parameter.
    pub a: T,
    /// Initial condition; drawn from the seed when `None`.
    pub x0: Option<T>,
    pub n: usize,
    pub seed: u64,
    pub transient: usize,
}

impl<T: Scalar> MapParams<T> {
    pub fn new(n: usize, seed: u64) -> Self {
        MapParams {
            r: T::lit(4.0),
            a: T::lit(3.0),
            x0: None,
            n,
            seed,
            transient: 0,
        }
    }

    pub fn with_x0(mut self, x0: T) -> Self {
        self.x0 = Some(x0);
        self
    }
}

fn iterate<T: Scalar>(x0: T, n: usize, transient: usize, f: impl Fn(T) -> T) -> Result<Vec<T>> {
    let limit = T::lit(MAP_ESCAPE);
    let mut x = x0;
    let mut out = Vec::with_capacity(n);
    for step in 1..=transient + n {
        x = f(x);
        if !(x.abs() <= limit) {
            return Err(Error::NumericalEscape {
                step,
                value: x.to_f64_lossy(),
                limit: MAP_ESCAPE,
            });
        }
        if step > transient {
            out.push(x);
        }
    }
    Ok(out)
}

/// Logistic map `x' = r x (1 − x)`; returns `x_1 .. x_n` after the transient.
pub fn logistic<T: Scalar>(params: &MapParams<T>) -> Result<Vec<T>> {
    if params.n == 0 {
        return Err(Error::invalid("series length n must be > 0"));
    }
    let x0 = match params.x0 {
        Some(x) => x,
        None => T::lit(rng(params.seed).random_range(f64::EPSILON..1.0)),
    };
    if !(x0 > T::zero() && x0 < T::one()) {
        return Err(Error::invalid(format!("logistic x0={x0} outside (0, 1)")));
    }
    let r = params.r;
    iterate(x0, params.n, params.transient, |x| r * x * (T::one() - x))
}

/// Cubic map `x' = A x (1 − x²)`; returns `x_1 .. x_n` after the transient.
///
/// `x0 = ±1` is accepted and collapses onto the fixed point 0.
pub fn cubic<T: Scalar>(params: &MapParams<T>) -> Result<Vec<T>> {
    if params.n == 0 {
        return Err(Error::invalid("series length n must be > 0"));
    }
    let x0 = match params.x0 {
        Some(x) => x,
        None => {
            let mut r = rng(params.seed);
            loop {
                let v: f64 = r.random_range(-1.0..1.0);
                if v != 0.0 {
                    break T::lit(v);
                }
            }
        }
    };
    if !(x0.abs() <= T::one()) || x0 == T::zero() {
        return Err(Error::invalid(format!("cubic x0={x0} must be nonzero with |x0| <= 1")));
    }
    let a = params.a;
    iterate(x0, params.n, params.transient, |x| a * x * (T::one() - x * x))
}

/// I.i.d. standard normal draws.
pub fn white_noise<T: Scalar>(n: usize, seed: u64) -> Vec<T> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let z: f64 = r.sample(StandardNormal);
            T::lit(z)
        })
        .collect()
}
