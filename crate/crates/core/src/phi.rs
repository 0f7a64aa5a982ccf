//! Orlicz functions: convex, strictly increasing distortions of the ray
//! normalized so that `phi(0) = 0` and `phi(1) = 1`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative bisection tolerance for numeric inverses.
const INVERSE_TOL: f64 = 1e-12;
/// Slack allowed when checking convexity of sampled secant slopes.
const CONVEXITY_SLACK: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum PhiError {
    #[error("function is not convex on the validation grid")]
    NotConvex,
    #[error("function is not strictly increasing on the validation grid")]
    NotIncreasing,
    #[error("function does not satisfy phi(0) = 0 and phi(1) = 1")]
    NotNormalized,
    #[error("argument {0} is outside the domain [0, inf)")]
    NegativeArgument(f64),
}

/// One term of a weighted power mix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixTerm {
    pub w: f64,
    pub p: f64,
}

/// Declarative description of an Orlicz function, also the JSON wire format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PhiSpec {
    /// `t^p` with `p >= 1`.
    Power { p: f64 },
    /// `sum w_i t^{p_i}` with positive weights summing to one.
    Mix { terms: Vec<MixTerm> },
    /// Piecewise linear through the given breakpoints, extended past the
    /// last one with the final slope.
    Pwl { points: Vec<[f64; 2]> },
}

/// A validated Orlicz function.
#[derive(Clone, Debug, PartialEq)]
pub struct OrliczFunction {
    spec: PhiSpec,
    strictly_convex: bool,
}

impl OrliczFunction {
    /// Validates the spec on a sample grid and tags strict convexity.
    pub fn new(spec: PhiSpec) -> Result<Self, PhiError> {
        if eval_unchecked(&spec, 0.0) != 0.0 {
            return Err(PhiError::NotNormalized);
        }
        let at_one = eval_unchecked(&spec, 1.0);
        if !((at_one - 1.0).abs() <= 1e-12) {
            return Err(PhiError::NotNormalized);
        }
        if let PhiSpec::Pwl { points } = &spec {
            validate_pwl_shape(points)?;
        }

        let grid = validation_grid();
        let values: Vec<f64> = grid.iter().map(|&t| eval_unchecked(&spec, t)).collect();
        if !(values[0] > 0.0) {
            return Err(PhiError::NotIncreasing);
        }
        for pair in values.windows(2) {
            if !(pair[1] - pair[0] > 0.0) {
                return Err(PhiError::NotIncreasing);
            }
        }
        let slopes: Vec<f64> = grid
            .windows(2)
            .zip(values.windows(2))
            .map(|(t, v)| (v[1] - v[0]) / (t[1] - t[0]))
            .collect();
        let mut strictly_convex = true;
        for pair in slopes.windows(2) {
            let slack = CONVEXITY_SLACK * (1.0 + pair[0].abs() + pair[1].abs());
            let diff = pair[1] - pair[0];
            if !(diff >= -slack) {
                return Err(PhiError::NotConvex);
            }
            if !(diff > slack) {
                strictly_convex = false;
            }
        }

        Ok(Self {
            spec,
            strictly_convex,
        })
    }

    pub fn power(p: f64) -> Result<Self, PhiError> {
        Self::new(PhiSpec::Power { p })
    }

    /// The identity `t -> t`.
    pub fn identity() -> Self {
        Self::new(PhiSpec::Power { p: 1.0 }).expect("identity is a valid Orlicz function")
    }

    pub fn spec(&self) -> &PhiSpec {
        &self.spec
    }

    /// Whether sampled secant slopes increase strictly everywhere on the
    /// validation grid. Conservative for functions that are extremely flat
    /// near zero.
    pub fn strictly_convex(&self) -> bool {
        self.strictly_convex
    }

    /// Exact structural check for `phi = id`.
    pub fn is_identity(&self) -> bool {
        match &self.spec {
            PhiSpec::Power { p } => *p == 1.0,
            PhiSpec::Mix { terms } => terms.iter().all(|term| term.p == 1.0),
            PhiSpec::Pwl { points } => points
                .windows(2)
                .all(|w| (w[1][1] - w[0][1]) == (w[1][0] - w[0][0])),
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64, PhiError> {
        if !(t >= 0.0) {
            return Err(PhiError::NegativeArgument(t));
        }
        Ok(eval_unchecked(&self.spec, t))
    }

    /// Unique `t >= 0` with `phi(t) = y`, closed form where available and
    /// bisection to relative tolerance `1e-12` otherwise.
    pub fn inverse(&self, y: f64) -> Result<f64, PhiError> {
        if !(y >= 0.0) {
            return Err(PhiError::NegativeArgument(y));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        match &self.spec {
            PhiSpec::Power { p } => {
                if *p == 1.0 {
                    Ok(y)
                } else {
                    Ok(y.powf(1.0 / p))
                }
            }
            PhiSpec::Pwl { points } => Ok(invert_pwl(points, y)),
            PhiSpec::Mix { .. } => {
                // phi lies below the diagonal on [0, 1] and above it past 1,
                // so the root is bracketed by y and 1.
                let (mut lo, mut hi) = if y <= 1.0 { (y, 1.0) } else { (1.0, y) };
                for _ in 0..200 {
                    if hi - lo <= INVERSE_TOL * hi {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    if eval_unchecked(&self.spec, mid) < y {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        }
    }
}

fn eval_unchecked(spec: &PhiSpec, t: f64) -> f64 {
    match spec {
        PhiSpec::Power { p } => {
            if *p == 1.0 {
                t
            } else {
                t.powf(*p)
            }
        }
        PhiSpec::Mix { terms } => terms
            .iter()
            .map(|term| {
                if term.p == 1.0 {
                    term.w * t
                } else {
                    term.w * t.powf(term.p)
                }
            })
            .sum(),
        PhiSpec::Pwl { points } => eval_pwl(points, t),
    }
}

fn eval_pwl(points: &[[f64; 2]], t: f64) -> f64 {
    let n = points.len();
    if n < 2 || !points.iter().all(|p| p[0].is_finite() && p[1].is_finite()) {
        return f64::NAN;
    }
    let segment = |a: [f64; 2], b: [f64; 2], t: f64| a[1] + (b[1] - a[1]) / (b[0] - a[0]) * (t - a[0]);
    if t >= points[n - 1][0] {
        return segment(points[n - 2], points[n - 1], t);
    }
    for w in points.windows(2) {
        if t >= w[0][0] && t <= w[1][0] {
            if t == w[0][0] {
                return w[0][1];
            }
            return segment(w[0], w[1], t);
        }
    }
    f64::NAN
}

fn invert_pwl(points: &[[f64; 2]], y: f64) -> f64 {
    let n = points.len();
    let segment = |a: [f64; 2], b: [f64; 2], y: f64| a[0] + (b[0] - a[0]) / (b[1] - a[1]) * (y - a[1]);
    if y >= points[n - 1][1] {
        return segment(points[n - 2], points[n - 1], y);
    }
    for w in points.windows(2) {
        if y >= w[0][1] && y <= w[1][1] {
            if y == w[0][1] {
                return w[0][0];
            }
            return segment(w[0], w[1], y);
        }
    }
    f64::NAN
}

fn validate_pwl_shape(points: &[[f64; 2]]) -> Result<(), PhiError> {
    if points.len() < 2 {
        return Err(PhiError::NotIncreasing);
    }
    if points[0] != [0.0, 0.0] {
        return Err(PhiError::NotNormalized);
    }
    for w in points.windows(2) {
        if !(w[1][0] > w[0][0]) || !(w[1][1] > w[0][1]) {
            return Err(PhiError::NotIncreasing);
        }
    }
    Ok(())
}

/// 1024 sample points: 512 geometric on [1e-6, 1] and 512 linear on (1, 16].
fn validation_grid() -> Vec<f64> {
    let mut grid = Vec::with_capacity(1024);
    let ratio = 1e6_f64.powf(1.0 / 511.0);
    for i in 0..512 {
        grid.push(1e-6 * ratio.powi(i));
    }
    grid[511] = 1.0;
    for j in 0..512 {
        grid.push(1.0 + 15.0 * (j + 1) as f64 / 512.0);
    }
    grid
}
