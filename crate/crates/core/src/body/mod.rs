//! Convex bodies presented by support-function oracles, bracketed between
//! an inscribed vertex hull and a circumscribed halfspace intersection.

use nalgebra::DVector;
use thiserror::Error;

pub(crate) mod hull;
mod sandwich;
mod santalo;

pub use sandwich::{build_sandwich, polar, PolytopeSandwich, VolumeBounds};
pub use santalo::{santalo_from_sandwich, santalo_point, SantaloResult};

/// Finite-difference step for support-point recovery on the unit sphere.
const FD_STEP: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum BodyError {
    #[error("degenerate body: inner hull is rank-deficient or the outer region is unbounded")]
    DegenerateBody,
    #[error("polar center is not strictly interior to the inner hull")]
    CenterNotInterior,
    #[error("support is zero in this direction; the body is flat at the origin")]
    ZeroSupport,
    #[error("bodies must live in dimension 2 or 3, got {0}")]
    UnsupportedDimension(usize),
}

/// A convex body described by its support function.
pub trait SupportOracle: Sync {
    fn dim(&self) -> usize;

    /// Support function of the body, evaluated on any nonzero vector via the
    /// 1-homogeneous extension.
    fn support(&self, u: &DVector<f64>) -> f64;

    /// A boundary point attaining the support value in direction `u`
    /// (expected unit). At non-smooth directions this lands somewhere on the
    /// supporting face, which suffices for inner hulls.
    fn support_point(&self, u: &DVector<f64>) -> Result<DVector<f64>, BodyError> {
        support_point_fd(self, u)
    }
}

/// A support oracle built from a closure.
pub struct FnOracle<F: Fn(&DVector<f64>) -> f64 + Sync> {
    pub dim: usize,
    pub h: F,
}

impl<F: Fn(&DVector<f64>) -> f64 + Sync> SupportOracle for FnOracle<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn support(&self, u: &DVector<f64>) -> f64 {
        (self.h)(u)
    }
}

/// Central-difference gradient of the 1-homogeneous extension of the support
/// function, projected onto the supporting hyperplane `<x, u> = h(u)`.
pub fn support_point_fd<T: SupportOracle + ?Sized>(
    oracle: &T,
    u: &DVector<f64>,
) -> Result<DVector<f64>, BodyError> {
    let h = oracle.support(u);
    if h == 0.0 {
        return Err(BodyError::ZeroSupport);
    }
    let n = u.len();
    let mut gradient = DVector::zeros(n);
    let mut probe = u.clone();
    for i in 0..n {
        probe[i] = u[i] + FD_STEP;
        let above = oracle.support(&probe);
        probe[i] = u[i] - FD_STEP;
        let below = oracle.support(&probe);
        probe[i] = u[i];
        gradient[i] = (above - below) / (2.0 * FD_STEP);
    }
    let correction = (h - gradient.dot(u)) / u.norm_squared();
    Ok(gradient + u * correction)
}

/// Deterministic, approximately uniform unit directions: evenly spaced
/// angles in the plane and a Fibonacci lattice on the sphere.
pub fn direction_set(dim: usize, count: usize) -> Vec<DVector<f64>> {
    let count = count.max(4);
    match dim {
        2 => (0..count)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                DVector::from_row_slice(&[theta.cos(), theta.sin()])
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let theta = golden * k as f64;
                    DVector::from_row_slice(&[r * theta.cos(), r * theta.sin(), z])
                })
                .collect()
        }
        _ => panic!("direction sets exist only in dimension 2 or 3"),
    }
}

/// Outcome of a sampled membership test.
#[derive(Clone, Debug)]
pub struct Containment {
    pub inside: bool,
    /// A separating direction when the point was rejected.
    pub certificate: Option<DVector<f64>>,
}

/// One-sided membership test: rejects with a certificate direction when some
/// sampled halfspace excludes `x`, accepts otherwise. Accuracy grows with
/// the direction budget.
pub fn contains<T: SupportOracle + ?Sized>(
    oracle: &T,
    x: &DVector<f64>,
    budget: usize,
) -> Result<Containment, BodyError> {
    let dim = oracle.dim();
    if dim != 2 && dim != 3 {
        return Err(BodyError::UnsupportedDimension(dim));
    }
    for u in direction_set(dim, budget) {
        let h = oracle.support(&u);
        if x.dot(&u) > h * (1.0 + 1e-9) {
            return Ok(Containment {
                inside: false,
                certificate: Some(u),
            });
        }
    }
    Ok(Containment {
        inside: true,
        certificate: None,
    })
}
