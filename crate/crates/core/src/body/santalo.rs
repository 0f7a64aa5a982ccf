//! Santaló point search: the interior translation that minimizes the volume
//! of the polar body.

use super::sandwich::{build_sandwich, polar, PolytopeSandwich};
use super::{BodyError, SupportOracle};
use nalgebra::DVector;

const STEP_FLOOR: f64 = 1e-6;
const REL_IMPROVEMENT_FLOOR: f64 = 1e-8;
const MAX_EVALUATIONS: usize = 100_000;

/// Outcome of the polar-volume minimization.
#[derive(Clone, Debug)]
pub struct SantaloResult {
    /// Minimizing center.
    pub point: DVector<f64>,
    /// Polar sandwich taken about that center.
    pub polar: PolytopeSandwich,
    /// Number of polar-volume evaluations spent.
    pub evaluations: usize,
}

/// Builds a sandwich at the given budget and minimizes the polar volume over
/// interior centers.
pub fn santalo_point<T: SupportOracle + ?Sized>(
    oracle: &T,
    budget: usize,
) -> Result<SantaloResult, BodyError> {
    let s = build_sandwich(oracle, budget)?;
    santalo_from_sandwich(&s)
}

/// Coordinate descent on `z -> vol((K - z)^*)` starting from the inner
/// centroid. The objective is convex in `z`, so axis moves with a halving
/// step settle on the minimizer.
pub fn santalo_from_sandwich(s: &PolytopeSandwich) -> Result<SantaloResult, BodyError> {
    let dim = s.dim();
    let mut evaluations = 0usize;
    let objective = |z: &DVector<f64>, evaluations: &mut usize| -> f64 {
        *evaluations += 1;
        match polar(s, z) {
            Ok(p) => p.volume_bounds().mid(),
            Err(_) => f64::INFINITY,
        }
    };

    let mut point = s.centroid();
    let mut best = objective(&point, &mut evaluations);
    if !best.is_finite() {
        return Err(BodyError::CenterNotInterior);
    }

    let mut step = 0.1 * s.mean_width();
    let mut last_relative_drop = f64::INFINITY;
    while evaluations < MAX_EVALUATIONS {
        let mut improved = false;
        for axis in 0..dim {
            for sign in [1.0_f64, -1.0] {
                let mut candidate = point.clone();
                candidate[axis] += sign * step;
                let value = objective(&candidate, &mut evaluations);
                if value < best {
                    last_relative_drop = (best - value) / best;
                    best = value;
                    point = candidate;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
            last_relative_drop = 0.0;
        }
        if step < STEP_FLOOR && last_relative_drop < REL_IMPROVEMENT_FLOOR {
            break;
        }
    }

    let polar_body = polar(s, &point)?;
    Ok(SantaloResult {
        point,
        polar: polar_body,
        evaluations,
    })
}
