//! Two-sided polytope approximation of a support-oracle body, and the polar
//! construction that swaps the two sides.

use super::hull::Polytope;
use super::{direction_set, BodyError, SupportOracle};
use nalgebra::DVector;

/// Permitted outward violation of the sandwich containment, relative to the
/// body scale.
const CONTAINMENT_SLACK: f64 = 1e-9;

/// Volume bracket from an inscribed and a circumscribed polytope.
#[derive(Clone, Copy, Debug)]
pub struct VolumeBounds {
    pub lower: f64,
    pub upper: f64,
}

impl VolumeBounds {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn halfwidth(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }
}

/// An inner vertex hull and an outer halfspace intersection enclosing the
/// same convex body.
#[derive(Clone, Debug)]
pub struct PolytopeSandwich {
    dim: usize,
    inner: Polytope,
    outer: Polytope,
    halfspaces: Vec<(DVector<f64>, f64)>,
    mean_width: f64,
    max_violation: f64,
}

impl PolytopeSandwich {
    /// Builds the pair from inner candidate points and outer halfspaces.
    /// Candidate points are nudged inside the halfspace intersection first,
    /// so the containment invariant survives finite-difference noise in
    /// support points.
    pub(crate) fn assemble(
        dim: usize,
        mut inner_points: Vec<DVector<f64>>,
        halfspaces_raw: Vec<(DVector<f64>, f64)>,
    ) -> Result<Self, BodyError> {
        if dim != 2 && dim != 3 {
            return Err(BodyError::UnsupportedDimension(dim));
        }
        let mut halfspaces = Vec::with_capacity(halfspaces_raw.len());
        for (a, b) in halfspaces_raw {
            let len = a.norm();
            if !(len > 0.0) || !b.is_finite() {
                return Err(BodyError::DegenerateBody);
            }
            halfspaces.push((a / len, b / len));
        }
        let scale = halfspaces
            .iter()
            .map(|(_, b)| b.abs())
            .fold(1e-300_f64, f64::max);
        for x in &mut inner_points {
            for _ in 0..4 {
                let mut worst = 0.0;
                for (a, b) in &halfspaces {
                    let d = a.dot(x) - b;
                    if d > 0.0 {
                        *x -= a * d;
                        worst = f64::max(worst, d);
                    }
                }
                if worst == 0.0 {
                    break;
                }
            }
        }
        let inner = Polytope::from_points(dim, &inner_points)?;
        let centroid = inner.centroid();
        let outer = Polytope::from_halfspaces(dim, &halfspaces, &centroid)?;
        let mut max_violation = 0.0_f64;
        for x in inner.vertices() {
            for (a, b) in &halfspaces {
                max_violation = max_violation.max(a.dot(&x) - b);
            }
        }
        if max_violation > CONTAINMENT_SLACK * scale {
            return Err(BodyError::DegenerateBody);
        }
        let mean_width = 2.0
            * halfspaces
                .iter()
                .map(|(a, b)| (b - a.dot(&centroid)).max(0.0))
                .sum::<f64>()
            / halfspaces.len() as f64;
        Ok(Self {
            dim,
            inner,
            outer,
            halfspaces,
            mean_width,
            max_violation,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn volume_bounds(&self) -> VolumeBounds {
        let vi = self.inner.volume();
        let vo = self.outer.volume();
        VolumeBounds {
            lower: vi.min(vo),
            upper: vo.max(vi),
        }
    }

    /// Centroid of the inner hull.
    pub fn centroid(&self) -> DVector<f64> {
        self.inner.centroid()
    }

    pub fn inner_vertices(&self) -> Vec<DVector<f64>> {
        self.inner.vertices()
    }

    pub fn outer_vertices(&self) -> Vec<DVector<f64>> {
        self.outer.vertices()
    }

    /// Outer constraints with unit normals.
    pub fn outer_halfspaces(&self) -> &[(DVector<f64>, f64)] {
        &self.halfspaces
    }

    /// Average sampled width; the scale used for interiority margins.
    pub fn mean_width(&self) -> f64 {
        self.mean_width
    }

    /// Largest signed distance of an inner vertex beyond an outer halfspace.
    pub fn max_containment_violation(&self) -> f64 {
        self.max_violation
    }

    pub fn contains_with_margin(&self, x: &DVector<f64>, margin: f64) -> bool {
        self.inner.contains_with_margin(x, margin)
    }
}

/// Samples the oracle over a deterministic direction set and returns the
/// polytope sandwich at that budget.
pub fn build_sandwich<T: SupportOracle + ?Sized>(
    oracle: &T,
    budget: usize,
) -> Result<PolytopeSandwich, BodyError> {
    let dim = oracle.dim();
    if dim != 2 && dim != 3 {
        return Err(BodyError::UnsupportedDimension(dim));
    }
    let dirs = direction_set(dim, budget);
    let mut halfspaces = Vec::with_capacity(dirs.len());
    let mut points = Vec::with_capacity(dirs.len());
    let mut flat_cone = false;
    let mut min_support = f64::INFINITY;
    for u in &dirs {
        let h = oracle.support(u);
        if !h.is_finite() {
            return Err(BodyError::DegenerateBody);
        }
        min_support = min_support.min(h);
        halfspaces.push((u.clone(), h));
        match oracle.support_point(u) {
            Ok(p) => points.push(p),
            Err(BodyError::ZeroSupport) => flat_cone = true,
            Err(e) => return Err(e),
        }
    }
    let scale = halfspaces
        .iter()
        .map(|(_, b)| b.abs())
        .fold(0.0_f64, f64::max);
    // A flat cone with no negative support values means the origin is itself
    // a boundary point of the body.
    if flat_cone && min_support >= -1e-12 * scale.max(1.0) {
        points.push(DVector::zeros(dim));
    }
    PolytopeSandwich::assemble(dim, points, halfspaces)
}

/// Sandwich of the polar body `(K - center)^*`: dual points of the outer
/// halfspaces become inner vertices, inner vertices become outer halfspaces.
pub fn polar(
    s: &PolytopeSandwich,
    center: &DVector<f64>,
) -> Result<PolytopeSandwich, BodyError> {
    let margin = 1e-8 * s.mean_width();
    if !s.contains_with_margin(center, margin) {
        return Err(BodyError::CenterNotInterior);
    }
    let mut polar_points = Vec::with_capacity(s.outer_halfspaces().len());
    for (a, b) in s.outer_halfspaces() {
        let shifted = b - a.dot(center);
        if shifted <= 0.0 {
            return Err(BodyError::CenterNotInterior);
        }
        polar_points.push(a / shifted);
    }
    let polar_halfspaces = s
        .inner_vertices()
        .into_iter()
        .map(|x| (x - center, 1.0))
        .collect();
    PolytopeSandwich::assemble(s.dim(), polar_points, polar_halfspaces)
}
