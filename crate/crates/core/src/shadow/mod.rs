//! Shadow systems of generator multisets: the one-parameter deformation that
//! rotates a pivot out of the remaining generators while preserving the
//! zonotope volume, plus the graph-function and convexity test apparatus
//! built on top of it.

mod nelder_mead;

use crate::body::SupportOracle;
use crate::multisets::{rank_of_rows, VectorMultiset};
use crate::norm::orlicz_norm;
use crate::phi::OrliczFunction;
use crate::zonotope::OrliczZonotope;
use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Optimizer box for the graph-function infima; escaping it is the signal
/// that the infimum diverges, i.e. `x` lies outside the projection.
const GRAPH_BOX: f64 = 1e3;
const GRAPH_TOL: f64 = 1e-8;
/// Entries of a deformed multiset below this relative size count as the
/// zero vector and are dropped.
const ZERO_ROW_REL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum ShadowError {
    #[error("pivot index {0} is out of range for the expanded multiset")]
    PivotOutOfRange(usize),
    #[error("removing the pivot leaves a non-spanning multiset")]
    PivotRemovalNotSpanning,
    #[error("the speed denominator vanishes")]
    ZeroDenominator,
    #[error("t = {t} lies outside the shadow interval [{lo}, {hi}]")]
    OutOfInterval { t: f64, lo: f64, hi: f64 },
    #[error("x lies outside the projection of the body onto the moving hyperplane")]
    XOutsideProjection,
    #[error("curve grids must be strictly increasing with at least 3 points")]
    NonMonotoneGrid,
}

/// Speed of the pivot in the orthogonalizing shadow system: the ratio of the
/// total determinant mass of the non-pivot n-subsets to the determinant mass
/// of the pivot paired with non-pivot (n-1)-subsets.
pub fn speed_a(m: &VectorMultiset, pivot: usize) -> Result<f64, ShadowError> {
    let dim = m.dim();
    let rows = m.expanded();
    if pivot >= rows.len() {
        return Err(ShadowError::PivotOutOfRange(pivot));
    }
    let others: Vec<&DVector<f64>> = rows
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != pivot)
        .map(|(_, v)| v)
        .collect();
    if rank_of_rows(&others, dim) < dim {
        return Err(ShadowError::PivotRemovalNotSpanning);
    }
    let numerator: f64 = others
        .iter()
        .combinations(dim)
        .map(|subset| abs_det(&subset.iter().map(|v| (**v).clone()).collect::<Vec<_>>()))
        .sum();
    let denominator: f64 = others
        .iter()
        .combinations(dim - 1)
        .map(|subset| {
            let mut block = vec![rows[pivot].clone()];
            block.extend(subset.iter().map(|v| (**v).clone()));
            abs_det(&block)
        })
        .sum();
    if denominator == 0.0 {
        return Err(ShadowError::ZeroDenominator);
    }
    Ok(numerator / denominator)
}

fn abs_det(block: &[DVector<f64>]) -> f64 {
    let dim = block[0].len();
    let mat = DMatrix::from_fn(dim, dim, |r, c| block[r][c]);
    mat.determinant().abs()
}

/// The orthogonalizing deformation `w_i(t) = u_i + t beta_i v` of a
/// multiset, defined on `[-1/a, 1]`. At `t = 1` the pivot is orthogonal to
/// every other entry; at `t = -1/a` it vanishes.
#[derive(Clone, Debug)]
pub struct ShadowSystem {
    dim: usize,
    base: Vec<DVector<f64>>,
    pivot: usize,
    /// Unit direction along the pivot.
    v: DVector<f64>,
    speeds: Vec<f64>,
    a: f64,
}

/// Builds the shadow system that gradually removes the pivot's direction
/// from the other generators while stretching the pivot to compensate.
pub fn orthogonalize(m: &VectorMultiset, pivot: usize) -> Result<ShadowSystem, ShadowError> {
    let a = speed_a(m, pivot)?;
    let base = m.expanded();
    let v1 = base[pivot].clone();
    let v1_len = v1.norm();
    let v = &v1 / v1_len;
    let speeds: Vec<f64> = base
        .iter()
        .enumerate()
        .map(|(i, u)| {
            if i == pivot {
                a * v1_len
            } else {
                -v.dot(u)
            }
        })
        .collect();
    Ok(ShadowSystem {
        dim: m.dim(),
        base,
        pivot,
        v,
        speeds,
        a,
    })
}

impl ShadowSystem {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Unit direction all entries move along.
    pub fn direction(&self) -> &DVector<f64> {
        &self.v
    }

    pub fn speed(&self) -> f64 {
        self.a
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    /// Deformation interval `[-1/a, 1]`.
    pub fn interval(&self) -> (f64, f64) {
        (-1.0 / self.a, 1.0)
    }

    /// Equispaced grid over the deformation interval.
    pub fn grid(&self, points: usize) -> Vec<f64> {
        let (lo, hi) = self.interval();
        let points = points.max(2);
        (0..points)
            .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
            .collect()
    }

    fn check_interval(&self, t: f64) -> Result<(), ShadowError> {
        let (lo, hi) = self.interval();
        let slack = 1e-12 * (hi - lo);
        if t < lo - slack || t > hi + slack {
            return Err(ShadowError::OutOfInterval { t, lo, hi });
        }
        Ok(())
    }

    /// All deformed entries `w_i(t)`, including any that have shrunk to the
    /// zero vector.
    pub fn raw_at(&self, t: f64) -> Result<Vec<DVector<f64>>, ShadowError> {
        self.check_interval(t)?;
        Ok(self
            .base
            .iter()
            .zip(&self.speeds)
            .map(|(u, beta)| u + &self.v * (t * beta))
            .collect())
    }

    /// The deformed multiset with zero entries dropped.
    pub fn at(&self, t: f64) -> Result<VectorMultiset, ShadowError> {
        let rows = self.raw_at(t)?;
        let scale = rows.iter().map(|r| r.norm()).fold(0.0_f64, f64::max);
        let kept: Vec<DVector<f64>> = rows
            .into_iter()
            .filter(|r| r.norm() > ZERO_ROW_REL * scale)
            .collect();
        VectorMultiset::new(self.dim, kept, None)
            .map_err(|_| ShadowError::PivotRemovalNotSpanning)
    }

    /// The Orlicz zonotope of the deformed multiset.
    pub fn zonotope_at(
        &self,
        t: f64,
        phi: &OrliczFunction,
    ) -> Result<OrliczZonotope, ShadowError> {
        Ok(OrliczZonotope::new(self.at(t)?, phi.clone()))
    }
}

/// Upper and lower graph functions of the body over the hyperplane normal to
/// `v`, at base point `x` in that hyperplane: the body is the region between
/// the two graphs. Both are computed as infima over the hyperplane via
/// derivative-free minimization.
pub fn graph_functions<T: SupportOracle + ?Sized>(
    oracle: &T,
    v: &DVector<f64>,
    x: &DVector<f64>,
) -> Result<(f64, f64), ShadowError> {
    let dim = oracle.dim();
    assert_eq!(v.len(), dim);
    assert_eq!(x.len(), dim);
    let v = v / v.norm();
    assert!(
        v.dot(x).abs() <= 1e-10 * (1.0 + x.norm()),
        "x must lie in the hyperplane orthogonal to v"
    );
    let basis = hyperplane_basis(&v);

    // The infima diverge exactly when x leaves the projection of the body:
    // reject via sampled support inequalities in the hyperplane first.
    let probes: usize = if dim == 2 { 2 } else { 256 };
    for k in 0..probes {
        let d = if dim == 2 {
            if k == 0 {
                basis[0].clone()
            } else {
                -&basis[0]
            }
        } else {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / probes as f64;
            &basis[0] * theta.cos() + &basis[1] * theta.sin()
        };
        if x.dot(&d) > oracle.support(&d) * (1.0 + 1e-9) + 1e-12 {
            return Err(ShadowError::XOutsideProjection);
        }
    }

    let x_coords: Vec<f64> = basis.iter().map(|b| x.dot(b)).collect();
    let embed = |c: &[f64]| -> DVector<f64> {
        let mut w = DVector::zeros(dim);
        for (cj, b) in c.iter().zip(&basis) {
            w += b * *cj;
        }
        w
    };
    let boxed = |c: &[f64], value: f64| -> f64 {
        if c.iter().any(|cj| cj.abs() > GRAPH_BOX) {
            f64::INFINITY
        } else {
            value
        }
    };
    let upper_objective = |c: &[f64]| -> f64 {
        let w = embed(c);
        let inner: f64 = c.iter().zip(&x_coords).map(|(cj, xj)| cj * xj).sum();
        boxed(c, oracle.support(&(&v + &w)) - inner)
    };
    let lower_objective = |c: &[f64]| -> f64 {
        let w = embed(c);
        let inner: f64 = c.iter().zip(&x_coords).map(|(cj, xj)| cj * xj).sum();
        boxed(c, oracle.support(&(-&v - &w)) + inner)
    };

    let upper = multistart_infimum(&upper_objective, &x_coords)?;
    let lower = -multistart_infimum(&lower_objective, &x_coords)?;
    Ok((upper, lower))
}

fn multistart_infimum<F: Fn(&[f64]) -> f64>(
    f: &F,
    x_coords: &[f64],
) -> Result<f64, ShadowError> {
    let k = x_coords.len();
    let mut starts: Vec<Vec<f64>> = vec![vec![0.0; k]];
    if x_coords.iter().any(|c| *c != 0.0) {
        starts.push(x_coords.iter().map(|c| 2.0 * c).collect());
        starts.push(x_coords.iter().map(|c| -2.0 * c).collect());
    }
    let mut best = f64::INFINITY;
    let mut best_point = vec![0.0; k];
    for start in starts {
        let step = 0.5 + 0.1 * start.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        let (p, value) = nelder_mead::minimize(f, &start, step, GRAPH_TOL, 4000);
        if value < best {
            best = value;
            best_point = p;
        }
    }
    if !best.is_finite() || best_point.iter().any(|c| c.abs() >= 0.999 * GRAPH_BOX) {
        return Err(ShadowError::XOutsideProjection);
    }
    Ok(best)
}

/// Orthonormal basis of the hyperplane orthogonal to the unit vector `v`.
fn hyperplane_basis(v: &DVector<f64>) -> Vec<DVector<f64>> {
    let dim = v.len();
    match dim {
        2 => vec![DVector::from_row_slice(&[-v[1], v[0]])],
        3 => {
            let seed_axis = (0..3)
                .min_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs()))
                .unwrap();
            let mut e = DVector::zeros(3);
            e[seed_axis] = 1.0;
            let mut b1 = &e - v * v.dot(&e);
            b1 /= b1.norm();
            let b2 = DVector::from_row_slice(&[
                v[1] * b1[2] - v[2] * b1[1],
                v[2] * b1[0] - v[0] * b1[2],
                v[0] * b1[1] - v[1] * b1[0],
            ]);
            vec![b1, b2]
        }
        _ => panic!("graph functions are implemented in dimension 2 or 3"),
    }
}

/// Result of sampling the projection-invariance identity: support values of
/// the deformed bodies in hyperplane directions should not depend on t.
#[derive(Clone, Debug)]
pub struct ProjectionReport {
    pub samples: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub ok: bool,
}

/// Samples support values in the hyperplane orthogonal to the moving
/// direction across t-pairs and reports the worst disagreement.
pub fn check_projection_invariance(
    system: &ShadowSystem,
    phi: &OrliczFunction,
    samples: usize,
) -> ProjectionReport {
    let tolerance = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11CE);
    let basis = hyperplane_basis(system.direction());
    let ts = system.grid(5);
    let mut max_deviation = 0.0_f64;
    let mut counted = 0usize;
    for _ in 0..samples {
        let mut x = DVector::zeros(system.dim());
        for b in &basis {
            let c: f64 = rng.sample::<f64, _>(StandardNormal);
            x += b * c;
        }
        if x.norm() == 0.0 {
            continue;
        }
        let radius = 0.1 + 2.9 * rng.gen::<f64>();
        x *= radius / x.norm();
        let values: Vec<f64> = ts
            .iter()
            .map(|&t| {
                let z = system.zonotope_at(t, phi).expect("grid point in interval");
                z.support(&x)
            })
            .collect();
        for pair in values.iter().combinations(2) {
            max_deviation = max_deviation.max((pair[0] - pair[1]).abs());
            counted += 1;
        }
    }
    ProjectionReport {
        samples: counted,
        max_deviation,
        tolerance,
        ok: max_deviation <= tolerance,
    }
}

/// Result of sampling the Lipschitz bound on t-slices.
#[derive(Clone, Debug)]
pub struct LipschitzReport {
    pub samples: usize,
    /// Largest value of |h_t1(x) - h_t2(x)| minus the Lipschitz bound.
    pub max_excess: f64,
    pub tolerance: f64,
    pub ok: bool,
}

/// Samples random directions and t-pairs and checks the support-function
/// Lipschitz estimate with the speed-weighted Orlicz norm as the constant.
pub fn check_lipschitz(
    system: &ShadowSystem,
    phi: &OrliczFunction,
    samples: usize,
) -> LipschitzReport {
    let tolerance = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(0xB0B);
    let (lo, hi) = system.interval();
    let mut max_excess = f64::NEG_INFINITY;
    for _ in 0..samples {
        let mut x = DVector::zeros(system.dim());
        for c in x.iter_mut() {
            *c = rng.sample::<f64, _>(StandardNormal);
        }
        if x.norm() == 0.0 {
            continue;
        }
        x *= (0.2 + 2.8 * rng.gen::<f64>()) / x.norm();
        let t1 = lo + (hi - lo) * rng.gen::<f64>();
        let t2 = lo + (hi - lo) * rng.gen::<f64>();
        let h1 = system
            .zonotope_at(t1, phi)
            .expect("sampled t in interval")
            .support(&x);
        let h2 = system
            .zonotope_at(t2, phi)
            .expect("sampled t in interval")
            .support(&x);
        let along = system.direction().dot(&x);
        let weights: Vec<f64> = system
            .speeds()
            .iter()
            .map(|beta| (beta * along).abs())
            .collect();
        let constant = orlicz_norm(&weights, phi).expect("absolute values are nonnegative");
        let bound = constant * (t1 - t2).abs();
        max_excess = max_excess.max((h1 - h2).abs() - bound);
    }
    LipschitzReport {
        samples,
        max_excess,
        tolerance,
        ok: max_excess <= tolerance,
    }
}

/// One sampled point of a t-curve with its volume error bar.
#[derive(Clone, Copy, Debug)]
pub struct CurvePoint {
    pub t: f64,
    pub value: f64,
    pub halfwidth: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveMode {
    Direct,
    /// Tests convexity of 1/y instead of y.
    Reciprocal,
}

/// One midpoint test on an equispaced triple.
#[derive(Clone, Debug)]
pub struct TripleCheck {
    /// Index of the middle point.
    pub index: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
}

#[derive(Clone, Debug)]
pub struct ConvexityReport {
    pub mode: CurveMode,
    pub triples: Vec<TripleCheck>,
    /// Largest lhs - rhs - slack over the triples (negative when clean).
    pub max_violation: f64,
    pub ok: bool,
}

/// Discrete midpoint convexity on equispaced triples, with slack propagated
/// from the per-point error bars.
pub fn curve_convexity(
    points: &[CurvePoint],
    mode: CurveMode,
) -> Result<ConvexityReport, ShadowError> {
    if points.len() < 3 {
        return Err(ShadowError::NonMonotoneGrid);
    }
    if points.windows(2).any(|w| w[1].t <= w[0].t) {
        return Err(ShadowError::NonMonotoneGrid);
    }
    let span = points[points.len() - 1].t - points[0].t;
    let transformed: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|p| match mode {
            CurveMode::Direct => (p.t, p.value, p.halfwidth),
            CurveMode::Reciprocal => {
                if p.value - p.halfwidth <= 0.0 {
                    (p.t, if p.value > 0.0 { 1.0 / p.value } else { f64::INFINITY }, f64::INFINITY)
                } else {
                    let hi = 1.0 / (p.value - p.halfwidth);
                    let lo = 1.0 / (p.value + p.halfwidth);
                    (p.t, 0.5 * (lo + hi), 0.5 * (hi - lo))
                }
            }
        })
        .collect();
    let value_scale = transformed
        .iter()
        .map(|(_, y, _)| y.abs())
        .filter(|y| y.is_finite())
        .fold(0.0_f64, f64::max);
    let mut triples = Vec::new();
    let mut max_violation = f64::NEG_INFINITY;
    for i in 0..transformed.len().saturating_sub(2) {
        let (t0, y0, h0) = transformed[i];
        let (t1, y1, h1) = transformed[i + 1];
        let (t2, y2, h2) = transformed[i + 2];
        if ((t2 - t1) - (t1 - t0)).abs() > 1e-9 * span {
            continue;
        }
        let lhs = y1;
        let rhs = 0.5 * (y0 + y2);
        let slack = h1 + 0.5 * (h0 + h2) + 1e-12 * (1.0 + value_scale);
        let satisfied = lhs <= rhs + slack;
        max_violation = max_violation.max(lhs - rhs - slack);
        triples.push(TripleCheck {
            index: i + 1,
            lhs,
            rhs,
            slack,
            satisfied,
        });
    }
    let ok = triples.iter().all(|t| t.satisfied);
    Ok(ConvexityReport {
        mode,
        triples,
        max_violation,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zonotope::l1_volume;
    use approx::assert_relative_eq;

    fn dv(coords: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(coords)
    }

    fn triple() -> VectorMultiset {
        VectorMultiset::from_rows(2, &[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn speed_of_the_triple_is_one_half() {
        assert_eq!(speed_a(&triple(), 0).unwrap(), 0.5);
    }

    #[test]
    fn speed_errors() {
        let basis = VectorMultiset::canonical_basis(2);
        assert_eq!(
            speed_a(&basis, 0).unwrap_err(),
            ShadowError::PivotRemovalNotSpanning
        );
        assert_eq!(
            speed_a(&triple(), 7).unwrap_err(),
            ShadowError::PivotOutOfRange(7)
        );
    }

    #[test]
    fn deformation_endpoints_match_hand_values() {
        let s = orthogonalize(&triple(), 0).unwrap();
        assert_eq!(s.interval(), (-2.0, 1.0));

        // t = 0 returns the base multiset.
        let at0 = s.at(0.0).unwrap();
        assert_eq!(at0.expanded(), triple().expanded());

        // t = 1: pivot stretches to 1.5 e1, both others collapse onto e2.
        let at1 = s.at(1.0).unwrap();
        let rows = at1.expanded();
        assert_eq!(rows.len(), 3);
        assert_relative_eq!(rows[0][0], 1.5, epsilon = 1e-12);
        assert_relative_eq!(rows[0][1], 0.0, epsilon = 1e-12);
        for r in &rows[1..] {
            assert_relative_eq!(r[0], 0.0, epsilon = 1e-12);
            assert_relative_eq!(r[1], 1.0, epsilon = 1e-12);
        }
        // The stretched pivot is orthogonal to the remainder.
        for r in &rows[1..] {
            assert!(rows[0].dot(r).abs() <= 1e-12);
        }

        // t = -1/a: pivot vanishes and is dropped; e1 + e2 picks up 2 e1.
        let at_lo = s.at(-2.0).unwrap();
        let rows = at_lo.expanded();
        assert_eq!(rows.len(), 2);
        assert_relative_eq!(rows[0][0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(rows[0][1], 1.0, epsilon = 1e-12);
        assert_relative_eq!(rows[1][0], 3.0, epsilon = 1e-12);
        assert_relative_eq!(rows[1][1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn volume_is_preserved_along_the_deformation() {
        let s = orthogonalize(&triple(), 0).unwrap();
        for t in s.grid(9) {
            let vol = l1_volume(&s.at(t).unwrap());
            assert!(vol.exact);
            assert!((vol.value - 3.0).abs() <= 1e-9, "t = {t}, vol = {}", vol.value);
        }
    }

    #[test]
    fn volume_preservation_holds_for_the_augmented_orthogonal_set() {
        // The basis plus a reversed, scaled copy of e1; this exercises the
        // denominator convention in the speed formula, which is the only
        // reading that keeps the volume constant.
        let m = VectorMultiset::from_rows(
            2,
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![-0.7, 0.0]],
        )
        .unwrap();
        let s = orthogonalize(&m, 0).unwrap();
        let reference = l1_volume(&m).value;
        for t in s.grid(9) {
            let vol = l1_volume(&s.at(t).unwrap());
            assert!(
                (vol.value - reference).abs() <= 1e-9,
                "t = {t}, vol = {}",
                vol.value
            );
        }
    }

    #[test]
    fn out_of_interval_is_rejected() {
        let s = orthogonalize(&triple(), 0).unwrap();
        assert!(matches!(
            s.at(1.5).unwrap_err(),
            ShadowError::OutOfInterval { .. }
        ));
        assert!(matches!(
            s.at(-2.5).unwrap_err(),
            ShadowError::OutOfInterval { .. }
        ));
    }

    #[test]
    fn graph_functions_on_the_unit_square() {
        let z = OrliczZonotope::new(
            VectorMultiset::canonical_basis(2),
            OrliczFunction::identity(),
        );
        let v = dv(&[0.0, 1.0]);
        let (upper, lower) = graph_functions(&z, &v, &dv(&[0.5, 0.0])).unwrap();
        assert_relative_eq!(upper, 1.0, epsilon = 1e-6);
        assert!(lower.abs() <= 1e-6);

        // Edge of the projection still has finite graphs.
        let (upper, lower) = graph_functions(&z, &v, &dv(&[1.0, 0.0])).unwrap();
        assert_relative_eq!(upper, 1.0, epsilon = 1e-6);
        assert!(lower.abs() <= 1e-6);
    }

    #[test]
    fn graph_functions_reject_points_outside_the_projection() {
        let z = OrliczZonotope::new(
            VectorMultiset::canonical_basis(2),
            OrliczFunction::identity(),
        );
        let v = dv(&[0.0, 1.0]);
        assert_eq!(
            graph_functions(&z, &v, &dv(&[1.5, 0.0])).unwrap_err(),
            ShadowError::XOutsideProjection
        );
        assert_eq!(
            graph_functions(&z, &v, &dv(&[-0.5, 0.0])).unwrap_err(),
            ShadowError::XOutsideProjection
        );
    }

    #[test]
    fn symmetric_body_graphs_mirror_at_the_origin() {
        let m = VectorMultiset::from_rows(
            2,
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]],
        )
        .unwrap();
        let z = OrliczZonotope::new(m, OrliczFunction::power(2.0).unwrap());
        let (upper, lower) = graph_functions(&z, &dv(&[0.0, 1.0]), &dv(&[0.0, 0.0])).unwrap();
        assert!((upper + lower).abs() <= 1e-6);
        assert_relative_eq!(upper, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn three_dimensional_graphs_on_the_cube() {
        let z = OrliczZonotope::new(
            VectorMultiset::canonical_basis(3),
            OrliczFunction::identity(),
        );
        let v = dv(&[0.0, 0.0, 1.0]);
        let (upper, lower) = graph_functions(&z, &v, &dv(&[0.5, 0.5, 0.0])).unwrap();
        assert_relative_eq!(upper, 1.0, epsilon = 1e-6);
        assert!(lower.abs() <= 1e-6);
    }

    #[test]
    fn projection_invariance_report_is_tight() {
        let s = orthogonalize(&triple(), 0).unwrap();
        let report =
            check_projection_invariance(&s, &OrliczFunction::power(2.0).unwrap(), 50);
        assert!(report.ok, "max deviation {}", report.max_deviation);
        assert!(report.samples > 0);
    }

    #[test]
    fn lipschitz_bound_holds_on_samples() {
        let s = orthogonalize(&triple(), 0).unwrap();
        for phi in [
            OrliczFunction::identity(),
            OrliczFunction::power(2.0).unwrap(),
        ] {
            let report = check_lipschitz(&s, &phi, 200);
            assert!(report.ok, "max excess {}", report.max_excess);
        }
    }

    #[test]
    fn convexity_verdicts_on_synthetic_curves() {
        let grid = |f: fn(f64) -> f64| -> Vec<CurvePoint> {
            (0..9)
                .map(|k| {
                    let t = -1.0 + 0.25 * k as f64;
                    CurvePoint {
                        t,
                        value: f(t),
                        halfwidth: 0.0,
                    }
                })
                .collect()
        };
        let convex = curve_convexity(&grid(|t| t * t + 2.0), CurveMode::Direct).unwrap();
        assert!(convex.ok);
        assert_eq!(convex.triples.len(), 7);

        let constant = curve_convexity(&grid(|_| 3.0), CurveMode::Direct).unwrap();
        assert!(constant.ok);

        let concave = curve_convexity(&grid(|t| 4.0 - t * t), CurveMode::Direct).unwrap();
        assert!(!concave.ok);
        assert!(concave.triples.iter().all(|t| !t.satisfied));

        // Reciprocal mode inverts: 1/(4 - t^2) is convex on this range.
        let reciprocal = curve_convexity(&grid(|t| 4.0 - t * t), CurveMode::Reciprocal).unwrap();
        assert!(reciprocal.ok);
    }

    #[test]
    fn convexity_rejects_bad_grids() {
        let two = vec![
            CurvePoint { t: 0.0, value: 1.0, halfwidth: 0.0 },
            CurvePoint { t: 1.0, value: 1.0, halfwidth: 0.0 },
        ];
        assert_eq!(
            curve_convexity(&two, CurveMode::Direct).unwrap_err(),
            ShadowError::NonMonotoneGrid
        );
        let backwards = vec![
            CurvePoint { t: 0.0, value: 1.0, halfwidth: 0.0 },
            CurvePoint { t: 1.0, value: 1.0, halfwidth: 0.0 },
            CurvePoint { t: 0.5, value: 1.0, halfwidth: 0.0 },
        ];
        assert_eq!(
            curve_convexity(&backwards, CurveMode::Direct).unwrap_err(),
            ShadowError::NonMonotoneGrid
        );
    }

    #[test]
    fn error_bars_turn_violations_into_slack_passes() {
        let points = vec![
            CurvePoint { t: 0.0, value: 1.0, halfwidth: 0.0 },
            CurvePoint { t: 1.0, value: 1.2, halfwidth: 0.3 },
            CurvePoint { t: 2.0, value: 1.0, halfwidth: 0.0 },
        ];
        let report = curve_convexity(&points, CurveMode::Direct).unwrap();
        assert!(report.ok);
        let tight = vec![
            CurvePoint { t: 0.0, value: 1.0, halfwidth: 0.0 },
            CurvePoint { t: 1.0, value: 1.2, halfwidth: 0.05 },
            CurvePoint { t: 2.0, value: 1.0, halfwidth: 0.0 },
        ];
        let report = curve_convexity(&tight, CurveMode::Direct).unwrap();
        assert!(!report.ok);
    }

    #[test]
    fn graph_inequality_chain_on_a_shadow_pair() {
        // Interpolated bodies contain the Minkowski interpolation, so the
        // chained graph bounds hold at matching base points.
        let s = orthogonalize(&triple(), 0).unwrap();
        let phi = OrliczFunction::power(2.0).unwrap();
        let v = s.direction().clone();
        let (t_a, t_b) = (-1.0, 0.75);
        let lambda = 0.4;
        let t_mix = lambda * t_a + (1.0 - lambda) * t_b;
        let za = s.zonotope_at(t_a, &phi).unwrap();
        let zb = s.zonotope_at(t_b, &phi).unwrap();
        let zm = s.zonotope_at(t_mix, &phi).unwrap();
        for frac in [0.1, 0.45, 0.8] {
            let x = dv(&[0.0, frac]);
            let (ua, _) = graph_functions(&za, &v, &x).unwrap();
            let (_, lb) = graph_functions(&zb, &v, &x).unwrap();
            let (um, lm) = graph_functions(&zm, &v, &x).unwrap();
            let mixed = lambda * ua + (1.0 - lambda) * lb;
            assert!(lm <= mixed + 1e-6, "lower violated at {frac}");
            assert!(mixed <= um + 1e-6, "upper violated at {frac}");
        }
    }
}
