//! Asymmetric Orlicz zonotopes: the convex bodies whose support function is
//! the Orlicz norm of the positive parts of the generator inner products.

use crate::body::{self, SupportOracle};
use crate::multisets::VectorMultiset;
use crate::norm::orlicz_norm;
use crate::phi::OrliczFunction;
use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Expanded subset counts above this trigger Monte Carlo volume estimation.
const EXACT_SUBSET_CAP: f64 = 200_000.0;

#[derive(Debug, Error, PartialEq)]
pub enum ZonotopeError {
    #[error("support is zero in this direction; the body is flat at the origin")]
    ZeroSupport,
}

/// The body `Z` with `h_Z(u) = || (<v_i, u>_+)_i ||_phi`.
#[derive(Clone, Debug)]
pub struct OrliczZonotope {
    generators: VectorMultiset,
    phi: OrliczFunction,
}

/// The L1 zonotope volume; `exact` is false when the subset cap forced a
/// Monte Carlo estimate.
#[derive(Clone, Copy, Debug)]
pub struct L1Volume {
    pub value: f64,
    pub exact: bool,
}

impl OrliczZonotope {
    pub fn new(generators: VectorMultiset, phi: OrliczFunction) -> Self {
        Self { generators, phi }
    }

    pub fn generators(&self) -> &VectorMultiset {
        &self.generators
    }

    pub fn phi(&self) -> &OrliczFunction {
        &self.phi
    }

    /// Support function value, zero when every generator points away from `u`.
    pub fn support(&self, u: &DVector<f64>) -> f64 {
        let mut parts = Vec::with_capacity(self.generators.len());
        for (v, k) in self.generators.entries() {
            let f = v.dot(u).max(0.0);
            for _ in 0..*k {
                parts.push(f);
            }
        }
        orlicz_norm(&parts, &self.phi).expect("positive parts are nonnegative")
    }

    /// Boundary point attaining the support value in direction `u`, via the
    /// gradient of the 1-homogeneous extension.
    pub fn support_point(&self, u: &DVector<f64>) -> Result<DVector<f64>, ZonotopeError> {
        SupportOracle::support_point(self, u).map_err(|_| ZonotopeError::ZeroSupport)
    }
}

impl SupportOracle for OrliczZonotope {
    fn dim(&self) -> usize {
        self.generators.dim()
    }

    fn support(&self, u: &DVector<f64>) -> f64 {
        OrliczZonotope::support(self, u)
    }
}

/// `Lambda (+) -Lambda`: the generators of the symmetric Orlicz zonotope.
pub fn symmetrize(m: &VectorMultiset) -> VectorMultiset {
    m.union(&m.negated()).expect("dimensions match")
}

/// Volume of the L1 zonotope: the sum of `|det|` over all n-element subsets
/// of the expanded generator list. Falls back to a seeded Monte Carlo
/// membership estimate when that sum has more than 200,000 terms.
pub fn l1_volume(m: &VectorMultiset) -> L1Volume {
    let n = m.dim();
    let vectors = m.expanded();
    if vectors.len() < n {
        return L1Volume {
            value: 0.0,
            exact: true,
        };
    }
    let subsets = binomial(vectors.len(), n);
    if subsets > EXACT_SUBSET_CAP && (n == 2 || n == 3) {
        return L1Volume {
            value: monte_carlo_l1_volume(m),
            exact: false,
        };
    }
    let mut total = 0.0;
    for subset in (0..vectors.len()).combinations(n) {
        let mat = DMatrix::from_columns(
            &subset.iter().map(|&i| vectors[i].clone()).collect::<Vec<_>>(),
        );
        total += mat.determinant().abs();
    }
    L1Volume {
        value: total,
        exact: true,
    }
}

fn binomial(m: usize, n: usize) -> f64 {
    let mut value = 1.0_f64;
    for i in 0..n {
        value *= (m - i) as f64 / (i + 1) as f64;
        if value > 1e18 {
            return value;
        }
    }
    value
}

fn monte_carlo_l1_volume(m: &VectorMultiset) -> f64 {
    const DIRECTIONS: usize = 256;
    const SAMPLES: usize = 200_000;
    let n = m.dim();
    let dirs = body::direction_set(n, DIRECTIONS);
    // h(u) for phi = id is the plain sum of positive parts.
    let offsets: Vec<f64> = dirs
        .iter()
        .map(|u| {
            m.entries()
                .iter()
                .map(|(v, k)| *k as f64 * v.dot(u).max(0.0))
                .sum()
        })
        .collect();
    let mut lo = vec![0.0_f64; n];
    let mut hi = vec![0.0_f64; n];
    for (v, k) in m.entries() {
        for j in 0..n {
            let c = *k as f64 * v[j];
            if c < 0.0 {
                lo[j] += c;
            } else {
                hi[j] += c;
            }
        }
    }
    let box_volume: f64 = (0..n).map(|j| hi[j] - lo[j]).product();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let mut inside = 0_usize;
    let mut x = DVector::zeros(n);
    for _ in 0..SAMPLES {
        for j in 0..n {
            x[j] = rng.gen_range(lo[j]..hi[j]);
        }
        let out = dirs
            .iter()
            .zip(&offsets)
            .any(|(u, &b)| x.dot(u) > b * (1.0 + 1e-9));
        if !out {
            inside += 1;
        }
    }
    box_volume * inside as f64 / SAMPLES as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multisets::VectorMultiset;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn canonical_with(phi: OrliczFunction) -> OrliczZonotope {
        OrliczZonotope::new(VectorMultiset::canonical_basis(2), phi)
    }

    fn dv(coords: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(coords)
    }

    #[test]
    fn support_along_a_basis_direction_is_exactly_one() {
        for phi in [
            OrliczFunction::identity(),
            OrliczFunction::power(2.0).unwrap(),
            OrliczFunction::power(7.0).unwrap(),
        ] {
            let z = canonical_with(phi);
            assert_eq!(z.support(&dv(&[1.0, 0.0])), 1.0);
        }
    }

    #[test]
    fn support_in_the_flat_cone_is_zero() {
        let z = canonical_with(OrliczFunction::power(2.0).unwrap());
        assert_eq!(z.support(&dv(&[-1.0, -1.0])), 0.0);
        assert_eq!(z.support(&dv(&[-1.0, 0.0])), 0.0);
    }

    #[test]
    fn support_of_quadratic_zonotope_is_euclidean_on_positive_parts() {
        let z = canonical_with(OrliczFunction::power(2.0).unwrap());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(z.support(&dv(&[s, s])), 1.0, max_relative = 1e-11);
        assert_relative_eq!(z.support(&dv(&[s, -s])), s, max_relative = 1e-11);
    }

    #[test]
    fn one_dimensional_generator_supports_its_own_direction() {
        let m = VectorMultiset::from_rows(1, &[vec![1.0]]).unwrap();
        let z = OrliczZonotope::new(m, OrliczFunction::power(3.0).unwrap());
        assert_eq!(z.support(&dv(&[1.0])), 1.0);
        assert_eq!(z.support(&dv(&[-1.0])), 0.0);
    }

    #[test]
    fn support_point_recovers_the_cube_corner() {
        let z = canonical_with(OrliczFunction::identity());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p = z.support_point(&dv(&[s, s])).unwrap();
        assert_relative_eq!(p[0], 1.0, epsilon = 1e-6);
        assert_relative_eq!(p[1], 1.0, epsilon = 1e-6);
        // The defining identity <x, u> = h(u) holds tightly after projection.
        assert_relative_eq!(p.dot(&dv(&[s, s])), z.support(&dv(&[s, s])), epsilon = 1e-12);
    }

    #[test]
    fn support_point_on_the_quarter_disk_boundary() {
        let z = canonical_with(OrliczFunction::power(2.0).unwrap());
        let p = z.support_point(&dv(&[1.0, 0.0])).unwrap();
        assert_relative_eq!(p[0], 1.0, epsilon = 1e-6);
        assert_relative_eq!(p[1], 0.0, epsilon = 1e-6);
    }

    #[test]
    fn support_point_errors_in_the_flat_cone() {
        let z = canonical_with(OrliczFunction::power(2.0).unwrap());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(
            z.support_point(&dv(&[-s, -s])).unwrap_err(),
            ZonotopeError::ZeroSupport
        );
    }

    #[test]
    fn l1_volume_of_the_triple_is_three() {
        let m =
            VectorMultiset::from_rows(2, &[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]])
                .unwrap();
        let vol = l1_volume(&m);
        assert!(vol.exact);
        assert_eq!(vol.value, 3.0);
    }

    #[test]
    fn l1_volume_counts_multiplicity() {
        let m = VectorMultiset::new(
            2,
            vec![dv(&[1.0, 0.0]), dv(&[0.0, 1.0])],
            Some(vec![2, 1]),
        )
        .unwrap();
        assert_eq!(l1_volume(&m).value, 2.0);
    }

    #[test]
    fn l1_volume_of_nonspanning_sets_is_zero() {
        let m = VectorMultiset::from_rows(2, &[vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert_eq!(l1_volume(&m).value, 0.0);
        let single = VectorMultiset::from_rows(2, &[vec![1.0, 0.0]]).unwrap();
        assert_eq!(l1_volume(&single).value, 0.0);
    }

    #[test]
    fn l1_volume_scales_by_the_determinant() {
        let m = VectorMultiset::random(2, 5, 3).unwrap();
        let g = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.5, 1.5]);
        let image = m.gl_apply(&g).unwrap();
        let before = l1_volume(&m).value;
        let after = l1_volume(&image).value;
        assert_relative_eq!(after, g.determinant().abs() * before, max_relative = 1e-10);
    }

    #[test]
    fn oversized_generator_lists_fall_back_to_monte_carlo() {
        let m = VectorMultiset::random(2, 700, 11).unwrap();
        let estimate = l1_volume(&m);
        assert!(!estimate.exact);
        let mut exact = 0.0;
        let vectors = m.expanded();
        for i in 0..vectors.len() {
            for j in i + 1..vectors.len() {
                exact += (vectors[i][0] * vectors[j][1] - vectors[i][1] * vectors[j][0]).abs();
            }
        }
        assert_relative_eq!(estimate.value, exact, max_relative = 0.03);
    }

    #[test]
    fn symmetrize_doubles_the_generator_count() {
        let m = VectorMultiset::canonical_basis(2);
        let s = symmetrize(&m);
        assert_eq!(s.len(), 4);
        let z = OrliczZonotope::new(s, OrliczFunction::power(2.0).unwrap());
        // The symmetric body supports opposite directions equally.
        assert_relative_eq!(
            z.support(&dv(&[0.3, -0.8])),
            z.support(&dv(&[-0.3, 0.8])),
            max_relative = 1e-11
        );
    }

    proptest::proptest! {
        #[test]
        fn support_is_homogeneous_and_sublinear(
            ux in -2.0_f64..2.0, uy in -2.0_f64..2.0,
            wx in -2.0_f64..2.0, wy in -2.0_f64..2.0,
            c in 0.01_f64..50.0,
        ) {
            let m = VectorMultiset::from_rows(
                2,
                &[vec![1.0, 0.2], vec![-0.3, 1.0], vec![0.5, -0.4]],
            )
            .unwrap();
            let z = OrliczZonotope::new(m, OrliczFunction::power(2.0).unwrap());
            let u = dv(&[ux, uy]);
            let w = dv(&[wx, wy]);
            let hu = z.support(&u);
            let hw = z.support(&w);
            let scaled = z.support(&(&u * c));
            proptest::prop_assert!((scaled - c * hu).abs() <= 1e-10 * (c * hu).max(1e-9));
            let hsum = z.support(&(&u + &w));
            proptest::prop_assert!(hsum <= hu + hw + 1e-10 * (hu + hw).max(1.0));
        }

        #[test]
        fn support_is_monotone_under_union_and_gl_equivariant(
            seed in 0_u64..200,
            ux in -2.0_f64..2.0,
            uy in -2.0_f64..2.0,
        ) {
            if ux == 0.0 && uy == 0.0 {
                return Ok(());
            }
            let u = dv(&[ux, uy]);
            let phi = OrliczFunction::power(2.0).unwrap();
            let a = VectorMultiset::random(2, 3, seed).unwrap();
            let b = VectorMultiset::random(2, 2, seed + 1000).unwrap();
            let za = OrliczZonotope::new(a.clone(), phi.clone());
            let zu = OrliczZonotope::new(a.union(&b).unwrap(), phi.clone());
            proptest::prop_assert!(zu.support(&u) >= za.support(&u) - 1e-10);

            let g = DMatrix::from_row_slice(2, 2, &[1.2, -0.4, 0.3, 0.9]);
            let zg = OrliczZonotope::new(a.gl_apply(&g).unwrap(), phi);
            let lhs = zg.support(&u);
            let rhs = za.support(&(g.transpose() * &u));
            proptest::prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-9));
        }
    }
}
