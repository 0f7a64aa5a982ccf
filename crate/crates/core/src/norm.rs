//! Luxemburg-type Orlicz norm of a nonnegative coefficient vector:
//! the least `lambda > 0` with `sum phi(f_i / lambda) <= 1`.

use crate::phi::OrliczFunction;
use thiserror::Error;

const REL_TOL: f64 = 1e-12;
const MAX_ITER: usize = 60;

#[derive(Debug, Error, PartialEq)]
pub enum NormError {
    #[error("norm input must be finite and nonnegative, got {0}")]
    NegativeInput(f64),
}

/// Solves `sum phi(f_i / lambda) = 1` by bisection on `[max f, sum f]`.
///
/// The zero vector maps to zero, and a vector with a single positive entry
/// `c` maps to `c` exactly because `phi(1) = 1`.
pub fn orlicz_norm(values: &[f64], phi: &OrliczFunction) -> Result<f64, NormError> {
    let mut max = 0.0_f64;
    let mut sum = 0.0_f64;
    let mut positive = 0_usize;
    for &f in values {
        if !(f >= 0.0) || !f.is_finite() {
            return Err(NormError::NegativeInput(f));
        }
        if f > 0.0 {
            positive += 1;
            sum += f;
            max = max.max(f);
        }
    }
    match positive {
        0 => return Ok(0.0),
        1 => return Ok(max),
        _ => {}
    }

    // At lambda = max the largest term alone contributes phi(1) = 1, and at
    // lambda = sum every argument is at most 1 where phi sits below the
    // diagonal, so the root is bracketed.
    let budget = |lambda: f64| -> f64 {
        values
            .iter()
            .filter(|&&f| f > 0.0)
            .map(|&f| phi.eval(f / lambda).expect("arguments are nonnegative"))
            .sum()
    };
    let (mut lo, mut hi) = (max, sum);
    for _ in 0..MAX_ITER {
        if hi - lo <= REL_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if budget(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi::{MixTerm, OrliczFunction, PhiSpec};
    use approx::assert_relative_eq;

    fn p_norm(values: &[f64], p: f64) -> f64 {
        values.iter().map(|f| f.powf(p)).sum::<f64>().powf(1.0 / p)
    }

    #[test]
    fn quadratic_norm_is_euclidean() {
        let phi = OrliczFunction::power(2.0).unwrap();
        assert_relative_eq!(
            orlicz_norm(&[3.0, 4.0], &phi).unwrap(),
            5.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            orlicz_norm(&[1.0, 1.0], &phi).unwrap(),
            2.0_f64.sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn identity_norm_is_plain_sum() {
        let phi = OrliczFunction::identity();
        assert_relative_eq!(
            orlicz_norm(&[3.0, 4.0], &phi).unwrap(),
            7.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn single_positive_entry_is_exact() {
        let phi = OrliczFunction::power(7.0).unwrap();
        assert_eq!(orlicz_norm(&[5.0], &phi).unwrap(), 5.0);
        assert_eq!(orlicz_norm(&[0.0, 5.0, 0.0], &phi).unwrap(), 5.0);
    }

    #[test]
    fn zero_vector_has_zero_norm() {
        let phi = OrliczFunction::power(2.0).unwrap();
        assert_eq!(orlicz_norm(&[0.0, 0.0], &phi).unwrap(), 0.0);
        assert_eq!(orlicz_norm(&[], &phi).unwrap(), 0.0);
    }

    #[test]
    fn negative_and_non_finite_inputs_are_rejected() {
        let phi = OrliczFunction::power(2.0).unwrap();
        assert!(orlicz_norm(&[1.0, -2.0], &phi).is_err());
        assert!(orlicz_norm(&[f64::NAN], &phi).is_err());
        assert!(orlicz_norm(&[f64::INFINITY], &phi).is_err());
    }

    #[test]
    fn solved_budget_sits_at_one() {
        let phi = OrliczFunction::new(PhiSpec::Mix {
            terms: vec![MixTerm { w: 0.5, p: 1.0 }, MixTerm { w: 0.5, p: 3.0 }],
        })
        .unwrap();
        let values = [0.3, 1.1, 0.7, 2.4];
        let lambda = orlicz_norm(&values, &phi).unwrap();
        let budget: f64 = values
            .iter()
            .map(|&f| phi.eval(f / lambda).unwrap())
            .sum();
        assert!((budget - 1.0).abs() <= 1e-10, "budget = {budget}");
    }

    proptest::proptest! {
        #[test]
        fn matches_closed_form_p_norm(
            values in proptest::collection::vec(0.0_f64..10.0, 1..8),
            p_idx in 0_usize..5,
        ) {
            let p = [1.0, 1.5, 2.0, 3.0, 10.0][p_idx];
            let phi = OrliczFunction::power(p).unwrap();
            let lambda = orlicz_norm(&values, &phi).unwrap();
            let expected = p_norm(&values, p);
            proptest::prop_assert!(
                (lambda - expected).abs() <= 1e-10 * expected.max(1e-300),
                "lambda = {lambda}, expected = {expected}"
            );
        }

        #[test]
        fn homogeneous_monotone_and_subadditive(
            f in proptest::collection::vec(0.0_f64..10.0, 2..6),
            g in proptest::collection::vec(0.0_f64..10.0, 2..6),
            c in 0.01_f64..100.0,
        ) {
            let phi = OrliczFunction::new(PhiSpec::Mix {
                terms: vec![MixTerm { w: 0.5, p: 1.0 }, MixTerm { w: 0.5, p: 2.0 }],
            })
            .unwrap();
            let n = f.len().min(g.len());
            let f = &f[..n];
            let g = &g[..n];
            let nf = orlicz_norm(f, &phi).unwrap();
            let ng = orlicz_norm(g, &phi).unwrap();

            let scaled: Vec<f64> = f.iter().map(|x| c * x).collect();
            let ns = orlicz_norm(&scaled, &phi).unwrap();
            proptest::prop_assert!((ns - c * nf).abs() <= 1e-10 * (c * nf).max(1e-12));

            let summed: Vec<f64> = f.iter().zip(g).map(|(a, b)| a + b).collect();
            let nsum = orlicz_norm(&summed, &phi).unwrap();
            proptest::prop_assert!(nsum <= nf + ng + 1e-10 * (nf + ng).max(1.0));

            let dominating: Vec<f64> = f.iter().zip(g).map(|(a, b)| a.max(*b)).collect();
            let ndom = orlicz_norm(&dominating, &phi).unwrap();
            proptest::prop_assert!(ndom + 1e-10 * ndom.max(1.0) >= nf.max(ng));
        }
    }
}
