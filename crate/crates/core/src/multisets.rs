//! Finite multisets of nonzero vectors in R^n: the generator data for
//! asymmetric Orlicz zonotopes.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, StandardNormal};
use std::collections::HashMap;
use thiserror::Error;

/// Relative pivot threshold for rank decisions.
const PIVOT_REL: f64 = 1e-10;
/// Cosine slack when grouping positively parallel vectors.
const PARALLEL_COS: f64 = 1.0 - 1e-10;
/// Inner products at or below this count as "nonpositive" in obtuseness checks.
const OBTUSE_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum MultisetError {
    #[error("dimension must be at least 1")]
    BadDimension,
    #[error("vector {0} has the wrong dimension")]
    DimensionMismatch(usize),
    #[error("vector {0} is zero")]
    ZeroVector(usize),
    #[error("multiplicity of entry {0} must be at least 1")]
    BadMultiplicity(usize),
    #[error("matrix is singular (|det| <= 1e-10)")]
    SingularMatrix,
    #[error("multiset is not obtuse")]
    NotObtuse,
    #[error("selected entries do not form a basis")]
    NotABasis,
}

/// A multiset of nonzero vectors. Entries with bitwise-equal coordinates are
/// stored once with a multiplicity; first-appearance order is preserved.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorMultiset {
    dim: usize,
    entries: Vec<(DVector<f64>, usize)>,
}

/// How an obtuse spanning multiset decomposes over a chosen basis from its
/// own entries.
#[derive(Clone, Debug)]
pub struct StructureReport {
    pub basis: Vec<usize>,
    pub remainder: Vec<usize>,
    /// Coordinates of each remainder entry in the chosen basis.
    pub coordinates: Vec<DVector<f64>>,
    pub remainder_pairwise_orthogonal: bool,
    pub coordinates_nonpositive: bool,
    /// Whether the supports of the remainder coordinates are disjoint.
    pub supports_disjoint: bool,
    /// Per remainder entry: (basis position, positive coefficient) pairs so
    /// that the entry equals minus the weighted sum of those basis vectors.
    pub decomposition: Vec<Vec<(usize, f64)>>,
}

impl VectorMultiset {
    pub fn new(
        dim: usize,
        vectors: Vec<DVector<f64>>,
        multiplicities: Option<Vec<usize>>,
    ) -> Result<Self, MultisetError> {
        if dim == 0 {
            return Err(MultisetError::BadDimension);
        }
        let mults = match multiplicities {
            Some(m) => m,
            None => vec![1; vectors.len()],
        };
        if mults.len() != vectors.len() {
            return Err(MultisetError::BadMultiplicity(mults.len().min(vectors.len())));
        }
        let mut entries: Vec<(DVector<f64>, usize)> = Vec::new();
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        for (i, (v, &k)) in vectors.iter().zip(&mults).enumerate() {
            if v.len() != dim {
                return Err(MultisetError::DimensionMismatch(i));
            }
            if !v.iter().all(|c| c.is_finite()) || v.iter().all(|&c| c == 0.0) {
                return Err(MultisetError::ZeroVector(i));
            }
            if k == 0 {
                return Err(MultisetError::BadMultiplicity(i));
            }
            let key: Vec<u64> = v.iter().map(|c| c.to_bits()).collect();
            match index.get(&key) {
                Some(&at) => entries[at].1 += k,
                None => {
                    index.insert(key, entries.len());
                    entries.push((v.clone(), k));
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(dim: usize, rows: &[Vec<f64>]) -> Result<Self, MultisetError> {
        let vectors = rows
            .iter()
            .map(|r| DVector::from_row_slice(r))
            .collect();
        Self::new(dim, vectors, None)
    }

    /// The canonical basis {e_1, ..., e_n}.
    pub fn canonical_basis(dim: usize) -> Self {
        let vectors = (0..dim)
            .map(|i| {
                let mut v = DVector::zeros(dim);
                v[i] = 1.0;
                v
            })
            .collect();
        Self::new(dim, vectors, None).expect("canonical basis is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(DVector<f64>, usize)] {
        &self.entries
    }

    /// Total count with multiplicity.
    pub fn len(&self) -> usize {
        self.entries.iter().map(|(_, k)| k).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every vector repeated by its multiplicity, in entry order.
    pub fn expanded(&self) -> Vec<DVector<f64>> {
        let mut out = Vec::with_capacity(self.len());
        for (v, k) in &self.entries {
            for _ in 0..*k {
                out.push(v.clone());
            }
        }
        out
    }

    /// Multiset union: multiplicity functions add.
    pub fn union(&self, other: &Self) -> Result<Self, MultisetError> {
        if self.dim != other.dim {
            return Err(MultisetError::DimensionMismatch(0));
        }
        let mut vectors: Vec<DVector<f64>> = Vec::new();
        let mut mults = Vec::new();
        for (v, k) in self.entries.iter().chain(&other.entries) {
            vectors.push(v.clone());
            mults.push(*k);
        }
        Self::new(self.dim, vectors, Some(mults))
    }

    /// Multiset difference: multiplicities subtract and clamp at zero.
    pub fn difference(&self, other: &Self) -> Result<Self, MultisetError> {
        if self.dim != other.dim {
            return Err(MultisetError::DimensionMismatch(0));
        }
        let mut vectors = Vec::new();
        let mut mults = Vec::new();
        for (v, k) in &self.entries {
            let key: Vec<u64> = v.iter().map(|c| c.to_bits()).collect();
            let removed = other
                .entries
                .iter()
                .find(|(w, _)| w.iter().map(|c| c.to_bits()).collect::<Vec<u64>>() == key)
                .map(|(_, j)| *j)
                .unwrap_or(0);
            if *k > removed {
                vectors.push(v.clone());
                mults.push(k - removed);
            }
        }
        Self::new(self.dim, vectors, Some(mults))
    }

    /// Every vector negated, multiplicities kept.
    pub fn negated(&self) -> Self {
        let vectors = self.entries.iter().map(|(v, _)| -v).collect();
        let mults = self.entries.iter().map(|(_, k)| *k).collect();
        Self::new(self.dim, vectors, Some(mults)).expect("negation preserves validity")
    }

    /// Whether the entries span R^n.
    pub fn is_spanning(&self) -> bool {
        let rows: Vec<&DVector<f64>> = self.entries.iter().map(|(v, _)| v).collect();
        rank_of_rows(&rows, self.dim) == self.dim
    }

    /// Image under an invertible matrix, entrywise.
    pub fn gl_apply(&self, m: &DMatrix<f64>) -> Result<Self, MultisetError> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(MultisetError::DimensionMismatch(0));
        }
        if m.determinant().abs() <= 1e-10 {
            return Err(MultisetError::SingularMatrix);
        }
        let vectors = self.entries.iter().map(|(v, _)| m * v).collect();
        let mults = self.entries.iter().map(|(_, k)| *k).collect();
        Self::new(self.dim, vectors, Some(mults))
    }

    /// Replaces each class of positively parallel vectors by its sum (taken
    /// with multiplicity). Idempotent.
    pub fn merge_parallel(&self) -> Self {
        let mut groups: Vec<(DVector<f64>, DVector<f64>)> = Vec::new();
        for (v, k) in &self.entries {
            let unit = v / v.norm();
            let contribution = v * (*k as f64);
            match groups
                .iter_mut()
                .find(|(u, _)| u.dot(&unit) >= PARALLEL_COS)
            {
                Some((_, sum)) => *sum += contribution,
                None => groups.push((unit, contribution)),
            }
        }
        let vectors = groups.into_iter().map(|(_, sum)| sum).collect();
        Self::new(self.dim, vectors, None).expect("merged sums are nonzero")
    }

    /// Pairwise nonpositive inner products and all multiplicities equal to 1.
    pub fn is_obtuse(&self) -> bool {
        if self.entries.iter().any(|(_, k)| *k != 1) {
            return false;
        }
        for (i, (u, _)) in self.entries.iter().enumerate() {
            for (v, _) in &self.entries[i + 1..] {
                if u.dot(v) > OBTUSE_TOL {
                    return false;
                }
            }
        }
        true
    }

    /// Decomposes an obtuse spanning multiset over the basis given by entry
    /// indices, reporting the orthogonality and sign structure of the rest.
    pub fn obtuse_structure(&self, basis: &[usize]) -> Result<StructureReport, MultisetError> {
        if !self.is_obtuse() || !self.is_spanning() {
            return Err(MultisetError::NotObtuse);
        }
        let n = self.dim;
        if basis.len() != n || basis.iter().any(|&i| i >= self.entries.len()) {
            return Err(MultisetError::NotABasis);
        }
        let mut sorted = basis.to_vec();
        sorted.dedup();
        if sorted.len() != n {
            return Err(MultisetError::NotABasis);
        }
        let b = DMatrix::from_columns(
            &basis
                .iter()
                .map(|&i| self.entries[i].0.clone())
                .collect::<Vec<_>>(),
        );
        let lu = b.clone().lu();
        if lu.determinant().abs() <= PIVOT_REL * largest_entry(&b).max(1.0) {
            return Err(MultisetError::NotABasis);
        }

        let remainder: Vec<usize> = (0..self.entries.len())
            .filter(|i| !basis.contains(i))
            .collect();
        let mut coordinates = Vec::new();
        let mut decomposition = Vec::new();
        let mut nonpositive = true;
        let mut seen_support = vec![false; n];
        let mut disjoint = true;
        for &j in &remainder {
            let coords = lu
                .solve(&self.entries[j].0)
                .ok_or(MultisetError::NotABasis)?;
            let mut parts = Vec::new();
            for (pos, &c) in coords.iter().enumerate() {
                if c > OBTUSE_TOL {
                    nonpositive = false;
                }
                if c < -OBTUSE_TOL {
                    if seen_support[pos] {
                        disjoint = false;
                    }
                    seen_support[pos] = true;
                    parts.push((pos, -c));
                }
            }
            coordinates.push(coords);
            decomposition.push(parts);
        }
        let mut orthogonal = true;
        for (a, &i) in remainder.iter().enumerate() {
            for &j in &remainder[a + 1..] {
                if self.entries[i].0.dot(&self.entries[j].0).abs() > OBTUSE_TOL {
                    orthogonal = false;
                }
            }
        }
        Ok(StructureReport {
            basis: basis.to_vec(),
            remainder,
            coordinates,
            remainder_pairwise_orthogonal: orthogonal,
            coordinates_nonpositive: nonpositive,
            supports_disjoint: disjoint,
            decomposition,
        })
    }

    /// A seeded spanning multiset: uniform directions with log-normal
    /// lengths, regenerated until the entries span.
    pub fn random(dim: usize, count: usize, seed: u64) -> Result<Self, MultisetError> {
        if dim == 0 {
            return Err(MultisetError::BadDimension);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lengths = LogNormal::new(0.0, 0.5).expect("valid log-normal parameters");
        for _ in 0..1024 {
            let vectors: Vec<DVector<f64>> = (0..count)
                .map(|_| {
                    let mut v = DVector::from_fn(dim, |_, _| {
                        let g: f64 = StandardNormal.sample(&mut rng);
                        g
                    });
                    while v.norm() < 1e-8 {
                        v = DVector::from_fn(dim, |_, _| {
                            let g: f64 = StandardNormal.sample(&mut rng);
                            g
                        });
                    }
                    let len = lengths.sample(&mut rng);
                    v.normalize_mut();
                    v * len
                })
                .collect();
            let candidate = Self::new(dim, vectors, None)?;
            if count >= dim && candidate.is_spanning() {
                return Ok(candidate);
            }
            if count < dim {
                return Ok(candidate);
            }
        }
        unreachable!("random generation failed to span after many attempts")
    }

    /// A seeded obtuse spanning multiset containing the canonical basis:
    /// extra entries are negative combinations of disjoint basis subsets.
    pub fn random_obtuse(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b97f4a7c15));
        let mut vectors = Self::canonical_basis(dim).expanded();
        let mut order: Vec<usize> = (0..dim).collect();
        for i in (1..order.len()).rev() {
            let j = rng.gen_range(0..=i);
            order.swap(i, j);
        }
        let mut used = 0;
        while used < dim {
            let take = rng.gen_range(1..=(dim - used));
            let mut v = DVector::zeros(dim);
            for &axis in &order[used..used + take] {
                v[axis] = -(0.3 + 1.7 * rng.gen::<f64>());
            }
            if rng.gen::<f64>() < 0.7 || used + take == dim {
                vectors.push(v);
            }
            used += take;
        }
        Self::new(dim, vectors, None).expect("constructed obtuse set is valid")
    }
}

fn largest_entry(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, &c| acc.max(c.abs()))
}

/// Row rank by Gaussian elimination with partial pivoting; pivots below
/// `1e-10` times the largest input entry are treated as zero.
pub fn rank_of_rows(rows: &[&DVector<f64>], dim: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut a: Vec<Vec<f64>> = rows.iter().map(|v| v.iter().copied().collect()).collect();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0_f64, |acc, &c| acc.max(c.abs()));
    if scale == 0.0 {
        return 0;
    }
    let threshold = PIVOT_REL * scale;
    let mut rank = 0;
    for col in 0..dim {
        let Some(best) = (rank..a.len()).max_by(|&i, &j| {
            a[i][col].abs().total_cmp(&a[j][col].abs())
        }) else {
            break;
        };
        if a[best][col].abs() <= threshold {
            continue;
        }
        a.swap(rank, best);
        let (pivot_rows, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &pivot_rows[rank];
        for row in rest.iter_mut() {
            let factor = row[col] / pivot_row[col];
            for (entry, pivot_entry) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *entry -= factor * pivot_entry;
            }
        }
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn vec2(x: f64, y: f64) -> DVector<f64> {
        DVector::from_row_slice(&[x, y])
    }

    #[test]
    fn duplicate_vectors_fold_into_multiplicity() {
        let m = VectorMultiset::from_rows(2, &[vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]])
            .unwrap();
        assert_eq!(m.entries().len(), 2);
        assert_eq!(m.len(), 3);
        assert_eq!(m.entries()[0].1, 2);
    }

    #[test]
    fn zero_vectors_and_zero_multiplicities_are_rejected() {
        assert_eq!(
            VectorMultiset::from_rows(2, &[vec![0.0, 0.0]]).unwrap_err(),
            MultisetError::ZeroVector(0)
        );
        let err = VectorMultiset::new(2, vec![vec2(1.0, 0.0)], Some(vec![0])).unwrap_err();
        assert_eq!(err, MultisetError::BadMultiplicity(0));
    }

    #[test]
    fn union_adds_and_difference_clamps() {
        let a = VectorMultiset::from_rows(2, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let b = VectorMultiset::from_rows(2, &[vec![1.0, 0.0]]).unwrap();
        let u = a.union(&b).unwrap();
        assert_eq!(u.len(), 3);
        assert_eq!(u.entries()[0].1, 2);
        let d = u.difference(&b).unwrap();
        assert_eq!(d.len(), 2);
        let gone = b.difference(&u).unwrap();
        assert!(gone.is_empty());
    }

    #[test]
    fn spanning_detects_rank() {
        let spanning =
            VectorMultiset::from_rows(2, &[vec![1.0, 0.0], vec![1.0, 1e-3]]).unwrap();
        assert!(spanning.is_spanning());
        let line = VectorMultiset::from_rows(2, &[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(!line.is_spanning());
        let nearly = VectorMultiset::from_rows(2, &[vec![1.0, 0.0], vec![1.0, 1e-12]]).unwrap();
        assert!(!nearly.is_spanning());
    }

    #[test]
    fn gl_apply_requires_invertibility() {
        let m = VectorMultiset::canonical_basis(2);
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(
            m.gl_apply(&singular).unwrap_err(),
            MultisetError::SingularMatrix
        );
        let shear = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        let image = m.gl_apply(&shear).unwrap();
        assert_eq!(image.entries()[0].0, vec2(1.0, 0.0));
        assert_eq!(image.entries()[1].0, vec2(1.0, 1.0));
    }

    #[test]
    fn merge_parallel_sums_direction_classes() {
        let m = VectorMultiset::from_rows(
            2,
            &[vec![1.0, 0.0], vec![2.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0]],
        )
        .unwrap();
        let merged = m.merge_parallel();
        assert_eq!(merged.entries().len(), 3);
        assert_eq!(merged.entries()[0].0, vec2(3.0, 0.0));
        assert_eq!(merged.entries()[2].0, vec2(-1.0, 0.0));
        assert_eq!(merged.merge_parallel(), merged);
    }

    #[test]
    fn merge_parallel_respects_multiplicity() {
        let m = VectorMultiset::new(2, vec![vec2(1.0, 0.0)], Some(vec![3])).unwrap();
        let merged = m.merge_parallel();
        assert_eq!(merged.entries().len(), 1);
        assert_eq!(merged.entries()[0].0, vec2(3.0, 0.0));
        assert_eq!(merged.entries()[0].1, 1);
    }

    #[test]
    fn obtuseness_requires_multiplicity_one_and_nonpositive_products() {
        let basis = VectorMultiset::canonical_basis(2);
        assert!(basis.is_obtuse());
        let with_neg = basis
            .union(&VectorMultiset::from_rows(2, &[vec![-0.7, 0.0]]).unwrap())
            .unwrap();
        assert!(with_neg.is_obtuse());
        let doubled = basis.union(&basis).unwrap();
        assert!(!doubled.is_obtuse());
        let acute =
            VectorMultiset::from_rows(2, &[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert!(!acute.is_obtuse());
    }

    #[test]
    fn obtuse_spanning_sets_are_small() {
        for seed in 0..50 {
            for dim in 2..=3 {
                let m = VectorMultiset::random_obtuse(dim, seed);
                assert!(m.is_obtuse(), "seed {seed} dim {dim}");
                assert!(m.is_spanning(), "seed {seed} dim {dim}");
                assert!(m.len() >= dim && m.len() <= 2 * dim, "seed {seed} dim {dim}");
            }
        }
    }

    #[test]
    fn obtuse_structure_decomposes_remainder() {
        // {e1, e2, e3, -a e1 - b e2, -c e3} over the canonical basis.
        let m = VectorMultiset::from_rows(
            3,
            &[
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![-0.4, -1.3, 0.0],
                vec![0.0, 0.0, -2.0],
            ],
        )
        .unwrap();
        let report = m.obtuse_structure(&[0, 1, 2]).unwrap();
        assert!(report.remainder_pairwise_orthogonal);
        assert!(report.coordinates_nonpositive);
        assert!(report.supports_disjoint);
        assert_eq!(report.decomposition[0].len(), 2);
        assert_relative_eq!(report.decomposition[0][0].1, 0.4, max_relative = 1e-12);
        assert_relative_eq!(report.decomposition[0][1].1, 1.3, max_relative = 1e-12);
        assert_eq!(report.decomposition[1], vec![(2, 2.0)]);
    }

    #[test]
    fn obtuse_structure_rejects_bad_inputs() {
        let acute = VectorMultiset::from_rows(2, &[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(
            acute.obtuse_structure(&[0, 1]).unwrap_err(),
            MultisetError::NotObtuse
        );
        let m = VectorMultiset::from_rows(
            2,
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]],
        )
        .unwrap();
        assert_eq!(
            m.obtuse_structure(&[0, 0]).unwrap_err(),
            MultisetError::NotABasis
        );
    }

    #[test]
    fn gl_images_of_obtuse_sets_mapping_a_basis_to_canonical_stay_obtuse() {
        for seed in 0..30 {
            let m = VectorMultiset::random_obtuse(2, seed);
            // Choose the last spanning pair of entries as the basis to map.
            let k = m.entries().len();
            let mut basis = None;
            'outer: for i in (0..k).rev() {
                for j in (0..i).rev() {
                    let rows = [&m.entries()[i].0, &m.entries()[j].0];
                    if rank_of_rows(&rows, 2) == 2 {
                        basis = Some((j, i));
                        break 'outer;
                    }
                }
            }
            let (i, j) = basis.unwrap();
            let b = DMatrix::from_columns(&[m.entries()[i].0.clone(), m.entries()[j].0.clone()]);
            let to_canonical = b.try_inverse().unwrap();
            let image = m.gl_apply(&to_canonical).unwrap();
            assert!(image.is_obtuse(), "seed {seed}");
        }
    }

    #[test]
    fn random_multisets_are_seed_deterministic_and_spanning() {
        let a = VectorMultiset::random(2, 4, 7).unwrap();
        let b = VectorMultiset::random(2, 4, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.is_spanning());
        let c = VectorMultiset::random(3, 5, 99).unwrap();
        assert!(c.is_spanning());
        assert_eq!(c.len(), 5);
    }
}
