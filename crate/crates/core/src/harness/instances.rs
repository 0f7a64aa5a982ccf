//! Instance files, φ command-line specs, seeded batches, and hashing.

use super::HarnessError;
use crate::multisets::VectorMultiset;
use crate::phi::{MixTerm, OrliczFunction, PhiSpec};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

/// On-disk form of a generator multiset.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct InstanceFile {
    pub dimension: usize,
    pub vectors: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<usize>>,
}

impl InstanceFile {
    pub fn from_multiset(m: &VectorMultiset) -> Self {
        Self {
            dimension: m.dim(),
            vectors: m
                .entries()
                .iter()
                .map(|(v, _)| v.iter().copied().collect())
                .collect(),
            multiplicities: Some(m.entries().iter().map(|(_, k)| *k).collect()),
        }
    }

    pub fn to_multiset(&self) -> Result<VectorMultiset, HarnessError> {
        let vectors = self
            .vectors
            .iter()
            .map(|r| DVector::from_row_slice(r))
            .collect();
        VectorMultiset::new(self.dimension, vectors, self.multiplicities.clone())
            .map_err(HarnessError::from)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), HarnessError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Parses the command-line φ shorthand.
///
/// Accepted forms: `id`, `power:<p>`, `mix:<w>@<p>,<w>@<p>,...`,
/// `pwl:<x>,<y>;<x>,<y>;...`, or a raw JSON object.
pub fn parse_phi(text: &str) -> Result<OrliczFunction, HarnessError> {
    let bad = |msg: &str| HarnessError::BadPhiSpec(format!("{msg} in {text:?}"));
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let spec: PhiSpec =
            serde_json::from_str(trimmed).map_err(|e| bad(&format!("invalid JSON ({e})")))?;
        return OrliczFunction::new(spec).map_err(HarnessError::from);
    }
    if trimmed == "id" {
        return Ok(OrliczFunction::identity());
    }
    if let Some(rest) = trimmed.strip_prefix("power:") {
        let p: f64 = rest.parse().map_err(|_| bad("unreadable exponent"))?;
        return OrliczFunction::power(p).map_err(HarnessError::from);
    }
    if let Some(rest) = trimmed.strip_prefix("mix:") {
        let mut terms = Vec::new();
        for part in rest.split(',') {
            let (w, p) = part
                .split_once('@')
                .ok_or_else(|| bad("mix terms look like w@p"))?;
            terms.push(MixTerm {
                w: w.trim().parse().map_err(|_| bad("unreadable mix weight"))?,
                p: p.trim().parse().map_err(|_| bad("unreadable mix exponent"))?,
            });
        }
        return OrliczFunction::new(PhiSpec::Mix { terms }).map_err(HarnessError::from);
    }
    if let Some(rest) = trimmed.strip_prefix("pwl:") {
        let mut points = Vec::new();
        for pair in rest.split(';') {
            let (x, y) = pair
                .split_once(',')
                .ok_or_else(|| bad("pwl points look like x,y"))?;
            points.push([
                x.trim().parse().map_err(|_| bad("unreadable pwl x"))?,
                y.trim().parse().map_err(|_| bad("unreadable pwl y"))?,
            ]);
        }
        return OrliczFunction::new(PhiSpec::Pwl { points }).map_err(HarnessError::from);
    }
    Err(bad("unknown φ form"))
}

/// Canonical shorthand for reports; inverse-ish of `parse_phi`.
pub fn phi_label(phi: &OrliczFunction) -> String {
    match phi.spec() {
        PhiSpec::Power { p } if *p == 1.0 => "id".to_owned(),
        PhiSpec::Power { p } => format!("power:{p}"),
        PhiSpec::Mix { terms } => {
            let parts: Vec<String> = terms.iter().map(|t| format!("{}@{}", t.w, t.p)).collect();
            format!("mix:{}", parts.join(","))
        }
        PhiSpec::Pwl { points } => {
            let parts: Vec<String> = points.iter().map(|q| format!("{},{}", q[0], q[1])).collect();
            format!("pwl:{}", parts.join(";"))
        }
    }
}

/// Stable 12-hex-digit identifier of a (multiset, φ) pair.
pub fn instance_hash(m: &VectorMultiset, phi: &OrliczFunction) -> String {
    let mut hasher = Sha256::new();
    hasher.update(m.dim().to_le_bytes());
    for (v, k) in m.entries() {
        for c in v.iter() {
            hasher.update(c.to_bits().to_le_bytes());
        }
        hasher.update(k.to_le_bytes());
    }
    hasher.update(serde_json::to_string(phi.spec()).expect("specs serialize").as_bytes());
    let digest = hasher.finalize();
    digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

/// How an instance was constructed; used to decide whether an equality case
/// is expected. There is no general recognizer for "GL image of ...", so the
/// ground truth is carried from construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceKind {
    Random,
    GlOfPerp,
    GlOfObtuse,
    PerpPlusReversed,
    Custom,
}

#[derive(Clone, Debug)]
pub struct LabeledInstance {
    pub name: String,
    pub multiset: VectorMultiset,
    pub kind: InstanceKind,
}

impl LabeledInstance {
    pub fn custom(name: &str, multiset: VectorMultiset) -> Self {
        Self {
            name: name.to_owned(),
            multiset,
            kind: InstanceKind::Custom,
        }
    }
}

/// Random spanning multisets with entry counts cycling through 3, 4, 5.
pub fn random_batch(dim: usize, count: usize, seed: u64) -> Vec<LabeledInstance> {
    (0..count)
        .map(|i| {
            let m = 3 + (i % 3);
            let s = seed.wrapping_add(i as u64);
            LabeledInstance {
                name: format!("rand-d{dim}-m{m}-s{s}"),
                multiset: VectorMultiset::random(dim, m, s)
                    .expect("random multisets are spanning by construction"),
                kind: InstanceKind::Random,
            }
        })
        .collect()
}

/// Invertible matrices with entries from the standard normal, rejecting badly
/// conditioned draws.
pub fn random_gl(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    loop {
        let m = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        if m.determinant().abs() >= 0.2 {
            return m;
        }
    }
}

/// GL images of the canonical basis: the equality case of the volume-product
/// bound.
pub fn gl_perp_batch(dim: usize, count: usize, seed: u64) -> Vec<LabeledInstance> {
    (0..count)
        .map(|i| {
            let s = seed.wrapping_add(i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0x517A_11ED);
            let m = random_gl(dim, &mut rng);
            LabeledInstance {
                name: format!("glperp-d{dim}-s{s}"),
                multiset: VectorMultiset::canonical_basis(dim)
                    .gl_apply(&m)
                    .expect("random GL matrices are invertible"),
                kind: InstanceKind::GlOfPerp,
            }
        })
        .collect()
}

/// GL images of random obtuse sets: the equality case of the volume-ratio
/// bound.
pub fn gl_obtuse_batch(dim: usize, count: usize, seed: u64) -> Vec<LabeledInstance> {
    (0..count)
        .map(|i| {
            let s = seed.wrapping_add(i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0x0B7C_5E5E);
            let m = random_gl(dim, &mut rng);
            LabeledInstance {
                name: format!("globtuse-d{dim}-s{s}"),
                multiset: VectorMultiset::random_obtuse(dim, s)
                    .gl_apply(&m)
                    .expect("random GL matrices are invertible"),
                kind: InstanceKind::GlOfObtuse,
            }
        })
        .collect()
}

/// The canonical basis extended by a reversed, scaled first axis: a strict
/// case for the volume-product bound whenever φ is not the identity.
pub fn perp_plus_reversed(dim: usize, mu: f64) -> LabeledInstance {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for i in 0..dim {
        let mut r = vec![0.0; dim];
        r[i] = 1.0;
        rows.push(r);
    }
    let mut r = vec![0.0; dim];
    r[0] = -mu;
    rows.push(r);
    LabeledInstance {
        name: format!("perp-plus-rev-d{dim}-mu{mu}"),
        multiset: VectorMultiset::from_rows(dim, &rows).expect("rows are nonzero"),
        kind: InstanceKind::PerpPlusReversed,
    }
}
