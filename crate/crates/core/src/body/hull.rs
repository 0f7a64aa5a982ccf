//! Exact polytope plumbing: convex hulls of point sets in dimensions 2 and
//! 3, and bounded halfspace intersections computed through polar duality
//! around a strictly interior point.

use super::BodyError;
use nalgebra::DVector;
use std::collections::HashMap;

/// Relative visibility tolerance for the incremental 3D hull. Points closer
/// than this (times the diameter) to a supporting plane are treated as lying
/// on it, which keeps flat faces coarsely triangulated and well conditioned.
const HULL_EPS_REL: f64 = 1e-7;
/// Relative key pitch for deduplicating input points.
const DEDUPE_REL: f64 = 1e-9;

/// A bounded convex polytope with exact volume and centroid, stored as an
/// ordered polygon in 2D or a triangulated boundary in 3D.
#[derive(Clone, Debug)]
pub(crate) struct Polytope {
    dim: usize,
    /// Counterclockwise vertex loop (2D only).
    ring: Vec<[f64; 2]>,
    /// Hull vertices and outward-oriented triangles (3D only).
    mesh: Option<Hull3Mesh>,
    volume: f64,
    centroid: Vec<f64>,
}

#[derive(Clone, Debug)]
pub(crate) struct Hull3Mesh {
    pub points: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

impl Polytope {
    /// Convex hull of a point cloud.
    pub fn from_points(dim: usize, points: &[DVector<f64>]) -> Result<Self, BodyError> {
        match dim {
            2 => {
                let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
                let ring = chain_hull_2(&pts);
                Self::from_ring(ring)
            }
            3 => {
                let pts: Vec<[f64; 3]> = points.iter().map(|p| [p[0], p[1], p[2]]).collect();
                let mesh = convex_hull_3(&pts)?;
                Self::from_mesh(mesh)
            }
            d => Err(BodyError::UnsupportedDimension(d)),
        }
    }

    /// Bounded intersection of halfspaces `<x, a_k> <= b_k`, computed as the
    /// polar of the convex hull of the dual points `a_k / (b_k - <a_k, c>)`
    /// around the strictly interior point `c`.
    pub fn from_halfspaces(
        dim: usize,
        halfspaces: &[(DVector<f64>, f64)],
        interior: &DVector<f64>,
    ) -> Result<Self, BodyError> {
        if halfspaces.len() <= dim {
            return Err(BodyError::DegenerateBody);
        }
        let scale = halfspaces
            .iter()
            .map(|(a, _)| a.norm())
            .fold(0.0_f64, f64::max);
        let mut duals: Vec<DVector<f64>> = Vec::with_capacity(halfspaces.len());
        for (a, b) in halfspaces {
            let shifted = b - a.dot(interior);
            if shifted <= 1e-14 * scale.max(1.0) {
                return Err(BodyError::CenterNotInterior);
            }
            duals.push(a / shifted);
        }
        match dim {
            2 => {
                let pts: Vec<[f64; 2]> = duals.iter().map(|p| [p[0], p[1]]).collect();
                let ring = chain_hull_2(&pts);
                if ring.len() < 3 {
                    return Err(BodyError::DegenerateBody);
                }
                let dual_scale = ring
                    .iter()
                    .map(|p| p[0].abs().max(p[1].abs()))
                    .fold(0.0_f64, f64::max);
                let mut vertices = Vec::with_capacity(ring.len());
                for k in 0..ring.len() {
                    let p = ring[k];
                    let q = ring[(k + 1) % ring.len()];
                    let det = p[0] * q[1] - p[1] * q[0];
                    // A dual edge through the origin means the primal region
                    // is unbounded in that direction.
                    if det.abs() <= 1e-14 * dual_scale * dual_scale {
                        return Err(BodyError::DegenerateBody);
                    }
                    vertices.push([
                        (q[1] - p[1]) / det + interior[0],
                        (p[0] - q[0]) / det + interior[1],
                    ]);
                }
                Self::from_ring(normalize_ring(vertices))
            }
            3 => {
                let pts: Vec<[f64; 3]> = duals.iter().map(|p| [p[0], p[1], p[2]]).collect();
                let mesh = convex_hull_3(&pts)?;
                let dual_scale = mesh
                    .points
                    .iter()
                    .flat_map(|p| p.iter())
                    .fold(0.0_f64, |acc, c| acc.max(c.abs()));
                let mut vertices: Vec<[f64; 3]> = Vec::new();
                for tri in &mesh.triangles {
                    let (a, b, c) = (
                        mesh.points[tri[0]],
                        mesh.points[tri[1]],
                        mesh.points[tri[2]],
                    );
                    let det = det3(a, b, c);
                    if det.abs() <= 1e-14 * dual_scale.powi(3) {
                        return Err(BodyError::DegenerateBody);
                    }
                    let w = solve_unit_offsets(a, b, c, det);
                    vertices.push([
                        w[0] + interior[0],
                        w[1] + interior[1],
                        w[2] + interior[2],
                    ]);
                }
                let mesh = convex_hull_3(&vertices)?;
                Self::from_mesh(mesh)
            }
            d => Err(BodyError::UnsupportedDimension(d)),
        }
    }

    fn from_ring(ring: Vec<[f64; 2]>) -> Result<Self, BodyError> {
        if ring.len() < 3 {
            return Err(BodyError::DegenerateBody);
        }
        let r = ring[0];
        let mut area2 = 0.0;
        let mut cx = 0.0;
        let mut cy = 0.0;
        for k in 1..ring.len() - 1 {
            let p = ring[k];
            let q = ring[k + 1];
            let cross = (p[0] - r[0]) * (q[1] - r[1]) - (p[1] - r[1]) * (q[0] - r[0]);
            area2 += cross;
            cx += cross * (r[0] + p[0] + q[0]) / 3.0;
            cy += cross * (r[1] + p[1] + q[1]) / 3.0;
        }
        let scale = ring
            .iter()
            .flat_map(|p| p.iter())
            .fold(0.0_f64, |acc, c| acc.max(c.abs()));
        if area2 <= 1e-20 * scale * scale {
            return Err(BodyError::DegenerateBody);
        }
        Ok(Self {
            dim: 2,
            volume: area2 / 2.0,
            centroid: vec![cx / area2, cy / area2],
            ring,
            mesh: None,
        })
    }

    fn from_mesh(mesh: Hull3Mesh) -> Result<Self, BodyError> {
        let mut vol6 = 0.0;
        let mut c = [0.0_f64; 3];
        for tri in &mesh.triangles {
            let (a, b, d) = (
                mesh.points[tri[0]],
                mesh.points[tri[1]],
                mesh.points[tri[2]],
            );
            let det = det3(a, b, d);
            vol6 += det;
            for j in 0..3 {
                c[j] += det * (a[j] + b[j] + d[j]) / 4.0;
            }
        }
        let scale = mesh
            .points
            .iter()
            .flat_map(|p| p.iter())
            .fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if vol6 <= 1e-20 * scale.powi(3) {
            return Err(BodyError::DegenerateBody);
        }
        Ok(Self {
            dim: 3,
            ring: Vec::new(),
            volume: vol6 / 6.0,
            centroid: vec![c[0] / vol6, c[1] / vol6, c[2] / vol6],
            mesh: Some(mesh),
        })
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn centroid(&self) -> DVector<f64> {
        DVector::from_row_slice(&self.centroid)
    }

    pub fn vertices(&self) -> Vec<DVector<f64>> {
        match self.dim {
            2 => self
                .ring
                .iter()
                .map(|p| DVector::from_row_slice(p))
                .collect(),
            _ => self
                .mesh
                .as_ref()
                .expect("3D polytope carries a mesh")
                .points
                .iter()
                .map(|p| DVector::from_row_slice(p))
                .collect(),
        }
    }

    /// Whether `x` sits at distance at least `margin` inside every facet.
    pub fn contains_with_margin(&self, x: &DVector<f64>, margin: f64) -> bool {
        match self.dim {
            2 => {
                let p = [x[0], x[1]];
                for k in 0..self.ring.len() {
                    let a = self.ring[k];
                    let b = self.ring[(k + 1) % self.ring.len()];
                    let ex = b[0] - a[0];
                    let ey = b[1] - a[1];
                    let len = (ex * ex + ey * ey).sqrt();
                    if len == 0.0 {
                        continue;
                    }
                    let cross = ex * (p[1] - a[1]) - ey * (p[0] - a[0]);
                    if cross < margin * len {
                        return false;
                    }
                }
                true
            }
            _ => {
                let mesh = self.mesh.as_ref().expect("3D polytope carries a mesh");
                let p = [x[0], x[1], x[2]];
                for tri in &mesh.triangles {
                    let a = mesh.points[tri[0]];
                    let n = triangle_normal(
                        a,
                        mesh.points[tri[1]],
                        mesh.points[tri[2]],
                    );
                    let len = norm3(n);
                    if len == 0.0 {
                        continue;
                    }
                    let d = (dot3(n, p) - dot3(n, a)) / len;
                    if d > -margin {
                        return false;
                    }
                }
                true
            }
        }
    }
}

fn normalize_ring(mut ring: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let mut area2 = 0.0;
    for k in 0..ring.len() {
        let p = ring[k];
        let q = ring[(k + 1) % ring.len()];
        area2 += p[0] * q[1] - p[1] * q[0];
    }
    if area2 < 0.0 {
        ring.reverse();
    }
    ring
}

/// Monotone-chain convex hull; returns a counterclockwise ring without
/// collinear interior points. Fewer than 3 output points means the input
/// was rank deficient.
pub(crate) fn chain_hull_2(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut extent = 0.0_f64;
    for j in 0..2 {
        let lo = pts.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min);
        let hi = pts.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max);
        extent = extent.max(hi - lo);
    }
    // Merge near-coincident points before chaining. Noise-level duplicates
    // otherwise survive as distinct hull vertices and later poison the
    // near-singular edge solves in the halfspace duality path.
    let merge_tol = DEDUPE_REL * extent.max(1e-300);
    let mut merged: Vec<[f64; 2]> = Vec::with_capacity(pts.len());
    'next_point: for p in pts {
        for q in merged.iter().rev() {
            if p[0] - q[0] > merge_tol {
                break;
            }
            if (p[1] - q[1]).abs() <= merge_tol {
                continue 'next_point;
            }
        }
        merged.push(p);
    }
    let mut pts = merged;
    pts.dedup_by(|a, b| a == b);
    if pts.len() < 3 {
        return pts;
    }
    let scale = pts
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0_f64, |acc, c| acc.max(c.abs()));
    let eps = 1e-14 * scale * scale;
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let build = |iter: &mut dyn Iterator<Item = [f64; 2]>| {
        let mut chain: Vec<[f64; 2]> = Vec::new();
        for p in iter {
            while chain.len() >= 2
                && cross(chain[chain.len() - 2], chain[chain.len() - 1], p) <= eps
            {
                chain.pop();
            }
            chain.push(p);
        }
        chain
    };
    let lower = build(&mut pts.iter().copied());
    let mut upper = build(&mut pts.iter().rev().copied());
    let mut ring = lower;
    ring.pop();
    upper.pop();
    ring.extend(upper);
    ring
}

/// Incremental convex hull with tolerance-based visibility and an adaptive
/// retry when numeric noise produces an inconsistent horizon.
pub(crate) fn convex_hull_3(input: &[[f64; 3]]) -> Result<Hull3Mesh, BodyError> {
    let mut extent = 0.0_f64;
    for j in 0..3 {
        let lo = input.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min);
        let hi = input.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max);
        extent = extent.max(hi - lo);
    }
    if !extent.is_finite() || extent <= 0.0 {
        return Err(BodyError::DegenerateBody);
    }
    let pitch = DEDUPE_REL * extent;
    let mut seen = HashMap::new();
    let mut points: Vec<[f64; 3]> = Vec::new();
    for p in input {
        let key = (
            (p[0] / pitch).round() as i64,
            (p[1] / pitch).round() as i64,
            (p[2] / pitch).round() as i64,
        );
        if seen.insert(key, ()).is_none() {
            points.push(*p);
        }
    }
    if points.len() < 4 {
        return Err(BodyError::DegenerateBody);
    }

    let seeds = pick_seed_tetrahedron(&points, extent)?;
    let reference = centroid4(&points, &seeds);
    let mut faces: Vec<Face> = Vec::new();
    let combos = [
        [seeds[0], seeds[1], seeds[2]],
        [seeds[0], seeds[1], seeds[3]],
        [seeds[0], seeds[2], seeds[3]],
        [seeds[1], seeds[2], seeds[3]],
    ];
    for c in combos {
        faces.push(Face::oriented(&points, c, reference));
    }

    let mut order: Vec<usize> = (0..points.len())
        .filter(|i| !seeds.contains(i))
        .collect();
    let dist = |i: usize| {
        let p = points[i];
        let d = [
            p[0] - reference[0],
            p[1] - reference[1],
            p[2] - reference[2],
        ];
        dot3(d, d)
    };
    order.sort_by(|&a, &b| dist(b).total_cmp(&dist(a)).then(a.cmp(&b)));

    let base_eps = HULL_EPS_REL * extent;
    for idx in order {
        insert_hull_point(&mut faces, &points, reference, idx, base_eps);
    }

    let alive: Vec<&Face> = faces.iter().filter(|f| f.alive).collect();
    let mut remap: HashMap<usize, usize> = HashMap::new();
    let mut out_points = Vec::new();
    let mut triangles = Vec::new();
    for f in alive {
        let mut tri = [0usize; 3];
        for (slot, &v) in f.verts.iter().enumerate() {
            let id = *remap.entry(v).or_insert_with(|| {
                out_points.push(points[v]);
                out_points.len() - 1
            });
            tri[slot] = id;
        }
        triangles.push(tri);
    }
    Ok(Hull3Mesh {
        points: out_points,
        triangles,
    })
}

struct Face {
    verts: [usize; 3],
    normal: [f64; 3],
    offset: f64,
    alive: bool,
}

impl Face {
    fn oriented(points: &[[f64; 3]], mut verts: [usize; 3], reference: [f64; 3]) -> Self {
        let mut normal = triangle_normal(
            points[verts[0]],
            points[verts[1]],
            points[verts[2]],
        );
        let len = norm3(normal);
        for c in &mut normal {
            *c /= len;
        }
        let mut offset = dot3(normal, points[verts[0]]);
        if dot3(normal, reference) > offset {
            normal = [-normal[0], -normal[1], -normal[2]];
            offset = -offset;
            verts.swap(1, 2);
        }
        Self {
            verts,
            normal,
            offset,
            alive: true,
        }
    }

    fn sees(&self, p: [f64; 3], eps: f64) -> bool {
        dot3(self.normal, p) - self.offset > eps
    }
}

fn insert_hull_point(
    faces: &mut Vec<Face>,
    points: &[[f64; 3]],
    reference: [f64; 3],
    idx: usize,
    base_eps: f64,
) {
    let p = points[idx];
    let mut eps = base_eps;
    for _attempt in 0..3 {
        let visible: Vec<usize> = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive && f.sees(p, eps))
            .map(|(i, _)| i)
            .collect();
        if visible.is_empty() {
            return;
        }
        // Horizon edges appear in exactly one visible face.
        let mut edge_count: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for &fi in &visible {
            let v = faces[fi].verts;
            for (a, b) in [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])] {
                let key = (a.min(b), a.max(b));
                let entry = edge_count.entry(key).or_insert((0, a));
                entry.0 += 1;
                entry.1 = a;
            }
        }
        let horizon: Vec<(usize, usize)> = edge_count
            .iter()
            .filter(|(_, &(count, _))| count == 1)
            .map(|(&(lo, hi), &(_, tail))| if tail == lo { (lo, hi) } else { (hi, lo) })
            .collect();
        if horizon_is_single_cycle(&horizon) {
            for &fi in &visible {
                faces[fi].alive = false;
            }
            for &(a, b) in &horizon {
                faces.push(Face::oriented(points, [a, b, idx], reference));
            }
            return;
        }
        eps *= 10.0;
    }
    // The point is within a few tolerance widths of the hull: absorb it.
}

fn horizon_is_single_cycle(edges: &[(usize, usize)]) -> bool {
    if edges.len() < 3 {
        return false;
    }
    let mut next: HashMap<usize, usize> = HashMap::new();
    for &(a, b) in edges {
        if next.insert(a, b).is_some() {
            return false;
        }
    }
    let start = edges[0].0;
    let mut at = start;
    for _ in 0..edges.len() {
        match next.get(&at) {
            Some(&to) => at = to,
            None => return false,
        }
    }
    at == start && next.len() == edges.len()
}

fn pick_seed_tetrahedron(points: &[[f64; 3]], extent: f64) -> Result<[usize; 4], BodyError> {
    let i0 = (0..points.len())
        .min_by(|&a, &b| {
            points[a][0]
                .total_cmp(&points[b][0])
                .then(points[a][1].total_cmp(&points[b][1]))
                .then(points[a][2].total_cmp(&points[b][2]))
        })
        .expect("nonempty");
    let d2 = |a: [f64; 3], b: [f64; 3]| {
        let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
        dot3(d, d)
    };
    let i1 = (0..points.len())
        .max_by(|&a, &b| d2(points[a], points[i0]).total_cmp(&d2(points[b], points[i0])))
        .expect("nonempty");
    if d2(points[i0], points[i1]) <= (1e-9 * extent).powi(2) {
        return Err(BodyError::DegenerateBody);
    }
    let area2 = |c: usize| {
        let n = triangle_normal(points[i0], points[i1], points[c]);
        dot3(n, n)
    };
    let i2 = (0..points.len())
        .max_by(|&a, &b| area2(a).total_cmp(&area2(b)))
        .expect("nonempty");
    if area2(i2) <= (1e-12 * extent * extent).powi(2) {
        return Err(BodyError::DegenerateBody);
    }
    let vol = |d: usize| {
        let a = points[i0];
        det3(
            sub3(points[i1], a),
            sub3(points[i2], a),
            sub3(points[d], a),
        )
        .abs()
    };
    let i3 = (0..points.len())
        .max_by(|&a, &b| vol(a).total_cmp(&vol(b)))
        .expect("nonempty");
    if vol(i3) <= 1e-14 * extent.powi(3) {
        return Err(BodyError::DegenerateBody);
    }
    Ok([i0, i1, i2, i3])
}

fn centroid4(points: &[[f64; 3]], seeds: &[usize; 4]) -> [f64; 3] {
    let mut c = [0.0; 3];
    for &s in seeds {
        for j in 0..3 {
            c[j] += points[s][j] / 4.0;
        }
    }
    c
}

fn triangle_normal(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> [f64; 3] {
    cross3(sub3(b, a), sub3(c, a))
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

fn det3(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Solves `<p, w> = 1` for the three rows `a, b, c` given their determinant.
fn solve_unit_offsets(a: [f64; 3], b: [f64; 3], c: [f64; 3], det: f64) -> [f64; 3] {
    // Cramer's rule with the all-ones right-hand side.
    let dx = det3([1.0, a[1], a[2]], [1.0, b[1], b[2]], [1.0, c[1], c[2]]);
    let dy = det3([a[0], 1.0, a[2]], [b[0], 1.0, b[2]], [c[0], 1.0, c[2]]);
    let dz = det3([a[0], a[1], 1.0], [b[0], b[1], 1.0], [c[0], c[1], 1.0]);
    [dx / det, dy / det, dz / det]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dv(coords: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(coords)
    }

    #[test]
    fn square_hull_has_area_one() {
        let pts = vec![
            dv(&[0.0, 0.0]),
            dv(&[1.0, 0.0]),
            dv(&[1.0, 1.0]),
            dv(&[0.0, 1.0]),
            dv(&[0.5, 0.5]),
            dv(&[0.25, 0.75]),
        ];
        let poly = Polytope::from_points(2, &pts).unwrap();
        assert_relative_eq!(poly.volume(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(poly.centroid()[0], 0.5, epsilon = 1e-12);
        assert_eq!(poly.vertices().len(), 4);
        assert!(poly.contains_with_margin(&dv(&[0.5, 0.5]), 0.49));
        assert!(!poly.contains_with_margin(&dv(&[0.5, 0.5]), 0.51));
    }

    #[test]
    fn collinear_points_are_degenerate() {
        let pts = vec![dv(&[0.0, 0.0]), dv(&[1.0, 1.0]), dv(&[2.0, 2.0])];
        assert_eq!(
            Polytope::from_points(2, &pts).unwrap_err(),
            BodyError::DegenerateBody
        );
    }

    #[test]
    fn cube_hull_in_three_dimensions() {
        let mut pts = Vec::new();
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    pts.push(dv(&[x, y, z]));
                }
            }
        }
        // Interior and face points should be absorbed without harm.
        pts.push(dv(&[0.5, 0.5, 0.5]));
        pts.push(dv(&[0.5, 0.5, 1.0]));
        let poly = Polytope::from_points(3, &pts).unwrap();
        assert_relative_eq!(poly.volume(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(poly.centroid()[2], 0.5, epsilon = 1e-9);
        assert_eq!(poly.vertices().len(), 8);
    }

    #[test]
    fn coplanar_points_are_degenerate_in_three_dimensions() {
        let pts = vec![
            dv(&[0.0, 0.0, 0.0]),
            dv(&[1.0, 0.0, 0.0]),
            dv(&[0.0, 1.0, 0.0]),
            dv(&[1.0, 1.0, 0.0]),
        ];
        assert_eq!(
            Polytope::from_points(3, &pts).unwrap_err(),
            BodyError::DegenerateBody
        );
    }

    #[test]
    fn halfspace_intersection_recovers_the_cube() {
        let halfspaces = vec![
            (dv(&[1.0, 0.0]), 1.0),
            (dv(&[-1.0, 0.0]), 1.0),
            (dv(&[0.0, 1.0]), 1.0),
            (dv(&[0.0, -1.0]), 1.0),
            // A redundant constraint changes nothing.
            (dv(&[1.0, 1.0]), 5.0),
        ];
        let poly = Polytope::from_halfspaces(2, &halfspaces, &dv(&[0.1, -0.2])).unwrap();
        assert_relative_eq!(poly.volume(), 4.0, epsilon = 1e-10);
        assert_eq!(poly.vertices().len(), 4);

        let mut hs3 = Vec::new();
        for j in 0..3 {
            for sign in [1.0, -1.0] {
                let mut a = [0.0; 3];
                a[j] = sign;
                hs3.push((dv(&a), 1.0));
            }
        }
        hs3.push((dv(&[0.6, 0.6, 0.6]), 9.0));
        let poly = Polytope::from_halfspaces(3, &hs3, &dv(&[0.0, 0.0, 0.0])).unwrap();
        assert_relative_eq!(poly.volume(), 8.0, epsilon = 1e-9);
        assert_eq!(poly.vertices().len(), 8);
    }

    #[test]
    fn unbounded_intersections_are_rejected() {
        // Only "x <= 1" style constraints in the upper halfplane: unbounded.
        let halfspaces = vec![
            (dv(&[1.0, 0.0]), 1.0),
            (dv(&[-1.0, 0.0]), 1.0),
            (dv(&[0.0, 1.0]), 1.0),
            (dv(&[
                std::f64::consts::FRAC_1_SQRT_2,
                std::f64::consts::FRAC_1_SQRT_2,
            ]), 1.0),
        ];
        assert!(Polytope::from_halfspaces(2, &halfspaces, &dv(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn octahedron_volume_from_vertices() {
        let pts = vec![
            dv(&[1.0, 0.0, 0.0]),
            dv(&[-1.0, 0.0, 0.0]),
            dv(&[0.0, 1.0, 0.0]),
            dv(&[0.0, -1.0, 0.0]),
            dv(&[0.0, 0.0, 1.0]),
            dv(&[0.0, 0.0, -1.0]),
        ];
        let poly = Polytope::from_points(3, &pts).unwrap();
        assert_relative_eq!(poly.volume(), 4.0 / 3.0, epsilon = 1e-12);
        assert_eq!(poly.vertices().len(), 6);
        assert_eq!(
            poly.mesh.as_ref().map(|m| m.triangles.len()),
            Some(8)
        );
    }

    #[test]
    fn dense_sphere_samples_have_near_ball_volume() {
        let dirs = super::super::direction_set(3, 512);
        let pts: Vec<DVector<f64>> = dirs.to_vec();
        let poly = Polytope::from_points(3, &pts).unwrap();
        let ball = 4.0 * std::f64::consts::PI / 3.0;
        assert!(poly.volume() < ball);
        assert!(poly.volume() > 0.98 * ball, "volume = {}", poly.volume());
    }
}
