//! From a mesh of Euclidean triangles to a unit-equilateral simplicial surface.
//!
//! Three stages, each a [`GeometricSurface`] → [`GeometricSurface`] map except
//! the last:
//!
//! 1. [`uniformize_sizes`] 4-splits triangles through their edge midpoints
//!    until the largest diameter is at most twice the smallest, keeping
//!    glued neighbours within one split of each other;
//! 2. [`repair_hanging_vertices`] bisects every triangle whose side carries a
//!    neighbour's midpoint, from that midpoint to the opposite vertex;
//! 3. [`to_equilateral`] declares every triangle unit equilateral and
//!    measures the bilipschitz distortion of the affine identification.
//!
//! The geometry is intrinsic: only edge lengths are stored.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::surface::{SimplicialSurface, SurfaceError};

/// Relative tolerance for glued edges of unequal length.
pub const GLUING_TOLERANCE: f64 = 1e-9;
/// Smallest singular value accepted for the affine identification.
pub const DEGENERATE_SIGMA: f64 = 1e-12;
pub const MIN_ANGLE: f64 = PI / 4.0;
pub const MAX_ANGLE: f64 = 3.0 * PI / 7.0;

/// Certified distortion after size uniformization.
pub const UNIFORMIZED_BOUND: f64 = 8.0;
/// Certified distortion after hanging-vertex repair.
pub const REPAIRED_BOUND: f64 = 32.0;
/// Certified distortion of the whole pipeline.
pub const PIPELINE_BOUND: f64 = 33.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquilateralizeError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("edge ({u}, {v}) has no length")]
    MissingLength { u: usize, v: usize },
    #[error("edge ({u}, {v}) is glued with lengths {first} and {second}")]
    GluingMismatch { u: usize, v: usize, first: f64, second: f64 },
    #[error("triangle {triangle} violates the strict triangle inequality")]
    TriangleInequality { triangle: usize },
    #[error("triangle {triangle} has angle {angle:.6} outside (π/4, 3π/7)")]
    NonAdmissibleAngles { triangle: usize, angle: f64 },
    #[error("edge ({u}, {v}) faces more than two subedges")]
    BalanceViolated { u: usize, v: usize },
    #[error("triangulation still has hanging vertices")]
    HangingVertices,
    #[error("triangle {triangle} is degenerate (smallest singular value {sigma:e})")]
    DegenerateTriangle { triangle: usize, sigma: f64 },
}

#[inline]
fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// A closed surface assembled from Euclidean triangles, possibly with hanging
/// vertices (a vertex of one triangle lying inside a side of its neighbour).
#[derive(Debug, Clone)]
pub struct GeometricSurface {
    vertex_count: usize,
    triangles: Vec<[usize; 3]>,
    /// Number of 4-splits separating each triangle from its input ancestor.
    levels: Vec<u32>,
    lengths: BTreeMap<(usize, usize), f64>,
    midpoints: BTreeMap<(usize, usize), usize>,
}

impl GeometricSurface {
    /// Builds from vertex coordinates; side lengths are Euclidean distances.
    pub fn from_coordinates(points: &[[f64; 3]], triangles: &[[usize; 3]]) -> Result<Self, EquilateralizeError> {
        let surface = SimplicialSurface::new(points.len(), triangles)?;
        let lengths = surface
            .edges()
            .iter()
            .map(|&[u, v]| {
                let d: f64 = (0..3).map(|k| (points[u][k] - points[v][k]).powi(2)).sum();
                ((u, v), d.sqrt())
            })
            .collect();
        Self::checked(surface.vertex_count(), triangles.to_vec(), lengths)
    }

    /// Builds from explicit edge lengths. An edge listed twice must agree to
    /// within [`GLUING_TOLERANCE`].
    pub fn from_edge_lengths(
        vertex_count: usize,
        triangles: &[[usize; 3]],
        edge_lengths: &[(usize, usize, f64)],
    ) -> Result<Self, EquilateralizeError> {
        let surface = SimplicialSurface::new(vertex_count, triangles)?;
        let mut lengths: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(u, v, l) in edge_lengths {
            let k = key(u, v);
            if let Some(&prev) = lengths.get(&k) {
                if (prev - l).abs() > GLUING_TOLERANCE * prev.abs().max(l.abs()) {
                    return Err(EquilateralizeError::GluingMismatch {
                        u: k.0,
                        v: k.1,
                        first: prev,
                        second: l,
                    });
                }
            } else {
                lengths.insert(k, l);
            }
        }
        for &[u, v] in surface.edges() {
            if !lengths.contains_key(&(u, v)) {
                return Err(EquilateralizeError::MissingLength { u, v });
            }
        }
        Self::checked(vertex_count, triangles.to_vec(), lengths)
    }

    /// Every edge of `surface` at length `scale`.
    pub fn uniform(surface: &SimplicialSurface, scale: f64) -> Self {
        let lengths = surface.edges().iter().map(|&[u, v]| ((u, v), scale)).collect();
        Self::checked(surface.vertex_count(), surface.triangles().to_vec(), lengths)
            .expect("uniform metric on a valid surface")
    }

    fn checked(
        vertex_count: usize,
        triangles: Vec<[usize; 3]>,
        lengths: BTreeMap<(usize, usize), f64>,
    ) -> Result<Self, EquilateralizeError> {
        let g = Self {
            vertex_count,
            levels: vec![0; triangles.len()],
            triangles,
            lengths,
            midpoints: BTreeMap::new(),
        };
        for t in 0..g.triangles.len() {
            let [a, b, c] = g.sides(t);
            if !(a > 0.0 && b > 0.0 && c > 0.0 && a < b + c && b < a + c && c < a + b) {
                return Err(EquilateralizeError::TriangleInequality { triangle: t });
            }
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn length(&self, u: usize, v: usize) -> f64 {
        self.lengths[&key(u, v)]
    }

    /// Side lengths `[|ab|, |bc|, |ca|]` of triangle `t = [a, b, c]`.
    pub fn sides(&self, t: usize) -> [f64; 3] {
        let [a, b, c] = self.triangles[t];
        [self.length(a, b), self.length(b, c), self.length(c, a)]
    }

    pub fn diameter(&self, t: usize) -> f64 {
        self.sides(t).into_iter().fold(0.0, f64::max)
    }

    /// Interior angles at `[a, b, c]`.
    pub fn angles(&self, t: usize) -> [f64; 3] {
        triangle_angles(self.sides(t))
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| heron(self.sides(t))).sum()
    }

    pub fn check_admissible(&self) -> Result<(), EquilateralizeError> {
        for t in 0..self.triangles.len() {
            for angle in self.angles(t) {
                if !(angle > MIN_ANGLE && angle < MAX_ANGLE) {
                    return Err(EquilateralizeError::NonAdmissibleAngles { triangle: t, angle });
                }
            }
        }
        Ok(())
    }

    fn edge_use(&self) -> HashMap<(usize, usize), usize> {
        let mut uses = HashMap::new();
        for &[a, b, c] in &self.triangles {
            for (u, v) in [(a, b), (b, c), (c, a)] {
                *uses.entry(key(u, v)).or_insert(0) += 1;
            }
        }
        uses
    }

    /// Sides used by one triangle whose two halves are used on the other side.
    fn hanging_sides(&self, uses: &HashMap<(usize, usize), usize>) -> Vec<(usize, usize)> {
        let mut sides: Vec<(usize, usize)> = uses
            .iter()
            .filter(|&(k, &c)| {
                c == 1
                    && self
                        .midpoints
                        .get(k)
                        .is_some_and(|&m| uses.contains_key(&key(k.0, m)) && uses.contains_key(&key(m, k.1)))
            })
            .map(|(&k, _)| k)
            .collect();
        sides.sort_unstable();
        sides
    }

    pub fn hanging_vertex_count(&self) -> usize {
        self.hanging_sides(&self.edge_use()).len()
    }

    /// χ of the polygonal complex: a side carrying a hanging vertex is the
    /// union of the two finer edges, not an edge of its own.
    pub fn euler_characteristic(&self) -> i64 {
        let uses = self.edge_use();
        let edges = uses.len() - self.hanging_sides(&uses).len();
        let mut used = vec![false; self.vertex_count];
        for t in &self.triangles {
            for &v in t {
                used[v] = true;
            }
        }
        let vertices = used.iter().filter(|&&u| u).count();
        vertices as i64 - edges as i64 + self.triangles.len() as i64
    }

    fn midpoint(&mut self, u: usize, v: usize) -> usize {
        let k = key(u, v);
        if let Some(&m) = self.midpoints.get(&k) {
            return m;
        }
        let m = self.vertex_count;
        self.vertex_count += 1;
        let half = self.lengths[&k] / 2.0;
        self.lengths.insert(key(u, m), half);
        self.lengths.insert(key(m, v), half);
        self.midpoints.insert(k, m);
        m
    }

    /// Replaces triangle `t` by its four midpoint children; the corner
    /// children keep their parent's slot order, the middle one goes last.
    fn split(&mut self, t: usize) -> [usize; 4] {
        let [a, b, c] = self.triangles[t];
        let [lab, lbc, lca] = self.sides(t);
        let (ab, bc, ca) = (self.midpoint(a, b), self.midpoint(b, c), self.midpoint(c, a));
        self.lengths.insert(key(ab, bc), lca / 2.0);
        self.lengths.insert(key(bc, ca), lab / 2.0);
        self.lengths.insert(key(ca, ab), lbc / 2.0);
        let level = self.levels[t] + 1;
        self.triangles[t] = [a, ab, ca];
        let first = self.triangles.len();
        self.triangles.push([ab, b, bc]);
        self.triangles.push([ca, bc, c]);
        self.triangles.push([ab, bc, ca]);
        self.levels[t] = level;
        self.levels.extend([level; 3]);
        [t, first, first + 1, first + 2]
    }

    /// Splits triangle `t` from the midpoint of side `(u, v)` to the opposite vertex.
    fn bisect(&mut self, t: usize, u: usize, v: usize) {
        let tri = self.triangles[t];
        let k = (0..3)
            .find(|&k| key(tri[k], tri[(k + 1) % 3]) == key(u, v))
            .expect("bisected side belongs to the triangle");
        let (a, b, c) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
        let m = self.midpoints[&key(a, b)];
        let (lab, lbc, lca) = (self.length(a, b), self.length(b, c), self.length(c, a));
        let median = ((2.0 * lca * lca + 2.0 * lbc * lbc - lab * lab) / 4.0).sqrt();
        self.lengths.insert(key(m, c), median);
        self.triangles[t] = [a, m, c];
        self.triangles.push([m, b, c]);
        self.levels.push(self.levels[t]);
    }
}

pub fn triangle_angles([ab, bc, ca]: [f64; 3]) -> [f64; 3] {
    let angle = |opposite: f64, x: f64, y: f64| ((x * x + y * y - opposite * opposite) / (2.0 * x * y)).clamp(-1.0, 1.0).acos();
    [angle(bc, ab, ca), angle(ca, ab, bc), angle(ab, bc, ca)]
}

fn heron([a, b, c]: [f64; 3]) -> f64 {
    let s = (a + b + c) / 2.0;
    (s * (s - a) * (s - b) * (s - c)).max(0.0).sqrt()
}

/// Singular values `(σ₁, σ₂)` of the linear part of the affine map sending
/// the triangle with sides `[|ab|, |bc|, |ca|]` onto the equilateral triangle
/// of side `target`, vertex to vertex.
pub fn affine_singular_values([ab, bc, ca]: [f64; 3], target: f64) -> (f64, f64) {
    // Source: a = 0, b = (ab, 0), c = (x, y).
    let x = (ab * ab + ca * ca - bc * bc) / (2.0 * ab);
    let y = (ca * ca - x * x).max(0.0).sqrt();
    if y == 0.0 {
        return (f64::INFINITY, 0.0);
    }
    // Q = [[target, target/2], [0, target·√3/2]], P = [[ab, x], [0, y]].
    let h = target * 3f64.sqrt() / 2.0;
    let (p11, p12, p22) = (ab, x, y);
    // P⁻¹ = [[1/p11, -p12/(p11 p22)], [0, 1/p22]]
    let m11 = target / p11;
    let m12 = -target * p12 / (p11 * p22) + target / 2.0 / p22;
    let m21 = 0.0;
    let m22 = h / p22;
    let frob = m11 * m11 + m12 * m12 + m21 * m21 + m22 * m22;
    let det = (m11 * m22 - m12 * m21).abs();
    let disc = (frob * frob - 4.0 * det * det).max(0.0).sqrt();
    let s1 = ((frob + disc) / 2.0).sqrt();
    let s2 = det / s1;
    (s1, s2)
}

/// Bilipschitz constant `max(σ₁, 1/σ₂)` of that affine map.
pub fn affine_distortion(sides: [f64; 3], target: f64) -> f64 {
    let (s1, s2) = affine_singular_values(sides, target);
    s1.max(1.0 / s2)
}

/// 4-split until `max diam ≤ 2·min diam`, then balance so that no side
/// faces more than two edges of its neighbour.
pub fn uniformize_sizes(g: &GeometricSurface) -> Result<GeometricSurface, EquilateralizeError> {
    g.check_admissible()?;
    let mut out = g.clone();
    let min_diam = (0..out.triangle_count()).map(|t| out.diameter(t)).fold(f64::INFINITY, f64::min);
    loop {
        let big: Vec<usize> = (0..out.triangle_count())
            .filter(|&t| out.diameter(t) > 2.0 * min_diam * (1.0 + 1e-12))
            .collect();
        if big.is_empty() {
            break;
        }
        for t in big {
            out.split(t);
        }
    }
    balance(&mut out);
    Ok(out)
}

/// Splits any triangle with a side whose neighbour is refined two or more
/// levels deeper along that side.
pub(crate) fn balance(g: &mut GeometricSurface) {
    loop {
        let uses = g.edge_use();
        let too_coarse: Vec<usize> = (0..g.triangle_count())
            .filter(|&t| {
                let [a, b, c] = g.triangles[t];
                [(a, b), (b, c), (c, a)].into_iter().any(|(u, v)| {
                    if uses[&key(u, v)] == 2 {
                        return false;
                    }
                    match g.midpoints.get(&key(u, v)) {
                        Some(&m) => !(uses.contains_key(&key(u, m)) && uses.contains_key(&key(m, v))),
                        None => false,
                    }
                })
            })
            .collect();
        if too_coarse.is_empty() {
            return;
        }
        for t in too_coarse {
            g.split(t);
        }
    }
}

/// Bisects triangles from hanging midpoints to opposite vertices until every
/// edge is the side of exactly two triangles.
pub fn repair_hanging_vertices(g: &GeometricSurface) -> Result<GeometricSurface, EquilateralizeError> {
    let mut out = g.clone();
    let halves: HashMap<(usize, usize), (usize, usize)> = out
        .midpoints
        .iter()
        .flat_map(|(&(u, v), &m)| [(key(u, m), (u, v)), (key(m, v), (u, v))])
        .collect();
    loop {
        let uses = out.edge_use();
        let hanging = out.hanging_sides(&uses);
        // Any other singly used edge must be the finer half of a hanging side.
        for (&k, &c) in &uses {
            if c == 1 && hanging.binary_search(&k).is_err() {
                let ok = halves.get(&k).is_some_and(|p| hanging.binary_search(p).is_ok());
                if !ok {
                    let (u, v) = halves.get(&k).copied().unwrap_or(k);
                    return Err(EquilateralizeError::BalanceViolated { u, v });
                }
            }
        }
        if hanging.is_empty() {
            return Ok(out);
        }
        let mut todo: Vec<(usize, usize, usize)> = Vec::new();
        let mut claimed = vec![false; out.triangle_count()];
        for t in 0..out.triangle_count() {
            let [a, b, c] = out.triangles[t];
            for (u, v) in [(a, b), (b, c), (c, a)] {
                if !claimed[t] && hanging.binary_search(&key(u, v)).is_ok() {
                    claimed[t] = true;
                    todo.push((t, u, v));
                }
            }
        }
        for (t, u, v) in todo {
            out.bisect(t, u, v);
        }
        let after = out.hanging_vertex_count();
        assert!(after < hanging.len(), "repair must remove hanging vertices");
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StageBounds {
    pub uniformized: f64,
    pub repaired: f64,
    pub overall: f64,
}

impl Default for StageBounds {
    fn default() -> Self {
        Self {
            uniformized: UNIFORMIZED_BOUND,
            repaired: REPAIRED_BOUND,
            overall: PIPELINE_BOUND,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DistortionReport {
    pub per_triangle_bilipschitz: Vec<f64>,
    pub global_k: f64,
    /// Side length of the equilateral model triangle before normalizing to 1.
    pub scale: f64,
    pub stage_bounds: StageBounds,
    /// area(equilateral surface at `scale`) / area(input).
    pub area_ratio: f64,
    pub area_ratio_within_bounds: bool,
}

/// Declares every triangle unit equilateral.
///
/// The model side length `ℓ` is chosen to minimize the worst distortion:
/// with `A = max σ₁` and `B = min σ₂` for maps onto the unit triangle,
/// `ℓ = 1/√(AB)` and `K = √(A/B)`.
pub fn to_equilateral(g: &GeometricSurface) -> Result<(SimplicialSurface, DistortionReport), EquilateralizeError> {
    if g.hanging_vertex_count() > 0 {
        return Err(EquilateralizeError::HangingVertices);
    }
    let mut singular = Vec::with_capacity(g.triangle_count());
    for t in 0..g.triangle_count() {
        let (s1, s2) = affine_singular_values(g.sides(t), 1.0);
        if !(s2 > DEGENERATE_SIGMA) || !s1.is_finite() {
            return Err(EquilateralizeError::DegenerateTriangle { triangle: t, sigma: s2 });
        }
        singular.push((s1, s2));
    }
    let a = singular.iter().map(|s| s.0).fold(0.0, f64::max);
    let b = singular.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let scale = 1.0 / (a * b).sqrt();
    let per_triangle_bilipschitz: Vec<f64> = singular
        .iter()
        .map(|&(s1, s2)| (scale * s1).max(1.0 / (scale * s2)))
        .collect();
    let global_k = per_triangle_bilipschitz.iter().copied().fold(1.0, f64::max);

    // Compact vertex ids in order of first use.
    let mut remap: HashMap<usize, usize> = HashMap::new();
    let triangles: Vec<[usize; 3]> = g
        .triangles
        .iter()
        .map(|t| {
            t.map(|v| {
                let next = remap.len();
                *remap.entry(v).or_insert(next)
            })
        })
        .collect();
    let surface = SimplicialSurface::new(remap.len(), &triangles)?;
    let area_ratio = surface.area() * scale * scale / g.area();
    let k2 = global_k * global_k;
    Ok((
        surface,
        DistortionReport {
            per_triangle_bilipschitz,
            global_k,
            scale,
            stage_bounds: StageBounds::default(),
            area_ratio,
            area_ratio_within_bounds: area_ratio >= 1.0 / k2 * (1.0 - 1e-12) && area_ratio <= k2 * (1.0 + 1e-12),
        },
    ))
}

/// Outcome of the full pipeline, with χ recorded after every stage.
#[derive(Debug, Clone)]
pub struct Equilateralization {
    pub surface: SimplicialSurface,
    pub report: DistortionReport,
    /// χ of the input, after uniformization, after repair, and of the output.
    pub euler_characteristics: [i64; 4],
    pub splits: usize,
    pub bisections: usize,
}

pub fn equilateralize(g: &GeometricSurface) -> Result<Equilateralization, EquilateralizeError> {
    let uniform = uniformize_sizes(g)?;
    let repaired = repair_hanging_vertices(&uniform)?;
    let (surface, report) = to_equilateral(&repaired)?;
    let euler_characteristics = [
        g.euler_characteristic(),
        uniform.euler_characteristic(),
        repaired.euler_characteristic(),
        surface.euler_characteristic(),
    ];
    assert!(
        euler_characteristics.iter().all(|&c| c == euler_characteristics[0]),
        "subdivision changed the topology: {euler_characteristics:?}"
    );
    Ok(Equilateralization {
        surface,
        report,
        euler_characteristics,
        splits: (uniform.triangle_count() - g.triangle_count()) / 3,
        bisections: repaired.triangle_count() - uniform.triangle_count(),
    })
}

/// A random admissible metric on `surface`: edge lengths follow a smooth
/// size field growing by a factor `spread` with the dual-graph distance from
/// a random vertex, then receive independent jitter. Proposals leaving the
/// angle window `(π/4 + margin, 3π/7 − margin)` are rejected.
pub fn random_admissible(surface: &SimplicialSurface, seed: u64, spread: f64, margin: f64) -> GeometricSurface {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = surface.vertex_count();
    let root = rng.gen_range(0..n);
    let mut dist = vec![usize::MAX; n];
    let mut adjacency = vec![Vec::new(); n];
    for &[u, v] in surface.edges() {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    dist[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let depth = dist.iter().copied().max().unwrap_or(0).max(1) as f64;
    let base: f64 = rng.gen_range(0.01..10.0);
    let admissible = |sides: [f64; 3]| {
        triangle_angles(sides)
            .iter()
            .all(|&a| a > MIN_ANGLE + margin && a < MAX_ANGLE - margin)
    };

    let mut lengths: Vec<f64> = surface
        .edges()
        .iter()
        .map(|&[u, v]| base * spread.powf((dist[u] + dist[v]) as f64 / (2.0 * depth)))
        .collect();
    let sides_with = |lengths: &[f64], t: usize| surface.triangle_edges(t).map(|e| lengths[e]);
    // Fall back towards the uniform metric if the size field is too steep.
    let mut blend = 1.0;
    while !(0..surface.triangle_count()).all(|t| admissible(sides_with(&lengths, t))) {
        blend *= 0.5;
        lengths = surface
            .edges()
            .iter()
            .map(|&[u, v]| base * spread.powf(blend * (dist[u] + dist[v]) as f64 / (2.0 * depth)))
            .collect();
    }
    for _ in 0..4 * surface.edge_count() {
        let e = rng.gen_range(0..surface.edge_count());
        let old = lengths[e];
        lengths[e] = old * rng.gen_range(0.9..1.1f64);
        if !surface.edge_triangles(e).iter().all(|&t| admissible(sides_with(&lengths, t))) {
            lengths[e] = old;
        }
    }
    let list: Vec<(usize, usize, f64)> = surface
        .edges()
        .iter()
        .zip(&lengths)
        .map(|(&[u, v], &l)| (u, v, l))
        .collect();
    GeometricSurface::from_edge_lengths(n, surface.triangles(), &list).expect("admissible metric")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    const TOL: f64 = 1e-9;

    #[test]
    fn equilateral_triangle_has_no_distortion() {
        assert!((affine_distortion([1.0, 1.0, 1.0], 1.0) - 1.0).abs() < TOL);
        let (s1, s2) = affine_singular_values([0.5, 0.5, 0.5], 1.0);
        assert!((s1 - 2.0).abs() < TOL && (s2 - 2.0).abs() < TOL);
    }

    #[test]
    fn distortion_is_labeling_invariant() {
        let sides = [1.0, 1.2, 0.9];
        let d = affine_distortion(sides, 1.0);
        for rotated in [[1.2, 0.9, 1.0], [0.9, 1.0, 1.2], [1.0, 0.9, 1.2]] {
            assert!((affine_distortion(rotated, 1.0) - d).abs() < TOL);
        }
    }

    /// Singular values from an explicit 2×2 matrix built with coordinates.
    #[test]
    fn singular_values_match_direct_construction() {
        let (a, b, c) = ([0.0, 0.0], [1.3, 0.0], [0.4, 1.1]);
        let d = |p: [f64; 2], q: [f64; 2]| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
        let sides = [d(a, b), d(b, c), d(c, a)];
        // M·[b−a, c−a] = [(1,0), (1/2, √3/2)]
        let h = 3f64.sqrt() / 2.0;
        let det = 1.3 * 1.1;
        let inv = [[1.1 / det, -0.4 / det], [0.0, 1.3 / det]];
        let m = [
            [inv[0][0] + 0.5 * inv[1][0], inv[0][1] + 0.5 * inv[1][1]],
            [h * inv[1][0], h * inv[1][1]],
        ];
        let ata = [
            [m[0][0] * m[0][0] + m[1][0] * m[1][0], m[0][0] * m[0][1] + m[1][0] * m[1][1]],
            [m[0][1] * m[0][0] + m[1][1] * m[1][0], m[0][1] * m[0][1] + m[1][1] * m[1][1]],
        ];
        let tr = ata[0][0] + ata[1][1];
        let dt = ata[0][0] * ata[1][1] - ata[0][1] * ata[1][0];
        let l1 = (tr + (tr * tr - 4.0 * dt).sqrt()) / 2.0;
        let l2 = dt / l1;
        let (s1, s2) = affine_singular_values(sides, 1.0);
        assert!((s1 - l1.sqrt()).abs() < 1e-12);
        assert!((s2 - l2.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn subtriangle_types_are_four_bilipschitz() {
        let r3 = 3f64.sqrt();
        let types = [
            [0.5, 0.5, 0.5],
            [0.5, 0.5, r3 / 2.0],
            [1.0, r3 / 2.0, 0.5],
        ];
        for sides in types {
            let k = affine_distortion(sides, 1.0);
            assert!(k <= 4.0 + TOL, "{sides:?}: {k}");
        }
    }

    #[test]
    fn midpoint_split_preserves_angles() {
        let g = random_admissible(&corpus::octahedron(), 3, 1.0, 0.01);
        let mut h = g.clone();
        let children = h.split(0);
        let parent = g.angles(0);
        for c in children {
            let mut got = h.angles(c);
            let mut want = parent;
            got.sort_by(f64::total_cmp);
            want.sort_by(f64::total_cmp);
            for (x, y) in got.iter().zip(want) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn uniform_input_is_a_fixpoint() {
        let g = GeometricSurface::uniform(&corpus::icosahedron(), 2.5);
        let u = uniformize_sizes(&g).unwrap();
        assert_eq!(u.triangle_count(), 20);
        let r = repair_hanging_vertices(&u).unwrap();
        assert_eq!(r.triangle_count(), 20);
        let e = equilateralize(&g).unwrap();
        assert!(e.report.per_triangle_bilipschitz.iter().all(|&k| (k - 1.0).abs() < TOL));
        assert!((e.report.scale - 2.5).abs() < TOL);
    }

    #[test]
    fn bisecting_an_equilateral_parent_gives_a_right_triangle() {
        // Split one octahedron face; its three neighbours each see one hanging vertex.
        let mut g = GeometricSurface::uniform(&corpus::octahedron(), 1.0);
        g.split(0);
        assert_eq!(g.hanging_vertex_count(), 3);
        let r = repair_hanging_vertices(&g).unwrap();
        assert_eq!(r.hanging_vertex_count(), 0);
        assert_eq!(r.triangle_count(), 8 + 3 + 3);
        let right: Vec<[f64; 3]> = (0..r.triangle_count())
            .map(|t| {
                let mut s = r.sides(t);
                s.sort_by(f64::total_cmp);
                s
            })
            .filter(|s| (s[2] - 1.0).abs() < TOL && (s[0] - 0.5).abs() < TOL)
            .collect();
        assert_eq!(right.len(), 6);
        for s in right {
            assert!((s[1] - 3f64.sqrt() / 2.0).abs() < TOL);
        }
        let (surface, report) = to_equilateral(&r).unwrap();
        assert_eq!(surface.euler_characteristic(), 2);
        assert!(report.global_k <= REPAIRED_BOUND);
    }

    #[test]
    fn one_hanging_side_takes_one_bisection() {
        // Refine one octahedron face, then look at a single neighbour's repair.
        let mut g = GeometricSurface::uniform(&corpus::octahedron(), 1.0);
        g.split(0);
        let before = g.hanging_vertex_count();
        let r = repair_hanging_vertices(&g).unwrap();
        assert_eq!(r.triangle_count() - g.triangle_count(), before);
    }

    #[test]
    fn balance_splits_neighbours_of_a_deep_triangle() {
        let mut g = GeometricSurface::uniform(&corpus::octahedron(), 1.0);
        // Face 0 split twice (16 pieces).
        let children = g.split(0);
        for c in children {
            g.split(c);
        }
        assert_eq!(g.triangle_count(), 8 - 1 + 16);
        balance(&mut g);
        // The three neighbours of face 0 are split once; nothing else moves.
        assert_eq!(g.triangle_count(), 8 - 1 + 16 + 3 * 3);
        let r = repair_hanging_vertices(&g).unwrap();
        assert_eq!(r.hanging_vertex_count(), 0);
        assert_eq!(r.euler_characteristic(), 2);
    }

    #[test]
    fn unbalanced_input_is_rejected_by_repair() {
        let mut g = GeometricSurface::uniform(&corpus::octahedron(), 1.0);
        let children = g.split(0);
        for c in children {
            g.split(c);
        }
        assert!(matches!(
            repair_hanging_vertices(&g),
            Err(EquilateralizeError::BalanceViolated { .. })
        ));
    }

    #[test]
    fn sizes_are_uniformized() {
        let g = random_admissible(&corpus::subdivided_icosahedron(2), 7, 6.0, 0.01);
        let u = uniformize_sizes(&g).unwrap();
        let d: Vec<f64> = (0..u.triangle_count()).map(|t| u.diameter(t)).collect();
        let (lo, hi) = d.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
        assert!(hi <= 2.0 * lo * (1.0 + 1e-12));
        assert_eq!(u.euler_characteristic(), 2);
    }

    #[test]
    fn rejects_bad_inputs() {
        let tet = corpus::tetrahedron();
        let edges: Vec<(usize, usize, f64)> = tet.edges().iter().map(|&[u, v]| (u, v, 1.0)).collect();
        let mut mismatched = edges.clone();
        mismatched.push((edges[0].0, edges[0].1, 1.0 + 1e-6));
        assert!(matches!(
            GeometricSurface::from_edge_lengths(4, tet.triangles(), &mismatched),
            Err(EquilateralizeError::GluingMismatch { .. })
        ));
        let mut flat = edges.clone();
        flat[0].2 = 2.0;
        assert!(matches!(
            GeometricSurface::from_edge_lengths(4, tet.triangles(), &flat),
            Err(EquilateralizeError::TriangleInequality { .. })
        ));
        let mut skewed = edges.clone();
        skewed[0].2 = 1.5;
        let g = GeometricSurface::from_edge_lengths(4, tet.triangles(), &skewed).unwrap();
        assert!(matches!(
            uniformize_sizes(&g),
            Err(EquilateralizeError::NonAdmissibleAngles { .. })
        ));
        assert!(matches!(
            GeometricSurface::from_edge_lengths(4, tet.triangles(), &edges[1..]),
            Err(EquilateralizeError::MissingLength { .. })
        ));
    }

    #[test]
    fn coordinates_give_euclidean_lengths() {
        let points = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]];
        let g = GeometricSurface::from_coordinates(&points, corpus::octahedron().triangles()).unwrap();
        for t in 0..8 {
            for side in g.sides(t) {
                assert!((side - 2f64.sqrt()).abs() < 1e-12);
            }
        }
        let e = equilateralize(&g).unwrap();
        assert!((e.report.global_k - 1.0).abs() < TOL);
        assert!((e.report.area_ratio - 1.0).abs() < TOL);
    }

    #[test]
    fn random_pipeline_runs_within_bounds() {
        for seed in 0..5 {
            let g = random_admissible(&corpus::subdivided_icosahedron(1), seed, 4.0, 0.01);
            g.check_admissible().unwrap();
            let e = equilateralize(&g).unwrap();
            assert!(e.report.global_k <= PIPELINE_BOUND);
            assert!(e.report.area_ratio_within_bounds);
            assert_eq!(e.euler_characteristics, [2; 4]);
        }
    }
}
