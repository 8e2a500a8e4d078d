//! Closed triangulated surfaces with the unit equilateral metric.
//!
//! A [`SimplicialSurface`] is validated on construction: every edge lies in
//! exactly two triangles, every vertex link is a single cycle, and the dual
//! graph is connected. When the surface is orientable the stored triangles
//! are re-listed so that their cyclic orders are coherent, with the first
//! input triangle as the reference.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Area of the unit equilateral triangle.
pub const TRIANGLE_AREA: f64 = 0.433_012_701_892_219_3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("empty triangle list")]
    Empty,
    #[error("triangle {triangle} references vertex {vertex} but only {vertex_count} vertices exist")]
    VertexOutOfRange {
        triangle: usize,
        vertex: usize,
        vertex_count: usize,
    },
    #[error("triangle {triangle} repeats a vertex")]
    DegenerateTriangle { triangle: usize },
    #[error("triangles {first} and {second} span the same vertices")]
    DuplicateTriangle { first: usize, second: usize },
    #[error("non-manifold edge ({u}, {v}): contained in {count} triangles")]
    NonManifoldEdge { u: usize, v: usize, count: usize },
    #[error("non-manifold vertex {vertex}: link is not a single cycle")]
    NonManifoldVertex { vertex: usize },
    #[error("vertex {vertex} is not used by any triangle")]
    IsolatedVertex { vertex: usize },
    #[error("surface is disconnected ({components} components)")]
    Disconnected { components: usize },
}

/// Coefficient ring for chains: the integers on orientable surfaces, ℤ/2 otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ring {
    #[serde(rename = "Z")]
    Integer,
    #[serde(rename = "Z2")]
    Mod2,
}

impl Ring {
    /// Canonical representative of `value` in this ring.
    #[inline]
    pub fn reduce(self, value: i64) -> i64 {
        match self {
            Ring::Integer => value,
            Ring::Mod2 => value.rem_euclid(2),
        }
    }
}

/// How the genus parameter is read off a nonorientable surface.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenusConvention {
    /// ⌈(2 − χ)/2⌉.
    #[default]
    CeilHalf,
    /// The nonorientable genus 2 − χ (number of cross-caps).
    Demigenus,
}

impl std::str::FromStr for GenusConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ceil-half" => Ok(Self::CeilHalf),
            "demigenus" => Ok(Self::Demigenus),
            other => Err(format!("unknown genus convention `{other}` (expected ceil-half or demigenus)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TopologySummary {
    pub euler_characteristic: i64,
    pub orientable: bool,
    pub genus_parameter: f64,
    pub coefficient_ring: Ring,
}

#[derive(Debug, Clone)]
pub struct SimplicialSurface {
    vertex_count: usize,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    edge_index: HashMap<(usize, usize), usize>,
    edge_triangles: Vec<[usize; 2]>,
    /// `triangle_edges[t][k]` is the edge from `triangles[t][k]` to `triangles[t][(k + 1) % 3]`.
    triangle_edges: Vec<[usize; 3]>,
    vertex_triangles: Vec<Vec<usize>>,
    orientable: bool,
}

#[inline]
fn key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl SimplicialSurface {
    /// Builds a surface whose vertex count is one past the largest index used.
    pub fn from_triangles(triangles: &[[usize; 3]]) -> Result<Self, SurfaceError> {
        let vertex_count = triangles
            .iter()
            .flat_map(|t| t.iter().copied())
            .max()
            .map_or(0, |m| m + 1);
        Self::new(vertex_count, triangles)
    }

    pub fn new(vertex_count: usize, triangles: &[[usize; 3]]) -> Result<Self, SurfaceError> {
        if triangles.is_empty() {
            return Err(SurfaceError::Empty);
        }
        let mut seen: HashMap<[usize; 3], usize> = HashMap::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= vertex_count {
                    return Err(SurfaceError::VertexOutOfRange {
                        triangle: t,
                        vertex: v,
                        vertex_count,
                    });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(SurfaceError::DegenerateTriangle { triangle: t });
            }
            let mut sorted = *tri;
            sorted.sort_unstable();
            if let Some(&first) = seen.get(&sorted) {
                return Err(SurfaceError::DuplicateTriangle { first, second: t });
            }
            seen.insert(sorted, t);
        }

        let mut edges = Vec::new();
        let mut edge_index = HashMap::new();
        let mut incidences: Vec<Vec<usize>> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [0usize; 3];
            for k in 0..3 {
                let (u, v) = key(tri[k], tri[(k + 1) % 3]);
                let e = *edge_index.entry((u, v)).or_insert_with(|| {
                    edges.push([u, v]);
                    incidences.push(Vec::new());
                    edges.len() - 1
                });
                incidences[e].push(t);
                te[k] = e;
            }
            triangle_edges.push(te);
        }
        // Sorted edge order keeps edge ids independent of triangle listing order.
        let mut order: Vec<usize> = (0..edges.len()).collect();
        order.sort_unstable_by_key(|&e| edges[e]);
        let mut remap = vec![0usize; edges.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        let edges: Vec<[usize; 2]> = order.iter().map(|&e| edges[e]).collect();
        let incidences: Vec<Vec<usize>> = order.iter().map(|&e| incidences[e].clone()).collect();
        for te in &mut triangle_edges {
            for e in te.iter_mut() {
                *e = remap[*e];
            }
        }
        for v in edge_index.values_mut() {
            *v = remap[*v];
        }

        let mut edge_triangles = Vec::with_capacity(edges.len());
        for (e, inc) in incidences.iter().enumerate() {
            if inc.len() != 2 {
                return Err(SurfaceError::NonManifoldEdge {
                    u: edges[e][0],
                    v: edges[e][1],
                    count: inc.len(),
                });
            }
            edge_triangles.push([inc[0], inc[1]]);
        }

        let mut vertex_triangles = vec![Vec::new(); vertex_count];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                vertex_triangles[v].push(t);
            }
        }
        for (v, star) in vertex_triangles.iter().enumerate() {
            if star.is_empty() {
                return Err(SurfaceError::IsolatedVertex { vertex: v });
            }
            if !link_is_cycle(v, star, triangles) {
                return Err(SurfaceError::NonManifoldVertex { vertex: v });
            }
        }

        let mut surface = SimplicialSurface {
            vertex_count,
            triangles: triangles.to_vec(),
            edges,
            edge_index,
            edge_triangles,
            triangle_edges,
            vertex_triangles,
            orientable: false,
        };
        let components = surface.dual_components();
        if components > 1 {
            return Err(SurfaceError::Disconnected { components });
        }
        surface.orient();
        Ok(surface)
    }

    fn dual_components(&self) -> usize {
        let n = self.triangles.len();
        let mut seen = vec![false; n];
        let mut components = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(t) = stack.pop() {
                for s in self.triangle_neighbors(t) {
                    if !seen[s] {
                        seen[s] = true;
                        stack.push(s);
                    }
                }
            }
        }
        components
    }

    /// Breadth-first orientation propagation over the dual graph.
    fn orient(&mut self) {
        let n = self.triangles.len();
        let mut flipped: Vec<Option<bool>> = vec![None; n];
        flipped[0] = Some(false);
        let mut queue = VecDeque::from([0usize]);
        let mut orientable = true;
        while let Some(t) = queue.pop_front() {
            let tri = oriented(self.triangles[t], flipped[t].unwrap());
            for k in 0..3 {
                let (u, v) = (tri[k], tri[(k + 1) % 3]);
                let e = self.edge_id(u, v).unwrap();
                let s = self.other_triangle(e, t);
                // s must traverse v -> u.
                let s_forward = contains_directed(self.triangles[s], v, u);
                let want_flip = !s_forward;
                match flipped[s] {
                    None => {
                        flipped[s] = Some(want_flip);
                        queue.push_back(s);
                    }
                    Some(f) if f != want_flip => orientable = false,
                    Some(_) => {}
                }
            }
        }
        self.orientable = orientable;
        if orientable {
            for (t, f) in flipped.into_iter().enumerate() {
                if f == Some(true) {
                    let tri = self.triangles[t];
                    self.triangles[t] = [tri[0], tri[2], tri[1]];
                    let te = self.triangle_edges[t];
                    // edges of [a, c, b]: (a,c), (c,b), (b,a)
                    self.triangle_edges[t] = [te[2], te[1], te[0]];
                }
            }
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Triangles in their stored (coherent, when orientable) cyclic order.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    /// Edges as sorted vertex pairs.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_index.get(&key(u, v)).copied()
    }

    pub fn edge_triangles(&self, e: usize) -> [usize; 2] {
        self.edge_triangles[e]
    }

    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    pub fn vertex_triangles(&self, v: usize) -> &[usize] {
        &self.vertex_triangles[v]
    }

    /// Number of edges (equivalently triangles) at `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.vertex_triangles[v].len()
    }

    pub fn other_triangle(&self, e: usize, t: usize) -> usize {
        let [a, b] = self.edge_triangles[e];
        if a == t {
            b
        } else {
            a
        }
    }

    pub fn triangle_neighbors(&self, t: usize) -> [usize; 3] {
        let te = self.triangle_edges[t];
        [
            self.other_triangle(te[0], t),
            self.other_triangle(te[1], t),
            self.other_triangle(te[2], t),
        ]
    }

    /// Signed edges of the boundary of triangle `t` in its stored orientation.
    /// The sign is +1 when the traversal agrees with the edge's sorted order.
    pub fn oriented_boundary(&self, t: usize) -> [(usize, i64); 3] {
        let tri = self.triangles[t];
        let te = self.triangle_edges[t];
        std::array::from_fn(|k| {
            let sign = if tri[k] < tri[(k + 1) % 3] { 1 } else { -1 };
            (te[k], sign)
        })
    }

    pub fn is_orientable(&self) -> bool {
        self.orientable
    }

    pub fn ring(&self) -> Ring {
        if self.orientable {
            Ring::Integer
        } else {
            Ring::Mod2
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    pub fn genus_parameter(&self, convention: GenusConvention) -> f64 {
        let chi = self.euler_characteristic();
        if self.orientable {
            ((2 - chi) / 2) as f64
        } else {
            match convention {
                GenusConvention::CeilHalf => (2 - chi + 1).div_euclid(2) as f64,
                GenusConvention::Demigenus => (2 - chi) as f64,
            }
        }
    }

    pub fn topology(&self, convention: GenusConvention) -> TopologySummary {
        TopologySummary {
            euler_characteristic: self.euler_characteristic(),
            orientable: self.orientable,
            genus_parameter: self.genus_parameter(convention),
            coefficient_ring: self.ring(),
        }
    }

    /// Total area with unit edge length.
    pub fn area(&self) -> f64 {
        area_of(self.triangles.len())
    }
}

/// Area of `count` unit equilateral triangles.
#[inline]
pub fn area_of(count: usize) -> f64 {
    TRIANGLE_AREA * count as f64
}

fn oriented(tri: [usize; 3], flip: bool) -> [usize; 3] {
    if flip {
        [tri[0], tri[2], tri[1]]
    } else {
        tri
    }
}

fn contains_directed(tri: [usize; 3], u: usize, v: usize) -> bool {
    (0..3).any(|k| tri[k] == u && tri[(k + 1) % 3] == v)
}

/// The link of `v` is the graph on the edges opposite `v`; with every edge
/// already known to lie in two triangles, it is a cycle iff it is connected.
fn link_is_cycle(v: usize, star: &[usize], triangles: &[[usize; 3]]) -> bool {
    let mut adjacency: HashMap<usize, Vec<usize>> = HashMap::new();
    for &t in star {
        let others: Vec<usize> = triangles[t].iter().copied().filter(|&w| w != v).collect();
        adjacency.entry(others[0]).or_default().push(others[1]);
        adjacency.entry(others[1]).or_default().push(others[0]);
    }
    if adjacency.values().any(|n| n.len() != 2) {
        return false;
    }
    let start = *adjacency.keys().next().unwrap();
    let mut seen = std::collections::HashSet::from([start]);
    let mut stack = vec![start];
    while let Some(w) = stack.pop() {
        for &x in &adjacency[&w] {
            if seen.insert(x) {
                stack.push(x);
            }
        }
    }
    seen.len() == adjacency.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn tetrahedron_is_a_sphere() {
        let s = corpus::tetrahedron();
        assert_eq!(s.euler_characteristic(), 2);
        assert!(s.is_orientable());
        assert_eq!(s.genus_parameter(GenusConvention::default()), 0.0);
        assert!((s.area() - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn icosahedron_area() {
        let s = corpus::icosahedron();
        assert!((s.area() - 5.0 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn csaszar_torus_counts() {
        let s = corpus::csaszar_torus();
        assert_eq!(
            (s.vertex_count(), s.edge_count(), s.triangle_count()),
            (7, 21, 14)
        );
        assert_eq!(s.euler_characteristic(), 0);
        assert!(s.is_orientable());
        assert_eq!(s.genus_parameter(GenusConvention::default()), 1.0);
    }

    #[test]
    fn nonorientable_genus_conventions() {
        let rp2 = corpus::projective_plane();
        assert!(!rp2.is_orientable());
        assert_eq!(rp2.euler_characteristic(), 1);
        assert_eq!(rp2.genus_parameter(GenusConvention::CeilHalf), 1.0);
        assert_eq!(rp2.genus_parameter(GenusConvention::Demigenus), 1.0);
        assert_eq!(rp2.ring(), Ring::Mod2);

        let klein = corpus::klein_bottle();
        assert!(!klein.is_orientable());
        assert_eq!(klein.euler_characteristic(), 0);
        assert_eq!(klein.genus_parameter(GenusConvention::CeilHalf), 1.0);
        assert_eq!(klein.genus_parameter(GenusConvention::Demigenus), 2.0);
    }

    #[test]
    fn disjoint_tetrahedra_rejected() {
        let mut tris = corpus::tetrahedron().triangles().to_vec();
        tris.extend(corpus::tetrahedron().triangles().iter().map(|t| t.map(|v| v + 4)));
        assert_eq!(
            SimplicialSurface::from_triangles(&tris).unwrap_err(),
            SurfaceError::Disconnected { components: 2 }
        );
    }

    #[test]
    fn open_surface_rejected() {
        let tris = [[0, 1, 2], [0, 2, 3], [0, 3, 1]];
        assert!(matches!(
            SimplicialSurface::from_triangles(&tris),
            Err(SurfaceError::NonManifoldEdge { count: 1, .. })
        ));
    }

    #[test]
    fn pinched_vertex_rejected() {
        // Two tetrahedra sharing vertex 0.
        let mut tris = corpus::tetrahedron().triangles().to_vec();
        tris.extend(
            corpus::tetrahedron()
                .triangles()
                .iter()
                .map(|t| t.map(|v| if v == 0 { 0 } else { v + 3 })),
        );
        assert_eq!(
            SimplicialSurface::from_triangles(&tris).unwrap_err(),
            SurfaceError::NonManifoldVertex { vertex: 0 }
        );
    }

    #[test]
    fn isolated_and_out_of_range_vertices() {
        let tris = corpus::tetrahedron().triangles().to_vec();
        assert_eq!(
            SimplicialSurface::new(5, &tris).unwrap_err(),
            SurfaceError::IsolatedVertex { vertex: 4 }
        );
        assert!(matches!(
            SimplicialSurface::new(3, &tris),
            Err(SurfaceError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn reoriented_input_is_made_coherent() {
        // Flip every other triangle of the octahedron listing.
        let tris: Vec<[usize; 3]> = corpus::octahedron()
            .triangles()
            .iter()
            .enumerate()
            .map(|(i, t)| if i % 2 == 1 { [t[1], t[0], t[2]] } else { *t })
            .collect();
        let s = SimplicialSurface::from_triangles(&tris).unwrap();
        assert!(s.is_orientable());
        assert_eq!(s.triangle(0), tris[0]);
        for e in 0..s.edge_count() {
            let [a, b] = s.edge_triangles(e);
            let sa = s.oriented_boundary(a).iter().find(|x| x.0 == e).unwrap().1;
            let sb = s.oriented_boundary(b).iter().find(|x| x.0 == e).unwrap().1;
            assert_eq!(sa + sb, 0);
        }
    }

    #[test]
    fn orientable_genus_matches_euler_characteristic() {
        for (_, s) in corpus::all() {
            if s.is_orientable() {
                let g = s.genus_parameter(GenusConvention::default());
                assert_eq!(2.0 - 2.0 * g, s.euler_characteristic() as f64);
            }
        }
    }
}
