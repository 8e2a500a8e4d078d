//! Splitting a surface along a short cycle and capping the two sides.
//!
//! A side of a decomposition need not be connected, and its boundary can
//! touch itself at a vertex. Coning off first separates such pinch points
//! (one vertex copy per fan of domain triangles around the vertex), then
//! caps every boundary cycle of every connected piece with its own apex.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oracle::{exact_cheeger, OracleError};
use crate::spectral::{fiedler_cut, CutMode, Decomposition, Side, SpectralError, SpectralOptions};
use crate::surface::{area_of, GenusConvention, SimplicialSurface, SurfaceError};

/// `C₀ = 15·√(96π)`.
pub fn c0() -> f64 {
    15.0 * (96.0 * PI).sqrt()
}

/// Triangle count below which the split falls back to a single triangle.
pub fn n_star(genus: f64) -> f64 {
    10.0 * 96.0 * PI * (genus + 1.0)
}

/// Triangle count up to which the plain sweep already meets the final bound.
pub fn n_zero(genus: f64) -> f64 {
    3f64.sqrt() * c0() * c0() * (genus + 1.0)
}

#[derive(Debug, Error)]
pub enum DecomposeError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("cone-off produced an invalid surface: {0}")]
    InvalidCone(#[from] SurfaceError),
    #[error("no admissible cut: |δ| = {length} exceeds the bound {bound}")]
    NoCutFound { length: u64, bound: f64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutSource {
    #[default]
    Spectral,
    Exhaustive,
}

impl std::str::FromStr for CutSource {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "spectral" => Ok(Self::Spectral),
            "exhaustive" => Ok(Self::Exhaustive),
            other => Err(format!("unknown cut source `{other}`")),
        }
    }
}

/// Right-hand side of the cut-length bound:
/// `C₀·√(g+1)·min(area(D₁), area(D₂)) / √area(M)`.
pub fn cut_length_bound(surface: &SimplicialSurface, genus: f64, dec: &Decomposition) -> f64 {
    c0() * (genus + 1.0).sqrt() * dec.min_area() / surface.area().sqrt()
}

#[derive(Debug, Clone)]
pub struct Split {
    pub decomposition: Decomposition,
    pub bound: f64,
    pub within_bound: bool,
    /// True when the single-triangle split was used.
    pub fallback: bool,
}

/// D₁ = one triangle, D₂ = the rest.
pub fn single_triangle_split(surface: &SimplicialSurface, triangle: usize) -> Decomposition {
    let mut m = vec![false; surface.triangle_count()];
    m[triangle] = true;
    Decomposition::from_membership(surface, &m)
}

fn finish(surface: &SimplicialSurface, genus: f64, decomposition: Decomposition, fallback: bool) -> Split {
    let bound = cut_length_bound(surface, genus, &decomposition);
    Split {
        within_bound: decomposition.delta_length() as f64 <= bound,
        bound,
        decomposition,
        fallback,
    }
}

/// Best cut from the chosen source, with the length bound evaluated.
///
/// With `proof_faithful`, surfaces below `N*` take the single-triangle
/// split and any returned split must satisfy the bound.
pub fn split_surface(
    surface: &SimplicialSurface,
    source: CutSource,
    mode: CutMode,
    convention: GenusConvention,
    proof_faithful: bool,
    opts: &SpectralOptions,
) -> Result<Split, DecomposeError> {
    let genus = surface.genus_parameter(convention);
    if proof_faithful && (surface.triangle_count() as f64) <= n_star(genus) {
        return Ok(finish(surface, genus, single_triangle_split(surface, 0), true));
    }
    let dec = match source {
        CutSource::Spectral => fiedler_cut(surface, mode, opts)?,
        CutSource::Exhaustive => exact_cheeger(surface)?.witness,
    };
    let split = finish(surface, genus, dec, false);
    if proof_faithful && !split.within_bound {
        return Err(DecomposeError::NoCutFound {
            length: split.decomposition.delta_length(),
            bound: split.bound,
        });
    }
    Ok(split)
}

/// One connected piece of a domain, capped to a closed surface.
#[derive(Debug, Clone)]
pub struct ConedSurface {
    pub surface: SimplicialSurface,
    /// Number of leading triangles that come from the domain.
    pub domain_triangles: usize,
    /// For each domain triangle: its original triangle and the sign relating
    /// the stored orientations (+1 when they agree).
    pub provenance: Vec<(usize, i64)>,
    /// For each cone triangle (after the domain ones): the original δ edge.
    pub cone_base: Vec<usize>,
    pub apexes: Vec<usize>,
    /// Original vertex of every non-apex vertex.
    pub vertex_origin: Vec<Option<usize>>,
    /// Lengths of the capped boundary cycles.
    pub boundary_lengths: Vec<usize>,
}

impl ConedSurface {
    pub fn boundary_length(&self) -> usize {
        self.boundary_lengths.iter().sum()
    }

    /// Original triangles of this piece.
    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.provenance.iter().map(|&(t, _)| t)
    }
}

/// Caps one side of `dec`, one closed surface per connected piece.
pub fn cone_off(
    surface: &SimplicialSurface,
    dec: &Decomposition,
    side: Side,
) -> Result<Vec<ConedSurface>, DecomposeError> {
    let n = surface.triangle_count();
    let mut inside = vec![false; n];
    for &t in dec.domain(side) {
        inside[t] = true;
    }
    let interior = |e: usize| {
        let [a, b] = surface.edge_triangles(e);
        inside[a] && inside[b]
    };
    // Fans: domain triangles around a vertex joined through interior edges at it.
    let mut copy_of: HashMap<(usize, usize), usize> = HashMap::new(); // (triangle, vertex) -> copy
    let mut origin: Vec<usize> = Vec::new();
    for v in 0..surface.vertex_count() {
        let star: Vec<usize> = surface.vertex_triangles(v).iter().copied().filter(|&t| inside[t]).collect();
        for &start in &star {
            if copy_of.contains_key(&(start, v)) {
                continue;
            }
            let id = origin.len();
            origin.push(v);
            let mut stack = vec![start];
            copy_of.insert((start, v), id);
            while let Some(t) = stack.pop() {
                for e in surface.triangle_edges(t) {
                    if !surface.edge(e).contains(&v) || !interior(e) {
                        continue;
                    }
                    let s = surface.other_triangle(e, t);
                    if let std::collections::hash_map::Entry::Vacant(slot) = copy_of.entry((s, v)) {
                        slot.insert(id);
                        stack.push(s);
                    }
                }
            }
        }
    }
    // Connected pieces through interior edges.
    let mut piece = vec![usize::MAX; n];
    let mut pieces: Vec<Vec<usize>> = Vec::new();
    for &start in dec.domain(side) {
        if piece[start] != usize::MAX {
            continue;
        }
        let id = pieces.len();
        let mut members = vec![start];
        piece[start] = id;
        let mut i = 0;
        while i < members.len() {
            let t = members[i];
            i += 1;
            for e in surface.triangle_edges(t) {
                if interior(e) {
                    let s = surface.other_triangle(e, t);
                    if piece[s] == usize::MAX {
                        piece[s] = id;
                        members.push(s);
                    }
                }
            }
        }
        members.sort_unstable();
        pieces.push(members);
    }
    let chi0 = surface.euler_characteristic();
    let mut out = Vec::with_capacity(pieces.len());
    for members in pieces {
        let mut local: BTreeMap<usize, usize> = BTreeMap::new();
        let mut vertex_origin = Vec::new();
        let mut relabel = |copy: usize, vertex_origin: &mut Vec<Option<usize>>| {
            *local.entry(copy).or_insert_with(|| {
                vertex_origin.push(Some(origin[copy]));
                vertex_origin.len() - 1
            })
        };
        let mut triangles = Vec::new();
        // Boundary edges, keyed by both endpoints; each vertex copy on the
        // boundary has exactly two of them.
        let mut boundary: Vec<(usize, usize, usize)> = Vec::new(); // (a, b, edge) as traversed
        let mut at: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &t in &members {
            let tri = surface.triangle(t);
            let local_tri = tri.map(|v| relabel(copy_of[&(t, v)], &mut vertex_origin));
            triangles.push(local_tri);
            for (k, e) in surface.triangle_edges(t).into_iter().enumerate() {
                if !interior(e) {
                    let (a, b) = (local_tri[k], local_tri[(k + 1) % 3]);
                    at.entry(a).or_default().push(boundary.len());
                    at.entry(b).or_default().push(boundary.len());
                    boundary.push((a, b, e));
                }
            }
        }
        debug_assert!(at.values().all(|v| v.len() == 2));
        let domain_triangles = triangles.len();
        let mut cone_base = Vec::new();
        let mut apexes = Vec::new();
        let mut boundary_lengths = Vec::new();
        let mut used = vec![false; boundary.len()];
        for start in 0..boundary.len() {
            if used[start] {
                continue;
            }
            let apex = vertex_origin.len();
            vertex_origin.push(None);
            apexes.push(apex);
            let mut i = start;
            let mut v = boundary[start].1;
            let mut length = 0;
            loop {
                used[i] = true;
                let (a, b, e) = boundary[i];
                triangles.push([b, a, apex]);
                cone_base.push(e);
                length += 1;
                let Some(&j) = at[&v].iter().find(|&&j| !used[j]) else { break };
                i = j;
                let (a, b, _) = boundary[j];
                v = if a == v { b } else { a };
            }
            boundary_lengths.push(length);
        }
        let coned = SimplicialSurface::new(vertex_origin.len(), &triangles)?;
        assert!(
            coned.euler_characteristic() >= chi0,
            "capping lowered the Euler characteristic"
        );
        let provenance = members
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let stored = coned.triangle(i).map(|v| vertex_origin[v].unwrap());
                (t, if same_cyclic_order(stored, surface.triangle(t)) { 1 } else { -1 })
            })
            .collect();
        out.push(ConedSurface {
            surface: coned,
            domain_triangles,
            provenance,
            cone_base,
            apexes,
            vertex_origin,
            boundary_lengths,
        });
    }
    Ok(out)
}

fn same_cyclic_order(a: [usize; 3], b: [usize; 3]) -> bool {
    (0..3).any(|r| a == [b[r], b[(r + 1) % 3], b[(r + 2) % 3]])
}

/// Triangle count of all pieces of one side.
pub fn side_triangles(pieces: &[ConedSurface]) -> usize {
    pieces.iter().map(|p| p.surface.triangle_count()).sum()
}

/// True iff both capped sides have fewer triangles than the original.
pub fn fewer_triangles_check(surface: &SimplicialSurface, m1: &[ConedSurface], m2: &[ConedSurface]) -> bool {
    let n = surface.triangle_count();
    side_triangles(m1) < n && side_triangles(m2) < n
}

/// Area of a capped side: `area(D) + (√3/4)·|∂D|`.
pub fn side_area(pieces: &[ConedSurface]) -> f64 {
    area_of(side_triangles(pieces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::spectral::CutMode;

    #[test]
    fn constants() {
        assert!((c0() - 15.0 * 301.592_894_745_3f64.sqrt()).abs() < 1e-9);
        assert!((c0() - 260.496).abs() < 1e-3);
        assert!((n_zero(0.0) - 225.0 * 3f64.sqrt() * 96.0 * PI).abs() < 1e-6);
        assert!((n_zero(0.0) - 117_534.2).abs() < 0.1);
        assert!((n_star(0.0) - 3015.9).abs() < 0.1);
    }

    #[test]
    fn tetrahedron_single_triangle_cone_is_a_tetrahedron() {
        let s = corpus::tetrahedron();
        let dec = single_triangle_split(&s, 0);
        assert_eq!(dec.delta_length(), 3);
        let m1 = cone_off(&s, &dec, Side::First).unwrap();
        assert_eq!(m1.len(), 1);
        assert_eq!(m1[0].surface.triangle_count(), 4);
        assert_eq!(m1[0].surface.euler_characteristic(), 2);
        let m2 = cone_off(&s, &dec, Side::Second).unwrap();
        assert_eq!(side_triangles(&m2), 6);
        assert!(!fewer_triangles_check(&s, &m1, &m2));
        let split = finish(&s, 0.0, dec, true);
        assert!(split.within_bound);
    }

    #[test]
    fn icosahedron_hemispheres_cap_to_spheres() {
        let s = corpus::icosahedron();
        let split = split_surface(
            &s,
            CutSource::Spectral,
            CutMode::Balanced,
            GenusConvention::CeilHalf,
            false,
            &SpectralOptions::default(),
        )
        .unwrap();
        assert!(split.within_bound);
        let dec = &split.decomposition;
        assert_eq!(dec.domain1.len(), 10);
        for side in [Side::First, Side::Second] {
            let pieces = cone_off(&s, dec, side).unwrap();
            for p in &pieces {
                assert_eq!(p.surface.euler_characteristic(), 2);
                assert!(p.surface.is_orientable());
            }
            let expect = area_of(dec.domain(side).len()) + area_of(1) * dec.delta_length() as f64;
            assert!((side_area(&pieces) - expect).abs() < 1e-12);
        }
    }

    /// Every δ edge gets exactly one cone triangle per side, and the domain
    /// orientation carries over on orientable surfaces.
    #[test]
    fn cone_triangles_cover_delta_once() {
        for (name, s) in corpus::all().into_iter().take(10) {
            let dec = crate::spectral::fiedler_cut(&s, CutMode::Cheeger, &SpectralOptions::default()).unwrap();
            for side in [Side::First, Side::Second] {
                let pieces = cone_off(&s, &dec, side).unwrap();
                let mut bases: Vec<usize> = pieces.iter().flat_map(|p| p.cone_base.iter().copied()).collect();
                bases.sort_unstable();
                let delta: Vec<usize> = dec.delta.support().collect();
                assert_eq!(bases, delta, "{name}");
                if s.is_orientable() {
                    for p in &pieces {
                        let signs: Vec<i64> = p.provenance.iter().map(|x| x.1).collect();
                        assert!(signs.iter().all(|&x| x == signs[0]), "{name}");
                    }
                }
            }
        }
    }

    /// Two triangles meeting at a single vertex form a pinched domain.
    #[test]
    fn pinched_domain_is_separated() {
        let s = corpus::octahedron();
        // Find two triangles sharing exactly one vertex.
        let (a, b) = (0..8)
            .flat_map(|a| (0..8).map(move |b| (a, b)))
            .find(|&(a, b)| {
                let ta = s.triangle(a);
                let tb = s.triangle(b);
                ta.iter().filter(|v| tb.contains(v)).count() == 1
            })
            .unwrap();
        let mut m = vec![false; 8];
        m[a] = true;
        m[b] = true;
        let dec = Decomposition::from_membership(&s, &m);
        let pieces = cone_off(&s, &dec, Side::First).unwrap();
        assert_eq!(pieces.len(), 2);
        assert!(pieces.iter().all(|p| p.surface.triangle_count() == 4));
        let rest = cone_off(&s, &dec, Side::Second).unwrap();
        assert_eq!(rest.len(), 1);
        // Split at the pinch, the complement is a disk bounded by both triangles.
        assert_eq!(rest[0].apexes.len(), 1);
        assert_eq!(rest[0].boundary_lengths, vec![6]);
        assert_eq!(rest[0].surface.euler_characteristic(), 2);
    }

    #[test]
    fn mobius_side_of_klein_bottle_caps_to_a_closed_surface() {
        let s = corpus::klein_bottle();
        let dec = crate::spectral::fiedler_cut(&s, CutMode::Balanced, &SpectralOptions::default()).unwrap();
        for side in [Side::First, Side::Second] {
            for p in cone_off(&s, &dec, side).unwrap() {
                assert!(p.surface.euler_characteristic() >= 0);
            }
        }
    }

    #[test]
    fn proof_faithful_split_below_n_star_is_one_triangle() {
        let s = corpus::subdivided_icosahedron(2);
        let split = split_surface(
            &s,
            CutSource::Spectral,
            CutMode::Cheeger,
            GenusConvention::CeilHalf,
            true,
            &SpectralOptions::default(),
        )
        .unwrap();
        assert!(split.fallback);
        assert_eq!(split.decomposition.delta_length(), 3);
        assert!(split.within_bound);
    }
}
