//! Snapping transversal polyline cuts into the 1-skeleton.
//!
//! Each arc of a cut lies in one unit equilateral triangle with both
//! endpoints on its sides. Snapping slides every endpoint along its side to
//! the nearer vertex, so an arc becomes a vertex (both endpoints reach the
//! same corner) or an edge of the triangle. Arc lengths are straight chords.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chains::OneCycle;
use crate::surface::{area_of, Ring, SimplicialSurface};

/// Half-width of the band around an edge midpoint that gets nudged.
pub const MIDPOINT_BAND: f64 = 1e-6;
/// Absolute tolerance for the area audit.
pub const AREA_TOLERANCE: f64 = 1e-9;
const POINT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SnapError {
    #[error("arc {arc}: {reason}")]
    InvalidArc { arc: usize, reason: String },
    #[error("loop {index} does not close up between arcs {from} and {to}")]
    OpenLoop { index: usize, from: usize, to: usize },
    #[error("arc {arc} is not in exactly one loop")]
    LoopCover { arc: usize },
    #[error("arc {arc} has an endpoint exactly at an edge midpoint")]
    MidpointDegeneracy { arc: usize },
    #[error("crossing arcs in triangle {triangle}")]
    CrossingArcs { triangle: usize },
    #[error("partial area {supplied} of triangle {triangle} matches no side of the cut")]
    InconsistentAreas { triangle: usize, supplied: f64 },
    #[error("expected one partial area per triangle, got {got}")]
    AreaCount { got: usize },
}

/// A point on an edge, `t ∈ [0, 1]` measured from the lower-index endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgePoint {
    pub edge: usize,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutArc {
    pub triangle: usize,
    pub entry: EdgePoint,
    pub exit: EdgePoint,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PolylineCut {
    pub arcs: Vec<CutArc>,
    /// Arc indices in traversal order, one list per closed loop.
    pub loops: Vec<Vec<usize>>,
}

/// Vertex reached by an endpoint, if it sits on one.
fn vertex_at(surface: &SimplicialSurface, p: EdgePoint) -> Option<usize> {
    let [u, v] = surface.edge(p.edge);
    if p.t <= 0.0 {
        Some(u)
    } else if p.t >= 1.0 {
        Some(v)
    } else {
        None
    }
}

fn same_point(surface: &SimplicialSurface, p: EdgePoint, q: EdgePoint) -> bool {
    match (vertex_at(surface, p), vertex_at(surface, q)) {
        (Some(a), Some(b)) => a == b,
        (None, None) => p.edge == q.edge && (p.t - q.t).abs() <= POINT_TOLERANCE,
        _ => false,
    }
}

impl PolylineCut {
    pub fn validate(&self, surface: &SimplicialSurface) -> Result<(), SnapError> {
        let invalid = |arc: usize, reason: &str| SnapError::InvalidArc {
            arc,
            reason: reason.to_string(),
        };
        for (i, arc) in self.arcs.iter().enumerate() {
            if arc.triangle >= surface.triangle_count() {
                return Err(invalid(i, "triangle out of range"));
            }
            let edges = surface.triangle_edges(arc.triangle);
            for p in [arc.entry, arc.exit] {
                if !edges.contains(&p.edge) {
                    return Err(invalid(i, "endpoint edge is not a side of the triangle"));
                }
                if !(0.0..=1.0).contains(&p.t) {
                    return Err(invalid(i, "edge parameter outside [0, 1]"));
                }
            }
            if same_point(surface, arc.entry, arc.exit) {
                return Err(invalid(i, "arc has coincident endpoints"));
            }
        }
        let mut cover = vec![0usize; self.arcs.len()];
        for (index, lp) in self.loops.iter().enumerate() {
            for (k, &a) in lp.iter().enumerate() {
                if a >= self.arcs.len() {
                    return Err(invalid(a, "loop references a missing arc"));
                }
                cover[a] += 1;
                let b = lp[(k + 1) % lp.len()];
                if b >= self.arcs.len() {
                    return Err(invalid(b, "loop references a missing arc"));
                }
                let (from, to) = (self.arcs[a], self.arcs[b]);
                let closes = same_point(surface, from.exit, to.entry)
                    && (vertex_at(surface, from.exit).is_some()
                        || to.triangle == surface.other_triangle(from.exit.edge, from.triangle));
                if !closes {
                    return Err(SnapError::OpenLoop { index, from: a, to: b });
                }
            }
        }
        if let Some(arc) = cover.iter().position(|&c| c != 1) {
            return Err(SnapError::LoopCover { arc });
        }
        Ok(())
    }

    /// Moves parameters within [`MIDPOINT_BAND`] of 1/2 to `1/2 − MIDPOINT_BAND`,
    /// i.e. toward the lower-index vertex.
    pub fn nudged(&self) -> PolylineCut {
        let nudge = |p: EdgePoint| EdgePoint {
            t: if (p.t - 0.5).abs() <= MIDPOINT_BAND {
                0.5 - MIDPOINT_BAND
            } else {
                p.t
            },
            ..p
        };
        PolylineCut {
            arcs: self
                .arcs
                .iter()
                .map(|a| CutArc {
                    entry: nudge(a.entry),
                    exit: nudge(a.exit),
                    ..*a
                })
                .collect(),
            loops: self.loops.clone(),
        }
    }
}

/// Unit equilateral triangle in the plane, counter-clockwise in stored order.
const CORNERS: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.5, 0.866_025_403_784_438_6]];

/// Position of `p` inside triangle `t`, and its boundary coordinate
/// `s ∈ [0, 3)` (side `k` runs from corner `k` to corner `k + 1`).
fn locate(surface: &SimplicialSurface, t: usize, p: EdgePoint) -> ([f64; 2], f64) {
    let tri = surface.triangle(t);
    let [u, _] = surface.edge(p.edge);
    let k = surface
        .triangle_edges(t)
        .iter()
        .position(|&e| e == p.edge)
        .expect("endpoint edge belongs to the triangle");
    let along = if tri[k] == u { p.t } else { 1.0 - p.t };
    let (a, b) = (CORNERS[k], CORNERS[(k + 1) % 3]);
    (
        [a[0] + along * (b[0] - a[0]), a[1] + along * (b[1] - a[1])],
        k as f64 + along,
    )
}

/// Boundary coordinate of the nearer corner (as an integer 0..=3, 3 ≡ 0).
fn snapped_coordinate(s: f64) -> f64 {
    let k = s.floor();
    if s - k < 0.5 {
        k
    } else {
        k + 1.0
    }
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ArcSnap {
    pub chord: f64,
    /// 0 when the arc collapses to a vertex, 1 when it becomes an edge.
    pub snapped_length: u64,
    /// The edge the arc became, if any.
    pub edge: Option<usize>,
    pub within_double: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SnapReport {
    pub arcs: Vec<ArcSnap>,
    pub total_length_before: f64,
    /// Mass of the snapped mod-2 cycle.
    pub total_length_after: u64,
    /// Sum of per-arc snapped lengths, before mod-2 cancellation.
    pub total_snapped_arcs: u64,
    pub per_arc_within_double: bool,
    pub aggregate_within_double: bool,
    /// Largest snapped-length / chord ratio over arcs that became edges.
    pub max_ratio: f64,
    pub nudged_endpoints: usize,
}

pub fn snap_to_skeleton(
    surface: &SimplicialSurface,
    cut: &PolylineCut,
) -> Result<(OneCycle, SnapReport), SnapError> {
    cut.validate(surface)?;
    let nudged = cut.nudged();
    let nudged_endpoints = cut
        .arcs
        .iter()
        .zip(&nudged.arcs)
        .map(|(a, b)| (a.entry.t != b.entry.t) as usize + (a.exit.t != b.exit.t) as usize)
        .sum();
    let mut cycle = OneCycle::zero(Ring::Mod2);
    let mut arcs = Vec::with_capacity(nudged.arcs.len());
    for (i, arc) in nudged.arcs.iter().enumerate() {
        if arc.entry.t == 0.5 || arc.exit.t == 0.5 {
            return Err(SnapError::MidpointDegeneracy { arc: i });
        }
        let tri = surface.triangle(arc.triangle);
        let (p, sp) = locate(surface, arc.triangle, arc.entry);
        let (q, sq) = locate(surface, arc.triangle, arc.exit);
        let chord = distance(p, q);
        let vp = tri[snapped_coordinate(sp) as usize % 3];
        let vq = tri[snapped_coordinate(sq) as usize % 3];
        let edge = (vp != vq).then(|| surface.edge_id(vp, vq).expect("corners of a triangle span an edge"));
        if let Some(e) = edge {
            cycle.add_edge(e, 1);
        }
        let snapped_length = edge.is_some() as u64;
        arcs.push(ArcSnap {
            chord,
            snapped_length,
            edge,
            within_double: snapped_length as f64 <= 2.0 * chord,
        });
    }
    let total_length_before: f64 = arcs.iter().map(|a| a.chord).sum();
    let total_snapped_arcs = arcs.iter().map(|a| a.snapped_length).sum();
    let total_length_after = cycle.mass();
    let max_ratio = arcs
        .iter()
        .filter(|a| a.snapped_length > 0)
        .map(|a| 1.0 / a.chord)
        .fold(0.0, f64::max);
    let report = SnapReport {
        per_arc_within_double: arcs.iter().all(|a| a.within_double),
        aggregate_within_double: total_length_after as f64 <= 2.0 * total_length_before,
        arcs,
        total_length_before,
        total_length_after,
        total_snapped_arcs,
        max_ratio,
        nudged_endpoints,
    };
    Ok((cycle, report))
}

/// Level set `{f = threshold}` of the piecewise-linear interpolant of
/// `values`, as a cut, together with the per-triangle area of `{f < threshold}`.
/// Vertices exactly at the threshold count as above it.
pub fn level_set_cut(surface: &SimplicialSurface, values: &[f64], threshold: f64) -> (PolylineCut, Vec<f64>) {
    let below = |v: usize| values[v] < threshold;
    let crossing = |e: usize| {
        let [u, v] = surface.edge(e);
        (below(u) != below(v)).then(|| EdgePoint {
            edge: e,
            t: (threshold - values[u]) / (values[v] - values[u]),
        })
    };
    let mut arcs = Vec::new();
    let mut arc_of_triangle: HashMap<usize, usize> = HashMap::new();
    let mut partial = Vec::with_capacity(surface.triangle_count());
    for t in 0..surface.triangle_count() {
        let tri = surface.triangle(t);
        let inside = tri.map(below);
        let count = inside.iter().filter(|&&b| b).count();
        let full = area_of(1);
        match count {
            0 => partial.push(0.0),
            3 => partial.push(full),
            _ => {
                let points: Vec<EdgePoint> = surface.triangle_edges(t).iter().filter_map(|&e| crossing(e)).collect();
                debug_assert_eq!(points.len(), 2);
                arc_of_triangle.insert(t, arcs.len());
                arcs.push(CutArc {
                    triangle: t,
                    entry: points[0],
                    exit: points[1],
                });
                // Polygon of the sublevel part: walk the boundary counter-clockwise.
                let mut poly = Vec::new();
                for k in 0..3 {
                    if inside[k] {
                        poly.push(CORNERS[k]);
                    }
                    let e = surface.triangle_edges(t)[k];
                    if let Some(p) = crossing(e) {
                        poly.push(locate(surface, t, p).0);
                    }
                }
                partial.push(shoelace(&poly));
            }
        }
    }
    // Chain arcs into loops through shared crossing points.
    let mut used = vec![false; arcs.len()];
    let mut loops = Vec::new();
    for start in 0..arcs.len() {
        if used[start] {
            continue;
        }
        let mut lp = Vec::new();
        let mut current = start;
        loop {
            used[current] = true;
            lp.push(current);
            let exit = arcs[current].exit;
            let next_t = surface.other_triangle(exit.edge, arcs[current].triangle);
            let next = arc_of_triangle[&next_t];
            if arcs[next].entry.edge != exit.edge {
                let a = &mut arcs[next];
                std::mem::swap(&mut a.entry, &mut a.exit);
            }
            if next == start {
                break;
            }
            current = next;
        }
        loops.push(lp);
    }
    (PolylineCut { arcs, loops }, partial)
}

fn shoelace(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        / 2.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AreaReport {
    /// Areas of the two sides of the cut before snapping.
    pub area_before: [f64; 2],
    /// Areas of the two simplicial domains after snapping.
    pub area_after: [f64; 2],
    pub total_cut_length: f64,
    /// `area_after ≥ area_before − (√3/2)·Σℓ`, per side.
    pub loss_bound_holds: [bool; 2],
    /// Whether `Σℓ < ½·area_before` holds, per side.
    pub half_area_precondition: [bool; 2],
    /// `area_after ≥ ½·area_before`, evaluated only where the precondition holds.
    pub half_area_holds: [Option<bool>; 2],
    /// Per triangle: area lost by each side.
    pub triangle_losses: Vec<[f64; 2]>,
    /// Triangles that end up in the first domain.
    pub domain1_after: Vec<usize>,
}

impl AreaReport {
    pub fn passes(&self) -> bool {
        self.loss_bound_holds.iter().all(|&b| b) && self.half_area_holds.iter().all(|h| h.unwrap_or(true))
    }
}

/// A face of a triangle cut by non-crossing chords.
struct Region {
    /// Boundary coordinates of the chord endpoints it touches, in order, with
    /// the triangle corners it contains spliced in.
    before: Vec<[f64; 2]>,
    after: Vec<[f64; 2]>,
    /// Chords on its boundary.
    chords: Vec<usize>,
}

/// Faces of triangle `t` cut by the given arcs.
fn regions(surface: &SimplicialSurface, t: usize, arcs: &[(usize, CutArc)]) -> Result<Vec<Region>, SnapError> {
    if arcs.is_empty() {
        return Ok(vec![Region {
            before: CORNERS.to_vec(),
            after: CORNERS.to_vec(),
            chords: Vec::new(),
        }]);
    }
    // (boundary coordinate, position, chord, partner index)
    let mut points: Vec<(f64, [f64; 2], usize)> = Vec::new();
    for (chord, arc) in arcs.iter().enumerate() {
        for p in [arc.1.entry, arc.1.exit] {
            let (pos, s) = locate(surface, t, p);
            points.push((s % 3.0, pos, chord));
        }
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
    let k = points.len();
    let partner: Vec<usize> = (0..k)
        .map(|i| (0..k).find(|&j| j != i && points[j].2 == points[i].2).unwrap())
        .collect();
    // Non-crossing check: chords must nest like balanced parentheses.
    let mut stack: Vec<usize> = Vec::new();
    for i in 0..k {
        if stack.last().is_some_and(|&top| partner[top] == i) {
            stack.pop();
        } else {
            stack.push(i);
        }
    }
    if !stack.is_empty() {
        return Err(SnapError::CrossingArcs { triangle: t });
    }
    let corner = |c: f64| CORNERS[(c as usize) % 3];
    let mut visited = vec![false; k];
    let mut out = Vec::new();
    for start in 0..k {
        if visited[start] {
            continue;
        }
        let mut region = Region {
            before: Vec::new(),
            after: Vec::new(),
            chords: Vec::new(),
        };
        let mut i = start;
        loop {
            visited[i] = true;
            let j = (i + 1) % k;
            let (s0, mut s1) = (points[i].0, points[j].0);
            if s1 <= s0 {
                s1 += 3.0;
            }
            region.before.push(points[i].1);
            let mut c = s0.floor() + 1.0;
            while c < s1 {
                region.before.push(corner(c));
                c += 1.0;
            }
            region.before.push(points[j].1);
            let (a0, mut a1) = (snapped_coordinate(s0), snapped_coordinate(s1 % 3.0));
            while a1 < a0 || (s1 - s0 > 1.5 && a1 < a0 + 1.0) {
                a1 += 3.0;
            }
            let mut c = a0;
            while c <= a1 {
                region.after.push(corner(c));
                c += 1.0;
            }
            region.chords.push(points[j].2);
            i = partner[j];
            if i == start {
                break;
            }
        }
        out.push(region);
    }
    Ok(out)
}

/// Compares the two sides of a cut before and after snapping.
///
/// `partial_areas[t]` is the area of the first side inside triangle `t`
/// before snapping; it selects which faces of each triangle belong to the
/// first side.
pub fn snap_area_audit(
    surface: &SimplicialSurface,
    cut: &PolylineCut,
    partial_areas: &[f64],
) -> Result<AreaReport, SnapError> {
    if partial_areas.len() != surface.triangle_count() {
        return Err(SnapError::AreaCount {
            got: partial_areas.len(),
        });
    }
    cut.validate(surface)?;
    let cut = cut.nudged();
    let mut by_triangle: BTreeMap<usize, Vec<(usize, CutArc)>> = BTreeMap::new();
    for (i, arc) in cut.arcs.iter().enumerate() {
        by_triangle.entry(arc.triangle).or_default().push((i, *arc));
    }
    let full = area_of(1);
    let mut before = [0.0f64; 2];
    let mut after = [0.0f64; 2];
    let mut losses = Vec::with_capacity(surface.triangle_count());
    let mut domain1_after = Vec::new();
    for t in 0..surface.triangle_count() {
        let arcs = by_triangle.get(&t).map(Vec::as_slice).unwrap_or(&[]);
        let faces = regions(surface, t, arcs)?;
        // Two-colour faces across chords.
        let mut colour: Vec<Option<bool>> = vec![None; faces.len()];
        colour[0] = Some(true);
        let mut changed = true;
        while changed {
            changed = false;
            for a in 0..faces.len() {
                let Some(ca) = colour[a] else { continue };
                for b in 0..faces.len() {
                    if colour[b].is_none() && faces[a].chords.iter().any(|c| faces[b].chords.contains(c)) {
                        colour[b] = Some(!ca);
                        changed = true;
                    }
                }
            }
        }
        let pre: Vec<f64> = faces.iter().map(|f| shoelace(&f.before)).collect();
        let post: Vec<f64> = faces.iter().map(|f| shoelace(&f.after)).collect();
        let area_coloured = |want: bool, xs: &[f64]| -> f64 {
            xs.iter().zip(&colour).filter(|(_, c)| **c == Some(want)).map(|(x, _)| *x).sum()
        };
        let (pa, pb) = (area_coloured(true, &pre), area_coloured(false, &pre));
        let supplied = partial_areas[t];
        let first_is_true = (pa - supplied).abs() <= (pb - supplied).abs();
        let matched = if first_is_true { pa } else { pb };
        if (matched - supplied).abs() > 1e-6 * full + 1e-9 {
            return Err(SnapError::InconsistentAreas { triangle: t, supplied });
        }
        let side1_before = matched;
        let side1_after = area_coloured(first_is_true, &post);
        let side2_after = area_coloured(!first_is_true, &post);
        debug_assert!((side1_after + side2_after - full).abs() < 1e-9);
        before[0] += side1_before;
        before[1] += full - side1_before;
        after[0] += side1_after;
        after[1] += side2_after;
        if side1_after > full / 2.0 {
            domain1_after.push(t);
        }
        losses.push([
            (side1_before - side1_after).max(0.0),
            (full - side1_before - side2_after).max(0.0),
        ]);
    }
    let total_cut_length: f64 = cut
        .arcs
        .iter()
        .map(|a| distance(locate(surface, a.triangle, a.entry).0, locate(surface, a.triangle, a.exit).0))
        .sum();
    let slack = 3f64.sqrt() / 2.0 * total_cut_length;
    let loss_bound_holds = [0, 1].map(|j| after[j] >= before[j] - slack - AREA_TOLERANCE);
    let half_area_precondition = [0, 1].map(|j| total_cut_length < 0.5 * before[j]);
    let half_area_holds =
        [0, 1].map(|j| half_area_precondition[j].then(|| after[j] >= 0.5 * before[j] - AREA_TOLERANCE));
    Ok(AreaReport {
        area_before: before,
        area_after: after,
        total_cut_length,
        loss_bound_holds,
        half_area_precondition,
        half_area_holds,
        triangle_losses: losses,
        domain1_after,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Point on side `k` of triangle `t` at distance `d` from corner `k`.
    fn point(s: &SimplicialSurface, t: usize, k: usize, d: f64) -> EdgePoint {
        let tri = s.triangle(t);
        let e = s.triangle_edges(t)[k];
        let [u, _] = s.edge(e);
        EdgePoint {
            edge: e,
            t: if tri[k] == u { d } else { 1.0 - d },
        }
    }

    /// One arc from side 0 (corner 0 → 1) to side 2 (corner 2 → 0), closed
    /// into a loop around corner 0 through the triangles of its star.
    fn loop_around_vertex(s: &SimplicialSurface, v: usize, d: f64) -> PolylineCut {
        let values: Vec<f64> = (0..s.vertex_count()).map(|w| if w == v { 0.0 } else { 1.0 }).collect();
        let (cut, _) = level_set_cut(s, &values, d);
        cut
    }

    fn single_arc_cut(t: usize, entry: EdgePoint, exit: EdgePoint) -> PolylineCut {
        PolylineCut {
            arcs: vec![CutArc { triangle: t, entry, exit }],
            loops: vec![],
        }
    }

    fn snap_single(s: &SimplicialSurface, t: usize, entry: EdgePoint, exit: EdgePoint) -> ArcSnap {
        let mut cut = single_arc_cut(t, entry, exit);
        cut.loops.clear();
        // Loop validation is skipped: snap arcs directly.
        let nudged = cut.nudged();
        let arc = nudged.arcs[0];
        let tri = s.triangle(t);
        let (p, sp) = locate(s, t, arc.entry);
        let (q, sq) = locate(s, t, arc.exit);
        let vp = tri[snapped_coordinate(sp) as usize % 3];
        let vq = tri[snapped_coordinate(sq) as usize % 3];
        let edge = (vp != vq).then(|| s.edge_id(vp, vq).unwrap());
        ArcSnap {
            chord: distance(p, q),
            snapped_length: edge.is_some() as u64,
            edge,
            within_double: edge.is_none() || 1.0 <= 2.0 * distance(p, q),
        }
    }

    #[test]
    fn arc_near_one_corner_collapses_to_it() {
        let s = corpus::icosahedron();
        let a = snap_single(&s, 0, point(&s, 0, 0, 0.3), point(&s, 0, 2, 0.8));
        assert_eq!(a.snapped_length, 0);
    }

    #[test]
    fn arc_near_far_corners_becomes_the_opposite_edge() {
        let s = corpus::icosahedron();
        // 0.6 along AB and 0.7 along AC, measured from A.
        let a = snap_single(&s, 0, point(&s, 0, 0, 0.6), point(&s, 0, 2, 0.3));
        let tri = s.triangle(0);
        assert_eq!(a.edge, s.edge_id(tri[1], tri[2]));
        let expect = (0.36f64 + 0.49 - 0.6 * 0.7).sqrt();
        assert!((a.chord - expect).abs() < 1e-12);
        assert!((a.chord - 0.6557).abs() < 1e-4);
        assert!(a.within_double);
    }

    #[test]
    fn arc_hugging_an_edge_collapses_to_its_nearer_vertex() {
        let s = corpus::icosahedron();
        let a = snap_single(&s, 0, point(&s, 0, 0, 0.2), point(&s, 0, 0, 0.4));
        assert_eq!(a.snapped_length, 0);
        assert!((a.chord - 0.2).abs() < 1e-12);
    }

    /// The nearer-vertex rule can send a chord of length √3/4 to a whole edge.
    #[test]
    fn mixed_corner_arc_exceeds_double_length() {
        let s = corpus::icosahedron();
        let a = snap_single(&s, 0, point(&s, 0, 0, 0.5 + 1e-3), point(&s, 0, 2, 0.75));
        assert_eq!(a.snapped_length, 1);
        assert!(a.chord < 0.45);
        assert!(!a.within_double);
    }

    #[test]
    fn midpoint_parameters_are_nudged_toward_lower_vertex() {
        let s = corpus::icosahedron();
        let e = s.triangle_edges(0)[0];
        let cut = single_arc_cut(
            0,
            EdgePoint { edge: e, t: 0.5 },
            EdgePoint { edge: s.triangle_edges(0)[1], t: 0.5 + 5e-7 },
        );
        let n = cut.nudged();
        assert_eq!(n.arcs[0].entry.t, 0.5 - MIDPOINT_BAND);
        assert_eq!(n.arcs[0].exit.t, 0.5 - MIDPOINT_BAND);
    }

    #[test]
    fn level_sets_are_valid_closed_cuts() {
        let s = corpus::subdivided_icosahedron(1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let values: Vec<f64> = (0..s.vertex_count()).map(|_| rng.gen()).collect();
        let (cut, partial) = level_set_cut(&s, &values, 0.5);
        cut.validate(&s).unwrap();
        let (z, report) = snap_to_skeleton(&s, &cut).unwrap();
        assert!(z.is_cycle(&s));
        assert!(report.total_length_after <= report.total_snapped_arcs);
        let audit = snap_area_audit(&s, &cut, &partial).unwrap();
        let total: f64 = audit.area_after.iter().sum();
        assert!((total - s.area()).abs() < 1e-9);
        assert!((audit.area_before.iter().sum::<f64>() - s.area()).abs() < 1e-9);
    }

    #[test]
    fn small_loop_around_vertex_collapses() {
        let s = corpus::icosahedron();
        let cut = loop_around_vertex(&s, 0, 0.1);
        assert_eq!(cut.loops.len(), 1);
        assert_eq!(cut.arcs.len(), 5);
        let (z, report) = snap_to_skeleton(&s, &cut).unwrap();
        assert!(z.is_zero());
        assert!((report.total_length_before - 0.5).abs() < 1e-12);
        let values: Vec<f64> = (0..12).map(|w| if w == 0 { 0.0 } else { 1.0 }).collect();
        let (_, partial) = level_set_cut(&s, &values, 0.1);
        let audit = snap_area_audit(&s, &cut, &partial).unwrap();
        // The cap around vertex 0 disappears; each corner loss obeys the
        // isoperimetric bound (3/2π)ℓ² with ℓ = 0.1.
        assert!(audit.area_after[0].abs() < 1e-12);
        let cap = 5.0 * 3f64.sqrt() / 4.0 * 0.01;
        assert!((audit.area_before[0] - cap).abs() < 1e-12);
        for loss in &audit.triangle_losses {
            assert!(loss[0] <= 3.0 / (2.0 * std::f64::consts::PI) * 0.01 + 1e-15);
        }
        assert!(audit.passes());
    }

    #[test]
    fn large_loop_around_vertex_becomes_its_link() {
        let s = corpus::icosahedron();
        let cut = loop_around_vertex(&s, 0, 0.7);
        let (z, report) = snap_to_skeleton(&s, &cut).unwrap();
        assert_eq!(z.mass(), 5);
        assert!(report.per_arc_within_double);
        let values: Vec<f64> = (0..12).map(|w| if w == 0 { 0.0 } else { 1.0 }).collect();
        let (_, partial) = level_set_cut(&s, &values, 0.7);
        let audit = snap_area_audit(&s, &cut, &partial).unwrap();
        // The star of vertex 0 joins the first side.
        assert!((audit.area_after[0] - 5.0 * area_of(1)).abs() < 1e-12);
        assert_eq!(audit.domain1_after.len(), 5);
        for loss in &audit.triangle_losses {
            assert!(loss[1] <= area_of(1) + 1e-15);
        }
    }

    #[test]
    fn skeletal_cut_is_unchanged() {
        // The link of vertex 0 drawn as arcs running along edges.
        let s = corpus::icosahedron();
        let star = s.vertex_triangles(0).to_vec();
        let mut arcs = Vec::new();
        let mut partial = vec![0.0; s.triangle_count()];
        for &t in &star {
            partial[t] = area_of(1);
        }
        // Order the link edges into a loop.
        let link: Vec<usize> = star
            .iter()
            .map(|&t| {
                let tri = s.triangle(t);
                let k = tri.iter().position(|&v| v == 0).unwrap();
                s.edge_id(tri[(k + 1) % 3], tri[(k + 2) % 3]).unwrap()
            })
            .collect();
        let mut order = vec![link[0]];
        while order.len() < link.len() {
            let [_, last_v] = {
                let e = *order.last().unwrap();
                let [a, b] = s.edge(e);
                if order.len() == 1 { [a, b] } else {
                    let prev = s.edge(order[order.len() - 2]);
                    if prev.contains(&a) { [a, b] } else { [b, a] }
                }
            };
            let next = *link
                .iter()
                .find(|&&e| !order.contains(&e) && s.edge(e).contains(&last_v))
                .unwrap();
            order.push(next);
        }
        let mut prev_end: Option<usize> = None;
        for &e in &order {
            let [a, b] = s.edge(e);
            let start = prev_end.unwrap_or(if s.edge(order[1]).contains(&b) { a } else { b });
            let (t0, t1) = if start == a { (0.0, 1.0) } else { (1.0, 0.0) };
            let [x, y] = s.edge_triangles(e);
            let t = if star.contains(&x) { x } else { y };
            arcs.push(CutArc {
                triangle: t,
                entry: EdgePoint { edge: e, t: t0 },
                exit: EdgePoint { edge: e, t: t1 },
            });
            prev_end = Some(if start == a { b } else { a });
        }
        let cut = PolylineCut {
            loops: vec![(0..arcs.len()).collect()],
            arcs,
        };
        cut.validate(&s).unwrap();
        let (z, report) = snap_to_skeleton(&s, &cut).unwrap();
        assert_eq!(z.mass(), 5);
        assert!((report.total_length_before - 5.0).abs() < 1e-12);
        let audit = snap_area_audit(&s, &cut, &partial).unwrap();
        for j in 0..2 {
            assert!((audit.area_after[j] - audit.area_before[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn open_loops_are_rejected() {
        let s = corpus::icosahedron();
        let mut cut = loop_around_vertex(&s, 0, 0.3);
        cut.loops[0].pop();
        assert!(matches!(cut.validate(&s), Err(SnapError::OpenLoop { .. })));
        let mut cut = loop_around_vertex(&s, 0, 0.3);
        cut.arcs[0].entry.t = 1.5;
        assert!(matches!(cut.validate(&s), Err(SnapError::InvalidArc { .. })));
    }

    proptest! {
        /// Worst case of the nearer-vertex rule on arcs between distinct
        /// sides: a chord snapped to an edge is never shorter than √3/4.
        #[test]
        fn distinct_side_arcs_within_four_over_root_three(
            t in 0usize..20, k in 0usize..3, d1 in 0.0f64..1.0, d2 in 0.0f64..1.0,
        ) {
            let s = corpus::icosahedron();
            let a = snap_single(&s, t, point(&s, t, k, d1), point(&s, t, (k + 1) % 3, d2));
            if a.snapped_length == 1 {
                prop_assert!(a.chord >= 3f64.sqrt() / 4.0 - 1e-6);
            }
        }

        #[test]
        fn snapped_level_sets_are_cycles(seed in 0u64..1000, threshold in 0.05f64..0.95) {
            let s = corpus::subdivided_icosahedron(1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let values: Vec<f64> = (0..s.vertex_count()).map(|_| rng.gen()).collect();
            let (cut, partial) = level_set_cut(&s, &values, threshold);
            let (z, _) = snap_to_skeleton(&s, &cut).unwrap();
            prop_assert!(z.is_cycle(&s));
            let audit = snap_area_audit(&s, &cut, &partial).unwrap();
            prop_assert!(audit.loss_bound_holds.iter().all(|&b| b));
        }
    }
}
