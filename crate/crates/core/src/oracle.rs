//! Exhaustive ground truth for small surfaces.
//!
//! Both oracles work on the ℤ/2 single-triangle move model: a domain is a
//! subset of triangles and its frontier is the set of edges with exactly
//! one incident triangle in the subset.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::chains::{SweepOut, TwoChain};
use crate::spectral::Decomposition;
use crate::surface::{area_of, Ring, SimplicialSurface};

/// Largest triangle count for the Cheeger enumeration (2^N subsets).
pub const CHEEGER_MAX_TRIANGLES: usize = 24;
/// Largest triangle count for the minimal sweep-out search.
pub const SWEEP_MAX_TRIANGLES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("surface has {triangles} triangles, oracle limit is {limit}")]
    TooLarge { triangles: usize, limit: usize },
}

/// Exact simplicial Cheeger constant with its optimal cut.
///
/// The value is `boundary_length / area_of(min_side)`; the integer pair is
/// kept so callers can compare against it without rounding.
#[derive(Debug, Clone)]
pub struct CheegerOracle {
    pub value: f64,
    pub boundary_length: u64,
    pub min_side: usize,
    pub witness: Decomposition,
}

impl CheegerOracle {
    /// True when `length / area_of(side) ≥ h`, compared in integers.
    pub fn is_at_most(&self, length: u64, side: usize) -> bool {
        (self.boundary_length as u128) * (side as u128) <= (length as u128) * (self.min_side as u128)
    }
}

fn neighbor_masks(surface: &SimplicialSurface) -> Vec<[usize; 3]> {
    (0..surface.triangle_count())
        .map(|t| surface.triangle_neighbors(t))
        .collect()
}

fn frontier_size(surface: &SimplicialSurface, set: u64) -> u64 {
    let mut count = 0;
    for e in 0..surface.edge_count() {
        let [a, b] = surface.edge_triangles(e);
        if (set >> a & 1) != (set >> b & 1) {
            count += 1;
        }
    }
    count
}

pub fn exact_cheeger(surface: &SimplicialSurface) -> Result<CheegerOracle, OracleError> {
    let n = surface.triangle_count();
    if n > CHEEGER_MAX_TRIANGLES {
        return Err(OracleError::TooLarge {
            triangles: n,
            limit: CHEEGER_MAX_TRIANGLES,
        });
    }
    let neighbors = neighbor_masks(surface);
    let mut set: u64 = 0;
    let mut boundary: i64 = 0;
    let mut size = 0usize;
    let mut best: Option<(u64, usize, u64)> = None;
    // Gray code walk: step i flips the triangle at the lowest set bit of i.
    for i in 1u64..(1u64 << n) {
        let t = i.trailing_zeros() as usize;
        let inside = set >> t & 1 == 1;
        for &s in &neighbors[t] {
            if (set >> s & 1 == 1) == inside {
                boundary += 1;
            } else {
                boundary -= 1;
            }
        }
        set ^= 1 << t;
        if inside {
            size -= 1;
        } else {
            size += 1;
        }
        if size == 0 || size == n {
            continue;
        }
        let side = size.min(n - size);
        let better = match best {
            None => true,
            Some((b, s, _)) => (boundary as u128) * (s as u128) < (b as u128) * (side as u128),
        };
        if better {
            best = Some((boundary as u64, side, set));
        }
    }
    let (boundary_length, min_side, set) = best.expect("a surface has at least four triangles");
    let membership: Vec<bool> = (0..n).map(|t| set >> t & 1 == 1).collect();
    let witness = Decomposition::from_membership(surface, &membership);
    Ok(CheegerOracle {
        value: boundary_length as f64 / area_of(min_side),
        boundary_length,
        min_side,
        witness,
    })
}

/// Minimal max-mass over all ℤ/2 single-triangle-move sweep-outs, with a witness.
///
/// Bottleneck shortest path on the subset lattice: the cost of reaching a
/// subset is the largest frontier seen along the way.
pub fn minimal_sweep_max_mass(surface: &SimplicialSurface) -> Result<(u64, SweepOut), OracleError> {
    let n = surface.triangle_count();
    if n > SWEEP_MAX_TRIANGLES {
        return Err(OracleError::TooLarge {
            triangles: n,
            limit: SWEEP_MAX_TRIANGLES,
        });
    }
    let states = 1usize << n;
    let full = states - 1;
    let mass: Vec<u64> = (0..states).map(|s| frontier_size(surface, s as u64)).collect();
    let mut cost = vec![u64::MAX; states];
    let mut parent = vec![usize::MAX; states];
    let mut done = vec![false; states];
    cost[0] = 0;
    let mut heap = BinaryHeap::from([Reverse((0u64, 0usize))]);
    while let Some(Reverse((c, s))) = heap.pop() {
        if done[s] {
            continue;
        }
        done[s] = true;
        if s == full {
            break;
        }
        for t in 0..n {
            let next = s ^ (1 << t);
            let nc = c.max(mass[next]);
            if nc < cost[next] {
                cost[next] = nc;
                parent[next] = s;
                heap.push(Reverse((nc, next)));
            }
        }
    }
    let mut path = vec![full];
    while *path.last().unwrap() != 0 {
        path.push(parent[*path.last().unwrap()]);
    }
    path.reverse();
    let certificates = path
        .windows(2)
        .map(|w| TwoChain::single(Ring::Mod2, (w[0] ^ w[1]).trailing_zeros() as usize, 1))
        .collect();
    Ok((
        cost[full],
        SweepOut::from_certificates(surface, Ring::Mod2, certificates),
    ))
}

/// Lower bound on the max-mass of any ℤ/2 single-triangle sweep-out:
/// the step sweeping ⌈N/2⌉ triangles has mass at least h·(area/2 − √3/4).
///
/// Returns true when `max_mass` respects the bound, compared exactly:
/// `max_mass ≥ (L/k)·(N − 2)/2` where `h = L/area_of(k)`.
pub fn respects_crossing_bound(oracle: &CheegerOracle, triangles: usize, max_mass: u64) -> bool {
    let lhs = 2 * max_mass as u128 * oracle.min_side as u128;
    let rhs = oracle.boundary_length as u128 * triangles.saturating_sub(2) as u128;
    lhs >= rhs
}

/// The crossing lower bound as a real number, for reports.
pub fn crossing_bound_value(oracle: &CheegerOracle, triangles: usize) -> f64 {
    oracle.value * (area_of(triangles) / 2.0 - area_of(1))
}
