//! Simplicial one- and two-chains over ℤ or ℤ/2, and sweep-out certificates.
//!
//! Edge coefficients are taken relative to the edge's sorted vertex order;
//! a triangle's boundary uses the triangle's stored cyclic order. Every
//! edge has unit length, so mass is the ℓ¹ norm of the coefficient vector.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::surface::{Ring, SimplicialSurface};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("sweep-out has {steps} steps but {certificates} certificates (expected steps - 1)")]
    LengthMismatch { steps: usize, certificates: usize },
}

/// Sparse chain on edges. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneCycle {
    ring: Ring,
    coefficients: BTreeMap<usize, i64>,
}

/// Sparse chain on triangles. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoChain {
    ring: Ring,
    coefficients: BTreeMap<usize, i64>,
}

fn accumulate(map: &mut BTreeMap<usize, i64>, ring: Ring, key: usize, value: i64) {
    let entry = map.entry(key).or_insert(0);
    *entry = ring.reduce(*entry + value);
    if *entry == 0 {
        map.remove(&key);
    }
}

impl OneCycle {
    pub fn zero(ring: Ring) -> Self {
        Self {
            ring,
            coefficients: BTreeMap::new(),
        }
    }

    pub fn from_coefficients(ring: Ring, coefficients: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut z = Self::zero(ring);
        for (e, c) in coefficients {
            z.add_edge(e, c);
        }
        z
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn add_edge(&mut self, edge: usize, value: i64) {
        accumulate(&mut self.coefficients, self.ring, edge, value);
    }

    pub fn coefficient(&self, edge: usize) -> i64 {
        self.coefficients.get(&edge).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coefficients.iter().map(|(&e, &c)| (e, c))
    }

    /// Edges carrying a nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coefficients.keys().copied()
    }

    pub fn support_len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Total length counted with multiplicity.
    pub fn mass(&self) -> u64 {
        self.coefficients.values().map(|c| c.unsigned_abs()).sum()
    }

    pub fn added(&self, other: &OneCycle) -> OneCycle {
        let mut out = self.clone();
        for (e, c) in other.iter() {
            out.add_edge(e, c);
        }
        out
    }

    pub fn subtracted(&self, other: &OneCycle) -> OneCycle {
        self.added(&other.negated())
    }

    pub fn negated(&self) -> OneCycle {
        OneCycle::from_coefficients(self.ring, self.iter().map(|(e, c)| (e, -c)))
    }

    /// Zero boundary: signed vertex sums vanish over ℤ, incident parity is even over ℤ/2.
    pub fn is_cycle(&self, surface: &SimplicialSurface) -> bool {
        let mut at_vertex: BTreeMap<usize, i64> = BTreeMap::new();
        for (e, c) in self.iter() {
            let [u, v] = surface.edge(e);
            accumulate(&mut at_vertex, self.ring, v, c);
            accumulate(&mut at_vertex, self.ring, u, -c);
        }
        at_vertex.is_empty()
    }
}

impl TwoChain {
    pub fn zero(ring: Ring) -> Self {
        Self {
            ring,
            coefficients: BTreeMap::new(),
        }
    }

    pub fn single(ring: Ring, triangle: usize, value: i64) -> Self {
        let mut c = Self::zero(ring);
        c.add_triangle(triangle, value);
        c
    }

    pub fn from_coefficients(ring: Ring, coefficients: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut c = Self::zero(ring);
        for (t, v) in coefficients {
            c.add_triangle(t, v);
        }
        c
    }

    /// The fundamental class: every triangle with coefficient 1 in its stored orientation.
    pub fn fundamental_class(surface: &SimplicialSurface) -> Self {
        Self::from_coefficients(surface.ring(), (0..surface.triangle_count()).map(|t| (t, 1)))
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn add_triangle(&mut self, triangle: usize, value: i64) {
        accumulate(&mut self.coefficients, self.ring, triangle, value);
    }

    pub fn coefficient(&self, triangle: usize) -> i64 {
        self.coefficients.get(&triangle).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coefficients.iter().map(|(&t, &c)| (t, c))
    }

    pub fn support_len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn added(&self, other: &TwoChain) -> TwoChain {
        let mut out = self.clone();
        for (t, c) in other.iter() {
            out.add_triangle(t, c);
        }
        out
    }

    pub fn negated(&self) -> TwoChain {
        TwoChain::from_coefficients(self.ring, self.iter().map(|(t, c)| (t, -c)))
    }

    pub fn boundary(&self, surface: &SimplicialSurface) -> OneCycle {
        let mut z = OneCycle::zero(self.ring);
        for (t, c) in self.iter() {
            for (e, sign) in surface.oriented_boundary(t) {
                z.add_edge(e, sign * c);
            }
        }
        z
    }

    /// True when this is ±[M] (ℤ) or [M] (ℤ/2).
    pub fn is_fundamental_class(&self, surface: &SimplicialSurface) -> bool {
        if self.support_len() != surface.triangle_count() {
            return false;
        }
        match self.ring {
            Ring::Mod2 => self.coefficients.values().all(|&c| c == 1),
            Ring::Integer => {
                let first = *self.coefficients.values().next().unwrap();
                first.abs() == 1 && self.coefficients.values().all(|&c| c == first)
            }
        }
    }
}

/// A discrete sweep-out: cycles `z_0, …, z_m` and certificates `c_0, …, c_{m−1}`
/// with `∂c_i = z_{i+1} − z_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepOut {
    pub ring: Ring,
    pub steps: Vec<OneCycle>,
    pub certificates: Vec<TwoChain>,
}

impl SweepOut {
    /// Integrates certificates from the null cycle: `z_{i+1} = z_i + ∂c_i`.
    pub fn from_certificates(surface: &SimplicialSurface, ring: Ring, certificates: Vec<TwoChain>) -> Self {
        let mut steps = Vec::with_capacity(certificates.len() + 1);
        let mut z = OneCycle::zero(ring);
        steps.push(z.clone());
        for c in &certificates {
            z = z.added(&c.boundary(surface));
            steps.push(z.clone());
        }
        Self {
            ring,
            steps,
            certificates,
        }
    }

    pub fn mass_profile(&self) -> Vec<u64> {
        self.steps.iter().map(OneCycle::mass).collect()
    }

    pub fn max_mass(&self) -> u64 {
        self.steps.iter().map(OneCycle::mass).max().unwrap_or(0)
    }

    /// Sum of all certificates.
    pub fn swept_class(&self) -> TwoChain {
        let mut total = TwoChain::zero(self.ring);
        for c in &self.certificates {
            total = total.added(c);
        }
        total
    }

    /// True when every certificate is supported on exactly one triangle.
    pub fn has_single_triangle_moves(&self) -> bool {
        self.certificates.iter().all(|c| c.support_len() == 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub endpoints_null: bool,
    pub certificates_valid: bool,
    pub generator_certificate: bool,
    /// Index of the first certificate with `∂c_i ≠ z_{i+1} − z_i`.
    pub first_invalid_certificate: Option<usize>,
    pub max_mass: u64,
}

impl VerificationReport {
    pub fn accepted(&self) -> bool {
        self.endpoints_null && self.certificates_valid && self.generator_certificate
    }
}

pub fn verify_sweep_out(
    surface: &SimplicialSurface,
    sweep: &SweepOut,
) -> Result<VerificationReport, ChainError> {
    if sweep.steps.is_empty() || sweep.certificates.len() + 1 != sweep.steps.len() {
        return Err(ChainError::LengthMismatch {
            steps: sweep.steps.len(),
            certificates: sweep.certificates.len(),
        });
    }
    let ring = sweep.ring;
    let ring_ok = sweep.steps.iter().all(|z| z.ring() == ring)
        && sweep.certificates.iter().all(|c| c.ring() == ring);
    let endpoints_null = sweep.steps[0].is_zero() && sweep.steps.last().unwrap().is_zero();
    let first_invalid_certificate = sweep.certificates.iter().enumerate().position(|(i, c)| {
        c.boundary(surface) != sweep.steps[i + 1].subtracted(&sweep.steps[i])
    });
    let generator_certificate = sweep.swept_class().is_fundamental_class(surface);
    Ok(VerificationReport {
        endpoints_null,
        certificates_valid: ring_ok && first_invalid_certificate.is_none(),
        generator_certificate: ring_ok && generator_certificate,
        first_invalid_certificate,
        max_mass: sweep.max_mass(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use proptest::prelude::*;

    fn sweep_in_order(s: &SimplicialSurface, order: &[usize]) -> SweepOut {
        let certs = order.iter().map(|&t| TwoChain::single(s.ring(), t, 1)).collect();
        SweepOut::from_certificates(s, s.ring(), certs)
    }

    #[test]
    fn triangle_boundary_has_mass_three() {
        let s = corpus::tetrahedron();
        let z = TwoChain::single(Ring::Integer, 0, 1).boundary(&s);
        assert_eq!(z.mass(), 3);
        assert!(z.is_cycle(&s));
        assert_eq!(OneCycle::zero(Ring::Integer).mass(), 0);
    }

    #[test]
    fn fundamental_class_has_no_boundary() {
        for (name, s) in corpus::all().into_iter().take(8) {
            assert!(TwoChain::fundamental_class(&s).boundary(&s).is_zero(), "{name}");
        }
    }

    #[test]
    fn adjacent_triangles_mod2_cancel_shared_edge() {
        let s = corpus::octahedron();
        let e = s.triangle_edges(0)[0];
        let [a, b] = s.edge_triangles(e);
        let c = TwoChain::from_coefficients(Ring::Mod2, [(a, 1), (b, 1)]);
        let z = c.boundary(&s);
        assert_eq!(z.support_len(), 4);
        assert_eq!(z.coefficient(e), 0);
        assert!(z.is_cycle(&s));
    }

    #[test]
    fn multiplicity_counts_in_mass() {
        let s = corpus::tetrahedron();
        let z = TwoChain::single(Ring::Integer, 0, -2).boundary(&s);
        assert_eq!(z.mass(), 6);
        assert_eq!(z.iter().map(|(_, c)| c.abs()).max(), Some(2));
    }

    /// Brute force: every ordering of the tetrahedron's triangles peaks at mass 4.
    #[test]
    fn tetrahedron_orderings_all_peak_at_four() {
        let s = corpus::tetrahedron();
        let mut order = [0usize, 1, 2, 3];
        let mut count = 0;
        permute(&mut order, 0, &mut |o| {
            let sweep = sweep_in_order(&s, o);
            let report = verify_sweep_out(&s, &sweep).unwrap();
            assert!(report.accepted());
            assert_eq!(report.max_mass, 4);
            assert_eq!(sweep.mass_profile(), vec![0, 3, 4, 3, 0]);
            count += 1;
        });
        assert_eq!(count, 24);
    }

    fn permute(v: &mut [usize], k: usize, f: &mut impl FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, f);
            v.swap(k, i);
        }
    }

    #[test]
    fn zeroed_certificate_is_detected() {
        let s = corpus::octahedron();
        let mut sweep = sweep_in_order(&s, &(0..8).collect::<Vec<_>>());
        sweep.certificates[3] = TwoChain::zero(s.ring());
        let report = verify_sweep_out(&s, &sweep).unwrap();
        assert!(!report.certificates_valid);
        assert_eq!(report.first_invalid_certificate, Some(3));
        assert!(!report.accepted());
    }

    #[test]
    fn double_cover_mod2_is_not_a_generator() {
        let s = corpus::projective_plane();
        let order: Vec<usize> = (0..10).chain(0..10).collect();
        let sweep = sweep_in_order(&s, &order);
        let report = verify_sweep_out(&s, &sweep).unwrap();
        assert!(report.endpoints_null);
        assert!(report.certificates_valid);
        assert!(!report.generator_certificate);
    }

    #[test]
    fn negated_fundamental_class_is_accepted_over_z() {
        let s = corpus::icosahedron();
        let certs = (0..20).map(|t| TwoChain::single(Ring::Integer, t, -1)).collect();
        let sweep = SweepOut::from_certificates(&s, Ring::Integer, certs);
        assert!(verify_sweep_out(&s, &sweep).unwrap().accepted());
    }

    #[test]
    fn length_mismatch() {
        let s = corpus::tetrahedron();
        let mut sweep = sweep_in_order(&s, &[0, 1, 2, 3]);
        sweep.certificates.pop();
        assert_eq!(
            verify_sweep_out(&s, &sweep),
            Err(ChainError::LengthMismatch {
                steps: 5,
                certificates: 3
            })
        );
    }

    fn chain_strategy(ring: Ring, n: usize) -> impl Strategy<Value = TwoChain> {
        prop::collection::vec((0..n, -3i64..=3), 0..2 * n)
            .prop_map(move |entries| TwoChain::from_coefficients(ring, entries))
    }

    proptest! {
        #[test]
        fn boundary_of_boundary_vanishes(c in chain_strategy(Ring::Integer, 80)) {
            let s = corpus::subdivided_icosahedron(1);
            prop_assert!(c.boundary(&s).is_cycle(&s));
        }

        #[test]
        fn boundary_of_boundary_vanishes_mod2(c in chain_strategy(Ring::Mod2, 18)) {
            let s = corpus::klein_bottle();
            prop_assert!(c.boundary(&s).is_cycle(&s));
        }

        #[test]
        fn mass_is_subadditive_and_sign_invariant(
            a in chain_strategy(Ring::Integer, 80),
            b in chain_strategy(Ring::Integer, 80),
        ) {
            let s = corpus::subdivided_icosahedron(1);
            let (za, zb) = (a.boundary(&s), b.boundary(&s));
            prop_assert!(za.added(&zb).mass() <= za.mass() + zb.mass());
            prop_assert_eq!(za.negated().mass(), za.mass());
        }

        /// Single-triangle ℤ/2 sweeps: the odd-count moves by one per step,
        /// so some step has swept exactly ⌈N/2⌉ triangles.
        #[test]
        fn crossing_property(perm in Just((0..18usize).collect::<Vec<_>>()).prop_shuffle()) {
            let s = corpus::klein_bottle();
            let sweep = sweep_in_order(&s, &perm);
            let mut partial = TwoChain::zero(Ring::Mod2);
            let mut counts = vec![0usize];
            for c in &sweep.certificates {
                partial = partial.added(c);
                counts.push(partial.support_len());
            }
            prop_assert!(counts.windows(2).all(|w| w[0].abs_diff(w[1]) == 1));
            prop_assert_eq!(*counts.last().unwrap(), 18);
            prop_assert!(counts.contains(&9));
        }
    }
}
