//! Sweep-out construction.
//!
//! Small surfaces are swept one triangle at a time. Larger ones are cut
//! along a short cycle δ, both sides are capped and swept recursively, the
//! child sweeps are restricted back to their domains and the two halves are
//! pasted: sweep D₁ up to δ, then run the sweep of D₂ backwards.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::chains::{verify_sweep_out, ChainError, OneCycle, SweepOut, TwoChain, VerificationReport};
use crate::decompose::{
    c0, cone_off, fewer_triangles_check, n_zero, split_surface, ConedSurface, CutSource, DecomposeError,
};
use crate::spectral::{cheeger_bound, CheegerConstant, CutMode, Decomposition, Side, SpectralOptions};
use crate::surface::{area_of, GenusConvention, Ring, SimplicialSurface};

pub const MAX_DEPTH: usize = 64;
/// Constant of the headline inequality.
pub const THEOREM_CONSTANT: f64 = 1e8;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("recursion deeper than {0} levels")]
    RecursionDepthExceeded(usize),
    #[error("restricted certificates of piece {piece} do not sum to its domain")]
    ProvenanceMismatch { piece: usize },
    #[error("the two sides end on different cycles")]
    SignMismatch,
    #[error("certificate {step} is not a single-triangle move")]
    NotSingleTriangleMoves { step: usize },
    #[error("emitted sweep-out failed verification: {0:?}")]
    Unverified(VerificationReport),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseOrder {
    /// Next triangle minimizes the resulting frontier; ties by index.
    #[default]
    Greedy,
    /// Triangles in index order.
    Given,
}

impl std::str::FromStr for BaseOrder {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(Self::Greedy),
            "given" => Ok(Self::Given),
            other => Err(format!("unknown base order `{other}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BuildConfig {
    /// Recurse only above `N₀` and require the cut-length bound.
    pub proof_faithful: bool,
    /// Practical mode: surfaces with fewer triangles are swept directly.
    pub min_triangles: usize,
    /// Practical mode: largest cut ratio worth recursing on.
    /// `None` uses the Cheeger bound of the surface being split.
    pub ratio_threshold: Option<f64>,
    pub cut_source: CutSource,
    pub cut_mode: CutMode,
    pub base_order: BaseOrder,
    pub cheeger_constant: CheegerConstant,
    pub genus_convention: GenusConvention,
    pub spectral: SpectralOptions,
    pub max_depth: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        Self {
            proof_faithful: false,
            min_triangles: 32,
            ratio_threshold: None,
            cut_source: CutSource::Spectral,
            cut_mode: CutMode::Cheeger,
            base_order: BaseOrder::Greedy,
            cheeger_constant: CheegerConstant::default(),
            genus_convention: GenusConvention::default(),
            spectral: SpectralOptions::default(),
            max_depth: MAX_DEPTH,
        }
    }
}

/// Adds triangles one at a time.
pub fn base_sweep_out(surface: &SimplicialSurface, order: BaseOrder) -> SweepOut {
    let n = surface.triangle_count();
    let ring = surface.ring();
    let sequence: Vec<usize> = match order {
        BaseOrder::Given => (0..n).collect(),
        BaseOrder::Greedy => {
            // Adding t changes the frontier by 3 − 2·(swept neighbours of t).
            let mut swept_neighbors = vec![0usize; n];
            let mut buckets: [BTreeSet<usize>; 4] = Default::default();
            buckets[0].extend(0..n);
            let mut done = vec![false; n];
            let mut seq = Vec::with_capacity(n);
            for _ in 0..n {
                let k = (0..4).rev().find(|&k| !buckets[k].is_empty()).unwrap();
                let t = buckets[k].pop_first().unwrap();
                done[t] = true;
                seq.push(t);
                for s in surface.triangle_neighbors(t) {
                    if !done[s] {
                        buckets[swept_neighbors[s]].remove(&s);
                        swept_neighbors[s] += 1;
                        buckets[swept_neighbors[s]].insert(s);
                    }
                }
            }
            seq
        }
    };
    let certificates = sequence.into_iter().map(|t| TwoChain::single(ring, t, 1)).collect();
    SweepOut::from_certificates(surface, ring, certificates)
}

/// A family on the original surface running from the null cycle to the
/// boundary of one side.
#[derive(Debug, Clone)]
pub struct PartialFamily {
    pub certificates: Vec<TwoChain>,
    pub steps: Vec<OneCycle>,
    pub max_mass: u64,
}

impl PartialFamily {
    fn from_certificates(surface: &SimplicialSurface, certificates: Vec<TwoChain>) -> Self {
        let sweep = SweepOut::from_certificates(surface, surface.ring(), certificates);
        Self {
            max_mass: sweep.max_mass(),
            certificates: sweep.certificates,
            steps: sweep.steps,
        }
    }

    pub fn end(&self) -> &OneCycle {
        self.steps.last().expect("a family has at least its initial cycle")
    }
}

/// Restricts the certificates of a sweep of a capped piece to the piece's
/// domain triangles, mapped back to the original surface.
///
/// The resulting family ends on the boundary of the domain and its cycles
/// exceed the child's by at most the boundary length.
pub fn restrict_and_correct(
    original: &SimplicialSurface,
    sweep: &SweepOut,
    cone: &ConedSurface,
    piece: usize,
) -> Result<PartialFamily, BuildError> {
    let ring = original.ring();
    let mut certificates = Vec::with_capacity(sweep.certificates.len());
    let mut total = TwoChain::zero(ring);
    for c in &sweep.certificates {
        let restricted = TwoChain::from_coefficients(
            ring,
            c.iter()
                .filter(|&(t, _)| t < cone.domain_triangles)
                .map(|(t, coef)| {
                    let (orig, sign) = cone.provenance[t];
                    (orig, coef * sign)
                }),
        );
        if !restricted.is_zero() {
            total = total.added(&restricted);
            certificates.push(restricted);
        }
    }
    if total.support_len() != cone.domain_triangles
        || !cone.domain().all(|t| total.coefficient(t) != 0)
    {
        return Err(BuildError::ProvenanceMismatch { piece });
    }
    let first = total.iter().next().map(|(_, c)| c).unwrap_or(1);
    if ring == Ring::Integer && !total.iter().all(|(_, c)| c == first && c.abs() == 1) {
        return Err(BuildError::ProvenanceMismatch { piece });
    }
    if first == -1 {
        certificates = certificates.iter().map(TwoChain::negated).collect();
    }
    let family = PartialFamily::from_certificates(original, certificates);
    assert!(
        family.max_mass <= sweep.max_mass() + cone.boundary_length() as u64,
        "restriction exceeded child mass plus boundary length"
    );
    Ok(family)
}

/// Runs the pieces of one side one after another.
fn concatenate(surface: &SimplicialSurface, families: Vec<PartialFamily>) -> PartialFamily {
    let certificates = families.into_iter().flat_map(|f| f.certificates).collect();
    PartialFamily::from_certificates(surface, certificates)
}

/// Side one up to δ, then side two backwards.
pub fn paste_sweep_outs(
    surface: &SimplicialSurface,
    p1: &PartialFamily,
    p2: &PartialFamily,
    dec: &Decomposition,
) -> Result<SweepOut, BuildError> {
    let ring = surface.ring();
    let (e1, e2) = (p1.end(), p2.end());
    let delta = match ring {
        Ring::Integer => e1.iter().map(|(e, _)| e).collect::<Vec<_>>(),
        Ring::Mod2 => e1.support().collect(),
    };
    if !e1.added(e2).is_zero() || delta != dec.delta.support().collect::<Vec<_>>() {
        return Err(BuildError::SignMismatch);
    }
    let certificates = p1
        .certificates
        .iter()
        .cloned()
        .chain(p2.certificates.iter().rev().cloned())
        .collect();
    let sweep = SweepOut::from_certificates(surface, ring, certificates);
    assert!(
        sweep.max_mass() <= p1.max_mass.max(p2.max_mass),
        "pasting raised the max mass"
    );
    Ok(sweep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Base,
    Split,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RecursionNode {
    pub triangles: usize,
    pub euler_characteristic: i64,
    pub kind: NodeKind,
    pub delta_length: Option<u64>,
    pub cut_ratio: Option<f64>,
    pub max_mass: u64,
    pub child_max_masses: Vec<u64>,
    /// `max_mass ≤ max(child_max_masses) + delta_length`.
    pub pasting_bound_holds: bool,
    pub children: Vec<RecursionNode>,
}

impl RecursionNode {
    /// All nodes, depth first.
    pub fn nodes(&self) -> Vec<&RecursionNode> {
        let mut out = vec![self];
        for c in &self.children {
            out.extend(c.nodes());
        }
        out
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(RecursionNode::depth).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundReport {
    pub max_mass: u64,
    pub triangles: usize,
    pub area: f64,
    pub genus_parameter: f64,
    /// `6·C₀·√(g+1)·√area`.
    pub bound6_c0: f64,
    /// `10⁸·√(g+1)·√area`.
    pub bound_theorem: f64,
    pub pass6_c0: bool,
    pub pass_theorem: bool,
    pub verification: VerificationReport,
    pub recursion: RecursionNode,
}

pub fn explicit_bound(genus: f64, area: f64) -> f64 {
    6.0 * c0() * (genus + 1.0).sqrt() * area.sqrt()
}

pub fn theorem_bound(genus: f64, area: f64) -> f64 {
    THEOREM_CONSTANT * (genus + 1.0).sqrt() * area.sqrt()
}

fn verified(surface: &SimplicialSurface, sweep: &SweepOut) -> Result<VerificationReport, BuildError> {
    let report = verify_sweep_out(surface, sweep)?;
    if !report.accepted() {
        return Err(BuildError::Unverified(report));
    }
    Ok(report)
}

fn base_node(surface: &SimplicialSurface, sweep: &SweepOut) -> RecursionNode {
    RecursionNode {
        triangles: surface.triangle_count(),
        euler_characteristic: surface.euler_characteristic(),
        kind: NodeKind::Base,
        delta_length: None,
        cut_ratio: None,
        max_mass: sweep.max_mass(),
        child_max_masses: Vec::new(),
        pasting_bound_holds: true,
        children: Vec::new(),
    }
}

fn build(
    surface: &SimplicialSurface,
    config: &BuildConfig,
    depth: usize,
) -> Result<(SweepOut, RecursionNode), BuildError> {
    if depth > config.max_depth {
        return Err(BuildError::RecursionDepthExceeded(config.max_depth));
    }
    let n = surface.triangle_count();
    let genus = surface.genus_parameter(config.genus_convention);
    let base = || {
        let sweep = base_sweep_out(surface, config.base_order);
        verified(surface, &sweep)?;
        let node = base_node(surface, &sweep);
        Ok((sweep, node))
    };
    let small = if config.proof_faithful {
        n as f64 <= n_zero(genus)
    } else {
        n < config.min_triangles
    };
    if small {
        return base();
    }
    let split = split_surface(
        surface,
        config.cut_source,
        config.cut_mode,
        config.genus_convention,
        config.proof_faithful,
        &config.spectral,
    )?;
    let dec = split.decomposition;
    if !config.proof_faithful {
        let threshold = config
            .ratio_threshold
            .unwrap_or_else(|| cheeger_bound(surface, genus, config.cheeger_constant));
        if dec.ratio > threshold {
            return base();
        }
    }
    let m1 = cone_off(surface, &dec, Side::First)?;
    let m2 = cone_off(surface, &dec, Side::Second)?;
    if !fewer_triangles_check(surface, &m1, &m2) {
        return base();
    }
    let mut children = Vec::new();
    let mut child_max_masses = Vec::new();
    let mut sides = Vec::with_capacity(2);
    let mut piece_index = 0;
    for pieces in [&m1, &m2] {
        let mut families = Vec::with_capacity(pieces.len());
        for cone in pieces.iter() {
            let (child_sweep, child_node) = build(&cone.surface, config, depth + 1)?;
            child_max_masses.push(child_sweep.max_mass());
            families.push(restrict_and_correct(surface, &child_sweep, cone, piece_index)?);
            children.push(child_node);
            piece_index += 1;
        }
        sides.push(concatenate(surface, families));
    }
    let delta_length = dec.delta_length();
    let child_max = child_max_masses.iter().copied().max().unwrap_or(0);
    for side in &sides {
        assert!(side.max_mass <= child_max + delta_length);
    }
    let sweep = paste_sweep_outs(surface, &sides[0], &sides[1], &dec)?;
    verified(surface, &sweep)?;
    let pasting_bound_holds = sweep.max_mass() <= child_max + delta_length;
    assert!(pasting_bound_holds, "pasting bound violated");
    let node = RecursionNode {
        triangles: n,
        euler_characteristic: surface.euler_characteristic(),
        kind: NodeKind::Split,
        delta_length: Some(delta_length),
        cut_ratio: Some(dec.ratio),
        max_mass: sweep.max_mass(),
        child_max_masses,
        pasting_bound_holds,
        children,
    };
    Ok((sweep, node))
}

/// Certified sweep-out with its bound checks.
pub fn build_sweep_out(
    surface: &SimplicialSurface,
    config: &BuildConfig,
) -> Result<(SweepOut, BoundReport), BuildError> {
    let (sweep, recursion) = build(surface, config, 0)?;
    let verification = verified(surface, &sweep)?;
    let genus = surface.genus_parameter(config.genus_convention);
    let area = surface.area();
    let max_mass = sweep.max_mass();
    let bound6_c0 = explicit_bound(genus, area);
    let bound_theorem = theorem_bound(genus, area);
    let report = BoundReport {
        max_mass,
        triangles: surface.triangle_count(),
        area,
        genus_parameter: genus,
        bound6_c0,
        bound_theorem,
        pass6_c0: (max_mass as f64) <= bound6_c0,
        pass_theorem: (max_mass as f64) <= bound_theorem,
        verification,
        recursion,
    };
    Ok((sweep, report))
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Bisection {
    /// Index of the sweep step that was cut out.
    pub step: usize,
    #[serde(skip)]
    pub cycle: OneCycle,
    pub domain1: Vec<usize>,
    pub domain2: Vec<usize>,
    pub length: u64,
    pub step_mass: u64,
    pub sweep_max_mass: u64,
    /// `|area(D₁) − area(D₂)|`.
    pub area_gap: f64,
    pub bound: f64,
    pub within_bound: bool,
}

/// Cuts a single-triangle-move sweep where half the triangles are swept.
pub fn derive_bisection(
    surface: &SimplicialSurface,
    sweep: &SweepOut,
    convention: GenusConvention,
) -> Result<Bisection, BuildError> {
    let n = surface.triangle_count();
    let target = n.div_ceil(2);
    let mut swept = vec![false; n];
    let mut count = 0usize;
    let mut step = None;
    for (i, c) in sweep.certificates.iter().enumerate() {
        let mut it = c.iter();
        let (Some((t, coef)), None) = (it.next(), it.next()) else {
            return Err(BuildError::NotSingleTriangleMoves { step: i });
        };
        if coef.abs() != 1 {
            return Err(BuildError::NotSingleTriangleMoves { step: i });
        }
        swept[t] = !swept[t];
        if swept[t] {
            count += 1;
        } else {
            count -= 1;
        }
        if count == target {
            step = Some(i + 1);
            break;
        }
    }
    let step = step.expect("a sweep-out passes every swept count");
    let dec = Decomposition::from_membership(surface, &swept);
    let genus = surface.genus_parameter(convention);
    let bound = explicit_bound(genus, surface.area());
    let length = dec.delta_length();
    Ok(Bisection {
        step,
        step_mass: sweep.steps[step].mass(),
        sweep_max_mass: sweep.max_mass(),
        area_gap: area_of(dec.domain1.len().abs_diff(dec.domain2.len())),
        within_bound: length as f64 <= bound,
        bound,
        length,
        cycle: dec.delta,
        domain1: dec.domain1,
        domain2: dec.domain2,
    })
}
