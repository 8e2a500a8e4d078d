//! Whole-surface reports: analysis and the invariant suite.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::builder::{
    base_sweep_out, build_sweep_out, derive_bisection, explicit_bound, theorem_bound, BaseOrder, BoundReport,
    BuildConfig, BuildError,
};
use crate::chains::{verify_sweep_out, SweepOut, TwoChain};
use crate::decompose::cut_length_bound;
use crate::io::REPORT_SCHEMA;
use crate::oracle::{
    crossing_bound_value, exact_cheeger, minimal_sweep_max_mass, respects_crossing_bound, CHEEGER_MAX_TRIANGLES,
    SWEEP_MAX_TRIANGLES,
};
use crate::spectral::{cheeger_bound, fiedler_cut, fiedler_pair, SpectralError};
use crate::surface::{SimplicialSurface, TopologySummary};

/// Allowed excess of `λ₁·area` over `24π(g+1)`.
pub const LI_YAU_SLACK: f64 = 0.10;

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LiYau {
    pub lambda1: f64,
    pub product: f64,
    pub bound: f64,
    pub holds: bool,
    /// Within the 10% slack.
    pub within_slack: bool,
    /// Whether a violation fails the run (genus-0 orientable surfaces only).
    pub enforced: bool,
}

pub fn li_yau(surface: &SimplicialSurface, config: &BuildConfig) -> Result<LiYau, SpectralError> {
    let pair = fiedler_pair(surface, &config.spectral)?;
    let genus = surface.genus_parameter(config.genus_convention);
    let product = pair.value * surface.area();
    let bound = 24.0 * PI * (genus + 1.0);
    Ok(LiYau {
        lambda1: pair.value,
        product,
        bound,
        holds: product <= bound,
        within_slack: product <= (1.0 + LI_YAU_SLACK) * bound,
        enforced: surface.is_orientable() && genus == 0.0,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalyzeReport {
    pub schema: &'static str,
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub topology: TopologySummary,
    pub area: f64,
    pub cheeger_bound: f64,
    pub bound6_c0: f64,
    pub bound_theorem: f64,
}

pub fn analyze(surface: &SimplicialSurface, config: &BuildConfig) -> AnalyzeReport {
    let topology = surface.topology(config.genus_convention);
    let g = topology.genus_parameter;
    AnalyzeReport {
        schema: REPORT_SCHEMA,
        vertices: surface.vertex_count(),
        edges: surface.edge_count(),
        triangles: surface.triangle_count(),
        area: surface.area(),
        cheeger_bound: cheeger_bound(surface, g, config.cheeger_constant),
        bound6_c0: explicit_bound(g, surface.area()),
        bound_theorem: theorem_bound(g, surface.area()),
        topology,
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CutCheck {
    pub delta_length: u64,
    pub min_side: usize,
    pub ratio: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheegerCheck {
    pub exact: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleCheck {
    pub optimum: u64,
    pub greedy: u64,
    pub crossing_lower_bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BisectionCheck {
    pub domain1: usize,
    pub domain2: usize,
    pub length: u64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MeshCheck {
    pub name: String,
    pub triangles: usize,
    pub topology: TopologySummary,
    pub sweep: BoundReport,
    pub pasting_bound_holds: bool,
    pub mutation_detected: bool,
    pub bisection: BisectionCheck,
    pub fiedler_cut: CutCheck,
    pub cheeger: Option<CheegerCheck>,
    pub oracle: Option<OracleCheck>,
    pub li_yau: LiYau,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteReport {
    pub schema: &'static str,
    pub meshes: Vec<MeshCheck>,
    pub passed: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("{name}: {source}")]
    Build { name: String, source: BuildError },
    #[error("{name}: {source}")]
    Spectral { name: String, source: SpectralError },
}

/// Replaces one certificate of a sweep with a different single triangle.
pub fn mutate_certificate(surface: &SimplicialSurface, sweep: &SweepOut, rng: &mut impl Rng) -> SweepOut {
    let mut out = sweep.clone();
    let i = rng.gen_range(0..out.certificates.len());
    let n = surface.triangle_count();
    let old: Vec<(usize, i64)> = out.certificates[i].iter().collect();
    let mut t = rng.gen_range(0..n);
    while old.len() == 1 && old[0].0 == t {
        t = rng.gen_range(0..n);
    }
    out.certificates[i] = TwoChain::single(sweep.ring, t, 1);
    out
}

pub fn check_mesh(
    name: &str,
    surface: &SimplicialSurface,
    config: &BuildConfig,
    seed: u64,
) -> Result<MeshCheck, SuiteError> {
    let build_err = |source| SuiteError::Build {
        name: name.to_string(),
        source,
    };
    let spectral_err = |source| SuiteError::Spectral {
        name: name.to_string(),
        source,
    };
    let n = surface.triangle_count();
    let genus = surface.genus_parameter(config.genus_convention);
    let (sweep, report) = build_sweep_out(surface, config).map_err(build_err)?;
    let pasting_bound_holds = report.recursion.nodes().iter().all(|node| node.pasting_bound_holds);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mutated = mutate_certificate(surface, &sweep, &mut rng);
    let mutation_detected = !verify_sweep_out(surface, &mutated)
        .map(|r| r.accepted())
        .unwrap_or(false);

    let b = derive_bisection(surface, &sweep, config.genus_convention).map_err(build_err)?;
    let bisection = BisectionCheck {
        domain1: b.domain1.len(),
        domain2: b.domain2.len(),
        length: b.length,
        bound: b.bound,
        pass: b.within_bound && b.domain1.len().abs_diff(b.domain2.len()) <= 1,
    };

    let dec = fiedler_cut(surface, config.cut_mode, &config.spectral).map_err(spectral_err)?;
    let bound = cut_length_bound(surface, genus, &dec);
    let fiedler = CutCheck {
        delta_length: dec.delta_length(),
        min_side: dec.min_side(),
        ratio: dec.ratio,
        bound,
        pass: dec.delta_length() as f64 <= bound,
    };

    let cheeger = (n <= CHEEGER_MAX_TRIANGLES).then(|| {
        let h = exact_cheeger(surface).expect("within the enumeration cap");
        let bound = cheeger_bound(surface, genus, crate::spectral::CheegerConstant::NinetySix);
        CheegerCheck {
            exact: h.value,
            bound,
            pass: h.value <= bound,
        }
    });
    let oracle = (n <= SWEEP_MAX_TRIANGLES).then(|| {
        let (optimum, _) = minimal_sweep_max_mass(surface).expect("within the search cap");
        let greedy = base_sweep_out(surface, BaseOrder::Greedy).max_mass();
        let h = exact_cheeger(surface).expect("within the enumeration cap");
        OracleCheck {
            optimum,
            greedy,
            crossing_lower_bound: crossing_bound_value(&h, n),
            pass: greedy >= optimum && respects_crossing_bound(&h, n, optimum),
        }
    });
    let li_yau = li_yau(surface, config).map_err(spectral_err)?;

    let passed = report.verification.accepted()
        && report.pass6_c0
        && report.pass_theorem
        && pasting_bound_holds
        && mutation_detected
        && bisection.pass
        && fiedler.pass
        && cheeger.as_ref().is_none_or(|c| c.pass)
        && oracle.as_ref().is_none_or(|o| o.pass)
        && (!li_yau.enforced || li_yau.within_slack);
    Ok(MeshCheck {
        name: name.to_string(),
        triangles: n,
        topology: surface.topology(config.genus_convention),
        sweep: report,
        pasting_bound_holds,
        mutation_detected,
        bisection,
        fiedler_cut: fiedler,
        cheeger,
        oracle,
        li_yau,
        passed,
    })
}

/// Runs every check on every mesh, in the given order.
pub fn check_suite(
    meshes: &[(String, SimplicialSurface)],
    config: &BuildConfig,
    seed: u64,
) -> Result<SuiteReport, SuiteError> {
    let meshes = meshes
        .iter()
        .map(|(name, s)| check_mesh(name, s, config, seed))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SuiteReport {
        schema: REPORT_SCHEMA,
        passed: meshes.iter().all(|m| m.passed),
        meshes,
    })
}
