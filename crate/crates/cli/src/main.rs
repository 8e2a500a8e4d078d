//! `dias`: sweep-outs, bisections and bound checks for triangulated surfaces.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dias_core::builder::{build_sweep_out, derive_bisection, BuildConfig, BuildError};
use dias_core::decompose::DecomposeError;
use dias_core::equilateralize::{equilateralize, PIPELINE_BOUND};
use dias_core::io::{profile_csv, profile_svg, read_mesh, to_json, InputError, MeshInput, REPORT_SCHEMA};
use dias_core::oracle::{exact_cheeger, minimal_sweep_max_mass};
use dias_core::report::{analyze, check_mesh, check_suite, MeshCheck};
use dias_core::spectral::{CheegerConstant, SpectralOptions};
use dias_core::surface::{GenusConvention, SimplicialSurface};

#[derive(Parser)]
#[command(name = "dias", version, about = "Certified sweep-outs of triangulated closed surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Args)]
struct Options {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "DIAS_SEED", default_value_t = 42)]
    seed: u64,
    /// Constant in the Cheeger bound (32 applies to orientable surfaces only).
    #[arg(long, global = true, env = "DIAS_CHEEGER_CONSTANT", default_value = "96")]
    cheeger_constant: CheegerConstant,
    /// Relative residual tolerance of the eigensolver.
    #[arg(long, global = true, env = "DIAS_EIG_TOL", default_value_t = 1e-8)]
    eig_tol: f64,
    /// Recurse only above N₀ and demand the cut-length bound at every split.
    #[arg(long, global = true, env = "DIAS_PROOF_FAITHFUL")]
    proof_faithful: bool,
    /// Genus of nonorientable surfaces: ceil-half or demigenus.
    #[arg(long, global = true, env = "DIAS_GENUS_CONVENTION", default_value = "ceil-half")]
    genus_convention: GenusConvention,
    /// Practical mode: surfaces below this size are swept directly.
    #[arg(long, global = true, env = "DIAS_MIN_TRIANGLES", default_value_t = 32)]
    min_triangles: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, env = "DIAS_OUT")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Topology, area and the bounds that apply to a mesh.
    Analyze { path: PathBuf },
    /// Build and verify a sweep-out.
    Sweep {
        path: PathBuf,
        /// Mass profile as CSV.
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Mass profile as an SVG plot.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Split a mesh into two domains of equal area.
    Bisect { path: PathBuf },
    /// Run the invariant suite on one mesh or a directory of meshes.
    Check {
        #[arg(long, conflicts_with = "path", required_unless_present = "path")]
        suite: Option<PathBuf>,
        path: Option<PathBuf>,
    },
    /// Turn a mesh with coordinates or edge lengths into a unit-equilateral one.
    Equilateralize {
        path: PathBuf,
        /// Write the resulting combinatorial mesh as JSON.
        #[arg(long)]
        mesh_out: Option<PathBuf>,
    },
    /// Exact Cheeger constant and minimal sweep-out of a small mesh.
    Oracle { path: PathBuf },
}

enum Failure {
    Parse(String),
    Invalid(String),
    Bound(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        if e.is_parse() {
            Failure::Parse(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

impl From<BuildError> for Failure {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::Unverified(_) | BuildError::Decompose(DecomposeError::NoCutFound { .. }) => {
                Failure::Bound(e.to_string())
            }
            other => Failure::Invalid(other.to_string()),
        }
    }
}

impl Options {
    fn config(&self) -> BuildConfig {
        BuildConfig {
            proof_faithful: self.proof_faithful,
            min_triangles: self.min_triangles,
            cheeger_constant: self.cheeger_constant,
            genus_convention: self.genus_convention,
            spectral: SpectralOptions {
                tolerance: self.eig_tol,
                seed: self.seed,
                ..SpectralOptions::default()
            },
            ..BuildConfig::default()
        }
    }

    fn emit<T: Serialize>(&self, report: &T) -> Result<(), Failure> {
        let text = to_json(report);
        match &self.out {
            Some(path) => write(path, &text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<SimplicialSurface, Failure> {
    Ok(read_mesh(path)?.surface()?)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Report<T: Serialize> {
    schema: &'static str,
    #[serde(flatten)]
    body: T,
}

fn wrap<T: Serialize>(body: T) -> Report<T> {
    Report {
        schema: REPORT_SCHEMA,
        body,
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SweepBody {
    #[serde(flatten)]
    bound: dias_core::builder::BoundReport,
    mass_profile: Vec<u64>,
    steps: usize,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EquilateralBody {
    triangles_in: usize,
    triangles_out: usize,
    euler_characteristics: [i64; 4],
    splits: usize,
    bisections: usize,
    global_k: f64,
    k_bound: f64,
    scale: f64,
    area_ratio: f64,
    area_ratio_within_bounds: bool,
    max_triangle_bilipschitz: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct OracleBody {
    triangles: usize,
    cheeger: f64,
    cheeger_boundary_length: u64,
    cheeger_min_side: usize,
    minimal_max_mass: u64,
    minimal_profile: Vec<u64>,
}

fn failed_checks(m: &MeshCheck) -> Vec<String> {
    let mut out = Vec::new();
    let s = &m.sweep;
    if !s.verification.accepted() {
        out.push("sweep-out failed verification".to_string());
    }
    if !s.pass6_c0 {
        out.push(format!("maxMass {} > 6·C₀·√(g+1)·√area = {}", s.max_mass, s.bound6_c0));
    }
    if !s.pass_theorem {
        out.push(format!("maxMass {} > 10⁸·√(g+1)·√area = {}", s.max_mass, s.bound_theorem));
    }
    if !m.pasting_bound_holds {
        out.push("pasted maxMass > max(child maxMass) + |δ| at some node".to_string());
    }
    if !m.mutation_detected {
        out.push("mutated certificate was accepted".to_string());
    }
    if !m.bisection.pass {
        out.push(format!(
            "bisection {}|{} with length {} against bound {}",
            m.bisection.domain1, m.bisection.domain2, m.bisection.length, m.bisection.bound
        ));
    }
    if !m.fiedler_cut.pass {
        out.push(format!("|δ| {} > cut bound {}", m.fiedler_cut.delta_length, m.fiedler_cut.bound));
    }
    if let Some(c) = m.cheeger.as_ref().filter(|c| !c.pass) {
        out.push(format!("h {} > Cheeger bound {}", c.exact, c.bound));
    }
    if let Some(o) = m.oracle.as_ref().filter(|o| !o.pass) {
        out.push(format!(
            "oracle optimum {} against greedy {} and lower bound {}",
            o.optimum, o.greedy, o.crossing_lower_bound
        ));
    }
    let ly = &m.li_yau;
    if ly.enforced && !ly.within_slack {
        out.push(format!("λ₁·area {} > 1.1·24π(g+1) = {}", ly.product, 1.1 * ly.bound));
    }
    out
}

fn suite_meshes(dir: &Path) -> Result<Vec<(String, SimplicialSurface)>, Failure> {
    let entries = std::fs::read_dir(dir).map_err(|e| Failure::Parse(format!("cannot read {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json" || e == "off"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            load(&p).map(|s| (name, s))
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), Failure> {
    let opts = &cli.opts;
    let config = opts.config();
    match &cli.command {
        Command::Analyze { path } => opts.emit(&analyze(&load(path)?, &config)),
        Command::Sweep { path, profile, svg } => {
            let surface = load(path)?;
            let (sweep, bound) = build_sweep_out(&surface, &config)?;
            let masses = sweep.mass_profile();
            if let Some(p) = profile {
                write(p, &profile_csv(&masses))?;
            }
            if let Some(p) = svg {
                write(p, &profile_svg(&masses))?;
            }
            let failures = [
                (!bound.pass6_c0).then(|| format!("maxMass {} > 6·C₀·√(g+1)·√area = {}", bound.max_mass, bound.bound6_c0)),
                (!bound.pass_theorem)
                    .then(|| format!("maxMass {} > 10⁸·√(g+1)·√area = {}", bound.max_mass, bound.bound_theorem)),
            ];
            opts.emit(&wrap(SweepBody {
                steps: sweep.certificates.len(),
                mass_profile: masses,
                bound,
            }))?;
            match failures.into_iter().flatten().next() {
                Some(f) => Err(Failure::Bound(f)),
                None => Ok(()),
            }
        }
        Command::Bisect { path } => {
            let surface = load(path)?;
            let (sweep, _) = build_sweep_out(&surface, &config)?;
            let b = derive_bisection(&surface, &sweep, config.genus_convention)?;
            let balanced = b.domain1.len().abs_diff(b.domain2.len()) <= 1;
            let failure = if !b.within_bound {
                Some(format!("boundary length {} > 6·C₀·√(g+1)·√area = {}", b.length, b.bound))
            } else if !balanced {
                Some(format!("domains {} and {} differ by more than one triangle", b.domain1.len(), b.domain2.len()))
            } else {
                None
            };
            opts.emit(&wrap(b))?;
            failure.map_or(Ok(()), |f| Err(Failure::Bound(f)))
        }
        Command::Check { suite, path } => {
            let meshes = match (suite, path) {
                (Some(dir), _) => suite_meshes(dir)?,
                (None, Some(p)) => {
                    let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                    vec![(name, load(p)?)]
                }
                (None, None) => unreachable!("clap requires one of them"),
            };
            let report = if suite.is_some() {
                check_suite(&meshes, &config, opts.seed)
            } else {
                check_mesh(&meshes[0].0, &meshes[0].1, &config, opts.seed).map(|m| dias_core::report::SuiteReport {
                    schema: REPORT_SCHEMA,
                    passed: m.passed,
                    meshes: vec![m],
                })
            }
            .map_err(|e| Failure::Invalid(e.to_string()))?;
            opts.emit(&report)?;
            let failures: Vec<String> = report
                .meshes
                .iter()
                .flat_map(|m| failed_checks(m).into_iter().map(move |f| format!("{}: {f}", m.name)))
                .collect();
            if failures.is_empty() {
                Ok(())
            } else {
                Err(Failure::Bound(failures.join("\n")))
            }
        }
        Command::Equilateralize { path, mesh_out } => {
            let geometry = read_mesh(path)?.geometry()?;
            geometry.check_admissible().map_err(|e| Failure::Invalid(e.to_string()))?;
            let eq = equilateralize(&geometry).map_err(|e| Failure::Invalid(e.to_string()))?;
            if let Some(p) = mesh_out {
                write(p, &to_json(&MeshInput::from_surface(&eq.surface)))?;
            }
            let r = &eq.report;
            let body = EquilateralBody {
                triangles_in: geometry.triangle_count(),
                triangles_out: eq.surface.triangle_count(),
                euler_characteristics: eq.euler_characteristics,
                splits: eq.splits,
                bisections: eq.bisections,
                global_k: r.global_k,
                k_bound: PIPELINE_BOUND,
                scale: r.scale,
                area_ratio: r.area_ratio,
                area_ratio_within_bounds: r.area_ratio_within_bounds,
                max_triangle_bilipschitz: r.per_triangle_bilipschitz.iter().copied().fold(1.0, f64::max),
            };
            opts.emit(&wrap(body))?;
            if r.global_k > PIPELINE_BOUND {
                return Err(Failure::Bound(format!("globalK {} > {PIPELINE_BOUND}", r.global_k)));
            }
            Ok(())
        }
        Command::Oracle { path } => {
            let surface = load(path)?;
            let h = exact_cheeger(&surface).map_err(|e| Failure::Invalid(e.to_string()))?;
            let (optimum, sweep) = minimal_sweep_max_mass(&surface).map_err(|e| Failure::Invalid(e.to_string()))?;
            opts.emit(&wrap(OracleBody {
                triangles: surface.triangle_count(),
                cheeger: h.value,
                cheeger_boundary_length: h.boundary_length,
                cheeger_min_side: h.min_side,
                minimal_max_mass: optimum,
                minimal_profile: sweep.mass_profile(),
            }))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Parse(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Invalid(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Bound(m)) => {
            eprintln!("bound check failed: {m}");
            ExitCode::from(4)
        }
    }
}
