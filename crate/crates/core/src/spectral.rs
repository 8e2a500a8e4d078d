//! Laplacian spectrum of the unit-equilateral metric and Fiedler sweep cuts.
//!
//! On a unit equilateral mesh the cotangent weight of every edge is
//! `cot(π/3) = 1/√3` and the lumped mass of a vertex is `deg(v)·√3/12`.
//! The generalized problem `L v = λ M v` is solved in the symmetric form
//! `M^{-1/2} L M^{-1/2} y = λ y` by restarted Lanczos on the complement of
//! the constant mode.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::chains::OneCycle;
use crate::surface::{area_of, Ring, SimplicialSurface};

pub const EDGE_WEIGHT: f64 = 0.577_350_269_189_625_8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("eigensolver did not reach residual {tolerance:e} within {iterations} iterations (last residual {residual:e})")]
    ConvergenceFailure {
        iterations: usize,
        tolerance: f64,
        residual: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    /// Residual tolerance relative to the eigenvector norm.
    pub tolerance: f64,
    /// Cap on operator applications.
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 100_000,
            seed: 42,
        }
    }
}

/// Constant in the area bound on the Cheeger constant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub enum CheegerConstant {
    /// Applies to orientable surfaces only; falls back to 96 otherwise.
    ThirtyTwo,
    #[default]
    NinetySix,
}

impl CheegerConstant {
    pub fn value(self, orientable: bool) -> f64 {
        match self {
            CheegerConstant::ThirtyTwo if orientable => 32.0,
            _ => 96.0,
        }
    }
}

impl std::str::FromStr for CheegerConstant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "32" => Ok(Self::ThirtyTwo),
            "96" => Ok(Self::NinetySix),
            other => Err(format!("cheeger constant must be 32 or 96, got `{other}`")),
        }
    }
}

/// `√(c·π·(g+1)) / √area`.
pub fn cheeger_bound(surface: &SimplicialSurface, genus: f64, constant: CheegerConstant) -> f64 {
    let c = constant.value(surface.is_orientable());
    (c * std::f64::consts::PI * (genus + 1.0)).sqrt() / surface.area().sqrt()
}

/// Two complementary triangle sets and the mod-2 cycle separating them.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub domain1: Vec<usize>,
    pub domain2: Vec<usize>,
    pub delta: OneCycle,
    /// `|δ| / min(area(D₁), area(D₂))`.
    pub ratio: f64,
}

impl Decomposition {
    /// `membership[t]` is true for triangles of the first domain.
    pub fn from_membership(surface: &SimplicialSurface, membership: &[bool]) -> Self {
        let (mut domain1, mut domain2) = (Vec::new(), Vec::new());
        for (t, &inside) in membership.iter().enumerate() {
            if inside {
                domain1.push(t);
            } else {
                domain2.push(t);
            }
        }
        let delta = OneCycle::from_coefficients(
            Ring::Mod2,
            (0..surface.edge_count()).filter_map(|e| {
                let [a, b] = surface.edge_triangles(e);
                (membership[a] != membership[b]).then_some((e, 1))
            }),
        );
        let side = domain1.len().min(domain2.len());
        let ratio = if side == 0 {
            f64::INFINITY
        } else {
            delta.mass() as f64 / area_of(side)
        };
        Self {
            domain1,
            domain2,
            delta,
            ratio,
        }
    }

    pub fn membership(&self, triangle_count: usize) -> Vec<bool> {
        let mut m = vec![false; triangle_count];
        for &t in &self.domain1 {
            m[t] = true;
        }
        m
    }

    pub fn delta_length(&self) -> u64 {
        self.delta.mass()
    }

    pub fn area1(&self) -> f64 {
        area_of(self.domain1.len())
    }

    pub fn area2(&self) -> f64 {
        area_of(self.domain2.len())
    }

    pub fn min_side(&self) -> usize {
        self.domain1.len().min(self.domain2.len())
    }

    pub fn min_area(&self) -> f64 {
        area_of(self.min_side())
    }

    pub fn domain(&self, side: Side) -> &[usize] {
        match side {
            Side::First => &self.domain1,
            Side::Second => &self.domain2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

/// Sparse `M^{-1/2} L M^{-1/2}` together with `√M`.
#[derive(Debug, Clone)]
pub struct NormalizedLaplacian {
    diagonal: Vec<f64>,
    neighbors: Vec<Vec<(usize, f64)>>,
    sqrt_mass: Vec<f64>,
}

/// Lumped vertex mass: a third of each incident triangle.
pub fn vertex_mass(surface: &SimplicialSurface, v: usize) -> f64 {
    surface.degree(v) as f64 * area_of(1) / 3.0
}

impl NormalizedLaplacian {
    pub fn new(surface: &SimplicialSurface) -> Self {
        let n = surface.vertex_count();
        let sqrt_mass: Vec<f64> = (0..n).map(|v| vertex_mass(surface, v).sqrt()).collect();
        let mut diagonal = vec![0.0; n];
        let mut neighbors = vec![Vec::new(); n];
        for &[u, v] in surface.edges() {
            diagonal[u] += EDGE_WEIGHT;
            diagonal[v] += EDGE_WEIGHT;
            let w = -EDGE_WEIGHT / (sqrt_mass[u] * sqrt_mass[v]);
            neighbors[u].push((v, w));
            neighbors[v].push((u, w));
        }
        for (d, m) in diagonal.iter_mut().zip(&sqrt_mass) {
            *d /= m * m;
        }
        Self {
            diagonal,
            neighbors,
            sqrt_mass,
        }
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..x.len() {
            let mut acc = self.diagonal[i] * x[i];
            for &(j, w) in &self.neighbors[i] {
                acc += w * x[j];
            }
            out[i] = acc;
        }
    }

    /// Unit vector spanning the kernel (`√M·1`, normalized).
    pub fn kernel(&self) -> Vec<f64> {
        let mut k = self.sqrt_mass.clone();
        normalize(&mut k);
        k
    }

    pub fn sqrt_mass(&self) -> &[f64] {
        &self.sqrt_mass
    }
}

/// An eigenpair of `L v = λ M v`, with `v` normalized so that `vᵀ M v = 1`.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    /// `‖L v − λ M v‖ / ‖v‖` at exit.
    pub residual: f64,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: &mut [f64]) -> f64 {
    let n = norm(a);
    if n > 0.0 {
        a.iter_mut().for_each(|x| *x /= n);
    }
    n
}

fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) {
    // Two passes of classical Gram-Schmidt.
    for _ in 0..2 {
        for b in basis {
            let c = dot(x, b);
            x.iter_mut().zip(b).for_each(|(xi, bi)| *xi -= c * bi);
        }
    }
}

/// Cyclic Jacobi eigensolver for a small dense symmetric matrix.
/// Returns eigenvalues ascending and the matching column eigenvectors.
#[cfg(test)]
pub(crate) fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>() + off;
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k][i]).collect())
        .collect();
    (values, vectors)
}

/// Implicit QL iteration for a symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off` (`off.len() + 1 == diag.len()`, or equal
/// when a trailing coupling is ignored). Same output layout as [`jacobi_eigen`].
pub(crate) fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        e[i] = off[i];
    }
    // z[row][col], columns are eigenvectors.
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 200, "tridiagonal QL did not converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = order.iter().map(|&i| (0..n).map(|k| z[k][i]).collect()).collect();
    (values, vectors)
}

const KRYLOV_DIM: usize = 120;

/// Smallest eigenpair of the operator restricted to the complement of its kernel.
fn lanczos_smallest(op: &NormalizedLaplacian, opts: &SpectralOptions) -> Result<(f64, Vec<f64>, usize), SpectralError> {
    let n = op.dim();
    let kernel = op.kernel();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    orthogonalize(&mut start, std::slice::from_ref(&kernel));
    normalize(&mut start);

    let max_dim = KRYLOV_DIM.min(n - 1).max(1);
    // The generalized residual is at most max(M) times the symmetric one.
    let max_mass = op.sqrt_mass().iter().fold(1.0f64, |m, s| m.max(s * s));
    let target = 0.5 * opts.tolerance / max_mass;
    let mut applications = 0usize;
    let mut w = vec![0.0; n];
    loop {
        let mut basis: Vec<Vec<f64>> = vec![kernel.clone()];
        let mut alphas = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut q = start.clone();
        for _ in 0..max_dim {
            op.apply(&q, &mut w);
            applications += 1;
            let alpha = dot(&w, &q);
            basis.push(q.clone());
            orthogonalize(&mut w, &basis);
            alphas.push(alpha);
            let beta = norm(&w);
            if alphas.len() == max_dim || beta <= 1e-12 * alpha.abs().max(1.0) {
                break;
            }
            betas.push(beta);
            q = w.iter().map(|x| x / beta).collect();
        }
        let (values, vectors) = tridiagonal_eigen(&alphas, &betas);
        let theta = values[0];
        let mut y = vec![0.0; n];
        for (coef, b) in vectors[0].iter().zip(&basis[1..]) {
            y.iter_mut().zip(b).for_each(|(yi, bi)| *yi += coef * bi);
        }
        orthogonalize(&mut y, std::slice::from_ref(&kernel));
        normalize(&mut y);
        op.apply(&y, &mut w);
        applications += 1;
        let theta = {
            let rq = dot(&y, &w);
            if rq.is_finite() {
                rq
            } else {
                theta
            }
        };
        let residual = w
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - theta * b).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= target {
            return Ok((theta, y, applications));
        }
        if applications >= opts.max_iterations {
            return Err(SpectralError::ConvergenceFailure {
                iterations: applications,
                tolerance: opts.tolerance,
                residual,
            });
        }
        start = y;
    }
}

/// First nonzero eigenpair of the lumped-mass cotangent Laplacian.
pub fn fiedler_pair(surface: &SimplicialSurface, opts: &SpectralOptions) -> Result<Eigenpair, SpectralError> {
    let op = NormalizedLaplacian::new(surface);
    let (value, y, iterations) = lanczos_smallest(&op, opts)?;
    let vector: Vec<f64> = y.iter().zip(op.sqrt_mass()).map(|(yi, s)| yi / s).collect();
    let residual = generalized_residual(surface, value, &vector);
    if residual > opts.tolerance {
        return Err(SpectralError::ConvergenceFailure {
            iterations,
            tolerance: opts.tolerance,
            residual,
        });
    }
    Ok(Eigenpair {
        value,
        vector,
        residual,
        iterations,
    })
}

/// `‖L v − λ M v‖ / ‖v‖` with the unnormalized stiffness and mass.
pub fn generalized_residual(surface: &SimplicialSurface, value: f64, v: &[f64]) -> f64 {
    let mut r: Vec<f64> = (0..v.len())
        .map(|i| -value * vertex_mass(surface, i) * v[i])
        .collect();
    for &[a, b] in surface.edges() {
        let d = EDGE_WEIGHT * (v[a] - v[b]);
        r[a] += d;
        r[b] -= d;
    }
    norm(&r) / norm(v)
}

pub fn lambda1(surface: &SimplicialSurface, opts: &SpectralOptions) -> Result<f64, SpectralError> {
    fiedler_pair(surface, opts).map(|p| p.value)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CutMode {
    /// Minimum isoperimetric ratio over all threshold splits.
    #[default]
    Cheeger,
    /// Shortest boundary among splits whose sides differ by at most one triangle.
    Balanced,
}

/// Threshold sweep over triangles ordered by their mean vertex value.
/// Ties are broken by triangle index.
pub fn sweep_cut(surface: &SimplicialSurface, vertex_values: &[f64], mode: CutMode) -> Decomposition {
    let n = surface.triangle_count();
    let score = |t: usize| surface.triangle(t).iter().map(|&v| vertex_values[v]).sum::<f64>() / 3.0;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| score(a).total_cmp(&score(b)).then(a.cmp(&b)));

    let mut inside = vec![false; n];
    let mut boundary: i64 = 0;
    // (boundary, side, prefix length)
    let mut best: Option<(i64, usize, usize)> = None;
    for (k, &t) in order.iter().enumerate().take(n - 1) {
        for s in surface.triangle_neighbors(t) {
            boundary += if inside[s] { -1 } else { 1 };
        }
        inside[t] = true;
        let size = k + 1;
        let side = size.min(n - size);
        let better = match (mode, best) {
            (_, None) => match mode {
                CutMode::Cheeger => true,
                CutMode::Balanced => (n - size).abs_diff(size) <= 1,
            },
            (CutMode::Cheeger, Some((b, s, _))) => (boundary as i128) * (s as i128) < (b as i128) * (side as i128),
            (CutMode::Balanced, Some((b, _, _))) => (n - size).abs_diff(size) <= 1 && boundary < b,
        };
        if better {
            best = Some((boundary, side, size));
        }
    }
    let (_, _, prefix) = best.expect("a closed surface has at least four triangles");
    let mut membership = vec![false; n];
    for &t in &order[..prefix] {
        membership[t] = true;
    }
    Decomposition::from_membership(surface, &membership)
}

pub fn fiedler_cut(
    surface: &SimplicialSurface,
    mode: CutMode,
    opts: &SpectralOptions,
) -> Result<Decomposition, SpectralError> {
    let pair = fiedler_pair(surface, opts)?;
    Ok(sweep_cut(surface, &pair.vector, mode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::oracle::exact_cheeger;

    #[test]
    fn constants() {
        assert!((EDGE_WEIGHT - 1.0 / 3f64.sqrt()).abs() < 1e-16);
        assert!((vertex_mass(&corpus::icosahedron(), 0) - 5.0 * 3f64.sqrt() / 12.0).abs() < 1e-15);
    }

    #[test]
    fn operator_is_symmetric_with_constant_kernel() {
        let s = corpus::csaszar_torus();
        let op = NormalizedLaplacian::new(&s);
        let n = op.dim();
        let mut col = vec![0.0; n];
        let mut dense = vec![vec![0.0; n]; n];
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            op.apply(&e, &mut col);
            for i in 0..n {
                dense[i][j] = col[i];
            }
        }
        for i in 0..n {
            for j in 0..n {
                assert!((dense[i][j] - dense[j][i]).abs() < 1e-14);
            }
        }
        op.apply(&op.kernel(), &mut col);
        assert!(norm(&col) < 1e-14);
        let (values, _) = jacobi_eigen(dense);
        assert!(values[0].abs() < 1e-12);
        assert!(values[1] > 1e-6, "kernel is one-dimensional");
    }

    #[test]
    fn jacobi_diagonalizes() {
        let a = vec![vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 1.0], vec![0.0, 1.0, 2.0]];
        let (values, vectors) = jacobi_eigen(a.clone());
        let expect = [2.0 - 2f64.sqrt(), 2.0, 2.0 + 2f64.sqrt()];
        for (v, e) in values.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12);
        }
        for (lambda, x) in values.iter().zip(&vectors) {
            for i in 0..3 {
                let ax: f64 = (0..3).map(|j| a[i][j] * x[j]).sum();
                assert!((ax - lambda * x[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tridiagonal_ql_matches_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 2, 5, 40] {
            let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let off: Vec<f64> = (0..n.saturating_sub(1)).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut dense = vec![vec![0.0; n]; n];
            for i in 0..n {
                dense[i][i] = diag[i];
                if i + 1 < n {
                    dense[i][i + 1] = off[i];
                    dense[i + 1][i] = off[i];
                }
            }
            let (ql, vectors) = tridiagonal_eigen(&diag, &off);
            let (jac, _) = jacobi_eigen(dense.clone());
            for (a, b) in ql.iter().zip(&jac) {
                assert!((a - b).abs() < 1e-10);
            }
            for (lambda, x) in ql.iter().zip(&vectors) {
                for i in 0..n {
                    let ax: f64 = (0..n).map(|j| dense[i][j] * x[j]).sum();
                    assert!((ax - lambda * x[i]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn fiedler_residual_within_tolerance() {
        for s in [corpus::icosahedron(), corpus::genus_two(), corpus::subdivided_icosahedron(2)] {
            let p = fiedler_pair(&s, &SpectralOptions::default()).unwrap();
            assert!(p.residual <= 1e-8);
            assert!(p.value > 0.0);
        }
    }

    #[test]
    fn li_yau_on_icosahedron() {
        let s = corpus::icosahedron();
        let l = lambda1(&s, &SpectralOptions::default()).unwrap();
        assert!(l * s.area() <= 24.0 * std::f64::consts::PI);
    }

    #[test]
    fn tetrahedron_cheeger_cut_is_two_two() {
        let s = corpus::tetrahedron();
        let d = fiedler_cut(&s, CutMode::Cheeger, &SpectralOptions::default()).unwrap();
        assert_eq!(d.domain1.len(), 2);
        assert_eq!(d.delta_length(), 4);
        assert!((d.ratio - 8.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cut_ratio_is_feasible() {
        for (name, s) in corpus::all().into_iter().take(7) {
            let d = fiedler_cut(&s, CutMode::Cheeger, &SpectralOptions::default()).unwrap();
            let h = exact_cheeger(&s).unwrap();
            assert!(d.ratio >= h.value - 1e-12, "{name}");
            assert!(d.delta.is_cycle(&s));
            assert!(!d.domain1.is_empty() && !d.domain2.is_empty());
        }
    }

    #[test]
    fn icosahedron_balanced_cut_is_optimal() {
        let s = corpus::icosahedron();
        let d = fiedler_cut(&s, CutMode::Balanced, &SpectralOptions::default()).unwrap();
        assert_eq!((d.domain1.len(), d.domain2.len()), (10, 10));
        // Exhaustive minimum over the C(20,10) balanced colorings.
        let mut best = u64::MAX;
        for set in 0u64..1 << 20 {
            if set.count_ones() != 10 {
                continue;
            }
            let cut = (0..s.edge_count())
                .filter(|&e| {
                    let [a, b] = s.edge_triangles(e);
                    (set >> a & 1) != (set >> b & 1)
                })
                .count() as u64;
            best = best.min(cut);
        }
        assert_eq!(d.delta_length(), best);
    }

    #[test]
    fn cheeger_bound_values() {
        let ico = corpus::icosahedron();
        let b = cheeger_bound(&ico, 0.0, CheegerConstant::NinetySix);
        assert!((b - (96.0 * std::f64::consts::PI).sqrt() / (5.0 * 3f64.sqrt()).sqrt()).abs() < 1e-12);
        assert!((b - 5.902).abs() < 1e-3);
        let tet = corpus::tetrahedron();
        assert!((cheeger_bound(&tet, 0.0, CheegerConstant::NinetySix) - 13.20).abs() < 5e-3);
        let doubled = cheeger_bound(&tet, 1.0, CheegerConstant::NinetySix);
        assert!((doubled / cheeger_bound(&tet, 0.0, CheegerConstant::NinetySix) - 2f64.sqrt()).abs() < 1e-12);
        // 32 only applies to orientable surfaces.
        let rp2 = corpus::projective_plane();
        assert_eq!(
            cheeger_bound(&rp2, 1.0, CheegerConstant::ThirtyTwo),
            cheeger_bound(&rp2, 1.0, CheegerConstant::NinetySix)
        );
    }
}
