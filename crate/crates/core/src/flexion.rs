//! Edge-length constraint systems in `Λ^n`, infinitesimal flex analysis and
//! continuation of one-parameter flexions.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::minkowski_dot;
use crate::polyhedra::{from_klein, generalized_volume, AngleTracker, Configuration, PseudoManifold};

/// A pseudo-manifold with prescribed hyperbolic edge lengths.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    complex: PseudoManifold,
    edges: Vec<(usize, usize, f64)>,
}

impl ConstraintSystem {
    /// `lengths` must give one positive length per edge of the complex.
    pub fn new(complex: PseudoManifold, lengths: Vec<(usize, usize, f64)>) -> Result<Self> {
        let wanted = complex.edges();
        let mut edges = Vec::with_capacity(wanted.len());
        for &(u, v) in &wanted {
            let hit = lengths
                .iter()
                .find(|&&(a, b, _)| (a.min(b), a.max(b)) == (u, v))
                .ok_or_else(|| {
                    Error::Argument(format!(
                        "missing length for edge {}-{}",
                        complex.labels()[u],
                        complex.labels()[v]
                    ))
                })?;
            if !(hit.2 > 0.0 && hit.2.is_finite()) {
                return Err(Error::Argument(format!("edge length {} is not positive", hit.2)));
            }
            edges.push((u, v, hit.2));
        }
        Ok(ConstraintSystem { complex, edges })
    }

    /// Lengths read off a configuration.
    pub fn from_configuration(complex: PseudoManifold, p: &Configuration) -> Result<Self> {
        let lengths = complex
            .edges()
            .into_iter()
            .map(|(u, v)| (u, v, minkowski_dot(&p.coords[u], &p.coords[v]).max(1.0).acosh()))
            .collect();
        Self::new(complex, lengths)
    }

    pub fn complex(&self) -> &PseudoManifold {
        &self.complex
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    fn dim(&self) -> usize {
        self.complex.n() + 1
    }

    pub fn unknowns(&self) -> usize {
        self.complex.vertex_count() * self.dim()
    }

    /// Norm residuals `<x,x> - 1` followed by edge residuals `<x_u,x_v> - cosh ℓ`.
    pub fn residuals(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let pt = |v: usize| &x[v * d..(v + 1) * d];
        let mut r: Vec<f64> = (0..self.complex.vertex_count()).map(|v| minkowski_dot(pt(v), pt(v)) - 1.0).collect();
        r.extend(self.edges.iter().map(|&(u, v, l)| minkowski_dot(pt(u), pt(v)) - l.cosh()));
        r
    }

    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let d = self.dim();
        let m = self.complex.vertex_count();
        let eta = |j: usize| if j == 0 { 1.0 } else { -1.0 };
        let mut jac = DMatrix::zeros(m + self.edges.len(), m * d);
        for v in 0..m {
            for j in 0..d {
                jac[(v, v * d + j)] = 2.0 * eta(j) * x[v * d + j];
            }
        }
        for (row, &(u, v, _)) in self.edges.iter().enumerate() {
            for j in 0..d {
                jac[(m + row, u * d + j)] = eta(j) * x[v * d + j];
                jac[(m + row, v * d + j)] = eta(j) * x[u * d + j];
            }
        }
        jac
    }

    /// Largest absolute constraint residual.
    pub fn max_residual(&self, p: &Configuration) -> f64 {
        self.residuals(&p.flat()).iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, r| m.max(r.abs()))
}

/// Minimum-norm Gauss-Newton iteration on `F(x) = 0`.
fn gauss_newton(
    x0: &[f64],
    tol: f64,
    mut f: impl FnMut(&[f64]) -> Vec<f64>,
    mut jac: impl FnMut(&[f64]) -> DMatrix<f64>,
) -> Result<Vec<f64>> {
    let mut x = x0.to_vec();
    let mut history = Vec::new();
    let mut best = f64::INFINITY;
    let mut stall = 0;
    for _ in 0..60 {
        let r = f(&x);
        let res = max_abs(&r);
        history.push(res);
        if !res.is_finite() {
            break;
        }
        if res <= tol {
            return Ok(x);
        }
        if res < 0.5 * best {
            stall = 0;
        } else {
            stall += 1;
            if stall >= 6 {
                break;
            }
        }
        best = best.min(res);
        let j = jac(&x);
        let svd = j.svd(true, true);
        let cutoff = svd.singular_values.max() * 1e-12;
        let step = svd
            .solve(&DVector::from_vec(r), cutoff)
            .map_err(|e| Error::Internal(format!("least-squares solve failed: {e}")))?;
        for (xi, si) in x.iter_mut().zip(step.iter()) {
            *xi -= si;
        }
    }
    let tail: Vec<String> = history.iter().rev().take(6).rev().map(|r| format!("{r:.3e}")).collect();
    Err(Error::Numeric {
        message: format!("Gauss-Newton did not converge; residual history [{}]", tail.join(", ")),
        best_estimate: Some(best),
    })
}

/// Projects a configuration onto the constraint variety.
pub fn solve_configuration(system: &ConstraintSystem, initial: &Configuration, tol: f64) -> Result<Configuration> {
    let d = system.dim();
    if initial.len() != system.complex.vertex_count() || initial.coords.iter().any(|x| x.len() != d) {
        return Err(Error::Argument("configuration does not match the complex".into()));
    }
    let x = gauss_newton(&initial.flat(), tol, |x| system.residuals(x), |x| system.jacobian(x))?;
    let p = Configuration::from_flat(&x, d);
    if p.coords.iter().any(|v| v[0] <= 0.0) {
        return Err(Error::numeric("solution left the upper sheet"));
    }
    Ok(p)
}

/// Generators of the Lorentz algebra: rotations then boosts.
pub fn lorentz_generators(dim: usize) -> Vec<DMatrix<f64>> {
    let mut out = Vec::new();
    for i in 1..dim {
        for j in i + 1..dim {
            let mut a = DMatrix::zeros(dim, dim);
            a[(i, j)] = -1.0;
            a[(j, i)] = 1.0;
            out.push(a);
        }
    }
    for i in 1..dim {
        let mut a = DMatrix::zeros(dim, dim);
        a[(0, i)] = 1.0;
        a[(i, 0)] = 1.0;
        out.push(a);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlexReport {
    pub kernel_dim: usize,
    pub trivial_dim: usize,
    pub flex_dim: usize,
    pub singular_values: Vec<f64>,
    pub rank_tolerance: f64,
}

/// Singular values below `1e-7` times the largest count as zero.
pub fn default_rank_tol(jac: &DMatrix<f64>) -> f64 {
    1e-7 * jac.clone().singular_values().max()
}

fn kernel_dim(jac: &DMatrix<f64>, tol: f64) -> (usize, Vec<f64>) {
    let svd = jac.clone().svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    let rank = s.iter().filter(|&&v| v > tol).count();
    (jac.ncols() - rank, s)
}

/// Dimension count of the infinitesimal motions at `p`.
pub fn flex_analysis(system: &ConstraintSystem, p: &Configuration, rank_tol: Option<f64>) -> Result<FlexReport> {
    let x = p.flat();
    let jac = system.jacobian(&x);
    let tol = rank_tol.unwrap_or_else(|| default_rank_tol(&jac));
    let (kernel, singular_values) = kernel_dim(&jac, tol);
    let d = system.dim();
    let gens = lorentz_generators(d);
    let mut motions = DMatrix::zeros(x.len(), gens.len());
    for (g, a) in gens.iter().enumerate() {
        for v in 0..system.complex.vertex_count() {
            let xv = DVector::from_column_slice(&x[v * d..(v + 1) * d]);
            let t = a * xv;
            for j in 0..d {
                motions[(v * d + j, g)] = t[j];
            }
        }
        let col = motions.column(g).clone_owned();
        let image = &jac * &col;
        if image.norm() > 1e-10 * col.norm().max(1.0) * jac.norm().max(1.0) {
            return Err(Error::Internal("an isometry generator is not an infinitesimal motion".into()));
        }
    }
    let trivial = motions.rank(1e-8 * motions.norm().max(1.0));
    if trivial > kernel {
        return Err(Error::Internal(format!(
            "kernel dimension {kernel} is smaller than the trivial motions {trivial}"
        )));
    }
    Ok(FlexReport {
        kernel_dim: kernel,
        trivial_dim: trivial,
        flex_dim: kernel - trivial,
        singular_values,
        rank_tolerance: tol,
    })
}

/// A proper orthochronous isometry taking the first facet's vertices to the
/// standard flag: vertex `k` of the facet has zero coordinates beyond `k`.
/// Returned row-major.
pub fn gauge_isometry(points: &[&[f64]]) -> Result<Vec<Vec<f64>>> {
    let d = points[0].len();
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(d);
    let norm_sq = |v: &[f64]| minkowski_dot(v, v);
    let orthogonalize = |mut v: Vec<f64>, frame: &[Vec<f64>]| {
        for e in frame {
            let c = minkowski_dot(&v, e) / norm_sq(e);
            for (vi, ei) in v.iter_mut().zip(e) {
                *vi -= c * ei;
            }
        }
        v
    };
    for p in points.iter().take(d) {
        let v = orthogonalize(p.to_vec(), &frame);
        let s = norm_sq(&v);
        if frame.is_empty() && s <= 0.0 {
            return Err(Error::Domain("first vertex is not timelike".into()));
        }
        if !frame.is_empty() && s >= -1e-14 {
            return Err(Error::Domain("first facet is degenerate".into()));
        }
        let scale = s.abs().sqrt();
        frame.push(v.into_iter().map(|x| x / scale).collect());
    }
    let mut basis = 0;
    while frame.len() < d {
        if basis >= d {
            return Err(Error::Internal("could not complete the Lorentz frame".into()));
        }
        let mut e = vec![0.0; d];
        e[basis] = 1.0;
        basis += 1;
        let v = orthogonalize(orthogonalize(e, &frame), &frame);
        let s = norm_sq(&v);
        if s < -1e-6 {
            let scale = (-s).sqrt();
            frame.push(v.into_iter().map(|x| x / scale).collect());
        }
    }
    // new coordinates y_j = η_jj <x, e_j>
    let mut m: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            let sign = if j == 0 { 1.0 } else { -1.0 };
            (0..d)
                .map(|i| sign * frame[j][i] * if i == 0 { 1.0 } else { -1.0 })
                .collect()
        })
        .collect();
    let det = DMatrix::from_fn(d, d, |i, j| m[i][j]).determinant();
    if det < 0.0 {
        // the completion vector is free up to sign; flip the last one
        if points.len() >= d {
            return Err(Error::Domain("facet vertices fix an orientation-reversing frame".into()));
        }
        for x in m[d - 1].iter_mut() {
            *x = -*x;
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlexionStep {
    pub t: f64,
    pub configuration: Vec<Vec<f64>>,
    pub max_residual: f64,
    pub volume: f64,
    pub total_mean_curvature: f64,
    pub flex_dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlexionTrace {
    pub steps: Vec<FlexionStep>,
    pub apex: Vec<f64>,
    pub truncated: Option<String>,
    /// Largest change of any (unwrapped) dihedral angle from the start.
    pub max_angle_change: f64,
}

impl FlexionTrace {
    pub fn configurations(&self) -> Vec<Configuration> {
        self.steps
            .iter()
            .map(|s| Configuration { coords: s.configuration.clone() })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct FlexOptions {
    pub steps: usize,
    pub step_length: f64,
    pub tol: f64,
    pub volume_tol: f64,
    pub apex: Option<Vec<f64>>,
    pub max_halvings: usize,
}

impl Default for FlexOptions {
    fn default() -> Self {
        FlexOptions {
            steps: 200,
            step_length: 1e-2,
            tol: 1e-12,
            volume_tol: 1e-12,
            apex: None,
            max_halvings: 12,
        }
    }
}

struct Gauge {
    fixed: Vec<usize>,
}

impl Gauge {
    fn new(system: &ConstraintSystem) -> Gauge {
        let d = system.dim();
        let first = &system.complex.facets()[0];
        let mut fixed = Vec::new();
        for (k, &v) in first.iter().enumerate() {
            for j in k + 1..d {
                fixed.push(v * d + j);
            }
        }
        Gauge { fixed }
    }

    fn residuals(&self, system: &ConstraintSystem, x: &[f64]) -> Vec<f64> {
        let mut r = system.residuals(x);
        r.extend(self.fixed.iter().map(|&i| x[i]));
        r
    }

    fn jacobian(&self, system: &ConstraintSystem, x: &[f64]) -> DMatrix<f64> {
        let j = system.jacobian(x);
        let rows = j.nrows();
        let mut out = j.resize_vertically(rows + self.fixed.len(), 0.0);
        for (k, &i) in self.fixed.iter().enumerate() {
            out[(rows + k, i)] = 1.0;
        }
        out
    }
}

/// Unit kernel vectors of the gauge-fixed Jacobian.
fn tangent_space(jac: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    // pad to square so the SVD exposes the whole right null space
    let cols = jac.ncols();
    let square = if jac.nrows() < cols {
        jac.clone().resize_vertically(cols, 0.0)
    } else {
        jac.clone()
    };
    let svd = square.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= tol)
        .map(|i| vt.row(i).transpose())
        .collect()
}

/// Follows a one-parameter flexion from `start`, which must satisfy the system.
pub fn trace_flexion(system: &ConstraintSystem, start: &Configuration, opts: &FlexOptions) -> Result<FlexionTrace> {
    let d = system.dim();
    let complex = &system.complex;
    if system.max_residual(start) > 1e-8 {
        return Err(Error::Argument(format!(
            "start configuration violates the constraints (residual {:e})",
            system.max_residual(start)
        )));
    }
    let first: Vec<&[f64]> = complex.facets()[0].iter().map(|&v| start.coords[v].as_slice()).collect();
    let iso = gauge_isometry(&first)?;
    let p0 = start.transformed(&iso);
    let gauge = Gauge::new(system);
    let x0 = gauss_newton(&p0.flat(), opts.tol, |x| gauge.residuals(system, x), |x| gauge.jacobian(system, x))?;
    let apex = match &opts.apex {
        Some(a) => a.clone(),
        None => default_apex(d),
    };
    let mut tracker = AngleTracker::default();
    let record = |x: &[f64], t: f64, tracker: &mut AngleTracker, flex_dim: usize| -> Result<FlexionStep> {
        let p = Configuration::from_flat(x, d);
        Ok(FlexionStep {
            t,
            max_residual: system.max_residual(&p),
            volume: generalized_volume(complex, &p, &apex, opts.volume_tol)?,
            total_mean_curvature: tracker.total_mean_curvature(complex, &p)?,
            configuration: p.coords,
            flex_dim,
        })
    };
    let rank_tol = default_rank_tol;
    let j0 = gauge.jacobian(system, &x0);
    let kernel = tangent_space(&j0, rank_tol(&j0));
    if kernel.is_empty() {
        return Err(Error::Domain("configuration is rigid: no flex direction".into()));
    }
    let mut tangent = kernel[0].clone();
    let mut steps = vec![record(&x0, 0.0, &mut tracker, kernel.len())?];
    let start_angles = AngleTracker::default().angles(complex, &Configuration::from_flat(&x0, d))?;
    let mut max_angle_change: f64 = 0.0;
    let mut x = DVector::from_vec(x0);
    let mut t = 0.0;
    let mut h = opts.step_length;
    let mut truncated = None;
    'outer: while steps.len() <= opts.steps {
        let mut halvings = 0;
        loop {
            let pred = &x + &tangent * h;
            let corrected = gauss_newton(
                pred.as_slice(),
                opts.tol,
                |y| gauge.residuals(system, y),
                |y| gauge.jacobian(system, y),
            );
            let accept = match corrected {
                Ok(y) => {
                    let jy = gauge.jacobian(system, &y);
                    let ker = tangent_space(&jy, rank_tol(&jy));
                    if ker.is_empty() {
                        truncated = Some(format!("flex dimension dropped to zero at t = {t:.6}"));
                        break 'outer;
                    }
                    // continue the kernel direction closest to the current tangent
                    let mut next = DVector::zeros(tangent.len());
                    for k in &ker {
                        next += k * k.dot(&tangent);
                    }
                    if next.norm() < 1e-12 {
                        None
                    } else {
                        let next = next.normalize();
                        let cos = next.dot(&tangent).clamp(-1.0, 1.0);
                        if cos.acos() < 30f64.to_radians() {
                            Some((DVector::from_vec(y), next, ker.len()))
                        } else {
                            None
                        }
                    }
                }
                Err(_) => None,
            };
            match accept {
                Some((y, next, dim)) => {
                    t += h;
                    x = y;
                    tangent = next;
                    let step = record(x.as_slice(), t, &mut tracker, dim)?;
                    for (r, a) in tracker_angles(&mut tracker, complex, &step)? {
                        max_angle_change = max_angle_change.max((a - start_angles[&r]).abs());
                    }
                    steps.push(step);
                    h = (h * 1.5).min(opts.step_length);
                    break;
                }
                None => {
                    halvings += 1;
                    h *= 0.5;
                    if halvings > opts.max_halvings {
                        truncated = Some(format!(
                            "step control failed at t = {t:.6}: no acceptable step down to h = {h:.3e}"
                        ));
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(FlexionTrace {
        steps,
        apex,
        truncated,
        max_angle_change,
    })
}

fn tracker_angles(
    tracker: &mut AngleTracker,
    complex: &PseudoManifold,
    step: &FlexionStep,
) -> Result<std::collections::BTreeMap<Vec<usize>, f64>> {
    // the tracker already holds this step's angles; re-evaluating is idempotent
    tracker.angles(complex, &Configuration { coords: step.configuration.clone() })
}

fn default_apex(d: usize) -> Vec<f64> {
    let u: Vec<f64> = (1..d).map(|i| 0.037 * i as f64 - 0.011 * (i * i) as f64).collect();
    from_klein(&u)
}

/// Reflection through the geodesic fixed by the last coordinate axis: the
/// half-turn `(x0, x1, x2, x3) -> (x0, -x1, -x2, x3)`.
pub fn half_turn(x: &[f64]) -> Vec<f64> {
    vec![x[0], -x[1], -x[2], x[3]]
}

/// Solves the system with the extra linear constraints `x_{b} = H x_{a}` for
/// each `(a, b)` in `pairs`, where `H` is the half-turn.
pub fn solve_symmetric(
    system: &ConstraintSystem,
    initial: &Configuration,
    pairs: &[(usize, usize)],
    tol: f64,
) -> Result<Configuration> {
    let d = system.dim();
    if d != 4 {
        return Err(Error::Argument("the half-turn ansatz is implemented for n = 3".into()));
    }
    let h = [1.0, -1.0, -1.0, 1.0];
    let res = |x: &[f64]| {
        let mut r = system.residuals(x);
        for &(a, b) in pairs {
            r.extend((0..d).map(|j| x[b * d + j] - h[j] * x[a * d + j]));
        }
        r
    };
    let jac = |x: &[f64]| {
        let j = system.jacobian(x);
        let rows = j.nrows();
        let mut out = j.resize_vertically(rows + pairs.len() * d, 0.0);
        for (k, &(a, b)) in pairs.iter().enumerate() {
            for i in 0..d {
                out[(rows + k * d + i, b * d + i)] = 1.0;
                out[(rows + k * d + i, a * d + i)] = -h[i];
            }
        }
        out
    };
    let x = gauss_newton(&initial.flat(), tol, res, jac)?;
    let p = Configuration::from_flat(&x, d);
    if p.coords.iter().any(|v| v[0] <= 0.0) {
        return Err(Error::numeric("solution left the upper sheet"));
    }
    Ok(p)
}

/// Vertex pairs `(i, i + 3)` swapped by the half-turn in [`PseudoManifold::octahedron`].
pub const BRICARD_PAIRS: [(usize, usize); 3] = [(0, 3), (1, 4), (2, 5)];

/// A line-symmetric (Bricard type) octahedron in `Λ^3` with the given edge
/// lengths, found from an initial guess under the half-turn symmetry.
pub fn bricard_seed(system: &ConstraintSystem, guess: &Configuration, tol: f64) -> Result<Configuration> {
    solve_symmetric(system, guess, &BRICARD_PAIRS, tol)
}

/// Exactly symmetric octahedron: vertices `0, 1, 2` given in the Klein model,
/// `3, 4, 5` their images under the half-turn.
pub fn bricard_octahedron(klein: [[f64; 3]; 3]) -> Result<(PseudoManifold, Configuration)> {
    let k = PseudoManifold::octahedron();
    let mut coords: Vec<Vec<f64>> = klein.iter().map(|u| from_klein(u)).collect();
    for i in 0..3 {
        coords.push(half_turn(&coords[i]));
    }
    Ok((k, Configuration::new(coords)?))
}

/// Klein-model seed vertices of the default octahedron.
pub const BRICARD_KLEIN: [[f64; 3]; 3] = [[0.32, 0.11, 0.21], [-0.13, 0.37, -0.17], [0.23, -0.28, -0.31]];

/// The default seed used by the CLI and the tests.
pub fn default_bricard() -> (PseudoManifold, Configuration) {
    bricard_octahedron(BRICARD_KLEIN).expect("seed vertices lie inside the Klein ball")
}

/// A hyperbolic quadrilateral: a generic flexible polygon in `Λ^2`.
pub fn quadrilateral() -> (PseudoManifold, Configuration) {
    let pts = [[0.4, 0.05], [0.02, 0.45], [-0.38, 0.0], [0.03, -0.41]];
    let coords = pts.iter().map(|u| from_klein(u)).collect();
    (PseudoManifold::polygon(4), Configuration { coords })
}
