//! Analytic continuation of simplex volume along paths of complex Gram matrices.
//!
//! The continued volume is carried together with every square root
//! `R_J = sqrt(eps^(|J|+1) D_J)` and every continued face volume `W_J`. Roots are
//! followed by continuity; face volumes of edges are continued logarithms;
//! higher face volumes are integrated from the complexified Schläfli
//! differential with an embedded Dormand–Prince pair.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::{ComplexGram, HypersurfaceId, IndexSet, RealGram, Space};
use crate::linalg::{Mat, Scalar};
use crate::simplex_volume;

type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

/// Polyline of complex Gram matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPath {
    pub waypoints: Vec<ComplexGram>,
    pub samples_per_segment: usize,
}

impl ComplexPath {
    pub fn new(waypoints: Vec<ComplexGram>, samples_per_segment: usize) -> Result<Self> {
        if waypoints.is_empty() {
            return Err(Error::Argument("a path needs at least one waypoint".into()));
        }
        if samples_per_segment < 2 {
            return Err(Error::Argument("samples_per_segment must be at least 2".into()));
        }
        let size = waypoints[0].size();
        if waypoints.iter().any(|w| w.size() != size) {
            return Err(Error::Argument("waypoints have different sizes".into()));
        }
        Ok(ComplexPath { waypoints, samples_per_segment })
    }

    pub fn size(&self) -> usize {
        self.waypoints[0].size()
    }

    pub fn start(&self) -> &ComplexGram {
        &self.waypoints[0]
    }

    pub fn end(&self) -> &ComplexGram {
        self.waypoints.last().expect("non-empty path")
    }

    pub fn is_closed(&self) -> bool {
        let (a, b) = (self.start(), self.end());
        a.direction_to(b).max_modulus() <= 1e-12 * (1.0 + a.norm())
    }

    pub fn reversed(&self) -> ComplexPath {
        let mut w = self.waypoints.clone();
        w.reverse();
        ComplexPath { waypoints: w, samples_per_segment: self.samples_per_segment }
    }

    /// `self` followed by `other`; `other` must start where `self` ends.
    pub fn then(&self, other: &ComplexPath) -> Result<ComplexPath> {
        if self.end().direction_to(other.start()).max_modulus() > 1e-12 * (1.0 + self.end().norm()) {
            return Err(Error::Argument("paths do not join".into()));
        }
        let mut w = self.waypoints.clone();
        w.extend(other.waypoints.iter().skip(1).cloned());
        Ok(ComplexPath {
            waypoints: w,
            samples_per_segment: self.samples_per_segment.max(other.samples_per_segment),
        })
    }

    /// Concatenation of loops based at the same point.
    pub fn word(loops: &[&ComplexPath]) -> Result<ComplexPath> {
        let (first, rest) = loops
            .split_first()
            .ok_or_else(|| Error::Argument("empty word".into()))?;
        rest.iter().try_fold((*first).clone(), |acc, l| acc.then(l))
    }

    /// Real path through real Gram matrices.
    pub fn from_real(waypoints: &[RealGram], samples_per_segment: usize) -> Result<Self> {
        Self::new(waypoints.iter().map(|w| w.to_complex()).collect(), samples_per_segment)
    }

    fn sample_points(&self) -> impl Iterator<Item = ComplexGram> + '_ {
        let s = self.samples_per_segment;
        let single = (self.waypoints.len() == 1).then(|| self.waypoints[0].clone());
        single.into_iter().chain(self.waypoints.windows(2).flat_map(move |p| {
            (0..=s).map(move |i| p[0].lerp(&p[1], i as f64 / s as f64))
        }))
    }
}

/// Smallest modulus of any hypersurface equation over the sample points.
pub fn path_clearance(path: &ComplexPath) -> f64 {
    let comps = HypersurfaceId::all(path.size());
    path.sample_points()
        .flat_map(|p| comps.iter().map(move |h| h.equation(&p).norm()).collect::<Vec<_>>())
        .fold(f64::INFINITY, f64::min)
}

/// Default clearance threshold for paths near the matrix `c`.
pub fn clearance_threshold(c: &ComplexGram) -> f64 {
    1e-6 * c.norm().max(1.0)
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

/// Winding number of the equation of `component` along the closed path.
pub fn linking_number(path: &ComplexPath, component: HypersurfaceId) -> Result<i64> {
    if !path.is_closed() {
        return Err(Error::Argument("linking numbers need a closed path".into()));
    }
    if component.set.max_index().is_some_and(|i| i >= path.size()) {
        return Err(Error::Argument(format!("{component} does not fit the path size")));
    }
    let thr = clearance_threshold(path.start());
    let f = |p: &ComplexGram| -> Result<C64> {
        let v = component.equation(p);
        if v.norm() < thr {
            return Err(Error::Domain(format!(
                "path passes within {:e} of {component}",
                v.norm()
            )));
        }
        Ok(v)
    };
    let mut total = 0.0;
    for pair in path.waypoints.windows(2) {
        let s = path.samples_per_segment.max(8);
        let mut prev_t = 0.0;
        let mut prev = f(&pair[0])?;
        for i in 1..=s {
            let t = i as f64 / s as f64;
            let cur = f(&pair[0].lerp(&pair[1], t))?;
            total += arg_change(&pair[0], &pair[1], &f, prev_t, prev, t, cur, 0)?;
            prev_t = t;
            prev = cur;
        }
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

#[allow(clippy::too_many_arguments)]
fn arg_change(
    a: &ComplexGram,
    b: &ComplexGram,
    f: &impl Fn(&ComplexGram) -> Result<C64>,
    t0: f64,
    v0: C64,
    t1: f64,
    v1: C64,
    depth: usize,
) -> Result<f64> {
    let d = wrap(v1.arg() - v0.arg());
    if d.abs() <= PI / 8.0 || depth > 40 {
        return Ok(d);
    }
    let tm = 0.5 * (t0 + t1);
    let vm = f(&a.lerp(b, tm))?;
    Ok(arg_change(a, b, f, t0, v0, tm, vm, depth + 1)? + arg_change(a, b, f, tm, vm, t1, v1, depth + 1)?)
}

/// Branch record of the continued volume at one point of a path.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuationState {
    space: Space,
    position: ComplexGram,
    /// `R_J` indexed by the bits of `J`; `1` for `|J| <= 1`.
    roots: Vec<C64>,
    /// Continued `V(C_J)` indexed by the bits of `J`; `1` for `|J| <= 1`.
    volumes: Vec<C64>,
}

impl ContinuationState {
    pub fn space(&self) -> Space {
        self.space
    }

    pub fn position(&self) -> &ComplexGram {
        &self.position
    }

    pub fn n(&self) -> usize {
        self.position.n()
    }

    /// The continued square root `R_J`.
    pub fn root(&self, set: IndexSet) -> C64 {
        self.roots[set.bits() as usize]
    }

    /// The continued volume of the face spanned by `set`.
    pub fn face_volume(&self, set: IndexSet) -> C64 {
        self.volumes[set.bits() as usize]
    }

    /// The continued volume of the whole simplex.
    pub fn volume(&self) -> C64 {
        self.face_volume(self.position.full_set())
    }

    /// Sets with `|J| >= 2`, in increasing bit order.
    pub fn tracked_sets(&self) -> Vec<IndexSet> {
        tracked(self.position.size())
    }

    /// `max_J |R_J^2 - eps^(|J|+1) D_J|`.
    pub fn branch_residual(&self) -> f64 {
        self.tracked_sets()
            .into_iter()
            .map(|j| {
                let r = self.root(j);
                (r * r - radicand(&self.position, j, self.space)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Value of the continued 1-form `d alpha_I` on `dir` at the current position,
    /// using the current branches of `R` and `R_I`.
    pub fn angle_form(&self, face: IndexSet, dir: &Mat<C64>) -> Result<C64> {
        let full = self.position.full_set();
        d_alpha(&self.position, full, face, dir, self.root(full), self.root(face), self.space)
    }

    /// Changes the branch record to the given values (used to build states after
    /// continuing, or to encode a chosen branch explicitly).
    pub fn with_root(mut self, set: IndexSet, value: C64) -> Self {
        self.roots[set.bits() as usize] = value;
        self
    }
}

fn tracked(size: usize) -> Vec<IndexSet> {
    (2..=size).flat_map(|k| IndexSet::subsets(size, k)).collect()
}

fn radicand(c: &ComplexGram, set: IndexSet, space: Space) -> C64 {
    c.principal_minor(set) * space.epsilon_pow(set.len() + 1)
}

fn edge_log_argument(c: C64, r: C64, space: Space) -> C64 {
    match space {
        Space::Hyperbolic => c + r,
        Space::Sphere => c + I * r,
    }
}

/// Edge volume `W` from the logarithm value `w`.
fn edge_volume_from_log(w: C64, space: Space) -> C64 {
    match space {
        Space::Hyperbolic => w,
        Space::Sphere => -I * w,
    }
}

fn edge_log_from_volume(v: C64, space: Space) -> C64 {
    match space {
        Space::Hyperbolic => v,
        Space::Sphere => I * v,
    }
}

/// Starts a continuation at a real simplex, with every root positive and every
/// face volume real.
pub fn init_state(c: &RealGram, space: Space, tol: f64) -> Result<ContinuationState> {
    let class = crate::gram::classify_domain(c, 0.0);
    if !class.matches(space) {
        return Err(Error::Domain(format!(
            "basepoint is {class:?}, not inside the {} chamber",
            space.name()
        )));
    }
    let size = c.size();
    let mut roots = vec![C64::new(1.0, 0.0); 1 << size];
    let mut volumes = vec![C64::new(1.0, 0.0); 1 << size];
    for j in tracked(size) {
        let r = c.principal_minor(j) * space.epsilon_pow(j.len() + 1);
        roots[j.bits() as usize] = C64::new(r.sqrt(), 0.0);
        let sub = c.principal(j);
        let v = if j.len() <= 3 {
            simplex_volume::volume_closed_low_dim(&sub, space)?.value
        } else {
            simplex_volume::volume(&sub, space, tol)?.value
        };
        volumes[j.bits() as usize] = C64::new(v, 0.0);
    }
    Ok(ContinuationState { space, position: c.to_complex(), roots, volumes })
}

/// Continued `d alpha` of the simplex `J` at its codimension-two face `K`.
fn d_alpha(
    c: &ComplexGram,
    j: IndexSet,
    k: IndexSet,
    dir: &Mat<C64>,
    r_j: C64,
    r_k: C64,
    space: Space,
) -> Result<C64> {
    let idx = j.to_vec();
    let sub = c.principal(j);
    let dsub = dir.select(&idx, &idx);
    let local = IndexSet::from_indices(k.iter().map(|x| idx.iter().position(|&y| y == x).expect("K in J")));
    let fm = sub.face_minors(local)?;
    let dm = sub.face_minor_derivatives(local, &dsub)?;
    let p = fm.first * fm.second;
    let dp = dm.first * fm.second + fm.first * dm.second;
    let m = j.len() - 1;
    Ok(C64::new(space.epsilon_pow(m - 1), 0.0) / (r_j * r_k) * (fm.mixed * dp / (p * 2.0) - dm.mixed))
}

/// Roots and edge volumes at a point, chosen by continuity from a reference.
#[derive(Clone)]
struct Branches {
    roots: Vec<C64>,
    edges: Vec<C64>,
    /// Largest relative move of any root or edge logarithm from the reference.
    drift: f64,
}

fn select_branches(
    c: &ComplexGram,
    space: Space,
    sets: &[IndexSet],
    ref_roots: &[C64],
    ref_vols: &[C64],
    threshold: f64,
) -> Result<Branches> {
    let mut roots = ref_roots.to_vec();
    let mut edges = ref_vols.to_vec();
    let mut drift: f64 = 0.0;
    for &j in sets {
        let b = j.bits() as usize;
        let rad = radicand(c, j, space);
        if rad.norm() < threshold {
            return Err(Error::Domain(format!(
                "path passes within {:e} of the hypersurface D_{j} = 0",
                rad.norm()
            )));
        }
        let s = rad.sqrt();
        let prev = ref_roots[b];
        let chosen = if (s - prev).norm() <= (s + prev).norm() { s } else { -s };
        let moved = (chosen - prev).norm();
        if 2.0 * s.norm() <= 10.0 * moved {
            // the two candidate roots are too close to tell apart
            drift = f64::INFINITY;
        }
        drift = drift.max(moved / prev.norm());
        roots[b] = chosen;
        if j.len() == 2 {
            let v = j.to_vec();
            let cjk = c.entry(v[0], v[1]);
            for sign in [1.0, -1.0] {
                if (C64::new(1.0, 0.0) + cjk * sign).norm() < threshold {
                    return Err(Error::Domain(format!("path passes within {threshold:e} of 1 ± c = 0")));
                }
            }
            let z = edge_log_argument(cjk, chosen, space);
            let w_prev = edge_log_from_volume(ref_vols[b], space);
            let base = z.ln();
            let k = ((w_prev.im - base.im) / (2.0 * PI)).round();
            let w = C64::new(base.re, base.im + 2.0 * PI * k);
            drift = drift.max((w.im - w_prev.im).abs() / 5.0);
            edges[b] = edge_volume_from_log(w, space);
        }
    }
    Ok(Branches { roots, edges, drift })
}

/// Dormand–Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Relative root movement allowed within one step.
const MAX_DRIFT: f64 = 0.1;
const MIN_STEP: f64 = 1e-11;

struct Stepper<'a> {
    space: Space,
    size: usize,
    sets: Vec<IndexSet>,
    /// Sets integrated as differential equations (`|J| >= 3`), smallest first.
    ode_sets: &'a [IndexSet],
    threshold: f64,
}

impl Stepper<'_> {
    /// `dW_J / dt` for every integrated set.
    fn rhs(&self, c: &ComplexGram, dir: &Mat<C64>, br: &Branches, y: &[C64]) -> Result<Vec<C64>> {
        let mut vols = br.edges.clone();
        for (j, v) in self.ode_sets.iter().zip(y) {
            vols[j.bits() as usize] = *v;
        }
        let mut out = Vec::with_capacity(self.ode_sets.len());
        for &j in self.ode_sets {
            let m = j.len() - 1;
            let r_j = br.roots[j.bits() as usize];
            let mut acc = C64::new(0.0, 0.0);
            for k in j.subsets_of(m - 1) {
                let kb = k.bits() as usize;
                let da = d_alpha(c, j, k, dir, r_j, br.roots[kb], self.space)?;
                acc += vols[kb] * da;
            }
            out.push(acc * (self.space.epsilon() / (m as f64 - 1.0)));
        }
        Ok(out)
    }

    fn segment(
        &self,
        state: &mut ContinuationState,
        a: &ComplexGram,
        b: &ComplexGram,
        tol: f64,
    ) -> Result<()> {
        let dir = a.direction_to(b);
        if dir.max_modulus() == 0.0 {
            return Ok(());
        }
        let mut y: Vec<C64> = self.ode_sets.iter().map(|j| state.volumes[j.bits() as usize]).collect();
        let mut t = 0.0;
        let mut h: f64 = 1.0;
        while t < 1.0 {
            h = h.min(1.0 - t);
            let mut k: Vec<Vec<C64>> = Vec::with_capacity(7);
            let mut stage_ok = true;
            let mut end_branches = None;
            for s in 0..7 {
                let ts = t + DP_C[s] * h;
                let p = a.lerp(b, ts);
                let br = select_branches(&p, self.space, &self.sets, &state.roots, &state.volumes, self.threshold)?;
                if br.drift > 2.0 * MAX_DRIFT {
                    stage_ok = false;
                    break;
                }
                let ys: Vec<C64> = (0..y.len())
                    .map(|i| y[i] + (0..s).map(|q| k[q][i] * DP_A[s][q]).sum::<C64>() * h)
                    .collect();
                k.push(self.rhs(&p, &dir, &br, &ys)?);
                if s == 6 {
                    end_branches = Some(br);
                }
            }
            let accept_branch = stage_ok && end_branches.as_ref().is_some_and(|br| br.drift <= MAX_DRIFT);
            let (y5, err) = if stage_ok {
                let y5: Vec<C64> = (0..y.len())
                    .map(|i| y[i] + (0..7).map(|q| k[q][i] * DP_B5[q]).sum::<C64>() * h)
                    .collect();
                let err = (0..y.len())
                    .map(|i| ((0..7).map(|q| k[q][i] * (DP_B5[q] - DP_B4[q])).sum::<C64>() * h).norm())
                    .fold(0.0, f64::max);
                (y5, err)
            } else {
                (Vec::new(), f64::INFINITY)
            };
            // the error estimate cannot resolve anything below rounding in the stages
            let stage_max = k.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
            let allowed = (tol * h).max(64.0 * f64::EPSILON * h * stage_max);
            if accept_branch && err <= allowed {
                let br = end_branches.expect("computed above");
                t = if h >= 1.0 - t { 1.0 } else { t + h };
                state.roots = br.roots;
                state.volumes = br.edges;
                for (j, v) in self.ode_sets.iter().zip(&y5) {
                    state.volumes[j.bits() as usize] = *v;
                }
                y = y5;
                state.position = a.lerp(b, t);
                let grow = if err == 0.0 { 4.0 } else { (0.9 * (allowed / err).powf(0.2)).clamp(0.2, 4.0) };
                h *= grow;
            } else {
                let shrink = if !accept_branch || !err.is_finite() {
                    0.5
                } else {
                    (0.9 * (allowed / err).powf(0.2)).clamp(0.1, 0.5)
                };
                h *= shrink;
                if h < MIN_STEP {
                    return Err(Error::numeric(format!(
                        "branch selection or local error could not be controlled at t = {t:.6} on a segment; \
                         refine the path or move it away from the hypersurfaces (size {})",
                        self.size
                    )));
                }
            }
        }
        state.position = b.clone();
        Ok(())
    }
}

/// Continues `state` along `path` (which must start at the state's position).
pub fn continue_volume(state: &ContinuationState, path: &ComplexPath, tol: f64) -> Result<ContinuationState> {
    if !(tol > 0.0) {
        return Err(Error::Argument("tolerance must be positive".into()));
    }
    let size = state.position.size();
    if path.size() != size {
        return Err(Error::Argument("path and state have different sizes".into()));
    }
    if state.position.direction_to(path.start()).max_modulus() > 1e-10 * (1.0 + state.position.norm()) {
        return Err(Error::Argument("path does not start at the state's position".into()));
    }
    let sets = tracked(size);
    let ode_sets: Vec<IndexSet> = sets.iter().copied().filter(|j| j.len() >= 3).collect();
    let stepper = Stepper {
        space: state.space,
        size,
        sets,
        ode_sets: &ode_sets,
        threshold: clearance_threshold(path.start()),
    };
    let segments = (path.waypoints.len() - 1).max(1);
    let seg_tol = tol / segments as f64;
    let mut out = state.clone();
    for pair in path.waypoints.windows(2) {
        stepper.segment(&mut out, &pair[0], &pair[1], seg_tol)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentLink {
    pub component: HypersurfaceId,
    pub lk: i64,
}

/// Outcome of continuing the volume around a closed loop.
#[derive(Clone, Debug, Serialize)]
pub struct MonodromyReport {
    #[serde(skip)]
    pub loop_path: ComplexPath,
    pub lk_h: i64,
    pub lk_per_component: Vec<ComponentLink>,
    pub v_start: C64,
    pub v_end: C64,
    pub defect: C64,
    /// The quantity compared against the tolerance.
    pub checked: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Linking numbers of a closed path with every component, in the order of
/// [`HypersurfaceId::all`].
pub fn linking_table(path: &ComplexPath) -> Result<Vec<ComponentLink>> {
    HypersurfaceId::all(path.size())
        .into_iter()
        .map(|h| Ok(ComponentLink { component: h, lk: linking_number(path, h)? }))
        .collect()
}

fn monodromy(path: &ComplexPath, space: Space, tol: f64) -> Result<(MonodromyReport, ContinuationState)> {
    if !path.is_closed() {
        return Err(Error::Argument("monodromy needs a closed loop".into()));
    }
    let base = path
        .start()
        .to_real()
        .ok_or_else(|| Error::Domain("loop basepoint is not real".into()))?;
    let start = init_state(&base, space, tol * 1e-2)?;
    let end = continue_volume(&start, path, tol)?;
    let table = linking_table(path)?;
    let full = HypersurfaceId { set: IndexSet::full(path.size()), sign: None };
    let lk_h = if path.size() == 2 {
        // D = (1 + c)(1 - c) for n = 1
        table.iter().map(|l| l.lk).sum()
    } else {
        table.iter().find(|l| l.component == full).map(|l| l.lk).unwrap_or(0)
    };
    let (v1, v2) = (start.volume(), end.volume());
    let sign = if lk_h.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let report = MonodromyReport {
        loop_path: path.clone(),
        lk_h,
        lk_per_component: table,
        v_start: v1,
        v_end: v2,
        defect: v2 - v1 * sign,
        checked: 0.0,
        tolerance: tol,
        passed: false,
    };
    Ok((report, end))
}

/// Continues around a loop in `Λ^n`, `n` odd, and checks that
/// `V_2 - (-1)^lk(γ, H) V_1` is purely imaginary to within `tol`.
pub fn verify_theorem_key(path: &ComplexPath, tol: f64) -> Result<MonodromyReport> {
    let n = path.size() - 1;
    if n % 2 == 0 {
        return Err(Error::Argument(format!("the real-part law needs odd n, got {n}")));
    }
    let (mut r, _) = monodromy(path, Space::Hyperbolic, tol * 1e-2)?;
    r.checked = r.defect.re.abs();
    r.tolerance = tol;
    r.passed = r.checked <= tol;
    Ok(r)
}

/// Continues around a loop in `S^n` or `Λ^2` and checks that the continued
/// volume is real at the basepoint to within `tol`.
pub fn verify_theorem_key2(path: &ComplexPath, space: Space, tol: f64) -> Result<MonodromyReport> {
    let n = path.size() - 1;
    if space == Space::Hyperbolic && n != 2 {
        return Err(Error::Argument(format!("the realness law covers Λ^2 only among hyperbolic spaces, got n = {n}")));
    }
    let (mut r, _) = monodromy(path, space, tol * 1e-2)?;
    r.checked = r.v_end.im.abs();
    r.tolerance = tol;
    r.passed = r.checked <= tol;
    Ok(r)
}

/// Continues around a loop and returns both end states (for sign-law checks).
pub fn continue_loop(path: &ComplexPath, space: Space, tol: f64) -> Result<(ContinuationState, ContinuationState)> {
    let base = path
        .start()
        .to_real()
        .ok_or_else(|| Error::Domain("loop basepoint is not real".into()))?;
    let start = init_state(&base, space, tol * 1e-2)?;
    let end = continue_volume(&start, path, tol)?;
    Ok((start, end))
}

/// Roots of `sum_k coeffs[k] z^k` (Durand–Kerner, then Newton polishing).
pub fn polynomial_roots(coeffs: &[C64]) -> Vec<C64> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut deg = coeffs.len();
    while deg > 0 && coeffs[deg - 1].norm() <= 1e-12 * scale {
        deg -= 1;
    }
    if deg <= 1 {
        return Vec::new();
    }
    let d = deg - 1;
    let lead = coeffs[d];
    let monic: Vec<C64> = coeffs[..=d].iter().map(|c| c / lead).collect();
    let eval = |z: C64| monic.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c);
    let radius = 1.0 + monic[..d].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = C64::new(0.4, 0.9);
    let mut z: Vec<C64> = (0..d).map(|k| seed.powu(k as u32) * radius * 0.5 + seed * 0.1).collect();
    for _ in 0..1000 {
        let mut change: f64 = 0.0;
        for i in 0..d {
            let mut denom = C64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            change = change.max(step.norm());
        }
        if change < 1e-15 * radius {
            break;
        }
    }
    let deriv: Vec<C64> = (1..=d).map(|k| monic[k] * k as f64).collect();
    let eval_d = |z: C64| deriv.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c);
    for r in z.iter_mut() {
        for _ in 0..3 {
            let dp = eval_d(*r);
            if dp.norm() == 0.0 {
                break;
            }
            *r -= eval(*r) / dp;
        }
    }
    z
}

/// A loop based at a real point that encircles one root of one component once,
/// counter-clockwise in the coordinate `z` of the complex line `B + z Δ`.
#[derive(Clone, Debug)]
pub struct Lasso {
    pub path: ComplexPath,
    pub component: HypersurfaceId,
    pub root: C64,
    pub direction: usize,
}

fn line_point(base: &ComplexGram, dir: &Mat<C64>, z: C64) -> ComplexGram {
    ComplexGram::from_upper(base.size(), |j, k| base.entry(j, k) + dir[(j, k)] * z)
}

/// Coefficients of `z -> eq(B + z Δ)` by sampling on the unit circle.
fn line_polynomial(base: &ComplexGram, dir: &Mat<C64>, comp: HypersurfaceId) -> Vec<C64> {
    let deg = if comp.sign.is_some() { 1 } else { comp.set.len() };
    let m = deg + 1;
    let samples: Vec<C64> = (0..m)
        .map(|q| comp.equation(&line_point(base, dir, C64::from_polar(1.0, 2.0 * PI * q as f64 / m as f64))))
        .collect();
    (0..m)
        .map(|k| {
            samples
                .iter()
                .enumerate()
                .map(|(q, s)| s * C64::from_polar(1.0, -2.0 * PI * (q * k) as f64 / m as f64))
                .sum::<C64>()
                / m as f64
        })
        .collect()
}

/// Points per full circle around a root.
pub const CIRCLE_POINTS: usize = 64;

/// Generates elementary loops at the real basepoint `base`: for every direction,
/// every component and every root of that component on the complex line, one
/// lasso whose small circle contains no other root of any component.
pub fn generate_lassos(base: &RealGram, directions: &[RealGram], samples_per_segment: usize) -> Result<Vec<Lasso>> {
    let b = base.to_complex();
    let size = base.size();
    let comps = HypersurfaceId::all(size);
    let mut out = Vec::new();
    for (di, d) in directions.iter().enumerate() {
        if d.size() != size {
            return Err(Error::Argument("direction has the wrong size".into()));
        }
        // off-diagonal part of the direction
        let dir = Mat::from_fn(size, |j, k| if j == k { C64::new(0.0, 0.0) } else { d.entry(j, k).to_complex() });
        let roots: Vec<(HypersurfaceId, C64)> = comps
            .iter()
            .flat_map(|&h| {
                polynomial_roots(&line_polynomial(&b, &dir, h))
                    .into_iter()
                    .map(move |z| (h, z))
            })
            .collect();
        let height = roots.iter().map(|(_, z)| z.im.abs()).fold(0.0, f64::max) + 1.0;
        for (idx, &(h, z)) in roots.iter().enumerate() {
            if z.norm() > 50.0 {
                continue;
            }
            let sep = roots
                .iter()
                .enumerate()
                .filter(|&(o, _)| o != idx)
                .map(|(_, (_, w))| (w - z).norm())
                .fold(z.norm(), f64::min);
            if sep < 1e-3 {
                continue;
            }
            let rho = (0.3 * sep).min(0.25);
            let up = if z.im >= 0.0 { 1.0 } else { -1.0 };
            let mut zs = vec![
                C64::new(0.0, 0.0),
                C64::new(0.0, up * height),
                C64::new(z.re, up * height),
                z + C64::new(0.0, up * rho),
            ];
            let start_angle = up * PI / 2.0;
            for q in 1..=CIRCLE_POINTS {
                zs.push(z + C64::from_polar(rho, start_angle + 2.0 * PI * q as f64 / CIRCLE_POINTS as f64));
            }
            zs.push(C64::new(z.re, up * height));
            zs.push(C64::new(0.0, up * height));
            zs.push(C64::new(0.0, 0.0));
            let mut way: Vec<ComplexGram> = zs.iter().map(|&w| line_point(&b, &dir, w)).collect();
            // exact closure at the real basepoint
            *way.last_mut().expect("non-empty") = b.clone();
            way[0] = b.clone();
            let path = ComplexPath::new(way, samples_per_segment)?;
            if path_clearance(&path) < 10.0 * clearance_threshold(&b) {
                continue;
            }
            out.push(Lasso { path, component: h, root: z, direction: di });
        }
    }
    Ok(out)
}

/// The single-entry directions `E_jk + E_kj`, `j < k`.
pub fn coordinate_directions(size: usize) -> Vec<RealGram> {
    let mut out = Vec::new();
    for j in 0..size {
        for k in j + 1..size {
            let mut d = RealGram::identity(size);
            d.set(j, k, 1.0);
            out.push(d);
        }
    }
    out
}

/// A generic real basepoint in the chamber: distinct edge lengths, so that the
/// roots of different components on coordinate lines are well separated.
pub fn default_basepoint(n: usize, space: Space) -> Result<RealGram> {
    let size = n + 1;
    let (l0, dl) = match space {
        Space::Hyperbolic => (0.8, 0.05),
        Space::Sphere => (0.7, 0.03),
    };
    let c = RealGram::from_upper(size, |j, k| space.edge_cosine(l0 + dl * (j + 2 * k) as f64));
    if !crate::gram::in_chamber(&c, space) {
        return Err(Error::Internal(format!("default basepoint for n = {n} is outside the chamber")));
    }
    Ok(c)
}

/// A named closed loop.
#[derive(Clone, Debug)]
pub struct LoopSpec {
    pub label: String,
    pub path: ComplexPath,
}

/// Loops at `base`: every elementary lasso `g_i`, the double circuits `g_i^2`
/// of the first `doubles` lassos, and `words` random products of 2 or 3
/// lassos or their inverses drawn with the given seed.
pub fn loop_suite(base: &RealGram, doubles: usize, words: usize, seed: u64) -> Result<Vec<LoopSpec>> {
    use rand::{Rng, SeedableRng};
    let lassos = generate_lassos(base, &coordinate_directions(base.size()), 8)?;
    if lassos.is_empty() {
        return Err(Error::numeric("no lassos could be generated at this basepoint"));
    }
    let mut out: Vec<LoopSpec> = lassos
        .iter()
        .enumerate()
        .map(|(i, l)| LoopSpec {
            label: format!("g{i}[{}]", l.component),
            path: l.path.clone(),
        })
        .collect();
    for (i, l) in lassos.iter().enumerate().take(doubles) {
        out.push(LoopSpec {
            label: format!("g{i}^2"),
            path: ComplexPath::word(&[&l.path, &l.path])?,
        });
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let inverses: Vec<ComplexPath> = lassos.iter().map(|l| l.path.reversed()).collect();
    for _ in 0..words {
        let len = rng.random_range(2..=3usize);
        let mut parts = Vec::with_capacity(len);
        let mut label = Vec::with_capacity(len);
        for _ in 0..len {
            let i = rng.random_range(0..lassos.len());
            if rng.random_bool(0.5) {
                parts.push(&lassos[i].path);
                label.push(format!("g{i}"));
            } else {
                parts.push(&inverses[i]);
                label.push(format!("g{i}^-1"));
            }
        }
        out.push(LoopSpec {
            label: label.join("*"),
            path: ComplexPath::word(&parts)?,
        });
    }
    Ok(out)
}
