//! Volumes and dihedral angles of bounded simplices in `Λ^n` and `S^n`.
//!
//! Dimensions one and two have closed forms. From dimension three on, the
//! volume is the base volume of the regular simplex with edge 1 plus the
//! integral of the Schläfli differential along a path of Gram matrices; the
//! faces of codimension two that appear in the differential are handled by the
//! same function one dimension lower.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::{first_violated_minor, in_chamber, IndexSet, RealGram, Space};
use crate::linalg::Mat;
use crate::quadrature::{integrate_interval, integrate_simplex, Estimate};

/// Environment variable naming a directory where base volumes are cached between runs.
pub const CACHE_DIR_ENV: &str = "BELLOWS_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DihedralAngle {
    pub face: IndexSet,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ClosedForm,
    Schlafli,
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeResult {
    pub value: f64,
    pub method: Method,
    pub error_estimate: f64,
}

fn require_chamber(c: &RealGram, space: Space) -> Result<()> {
    match first_violated_minor(c, space) {
        None => Ok(()),
        Some((set, d)) => Err(Error::Domain(format!(
            "Gram matrix is outside the {} chamber: minor D_{set} = {d:e}",
            space.name()
        ))),
    }
}

/// Interior dihedral angle at the codimension-two face `face` (`|face| = n - 1`).
pub fn dihedral_angle(c: &RealGram, face: IndexSet, space: Space) -> Result<DihedralAngle> {
    require_chamber(c, space)?;
    let n = c.n();
    let fm = c.face_minors(face)?;
    let p = fm.first * fm.second;
    let cos = space.epsilon_pow(n - 1) * fm.mixed / p.sqrt();
    let sin = (c.det() * fm.face / p).sqrt();
    Ok(DihedralAngle {
        face,
        value: sin.atan2(cos),
    })
}

/// All dihedral angles, faces in increasing bit order.
pub fn dihedral_angles(c: &RealGram, space: Space) -> Result<Vec<DihedralAngle>> {
    let size = c.size();
    if size < 3 {
        return Err(Error::Argument("dihedral angles need n >= 2".into()));
    }
    IndexSet::subsets(size, size - 2)
        .into_iter()
        .map(|f| dihedral_angle(c, f, space))
        .collect()
}

/// Derivative of the dihedral angle at `face` along the direction `dir`
/// (a symmetric matrix with zero diagonal).
pub fn dihedral_angle_differential(c: &RealGram, face: IndexSet, space: Space, dir: &Mat<f64>) -> Result<f64> {
    let n = c.n();
    let fm = c.face_minors(face)?;
    let dm = c.face_minor_derivatives(face, dir)?;
    let p = fm.first * fm.second;
    let dp = dm.first * fm.second + fm.first * dm.second;
    let root = (c.det() * fm.face).sqrt();
    Ok(space.epsilon_pow(n - 1) / root * (fm.mixed * dp / (2.0 * p) - dm.mixed))
}

/// Gram matrix of the regular simplex with the given edge length.
pub fn regular_simplex_gram(n: usize, edge: f64, space: Space) -> Result<RealGram> {
    if !(edge > 0.0) || !edge.is_finite() {
        return Err(Error::Argument(format!("edge length must be positive, got {edge}")));
    }
    let c = space.edge_cosine(edge);
    // eigenvalues of (1 - c) I + c J are 1 - c and 1 + n c
    if space == Space::Sphere && (c >= 1.0 || 1.0 + n as f64 * c <= 0.0) {
        return Err(Error::Domain(format!(
            "regular spherical simplex with n = {n}, edge {edge} is degenerate"
        )));
    }
    Ok(RealGram::from_upper(n + 1, |_, _| c))
}

/// Length of the edge `{0, 1}` of a one-dimensional Gram matrix.
fn edge_length(c: f64, space: Space) -> f64 {
    match space {
        Space::Sphere => c.clamp(-1.0, 1.0).acos(),
        Space::Hyperbolic => c.max(1.0).acosh(),
    }
}

/// Closed forms for `n = 1` (edge length) and `n = 2` (angle defect or excess).
pub fn volume_closed_low_dim(c: &RealGram, space: Space) -> Result<VolumeResult> {
    require_chamber(c, space)?;
    let value = match c.n() {
        0 => 1.0,
        1 => edge_length(c.entry(0, 1), space),
        2 => {
            let sum: f64 = dihedral_angles(c, space)?.iter().map(|a| a.value).sum();
            space.epsilon() * (sum - PI)
        }
        n => {
            return Err(Error::Argument(format!("no closed form for n = {n}")));
        }
    };
    Ok(VolumeResult {
        value,
        method: Method::ClosedForm,
        error_estimate: 8.0 * f64::EPSILON * value.abs().max(1.0),
    })
}

/// Independent quadrature of the volume.
///
/// The simplex is parametrized by normalized positive combinations of its
/// vertex vectors, `lambda -> X lambda / |X lambda|`, which in the Klein (resp.
/// gnomonic) chart is the affine map onto the straight simplex. The volume is
/// then `sqrt|D| * ∫ (lambda^T C lambda)^(-(n+1)/2)` over the standard simplex.
pub fn volume_oracle_quadrature(c: &RealGram, space: Space, target_err: f64) -> Result<VolumeResult> {
    let n = c.n();
    if n > 4 {
        return Err(Error::Argument(format!("quadrature oracle supports n <= 4, got {n}")));
    }
    if !(target_err > 0.0) {
        return Err(Error::Argument("target error must be positive".into()));
    }
    check_closed_chamber(c, space)?;
    let d = c.det();
    let scale = d.abs().sqrt();
    if n == 0 {
        return Ok(VolumeResult { value: 1.0, method: Method::Quadrature, error_estimate: 0.0 });
    }
    if scale == 0.0 {
        return Ok(VolumeResult { value: 0.0, method: Method::Quadrature, error_estimate: 0.0 });
    }
    let size = n + 1;
    let entries: Vec<f64> = c.as_mat().as_slice().to_vec();
    let power = -(size as f64) / 2.0;
    let integrand = |l: &[f64]| {
        let mut q = 0.0;
        for j in 0..size {
            let mut row = 0.0;
            for k in 0..size {
                row += entries[j * size + k] * l[k];
            }
            q += l[j] * row;
        }
        q.powf(power)
    };
    let est = integrate_simplex(n, integrand, target_err / scale, 200_000).map_err(|e| match e {
        Error::Numeric { message, best_estimate } => Error::Numeric {
            message,
            best_estimate: best_estimate.map(|v| v * scale),
        },
        other => other,
    })?;
    Ok(VolumeResult {
        value: est.value * scale,
        method: Method::Quadrature,
        error_estimate: est.error * scale,
    })
}

/// Every proper face non-degenerate, the full determinant of the right sign or
/// zero: the closure of the chamber reached by flattening the simplex.
fn check_closed_chamber(c: &RealGram, space: Space) -> Result<()> {
    let size = c.size();
    for v in 0..size {
        let facet = c.principal(IndexSet::full(size).without(v));
        if facet.size() >= 2 {
            require_chamber(&facet, space)?;
        }
    }
    if size >= 2 {
        let d = c.det();
        let signed = match space {
            Space::Sphere => d,
            Space::Hyperbolic if size % 2 == 0 => -d,
            Space::Hyperbolic => d,
        };
        if signed < -1e-12 * c.norm().powi(size as i32) {
            return Err(Error::Domain(format!(
                "Gram matrix is outside the {} chamber: D = {d:e}",
                space.name()
            )));
        }
    }
    Ok(())
}

/// Volume of the face spanned by the vertices in `set`.
fn face_volume(c: &RealGram, set: IndexSet, space: Space, tol: f64) -> Result<f64> {
    match set.len() {
        0 | 1 => Ok(1.0),
        2 => {
            let v = set.to_vec();
            Ok(edge_length(c.entry(v[0], v[1]), space))
        }
        3 => Ok(volume_closed_low_dim(&c.principal(set), space)?.value),
        _ => Ok(volume(&c.principal(set), space, tol)?.value),
    }
}

/// The Schläfli differential `dV = eps/(n-1) sum_I V_I dalpha_I` evaluated on `dir`.
pub fn schlafli_form(c: &RealGram, space: Space, dir: &Mat<f64>, tol: f64) -> Result<f64> {
    let n = c.n();
    if n < 2 {
        return Err(Error::Argument("the Schläfli differential needs n >= 2".into()));
    }
    require_chamber(c, space)?;
    let mut acc = 0.0;
    for face in IndexSet::subsets(c.size(), n - 1) {
        let da = dihedral_angle_differential(c, face, space, dir)?;
        if da != 0.0 {
            acc += face_volume(c, face, space, tol)? * da;
        }
    }
    Ok(space.epsilon() / (n as f64 - 1.0) * acc)
}

const CHECK_SAMPLES: usize = 64;

/// Verifies by sampling that the polyline stays in the chamber.
fn check_path(path: &[RealGram], space: Space) -> Result<()> {
    for (s, pair) in path.windows(2).enumerate() {
        for i in 0..=CHECK_SAMPLES {
            let t = i as f64 / CHECK_SAMPLES as f64;
            let p = pair[0].lerp(&pair[1], t);
            if let Some((set, d)) = first_violated_minor(&p, space) {
                return Err(Error::Domain(format!(
                    "path leaves the {} chamber on segment {s} at t = {t:.4}: minor D_{set} = {d:e}",
                    space.name()
                )));
            }
        }
    }
    Ok(())
}

fn schlafli_estimate(path: &[RealGram], space: Space, tol: f64) -> Result<Estimate> {
    if path.is_empty() {
        return Err(Error::Argument("empty path".into()));
    }
    let size = path[0].size();
    if size < 3 {
        return Err(Error::Argument("Schläfli integration needs n >= 2".into()));
    }
    if path.iter().any(|p| p.size() != size) {
        return Err(Error::Argument("path waypoints have different sizes".into()));
    }
    check_path(path, space)?;
    let segments = (path.len() - 1).max(1);
    let seg_tol = tol / segments as f64;
    let mut total = Estimate { value: 0.0, error: 0.0 };
    for pair in path.windows(2) {
        let dir = pair[0].direction_to(&pair[1]);
        if dir.max_modulus() == 0.0 {
            continue;
        }
        let face_tol = seg_tol * 1e-2;
        let est = integrate_interval(
            |t| schlafli_form(&pair[0].lerp(&pair[1], t), space, &dir, face_tol),
            0.0,
            1.0,
            seg_tol,
            4000,
        )?;
        total.value += est.value;
        total.error += est.error;
    }
    Ok(total)
}

/// `∫ dV` along the piecewise-linear path through `path`.
pub fn schlafli_integrate(path: &[RealGram], space: Space, tol: f64) -> Result<f64> {
    Ok(schlafli_estimate(path, space, tol)?.value)
}

/// Base volume of the regular simplex with edge 1, computed once per `(n, space)`.
pub fn base_volume(n: usize, space: Space) -> Result<Estimate> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, Space), Estimate>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(e) = guard.get(&(n, space)) {
        return Ok(*e);
    }
    let file = std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .map(|d| d.join(format!("vstar-{}-{n}.json", space.name())));
    if let Some(e) = file.as_ref().and_then(|f| read_cached(f)) {
        guard.insert((n, space), e);
        return Ok(e);
    }
    let c = regular_simplex_gram(n, 1.0, space)?;
    let target = if n <= 3 { 1e-14 } else { 1e-11 };
    let r = volume_oracle_quadrature(&c, space, target)?;
    let e = Estimate { value: r.value, error: r.error_estimate };
    if let Some(f) = file {
        let body = serde_json::json!({ "value": e.value, "error_estimate": e.error });
        let _ = std::fs::create_dir_all(f.parent().unwrap_or(&f))
            .and_then(|_| std::fs::write(&f, body.to_string()));
    }
    guard.insert((n, space), e);
    Ok(e)
}

fn read_cached(f: &std::path::Path) -> Option<Estimate> {
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(f).ok()?).ok()?;
    Some(Estimate {
        value: v.get("value")?.as_f64()?,
        error: v.get("error_estimate")?.as_f64()?,
    })
}

/// A path from the regular simplex with edge 1 to `target` inside the chamber:
/// the straight segment if it stays inside, otherwise polylines through
/// matrices whose edge lengths interpolate linearly.
pub fn construct_path(target: &RealGram, space: Space) -> Result<Vec<RealGram>> {
    let start = regular_simplex_gram(target.n(), 1.0, space)?;
    let straight = vec![start.clone(), target.clone()];
    let mut last_err = match check_path(&straight, space) {
        Ok(()) => return Ok(straight),
        Err(e) => e,
    };
    for pieces in [4usize, 8, 16] {
        let path: Vec<RealGram> = (0..=pieces)
            .map(|i| {
                let s = i as f64 / pieces as f64;
                RealGram::from_upper(target.size(), |j, k| {
                    let l = edge_length(target.entry(j, k), space);
                    space.edge_cosine(1.0 + s * (l - 1.0))
                })
            })
            .collect();
        let mut path = path;
        *path.last_mut().expect("non-empty") = target.clone();
        match check_path(&path, space) {
            Ok(()) => return Ok(path),
            Err(e) => last_err = e,
        }
    }
    Err(Error::numeric(format!(
        "could not construct a path from the regular simplex after 3 retries: {last_err}"
    )))
}

/// Volume of the simplex with Gram matrix `c`.
pub fn volume(c: &RealGram, space: Space, tol: f64) -> Result<VolumeResult> {
    if !(tol > 0.0) {
        return Err(Error::Argument("tolerance must be positive".into()));
    }
    if c.n() <= 2 {
        return volume_closed_low_dim(c, space);
    }
    require_chamber(c, space)?;
    let base = base_volume(c.n(), space)?;
    let path = construct_path(c, space)?;
    let est = schlafli_estimate(&path, space, tol)?;
    Ok(VolumeResult {
        value: (base.value + est.value).max(0.0),
        method: Method::Schlafli,
        error_estimate: base.error + est.error,
    })
}

/// `true` if `c` is a real Gram matrix of a non-degenerate simplex in `space`.
pub fn is_simplex(c: &RealGram, space: Space) -> bool {
    in_chamber(c, space)
}
