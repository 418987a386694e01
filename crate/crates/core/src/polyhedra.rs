//! Oriented pseudo-manifolds mapped into `Λ^n`: generalized oriented volume,
//! oriented dihedral angles, total mean curvature and the indicator-function
//! volume estimate.
//!
//! Only vertex images are stored. Volumes and angles of a pseudo-linear map are
//! determined by them, so the straightening of facets never has to be evaluated.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::{gram_from_vertices, in_chamber, minkowski_dot, IndexSet, RealGram, Space};
use crate::linalg::Mat;
use crate::simplex_volume;

/// Oriented simplicial complex whose facets are `(n-1)`-simplices.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoManifold {
    n: usize,
    labels: Vec<String>,
    facets: Vec<Vec<usize>>,
}

/// A codimension-one face of the facets, as a sorted vertex list.
pub type Ridge = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    FacetSize { facet: usize, len: usize },
    RepeatedVertex { facet: usize },
    IsolatedVertex { vertex: String },
    RidgeValence { ridge: Vec<String>, count: usize },
    Disconnected { components: usize },
    OrientationMismatch { ridge: Vec<String> },
}

/// Sign of the permutation sorting `v`.
fn parity(v: &[usize]) -> f64 {
    let mut sign = 1.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                sign = -sign;
            }
        }
    }
    sign
}

impl PseudoManifold {
    /// Facets are tuples of vertex indices into `labels`, listed in orientation order.
    pub fn new(n: usize, labels: Vec<String>, facets: Vec<Vec<usize>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Argument("pseudo-manifolds need n >= 2".into()));
        }
        for f in &facets {
            if let Some(v) = f.iter().find(|&&v| v >= labels.len()) {
                return Err(Error::Argument(format!("facet refers to unknown vertex index {v}")));
            }
        }
        Ok(PseudoManifold { n, labels, facets })
    }

    /// Builds from string ids, looking each facet entry up in `vertices`.
    pub fn from_ids(n: usize, vertices: &[String], facets: &[Vec<String>]) -> Result<Self> {
        let index: HashMap<&str, usize> = vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        if index.len() != vertices.len() {
            return Err(Error::Argument("vertex ids are not unique".into()));
        }
        let facets = facets
            .iter()
            .map(|f| {
                f.iter()
                    .map(|id| {
                        index
                            .get(id.as_str())
                            .copied()
                            .ok_or_else(|| Error::Argument(format!("unknown vertex id '{id}'")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, vertices.to_vec(), facets)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    /// The same complex with every facet orientation reversed.
    pub fn reversed(&self) -> PseudoManifold {
        let facets = self
            .facets
            .iter()
            .map(|f| {
                let mut g = f.clone();
                if g.len() >= 2 {
                    g.swap(0, 1);
                }
                g
            })
            .collect();
        PseudoManifold { n: self.n, labels: self.labels.clone(), facets }
    }

    /// Ridge -> incident `(facet, position of the removed vertex)`.
    pub fn ridges(&self) -> BTreeMap<Ridge, Vec<(usize, usize)>> {
        let mut map: BTreeMap<Ridge, Vec<(usize, usize)>> = BTreeMap::new();
        for (fi, f) in self.facets.iter().enumerate() {
            for pos in 0..f.len() {
                let mut r: Vec<usize> = f.iter().enumerate().filter(|&(i, _)| i != pos).map(|(_, &v)| v).collect();
                r.sort_unstable();
                map.entry(r).or_default().push((fi, pos));
            }
        }
        map
    }

    /// Orientation that facet `fi` induces on its ridge opposite position `pos`,
    /// relative to the sorted order of the ridge.
    fn induced_sign(&self, fi: usize, pos: usize) -> f64 {
        let f = &self.facets[fi];
        let rest: Vec<usize> = f.iter().enumerate().filter(|&(i, _)| i != pos).map(|(_, &v)| v).collect();
        let s = if pos % 2 == 0 { 1.0 } else { -1.0 };
        s * parity(&rest)
    }

    /// Every edge (pair of vertices spanned by some facet), sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = std::collections::BTreeSet::new();
        for f in &self.facets {
            for i in 0..f.len() {
                for j in i + 1..f.len() {
                    out.insert((f[i].min(f[j]), f[i].max(f[j])));
                }
            }
        }
        out.into_iter().collect()
    }

    fn ridge_labels(&self, r: &[usize]) -> Vec<String> {
        r.iter().map(|&v| self.labels[v].clone()).collect()
    }

    /// Checks the pseudo-manifold axioms and orientation coherence.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, f) in self.facets.iter().enumerate() {
            if f.len() != self.n {
                out.push(Violation::FacetSize { facet: i, len: f.len() });
            }
            let mut s = f.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != f.len() {
                out.push(Violation::RepeatedVertex { facet: i });
            }
        }
        if !out.is_empty() {
            return out;
        }
        let mut used = vec![false; self.labels.len()];
        for f in &self.facets {
            for &v in f {
                used[v] = true;
            }
        }
        for (v, u) in used.iter().enumerate() {
            if !u {
                out.push(Violation::IsolatedVertex { vertex: self.labels[v].clone() });
            }
        }
        let ridges = self.ridges();
        for (r, inc) in &ridges {
            if inc.len() != 2 {
                out.push(Violation::RidgeValence { ridge: self.ridge_labels(r), count: inc.len() });
            } else {
                let a = self.induced_sign(inc[0].0, inc[0].1);
                let b = self.induced_sign(inc[1].0, inc[1].1);
                if a * b > 0.0 {
                    out.push(Violation::OrientationMismatch { ridge: self.ridge_labels(r) });
                }
            }
        }
        // strong connectivity: facets adjacent through ridges
        let m = self.facets.len();
        let mut adj = vec![Vec::new(); m];
        for inc in ridges.values() {
            for &(a, _) in inc {
                for &(b, _) in inc {
                    if a != b {
                        adj[a].push(b);
                    }
                }
            }
        }
        let mut comp = vec![usize::MAX; m];
        let mut count = 0;
        for s in 0..m {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut q = VecDeque::from([s]);
            comp[s] = count;
            while let Some(x) = q.pop_front() {
                for &y in &adj[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = count;
                        q.push_back(y);
                    }
                }
            }
            count += 1;
        }
        if count > 1 {
            out.push(Violation::Disconnected { components: count });
        }
        out
    }

    /// Boundary of the `n`-simplex on vertices `0..=n`, coherently oriented.
    pub fn simplex_boundary(n: usize) -> PseudoManifold {
        let facets = (0..=n)
            .map(|i| {
                let mut f: Vec<usize> = (0..=n).filter(|&v| v != i).collect();
                if i % 2 == 1 && f.len() >= 2 {
                    f.swap(0, 1);
                }
                f
            })
            .collect();
        PseudoManifold {
            n,
            labels: (0..=n).map(|i| i.to_string()).collect(),
            facets,
        }
    }

    /// Boundary of the octahedron with opposite vertex pairs `(0,3)`, `(1,4)`, `(2,5)`.
    pub fn octahedron() -> PseudoManifold {
        let mut facets = Vec::new();
        for &a in &[0usize, 3] {
            for &b in &[1usize, 4] {
                for &c in &[2usize, 5] {
                    // sign of the octant (a, b, c) relative to (0, 1, 2)
                    let flips = [a == 3, b == 4, c == 5].iter().filter(|&&x| x).count();
                    facets.push(if flips % 2 == 0 { vec![a, b, c] } else { vec![a, c, b] });
                }
            }
        }
        PseudoManifold {
            n: 3,
            labels: (0..6).map(|i| i.to_string()).collect(),
            facets,
        }
    }

    /// Closed polygon `0 -> 1 -> ... -> k-1 -> 0` in `Λ^2`.
    pub fn polygon(k: usize) -> PseudoManifold {
        PseudoManifold {
            n: 2,
            labels: (0..k).map(|i| i.to_string()).collect(),
            facets: (0..k).map(|i| vec![i, (i + 1) % k]).collect(),
        }
    }
}

/// Vertex images in the hyperboloid model, indexed like the complex's labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    pub coords: Vec<Vec<f64>>,
}

impl Configuration {
    pub fn new(coords: Vec<Vec<f64>>) -> Result<Self> {
        let c = Configuration { coords };
        c.check(1e-10)?;
        Ok(c)
    }

    /// Unit Minkowski norm within `tol` (relative to `x_0^2`) and positive sheet.
    pub fn check(&self, tol: f64) -> Result<()> {
        let dim = self.coords.first().map(|x| x.len()).unwrap_or(0);
        for (i, x) in self.coords.iter().enumerate() {
            if x.len() != dim || dim < 2 {
                return Err(Error::Argument(format!("vertex {i} has inconsistent dimension")));
            }
            if x[0] <= 0.0 {
                return Err(Error::Argument(format!("vertex {i} is not on the upper sheet")));
            }
            let r = minkowski_dot(x, x) - 1.0;
            if r.abs() > tol * x[0] * x[0] {
                return Err(Error::Argument(format!("vertex {i} has Minkowski norm off by {r:e}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Applies the linear map `m` (row-major, `(n+1) x (n+1)`) to every vertex.
    pub fn transformed(&self, m: &[Vec<f64>]) -> Configuration {
        Configuration {
            coords: self
                .coords
                .iter()
                .map(|x| m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect())
                .collect(),
        }
    }

    pub fn flat(&self) -> Vec<f64> {
        self.coords.iter().flatten().copied().collect()
    }

    pub fn from_flat(v: &[f64], dim: usize) -> Configuration {
        Configuration {
            coords: v.chunks(dim).map(|c| c.to_vec()).collect(),
        }
    }
}

/// Point of the hyperboloid over the Klein-model point `u` (`|u| < 1`).
pub fn from_klein(u: &[f64]) -> Vec<f64> {
    let s = (1.0 - u.iter().map(|x| x * x).sum::<f64>()).sqrt();
    std::iter::once(1.0 / s).chain(u.iter().map(|x| x / s)).collect()
}

pub fn to_klein(x: &[f64]) -> Vec<f64> {
    x[1..].iter().map(|v| v / x[0]).collect()
}

fn coordinate_det(points: &[&[f64]]) -> f64 {
    let m = points.len();
    Mat::from_fn(m, |i, j| points[j][i]).det()
}

/// Volume of the simplex spanned by the given hyperboloid points (any count).
fn simplex_volume_of(points: &[&[f64]], tol: f64) -> Result<f64> {
    match points.len() {
        0 | 1 => Ok(1.0),
        2 => Ok(minkowski_dot(points[0], points[1]).max(1.0).acosh()),
        _ => {
            let owned: Vec<Vec<f64>> = points.iter().map(|p| p.to_vec()).collect();
            let g = gram_from_vertices(&owned, Space::Hyperbolic)?;
            if !in_chamber(&g, Space::Hyperbolic) {
                return Ok(0.0);
            }
            Ok(simplex_volume::volume(&g, Space::Hyperbolic, tol)?.value)
        }
    }
}

/// Signed volume of the cone from `apex` over a facet: the sign of the
/// coordinate determinant times the volume of the simplex, zero when degenerate.
pub fn oriented_cone_volume(apex: &[f64], facet: &[&[f64]], tol: f64) -> Result<f64> {
    let mut pts: Vec<&[f64]> = vec![apex];
    pts.extend_from_slice(facet);
    if pts.iter().any(|p| p.len() != pts.len()) {
        return Err(Error::Argument(format!(
            "a cone in Λ^{} needs {} points of length {}",
            pts.len() - 1,
            pts.len(),
            pts.len()
        )));
    }
    let det = coordinate_det(&pts);
    let scale: f64 = pts.iter().map(|p| p[0]).product();
    if det.abs() <= 1e-14 * scale {
        return Ok(0.0);
    }
    let v = simplex_volume_of(&pts, tol)?;
    Ok(det.signum() * v)
}

fn check_config(k: &PseudoManifold, p: &Configuration) -> Result<()> {
    if p.len() != k.vertex_count() {
        return Err(Error::Argument(format!(
            "configuration has {} vertices, complex has {}",
            p.len(),
            k.vertex_count()
        )));
    }
    if p.coords.iter().any(|x| x.len() != k.n() + 1) {
        return Err(Error::Argument(format!("coordinates must have length {}", k.n() + 1)));
    }
    Ok(())
}

/// Generalized oriented volume: the sum of oriented cone volumes from `apex`.
pub fn generalized_volume(k: &PseudoManifold, p: &Configuration, apex: &[f64], tol: f64) -> Result<f64> {
    check_config(k, p)?;
    let per_facet = tol / k.facets().len().max(1) as f64;
    let mut acc = 0.0;
    for f in k.facets() {
        let pts: Vec<&[f64]> = f.iter().map(|&v| p.coords[v].as_slice()).collect();
        acc += oriented_cone_volume(apex, &pts, per_facet)?;
    }
    Ok(acc)
}

/// The two facets at a ridge, as `(opposite vertex in sigma_1, opposite vertex
/// in sigma_2, ridge vertices ordered so that (v1, ridge...) is sigma_2's orientation)`.
fn ridge_frame(k: &PseudoManifold, ridge: &[usize], first: usize) -> Result<(usize, usize, Vec<usize>)> {
    let ridges = k.ridges();
    let inc = ridges
        .get(ridge)
        .ok_or_else(|| Error::Argument("not a ridge of the complex".into()))?;
    if inc.len() != 2 {
        return Err(Error::Argument("ridge is not shared by exactly two facets".into()));
    }
    let (s1, s2) = if first == 0 { (inc[0], inc[1]) } else { (inc[1], inc[0]) };
    let v0 = k.facets[s1.0][s1.1];
    let f2 = &k.facets[s2.0];
    let v1 = f2[s2.1];
    // move v1 to the front of sigma_2 with the induced sign, then fix the sign by a swap
    let mut rest: Vec<usize> = f2.iter().enumerate().filter(|&(i, _)| i != s2.1).map(|(_, &v)| v).collect();
    let sign = if s2.1 % 2 == 0 { 1.0 } else { -1.0 };
    if sign < 0.0 {
        if rest.len() >= 2 {
            rest.swap(0, 1);
        } else {
            return Err(Error::Internal("cannot reorder a single-vertex ridge".into()));
        }
    }
    Ok((v0, v1, rest))
}

/// Oriented dihedral angle at `ridge` in `[0, 2π)`.
pub fn oriented_dihedral_angle(k: &PseudoManifold, p: &Configuration, ridge: &[usize]) -> Result<f64> {
    oriented_dihedral_angle_from(k, p, ridge, 0)
}

/// Same, labelling the `first`-th incident facet (0 or 1) as `sigma_1`.
pub fn oriented_dihedral_angle_from(k: &PseudoManifold, p: &Configuration, ridge: &[usize], first: usize) -> Result<f64> {
    check_config(k, p)?;
    let n = k.n();
    let (v0, v1, rest, orient) = if n == 2 && ridge.len() == 1 {
        polygon_frame(k, ridge[0], first)?
    } else {
        let (v0, v1, rest) = ridge_frame(k, ridge, first)?;
        (v0, v1, rest, 1.0)
    };
    let order: Vec<usize> = [v0, v1].into_iter().chain(rest).collect();
    let pts: Vec<Vec<f64>> = order.iter().map(|&v| p.coords[v].clone()).collect();
    let c = gram_from_vertices(&pts, Space::Hyperbolic)?;
    let face = IndexSet::from_indices(2..=n);
    let fm = c.face_minors(face)?;
    let p12 = fm.first * fm.second;
    let sign_n = if n % 2 == 0 { 1.0 } else { -1.0 };
    for (which, d) in [(0usize, fm.first), (1, fm.second)] {
        if sign_n * d >= 0.0 {
            return Err(Error::Domain(format!(
                "facet through vertex {} at the ridge is degenerate",
                k.labels[order[which]]
            )));
        }
    }
    let cos = -sign_n * fm.mixed / p12.sqrt();
    let refs: Vec<&[f64]> = pts.iter().map(|x| x.as_slice()).collect();
    let det = coordinate_det(&refs);
    let sin = (sign_n * fm.face / p12).max(0.0).sqrt() * det * orient;
    Ok(sin.atan2(cos).rem_euclid(2.0 * PI))
}

/// For a polygon vertex: the far ends of the two incident edges, and `-1` when
/// `(v1, v)` runs against the orientation of `sigma_2` (a one-vertex ridge
/// cannot be reordered to absorb the sign).
fn polygon_frame(k: &PseudoManifold, v: usize, first: usize) -> Result<(usize, usize, Vec<usize>, f64)> {
    let ridges = k.ridges();
    let inc = ridges
        .get(&vec![v])
        .ok_or_else(|| Error::Argument("not a vertex of the polygon".into()))?;
    if inc.len() != 2 {
        return Err(Error::Argument("polygon vertex is not shared by exactly two edges".into()));
    }
    let (s1, s2) = if first == 0 { (inc[0], inc[1]) } else { (inc[1], inc[0]) };
    let v0 = k.facets[s1.0][s1.1];
    let v1 = k.facets[s2.0][s2.1];
    let orient = if s2.1 % 2 == 0 { 1.0 } else { -1.0 };
    Ok((v0, v1, vec![v], orient))
}

fn ridge_volume(p: &Configuration, ridge: &[usize], tol: f64) -> Result<f64> {
    let pts: Vec<&[f64]> = ridge.iter().map(|&v| p.coords[v].as_slice()).collect();
    simplex_volume_of(&pts, tol)
}

/// `sum_F V_F (π - α_F)` with every `α_F` taken in `[0, 2π)`.
pub fn total_mean_curvature(k: &PseudoManifold, p: &Configuration) -> Result<f64> {
    let mut tracker = AngleTracker::default();
    tracker.total_mean_curvature(k, p)
}

/// Keeps oriented dihedral angles continuous along a deformation: each new
/// angle is the representative closest to the previous one.
#[derive(Clone, Debug, Default)]
pub struct AngleTracker {
    last: BTreeMap<Ridge, f64>,
}

impl AngleTracker {
    pub fn angles(&mut self, k: &PseudoManifold, p: &Configuration) -> Result<BTreeMap<Ridge, f64>> {
        let mut out = BTreeMap::new();
        for r in k.ridges().keys() {
            let a = oriented_dihedral_angle(k, p, r)?;
            let a = match self.last.get(r) {
                Some(&prev) => a + 2.0 * PI * ((prev - a) / (2.0 * PI)).round(),
                None => a,
            };
            out.insert(r.clone(), a);
        }
        self.last = out.clone();
        Ok(out)
    }

    pub fn total_mean_curvature(&mut self, k: &PseudoManifold, p: &Configuration) -> Result<f64> {
        let angles = self.angles(k, p)?;
        let mut acc = 0.0;
        for (r, a) in &angles {
            acc += ridge_volume(p, r, 1e-12)? * (PI - a);
        }
        Ok(acc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Signed number of crossings of the ray `u + s d` (`s > 0`) with the facet
/// triangles in the Klein model; `None` if the ray passes too close to an edge
/// or the point is too close to a facet plane.
fn crossing_number(u: &[f64; 3], d: &[f64; 3], tris: &[[[f64; 3]; 3]]) -> Option<i64> {
    let sub = |a: &[f64; 3], b: &[f64; 3]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let cross = |a: &[f64; 3], b: &[f64; 3]| {
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    };
    let dot = |a: &[f64; 3], b: &[f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    const EPS: f64 = 1e-12;
    let mut total = 0;
    for t in tris {
        let e1 = sub(&t[1], &t[0]);
        let e2 = sub(&t[2], &t[0]);
        let pv = cross(d, &e2);
        let det = dot(&e1, &pv);
        if det.abs() < EPS {
            continue;
        }
        let inv = 1.0 / det;
        let tv = sub(u, &t[0]);
        let a = dot(&tv, &pv) * inv;
        let qv = cross(&tv, &e1);
        let b = dot(d, &qv) * inv;
        let s = dot(&e2, &qv) * inv;
        let margin = 1e-9;
        if a < -margin || b < -margin || a + b > 1.0 + margin {
            continue;
        }
        if a < margin || b < margin || a + b > 1.0 - margin || s.abs() < margin {
            return None;
        }
        if s > 0.0 {
            let normal = cross(&e1, &e2);
            total += if dot(d, &normal) > 0.0 { 1 } else { -1 };
        }
    }
    Some(total)
}

/// Monte Carlo estimate of `∫ λ_P dV` for `n = 3` in the Klein model.
pub fn indicator_volume_mc(k: &PseudoManifold, p: &Configuration, samples: usize, seed: u64) -> Result<McEstimate> {
    check_config(k, p)?;
    if k.n() != 3 {
        return Err(Error::Argument("the indicator estimate is implemented for n = 3".into()));
    }
    if samples < 2 {
        return Err(Error::Argument("need at least two samples".into()));
    }
    let klein: Vec<[f64; 3]> = p
        .coords
        .iter()
        .map(|x| {
            let u = to_klein(x);
            [u[0], u[1], u[2]]
        })
        .collect();
    let tris: Vec<[[f64; 3]; 3]> = k.facets().iter().map(|f| [klein[f[0]], klein[f[1]], klein[f[2]]]).collect();
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for q in &klein {
        for i in 0..3 {
            lo[i] = lo[i].min(q[i]);
            hi[i] = hi[i].max(q[i]);
        }
    }
    let box_volume: f64 = (0..3).map(|i| hi[i] - lo[i]).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let u = [
            rng.random_range(lo[0]..hi[0]),
            rng.random_range(lo[1]..hi[1]),
            rng.random_range(lo[2]..hi[2]),
        ];
        let r2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
        let weight = (1.0 - r2).powi(-2);
        let lambda = loop {
            let d = random_direction(&mut rng);
            if let Some(l) = crossing_number(&u, &d, &tris) {
                break l;
            }
        };
        let v = lambda as f64 * weight;
        sum += v;
        sum_sq += v * v;
    }
    let nf = samples as f64;
    let mean = sum / nf;
    let var = (sum_sq / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
    Ok(McEstimate {
        value: box_volume * mean,
        stderr: box_volume * (var / nf).sqrt(),
        samples,
    })
}

fn random_direction(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let d = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0f64),
        ];
        let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        if r > 0.1 && r <= 1.0 {
            return [d[0] / r, d[1] / r, d[2] / r];
        }
    }
}

/// Gram matrix of the given vertices of a configuration.
pub fn facet_gram(p: &Configuration, vertices: &[usize]) -> Result<RealGram> {
    let pts: Vec<Vec<f64>> = vertices.iter().map(|&v| p.coords[v].clone()).collect();
    gram_from_vertices(&pts, Space::Hyperbolic)
}
