//! Gram matrices of simplices and the algebra of their minors.
//!
//! A simplex with vertices `v_0..v_n` in the sphere `S^n` or in the hyperboloid
//! model of `Λ^n` is encoded, up to isometry, by the symmetric matrix of inner
//! products `c_jk = <v_j, v_k>` (cosines or hyperbolic cosines of edge lengths),
//! which has units on the diagonal. The complexified space of such matrices is
//! where volume continuation lives, so entries are generic over [`Scalar`].

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat, Scalar};

/// Subset of `{0, .., 31}` stored as a bit mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet(u32);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        IndexSet(indices.into_iter().fold(0, |acc, i| {
            assert!(i < 32, "index {i} out of range for IndexSet");
            acc | (1 << i)
        }))
    }

    /// `{0, .., size-1}`.
    pub fn full(size: usize) -> Self {
        assert!(size <= 32);
        if size == 32 {
            IndexSet(u32::MAX)
        } else {
            IndexSet((1u32 << size) - 1)
        }
    }

    pub fn from_bits(bits: u32) -> Self {
        IndexSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 32 && self.0 & (1 << i) != 0
    }

    pub fn with(self, i: usize) -> Self {
        IndexSet(self.0 | (1 << i))
    }

    pub fn without(self, i: usize) -> Self {
        IndexSet(self.0 & !(1 << i))
    }

    pub fn is_subset_of(self, other: IndexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn max_index(self) -> Option<usize> {
        (self.0 != 0).then(|| 31 - self.0.leading_zeros() as usize)
    }

    /// Complement inside `{0, .., size-1}`.
    pub fn complement(self, size: usize) -> Self {
        IndexSet(!self.0 & Self::full(size).0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits & (1 << i) != 0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `{0, .., size-1}` with exactly `k` elements, in increasing bit order.
    pub fn subsets(size: usize, k: usize) -> Vec<IndexSet> {
        (0..=Self::full(size).0)
            .map(IndexSet)
            .filter(|s| s.len() == k)
            .collect()
    }

    /// Subsets of `self` with exactly `k` elements.
    pub fn subsets_of(self, k: usize) -> Vec<IndexSet> {
        let elems = self.to_vec();
        let mut out = Vec::new();
        for mask in 0u32..(1 << elems.len()) {
            if mask.count_ones() as usize == k {
                out.push(IndexSet::from_indices(
                    (0..elems.len()).filter(|b| mask & (1 << b) != 0).map(|b| elems[b]),
                ));
            }
        }
        out
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for IndexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if let Some(bad) = v.iter().find(|&&i| i >= 32) {
            return Err(serde::de::Error::custom(format!("index {bad} out of range")));
        }
        Ok(IndexSet::from_indices(v))
    }
}

/// The model space a Gram matrix is read in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Sphere,
    Hyperbolic,
}

impl Space {
    /// `+1` on the sphere, `-1` in Lobachevsky space; equals the curvature.
    pub fn epsilon(self) -> f64 {
        match self {
            Space::Sphere => 1.0,
            Space::Hyperbolic => -1.0,
        }
    }

    /// `epsilon^k`.
    pub fn epsilon_pow(self, k: usize) -> f64 {
        match self {
            Space::Sphere => 1.0,
            Space::Hyperbolic if k % 2 == 0 => 1.0,
            Space::Hyperbolic => -1.0,
        }
    }

    /// Bilinear form of the ambient vector space: Euclidean for the sphere,
    /// Minkowski `x0 y0 - x1 y1 - ...` for the hyperboloid.
    pub fn inner(self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Space::Sphere => x.iter().zip(y).map(|(a, b)| a * b).sum(),
            Space::Hyperbolic => minkowski_dot(x, y),
        }
    }

    /// Entry of the Gram matrix for an edge of the given length.
    pub fn edge_cosine(self, length: f64) -> f64 {
        match self {
            Space::Sphere => length.cos(),
            Space::Hyperbolic => length.cosh(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Space::Sphere => "sphere",
            Space::Hyperbolic => "hyperbolic",
        }
    }
}

impl std::str::FromStr for Space {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" | "spherical" => Ok(Space::Sphere),
            "hyperbolic" | "lobachevsky" => Ok(Space::Hyperbolic),
            _ => Err(Error::Argument(format!("unknown space '{s}'"))),
        }
    }
}

pub fn minkowski_dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x[0] * y[0] - x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum::<f64>()
}

/// Symmetric matrix with unit diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix<T> {
    mat: Mat<T>,
}

pub type RealGram = GramMatrix<f64>;
pub type ComplexGram = GramMatrix<Complex64>;

impl<T: Scalar> GramMatrix<T> {
    /// Validates the unit diagonal and symmetry (to `1e-12` relative) and
    /// stores the exactly symmetrized matrix.
    pub fn new(mat: Mat<T>) -> Result<Self> {
        let m = mat.size();
        if m == 0 {
            return Err(Error::Argument("Gram matrix must be at least 1x1".into()));
        }
        for j in 0..m {
            if (mat[(j, j)] - T::one()).modulus() > 1e-12 {
                return Err(Error::Argument(format!("diagonal entry {j} is not 1")));
            }
            for k in j + 1..m {
                let (a, b) = (mat[(j, k)], mat[(k, j)]);
                if (a - b).modulus() > 1e-12 * (1.0 + a.modulus()) {
                    return Err(Error::Argument(format!("entries ({j},{k}) and ({k},{j}) differ")));
                }
            }
        }
        let half = T::from_f64(0.5);
        let sym = Mat::from_fn(m, |j, k| {
            if j == k {
                T::one()
            } else {
                (mat[(j, k)] + mat[(k, j)]) * half
            }
        });
        Ok(GramMatrix { mat: sym })
    }

    /// Builds a Gram matrix from its strictly upper-triangular entries.
    pub fn from_upper(size: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut mat = Mat::identity(size);
        for j in 0..size {
            for k in j + 1..size {
                let v = f(j, k);
                mat[(j, k)] = v;
                mat[(k, j)] = v;
            }
        }
        GramMatrix { mat }
    }

    pub fn identity(size: usize) -> Self {
        GramMatrix { mat: Mat::identity(size) }
    }

    /// Matrix size `n + 1`.
    pub fn size(&self) -> usize {
        self.mat.size()
    }

    /// Dimension `n` of the simplex.
    pub fn n(&self) -> usize {
        self.mat.size() - 1
    }

    pub fn entry(&self, j: usize, k: usize) -> T {
        self.mat[(j, k)]
    }

    /// Sets `c_jk = c_kj = value` for `j != k`.
    pub fn set(&mut self, j: usize, k: usize, value: T) {
        assert_ne!(j, k, "diagonal entries are fixed to 1");
        self.mat[(j, k)] = value;
        self.mat[(k, j)] = value;
    }

    pub fn as_mat(&self) -> &Mat<T> {
        &self.mat
    }

    pub fn full_set(&self) -> IndexSet {
        IndexSet::full(self.size())
    }

    fn check_set(&self, s: IndexSet) -> Result<()> {
        match s.max_index() {
            Some(i) if i >= self.size() => Err(Error::Argument(format!(
                "index set {s} not contained in {{0..{}}}",
                self.n()
            ))),
            _ => Ok(()),
        }
    }

    /// `D_I(C) = det C_I`.
    pub fn principal_minor(&self, set: IndexSet) -> T {
        let idx = set.to_vec();
        self.mat.select(&idx, &idx).det()
    }

    pub fn det(&self) -> T {
        self.mat.det()
    }

    /// The principal submatrix `C_I`, relabelled `0..|I|-1` in increasing order.
    pub fn principal(&self, set: IndexSet) -> GramMatrix<T> {
        let idx = set.to_vec();
        GramMatrix {
            mat: self.mat.select(&idx, &idx),
        }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.mat
            .as_slice()
            .iter()
            .map(|x| x.modulus().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_imag(&self) -> f64 {
        self.mat.as_slice().iter().map(|x| x.im().abs()).fold(0.0, f64::max)
    }

    pub fn to_complex(&self) -> ComplexGram {
        GramMatrix {
            mat: self.mat.map(|x| x.to_complex()),
        }
    }

    /// Real part, if every imaginary part vanishes exactly.
    pub fn to_real(&self) -> Option<RealGram> {
        (self.max_imag() == 0.0).then(|| GramMatrix {
            mat: self.mat.map(|x| x.re()),
        })
    }

    /// `(1 - t) self + t other`.
    pub fn lerp(&self, other: &GramMatrix<T>, t: f64) -> GramMatrix<T> {
        let (a, b) = (T::from_f64(1.0 - t), T::from_f64(t));
        GramMatrix {
            mat: Mat::from_fn(self.size(), |j, k| {
                if j == k {
                    T::one()
                } else {
                    a * self.mat[(j, k)] + b * other.mat[(j, k)]
                }
            }),
        }
    }

    /// `other - self` as a direction (zero diagonal).
    pub fn direction_to(&self, other: &GramMatrix<T>) -> Mat<T> {
        Mat::from_fn(self.size(), |j, k| other.mat[(j, k)] - self.mat[(j, k)])
    }

    /// Minors attached to a codimension-two face `I` (`|I| = n - 1`).
    pub fn face_minors(&self, face: IndexSet) -> Result<FaceMinors<T>> {
        let (a, b) = face_complement(self.size(), face)?;
        let rows = aligned(a, face);
        let cols = aligned(b, face);
        let fidx = face.to_vec();
        let first = sorted_with(face, a);
        let second = sorted_with(face, b);
        Ok(FaceMinors {
            a,
            b,
            face: self.mat.select(&fidx, &fidx).det(),
            first: self.mat.select(&first, &first).det(),
            second: self.mat.select(&second, &second).det(),
            mixed: self.mat.select(&rows, &cols).det(),
        })
    }

    /// Directional derivatives of the face minors along `dir` (symmetric, zero diagonal).
    pub fn face_minor_derivatives(&self, face: IndexSet, dir: &Mat<T>) -> Result<FaceMinors<T>> {
        let (a, b) = face_complement(self.size(), face)?;
        let d = |rows: &[usize], cols: &[usize]| {
            self.mat.select(rows, cols).det_derivative(&dir.select(rows, cols))
        };
        let fidx = face.to_vec();
        let first = sorted_with(face, a);
        let second = sorted_with(face, b);
        Ok(FaceMinors {
            a,
            b,
            face: d(&fidx, &fidx),
            first: d(&first, &first),
            second: d(&second, &second),
            mixed: d(&aligned(a, face), &aligned(b, face)),
        })
    }
}

/// For a face `I` with complement `{a, b}` (`a < b`): `D_I`, `D_{I+a}`, `D_{I+b}`,
/// and the mixed minor with rows `(a, I)` and columns `(b, I)`.
///
/// Putting the extra index first in both the rows and the columns makes the
/// cosine of the dihedral angle at `I` equal to `eps^(n-1) mixed / sqrt(first * second)`
/// for every face, not only for faces whose complement is adjacent.
#[derive(Clone, Copy, Debug)]
pub struct FaceMinors<T> {
    pub a: usize,
    pub b: usize,
    pub face: T,
    pub first: T,
    pub second: T,
    pub mixed: T,
}

fn face_complement(size: usize, face: IndexSet) -> Result<(usize, usize)> {
    if face.max_index().is_some_and(|i| i >= size) || face.len() + 2 != size {
        return Err(Error::Argument(format!(
            "face {face} must be a subset of size {} of {{0..{}}}",
            size.saturating_sub(2),
            size.saturating_sub(1)
        )));
    }
    let c = face.complement(size).to_vec();
    Ok((c[0], c[1]))
}

fn aligned(extra: usize, face: IndexSet) -> Vec<usize> {
    std::iter::once(extra).chain(face.iter()).collect()
}

fn sorted_with(face: IndexSet, extra: usize) -> Vec<usize> {
    face.with(extra).to_vec()
}

/// `D_{I,J}(C)`: rows `I`, columns `J`, both in increasing order.
pub fn minor<T: Scalar>(c: &GramMatrix<T>, rows: IndexSet, cols: IndexSet) -> Result<T> {
    c.check_set(rows)?;
    c.check_set(cols)?;
    if rows.len() != cols.len() {
        return Err(Error::Argument(format!(
            "minor needs |I| = |J|, got {} and {}",
            rows.len(),
            cols.len()
        )));
    }
    Ok(c.as_mat().select(&rows.to_vec(), &cols.to_vec()).det())
}

/// `D D_I - (D_I' D_I'' - D_{I',I''}^2)` for `|I| = n - 1`; zero for every symmetric matrix.
pub fn jacobi_residual<T: Scalar>(c: &GramMatrix<T>, face: IndexSet) -> Result<T> {
    let fm = c.face_minors(face)?;
    let d = c.det();
    Ok(d * fm.face - (fm.first * fm.second - fm.mixed * fm.mixed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" | "+1" | "1" => Ok(Sign::Plus),
            "-" | "minus" | "-1" => Ok(Sign::Minus),
            _ => Err(Error::Argument(format!("unknown sign '{s}'"))),
        }
    }
}

/// An irreducible component of the hypersurface where some principal minor vanishes:
/// `{D_I = 0}` for `|I| >= 3`, or `{1 + c_jk = 0}` / `{1 - c_jk = 0}` for `I = {j, k}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HypersurfaceId {
    pub set: IndexSet,
    pub sign: Option<Sign>,
}

impl HypersurfaceId {
    pub fn new(set: IndexSet, sign: Option<Sign>) -> Result<Self> {
        if set.len() < 2 {
            return Err(Error::Argument(format!("hypersurface index set {set} needs at least 2 elements")));
        }
        if (set.len() == 2) != sign.is_some() {
            return Err(Error::Argument(
                "a sign is required exactly for two-element index sets".into(),
            ));
        }
        Ok(HypersurfaceId { set, sign })
    }

    /// The polynomial cutting out this component: `D_I`, or `1 +- c_jk`.
    pub fn equation<T: Scalar>(&self, c: &GramMatrix<T>) -> T {
        match self.sign {
            None => c.principal_minor(self.set),
            Some(s) => {
                let v = self.set.to_vec();
                T::one() + T::from_f64(s.value()) * c.entry(v[0], v[1])
            }
        }
    }

    /// Every irreducible component for matrices of the given size.
    pub fn all(size: usize) -> Vec<HypersurfaceId> {
        let mut out = Vec::new();
        for k in 2..=size {
            for set in IndexSet::subsets(size, k) {
                if k == 2 {
                    out.push(HypersurfaceId { set, sign: Some(Sign::Plus) });
                    out.push(HypersurfaceId { set, sign: Some(Sign::Minus) });
                } else {
                    out.push(HypersurfaceId { set, sign: None });
                }
            }
        }
        out
    }
}

impl fmt::Display for HypersurfaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            None => write!(f, "H{}", self.set),
            Some(Sign::Plus) => write!(f, "H{}+", self.set),
            Some(Sign::Minus) => write!(f, "H{}-", self.set),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainClass {
    SphericalSimplex,
    HyperbolicSimplex,
    OnHypersurface(Vec<HypersurfaceId>),
    OtherReal,
    NonReal,
}

impl DomainClass {
    pub fn matches(&self, space: Space) -> bool {
        matches!(
            (self, space),
            (DomainClass::SphericalSimplex, Space::Sphere)
                | (DomainClass::HyperbolicSimplex, Space::Hyperbolic)
        )
    }
}

/// Default band for "on a hypersurface": `1e-9 * ||C||`.
pub fn default_tolerance<T: Scalar>(c: &GramMatrix<T>) -> f64 {
    1e-9 * c.norm()
}

/// Locates a matrix relative to the chambers of non-degenerate simplices.
///
/// Minors within `tol` of zero are reported as hypersurface memberships; the
/// answer is indeterminate for matrices inside that band.
pub fn classify_domain<T: Scalar>(c: &GramMatrix<T>, tol: f64) -> DomainClass {
    let Some(c) = c.to_real() else {
        return DomainClass::NonReal;
    };
    let size = c.size();
    let mut hits = Vec::new();
    let mut spherical = true;
    let mut hyperbolic = true;
    for k in 2..=size {
        for set in IndexSet::subsets(size, k) {
            if k == 2 {
                let v = set.to_vec();
                let cjk = c.entry(v[0], v[1]);
                if (1.0 + cjk).abs() <= tol {
                    hits.push(HypersurfaceId { set, sign: Some(Sign::Plus) });
                }
                if (1.0 - cjk).abs() <= tol {
                    hits.push(HypersurfaceId { set, sign: Some(Sign::Minus) });
                }
                hyperbolic &= cjk > 1.0 + tol;
            }
            let d = c.principal_minor(set);
            if k > 2 && d.abs() <= tol {
                hits.push(HypersurfaceId { set, sign: None });
            }
            spherical &= d > tol;
            let signed = if k % 2 == 0 { d } else { -d };
            hyperbolic &= signed < -tol;
        }
    }
    if !hits.is_empty() {
        DomainClass::OnHypersurface(hits)
    } else if spherical {
        DomainClass::SphericalSimplex
    } else if hyperbolic {
        DomainClass::HyperbolicSimplex
    } else {
        DomainClass::OtherReal
    }
}

/// Fast membership test for the open chamber of the given space (zero tolerance).
pub fn in_chamber(c: &RealGram, space: Space) -> bool {
    let size = c.size();
    for k in 2..=size {
        for set in IndexSet::subsets(size, k) {
            let d = c.principal_minor(set);
            let ok = match space {
                Space::Sphere => d > 0.0,
                Space::Hyperbolic => {
                    let signed = if k % 2 == 0 { d } else { -d };
                    let edge_ok = k != 2 || {
                        let v = set.to_vec();
                        c.entry(v[0], v[1]) > 1.0
                    };
                    signed < 0.0 && edge_ok
                }
            };
            if !ok {
                return false;
            }
        }
    }
    true
}

/// The first principal minor (in increasing size) with the wrong sign for the chamber.
pub fn first_violated_minor(c: &RealGram, space: Space) -> Option<(IndexSet, f64)> {
    let size = c.size();
    for k in 2..=size {
        for set in IndexSet::subsets(size, k) {
            let d = c.principal_minor(set);
            let ok = match space {
                Space::Sphere => d > 0.0,
                Space::Hyperbolic => {
                    let signed = if k % 2 == 0 { d } else { -d };
                    let v = set.to_vec();
                    signed < 0.0 && (k != 2 || c.entry(v[0], v[1]) > 1.0)
                }
            };
            if !ok {
                return Some((set, d));
            }
        }
    }
    None
}

/// The explicit matrix lying on `{D = 0}` and on the component of `{D_I = 0}`
/// (signed for `|I| = 2`) and on no other component.
///
/// With `I` relabelled to `{0..k-1}` and `K = {k..n-1}`: `c_0j = -sigma/sqrt(k-1)`
/// for `j in 1..k`, `c_0j = 2` for `j in K`, `c_1n = (1 - 1/(4(k-1)(n-k)))^(-1/2)`,
/// all other off-diagonal entries zero.
pub fn witness_matrix(n: usize, set: IndexSet, sigma: Sign) -> Result<RealGram> {
    let k = set.len();
    if set.max_index().is_some_and(|i| i > n) {
        return Err(Error::Argument(format!("index set {set} not contained in {{0..{n}}}")));
    }
    if k < 2 || k >= n {
        return Err(Error::Argument(format!(
            "witness matrices need 2 <= |I| < n, got |I| = {k}, n = {n}"
        )));
    }
    let kf = k as f64;
    let mut canon = GramMatrix::<f64>::identity(n + 1);
    for j in 1..k {
        canon.set(0, j, -sigma.value() / (kf - 1.0).sqrt());
    }
    for j in k..n {
        canon.set(0, j, 2.0);
    }
    let q = 4.0 * (kf - 1.0) * (n - k) as f64;
    canon.set(1, n, (1.0 - 1.0 / q).powf(-0.5));

    // canonical index -> caller index
    let perm: Vec<usize> = set.iter().chain(set.complement(n + 1).iter()).collect();
    let mut out = GramMatrix::<f64>::identity(n + 1);
    for a in 0..=n {
        for b in a + 1..=n {
            out.set(perm[a], perm[b], canon.entry(a, b));
        }
    }
    Ok(out)
}

/// Gradient of `D_J` with respect to the off-diagonal coordinates `c_jk` (`j < k`,
/// lexicographic order).
pub fn minor_gradient(c: &RealGram, set: IndexSet) -> Vec<f64> {
    let idx = set.to_vec();
    let cof = c.as_mat().select(&idx, &idx).cofactors();
    let size = c.size();
    let mut out = Vec::with_capacity(size * (size - 1) / 2);
    for j in 0..size {
        for k in j + 1..size {
            let g = match (idx.iter().position(|&x| x == j), idx.iter().position(|&x| x == k)) {
                (Some(p), Some(q)) => 2.0 * cof[(p, q)],
                _ => 0.0,
            };
            out.push(g);
        }
    }
    out
}

/// Gram matrix of points on the unit sphere or on the upper sheet of the hyperboloid.
pub fn gram_from_vertices(points: &[Vec<f64>], space: Space) -> Result<RealGram> {
    if points.is_empty() {
        return Err(Error::Argument("need at least one point".into()));
    }
    let dim = points[0].len();
    for (i, p) in points.iter().enumerate() {
        if p.len() != dim || dim == 0 {
            return Err(Error::Argument(format!("point {i} has inconsistent length")));
        }
        let scale = p.iter().map(|x| x * x).sum::<f64>().max(1.0);
        let nrm = space.inner(p, p);
        if (nrm - 1.0).abs() > 1e-9 * scale {
            return Err(Error::Argument(format!(
                "point {i} has squared norm {nrm}, expected 1"
            )));
        }
        if space == Space::Hyperbolic && p[0] <= 0.0 {
            return Err(Error::Argument(format!("point {i} is not on the upper sheet")));
        }
    }
    Ok(GramMatrix::from_upper(points.len(), |j, k| space.inner(&points[j], &points[k])))
}

/// Vertices realizing `C` in the canonical gauge: the first vertex is
/// `(1, 0, .., 0)` and vertex `j` has non-zero coordinates only in `0..=j`.
pub fn vertices_from_gram(c: &RealGram, space: Space) -> Result<Vec<Vec<f64>>> {
    let class = classify_domain(c, default_tolerance(c));
    if !class.matches(space) {
        return Err(Error::Domain(format!(
            "Gram matrix is {class:?}, not a non-degenerate {} simplex",
            space.name()
        )));
    }
    let m = c.size();
    let mut l = vec![vec![0.0; m]; m];
    l[0][0] = 1.0;
    for j in 1..m {
        match space {
            Space::Sphere => {
                for i in 0..j {
                    let s: f64 = (0..i).map(|t| l[j][t] * l[i][t]).sum();
                    l[j][i] = (c.entry(j, i) - s) / l[i][i];
                }
                let r = 1.0 - (0..j).map(|t| l[j][t] * l[j][t]).sum::<f64>();
                l[j][j] = r.max(0.0).sqrt();
            }
            Space::Hyperbolic => {
                l[j][0] = c.entry(j, 0);
                for i in 1..j {
                    let s: f64 = (1..i).map(|t| l[j][t] * l[i][t]).sum();
                    l[j][i] = (l[j][0] * l[i][0] - s - c.entry(j, i)) / l[i][i];
                }
                let r = l[j][0] * l[j][0] - (1..j).map(|t| l[j][t] * l[j][t]).sum::<f64>() - 1.0;
                l[j][j] = r.max(0.0).sqrt();
            }
        }
        if l[j][j] <= 0.0 {
            return Err(Error::Domain(format!("vertex {j} is degenerate")));
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_minor() {
        let mut c = RealGram::identity(3);
        c.set(0, 2, 0.3);
        let s = IndexSet::from_indices([0, 2]);
        assert!((minor(&c, s, s).unwrap() - (1.0 - 0.09)).abs() < 1e-15);
        assert!(minor(&c, s, IndexSet::from_indices([0])).is_err());
        assert!(minor(&c, IndexSet::from_indices([0, 5]), s).is_err());
    }

    #[test]
    fn identity_minors_are_one() {
        let c = RealGram::identity(5);
        for k in 0..=5 {
            for s in IndexSet::subsets(5, k) {
                assert_eq!(minor(&c, s, s).unwrap(), 1.0);
            }
        }
        assert_eq!(jacobi_residual(&c, IndexSet::from_indices([1, 2, 3])).unwrap(), 0.0);
    }

    #[test]
    fn witness_n3_k2_entries() {
        let w = witness_matrix(3, IndexSet::from_indices([0, 1]), Sign::Plus).unwrap();
        assert!((w.entry(0, 1) + 1.0).abs() < 1e-15);
        assert!((w.entry(0, 2) - 2.0).abs() < 1e-15);
        assert!((w.entry(1, 3) - 2.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(w.entry(0, 3), 0.0);
        assert_eq!(w.entry(2, 3), 0.0);
        assert!(w.det().abs() < 1e-12);
        assert!(w.principal_minor(IndexSet::from_indices([0, 1])).abs() < 1e-15);
        match classify_domain(&w, 1e-9) {
            DomainClass::OnHypersurface(h) => {
                assert!(h.contains(&HypersurfaceId { set: IndexSet::full(4), sign: None }));
                assert!(h.contains(&HypersurfaceId {
                    set: IndexSet::from_indices([0, 1]),
                    sign: Some(Sign::Plus)
                }));
                assert_eq!(h.len(), 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn witness_rejects_bad_sizes() {
        assert!(witness_matrix(3, IndexSet::from_indices([0]), Sign::Plus).is_err());
        assert!(witness_matrix(3, IndexSet::from_indices([0, 1, 2]), Sign::Plus).is_err());
        assert!(witness_matrix(3, IndexSet::from_indices([0, 7]), Sign::Plus).is_err());
    }

    #[test]
    fn relabelled_witness() {
        let set = IndexSet::from_indices([1, 3, 4]);
        let w = witness_matrix(5, set, Sign::Minus).unwrap();
        assert!(w.det().abs() < 1e-10);
        assert!(w.principal_minor(set).abs() < 1e-10);
    }

    #[test]
    fn classify_regular_simplices() {
        let sph = RealGram::from_upper(4, |_, _| 1f64.cos());
        assert_eq!(classify_domain(&sph, 1e-9), DomainClass::SphericalSimplex);
        let hyp = RealGram::from_upper(4, |_, _| 1f64.cosh());
        assert_eq!(classify_domain(&hyp, 1e-9), DomainClass::HyperbolicSimplex);
        let other = RealGram::from_upper(3, |_, _| -0.9);
        assert_eq!(classify_domain(&other, 1e-9), DomainClass::OtherReal);
        let mut z = RealGram::identity(2).to_complex();
        z.set(0, 1, Complex64::new(0.5, 0.1));
        assert_eq!(classify_domain(&z, 1e-9), DomainClass::NonReal);
    }

    #[test]
    fn gram_from_single_and_pair() {
        let c = gram_from_vertices(&[vec![1.0, 0.0, 0.0, 0.0]], Space::Hyperbolic).unwrap();
        assert_eq!(c.size(), 1);
        let p = vec![1f64.cosh(), 1f64.sinh(), 0.0, 0.0];
        let c = gram_from_vertices(&[vec![1.0, 0.0, 0.0, 0.0], p], Space::Hyperbolic).unwrap();
        assert!((c.entry(0, 1) - 1f64.cosh()).abs() < 1e-15);
        assert!(gram_from_vertices(&[vec![2.0, 0.0]], Space::Hyperbolic).is_err());
        assert!(gram_from_vertices(&[vec![-1.0, 0.0]], Space::Hyperbolic).is_err());
    }

    #[test]
    fn identity_sphere_gives_standard_basis() {
        let v = vertices_from_gram(&RealGram::identity(4), Space::Sphere).unwrap();
        for (j, p) in v.iter().enumerate() {
            for (i, x) in p.iter().enumerate() {
                assert_eq!(*x, if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn regular_hyperbolic_triangle_vertices() {
        let c = RealGram::from_upper(3, |_, _| 1f64.cosh());
        let v = vertices_from_gram(&c, Space::Hyperbolic).unwrap();
        for j in 0..3 {
            assert!((minkowski_dot(&v[j], &v[j]) - 1.0).abs() < 1e-12);
            for k in j + 1..3 {
                assert!((minkowski_dot(&v[j], &v[k]) - 1f64.cosh()).abs() < 1e-12);
            }
        }
        assert!(vertices_from_gram(&c, Space::Sphere).is_err());
    }

    #[test]
    fn hypersurface_sign_rule() {
        assert!(HypersurfaceId::new(IndexSet::from_indices([0, 1]), None).is_err());
        assert!(HypersurfaceId::new(IndexSet::from_indices([0, 1, 2]), Some(Sign::Plus)).is_err());
        assert_eq!(HypersurfaceId::all(4).len(), 12 + 4 + 1);
    }
}
