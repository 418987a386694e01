//! Deterministic adaptive quadrature: Gauss–Kronrod on intervals and
//! collapsed-cube Gauss–Legendre rules on simplices.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// A quadrature value with its estimated absolute error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_m and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { x } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = mf * (x * pm - pm1) / (x * x - 1.0);
            let dx = pm / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[m - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[m - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod / 7-point Gauss evaluation on `[a, b]`.
pub fn gauss_kronrod_15<F>(f: &mut F, a: f64, b: f64) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x)? + f(c + x)?;
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Ok(Estimate {
        value: kron * h,
        error: ((kron - gauss) * h).abs(),
    })
}

struct Piece<R> {
    est: Estimate,
    region: R,
}

impl<R> PartialEq for Piece<R> {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl<R> Eq for Piece<R> {}
impl<R> PartialOrd for Piece<R> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<R> Ord for Piece<R> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`, bisecting
/// the interval with the largest error until the total error is at most `tol`.
pub fn integrate_interval<F>(mut f: F, a: f64, b: f64, tol: f64, max_intervals: usize) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    let first = gauss_kronrod_15(&mut f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Piece { est: first, region: (a, b) });
    let mut total = first;
    while !(total.error <= tol) {
        if !total.error.is_finite() {
            return Err(Error::numeric("interval quadrature produced a non-finite value"));
        }
        if heap.len() >= max_intervals {
            return Err(Error::Numeric {
                message: format!(
                    "interval quadrature did not reach {tol:e} (error {:e}) within {max_intervals} pieces",
                    total.error
                ),
                best_estimate: Some(total.value),
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let (lo, hi) = worst.region;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            heap.push(worst);
            break;
        }
        let left = gauss_kronrod_15(&mut f, lo, mid)?;
        let right = gauss_kronrod_15(&mut f, mid, hi)?;
        total.value += left.value + right.value - worst.est.value;
        total.error += left.error + right.error - worst.est.error;
        heap.push(Piece { est: left, region: (lo, mid) });
        heap.push(Piece { est: right, region: (mid, hi) });
    }
    // re-sum to shed accumulated cancellation from the running updates
    let value = heap.iter().map(|p| p.est.value).sum();
    let error = heap.iter().map(|p| p.est.error).sum();
    Ok(Estimate { value, error })
}

/// Tensor rule on the cube pulled back to a simplex by the collapsed (Duffy) map.
struct SimplexRule {
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl SimplexRule {
    fn new(dim: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let count = order.pow(dim as u32);
        let mut points = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        let mut idx = vec![0usize; dim];
        for _ in 0..count {
            let u: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
            let mut wt: f64 = idx.iter().map(|&i| w[i]).product();
            for (k, uk) in u.iter().enumerate() {
                wt *= uk.powi((dim - 1 - k) as i32);
            }
            points.push(u);
            weights.push(wt);
            for slot in idx.iter_mut() {
                *slot += 1;
                if *slot < order {
                    break;
                }
                *slot = 0;
            }
        }
        SimplexRule { dim, points, weights }
    }

    /// Integrates over the simplex with the given barycentric vertices (each of
    /// length `dim + 1`), measured in the coordinates `lambda_1..lambda_dim`.
    fn apply(&self, verts: &[Vec<f64>], jac: f64, f: &mut impl FnMut(&[f64]) -> f64, buf: &mut [f64]) -> f64 {
        let d = self.dim;
        let width = d + 1;
        let mut acc = 0.0;
        for (u, w) in self.points.iter().zip(&self.weights) {
            // x = p0 + u1 (p1 - p0 + u2 (p2 - p1 + ...))
            for c in 0..width {
                let mut t = verts[d][c] - verts[d - 1][c];
                for k in (1..d).rev() {
                    t = verts[k][c] - verts[k - 1][c] + u[k] * t;
                }
                buf[c] = verts[0][c] + u[0] * t;
            }
            acc += w * f(buf);
        }
        acc * jac
    }
}

fn simplex_jacobian(verts: &[Vec<f64>]) -> f64 {
    let d = verts.len() - 1;
    let m = crate::linalg::Mat::from_fn(d, |i, j| verts[i + 1][j + 1] - verts[0][j + 1]);
    crate::linalg::Scalar::modulus(m.det())
}

/// Adaptive integration over the standard simplex `{lambda >= 0, sum lambda = 1}`
/// of dimension `dim`, with respect to Lebesgue measure in `lambda_1..lambda_dim`.
///
/// Regions are split across their longest edge; the error of a region is the
/// difference between two collapsed Gauss–Legendre rules of different order.
pub fn integrate_simplex<F>(dim: usize, mut f: F, target_err: f64, max_regions: usize) -> Result<Estimate>
where
    F: FnMut(&[f64]) -> f64,
{
    if dim == 0 {
        let v = f(&[1.0]);
        return Ok(Estimate { value: v, error: 0.0 });
    }
    let (high, low) = match dim {
        1 => (20, 12),
        2 => (12, 8),
        3 => (9, 6),
        _ => (7, 5),
    };
    let rh = SimplexRule::new(dim, high);
    let rl = SimplexRule::new(dim, low);
    let mut buf = vec![0.0; dim + 1];
    let eval = |verts: Vec<Vec<f64>>, f: &mut F, buf: &mut [f64]| -> Piece<Vec<Vec<f64>>> {
        let jac = simplex_jacobian(&verts);
        let qh = rh.apply(&verts, jac, f, buf);
        let ql = rl.apply(&verts, jac, f, buf);
        Piece {
            est: Estimate {
                value: qh,
                error: (qh - ql).abs(),
            },
            region: verts,
        }
    };
    let standard: Vec<Vec<f64>> = (0..=dim)
        .map(|i| (0..=dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let first = eval(standard, &mut f, &mut buf);
    let mut total = first.est;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    while !(total.error <= target_err) {
        if !total.error.is_finite() {
            return Err(Error::numeric("simplex quadrature produced a non-finite value"));
        }
        if heap.len() >= max_regions {
            let value = heap.iter().map(|p| p.est.value).sum();
            return Err(Error::Numeric {
                message: format!(
                    "simplex quadrature did not reach {target_err:e} (error {:e}) within {max_regions} regions",
                    total.error
                ),
                best_estimate: Some(value),
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let verts = worst.region;
        let (mut bi, mut bj, mut best) = (0, 1, -1.0);
        for i in 0..=dim {
            for j in i + 1..=dim {
                let l: f64 = verts[i].iter().zip(&verts[j]).map(|(a, b)| (a - b).powi(2)).sum();
                if l > best {
                    best = l;
                    bi = i;
                    bj = j;
                }
            }
        }
        let mid: Vec<f64> = verts[bi].iter().zip(&verts[bj]).map(|(a, b)| 0.5 * (a + b)).collect();
        let mut left = verts.clone();
        left[bj] = mid.clone();
        let mut right = verts;
        right[bi] = mid;
        let pl = eval(left, &mut f, &mut buf);
        let pr = eval(right, &mut f, &mut buf);
        total.value += pl.est.value + pr.est.value - worst.est.value;
        total.error += pl.est.error + pr.est.error - worst.est.error;
        heap.push(pl);
        heap.push(pr);
    }
    let value = heap.iter().map(|p| p.est.value).sum();
    let error = heap.iter().map(|p| p.est.error).sum();
    Ok(Estimate { value, error })
}
