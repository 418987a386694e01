#![allow(dead_code)]

use bellows::gram::{RealGram, Space};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Hyperboloid point over the Klein-ball point `u`.
pub fn lift_klein(u: &[f64]) -> Vec<f64> {
    let s = (1.0 - u.iter().map(|x| x * x).sum::<f64>()).sqrt();
    std::iter::once(1.0 / s).chain(u.iter().map(|x| x / s)).collect()
}

/// Unit-sphere point over the gnomonic-chart point `u`.
pub fn lift_gnomonic(u: &[f64]) -> Vec<f64> {
    let s = (1.0 + u.iter().map(|x| x * x).sum::<f64>()).sqrt();
    std::iter::once(1.0 / s).chain(u.iter().map(|x| x / s)).collect()
}

pub fn lift(u: &[f64], space: Space) -> Vec<f64> {
    match space {
        Space::Hyperbolic => lift_klein(u),
        Space::Sphere => lift_gnomonic(u),
    }
}

pub fn form(x: &[f64], y: &[f64], space: Space) -> f64 {
    let e: f64 = x[1..].iter().zip(&y[1..]).map(|(a, b)| a * b).sum();
    match space {
        Space::Hyperbolic => x[0] * y[0] - e,
        Space::Sphere => x[0] * y[0] + e,
    }
}

pub fn gram_of(points: &[Vec<f64>], space: Space) -> RealGram {
    RealGram::from_upper(points.len(), |j, k| form(&points[j], &points[k], space))
}

/// Euclidean determinant by Gaussian elimination.
pub fn det(mut a: Vec<Vec<f64>>) -> f64 {
    let m = a.len();
    let mut d = 1.0;
    for c in 0..m {
        let p = (c..m).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..m {
            let f = a[r][c] / a[c][c];
            for k in c..m {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    d
}

/// Euclidean volume of the chart simplex spanned by `u`, times `n!`.
pub fn chart_det(u: &[Vec<f64>]) -> f64 {
    let rows = u[1..].iter().map(|p| p.iter().zip(&u[0]).map(|(a, b)| a - b).collect()).collect();
    det(rows)
}

/// `n + 1` chart points in the ball of radius `r`, away from degeneracy.
pub fn random_chart_simplex(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<Vec<f64>> {
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    loop {
        let pts: Vec<Vec<f64>> = (0..=n)
            .map(|_| loop {
                let p: Vec<f64> = (0..n).map(|_| rng.random_range(-r..r)).collect();
                if p.iter().map(|x| x * x).sum::<f64>() < r * r {
                    break p;
                }
            })
            .collect();
        if chart_det(&pts).abs() / fact > 0.02 * r.powi(n as i32) {
            return pts;
        }
    }
}

pub fn random_simplex(rng: &mut ChaCha8Rng, n: usize, space: Space) -> (Vec<Vec<f64>>, RealGram) {
    let u = random_chart_simplex(rng, n, 0.6);
    let x: Vec<Vec<f64>> = u.iter().map(|p| lift(p, space)).collect();
    let c = gram_of(&x, space);
    (x, c)
}

pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = 0.5 * (1.0 - x);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Volume of a simplex given by chart points, by a collapsed tensor
/// Gauss–Legendre rule of order `m` against the chart density.
pub fn chart_volume(u: &[Vec<f64>], space: Space, m: usize) -> f64 {
    let n = u.len() - 1;
    let p = (n + 1) as f64 / 2.0;
    let density = |x: &[f64]| {
        let r2: f64 = x.iter().map(|a| a * a).sum();
        match space {
            Space::Hyperbolic => (1.0 - r2).powf(-p),
            Space::Sphere => (1.0 + r2).powf(-p),
        }
    };
    let e: Vec<Vec<f64>> = (1..=n).map(|j| (0..n).map(|i| u[j][i] - u[j - 1][i]).collect()).collect();
    let jac = chart_det(u).abs();
    let (nodes, weights) = gauss_legendre(m);
    let mut total = 0.0;
    let mut idx = vec![0usize; n];
    loop {
        // x = u0 + s1 e1 + s1 s2 e2 + ..., Jacobian s1^(n-1) s2^(n-2) ...
        let mut x = u[0].clone();
        let mut scale = 1.0;
        let mut w = 1.0;
        for (d, &q) in idx.iter().enumerate() {
            scale *= nodes[q];
            w *= weights[q] * nodes[q].powi((n - 1 - d) as i32);
            for i in 0..n {
                x[i] += scale * e[d][i];
            }
        }
        total += w * density(&x);
        let mut d = 0;
        loop {
            if d == n {
                return total * jac;
            }
            idx[d] += 1;
            if idx[d] < m {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Chart points of hyperboloid or sphere points (`x0 > 0` required).
pub fn to_chart(x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    x.iter().map(|p| p[1..].iter().map(|v| v / p[0]).collect()).collect()
}

/// Interior dihedral angle of the simplex `x` at `face` (all but two vertices),
/// from tangent vectors at a point of the face.
pub fn tangent_angle(x: &[Vec<f64>], face: &[usize], space: Space) -> f64 {
    let dim = x[0].len();
    let mut p = vec![0.0; dim];
    for &v in face {
        for i in 0..dim {
            p[i] += x[v][i];
        }
    }
    let s = form(&p, &p, space).sqrt();
    p.iter_mut().for_each(|v| *v /= s);
    let tangent_dot = |a: &[f64], b: &[f64]| match space {
        Space::Sphere => form(a, b, space),
        Space::Hyperbolic => -form(a, b, space),
    };
    let project = |y: &[f64]| {
        let t = form(y, &p, space);
        y.iter().zip(&p).map(|(a, b)| a - t * b).collect::<Vec<f64>>()
    };
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for &v in face {
        let mut t = project(&x[v]);
        for b in &basis {
            let d = tangent_dot(&t, b);
            t.iter_mut().zip(b).for_each(|(a, q)| *a -= d * q);
        }
        let nrm = tangent_dot(&t, &t).sqrt();
        if nrm > 1e-12 {
            basis.push(t.into_iter().map(|a| a / nrm).collect());
        }
    }
    let normal = |v: usize| {
        let mut t = project(&x[v]);
        for b in &basis {
            let d = tangent_dot(&t, b);
            t.iter_mut().zip(b).for_each(|(a, q)| *a -= d * q);
        }
        t
    };
    let rest: Vec<usize> = (0..x.len()).filter(|v| !face.contains(v)).collect();
    let (a, b) = (normal(rest[0]), normal(rest[1]));
    (tangent_dot(&a, &b) / (tangent_dot(&a, &a) * tangent_dot(&b, &b)).sqrt()).clamp(-1.0, 1.0).acos()
}

/// Checks the monodromy signs of the continued square roots and of the angle
/// forms after a closed loop; returns a description of the first mismatch.
pub fn check_sign_law(
    start: &bellows::continuation::ContinuationState,
    end: &bellows::continuation::ContinuationState,
    table: &[bellows::continuation::ComponentLink],
    dir: &bellows::linalg::Mat<num_complex::Complex64>,
    tol: f64,
) -> Result<(), String> {
    use bellows::gram::IndexSet;
    let lk = |set: IndexSet| table.iter().filter(|l| l.component.set == set).map(|l| l.lk).sum::<i64>();
    let sign = |k: i64| if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    for set in start.tracked_sets() {
        let (a, b) = (start.root(set), end.root(set));
        let want = a * sign(lk(set));
        if (b - want).norm() >= (b + want).norm() {
            return Err(format!("R_{set}: sign of {b} does not match {want}"));
        }
        if (b - want).norm() > tol * (1.0 + a.norm()) {
            return Err(format!("R_{set}: {b} vs {want}"));
        }
    }
    let n = start.n();
    if n >= 2 {
        let full = IndexSet::full(n + 1);
        for face in IndexSet::subsets(n + 1, n - 1) {
            let a = start.angle_form(face, dir).map_err(|e| e.to_string())?;
            let b = end.angle_form(face, dir).map_err(|e| e.to_string())?;
            let want = a * sign(lk(full) + lk(face));
            if (b - want).norm() >= (b + want).norm() {
                return Err(format!("dα_{face}: sign of {b} does not match {want}"));
            }
            if (b - want).norm() > tol * (1.0 + a.norm()) {
                return Err(format!("dα_{face}: {b} vs {want}"));
            }
        }
    }
    Ok(())
}

/// A fixed complex direction with zero diagonal.
pub fn probe_direction(size: usize) -> bellows::linalg::Mat<num_complex::Complex64> {
    bellows::linalg::Mat::from_fn(size, |j, k| {
        if j == k {
            num_complex::Complex64::new(0.0, 0.0)
        } else {
            let s = (j + k) as f64;
            num_complex::Complex64::new(0.3 + 0.1 * s, 0.05 * s - 0.1)
        }
    })
}

/// A convex octahedron: vertex `i` near `r e_i`, vertex `i + 3` near `-r e_i`.
pub fn convex_octahedron(seed: u64, r: f64) -> bellows::polyhedra::Configuration {
    let mut rng = rng(seed);
    let mut coords = Vec::new();
    for s in [1.0, -1.0] {
        for i in 0..3 {
            let mut u = [0.0; 3];
            u[i] = s * r * rng.random_range(0.8..1.2);
            for (j, v) in u.iter_mut().enumerate() {
                if j != i {
                    *v += rng.random_range(-0.05..0.05) * r;
                }
            }
            coords.push(bellows::polyhedra::from_klein(&u));
        }
    }
    bellows::polyhedra::Configuration::new(coords).unwrap()
}
