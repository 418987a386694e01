mod common;

use bellows::gram::{
    classify_domain, gram_from_vertices, jacobi_residual, minor, minor_gradient, vertices_from_gram,
    witness_matrix, ComplexGram, DomainClass, HypersurfaceId, IndexSet, RealGram, Sign, Space,
};
use bellows::simplex_volume::regular_simplex_gram;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

/// Index of `(j, k)`, `j < k`, in row-major upper-triangular order.
fn upper(size: usize, j: usize, k: usize) -> usize {
    j * size - j * (j + 1) / 2 + (k - j - 1)
}

fn real_gram(size: usize, entries: &[f64]) -> RealGram {
    RealGram::from_upper(size, |j, k| entries[upper(size, j, k)])
}

fn sym_entries(max: usize) -> impl Strategy<Value = (usize, Vec<f64>)> {
    (3usize..=max).prop_flat_map(|size| (Just(size), prop::collection::vec(-3.0f64..3.0, size * (size - 1) / 2)))
}

proptest! {
    #[test]
    fn jacobi_vanishes_on_real_matrices((size, e) in sym_entries(5)) {
        let c = real_gram(size, &e);
        let bound = 1e-10 * (1.0 + c.norm().powi(4));
        for face in IndexSet::subsets(size, size - 2) {
            prop_assert!(jacobi_residual(&c, face).unwrap().abs() <= bound);
        }
    }

    #[test]
    fn jacobi_vanishes_on_complex_matrices((size, e) in sym_entries(5), im in prop::collection::vec(-3.0f64..3.0, 10)) {
        let c = ComplexGram::from_upper(size, |j, k| {
            let q = upper(size, j, k);
            Complex64::new(e[q], im[q % im.len()])
        });
        let bound = 1e-10 * (1.0 + c.norm().powi(4));
        for face in IndexSet::subsets(size, size - 2) {
            prop_assert!(jacobi_residual(&c, face).unwrap().norm() <= bound);
        }
    }

    #[test]
    fn edge_minors_factor((size, e) in sym_entries(5)) {
        let c = real_gram(size, &e);
        for s in IndexSet::subsets(size, 2) {
            let v = s.to_vec();
            let x = c.entry(v[0], v[1]);
            prop_assert!((minor(&c, s, s).unwrap() - (1.0 + x) * (1.0 - x)).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_minors_are_transposes((size, e) in sym_entries(5), a in 0u32..32, b in 0u32..32) {
        let c = real_gram(size, &e);
        let mask = (1u32 << size) - 1;
        let (i, j) = (IndexSet::from_bits(a & mask), IndexSet::from_bits(b & mask));
        if i.len() == j.len() {
            let x = minor(&c, i, j).unwrap();
            let y = minor(&c, j, i).unwrap();
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
        } else {
            prop_assert!(minor(&c, i, j).is_err());
        }
    }

    #[test]
    fn gradient_matches_finite_differences((size, e) in sym_entries(5), bits in 3u32..32) {
        let c = real_gram(size, &e);
        let set = IndexSet::from_bits(bits & ((1 << size) - 1));
        prop_assume!(set.len() >= 2);
        let g = minor_gradient(&c, set);
        let h = 1e-6;
        let mut q = 0;
        for j in 0..size {
            for k in j + 1..size {
                let mut p = c.clone();
                let mut m = c.clone();
                p.set(j, k, c.entry(j, k) + h);
                m.set(j, k, c.entry(j, k) - h);
                let fd = (p.principal_minor(set) - m.principal_minor(set)) / (2.0 * h);
                prop_assert!((fd - g[q]).abs() <= 1e-6 * (1.0 + g[q].abs()), "{fd} vs {}", g[q]);
                q += 1;
            }
        }
    }

    #[test]
    fn hyperbolic_round_trip(n in 1usize..=4, seed in any::<u64>()) {
        let (_, c) = common::random_simplex(&mut common::rng(seed), n, Space::Hyperbolic);
        let x = vertices_from_gram(&c, Space::Hyperbolic).unwrap();
        prop_assert_eq!(&x[0][..], &{ let mut e = vec![0.0; n + 1]; e[0] = 1.0; e }[..]);
        for (j, p) in x.iter().enumerate() {
            prop_assert!(p[j + 1..].iter().all(|&v| v == 0.0));
            prop_assert!(p[0] > 0.0);
        }
        let back = gram_from_vertices(&x, Space::Hyperbolic).unwrap();
        for j in 0..=n {
            for k in 0..=n {
                prop_assert!((back.entry(j, k) - c.entry(j, k)).abs() <= 1e-10 * c.entry(j, k).abs().max(1.0));
            }
        }
    }

    #[test]
    fn spherical_round_trip(n in 1usize..=4, seed in any::<u64>()) {
        let (_, c) = common::random_simplex(&mut common::rng(seed), n, Space::Sphere);
        let x = vertices_from_gram(&c, Space::Sphere).unwrap();
        let back = gram_from_vertices(&x, Space::Sphere).unwrap();
        for j in 0..=n {
            for k in 0..=n {
                prop_assert!((back.entry(j, k) - c.entry(j, k)).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn regular_hyperbolic_simplices_classify(n in 1usize..=4, edge in 1e-3f64..=2.0) {
        let c = regular_simplex_gram(n, edge, Space::Hyperbolic).unwrap();
        prop_assert_eq!(classify_domain(&c, 0.0), DomainClass::HyperbolicSimplex);
    }

    #[test]
    fn regular_spherical_simplices_match_eigenvalue_oracle(n in 1usize..=4, edge in 1e-2f64..=2.0) {
        let x = edge.cos();
        let size = n + 1;
        let eig = DMatrix::from_fn(size, size, |j, k| if j == k { 1.0 } else { x }).symmetric_eigenvalues();
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assume!(min.abs() > 1e-6);
        match regular_simplex_gram(n, edge, Space::Sphere) {
            Ok(c) => {
                prop_assert!(min > 0.0);
                prop_assert_eq!(classify_domain(&c, 0.0), DomainClass::SphericalSimplex);
            }
            Err(_) => prop_assert!(min < 0.0),
        }
    }
}

fn witness_cases(max_n: usize) -> Vec<(usize, IndexSet, Sign)> {
    let mut out = Vec::new();
    for n in 3..=max_n {
        for k in 2..n {
            for set in IndexSet::subsets(n + 1, k) {
                for sigma in [Sign::Plus, Sign::Minus] {
                    if k > 2 && sigma == Sign::Minus {
                        continue;
                    }
                    out.push((n, set, sigma));
                }
            }
        }
    }
    out
}

#[test]
fn witness_lies_on_exactly_two_components() {
    for (n, set, sigma) in witness_cases(5) {
        let c = witness_matrix(n, set, sigma).unwrap();
        let full = HypersurfaceId::new(IndexSet::full(n + 1), None).unwrap();
        let own = HypersurfaceId::new(set, (set.len() == 2).then_some(sigma)).unwrap();
        let mut on: Vec<_> = HypersurfaceId::all(n + 1)
            .into_iter()
            .filter(|h| h.equation(&c).abs() <= 1e-10)
            .collect();
        on.sort();
        let mut want = vec![full, own];
        want.sort();
        assert_eq!(on, want, "n = {n}, I = {set}");
        for h in HypersurfaceId::all(n + 1) {
            if !want.contains(&h) {
                assert!(h.equation(&c).abs() >= 1e-6, "n = {n}, I = {set}, {h}");
            }
        }
        match classify_domain(&c, 1e-10) {
            DomainClass::OnHypersurface(mut hits) => {
                hits.sort();
                assert_eq!(hits, want);
            }
            other => panic!("witness classified as {other:?}"),
        }
    }
}

#[test]
fn witness_n3_k2_example() {
    let c = witness_matrix(3, IndexSet::from_indices([0, 1]), Sign::Plus).unwrap();
    assert_eq!(c.entry(0, 1), -1.0);
    assert_eq!(c.entry(0, 2), 2.0);
    assert!((c.entry(1, 3) - 2.0 / 3f64.sqrt()).abs() < 1e-15);
    assert!(minor(&c, IndexSet::from_indices([0, 1]), IndexSet::from_indices([0, 1])).unwrap().abs() < 1e-15);
}

#[test]
fn identity_minors() {
    let c = RealGram::identity(5);
    for bits in 0..32u32 {
        let s = IndexSet::from_bits(bits);
        assert_eq!(minor(&c, s, s).unwrap(), 1.0);
    }
}

#[test]
fn hyperboloid_pair_gives_cosh() {
    let p = vec![vec![1.0, 0.0, 0.0, 0.0], vec![1f64.cosh(), 1f64.sinh(), 0.0, 0.0]];
    let c = gram_from_vertices(&p, Space::Hyperbolic).unwrap();
    assert!((c.entry(0, 1) - 1f64.cosh()).abs() < 1e-15);
}

#[test]
fn off_shell_points_are_rejected() {
    let p = vec![vec![1.0, 0.0, 0.0], vec![1.0, 0.5, 0.0]];
    assert!(gram_from_vertices(&p, Space::Hyperbolic).is_err());
    let lower = vec![vec![-1.0, 0.0, 0.0]];
    assert!(gram_from_vertices(&lower, Space::Hyperbolic).is_err());
}

#[test]
fn wrong_chamber_is_rejected() {
    let c = regular_simplex_gram(3, 1.0, Space::Hyperbolic).unwrap();
    assert!(vertices_from_gram(&c, Space::Sphere).is_err());
}

#[test]
fn non_real_matrices_classify_as_non_real() {
    let mut c = RealGram::identity(3).to_complex();
    c.set(0, 1, Complex64::new(0.5, 0.1));
    assert_eq!(classify_domain(&c, 1e-9), DomainClass::NonReal);
}
