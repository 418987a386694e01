mod common;

use std::f64::consts::PI;

use bellows::gram::{gram_from_vertices, IndexSet, RealGram, Space};
use bellows::linalg::Mat;
use bellows::simplex_volume::{
    dihedral_angle, dihedral_angles, regular_simplex_gram, schlafli_form, schlafli_integrate, volume,
    volume_closed_low_dim, volume_oracle_quadrature,
};
use proptest::prelude::*;

// Collapsed Gauss–Legendre values in the Klein and gnomonic charts, orders 16..48 agreeing to 1e-15.
const REG_H3_EDGE_1: f64 = 0.090597925377724;
const REG_H3_EDGE_HALF: f64 = 0.013732899242835;
const REG_H4_EDGE_1: f64 = 0.015292834106056;
const REG_S3_EDGE_1: f64 = 0.162372516173200;

fn chart_oracle(c: &RealGram, space: Space) -> f64 {
    let x = bellows::gram::vertices_from_gram(c, space).unwrap();
    common::chart_volume(&common::to_chart(&x), space, 32)
}

#[test]
fn frozen_regular_volumes() {
    let cases = [
        (3, 1.0, Space::Hyperbolic, REG_H3_EDGE_1),
        (3, 0.5, Space::Hyperbolic, REG_H3_EDGE_HALF),
        (4, 1.0, Space::Hyperbolic, REG_H4_EDGE_1),
        (3, 1.0, Space::Sphere, REG_S3_EDGE_1),
    ];
    for (n, edge, space, want) in cases {
        let c = regular_simplex_gram(n, edge, space).unwrap();
        let v = volume(&c, space, 1e-10).unwrap();
        assert!((v.value - want).abs() < 1e-9, "n = {n}, edge {edge}: {} vs {want}", v.value);
        assert!((chart_oracle(&c, space) - want).abs() < 1e-13);
    }
}

#[test]
fn library_oracle_matches_test_oracle() {
    let c = regular_simplex_gram(3, 1.0, Space::Hyperbolic).unwrap();
    let r = volume_oracle_quadrature(&c, Space::Hyperbolic, 1e-10).unwrap();
    assert!((r.value - REG_H3_EDGE_1).abs() <= 1e-10 + r.error_estimate);
}

#[test]
fn closed_forms() {
    let c = regular_simplex_gram(1, 1.0, Space::Hyperbolic).unwrap();
    assert!((volume_closed_low_dim(&c, Space::Hyperbolic).unwrap().value - 1.0).abs() <= 2.0 * f64::EPSILON);
    let tri = RealGram::from_upper(3, |_, _| 2.0);
    let area = volume_closed_low_dim(&tri, Space::Hyperbolic).unwrap().value;
    assert!((area - (PI - 3.0 * (2.0f64 / 3.0).acos())).abs() < 1e-14);
    let octant = RealGram::identity(3);
    assert!((volume_closed_low_dim(&octant, Space::Sphere).unwrap().value - PI / 2.0).abs() < 1e-14);
    for a in dihedral_angles(&octant, Space::Sphere).unwrap() {
        assert!((a.value - PI / 2.0).abs() < 1e-15);
    }
    for a in dihedral_angles(&tri, Space::Hyperbolic).unwrap() {
        assert!((a.value - (2.0f64 / 3.0).acos()).abs() < 1e-14);
    }
}

#[test]
fn degenerate_spherical_regular_simplex_is_rejected() {
    assert!(regular_simplex_gram(3, PI, Space::Sphere).is_err());
    assert!(regular_simplex_gram(3, 0.0, Space::Hyperbolic).is_err());
}

#[test]
fn outside_chamber_is_a_domain_error() {
    let mut c = regular_simplex_gram(3, 1.0, Space::Hyperbolic).unwrap();
    c.set(0, 1, 0.5);
    assert!(volume(&c, Space::Hyperbolic, 1e-10).is_err());
    assert!(dihedral_angle(&c, IndexSet::from_indices([2, 3]), Space::Hyperbolic).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn angles_match_tangent_space_oracle(n in 2usize..=4, seed in any::<u64>(), sphere in any::<bool>()) {
        let space = if sphere { Space::Sphere } else { Space::Hyperbolic };
        let (x, c) = common::random_simplex(&mut common::rng(seed), n, space);
        for a in dihedral_angles(&c, space).unwrap() {
            let want = common::tangent_angle(&x, &a.face.to_vec(), space);
            prop_assert!(a.value > 0.0 && a.value < PI);
            prop_assert!((a.value - want).abs() < 1e-9, "{} vs {want}", a.value);
        }
    }

    #[test]
    fn sine_and_cosine_are_consistent(seed in any::<u64>()) {
        let (_, c) = common::random_simplex(&mut common::rng(seed), 3, Space::Hyperbolic);
        for face in IndexSet::subsets(4, 2) {
            let fm = c.face_minors(face).unwrap();
            let p = fm.first * fm.second;
            let cos2 = fm.mixed * fm.mixed / p;
            let sin2 = c.det() * fm.face / p;
            prop_assert!((cos2 + sin2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn triangle_area_matches_chart_oracle(seed in any::<u64>(), sphere in any::<bool>()) {
        let space = if sphere { Space::Sphere } else { Space::Hyperbolic };
        let (x, c) = common::random_simplex(&mut common::rng(seed), 2, space);
        let v = volume(&c, space, 1e-10).unwrap().value;
        let o = common::chart_volume(&common::to_chart(&x), space, 48);
        prop_assert!((v - o).abs() < 1e-10, "{v} vs {o}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn tetrahedron_volume_matches_chart_oracle(seed in any::<u64>(), sphere in any::<bool>()) {
        let space = if sphere { Space::Sphere } else { Space::Hyperbolic };
        let (x, c) = common::random_simplex(&mut common::rng(seed), 3, space);
        let v = volume(&c, space, 1e-10).unwrap();
        let o = common::chart_volume(&common::to_chart(&x), space, 40);
        prop_assert!((v.value - o).abs() < 1e-8 + v.error_estimate, "{} vs {o}", v.value);
    }

    #[test]
    fn schlafli_form_is_the_volume_gradient(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (_, c) = common::random_simplex(&mut rng, 3, Space::Hyperbolic);
        let (_, d) = common::random_simplex(&mut rng, 3, Space::Hyperbolic);
        let dir = c.direction_to(&d);
        let h = 1e-5 / dir.max_modulus();
        prop_assume!(bellows::gram::in_chamber(&c.lerp(&d, -h), Space::Hyperbolic));
        let at = |t: f64| volume(&c.lerp(&d, t), Space::Hyperbolic, 1e-12).unwrap().value;
        let fd = (at(h) - at(-h)) / (2.0 * h);
        let form = schlafli_form(&c, Space::Hyperbolic, &dir, 1e-12).unwrap();
        prop_assert!((fd - form).abs() <= 1e-5 * form.abs().max(1e-3), "{fd} vs {form}");
    }
}

#[test]
fn schlafli_difference_between_regular_simplices() {
    let a = regular_simplex_gram(3, 0.5, Space::Hyperbolic).unwrap();
    let b = regular_simplex_gram(3, 1.0, Space::Hyperbolic).unwrap();
    let d = schlafli_integrate(&[a, b], Space::Hyperbolic, 1e-11).unwrap();
    assert!((d - (REG_H3_EDGE_1 - REG_H3_EDGE_HALF)).abs() < 1e-10);
}

#[test]
fn schlafli_is_path_independent_and_exact_on_loops() {
    let space = Space::Hyperbolic;
    let a = regular_simplex_gram(3, 1.0, space).unwrap();
    let b = RealGram::from_upper(4, |j, k| space.edge_cosine(0.7 + 0.1 * (j + k) as f64));
    let m1 = RealGram::from_upper(4, |j, k| space.edge_cosine(1.1 + 0.05 * (j * k) as f64));
    let m2 = RealGram::from_upper(4, |j, k| space.edge_cosine(0.6 + 0.04 * (j + 2 * k) as f64));
    let tol = 1e-10;
    let p1 = schlafli_integrate(&[a.clone(), m1.clone(), b.clone()], space, tol).unwrap();
    let p2 = schlafli_integrate(&[a.clone(), m2.clone(), b.clone()], space, tol).unwrap();
    assert!((p1 - p2).abs() <= 2.0 * tol);
    let cycle = schlafli_integrate(&[a.clone(), m1, b, m2, a.clone()], space, tol).unwrap();
    assert!(cycle.abs() <= 2.0 * tol);
    assert_eq!(schlafli_integrate(&[a.clone(), a], space, tol).unwrap(), 0.0);
}

#[test]
fn volume_vanishes_toward_a_degenerate_simplex() {
    let u = vec![vec![0.1, 0.0, 0.0], vec![-0.2, 0.3, 0.05], vec![-0.15, -0.25, 0.1], vec![0.05, 0.02, 0.4]];
    let centroid: Vec<f64> = (0..3).map(|i| (u[0][i] + u[1][i] + u[2][i]) / 3.0).collect();
    let mut last = f64::INFINITY;
    for s in [0.0, 0.5, 0.9, 0.99, 0.999, 0.9999] {
        let mut w = u.clone();
        w[3] = (0..3).map(|i| (1.0 - s) * u[3][i] + s * centroid[i]).collect();
        let x: Vec<Vec<f64>> = w.iter().map(|p| common::lift_klein(p)).collect();
        let c = gram_from_vertices(&x, Space::Hyperbolic).unwrap();
        let v = volume(&c, Space::Hyperbolic, 1e-11).unwrap().value;
        assert!(v < last, "s = {s}: {v} >= {last}");
        last = v;
    }
    assert!(last < 1e-5);
}

fn cone_pieces(x: &[Vec<f64>], apex: &[f64]) -> Vec<Vec<Vec<f64>>> {
    (0..x.len())
        .map(|j| {
            let mut s = x.to_vec();
            s[j] = apex.to_vec();
            s
        })
        .collect()
}

#[test]
fn cone_decomposition_is_additive() {
    let mut rng = common::rng(7);
    for n in 1..=3 {
        for _ in 0..4 {
            let u = common::random_chart_simplex(&mut rng, n, 0.6);
            let w: Vec<f64> = {
                use rand::Rng;
                let raw: Vec<f64> = (0..=n).map(|_| rng.random_range(0.1..1.0)).collect();
                let t: f64 = raw.iter().sum();
                raw.into_iter().map(|r| r / t).collect()
            };
            let apex: Vec<f64> = (0..n).map(|i| (0..=n).map(|j| w[j] * u[j][i]).sum()).collect();
            let x: Vec<Vec<f64>> = u.iter().map(|p| common::lift_klein(p)).collect();
            let whole = volume(&gram_from_vertices(&x, Space::Hyperbolic).unwrap(), Space::Hyperbolic, 1e-12).unwrap();
            let parts: f64 = cone_pieces(&x, &common::lift_klein(&apex))
                .iter()
                .map(|s| volume(&gram_from_vertices(s, Space::Hyperbolic).unwrap(), Space::Hyperbolic, 1e-12).unwrap().value)
                .sum();
            assert!((whole.value - parts).abs() < 1e-9, "n = {n}: {} vs {parts}", whole.value);
        }
    }
}

#[test]
fn direction_is_symmetric_with_zero_diagonal() {
    let a = regular_simplex_gram(3, 1.0, Space::Hyperbolic).unwrap();
    let b = regular_simplex_gram(3, 1.2, Space::Hyperbolic).unwrap();
    let d: Mat<f64> = a.direction_to(&b);
    for j in 0..4 {
        assert_eq!(d[(j, j)], 0.0);
        for k in 0..4 {
            assert_eq!(d[(j, k)], d[(k, j)]);
        }
    }
}
