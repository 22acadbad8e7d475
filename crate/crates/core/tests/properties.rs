mod common;

use cube_rigidity::gamma::gamma_by_product_rule;
use cube_rigidity::obata::{extension_residual, generalized_obata, lift_distance, obata_residual};
use cube_rigidity::rigidity::frobenius_distance_exact;
use cube_rigidity::*;
use proptest::prelude::*;
use rand::Rng;

use common::{distances, random_function, random_graph, rng};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

fn relabel(g: &WeightedGraph, perm: &[usize]) -> WeightedGraph {
    let name = |i: usize| format!("p{:02}", perm[i]);
    let vertices = (0..g.len()).map(|i| (name(i), g.measure_at(i))).collect();
    let edges = g.edges().into_iter().map(|(i, j, w)| (name(i), name(j), w)).collect();
    WeightedGraph::build(vertices, edges, false).unwrap()
}

fn scaled(g: &WeightedGraph, t: f64) -> WeightedGraph {
    let (vertices, edges) = g.to_parts();
    WeightedGraph::build(
        vertices.into_iter().map(|(id, m)| (id, m * t)).collect(),
        edges.into_iter().map(|(u, v, w)| (u, v, w * t)).collect(),
        false,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn gamma_formulas_agree(seed in any::<u64>(), n in 2usize..14) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.3);
        let f = random_function(&mut r, n);
        let h = random_function(&mut r, n);
        let a = gamma(&g, &f, &h).unwrap();
        let b = gamma_by_product_rule(&g, &f, &h).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn laplacian_is_self_adjoint(seed in any::<u64>(), n in 2usize..14) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.3);
        let f = random_function(&mut r, n);
        let h = random_function(&mut r, n);
        let lf = laplacian_apply(&g, &f).unwrap();
        let lh = laplacian_apply(&g, &h).unwrap();
        let m = g.measure();
        let a: f64 = (0..n).map(|x| lf[x] * h[x] * m[x]).sum();
        let b: f64 = (0..n).map(|x| f[x] * lh[x] * m[x]).sum();
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn cd_is_monotone(seed in any::<u64>(), n in 3usize..10) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.4);
        let (k, _) = curvature(&g, f64::INFINITY).unwrap();
        prop_assert!(cd_check(&g, k - 1e-6, f64::INFINITY).unwrap().holds);
        prop_assert!(cd_check(&g, k - 1.0, f64::INFINITY).unwrap().holds);
        prop_assert!(!cd_check(&g, k + 1e-6, f64::INFINITY).unwrap().holds);
        let (k_finite, _) = curvature(&g, 4.0).unwrap();
        prop_assert!(k_finite <= k + 1e-9);
        if cd_check(&g, k_finite, 4.0).unwrap().holds {
            prop_assert!(cd_check(&g, k_finite, f64::INFINITY).unwrap().holds);
        }
    }

    #[test]
    fn spectrum_invariant_under_relabeling_and_scaling(seed in any::<u64>(), n in 2usize..12) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.3);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, r.gen_range(0..=i));
        }
        let base = spectrum(&g).eigenvalues;
        let scale = r.gen_range(0.1..10.0);
        for other in [spectrum(&relabel(&g, &perm)).eigenvalues, spectrum(&scaled(&g, scale)).eigenvalues] {
            for (a, b) in base.iter().zip(&other) {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
            }
        }
        let (k1, _) = curvature(&g, f64::INFINITY).unwrap();
        let (k2, _) = curvature(&scaled(&g, scale), f64::INFINITY).unwrap();
        prop_assert!((k1 - k2).abs() <= 1e-8 * (1.0 + k1.abs()));
    }

    #[test]
    fn eigenpairs_solve_the_equation(seed in any::<u64>(), n in 2usize..14) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.3);
        let s = spectrum(&g);
        for (l, phi) in s.eigenvalues.iter().zip(&s.eigenfunctions) {
            let lphi = laplacian_apply(&g, phi).unwrap();
            for x in 0..n {
                prop_assert!((lphi[x] + l * phi[x]).abs() <= 1e-9 * (1.0 + l));
            }
            prop_assert!((s.norm(phi) - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn projection_is_optimal(seed in any::<u64>(), n in 4usize..12) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.3);
        let s = spectrum(&g);
        let level = g.max_degree().min(n - 1);
        let x0 = r.gen_range(0..n);
        let f = distances(&g, x0);
        let best = generalized_obata(&g, &s, x0, level).unwrap();
        for _ in 0..10 {
            let u = s.combine(&random_function(&mut r, level + 1), 0);
            let diff: Vec<f64> = f.iter().zip(&u).map(|(a, b)| a - b).collect();
            prop_assert!(best <= s.norm(&diff) + 1e-12);
        }
    }

    #[test]
    fn frobenius_is_a_pseudometric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let graphs: Vec<WeightedGraph> = (0..3).map(|_| {
            let n = r.gen_range(2..=5);
            random_graph(&mut r, n, 0.5)
        }).collect();
        let d = |a: &WeightedGraph, b: &WeightedGraph| frobenius_distance_exact(a, b).unwrap();
        let (a, b, c) = (&graphs[0], &graphs[1], &graphs[2]);
        prop_assert!(d(a, a) == 0.0);
        prop_assert!((d(a, b) - d(b, a)).abs() <= 1e-12);
        prop_assert!(d(a, c) <= d(a, b) + d(b, c) + 1e-12);
    }
}

#[test]
fn extension_identity_on_geodesics() {
    let mut r = rng(77);
    let mut checked = 0;
    for _ in 0..50 {
        let n = r.gen_range(4..=14);
        let g = random_graph(&mut r, n, 0.2);
        for x0 in 0..n {
            let f = distances(&g, x0);
            for x in 0..n {
                let dx = distances(&g, x);
                for z in (0..n).filter(|&z| dx[z] == 2.0 && f[z] == f[x] + 2.0) {
                    assert!(extension_residual(&g, &f, x, z).unwrap() <= 1e-12);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn products_of_cubes() {
    for (a, b) in [(0.5, 1.0), (1.0, 1.0), (2.0, 0.75)] {
        let g = cartesian_product(&hypercube(2, a).unwrap(), &hypercube(1, b).unwrap()).unwrap();
        let (k, _) = curvature(&g, f64::INFINITY).unwrap();
        assert!((k - 2.0 * f64::min(a, b)).abs() < 1e-6, "{a} {b}: {k}");
    }
    let cube = hypercube(3, 1.0).unwrap();
    let product = cartesian_product(&hypercube(2, 1.0).unwrap(), &hypercube(1, 1.0).unwrap()).unwrap();
    assert!(detect_hypercube(&product).is_some());
    let (d, _) = frobenius_distance_to_cube(&product, 2.0).unwrap();
    assert!(d < 1e-12);
    assert_eq!(spectrum(&product).eigenvalues.len(), spectrum(&cube).eigenvalues.len());
}

#[test]
fn lift_reproduces_distance_on_cubes() {
    for d in 1..=4 {
        for k in [1.0, 2.0, 5.0] {
            let g = hypercube(d, k / 2.0).unwrap();
            let s = spectrum(&g);
            for x in 0..g.len() {
                assert!(lift_distance(&g, &s, x).unwrap().sup_error <= 1e-8);
                assert!(obata_residual(&g, &s, x).unwrap() <= 1e-8);
            }
        }
    }
}

#[test]
fn measure_normalization_keeps_curvature() {
    let g = hypercube(3, 1.0).unwrap().perturb(0.1, 0.3, 4).unwrap();
    let (vertices, edges) = g.to_parts();
    let raw = WeightedGraph::build(
        vertices.iter().map(|(id, m)| (id.clone(), m * 3.0)).collect(),
        edges.iter().map(|(u, v, w)| (u.clone(), v.clone(), w * 3.0)).collect(),
        true,
    )
    .unwrap();
    let pivot = raw.normalization_vertex();
    assert_eq!(raw.measure_at(pivot), 1.0);
    assert!((raw.measure_scale() * 3.0 * g.measure_at(pivot) - 1.0).abs() < 1e-12);
    let (k1, _) = curvature(&g, f64::INFINITY).unwrap();
    let (k2, _) = curvature(&raw, f64::INFINITY).unwrap();
    assert!((k1 - k2).abs() < 1e-9);
}
