use num_complex::Complex;
use proptest::prelude::*;
use sphere_sync::dynamics::{error_from_states, riccati_rhs, sphere_rhs, SphereConfiguration};
use sphere_sync::graph::{has_spanning_tree, laplacian, read_edge_list, write_edge_list, DEFAULT_RANK_TOL};
use sphere_sync::linalg::{kron, unvec, vec, Matrix};
use sphere_sync::spectra::{
    apply_lyapunov, apply_t, default_zero_tol, lambda2, laplacian_spectrum, match_spectra, predicted_spectrum_s0,
    project_onto_k, Spectrum, SpectrumMethod,
};
use sphere_sync::{Digraph64, Matrix64};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix64> {
    prop::collection::vec(-2.0..2.0f64, rows * cols).prop_map(move |v| Matrix::from_row_major(rows, cols, v).unwrap())
}

/// Sparse digraph with weights in [0.1, 3); may or may not have a spanning tree.
fn digraph(max_m: usize) -> impl Strategy<Value = Digraph64> {
    (2..=max_m).prop_flat_map(|m| {
        prop::collection::vec(prop::option::weighted(0.35, 0.1..3.0f64), m * m).prop_map(move |w| {
            let edges = w
                .into_iter()
                .enumerate()
                .filter_map(|(k, a)| a.map(|a| (k / m, k % m, a)))
                .filter(|(i, j, _)| i != j);
            Digraph64::from_edges(m, edges).unwrap()
        })
    })
}

fn skew(m: usize) -> impl Strategy<Value = Matrix64> {
    matrix(m, m).prop_map(|x| x.sub(&x.transpose()).unwrap())
}

fn configuration(m: usize, n: usize) -> impl Strategy<Value = SphereConfiguration<f64>> {
    matrix(m, n)
        .prop_filter("rows away from zero", |x| (0..x.rows()).all(|i| x.row(i).iter().map(|v| v * v).sum::<f64>() > 1e-3))
        .prop_map(|x| SphereConfiguration::projected(x, 0.0).unwrap())
}

fn with_configuration(max_m: usize, n: usize) -> impl Strategy<Value = (Digraph64, SphereConfiguration<f64>)> {
    digraph(max_m).prop_flat_map(move |g| {
        let m = g.m();
        (Just(g), configuration(m, n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn kronecker_vec_identity((a, b, c) in (1..5usize, 1..5usize, 1..5usize, 1..5usize)
        .prop_flat_map(|(p, q, r, s)| (matrix(p, q), matrix(q, r), matrix(r, s))))
    {
        let lhs = vec(&a.matmul(&b).unwrap().matmul(&c).unwrap());
        let rhs = kron(&c.transpose(), &a).matvec(&vec(&b)).unwrap();
        let diff = lhs.iter().zip(&rhs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(diff <= 1e-12, "{diff}");
        prop_assert_eq!(unvec(&vec(&b), b.rows(), b.cols()).unwrap(), b);
    }

    #[test]
    fn laplacian_rows_sum_to_zero_and_spectrum_is_conjugate_closed(g in digraph(7)) {
        let l = laplacian(&g);
        prop_assert!(l.row_sum_residual() <= 1e-12);
        let spec = laplacian_spectrum(&l, SpectrumMethod::Float).unwrap();
        prop_assert!(spec.conjugate_mismatch() <= 1e-8, "{}", spec.conjugate_mismatch());
        // Gershgorin: every eigenvalue has non-negative real part
        prop_assert!(spec.values().iter().all(|z| z.re >= -1e-9));
    }

    #[test]
    fn rank_test_agrees_with_reachability(g in digraph(8)) {
        prop_assert_eq!(has_spanning_tree(&g, DEFAULT_RANK_TOL), g.spanning_tree_root().is_some());
    }

    #[test]
    fn edge_list_round_trip(g in digraph(7)) {
        let back: Digraph64 = read_edge_list(&write_edge_list(&g)).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn projection_of_linearized_operator_is_lyapunov((g, x) in digraph(6).prop_flat_map(|g| {
        let m = g.m();
        (Just(g), skew(m))
    })) {
        let l = laplacian(&g);
        let t = project_onto_k(&apply_t(&l, &x).unwrap());
        let s = apply_lyapunov(&l, &x).unwrap();
        prop_assert!(t.max_abs_diff(&s).unwrap() <= 1e-12);
    }

    #[test]
    fn sphere_field_is_tangent((g, cfg) in with_configuration(6, 3)) {
        let v = sphere_rhs(&g, &cfg).unwrap();
        for i in 0..g.m() {
            let dot: f64 = cfg.state(i).iter().zip(v.row(i)).map(|(a, b)| a * b).sum();
            prop_assert!(dot.abs() <= 1e-14, "{dot}");
        }
    }

    #[test]
    fn error_field_is_symmetric_hollow((g, cfg) in with_configuration(6, 4)) {
        let e = error_from_states(&cfg);
        let d = riccati_rhs(&g, &e).unwrap();
        prop_assert!(d.max_abs_diff(&d.transpose()).unwrap() <= 1e-12);
        prop_assert!((0..g.m()).all(|i| d[(i, i)].abs() <= 1e-12));
    }

    #[test]
    fn scaling_the_weights_scales_the_spectrum(g in digraph(6), c in 0.2..5.0f64) {
        prop_assume!(has_spanning_tree(&g, DEFAULT_RANK_TOL));
        let l = laplacian(&g);
        let lc = laplacian(&g.scaled(&c).unwrap());
        let spec = laplacian_spectrum(&l, SpectrumMethod::Float).unwrap();
        let scaled = Spectrum::new(spec.values().iter().map(|z| z * c).collect());
        let (_, r) = match_spectra(&laplacian_spectrum(&lc, SpectrumMethod::Float).unwrap(), &scaled).unwrap();
        prop_assert!(r <= 1e-8 * c.max(1.0), "{r}");
        let l2 = lambda2(&spec, default_zero_tol(&l)).unwrap();
        let l2c = lambda2(&laplacian_spectrum(&lc, SpectrumMethod::Float).unwrap(), default_zero_tol(&lc)).unwrap();
        prop_assert!((l2c.re - c * l2.re).abs() <= 1e-7 * c.max(1.0));
    }

    #[test]
    fn slowest_symmetric_mode_is_twice_lambda2(g in digraph(7)) {
        prop_assume!(has_spanning_tree(&g, DEFAULT_RANK_TOL));
        let l = laplacian(&g);
        let spec = laplacian_spectrum(&l, SpectrumMethod::Float).unwrap();
        let zt = default_zero_tol(&l);
        let min_re = predicted_spectrum_s0(&spec, zt)
            .unwrap()
            .values()
            .iter()
            .map(|z: &Complex<f64>| z.re)
            .fold(f64::INFINITY, f64::min);
        prop_assert!((min_re - 2.0 * lambda2(&spec, zt).unwrap().re).abs() <= 1e-9);
    }
}
