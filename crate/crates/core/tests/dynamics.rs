use std::f64::consts::PI;

use sphere_sync::dynamics::{
    error_from_states, initial_in_clusters, initial_near_consensus, integrate_phases, integrate_riccati, integrate_sphere,
    IntegratorOptions, SphereConfiguration,
};
use sphere_sync::graph::{generate, Family, GraphParams};
use sphere_sync::Digraph64;

fn cycle(m: usize) -> Digraph64 {
    generate(Family::DirectedCycle, m, &GraphParams::default()).unwrap()
}

fn wrap(x: f64) -> f64 {
    (x + PI).rem_euclid(2.0 * PI) - PI
}

#[test]
fn rk4_self_convergence_is_fourth_order() {
    let g: Digraph64 = generate(Family::RandomSpanningTreePlusEdges, 5, &GraphParams::seeded(2)).unwrap();
    let c0 = initial_near_consensus::<f64>(5, 3, 0.8, 4).unwrap();
    let end = |h: f64| {
        let tr = integrate_sphere(&g, &c0, &IntegratorOptions::new(h, 2.0)).unwrap();
        tr.last().unwrap().states().clone()
    };
    let (a, b, c) = (end(2e-2), end(1e-2), end(5e-3));
    let ratio = a.max_abs_diff(&b).unwrap() / b.max_abs_diff(&c).unwrap();
    assert!((12.0..20.0).contains(&ratio), "{ratio}");
}

#[test]
fn two_dimensional_states_follow_the_phase_model() {
    let g: Digraph64 = generate(Family::RandomSpanningTreePlusEdges, 5, &GraphParams::seeded(3)).unwrap();
    let theta0 = [0.3, -1.2, 2.0, 0.9, -2.5];
    let opts = IntegratorOptions::new(1e-3, 5.0);
    let sphere = integrate_sphere(&g, &SphereConfiguration::from_phases(&theta0, 0.0), &opts).unwrap();
    let phases = integrate_phases(&g, &theta0, &opts).unwrap();
    assert_eq!(sphere.times, phases.times);
    let worst = sphere
        .samples
        .iter()
        .zip(&phases.samples)
        .flat_map(|(c, th)| c.phases().into_iter().zip(th.clone()).map(|(a, b)| wrap(a - b).abs()))
        .fold(0.0, f64::max);
    assert!(worst <= 1e-6, "{worst}");
}

#[test]
fn error_flow_reproduces_sphere_flow() {
    let g = cycle(4);
    let c0 = initial_near_consensus::<f64>(4, 3, 0.5, 1).unwrap();
    let opts = IntegratorOptions::new(1e-3, 5.0);
    let sphere = integrate_sphere(&g, &c0, &opts).unwrap();
    let riccati = integrate_riccati(&g, &error_from_states(&c0), &opts).unwrap();
    let mut worst = 0.0f64;
    for (c, e) in sphere.samples.iter().zip(&riccati.samples) {
        worst = worst.max(error_from_states(c).entries().max_abs_diff(e.entries()).unwrap());
        assert!(e.entries().as_slice().iter().all(|&x| (-1e-12..=2.0 + 1e-6).contains(&x)));
    }
    assert!(worst <= 1e-5, "{worst}");
}

#[test]
fn cycle_synchronizes_and_disconnected_pair_does_not() {
    let opts = IntegratorOptions::new(1e-2, 40.0);
    let run = |g: &Digraph64, c0: &SphereConfiguration<f64>| {
        let tr = integrate_sphere(g, c0, &opts).unwrap();
        tr.last().unwrap().max_pairwise_distance() / c0.max_pairwise_distance()
    };
    let pair: Digraph64 = generate(Family::DisconnectedPair, 6, &GraphParams::default()).unwrap();
    let clustered = initial_in_clusters::<f64>(&pair.weak_components(), 3, 0.05, 7).unwrap();
    // Re λ₂ = 0.5 for the six-cycle
    assert!(run(&cycle(6), &clustered) < 1e-4);
    assert!(run(&pair, &clustered) > 0.5);
}

#[test]
fn initial_state_depends_only_on_seed() {
    let a = initial_near_consensus::<f64>(5, 4, 0.3, 42).unwrap();
    let b = initial_near_consensus::<f64>(5, 4, 0.3, 42).unwrap();
    assert_eq!(a.states().as_slice(), b.states().as_slice());
    let c = initial_near_consensus::<f32>(5, 4, 0.3, 42).unwrap();
    let diff = a.states().as_slice().iter().zip(c.states().as_slice()).map(|(x, y)| (x - *y as f64).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-6, "same stream in single precision: {diff}");
}
