use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sphereflow::dualflow::{
    compare_traces, decomposition_residual, dual_run, g_operator, gamma_transform, profile_from_support,
    spherical_radius, support_closure, support_from_profile, tilde_radius, DualState,
};
use sphereflow::flow::{run, speed, FlowConfig, InitialShape, Termination};
use sphereflow::hypersurface::{geometry, PolarGrid, RadialProfile};
use sphereflow::Error;

fn profile(n: usize, nodes: usize, f: impl Fn(f64) -> f64) -> RadialProfile<f64> {
    RadialProfile::from_fn(PolarGrid::<f64>::uniform(n, nodes).unwrap(), f).unwrap()
}

/// Mildly perturbed convex profiles from a fixed seed.
fn random_convex(rng: &mut ChaCha8Rng, n: usize, nodes: usize) -> RadialProfile<f64> {
    let r0 = rng.random_range(0.4..1.1);
    let a = rng.random_range(-0.04..0.04);
    let b = rng.random_range(-0.01..0.01);
    profile(n, nodes, move |t| r0 + a * (2.0 * t).cos() + b * (4.0 * t).cos())
}

#[test]
fn gamma_transform_examples() {
    let p = RadialProfile::sphere(2, 17, 0.6f64).unwrap();
    let (gamma, rt) = gamma_transform(&p).unwrap();
    for (g, r) in gamma.iter().zip(&rt) {
        assert!((g.exp() - r).abs() < 1e-15);
        assert!((r - (0.3f64).tan()).abs() < 1e-15);
    }
}

#[test]
fn decomposition_identity_holds_to_roundoff() {
    for n in 2..6 {
        let sphere = RadialProfile::sphere(n, 65, 0.9f64).unwrap();
        assert!(decomposition_residual(&sphere).unwrap() <= 1e-12);
        let p = profile(n, 256, |t| 0.8 + 0.05 * (2.0 * t).cos());
        let r = decomposition_residual(&p).unwrap();
        assert!(r <= 1e-10, "n={n}: {r}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let n = rng.random_range(2..6);
        let p = random_convex(&mut rng, n, 129);
        assert!(decomposition_residual(&p).unwrap() <= 1e-10);
    }
}

#[test]
fn euclidean_graph_is_strictly_convex() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..10 {
        let n = rng.random_range(2..6);
        let p = random_convex(&mut rng, n, 129);
        assert!(geometry(&p, 0).unwrap().min_lambda() > 0.0);
        let d = DualState::from_profile(&p).unwrap();
        assert!(d.nodes().iter().all(|x| x.h_tilde.0 > 0.0 && x.h_tilde.1 > 0.0));
    }
}

#[test]
fn closure_round_trip() {
    for n in [2, 3, 5] {
        let p = profile(n, 129, |t| 0.8 + 0.05 * (2.0 * t).cos());
        let s = geometry(&p, 0).unwrap();
        let d = DualState::from_profile(&p).unwrap();
        for (j, (x, g)) in d.nodes().iter().zip(s.nodes()).enumerate() {
            assert!((x.rho - g.rho).abs() <= 1e-8);
            assert!((x.phi - g.phi).abs() <= 1e-8);
            assert!((x.phi_prime - g.phi_prime).abs() <= 1e-8);
            assert!((x.omega - g.omega_speed).abs() <= 1e-8);
            assert!((x.phi * x.phi + x.phi_prime * x.phi_prime - 1.0).abs() <= 1e-14);
            if !x.at_pole {
                // parallel eigenvalue of W from the support function alone
                let t = x.theta_normal;
                let w_ang = x.u_t * t.cos() / t.sin() + x.u;
                assert!((w_ang - x.w.1).abs() <= 1e-8 * x.w.1, "node {j}");
            }
        }
    }
}

#[test]
fn sampled_closure_is_second_order() {
    // exact ρ at the point carried by each normal: θ = θ_ν + arctan(ũ_θ/ũ)
    let exact = |t: f64| 0.8 + 0.05 * (2.0 * t).cos();
    let gap = |nodes: usize| {
        let p = profile(3, nodes, exact);
        let u = support_from_profile(&p).unwrap();
        let d = support_closure(p.grid(), &u).unwrap();
        d.nodes()
            .iter()
            .map(|x| (x.rho - exact(x.theta_normal + (x.u_t / x.u).atan())).abs())
            .fold(0.0, f64::max)
    };
    let (a, b, c) = (gap(33), gap(65), gap(129));
    assert!((a / b).log2() > 1.9 && (b / c).log2() > 1.9, "{a} {b} {c}");
}

#[test]
fn support_transfer_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..5 {
        let p = random_convex(&mut rng, 2, 129);
        let back = profile_from_support(p.grid(), &support_from_profile(&p).unwrap()).unwrap();
        let gap = p
            .rho()
            .iter()
            .zip(back.rho())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(gap < 1e-10, "{gap}");
    }
}

#[test]
fn g_vanishes_on_spheres() {
    for r in [0.2f64, 0.7, 1.3] {
        let p = RadialProfile::sphere(3, 33, r).unwrap();
        let d = DualState::from_profile(&p).unwrap();
        for k in 0..3 {
            assert!(g_operator(&d, k).unwrap().iter().all(|g| g.abs() < 1e-13));
        }
    }
}

#[test]
fn hemisphere_shift_annihilates_weingarten() {
    // ρ = π/2: h̃ = id and the shift is −1, so the argument of F is zero
    let n = 3;
    let grid = PolarGrid::<f64>::uniform(n, 17).unwrap();
    let d = support_closure(&grid, &[1.0; 17]).unwrap();
    for x in d.nodes() {
        assert!(x.phi_prime.abs() < 1e-15);
        assert!((x.h_tilde.0 + x.shift()).abs() < 1e-12);
    }
    assert!(matches!(g_operator(&d, n - 1), Err(Error::ConeViolation { .. })));
    assert!(g_operator(&d, 0).unwrap().iter().all(|g| g.abs() < 1e-12));
}

#[test]
fn g_matches_transported_primal_speed() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let n = rng.random_range(2..6);
        let k = rng.random_range(0..n);
        let p = random_convex(&mut rng, n, 65);
        let f = speed(&geometry(&p, k).unwrap());
        let d = DualState::from_profile(&p).unwrap();
        let g = g_operator(&d, k).unwrap();
        for (j, x) in d.nodes().iter().enumerate() {
            let transported = x.u / x.rho_tilde * (x.rho_tilde / x.phi * f[j] * x.omega);
            assert!((g[j] - transported).abs() <= 1e-12);
        }
    }
}

fn coarse(nodes: usize, t_max: f64) -> FlowConfig {
    let mut cfg = FlowConfig::standard();
    cfg.nodes = nodes;
    cfg.t_max = t_max;
    cfg
}

#[test]
fn dual_trace_tracks_primal_at_second_order() {
    let gaps: Vec<_> = [32, 64, 128]
        .iter()
        .map(|&nodes| {
            let cfg = coarse(nodes, 1.0);
            let a = run(&cfg).unwrap();
            let b = dual_run(&cfg).unwrap();
            assert!(b.breakdown_time.is_none());
            let c = compare_traces(&a.trace, &b.trace);
            assert_eq!(c.matched, 101);
            c
        })
        .collect();
    for w in gaps.windows(2) {
        assert!((w[0].max_quermass_gap / w[1].max_quermass_gap).log2() > 1.8, "{gaps:?}");
        assert!((w[0].max_rho_gap / w[1].max_rho_gap).log2() > 1.8, "{gaps:?}");
    }
}

#[test]
fn strong_perturbation_reports_outcome() {
    let mut cfg = coarse(64, 20.0);
    cfg.initial_shape = InitialShape::Perturbed {
        r0: 0.8,
        eps: 0.12,
        mode: 2,
    };
    let out = dual_run(&cfg).unwrap();
    match out.termination {
        Termination::Converged => assert!(out.breakdown_time.is_none()),
        Termination::TimeLimit => panic!("no outcome within the time limit"),
        _ => assert_eq!(out.breakdown_time, Some(out.final_time)),
    }
    assert!(out.min_eig_w_seen > 0.0);
}

#[test]
fn dual_runs_are_deterministic() {
    let cfg = coarse(48, 0.2);
    let render = || {
        let mut buf = Vec::new();
        dual_run(&cfg).unwrap().write_csv(&mut buf).unwrap();
        buf
    };
    assert_eq!(render(), render());
}

proptest! {
    #[test]
    fn tilde_radius_round_trip(rho in 1e-6f64..std::f64::consts::FRAC_PI_2) {
        let back = spherical_radius(tilde_radius(rho).unwrap());
        prop_assert!((back - rho).abs() <= 1e-14);
    }

    #[test]
    fn omega_dual_at_least_one(eps in -0.06f64..0.06, r0 in 0.3f64..1.2) {
        let p = profile(2, 33, |t| r0 + eps * (2.0 * t).cos());
        let d = DualState::from_profile(&p).unwrap();
        for x in d.nodes() {
            prop_assert!(x.omega >= 1.0);
            prop_assert!(x.u > 0.0);
            prop_assert!((x.rho_tilde * x.rho_tilde - x.u * x.u - x.u_t * x.u_t).abs() <= 1e-14);
        }
    }
}
