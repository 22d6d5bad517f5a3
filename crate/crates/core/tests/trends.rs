//! Trend checks tied to the asymptotic statements: large-field limits of the
//! Neumann eigenvalue, monotonicity of mu1 in H, the magnetic-energy decay
//! along kappa sweeps, and the local/global critical-set inclusion.

use std::sync::Arc;

use glpin_core::critical::lambda1;
use glpin_core::field::ScalarField2D;
use glpin_core::gauge::vector_potential_from_field;
use glpin_core::grid::Grid2D;
use glpin_core::solver::{minimize_coupled, minimize_frozen, SolverOptions};
use glpin_core::spectral::{halfplane_lambda, mu1, theta0};

fn disk(n: usize, r: f64) -> Arc<Grid2D> {
    Arc::new(Grid2D::disk(n, (0.0, 0.0), r).unwrap())
}

#[test]
fn mu1_monotone_in_h_for_constant_coefficients() {
    let g = Arc::new(Grid2D::unit_square(48).unwrap());
    let a = ScalarField2D::constant(g.clone(), 1.0);
    let b0 = ScalarField2D::constant(g.clone(), 1.0);
    let bundle = vector_potential_from_field(&b0, &g, 1e-10).unwrap();
    let kappa = 6.0;
    let mut prev = f64::NEG_INFINITY;
    for h in [2.0, 6.0, 12.0, 20.0] {
        let (r, _) = mu1(kappa, h, &a, &bundle.f, 1e-7, None).unwrap();
        assert!(r.value > prev, "mu1 not increasing at H = {h}: {} <= {prev}", r.value);
        prev = r.value;
    }
}

#[test]
fn neumann_eigenvalue_over_b_approaches_de_gennes_limit() {
    // Gamma empty on the disk: mu^N(B F) / B -> min(b0, Theta0 b0') = Theta0,
    // approached from below (the curvature correction is negative)
    let theta0 = theta0(1e-9).unwrap().value;
    let zero_and_bundle = |n: usize| {
        let g = disk(n, 1.0);
        let zero = ScalarField2D::constant(g.clone(), 0.0);
        let b0 = ScalarField2D::constant(g.clone(), 1.0);
        let bundle = vector_potential_from_field(&b0, &g, 1e-10).unwrap();
        (zero, bundle)
    };
    let mut dists = Vec::new();
    for (b, n) in [(100.0, 96usize), (200.0, 136), (400.0, 192)] {
        let (zero, bundle) = zero_and_bundle(n);
        let (r, _) = mu1(1.0, b, &zero, &bundle.f, 1e-7, None).unwrap();
        dists.push((r.value / b - theta0).abs());
    }
    // distance to the limit shrinks (up to discretization noise) and ends
    // within 10%
    assert!(dists.windows(2).all(|w| w[1] <= w[0] + 0.005), "distances {dists:?}");
    assert!(dists[2] <= 0.10 * theta0, "mu^N/B off by {} vs Theta0 = {theta0}", dists[2]);
}

#[test]
fn neumann_eigenvalue_over_b23_approaches_alpha1_limit() {
    // Gamma nonempty (B0 = x1 on the disk): mu^N(B F) / B^{2/3} -> alpha1^{2/3}
    // with alpha1 = lambda(pi/2)^{3/2} |grad B0| here
    let lam_half_pi = halfplane_lambda(std::f64::consts::FRAC_PI_2, 12.0, 84, 1e-7)
        .unwrap()
        .value;
    let g = disk(224, 0.9);
    let zero = ScalarField2D::constant(g.clone(), 0.0);
    let b0 = ScalarField2D::from_fn(g.clone(), |x, _| x).unwrap();
    let bundle = vector_potential_from_field(&b0, &g, 1e-10).unwrap();
    let target = lam_half_pi; // alpha1^{2/3} = lambda(pi/2)
    let mut dists = Vec::new();
    for b in [300.0, 600.0, 1200.0] {
        let (r, _) = mu1(1.0, b, &zero, &bundle.f, 1e-7, None).unwrap();
        dists.push((r.value / b.powf(2.0 / 3.0) - target).abs());
    }
    assert!(dists.windows(2).all(|w| w[1] <= w[0] + 0.005), "distances {dists:?}");
    assert!(
        dists[2] <= 0.10 * target,
        "mu^N/B^(2/3) off by {} vs alpha1^(2/3) = {target}",
        dists[2]
    );
}

#[test]
fn magnetic_energy_fraction_decays_along_kappa_sweep() {
    // Corollary of the leading-order expansion: (kappa H)^2 ||curl A - B0||^2
    // is o(kappa^2) at fixed sigma
    let sigma = 0.6;
    let mut fractions = Vec::new();
    for (kappa, n) in [(6.0, 64usize), (12.0, 128)] {
        let g = Arc::new(Grid2D::unit_square(n).unwrap());
        let a = ScalarField2D::constant(g.clone(), 1.0);
        let b0 = ScalarField2D::constant(g.clone(), 1.0);
        let rep = minimize_coupled(&a, &b0, kappa, sigma * kappa, &SolverOptions::default())
            .unwrap();
        let mag = glpin_core::solver::magnetic_energy(
            &rep.state.a_links,
            &b0,
            kappa,
            sigma * kappa,
        )
        .unwrap();
        fractions.push(mag / (kappa * kappa));
    }
    assert!(
        fractions[1] < fractions[0],
        "magnetic fraction did not decay: {fractions:?}"
    );
}

#[test]
fn negative_mu1_implies_non_normal_minimizer() {
    // the discrete echo of N^loc inside N
    let kappa = 10.0;
    let g = Arc::new(Grid2D::unit_square(96).unwrap());
    let a = ScalarField2D::constant(g.clone(), 1.0);
    let b0 = ScalarField2D::constant(g.clone(), 1.0);
    let bundle = vector_potential_from_field(&b0, &g, 1e-10).unwrap();
    let theta0 = theta0(1e-9).unwrap().value;
    for sigma in [0.8, 1.3] {
        let h = sigma * kappa;
        let (r, _) = mu1(kappa, h, &a, &bundle.f, 1e-7, None).unwrap();
        let lam = lambda1(&b0, &a, sigma, theta0).unwrap();
        // sanity: the sign agrees with the Lambda1 prediction at these sigmas
        assert_eq!(r.value < 0.0, lam < 0.0, "sigma {sigma}: mu1 {} lam {lam}", r.value);
        if r.value < 0.0 {
            let rep = minimize_frozen(&a, &b0, kappa, h, &SolverOptions::default()).unwrap();
            let normal = 0.5 * kappa * kappa; // (kappa^2/2) int a^2
            assert!(
                rep.state.energy < normal - 1e-6 * normal,
                "sigma {sigma}: minimizer not below normal ({} vs {normal})",
                rep.state.energy
            );
            assert!(rep.state.psi.l2_norm() > 1e-3);
        }
    }
}
