//! Closed-form leading-order predictions: the ground-state energy density
//! built from `fhat`, its restriction to subdomains, the `|psi|^4` identity,
//! periodic averaging for oscillating pinning terms, and the comparison
//! harness against the solver.

use rayon::prelude::*;
use serde::Serialize;

use crate::cell::FhatTable;
use crate::coeff::PinningSpec;
use crate::error::{Error, Result};
use crate::field::ScalarField2D;
use crate::solver::{minimize_frozen, SolverOptions};

/// Leading-order energy split into its positive-pinning and
/// nonpositive-pinning parts.
#[derive(Debug, Clone, Serialize)]
pub struct LeadingEnergyReport {
    pub leading: f64,
    pub bulk_pos: f64,
    pub bulk_nonpos: f64,
    pub sigma: f64,
    pub kappa: f64,
    pub h_ext: f64,
}

const A_EPS: f64 = 1e-8;

fn leading_density(a: f64, babs: f64, sigma: f64, fhat: &FhatTable) -> f64 {
    if a > A_EPS {
        a * a * fhat.eval(sigma * babs / a)
    } else if a > 0.0 {
        // continuous limit: the fhat argument blows up and fhat saturates
        0.5 * a * a
    } else {
        0.0
    }
}

/// `kappa^2 [ int_{a>0} a^2 fhat(sigma |B0| / a) + (1/2) int_{a<=0} a^2 ]`
/// over the masked nodes.
pub fn leading_energy(
    a: &ScalarField2D,
    b0: &ScalarField2D,
    kappa: f64,
    h_ext: f64,
    fhat: &FhatTable,
) -> Result<LeadingEnergyReport> {
    leading_energy_masked(a.grid.inside(), a, b0, kappa, h_ext, fhat)
}

/// Same integrals restricted to an arbitrary sub-mask `D`.
pub fn local_leading_energy(
    d_mask: &[bool],
    a: &ScalarField2D,
    b0: &ScalarField2D,
    kappa: f64,
    h_ext: f64,
    fhat: &FhatTable,
) -> Result<f64> {
    Ok(leading_energy_masked(d_mask, a, b0, kappa, h_ext, fhat)?.leading)
}

fn leading_energy_masked(
    d_mask: &[bool],
    a: &ScalarField2D,
    b0: &ScalarField2D,
    kappa: f64,
    h_ext: f64,
    fhat: &FhatTable,
) -> Result<LeadingEnergyReport> {
    if kappa <= 0.0 || h_ext < 0.0 {
        return Err(Error::invalid("kappa must be positive and H nonnegative"));
    }
    if d_mask.len() != a.values.len() || !a.grid.same_shape(&b0.grid) {
        return Err(Error::GridMismatch("mask/field shapes differ".into()));
    }
    let sigma = h_ext / kappa;
    let h2 = a.grid.h * a.grid.h;
    let inside = a.grid.inside();
    let mut pos = 0.0;
    let mut nonpos = 0.0;
    for k in 0..a.values.len() {
        if !d_mask[k] || !inside[k] {
            continue;
        }
        let av = a.values[k];
        if av > 0.0 {
            pos += leading_density(av, b0.values[k].abs(), sigma, fhat);
        } else {
            nonpos += 0.5 * av * av;
        }
    }
    let k2 = kappa * kappa;
    Ok(LeadingEnergyReport {
        leading: k2 * h2 * (pos + nonpos),
        bulk_pos: k2 * h2 * pos,
        bulk_nonpos: k2 * h2 * nonpos,
        sigma,
        kappa,
        h_ext,
    })
}

/// Predicted `int_D |psi|^4 = -int_{D cap {a>0}} a^2 (2 fhat - 1)`,
/// nonnegative because `fhat <= 1/2`.
pub fn psi4_prediction(
    d_mask: &[bool],
    a: &ScalarField2D,
    b0: &ScalarField2D,
    kappa: f64,
    h_ext: f64,
    fhat: &FhatTable,
) -> Result<f64> {
    if d_mask.len() != a.values.len() {
        return Err(Error::GridMismatch("mask length differs from fields".into()));
    }
    let sigma = h_ext / kappa;
    let h2 = a.grid.h * a.grid.h;
    let inside = a.grid.inside();
    let mut acc = 0.0;
    for k in 0..a.values.len() {
        if !d_mask[k] || !inside[k] {
            continue;
        }
        let av = a.values[k];
        if av > A_EPS {
            acc -= av * av * (2.0 * fhat.eval(sigma * b0.values[k].abs() / av) - 1.0);
        }
    }
    Ok((h2 * acc).max(0.0))
}

/// One row of the energy comparison harness.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyComparison {
    pub kappa: f64,
    pub h_ext: f64,
    pub e_min: f64,
    pub e_leading: f64,
    pub rel_dev: f64,
}

/// Run the frozen-potential solver across a `kappa` sweep at fixed
/// `sigma = H / kappa` and compare with the leading-order formula.
pub fn compare_energy(
    a_spec: &PinningSpec,
    b0: &ScalarField2D,
    kappa_list: &[f64],
    sigma: f64,
    fhat: &FhatTable,
    opts: &SolverOptions,
) -> Result<Vec<EnergyComparison>> {
    if kappa_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("kappa list must be increasing"));
    }
    let grid = b0.grid.clone();
    kappa_list
        .par_iter()
        .map(|&kappa| {
            let h_ext = sigma * kappa;
            let a = a_spec.sample(&grid, kappa)?;
            let rep = minimize_frozen(&a, b0, kappa, h_ext, opts)?;
            let lead = leading_energy(&a, b0, kappa, h_ext, fhat)?;
            let rel_dev = (rep.state.energy - lead.leading).abs() / (kappa * kappa);
            Ok(EnergyComparison {
                kappa,
                h_ext,
                e_min: rep.state.energy,
                e_leading: lead.leading,
                rel_dev,
            })
        })
        .collect()
}

/// Mean of a periodic sampled function over one period cell by Simpson
/// quadrature (256 intervals per dimension).
pub fn periodic_average(phi: impl Fn(f64, f64) -> f64, t1: f64, t2: f64) -> Result<f64> {
    if t1 <= 0.0 || t2 <= 0.0 {
        return Err(Error::invalid("periods must be positive"));
    }
    const N: usize = 256;
    let w = |k: usize| -> f64 {
        if k == 0 || k == N {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };
    let h1 = t1 / N as f64;
    let h2 = t2 / N as f64;
    let mut acc = 0.0;
    for j in 0..=N {
        let mut row = 0.0;
        for i in 0..=N {
            row += w(i) * phi(i as f64 * h1, j as f64 * h2);
        }
        acc += w(j) * row;
    }
    Ok(acc * h1 * h2 / 9.0 / (t1 * t2))
}

/// Position-dependent periodic average `x -> mean_t phi(t, x)` sampled on the
/// nodes of `grid`.
pub fn periodic_average_field(
    phi: impl Fn(f64, f64, f64, f64) -> f64 + Sync,
    t1: f64,
    t2: f64,
    grid: &std::sync::Arc<crate::grid::Grid2D>,
) -> Result<ScalarField2D> {
    if t1 <= 0.0 || t2 <= 0.0 {
        return Err(Error::invalid("periods must be positive"));
    }
    let mut out = ScalarField2D::zeros(grid.clone());
    let nx = grid.nx;
    let vals: Vec<f64> = (0..grid.node_count())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % nx, k / nx);
            let (x, y) = grid.pos(i, j);
            periodic_average(|u, v| phi(u, v, x, y), t1, t2).unwrap_or(0.0)
        })
        .collect();
    out.values = vals;
    Ok(out)
}

/// Which homogenization example formula to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomogenizedKind {
    /// Pinning independent of `kappa`: the plain leading-order energy.
    KappaIndependent,
    /// `a = alpha(sqrt(kappa) x)`: averaged positive and negative parts.
    Oscillating,
    /// `a = a(x) + alpha(sqrt(kappa) x)` with `a + alpha > 0`.
    ShiftedPeriodic,
}

/// Homogenized leading-order energy per `kappa^2`, using the periodic profile
/// carried by the pinning spec.
pub fn homogenized_leading(
    kind: HomogenizedKind,
    a_spec: &PinningSpec,
    b0: &ScalarField2D,
    sigma: f64,
    fhat: &FhatTable,
) -> Result<f64> {
    let grid = &b0.grid;
    let h2 = grid.h * grid.h;
    let (t1, t2) = periods_of(a_spec)
        .ok_or_else(|| Error::invalid("pinning spec carries no periodic part"))
        .or_else(|e| {
            if kind == HomogenizedKind::KappaIndependent {
                Ok((1.0, 1.0))
            } else {
                Err(e)
            }
        })?;
    match kind {
        HomogenizedKind::KappaIndependent => {
            let a = a_spec.sample(grid, 1.0)?;
            let rep = leading_energy(&a, b0, 1.0, sigma, fhat)?;
            Ok(rep.leading)
        }
        HomogenizedKind::Oscillating | HomogenizedKind::ShiftedPeriodic => {
            // phi_plus(x) = mean_t alpha_+(t,x)^2 fhat(sigma |B0(x)| / alpha_+(t,x))
            let inside = grid.inside();
            let nx = grid.nx;
            let vals: Vec<f64> = (0..grid.node_count())
                .into_par_iter()
                .map(|k| {
                    if !inside[k] {
                        return 0.0;
                    }
                    let (i, j) = (k % nx, k / nx);
                    let (x, y) = grid.pos(i, j);
                    let babs = b0.values[k].abs();
                    periodic_average(
                        |u, v| {
                            let al = a_spec.profile(u, v, x, y);
                            let ap = al.max(0.0);
                            let am = (-al).max(0.0);
                            leading_density(ap, babs, sigma, fhat) + 0.5 * am * am
                        },
                        t1,
                        t2,
                    )
                    .unwrap_or(0.0)
                })
                .collect();
            Ok(h2 * vals.iter().sum::<f64>())
        }
    }
}

fn periods_of(spec: &PinningSpec) -> Option<(f64, f64)> {
    match spec {
        PinningSpec::PeriodicOsc { t1_period, t2_period, .. } => Some((*t1_period, *t2_period)),
        PinningSpec::Sum(a, b) => periods_of(a).or_else(|| periods_of(b)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell::FhatPoint;
    use crate::grid::Grid2D;
    use std::sync::Arc;

    fn mock_table() -> FhatTable {
        // fhat(b) = b/2 clamped to 1/2: monotone, in range, exact at ends
        let points = (1..=40)
            .map(|k| {
                let b = k as f64 / 40.0;
                FhatPoint { b, value: 0.5 * b, r_used: 0.0, bound: 0.0, capped: false }
            })
            .collect();
        FhatTable { points }
    }

    fn unit(n: usize) -> Arc<Grid2D> {
        Arc::new(Grid2D::unit_square(n).unwrap())
    }

    #[test]
    fn negative_pinning_gives_normal_energy() {
        let g = unit(32);
        let a = ScalarField2D::constant(g.clone(), -1.0);
        let b0 = ScalarField2D::constant(g.clone(), 1.0);
        let r = leading_energy(&a, &b0, 10.0, 5.0, &mock_table()).unwrap();
        assert!((r.leading - 50.0).abs() < 1e-9); // (kappa^2/2)|Omega|
        assert_eq!(r.bulk_pos, 0.0);
    }

    #[test]
    fn saturated_regime_is_half_a_squared() {
        let g = unit(32);
        let a = ScalarField2D::constant(g.clone(), 1.0);
        let b0 = ScalarField2D::constant(g.clone(), 1.0);
        // sigma >= 1: fhat = 1/2 exactly
        let r = leading_energy(&a, &b0, 10.0, 15.0, &mock_table()).unwrap();
        assert!((r.leading - 50.0).abs() < 1e-9, "leading {}", r.leading);
    }

    #[test]
    fn leading_bounded_by_saturated_value() {
        let g = unit(24);
        let a = ScalarField2D::from_fn(g.clone(), |x, _| 1.0 - 1.5 * x).unwrap();
        let b0 = ScalarField2D::from_fn(g.clone(), |_, y| 1.0 + 0.5 * y).unwrap();
        let table = mock_table();
        let r = leading_energy(&a, &b0, 7.0, 3.0, &table).unwrap();
        // replacing fhat by 1/2 gives (kappa^2/2) int a^2
        let a2 = ScalarField2D { grid: g.clone(), values: a.values.iter().map(|v| v * v).collect() };
        let cap = 0.5 * 49.0 * crate::field::integrate(&a2, g.inside()).unwrap();
        assert!(r.leading <= cap + 1e-12, "leading {} cap {}", r.leading, cap);
    }

    #[test]
    fn local_energy_halves_for_half_domain() {
        let g = unit(64);
        let a = ScalarField2D::constant(g.clone(), 1.0);
        let b0 = ScalarField2D::constant(g.clone(), 1.0);
        let table = mock_table();
        let full = leading_energy(&a, &b0, 10.0, 5.0, &table).unwrap().leading;
        let half_mask: Vec<bool> = (0..g.node_count())
            .map(|k| {
                let i = k % g.nx;
                g.inside()[k] && (i as f64 + 0.5) * g.h < 0.5
            })
            .collect();
        let half = local_leading_energy(&half_mask, &a, &b0, 10.0, 5.0, &table).unwrap();
        assert!((half - 0.5 * full).abs() < g.h * full);
        let empty = vec![false; g.node_count()];
        assert_eq!(local_leading_energy(&empty, &a, &b0, 10.0, 5.0, &table).unwrap(), 0.0);
    }

    #[test]
    fn psi4_zero_in_saturated_regime_and_for_negative_a() {
        let g = unit(24);
        let b0 = ScalarField2D::constant(g.clone(), 1.0);
        let table = mock_table();
        let a_neg = ScalarField2D::constant(g.clone(), -1.0);
        let v = psi4_prediction(g.inside(), &a_neg, &b0, 10.0, 5.0, &table).unwrap();
        assert_eq!(v, 0.0);
        let a_pos = ScalarField2D::constant(g.clone(), 1.0);
        let v2 = psi4_prediction(g.inside(), &a_pos, &b0, 10.0, 12.0, &table).unwrap();
        assert!(v2.abs() < 1e-12);
        // and strictly positive below saturation
        let v3 = psi4_prediction(g.inside(), &a_pos, &b0, 10.0, 5.0, &table).unwrap();
        assert!(v3 > 0.0);
    }

    #[test]
    fn periodic_average_of_sin_squared() {
        let v = periodic_average(|t1, _| (2.0 * std::f64::consts::PI * t1).sin().powi(2), 1.0, 1.0)
            .unwrap();
        assert!((v - 0.5).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn periodic_average_of_constant() {
        let v = periodic_average(|_, _| 3.25, 2.0, 0.7).unwrap();
        assert!((v - 3.25).abs() < 1e-13);
    }

    #[test]
    fn kappa_independent_pinning_has_order_kappa2_leading_term() {
        // a disk inside {a > a0, |B0| > rho0} pins the leading term from
        // below by pi r0^2 a0^2 fhat(sigma rho0 / sup a)
        let g = unit(128);
        let a = ScalarField2D::from_fn(g.clone(), |x, _| 1.0 - 1.5 * x).unwrap();
        let b0 = ScalarField2D::constant(g.clone(), 1.0);
        let table = mock_table();
        let kappa = 30.0;
        let sigma = 0.4;
        let lead = leading_energy(&a, &b0, kappa, sigma * kappa, &table).unwrap().leading;
        // disk D((0.25, 0.5), 0.2) sits inside {a > 0.325}
        let (r0, a0, rho0) = (0.2, 0.325, 1.0);
        let sup_a = a.sup_inside();
        let lower = std::f64::consts::PI
            * r0
            * r0
            * a0
            * a0
            * table.eval(sigma * rho0 / sup_a)
            * kappa
            * kappa;
        assert!(lower > 0.0);
        assert!(lead >= lower, "leading {lead} below the disk bound {lower}");
    }

    #[test]
    fn homogenized_constant_profile_reduces_to_plain_leading() {
        let g = unit(32);
        let b0 = ScalarField2D::constant(g.clone(), 1.0);
        let table = mock_table();
        let spec = PinningSpec::PeriodicOsc { base: 0.8, amp: 0.0, t1_period: 1.0, t2_period: 1.0 };
        let hom = homogenized_leading(HomogenizedKind::Oscillating, &spec, &b0, 0.5, &table).unwrap();
        let a = ScalarField2D::constant(g.clone(), 0.8);
        let plain = leading_energy(&a, &b0, 1.0, 0.5, &table).unwrap().leading;
        assert!((hom - plain).abs() < 1e-9, "hom {hom} plain {plain}");
    }
}
