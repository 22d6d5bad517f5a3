//! Canonical divergence-free vector potential `F` with `curl F = B0` and
//! `F . nu = 0`, built from a stream function on the dual (plaquette) grid.
//!
//! The stream function `w` solves the 5-point Poisson problem
//! `Lap w = B0` with `w = 0` outside, and the link values are first
//! differences of `w`. With this construction the discrete curl reproduces
//! `B0` up to the linear-solver residual and the discrete divergence vanishes
//! identically.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{LinkField2D, ScalarField2D};
use crate::grid::Grid2D;
use crate::linalg::{cg_real, RealOp};

/// Divergence-free potential with its stream function and the achieved
/// max-norm curl residual.
#[derive(Debug, Clone)]
pub struct PotentialBundle {
    pub f: LinkField2D,
    /// Stream function on the plaquette (dual) grid; zero on the rim.
    pub stream: ScalarField2D,
    pub residual_curl: f64,
}

/// Plaquette grid of a node grid: one node per plaquette whose four corners
/// are inside.
pub fn plaquette_grid(grid: &Grid2D) -> Result<Grid2D> {
    let (nx, ny) = (grid.nx - 1, grid.ny - 1);
    let mut mask = vec![false; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            mask[j * nx + i] = grid.is_inside(i, j)
                && grid.is_inside(i + 1, j)
                && grid.is_inside(i, j + 1)
                && grid.is_inside(i + 1, j + 1);
        }
    }
    Grid2D::from_mask(nx, ny, grid.h, (grid.origin.0 + grid.h / 2.0, grid.origin.1 + grid.h / 2.0), mask)
}

struct NegLaplace<'a> {
    grid: &'a Grid2D,
    inv_h2: f64,
}

impl RealOp for NegLaplace<'_> {
    fn dim(&self) -> usize {
        self.grid.node_count()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let g = self.grid;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let k = g.idx(i, j);
                if !g.is_inside(i, j) {
                    y[k] = x[k];
                    continue;
                }
                let mut acc = 4.0 * x[k];
                if i > 0 && g.is_inside(i - 1, j) {
                    acc -= x[g.idx(i - 1, j)];
                }
                if i + 1 < g.nx && g.is_inside(i + 1, j) {
                    acc -= x[g.idx(i + 1, j)];
                }
                if j > 0 && g.is_inside(i, j - 1) {
                    acc -= x[g.idx(i, j - 1)];
                }
                if j + 1 < g.ny && g.is_inside(i, j + 1) {
                    acc -= x[g.idx(i, j + 1)];
                }
                y[k] = acc * self.inv_h2;
            }
        }
    }
    fn diag(&self) -> Vec<f64> {
        let g = self.grid;
        (0..g.node_count())
            .map(|k| if g.inside()[k] { 4.0 * self.inv_h2 } else { 1.0 })
            .collect()
    }
}

/// Solve for the canonical potential of the applied field `b0` (given on the
/// nodes of `grid`).
pub fn vector_potential_from_field(
    b0: &ScalarField2D,
    grid: &Arc<Grid2D>,
    tol: f64,
) -> Result<PotentialBundle> {
    if tol <= 0.0 {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if !b0.grid.same_shape(grid) {
        return Err(Error::GridMismatch("b0 not on the requested grid".into()));
    }
    let pg = Arc::new(plaquette_grid(grid)?);
    let h = grid.h;
    // rhs: -B0 at plaquette centers (average of the four corner nodes)
    let mut rhs = vec![0.0; pg.node_count()];
    let mut b0_plaq = vec![0.0; pg.node_count()];
    for j in 0..pg.ny {
        for i in 0..pg.nx {
            if !pg.is_inside(i, j) {
                continue;
            }
            let v = 0.25
                * (b0.values[grid.idx(i, j)]
                    + b0.values[grid.idx(i + 1, j)]
                    + b0.values[grid.idx(i, j + 1)]
                    + b0.values[grid.idx(i + 1, j + 1)]);
            b0_plaq[pg.idx(i, j)] = v;
            rhs[pg.idx(i, j)] = -v;
        }
    }
    let op = NegLaplace { grid: &pg, inv_h2: 1.0 / (h * h) };
    let mut w = vec![0.0; pg.node_count()];
    let max_iter = 40 * (pg.nx + pg.ny);
    let achieved = cg_real(&op, &rhs, &mut w, tol.min(1e-10), max_iter);
    let stream = ScalarField2D { grid: pg.clone(), values: w };

    let f = links_from_stream(grid, &stream);
    let mut residual_curl = 0.0f64;
    for j in 0..pg.ny {
        for i in 0..pg.nx {
            if !pg.is_inside(i, j) {
                continue;
            }
            let c = f.plaquette(i, j) / (h * h);
            residual_curl = residual_curl.max((c - b0_plaq[pg.idx(i, j)]).abs());
        }
    }
    if residual_curl > tol.max(1e-8) {
        return Err(Error::numerical(format!(
            "Poisson solve did not reach tolerance: curl residual {residual_curl:.3e} (cg residual {achieved:.3e})"
        )));
    }
    Ok(PotentialBundle { f, stream, residual_curl })
}

/// Links of `grad^perp w` for a stream function on the plaquette grid.
pub(crate) fn links_from_stream(grid: &Arc<Grid2D>, stream: &ScalarField2D) -> LinkField2D {
    let g = grid.as_ref();
    let pg = &stream.grid;
    let mut f = LinkField2D::zeros(grid.clone());
    let wval = |i: i64, j: i64| -> f64 {
        if i < 0 || j < 0 || i as usize >= pg.nx || j as usize >= pg.ny {
            0.0
        } else if pg.is_inside(i as usize, j as usize) {
            stream.values[pg.idx(i as usize, j as usize)]
        } else {
            0.0
        }
    };
    // horizontal link (i,j)->(i+1,j): plaquette above is (i,j), below is (i,j-1)
    for j in 0..g.ny {
        for i in 0..g.nx - 1 {
            if g.is_inside(i, j) && g.is_inside(i + 1, j) {
                f.hx[j * (g.nx - 1) + i] = -(wval(i as i64, j as i64) - wval(i as i64, j as i64 - 1));
            }
        }
    }
    // vertical link (i,j)->(i,j+1): plaquette east is (i,j), west is (i-1,j)
    for j in 0..g.ny - 1 {
        for i in 0..g.nx {
            if g.is_inside(i, j) && g.is_inside(i, j + 1) {
                f.hy[j * g.nx + i] = wval(i as i64, j as i64) - wval(i as i64 - 1, j as i64);
            }
        }
    }
    f
}

/// Discrete curl of a link field: plaquette circulation divided by `h^2`,
/// returned on the plaquette grid.
pub fn curl(a: &LinkField2D) -> Result<ScalarField2D> {
    let pg = Arc::new(plaquette_grid(&a.grid)?);
    let h2 = a.grid.h * a.grid.h;
    let mut out = ScalarField2D::zeros(pg.clone());
    for j in 0..pg.ny {
        for i in 0..pg.nx {
            if pg.is_inside(i, j) {
                out.values[pg.idx(i, j)] = a.plaquette(i, j) / h2;
            }
        }
    }
    Ok(out)
}

/// Discrete divergence of a link field at each node (outgoing minus incoming
/// link values over `h^2`).
pub fn divergence(a: &LinkField2D) -> ScalarField2D {
    let g = &a.grid;
    let h2 = g.h * g.h;
    let mut out = ScalarField2D::zeros(a.grid.clone());
    for j in 0..g.ny {
        for i in 0..g.nx {
            if !g.is_inside(i, j) {
                continue;
            }
            let mut acc = 0.0;
            if i + 1 < g.nx && g.is_inside(i + 1, j) {
                acc += a.hx_at(i, j);
            }
            if i > 0 && g.is_inside(i - 1, j) {
                acc -= a.hx_at(i - 1, j);
            }
            if j + 1 < g.ny && g.is_inside(i, j + 1) {
                acc += a.hy_at(i, j);
            }
            if j > 0 && g.is_inside(i, j - 1) {
                acc -= a.hy_at(i, j - 1);
            }
            out.values[g.idx(i, j)] = acc / h2;
        }
    }
    out
}

/// Exact link integrals of `b * A0(. - x0)` where `A0(x) = (-x2, x1)/2`.
pub fn a0_links(grid: &Arc<Grid2D>, x0: (f64, f64), b: f64) -> LinkField2D {
    LinkField2D::from_potential(grid.clone(), move |x, y| {
        (-b * (y - x0.1) / 2.0, b * (x - x0.0) / 2.0)
    })
}

/// Local gauge phase on `Q_ell(x0)`: a scalar `phi` with
/// `F - B0(x_tilde) A0(. - x0) - grad phi` small on the square, built by
/// integrating the residual links along an L-shaped path from the corner of
/// the square. Returns `phi` (zero outside the square) and the sup-norm
/// defect per unit length.
pub fn local_gauge_phase(
    f: &LinkField2D,
    x0: (f64, f64),
    x_tilde: (f64, f64),
    ell: f64,
) -> Result<(ScalarField2D, f64)> {
    let g = &f.grid;
    let h = g.h;
    if (x_tilde.0 - x0.0).abs() > ell / 2.0 + 1e-12 || (x_tilde.1 - x0.1).abs() > ell / 2.0 + 1e-12 {
        return Err(Error::invalid("x_tilde outside the closed square"));
    }
    // node index range covered by the square
    let ilo = (((x0.0 - ell / 2.0) - g.origin.0) / h - 0.5).ceil() as i64;
    let ihi = (((x0.0 + ell / 2.0) - g.origin.0) / h - 0.5).floor() as i64;
    let jlo = (((x0.1 - ell / 2.0) - g.origin.1) / h - 0.5).ceil() as i64;
    let jhi = (((x0.1 + ell / 2.0) - g.origin.1) / h - 0.5).floor() as i64;
    if ilo < 0 || jlo < 0 || ihi < ilo + 1 || jhi < jlo + 1 {
        return Err(Error::invalid("square does not cover at least a 2x2 node patch"));
    }
    let (ilo, ihi, jlo, jhi) = (ilo as usize, ihi as usize, jlo as usize, jhi as usize);
    if ihi >= g.nx || jhi >= g.ny {
        return Err(Error::invalid("square exceeds the grid"));
    }
    for j in jlo..=jhi {
        for i in ilo..=ihi {
            if !g.is_inside(i, j) {
                return Err(Error::invalid("square not contained in the domain"));
            }
        }
    }
    // B0 at x_tilde from the discrete curl of F
    let curl_f = curl(f)?;
    let b0_tilde = curl_f.interp(x_tilde.0, x_tilde.1);
    let a0 = a0_links(&f.grid, x0, b0_tilde);

    let rx = |i: usize, j: usize| f.hx_at(i, j) - a0.hx_at(i, j);
    let ry = |i: usize, j: usize| f.hy_at(i, j) - a0.hy_at(i, j);

    let mut phi = ScalarField2D::zeros(f.grid.clone());
    // base row: integrate horizontally, then each column vertically
    for i in ilo..ihi {
        phi.values[g.idx(i + 1, jlo)] = phi.values[g.idx(i, jlo)] + rx(i, jlo);
    }
    for i in ilo..=ihi {
        for j in jlo..jhi {
            phi.values[g.idx(i, j + 1)] = phi.values[g.idx(i, j)] + ry(i, j);
        }
    }
    // defect: residual minus the gradient of phi, per unit length
    let mut defect = 0.0f64;
    for j in jlo..=jhi {
        for i in ilo..ihi {
            let d = rx(i, j) - (phi.values[g.idx(i + 1, j)] - phi.values[g.idx(i, j)]);
            defect = defect.max(d.abs() / h);
        }
    }
    for j in jlo..jhi {
        for i in ilo..=ihi {
            let d = ry(i, j) - (phi.values[g.idx(i, j + 1)] - phi.values[g.idx(i, j)]);
            defect = defect.max(d.abs() / h);
        }
    }
    Ok((phi, defect))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField2D;

    fn unit(n: usize) -> Arc<Grid2D> {
        Arc::new(Grid2D::unit_square(n).unwrap())
    }

    #[test]
    fn zero_field_zero_potential() {
        let g = unit(32);
        let b0 = ScalarField2D::zeros(g.clone());
        let p = vector_potential_from_field(&b0, &g, 1e-10).unwrap();
        assert!(p.f.hx.iter().all(|v| *v == 0.0));
        assert!(p.f.hy.iter().all(|v| *v == 0.0));
        assert!(p.stream.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn constant_field_curl_and_divergence() {
        let g = unit(48);
        let b0 = ScalarField2D::constant(g.clone(), 1.0);
        let p = vector_potential_from_field(&b0, &g, 1e-10).unwrap();
        assert!(p.residual_curl <= 1e-8, "curl residual {}", p.residual_curl);
        let div = divergence(&p.f);
        let worst = div.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 1e-11, "divergence {worst}");
    }

    #[test]
    fn variable_field_curl_and_normal_trace() {
        let g = unit(48);
        let b0 = ScalarField2D::from_fn(g.clone(), |x, _| x - 0.5).unwrap();
        let p = vector_potential_from_field(&b0, &g, 1e-10).unwrap();
        assert!(p.residual_curl <= 1e-8);
        // no stored link crosses the domain boundary; the normal trace of F
        // lives on the missing links, which are identically zero
        for v in p.f.hx.iter().chain(p.f.hy.iter()) {
            assert!(v.is_finite());
        }
        let pg = &p.stream.grid;
        for b in pg.boundary_nodes() {
            assert!(p.stream.values[b.idx].is_finite());
        }
    }

    #[test]
    fn curl_of_a0_links_is_one() {
        let g = unit(64);
        let a = a0_links(&g, (0.5, 0.5), 1.0);
        let c = curl(&a).unwrap();
        for (m, v) in c.grid.inside().iter().zip(&c.values) {
            if *m {
                assert!((v - 1.0).abs() < 1e-12, "curl {v}");
            }
        }
    }

    #[test]
    fn curl_of_gradient_is_zero() {
        let g = unit(32);
        let chi = ScalarField2D::from_fn(g.clone(), |x, y| (3.0 * x).sin() * y).unwrap();
        let mut a = LinkField2D::zeros(g.clone());
        for j in 0..g.ny {
            for i in 0..g.nx - 1 {
                a.hx[j * (g.nx - 1) + i] = chi.values[g.idx(i + 1, j)] - chi.values[g.idx(i, j)];
            }
        }
        for j in 0..g.ny - 1 {
            for i in 0..g.nx {
                a.hy[j * g.nx + i] = chi.values[g.idx(i, j + 1)] - chi.values[g.idx(i, j)];
            }
        }
        let c = curl(&a).unwrap();
        let worst = c.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst < 1e-12, "curl of gradient {worst}");
    }

    #[test]
    fn gauge_phase_constant_field_small_defect() {
        let g = unit(96);
        let b0 = ScalarField2D::constant(g.clone(), 1.0);
        let p = vector_potential_from_field(&b0, &g, 1e-11).unwrap();
        let (_, defect) = local_gauge_phase(&p.f, (0.5, 0.5), (0.5, 0.5), 0.3).unwrap();
        // constant field: shifted A0 is exactly gauge equivalent up to the
        // Poisson discretization
        assert!(defect < 5e-3, "defect {defect}");
    }

    #[test]
    fn gauge_phase_defect_quadratic_in_ell() {
        let g = unit(256);
        let b0 = ScalarField2D::from_fn(g.clone(), |x, _| x).unwrap();
        let p = vector_potential_from_field(&b0, &g, 1e-11).unwrap();
        let (_, d1) = local_gauge_phase(&p.f, (0.5, 0.5), (0.5, 0.5), 0.4).unwrap();
        let (_, d2) = local_gauge_phase(&p.f, (0.5, 0.5), (0.5, 0.5), 0.2).unwrap();
        let ratio = d1 / d2;
        assert!(ratio > 2.5 && ratio < 6.0, "defect ratio {ratio} (d1={d1}, d2={d2})");
    }

    #[test]
    fn gauge_phase_rejects_outside_square() {
        let g = unit(32);
        let b0 = ScalarField2D::constant(g.clone(), 1.0);
        let p = vector_potential_from_field(&b0, &g, 1e-10).unwrap();
        assert!(local_gauge_phase(&p.f, (0.05, 0.5), (0.05, 0.5), 0.3).is_err());
    }
}
