//! The constant-field reference cell problem on `Q_R`: the energies
//! `F^{zeta,alpha}_{b,Q_R}`, their ground states with Dirichlet or Neumann
//! conditions, and the universal bulk energy function `fhat` obtained from
//! `e_D(b, R) / R^2` as `R` grows.

use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::ComplexField2D;
use crate::gauge::a0_links;
use crate::grid::Grid2D;
use crate::linalg::minimize_quartic;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bc {
    Dirichlet,
    Neumann,
}

/// Frozen-coefficient cell problem on the square `Q_R`.
#[derive(Debug, Clone)]
pub struct CellProblem {
    pub b: f64,
    pub alpha: f64,
    pub zeta: i8,
    pub r: f64,
    pub bc: Bc,
    pub resolution: usize,
}

impl CellProblem {
    pub fn new(b: f64, alpha: f64, zeta: i8, r: f64, bc: Bc, resolution: usize) -> Result<Self> {
        if b < 0.0 || !b.is_finite() {
            return Err(Error::invalid("reduced field b must be nonnegative"));
        }
        if r <= 0.0 {
            return Err(Error::invalid("square side R must be positive"));
        }
        if resolution < 32 {
            return Err(Error::invalid("cell resolution must be at least 32"));
        }
        if zeta != 1 && zeta != -1 {
            return Err(Error::invalid("zeta must be +1 or -1"));
        }
        Ok(CellProblem { b, alpha, zeta, r, bc, resolution })
    }

    pub fn grid(&self) -> Result<Arc<Grid2D>> {
        Ok(Arc::new(Grid2D::centered_square(self.resolution, self.r)?))
    }

    /// Link phases of `zeta * A0` on the cell grid (exact integrals).
    fn links(&self, grid: &Arc<Grid2D>) -> crate::field::LinkField2D {
        let mut links = a0_links(grid, (0.0, 0.0), 1.0);
        if self.zeta < 0 {
            links.hx.iter_mut().for_each(|v| *v = -*v);
            links.hy.iter_mut().for_each(|v| *v = -*v);
        }
        links
    }
}

/// Energy `int_{Q_R} b |(grad - i zeta A0) u|^2 + (alpha - |u|^2)^2 / 2`.
/// For Dirichlet problems `u` is extended by zero past the square edge, so
/// every grid function is admissible.
pub fn cell_energy(u: &ComplexField2D, p: &CellProblem) -> Result<f64> {
    let g = &u.grid;
    if g.nx != p.resolution || g.ny != p.resolution {
        return Err(Error::GridMismatch("u is not on the cell grid".into()));
    }
    let links = p.links(&u.grid);
    let mut kin = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let k = g.idx(i, j);
            if i + 1 < g.nx {
                let d = u.values[g.idx(i + 1, j)] * C64::from_polar(1.0, -links.hx_at(i, j))
                    - u.values[k];
                kin += d.norm_sqr();
            }
            if j + 1 < g.ny {
                let d = u.values[g.idx(i, j + 1)] * C64::from_polar(1.0, -links.hy_at(i, j))
                    - u.values[k];
                kin += d.norm_sqr();
            }
        }
    }
    if p.bc == Bc::Dirichlet {
        for j in 0..g.ny {
            kin += u.values[g.idx(0, j)].norm_sqr() + u.values[g.idx(g.nx - 1, j)].norm_sqr();
        }
        for i in 0..g.nx {
            kin += u.values[g.idx(i, 0)].norm_sqr() + u.values[g.idx(i, g.ny - 1)].norm_sqr();
        }
    }
    let h2 = g.h * g.h;
    let pot: f64 = u.values.iter().map(|v| (p.alpha - v.norm_sqr()).powi(2)).sum::<f64>() * 0.5 * h2;
    Ok(p.b * kin + pot)
}

#[derive(Debug, Clone)]
pub struct MinimizeOptions {
    /// Number of random restarts on top of the constant-amplitude start.
    pub seeds: usize,
    /// Relative energy-change stopping tolerance.
    pub tol_rel: f64,
    pub max_iter: usize,
    pub rng_seed: u64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions { seeds: 4, tol_rel: 1e-10, max_iter: 3000, rng_seed: 20_22 }
    }
}

struct CellWorkspace {
    links_hx: Vec<f64>,
    links_hy: Vec<f64>,
    nx: usize,
    ny: usize,
    h2: f64,
    b: f64,
    alpha: f64,
    dirichlet: bool,
}

impl CellWorkspace {
    fn new(p: &CellProblem, grid: &Arc<Grid2D>) -> Self {
        let links = p.links(grid);
        CellWorkspace {
            links_hx: links.hx,
            links_hy: links.hy,
            nx: grid.nx,
            ny: grid.ny,
            h2: grid.h * grid.h,
            b: p.b,
            alpha: p.alpha,
            dirichlet: p.bc == Bc::Dirichlet,
        }
    }

    #[inline]
    fn hx(&self, i: usize, j: usize) -> f64 {
        self.links_hx[j * (self.nx - 1) + i]
    }

    #[inline]
    fn hy(&self, i: usize, j: usize) -> f64 {
        self.links_hy[j * self.nx + i]
    }

    fn energy(&self, u: &[C64]) -> f64 {
        let (nx, ny) = (self.nx, self.ny);
        let mut kin = 0.0;
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                if i + 1 < nx {
                    let d = u[k + 1] * C64::from_polar(1.0, -self.hx(i, j)) - u[k];
                    kin += d.norm_sqr();
                }
                if j + 1 < ny {
                    let d = u[k + nx] * C64::from_polar(1.0, -self.hy(i, j)) - u[k];
                    kin += d.norm_sqr();
                }
            }
        }
        if self.dirichlet {
            for j in 0..ny {
                kin += u[j * nx].norm_sqr() + u[j * nx + nx - 1].norm_sqr();
            }
            for i in 0..nx {
                kin += u[i].norm_sqr() + u[(ny - 1) * nx + i].norm_sqr();
            }
        }
        let pot: f64 =
            u.iter().map(|v| (self.alpha - v.norm_sqr()).powi(2)).sum::<f64>() * 0.5 * self.h2;
        self.b * kin + pot
    }

    /// Wirtinger gradient dF/d(conj u).
    fn gradient(&self, u: &[C64], g: &mut [C64]) {
        let (nx, ny) = (self.nx, self.ny);
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                let mut acc = C64::new(0.0, 0.0);
                let mut degree = 0.0;
                if i + 1 < nx {
                    acc += u[k + 1] * C64::from_polar(1.0, -self.hx(i, j));
                    degree += 1.0;
                }
                if i > 0 {
                    acc += u[k - 1] * C64::from_polar(1.0, self.hx(i - 1, j));
                    degree += 1.0;
                }
                if j + 1 < ny {
                    acc += u[k + nx] * C64::from_polar(1.0, -self.hy(i, j));
                    degree += 1.0;
                }
                if j > 0 {
                    acc += u[k - nx] * C64::from_polar(1.0, self.hy(i, j - 1));
                    degree += 1.0;
                }
                if self.dirichlet {
                    if i == 0 || i == nx - 1 {
                        degree += 1.0;
                    }
                    if j == 0 || j == ny - 1 {
                        degree += 1.0;
                    }
                }
                g[k] = self.b * (degree * u[k] - acc)
                    + self.h2 * (u[k].norm_sqr() - self.alpha) * u[k];
            }
        }
    }

    /// Coefficients (c1..c4) of `F(u + t d) - F(u)`.
    fn line_coeffs(&self, u: &[C64], d: &[C64]) -> (f64, f64, f64, f64) {
        let (nx, ny) = (self.nx, self.ny);
        let mut c1 = 0.0;
        let mut c2 = 0.0;
        let mut c3 = 0.0;
        let mut c4 = 0.0;
        let mut link = |a: C64, bdir: C64| {
            c1 += 2.0 * self.b * (a.conj() * bdir).re;
            c2 += self.b * bdir.norm_sqr();
        };
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                if i + 1 < nx {
                    let ph = C64::from_polar(1.0, -self.hx(i, j));
                    link(u[k + 1] * ph - u[k], d[k + 1] * ph - d[k]);
                }
                if j + 1 < ny {
                    let ph = C64::from_polar(1.0, -self.hy(i, j));
                    link(u[k + nx] * ph - u[k], d[k + nx] * ph - d[k]);
                }
            }
        }
        if self.dirichlet {
            for j in 0..ny {
                for k in [j * nx, j * nx + nx - 1] {
                    link(u[k], d[k]);
                }
            }
            for i in 0..nx {
                for k in [i, (ny - 1) * nx + i] {
                    link(u[k], d[k]);
                }
            }
        }
        for k in 0..u.len() {
            let q0 = self.alpha - u[k].norm_sqr();
            let q1 = -2.0 * (u[k].conj() * d[k]).re;
            let q2 = -d[k].norm_sqr();
            c1 += self.h2 * q0 * q1;
            c2 += 0.5 * self.h2 * (q1 * q1 + 2.0 * q0 * q2);
            c3 += self.h2 * q1 * q2;
            c4 += 0.5 * self.h2 * q2 * q2;
        }
        (c1, c2, c3, c4)
    }
}

fn re_dot(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p.conj() * q).re).sum()
}

/// Polak-Ribiere nonlinear CG with exact quartic line minimization.
fn ncg(ws: &CellWorkspace, u: &mut [C64], opts: &MinimizeOptions) -> (f64, usize) {
    let n = u.len();
    let mut g = vec![C64::new(0.0, 0.0); n];
    let mut g_old = vec![C64::new(0.0, 0.0); n];
    let mut d = vec![C64::new(0.0, 0.0); n];
    ws.gradient(u, &mut g);
    for k in 0..n {
        d[k] = -g[k];
    }
    let mut energy = ws.energy(u);
    let mut stall = 0usize;
    let mut it = 0usize;
    while it < opts.max_iter {
        it += 1;
        let (c1, c2, c3, c4) = ws.line_coeffs(u, &d);
        let mut t = minimize_quartic(c1, c2, c3, c4);
        if t == 0.0 {
            // not a descent direction: restart with steepest descent
            for k in 0..n {
                d[k] = -g[k];
            }
            let (r1, r2, r3, r4) = ws.line_coeffs(u, &d);
            t = minimize_quartic(r1, r2, r3, r4);
            if t == 0.0 {
                break;
            }
            let de = r1 * t + r2 * t * t + r3 * t * t * t + r4 * t * t * t * t;
            for k in 0..n {
                u[k] += t * d[k];
            }
            energy += de;
        } else {
            let de = c1 * t + c2 * t * t + c3 * t * t * t + c4 * t * t * t * t;
            for k in 0..n {
                u[k] += t * d[k];
            }
            energy += de;
            if de.abs() <= opts.tol_rel * energy.abs().max(1.0) {
                stall += 1;
                if stall >= 6 {
                    break;
                }
            } else {
                stall = 0;
            }
        }
        std::mem::swap(&mut g, &mut g_old);
        ws.gradient(u, &mut g);
        let gg_old = re_dot(&g_old, &g_old);
        let beta = if gg_old > 0.0 {
            let num = re_dot(&g, &g) - re_dot(&g, &g_old);
            (num / gg_old).max(0.0)
        } else {
            0.0
        };
        let restart = it.is_multiple_of(250);
        for k in 0..n {
            d[k] = -g[k] + if restart { C64::new(0.0, 0.0) } else { beta * d[k] };
        }
    }
    // drift control: recompute the true energy
    (ws.energy(u), it)
}

/// Ground-state search for the cell problem: the constant-amplitude start
/// plus `opts.seeds` random starts, best local minimum returned. The energy
/// is an upper bound on the discrete infimum.
pub fn minimize_cell(p: &CellProblem, opts: &MinimizeOptions) -> Result<(ComplexField2D, f64)> {
    let grid = p.grid()?;
    let ws = CellWorkspace::new(p, &grid);
    let n = grid.node_count();
    let amp = p.alpha.max(0.0).sqrt();

    let mut inits: Vec<Vec<C64>> = Vec::with_capacity(opts.seeds + 1);
    inits.push(vec![C64::new(amp, 0.0); n]);
    for s in 0..opts.seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed.wrapping_add(s as u64));
        let a = if amp > 0.0 { amp } else { 0.3 };
        inits.push(
            (0..n).map(|_| C64::new(rng.gen_range(-a..a), rng.gen_range(-a..a))).collect(),
        );
    }

    let results: Vec<(Vec<C64>, f64)> = inits
        .into_par_iter()
        .map(|mut u| {
            let (e, _) = ncg(&ws, &mut u, opts);
            (u, e)
        })
        .collect();
    let (u, e) = results
        .into_iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .ok_or_else(|| Error::numerical("no minimization result"))?;
    Ok((ComplexField2D { grid, values: u }, e))
}

/// Both sides of the scaling identity `e(b, R, alpha) = alpha^2 e(b/alpha, R, 1)`,
/// computed by two independent minimizations.
pub fn scaling_check(b: f64, r: f64, alpha: f64, opts: &MinimizeOptions) -> Result<(f64, f64)> {
    if alpha <= 0.0 {
        return Err(Error::invalid("scaling identity needs alpha > 0"));
    }
    let resolution = resolution_for(r);
    let p1 = CellProblem::new(b, alpha, 1, r, Bc::Dirichlet, resolution)?;
    let p2 = CellProblem::new(b / alpha, 1.0, 1, r, Bc::Dirichlet, resolution)?;
    let (_, lhs) = minimize_cell(&p1, opts)?;
    let (_, e2) = minimize_cell(&p2, opts)?;
    Ok((lhs, alpha * alpha * e2))
}

fn resolution_for(r: f64) -> usize {
    // coherence length is 1 in cell units; three nodes per unit resolve the
    // vortex cores at the table tolerances
    ((3.0 * r).ceil() as usize).next_multiple_of(4).max(48)
}

/// One tabulated `fhat` estimate.
#[derive(Debug, Clone, Copy)]
pub struct FhatPoint {
    pub b: f64,
    pub value: f64,
    pub r_used: f64,
    /// Measured convergence gap between the two largest cells.
    pub bound: f64,
    /// True when the resolution/size cap was reached before the target gap.
    pub capped: bool,
}

/// Estimate `fhat(b)` by Dirichlet cell minimization on a geometric `R`
/// schedule with Richardson extrapolation in `1/R`.
pub fn fhat_estimate(b: f64, tol: f64, opts: &MinimizeOptions) -> Result<FhatPoint> {
    if b <= 0.0 {
        return Err(Error::invalid("fhat_estimate needs b > 0"));
    }
    if tol <= 0.0 {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if b >= 1.0 {
        return Ok(FhatPoint { b, value: 0.5, r_used: 0.0, bound: 0.0, capped: false });
    }
    const R_CAP: f64 = 130.0;
    // the square must hold several flux quanta before e_D/R^2 says anything
    let r0 = (2.3 * (2.0 * std::f64::consts::PI / b).sqrt()).max(20.0);
    let mut rs = vec![r0, 1.5 * r0];
    while b.sqrt() / rs.last().unwrap() > tol && rs.last().unwrap() * 1.5 <= R_CAP && rs.len() < 3 {
        let last = *rs.last().unwrap();
        rs.push(1.5 * last);
    }
    let capped = b.sqrt() / rs.last().unwrap() > tol;
    let mut densities = Vec::with_capacity(rs.len());
    for &r in &rs {
        let p = CellProblem::new(b, 1.0, 1, r, Bc::Dirichlet, resolution_for(r))?;
        let (_, e) = minimize_cell(&p, opts)?;
        densities.push(e / (r * r));
    }
    let m = rs.len();
    let (r1, r2) = (rs[m - 2], rs[m - 1]);
    let (e1, e2) = (densities[m - 2], densities[m - 1]);
    let extrapolated = (e2 * r2 - e1 * r1) / (r2 - r1);
    // fhat is a probability-like density in [0, 1/2]
    let value = extrapolated.clamp(0.0, 0.5);
    Ok(FhatPoint { b, value, r_used: r2, bound: (e2 - e1).abs(), capped })
}

/// Tabulated `fhat` with interpolation and asymptotic extensions.
#[derive(Debug, Clone)]
pub struct FhatTable {
    pub points: Vec<FhatPoint>,
}

impl FhatTable {
    /// Build a table over a log-spaced grid in `[b_min, 1]`.
    pub fn build(b_min: f64, n_points: usize, tol: f64, opts: &MinimizeOptions) -> Result<Self> {
        if !(0.0 < b_min && b_min < 1.0) || n_points < 2 {
            return Err(Error::invalid("bad fhat table parameters"));
        }
        let ratio = (1.0 / b_min).ln();
        let bs: Vec<f64> = (0..n_points)
            .map(|k| b_min * (ratio * k as f64 / (n_points - 1) as f64).exp())
            .collect();
        let mut points: Vec<FhatPoint> = bs
            .par_iter()
            .map(|&b| fhat_estimate(b, tol, opts))
            .collect::<Result<Vec<_>>>()?;
        points.sort_by(|a, b| a.b.partial_cmp(&b.b).unwrap());
        Ok(FhatTable { points })
    }

    /// Default 40-point table on `[0.02, 1]`.
    pub fn build_default(opts: &MinimizeOptions) -> Result<Self> {
        Self::build(0.02, 40, 0.02, opts)
    }

    /// Evaluate with the conventions: 0 at 0, 1/2 for `b >= 1`, piecewise
    /// linear inside the table, small-b asymptotics `(b/2) ln(1/b)` below the
    /// first node.
    pub fn eval(&self, b: f64) -> f64 {
        if b <= 0.0 {
            return 0.0;
        }
        if b >= 1.0 {
            return 0.5;
        }
        let first = self.points.first().expect("nonempty table");
        if b < first.b {
            return 0.5 * b * (1.0 / b).ln();
        }
        let mut lo = 0usize;
        let mut hi = self.points.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.points[mid].b <= b {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (pa, pb) = (&self.points[lo], &self.points[hi]);
        if pb.b == pa.b {
            return pa.value;
        }
        let t = (b - pa.b) / (pb.b - pa.b);
        (1.0 - t) * pa.value + t * pb.value
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("b,fhat,r_used,bound\n");
        for p in &self.points {
            out.push_str(&format!("{:.17e},{:.17e},{:.6},{:.3e}\n", p.b, p.value, p.r_used, p.bound));
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut points = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            if ln == 0 || line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() < 4 {
                return Err(Error::Parse(format!("short fhat row at line {}", ln + 1)));
            }
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)))
            };
            points.push(FhatPoint {
                b: parse(cols[0])?,
                value: parse(cols[1])?,
                r_used: parse(cols[2])?,
                bound: parse(cols[3])?,
                capped: false,
            });
        }
        if points.len() < 2 {
            return Err(Error::Parse("fhat table too short".into()));
        }
        points.sort_by(|a, b| a.b.partial_cmp(&b.b).unwrap());
        Ok(FhatTable { points })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_opts() -> MinimizeOptions {
        MinimizeOptions { seeds: 2, tol_rel: 1e-10, max_iter: 1500, rng_seed: 11 }
    }

    #[test]
    fn zero_state_energy_positive_alpha() {
        let p = CellProblem::new(0.5, 1.0, 1, 8.0, Bc::Dirichlet, 32).unwrap();
        let g = p.grid().unwrap();
        let u = ComplexField2D::zeros(g);
        let e = cell_energy(&u, &p).unwrap();
        assert!((e - 8.0 * 8.0 / 2.0).abs() < 1e-10, "e = {e}");
    }

    #[test]
    fn zero_state_energy_negative_alpha() {
        let p = CellProblem::new(0.5, -1.0, 1, 8.0, Bc::Dirichlet, 32).unwrap();
        let g = p.grid().unwrap();
        let u = ComplexField2D::zeros(g);
        let e = cell_energy(&u, &p).unwrap();
        assert!((e - 32.0).abs() < 1e-10, "e = {e}");
    }

    #[test]
    fn conjugation_swaps_zeta_exactly() {
        use rand::{Rng, SeedableRng};
        let p_plus = CellProblem::new(0.7, 1.0, 1, 6.0, Bc::Dirichlet, 48).unwrap();
        let p_minus = CellProblem::new(0.7, 1.0, -1, 6.0, Bc::Dirichlet, 48).unwrap();
        let g = p_plus.grid().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = ComplexField2D::from_fn(g, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
        .unwrap();
        let e1 = cell_energy(&u, &p_plus).unwrap();
        let e2 = cell_energy(&u.conj(), &p_minus).unwrap();
        assert!((e1 - e2).abs() <= 1e-12 * e1.abs().max(1.0));
    }

    #[test]
    fn negative_alpha_minimizer_is_zero() {
        let p = CellProblem::new(0.5, -1.0, 1, 8.0, Bc::Dirichlet, 32).unwrap();
        let (u, e) = minimize_cell(&p, &quick_opts()).unwrap();
        assert!((e / 64.0 - 0.5).abs() < 1e-9, "density {}", e / 64.0);
        assert!(u.sup_abs() < 1e-4);
    }

    #[test]
    fn minimizer_amplitude_bound() {
        // |u| <= sqrt(alpha) for minimizers
        let p = CellProblem::new(0.4, 1.5, 1, 10.0, Bc::Dirichlet, 40).unwrap();
        let (u, _) = minimize_cell(&p, &quick_opts()).unwrap();
        assert!(u.sup_abs() <= 1.5f64.sqrt() + 1e-6, "sup {}", u.sup_abs());
    }

    #[test]
    fn no_field_energy_vanishes() {
        // b = 0: the kinetic term drops out and |u| = 1 has zero energy
        let p = CellProblem::new(0.0, 1.0, 1, 8.0, Bc::Dirichlet, 32).unwrap();
        let (_, e) = minimize_cell(&p, &quick_opts()).unwrap();
        assert!(e.abs() < 1e-8, "e = {e}");
    }

    #[test]
    fn weak_field_dirichlet_density_shrinks_with_r() {
        // below one flux quantum the energy is a boundary layer ~ C R,
        // so energy / R^2 ~ C / R
        let opts = quick_opts();
        let b = 0.02;
        let mut densities = Vec::new();
        for r in [6.0, 12.0] {
            let p = CellProblem::new(b, 1.0, 1, r, Bc::Dirichlet, resolution_for(r)).unwrap();
            let (_, e) = minimize_cell(&p, &opts).unwrap();
            densities.push(e / (r * r));
        }
        assert!(densities[1] < 0.65 * densities[0], "densities {densities:?}");
    }

    #[test]
    fn neumann_below_dirichlet() {
        let opts = quick_opts();
        let r = 10.0;
        let pn = CellProblem::new(0.5, 1.0, 1, r, Bc::Neumann, resolution_for(r)).unwrap();
        let pd = CellProblem::new(0.5, 1.0, 1, r, Bc::Dirichlet, resolution_for(r)).unwrap();
        let (_, en) = minimize_cell(&pn, &opts).unwrap();
        let (_, ed) = minimize_cell(&pd, &opts).unwrap();
        assert!(en <= ed + 1e-8, "e_N = {en}, e_D = {ed}");
    }

    #[test]
    fn neumann_dirichlet_gap_grows_at_most_linearly_in_r() {
        // e_N >= e_D - C R sqrt(b): the gap is a perimeter term
        let opts = quick_opts();
        let b = 0.5;
        let mut per_r = Vec::new();
        for r in [8.0, 16.0] {
            let res = resolution_for(r);
            let pn = CellProblem::new(b, 1.0, 1, r, Bc::Neumann, res).unwrap();
            let pd = CellProblem::new(b, 1.0, 1, r, Bc::Dirichlet, res).unwrap();
            let (_, en) = minimize_cell(&pn, &opts).unwrap();
            let (_, ed) = minimize_cell(&pd, &opts).unwrap();
            per_r.push((ed - en).max(0.0) / r);
        }
        // doubling R should not much more than double the gap
        assert!(per_r[1] <= 1.6 * per_r[0] + 1e-6, "gap per unit side {per_r:?}");
    }

    #[test]
    fn fhat_saturates_at_one() {
        let opts = quick_opts();
        let p = fhat_estimate(1.0, 0.05, &opts).unwrap();
        assert_eq!(p.value, 0.5);
        let p2 = fhat_estimate(3.0, 0.05, &opts).unwrap();
        assert_eq!(p2.value, 0.5);
    }

    #[test]
    fn fhat_eval_conventions() {
        let table = FhatTable {
            points: vec![
                FhatPoint { b: 0.1, value: 0.1, r_used: 20.0, bound: 0.0, capped: false },
                FhatPoint { b: 0.5, value: 0.3, r_used: 20.0, bound: 0.0, capped: false },
                FhatPoint { b: 1.0, value: 0.5, r_used: 20.0, bound: 0.0, capped: false },
            ],
        };
        assert_eq!(table.eval(0.0), 0.0);
        assert_eq!(table.eval(5.0), 0.5);
        // interior: convex combination of neighbors
        let v = table.eval(0.3);
        assert!((v - 0.2).abs() < 1e-12);
        // below the table: small-b law
        let b = 0.01;
        assert!((table.eval(b) - 0.5 * b * (1.0 / b).ln()).abs() < 1e-15);
    }

    #[test]
    fn scaling_identity_exact_for_matched_descent() {
        let opts = MinimizeOptions { seeds: 1, tol_rel: 1e-12, max_iter: 1200, rng_seed: 3 };
        let (lhs, rhs) = scaling_check(0.5, 8.0, 2.0, &opts).unwrap();
        let rel = (lhs - rhs).abs() / lhs.abs().max(1.0);
        assert!(rel < 1e-6, "lhs {lhs} rhs {rhs} rel {rel}");
    }
}
