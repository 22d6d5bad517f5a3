//! Scalar, complex and gauge-link fields on a [`Grid2D`], masked midpoint
//! quadrature and the gauge-covariant energy density.
//!
//! The vector potential is stored in Peierls form: one real number per grid
//! edge holding the line integral of `A` along that edge. Covariant
//! differences built from these links are exactly gauge covariant on the
//! lattice.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::C64;

const MAGIC_SCALAR: u32 = u32::from_le_bytes(*b"GLF1");
const MAGIC_COMPLEX: u32 = u32::from_le_bytes(*b"GLC1");

/// Real-valued field, one value per grid node.
#[derive(Debug, Clone)]
pub struct ScalarField2D {
    pub grid: Arc<Grid2D>,
    pub values: Vec<f64>,
}

/// Complex-valued field, one value per grid node.
#[derive(Debug, Clone)]
pub struct ComplexField2D {
    pub grid: Arc<Grid2D>,
    pub values: Vec<C64>,
}

/// One real link value per grid edge: `hx[j*(nx-1)+i]` is the integral of `A`
/// along the edge from node `(i,j)` to `(i+1,j)`, `hy[j*nx+i]` along the edge
/// from `(i,j)` to `(i,j+1)`.
#[derive(Debug, Clone)]
pub struct LinkField2D {
    pub grid: Arc<Grid2D>,
    pub hx: Vec<f64>,
    pub hy: Vec<f64>,
}

impl ScalarField2D {
    pub fn zeros(grid: Arc<Grid2D>) -> Self {
        let n = grid.node_count();
        ScalarField2D { grid, values: vec![0.0; n] }
    }

    pub fn from_fn(grid: Arc<Grid2D>, mut f: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        let mut values = vec![0.0; grid.node_count()];
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let (x, y) = grid.pos(i, j);
                values[grid.idx(i, j)] = f(x, y);
            }
        }
        let out = ScalarField2D { grid, values };
        out.check_finite()?;
        Ok(out)
    }

    pub fn constant(grid: Arc<Grid2D>, c: f64) -> Self {
        let n = grid.node_count();
        ScalarField2D { grid, values: vec![c; n] }
    }

    fn check_finite(&self) -> Result<()> {
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("field contains non-finite values"));
        }
        Ok(())
    }

    /// Maximum over inside nodes.
    pub fn sup_inside(&self) -> f64 {
        self.grid
            .inside()
            .iter()
            .zip(&self.values)
            .filter(|(m, _)| **m)
            .map(|(_, v)| *v)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Minimum over inside nodes.
    pub fn inf_inside(&self) -> f64 {
        self.grid
            .inside()
            .iter()
            .zip(&self.values)
            .filter(|(m, _)| **m)
            .map(|(_, v)| *v)
            .fold(f64::INFINITY, f64::min)
    }

    /// Bilinear interpolation at a point, clamped to the grid box.
    pub fn interp(&self, x: f64, y: f64) -> f64 {
        let g = &self.grid;
        let fx = ((x - g.origin.0) / g.h - 0.5).clamp(0.0, (g.nx - 1) as f64);
        let fy = ((y - g.origin.1) / g.h - 0.5).clamp(0.0, (g.ny - 1) as f64);
        let i0 = (fx.floor() as usize).min(g.nx - 2);
        let j0 = (fy.floor() as usize).min(g.ny - 2);
        let tx = fx - i0 as f64;
        let ty = fy - j0 as f64;
        let v = |i: usize, j: usize| self.values[g.idx(i, j)];
        (1.0 - tx) * (1.0 - ty) * v(i0, j0)
            + tx * (1.0 - ty) * v(i0 + 1, j0)
            + (1.0 - tx) * ty * v(i0, j0 + 1)
            + tx * ty * v(i0 + 1, j0 + 1)
    }

    /// Write `(x, y, value)` rows for every node.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("x,y,value\n");
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let (x, y) = self.grid.pos(i, j);
                out.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", x, y, self.values[self.grid.idx(i, j)]));
            }
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    /// Read a field written by [`ScalarField2D::write_csv`]. The nodes must
    /// form a full rectangular lattice.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut xs: Vec<f64> = Vec::new();
        let mut rows: Vec<(f64, f64, f64)> = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            if ln == 0 && line.starts_with('x') {
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split(',');
            let mut next = || -> Result<f64> {
                it.next()
                    .ok_or_else(|| Error::Parse(format!("short row at line {}", ln + 1)))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)))
            };
            let (x, y, v) = (next()?, next()?, next()?);
            if !v.is_finite() {
                return Err(Error::invalid("CSV field contains non-finite values"));
            }
            xs.push(x);
            rows.push((x, y, v));
        }
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let nx = xs.len();
        if nx < 2 || !rows.len().is_multiple_of(nx) {
            return Err(Error::Parse("CSV rows do not form a rectangular lattice".into()));
        }
        let ny = rows.len() / nx;
        let h = xs[1] - xs[0];
        let x0 = xs[0] - 0.5 * h;
        let y0 = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min) - 0.5 * h;
        let grid = Arc::new(Grid2D::from_mask(nx, ny, h, (x0, y0), vec![true; nx * ny])?);
        let mut values = vec![0.0; nx * ny];
        for (x, y, v) in rows {
            let i = ((x - x0) / h - 0.5).round() as usize;
            let j = ((y - y0) / h - 0.5).round() as usize;
            values[grid.idx(i.min(nx - 1), j.min(ny - 1))] = v;
        }
        Ok(ScalarField2D { grid, values })
    }

    /// Binary row-major dump with a 16-byte header:
    /// magic `u32`, `nx: u16`, `ny: u16`, `h: f64`, all little endian.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        write_header(&mut f, MAGIC_SCALAR, &self.grid)?;
        for v in &self.values {
            f.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(path: &Path) -> Result<Self> {
        let mut f = std::fs::File::open(path)?;
        let (nx, ny, h) = read_header(&mut f, MAGIC_SCALAR)?;
        let mut values = vec![0.0; nx * ny];
        let mut buf = [0u8; 8];
        for v in values.iter_mut() {
            f.read_exact(&mut buf)?;
            *v = f64::from_le_bytes(buf);
            if !v.is_finite() {
                return Err(Error::invalid("binary field contains non-finite values"));
            }
        }
        let grid = Arc::new(Grid2D::from_mask(nx, ny, h, (0.0, 0.0), vec![true; nx * ny])?);
        Ok(ScalarField2D { grid, values })
    }
}

impl ComplexField2D {
    pub fn zeros(grid: Arc<Grid2D>) -> Self {
        let n = grid.node_count();
        ComplexField2D { grid, values: vec![C64::new(0.0, 0.0); n] }
    }

    pub fn from_fn(grid: Arc<Grid2D>, mut f: impl FnMut(f64, f64) -> C64) -> Result<Self> {
        let mut values = vec![C64::new(0.0, 0.0); grid.node_count()];
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let (x, y) = grid.pos(i, j);
                values[grid.idx(i, j)] = f(x, y);
            }
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid("field contains non-finite values"));
        }
        Ok(ComplexField2D { grid, values })
    }

    pub fn conj(&self) -> Self {
        ComplexField2D {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// `|psi|^2` as a scalar field.
    pub fn norm_sq_field(&self) -> ScalarField2D {
        ScalarField2D {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.norm_sqr()).collect(),
        }
    }

    /// `L^2` norm over inside nodes (with the `h^2` weight).
    pub fn l2_norm(&self) -> f64 {
        let h2 = self.grid.h * self.grid.h;
        let s: f64 = self
            .grid
            .inside()
            .iter()
            .zip(&self.values)
            .filter(|(m, _)| **m)
            .map(|(_, v)| v.norm_sqr())
            .sum();
        (h2 * s).sqrt()
    }

    /// `L^4` norm over inside nodes.
    pub fn l4_norm(&self) -> f64 {
        let h2 = self.grid.h * self.grid.h;
        let s: f64 = self
            .grid
            .inside()
            .iter()
            .zip(&self.values)
            .filter(|(m, _)| **m)
            .map(|(_, v)| v.norm_sqr().powi(2))
            .sum();
        (h2 * s).powf(0.25)
    }

    pub fn sup_abs(&self) -> f64 {
        self.grid
            .inside()
            .iter()
            .zip(&self.values)
            .filter(|(m, _)| **m)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        write_header(&mut f, MAGIC_COMPLEX, &self.grid)?;
        for v in &self.values {
            f.write_all(&v.re.to_le_bytes())?;
            f.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(path: &Path) -> Result<Self> {
        let mut f = std::fs::File::open(path)?;
        let (nx, ny, h) = read_header(&mut f, MAGIC_COMPLEX)?;
        let mut values = vec![C64::new(0.0, 0.0); nx * ny];
        let mut buf = [0u8; 16];
        for v in values.iter_mut() {
            f.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf[0..8].try_into().unwrap());
            let im = f64::from_le_bytes(buf[8..16].try_into().unwrap());
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::invalid("binary field contains non-finite values"));
            }
            *v = C64::new(re, im);
        }
        let grid = Arc::new(Grid2D::from_mask(nx, ny, h, (0.0, 0.0), vec![true; nx * ny])?);
        Ok(ComplexField2D { grid, values })
    }
}

impl LinkField2D {
    pub fn zeros(grid: Arc<Grid2D>) -> Self {
        let hx = vec![0.0; (grid.nx - 1) * grid.ny];
        let hy = vec![0.0; grid.nx * (grid.ny - 1)];
        LinkField2D { grid, hx, hy }
    }

    /// Build links by exact integration of an affine-in-each-variable vector
    /// potential: the midpoint value times the edge length.
    pub fn from_potential(grid: Arc<Grid2D>, a: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let mut lf = LinkField2D::zeros(grid.clone());
        let h = grid.h;
        for j in 0..grid.ny {
            for i in 0..grid.nx - 1 {
                let (x, y) = grid.pos(i, j);
                lf.hx[j * (grid.nx - 1) + i] = a(x + 0.5 * h, y).0 * h;
            }
        }
        for j in 0..grid.ny - 1 {
            for i in 0..grid.nx {
                let (x, y) = grid.pos(i, j);
                lf.hy[j * grid.nx + i] = a(x, y + 0.5 * h).1 * h;
            }
        }
        lf
    }

    #[inline]
    pub fn hx_at(&self, i: usize, j: usize) -> f64 {
        self.hx[j * (self.grid.nx - 1) + i]
    }

    #[inline]
    pub fn hy_at(&self, i: usize, j: usize) -> f64 {
        self.hy[j * self.grid.nx + i]
    }

    /// Circulation around the plaquette with lower-left node `(i, j)`.
    #[inline]
    pub fn plaquette(&self, i: usize, j: usize) -> f64 {
        self.hx_at(i, j) + self.hy_at(i + 1, j) - self.hx_at(i, j + 1) - self.hy_at(i, j)
    }

    /// `a + c * b` linkwise.
    pub fn add_scaled(&self, other: &LinkField2D, c: f64) -> LinkField2D {
        LinkField2D {
            grid: self.grid.clone(),
            hx: self.hx.iter().zip(&other.hx).map(|(a, b)| a + c * b).collect(),
            hy: self.hy.iter().zip(&other.hy).map(|(a, b)| a + c * b).collect(),
        }
    }
}

fn write_header(f: &mut std::fs::File, magic: u32, grid: &Grid2D) -> Result<()> {
    if grid.nx > u16::MAX as usize || grid.ny > u16::MAX as usize {
        return Err(Error::invalid("grid too large for binary header"));
    }
    f.write_all(&magic.to_le_bytes())?;
    f.write_all(&(grid.nx as u16).to_le_bytes())?;
    f.write_all(&(grid.ny as u16).to_le_bytes())?;
    f.write_all(&grid.h.to_le_bytes())?;
    Ok(())
}

fn read_header(f: &mut std::fs::File, magic: u32) -> Result<(usize, usize, f64)> {
    let mut hdr = [0u8; 16];
    f.read_exact(&mut hdr)?;
    let m = u32::from_le_bytes(hdr[0..4].try_into().unwrap());
    if m != magic {
        return Err(Error::Parse("bad magic in binary field header".into()));
    }
    let nx = u16::from_le_bytes(hdr[4..6].try_into().unwrap()) as usize;
    let ny = u16::from_le_bytes(hdr[6..8].try_into().unwrap()) as usize;
    let h = f64::from_le_bytes(hdr[8..16].try_into().unwrap());
    Ok((nx, ny, h))
}

/// Midpoint quadrature `h^2 * sum f` over nodes where `mask` is true.
pub fn integrate(f: &ScalarField2D, mask: &[bool]) -> Result<f64> {
    if mask.len() != f.values.len() {
        return Err(Error::GridMismatch("mask length differs from field".into()));
    }
    let h2 = f.grid.h * f.grid.h;
    Ok(h2 * dot_masked(&f.values, mask))
}

/// Deterministic chunked sum, independent of the rayon worker count.
fn dot_masked(values: &[f64], mask: &[bool]) -> f64 {
    const CHUNK: usize = 4096;
    let partials: Vec<f64> = values
        .chunks(CHUNK)
        .zip(mask.chunks(CHUNK))
        .map(|(vs, ms)| vs.iter().zip(ms).filter(|(_, m)| **m).map(|(v, _)| *v).sum())
        .collect();
    partials.iter().sum()
}

/// Gauge-covariant kinetic energy density
/// `sum_e |psi_{j+e} e^{-i c theta_e} - psi_j|^2 / h^2` over the +x and +y
/// links of each node (links with an endpoint outside the mask are skipped,
/// which is the natural Neumann condition).
pub fn covariant_energy_density(
    psi: &ComplexField2D,
    link: &LinkField2D,
    coupling: f64,
) -> Result<ScalarField2D> {
    if !psi.grid.same_shape(&link.grid) {
        return Err(Error::GridMismatch("psi and link field on different grids".into()));
    }
    let g = &psi.grid;
    let inv_h2 = 1.0 / (g.h * g.h);
    let mut out = ScalarField2D::zeros(psi.grid.clone());
    for j in 0..g.ny {
        for i in 0..g.nx {
            if !g.is_inside(i, j) {
                continue;
            }
            let k = g.idx(i, j);
            let mut acc = 0.0;
            if i + 1 < g.nx && g.is_inside(i + 1, j) {
                let th = coupling * link.hx_at(i, j);
                let d = psi.values[g.idx(i + 1, j)] * C64::from_polar(1.0, -th) - psi.values[k];
                acc += d.norm_sqr();
            }
            if j + 1 < g.ny && g.is_inside(i, j + 1) {
                let th = coupling * link.hy_at(i, j);
                let d = psi.values[g.idx(i, j + 1)] * C64::from_polar(1.0, -th) - psi.values[k];
                acc += d.norm_sqr();
            }
            out.values[k] = acc * inv_h2;
        }
    }
    Ok(out)
}

/// Split the inside nodes into `{a > 0}` and `{a <= 0}`.
pub fn sublevel_masks(a: &ScalarField2D) -> (Vec<bool>, Vec<bool>) {
    let inside = a.grid.inside();
    let pos: Vec<bool> = a.values.iter().zip(inside).map(|(v, m)| *m && *v > 0.0).collect();
    let nonpos: Vec<bool> = a.values.iter().zip(inside).map(|(v, m)| *m && *v <= 0.0).collect();
    (pos, nonpos)
}

/// Number of lattice squares `Q_ell(gamma)`, `gamma` on the `ell Z^2` lattice
/// inside the domain, that meet both `{a > 0}` and `{a <= 0}`.
pub fn count_boundary_squares(a: &ScalarField2D, ell: f64) -> Result<usize> {
    let g = &a.grid;
    if ell < 2.0 * g.h {
        return Err(Error::invalid(format!(
            "square side {ell} cannot be resolved on spacing {}",
            g.h
        )));
    }
    let diam = (g.nx as f64).hypot(g.ny as f64) * g.h;
    if ell <= 0.0 || ell >= diam {
        return Err(Error::invalid("square side out of range"));
    }
    let (x0, y0) = g.origin;
    let x1 = x0 + g.nx as f64 * g.h;
    let y1 = y0 + g.ny as f64 * g.h;
    let kmin = (x0 / ell).floor() as i64;
    let kmax = (x1 / ell).ceil() as i64;
    let mmin = (y0 / ell).floor() as i64;
    let mmax = (y1 / ell).ceil() as i64;
    let mut count = 0usize;
    for m in mmin..=mmax {
        for k in kmin..=kmax {
            let cx = k as f64 * ell;
            let cy = m as f64 * ell;
            // gamma must lie in the domain
            let gi = ((cx - x0) / g.h - 0.5).round();
            let gj = ((cy - y0) / g.h - 0.5).round();
            if gi < 0.0 || gj < 0.0 {
                continue;
            }
            if !g.is_inside(gi as usize, gj as usize) {
                continue;
            }
            let mut has_pos = false;
            let mut has_nonpos = false;
            let ilo = (((cx - ell / 2.0) - x0) / g.h - 0.5).ceil().max(0.0) as usize;
            let ihi = ((((cx + ell / 2.0) - x0) / g.h - 0.5).floor() as usize).min(g.nx - 1);
            let jlo = (((cy - ell / 2.0) - y0) / g.h - 0.5).ceil().max(0.0) as usize;
            let jhi = ((((cy + ell / 2.0) - y0) / g.h - 0.5).floor() as usize).min(g.ny - 1);
            'scan: for j in jlo..=jhi {
                for i in ilo..=ihi {
                    if !g.is_inside(i, j) {
                        continue;
                    }
                    if a.values[g.idx(i, j)] > 0.0 {
                        has_pos = true;
                    } else {
                        has_nonpos = true;
                    }
                    if has_pos && has_nonpos {
                        break 'scan;
                    }
                }
            }
            if has_pos && has_nonpos {
                count += 1;
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn unit(n: usize) -> Arc<Grid2D> {
        Arc::new(Grid2D::unit_square(n).unwrap())
    }

    #[test]
    fn integrate_constant_one() {
        let g = unit(64);
        let f = ScalarField2D::constant(g.clone(), 1.0);
        let v = integrate(&f, g.inside()).unwrap();
        assert!((v - 1.0).abs() < g.h);
    }

    #[test]
    fn integrate_zero_exact() {
        let g = unit(16);
        let f = ScalarField2D::zeros(g.clone());
        assert_eq!(integrate(&f, g.inside()).unwrap(), 0.0);
    }

    #[test]
    fn integrate_linear_halves() {
        // f = x1 over the unit square; midpoint rule is exact for linear f
        let g = unit(50);
        let f = ScalarField2D::from_fn(g.clone(), |x, _| x).unwrap();
        let v = integrate(&f, g.inside()).unwrap();
        assert!((v - 0.5).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn quadrature_first_order_on_lipschitz() {
        // |x-1/3| is Lipschitz; error should shrink at least first order
        let exact = {
            // integral of |x - 1/3| over [0,1]
            let c: f64 = 1.0 / 3.0;
            c * c / 2.0 + (1.0 - c) * (1.0 - c) / 2.0
        };
        let mut errs = Vec::new();
        for n in [16usize, 32, 64, 128] {
            let g = unit(n);
            let f = ScalarField2D::from_fn(g.clone(), |x, _| (x - 1.0 / 3.0).abs()).unwrap();
            errs.push((integrate(&f, g.inside()).unwrap() - exact).abs().max(1e-16));
        }
        for w in errs.windows(2) {
            assert!(w[1] < w[0] * 0.75 + 1e-12, "errors {errs:?}");
        }
    }

    #[test]
    fn grid_mismatch_rejected() {
        let g = unit(16);
        let f = ScalarField2D::constant(g, 1.0);
        let bad_mask = vec![true; 17 * 17];
        assert!(integrate(&f, &bad_mask).is_err());
    }

    #[test]
    fn density_zero_for_constant_psi_no_field() {
        let g = unit(32);
        let psi = ComplexField2D::from_fn(g.clone(), |_, _| C64::new(1.0, 0.0)).unwrap();
        let link = LinkField2D::zeros(g.clone());
        let d = covariant_energy_density(&psi, &link, 3.0).unwrap();
        assert!(d.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn density_plane_wave() {
        // psi = e^{ikx}, A = 0: density ~ k^2 with O(h^2 k^4) error
        let k = 3.0;
        let g = unit(256);
        let psi = ComplexField2D::from_fn(g.clone(), |x, _| C64::from_polar(1.0, k * x)).unwrap();
        let link = LinkField2D::zeros(g.clone());
        let d = covariant_energy_density(&psi, &link, 1.0).unwrap();
        let mid = d.values[g.idx(128, 128)];
        let expected = k * k;
        assert!((mid - expected).abs() < 0.01 * expected, "got {mid}, want ~{expected}");
    }

    #[test]
    fn density_gauge_covariant() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let g = unit(24);
        let coupling = 2.5;
        let psi = ComplexField2D::from_fn(g.clone(), |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
        .unwrap();
        let mut rng2 = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let chi = ScalarField2D::from_fn(g.clone(), |_, _| rng2.gen_range(-2.0..2.0)).unwrap();
        let mut link = LinkField2D::zeros(g.clone());
        let mut rng3 = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for v in link.hx.iter_mut().chain(link.hy.iter_mut()) {
            *v = rng3.gen_range(-0.5..0.5);
        }
        let d0 = covariant_energy_density(&psi, &link, coupling).unwrap();

        // gauge transform: psi -> e^{i chi} psi, link -> link + (d chi)/coupling
        let psi2 = ComplexField2D {
            grid: g.clone(),
            values: psi
                .values
                .iter()
                .zip(&chi.values)
                .map(|(p, c)| p * C64::from_polar(1.0, *c))
                .collect(),
        };
        let mut link2 = link.clone();
        for j in 0..g.ny {
            for i in 0..g.nx - 1 {
                link2.hx[j * (g.nx - 1) + i] +=
                    (chi.values[g.idx(i + 1, j)] - chi.values[g.idx(i, j)]) / coupling;
            }
        }
        for j in 0..g.ny - 1 {
            for i in 0..g.nx {
                link2.hy[j * g.nx + i] +=
                    (chi.values[g.idx(i, j + 1)] - chi.values[g.idx(i, j)]) / coupling;
            }
        }
        let d1 = covariant_energy_density(&psi2, &link2, coupling).unwrap();
        let mut worst = 0.0f64;
        for (a, b) in d0.values.iter().zip(&d1.values) {
            let scale = a.abs().max(1.0);
            worst = worst.max((a - b).abs() / scale);
        }
        assert!(worst < 1e-12, "gauge covariance violated: {worst}");
    }

    #[test]
    fn sublevel_masks_split() {
        let g = unit(40);
        let a = ScalarField2D::from_fn(g.clone(), |x, _| x - 0.5).unwrap();
        let (pos, nonpos) = sublevel_masks(&a);
        let np = pos.iter().filter(|b| **b).count();
        let nn = nonpos.iter().filter(|b| **b).count();
        assert_eq!(np + nn, g.inside_count());
        assert!(pos.iter().zip(&nonpos).all(|(p, n)| !(*p && *n)));
        let half = (g.inside_count() / 2) as f64;
        assert!((np as f64 - half).abs() <= g.nx as f64);
    }

    #[test]
    fn all_positive_no_interface_squares() {
        let g = unit(40);
        let a = ScalarField2D::constant(g, 1.0);
        assert_eq!(count_boundary_squares(&a, 0.1).unwrap(), 0);
    }

    #[test]
    fn straight_interface_square_count() {
        let g = unit(200);
        let a = ScalarField2D::from_fn(g.clone(), |x, _| x - 0.5).unwrap();
        let c = count_boundary_squares(&a, 0.1).unwrap();
        assert!((8..=12).contains(&c), "got {c}");
    }

    #[test]
    fn interface_length_stable_under_refinement() {
        // count * ell should approach the interface length (here 1.0)
        let g = unit(512);
        let a = ScalarField2D::from_fn(g.clone(), |x, y| x - 0.45 - 0.05 * (y * 3.0).sin()).unwrap();
        let mut prods = Vec::new();
        for ell in [0.2, 0.1, 0.05, 0.025] {
            let c = count_boundary_squares(&a, ell).unwrap();
            prods.push(c as f64 * ell);
        }
        // interface is nearly vertical with length ~ 1.01
        let last = *prods.last().unwrap();
        assert!((last - 1.01).abs() / 1.01 < 0.10, "products {prods:?}");
        assert!(prods.iter().all(|p| *p < 3.0), "products {prods:?}");
    }

    #[test]
    fn too_small_square_rejected() {
        let g = unit(32);
        let a = ScalarField2D::constant(g.clone(), 1.0);
        assert!(count_boundary_squares(&a, g.h).is_err());
    }

    #[test]
    fn binary_roundtrip() {
        let dir = std::env::temp_dir().join("glpin_field_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let g = unit(16);
        let f = ScalarField2D::from_fn(g.clone(), |x, y| x * y + 0.25).unwrap();
        let p = dir.join("f.bin");
        f.write_binary(&p).unwrap();
        let f2 = ScalarField2D::read_binary(&p).unwrap();
        assert_eq!(f.values, f2.values);
        assert_eq!(f2.grid.nx, 16);

        let c = ComplexField2D::from_fn(g.clone(), |x, y| C64::new(x, -y)).unwrap();
        let pc = dir.join("c.bin");
        c.write_binary(&pc).unwrap();
        let c2 = ComplexField2D::read_binary(&pc).unwrap();
        assert_eq!(c.values, c2.values);
    }

    #[test]
    fn csv_roundtrip() {
        let dir = std::env::temp_dir().join("glpin_field_csv_test");
        std::fs::create_dir_all(&dir).unwrap();
        let g = unit(12);
        let f = ScalarField2D::from_fn(g, |x, y| 2.0 * x - y).unwrap();
        let p = dir.join("f.csv");
        f.write_csv(&p).unwrap();
        let f2 = ScalarField2D::read_csv(&p).unwrap();
        assert_eq!(f2.grid.nx, 12);
        for (a, b) in f.values.iter().zip(&f2.values) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
