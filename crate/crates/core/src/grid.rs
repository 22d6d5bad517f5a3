//! Cell-centered Cartesian grids with an inside mask and boundary
//! classification. Node `(i, j)` sits at the center of an `h x h` cell, so the
//! midpoint quadrature rule is `h^2 * sum` over masked nodes.

use crate::error::{Error, Result};

/// Outward normal tag of a boundary node, one of the eight lattice directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Normal {
    pub dx: i8,
    pub dy: i8,
}

/// An inside node with at least one 4-neighbor outside the mask.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryNode {
    pub idx: usize,
    pub normal: Normal,
}

/// Rectangular discretization of a planar domain.
#[derive(Debug, Clone)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub origin: (f64, f64),
    inside: Vec<bool>,
    boundary: Vec<BoundaryNode>,
}

impl Grid2D {
    /// Grid over `[origin, origin + (nx h, ny h)]` with the given mask.
    pub fn from_mask(
        nx: usize,
        ny: usize,
        h: f64,
        origin: (f64, f64),
        inside: Vec<bool>,
    ) -> Result<Self> {
        if h <= 0.0 || !h.is_finite() {
            return Err(Error::invalid(format!("grid spacing h = {h} must be positive")));
        }
        if nx < 4 || ny < 4 {
            return Err(Error::invalid(format!("grid must be at least 4x4, got {nx}x{ny}")));
        }
        if inside.len() != nx * ny {
            return Err(Error::invalid("mask length does not match node count"));
        }
        let mut grid = Grid2D { nx, ny, h, origin, inside, boundary: Vec::new() };
        grid.classify_boundary()?;
        grid.check_connected()?;
        Ok(grid)
    }

    /// Uniform grid on the unit square `[0,1]^2`, all nodes inside.
    pub fn unit_square(n: usize) -> Result<Self> {
        Self::square(n, 1.0, (0.0, 0.0))
    }

    /// Fully masked square of side `side` with lower-left corner `origin`.
    pub fn square(n: usize, side: f64, origin: (f64, f64)) -> Result<Self> {
        Self::from_mask(n, n, side / n as f64, origin, vec![true; n * n])
    }

    /// Square of side `side` centered at the origin (used by the cell problem).
    pub fn centered_square(n: usize, side: f64) -> Result<Self> {
        Self::square(n, side, (-side / 2.0, -side / 2.0))
    }

    /// Disk of radius `r` centered at `center`, masked on its bounding box.
    pub fn disk(n: usize, center: (f64, f64), r: f64) -> Result<Self> {
        let h = 2.0 * r / n as f64;
        let origin = (center.0 - r, center.1 - r);
        let mut inside = vec![false; n * n];
        for j in 0..n {
            for i in 0..n {
                let x = origin.0 + (i as f64 + 0.5) * h;
                let y = origin.1 + (j as f64 + 0.5) * h;
                let d2 = (x - center.0).powi(2) + (y - center.1).powi(2);
                inside[j * n + i] = d2 <= r * r;
            }
        }
        Self::from_mask(n, n, h, origin, inside)
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Coordinates of the node (cell center) `(i, j)`.
    #[inline]
    pub fn pos(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.origin.0 + (i as f64 + 0.5) * self.h,
            self.origin.1 + (j as f64 + 0.5) * self.h,
        )
    }

    #[inline]
    pub fn is_inside(&self, i: usize, j: usize) -> bool {
        i < self.nx && j < self.ny && self.inside[j * self.nx + i]
    }

    #[inline]
    pub fn inside(&self) -> &[bool] {
        &self.inside
    }

    pub fn boundary_nodes(&self) -> &[BoundaryNode] {
        &self.boundary
    }

    pub fn node_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn inside_count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    /// Area of the masked region under midpoint quadrature.
    pub fn inside_area(&self) -> f64 {
        self.inside_count() as f64 * self.h * self.h
    }

    pub fn same_shape(&self, other: &Grid2D) -> bool {
        self.nx == other.nx && self.ny == other.ny && (self.h - other.h).abs() < 1e-14
    }

    fn classify_boundary(&mut self) -> Result<()> {
        let (nx, ny) = (self.nx, self.ny);
        let mut boundary = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                if !self.inside[j * nx + i] {
                    continue;
                }
                let mut dx = 0i32;
                let mut dy = 0i32;
                let mut outside_neighbors = 0;
                let mut inside_neighbors = 0;
                let visit = |ii: i64, jj: i64, ddx: i32, ddy: i32, s: &Grid2D| {
                    let inb = ii >= 0
                        && jj >= 0
                        && (ii as usize) < nx
                        && (jj as usize) < ny
                        && s.inside[jj as usize * nx + ii as usize];
                    (inb, ddx, ddy)
                };
                for (ii, jj, ddx, ddy) in [
                    (i as i64 - 1, j as i64, -1, 0),
                    (i as i64 + 1, j as i64, 1, 0),
                    (i as i64, j as i64 - 1, 0, -1),
                    (i as i64, j as i64 + 1, 0, 1),
                ] {
                    let (inb, ddx, ddy) = visit(ii, jj, ddx, ddy, self);
                    if inb {
                        inside_neighbors += 1;
                    } else {
                        outside_neighbors += 1;
                        dx += ddx;
                        dy += ddy;
                    }
                }
                if outside_neighbors > 0 {
                    if inside_neighbors == 0 {
                        return Err(Error::invalid(
                            "isolated boundary node: mask has a disconnected sliver",
                        ));
                    }
                    // corners of the mask get diagonal tags
                    if dx == 0 && dy == 0 {
                        dx = 1;
                    }
                    boundary.push(BoundaryNode {
                        idx: j * nx + i,
                        normal: Normal { dx: dx.signum() as i8, dy: dy.signum() as i8 },
                    });
                }
            }
        }
        self.boundary = boundary;
        Ok(())
    }

    /// Flood fill from one inside node must reach every inside node.
    fn check_connected(&self) -> Result<()> {
        let n = self.node_count();
        let start = match self.inside.iter().position(|&b| b) {
            Some(s) => s,
            None => return Err(Error::invalid("mask has no inside nodes")),
        };
        let mut seen = vec![false; n];
        let mut stack = vec![start];
        seen[start] = true;
        let mut count = 0usize;
        while let Some(k) = stack.pop() {
            count += 1;
            let (i, j) = (k % self.nx, k / self.nx);
            let push = |ii: i64, jj: i64, seen: &mut Vec<bool>, stack: &mut Vec<usize>| {
                if ii >= 0 && jj >= 0 && (ii as usize) < self.nx && (jj as usize) < self.ny {
                    let kk = jj as usize * self.nx + ii as usize;
                    if self.inside[kk] && !seen[kk] {
                        seen[kk] = true;
                        stack.push(kk);
                    }
                }
            };
            push(i as i64 - 1, j as i64, &mut seen, &mut stack);
            push(i as i64 + 1, j as i64, &mut seen, &mut stack);
            push(i as i64, j as i64 - 1, &mut seen, &mut stack);
            push(i as i64, j as i64 + 1, &mut seen, &mut stack);
        }
        if count != self.inside_count() {
            return Err(Error::invalid("inside mask is not connected"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_area() {
        let g = Grid2D::unit_square(32).unwrap();
        assert!((g.inside_area() - 1.0).abs() < 1e-12);
        assert_eq!(g.boundary_nodes().len(), 4 * 32 - 4);
    }

    #[test]
    fn disk_area_close() {
        let g = Grid2D::disk(128, (0.0, 0.0), 0.5).unwrap();
        let exact = std::f64::consts::PI * 0.25;
        assert!((g.inside_area() - exact).abs() < 4.0 * g.h);
    }

    #[test]
    fn disconnected_mask_rejected() {
        let n = 8;
        let mut inside = vec![false; n * n];
        inside[0] = true;
        inside[1] = true;
        inside[n - 1] = true; // far corner, detached
        inside[n - 2] = true;
        assert!(Grid2D::from_mask(n, n, 0.1, (0.0, 0.0), inside).is_err());
    }

    #[test]
    fn small_grid_rejected() {
        assert!(Grid2D::unit_square(3).is_err());
    }

    #[test]
    fn boundary_normals_point_outward() {
        let g = Grid2D::unit_square(8).unwrap();
        for b in g.boundary_nodes() {
            let (i, j) = (b.idx % 8, b.idx / 8);
            if i == 0 {
                assert_eq!(b.normal.dx, -1);
            }
            if j == 7 {
                assert_eq!(b.normal.dy, 1);
            }
        }
    }
}
