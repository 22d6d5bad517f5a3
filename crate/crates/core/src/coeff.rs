//! Declarative pinning terms `a(x, kappa)` and applied fields `B0(x)`:
//! parametric families plus tabulated grids with bilinear interpolation.

use std::sync::Arc;

use crate::error::Result;
use crate::field::ScalarField2D;
use crate::grid::Grid2D;

/// Pinning term family. Oscillating variants depend on `kappa` through the
/// fast variable `sqrt(kappa) * x`.
#[derive(Debug, Clone)]
pub enum PinningSpec {
    Constant(f64),
    /// `a0 + gx x1 + gy x2`
    Linear { a0: f64, gx: f64, gy: f64 },
    /// `peak - decay * |x - c|^2`
    RadialBump { center: (f64, f64), peak: f64, decay: f64 },
    /// `alpha(sqrt(kappa) x)` with `alpha(t) = base + amp * sin(2 pi t1 / t1_period)`
    PeriodicOsc { base: f64, amp: f64, t1_period: f64, t2_period: f64 },
    /// `a(x) + alpha(sqrt(kappa) x)`
    Sum(Box<PinningSpec>, Box<PinningSpec>),
    Tabulated(Arc<ScalarField2D>),
}

impl PinningSpec {
    pub fn eval(&self, x: f64, y: f64, kappa: f64) -> f64 {
        match self {
            PinningSpec::Constant(c) => *c,
            PinningSpec::Linear { a0, gx, gy } => a0 + gx * x + gy * y,
            PinningSpec::RadialBump { center, peak, decay } => {
                peak - decay * ((x - center.0).powi(2) + (y - center.1).powi(2))
            }
            PinningSpec::PeriodicOsc { base, amp, t1_period, .. } => {
                let t1 = kappa.sqrt() * x;
                base + amp * (2.0 * std::f64::consts::PI * t1 / t1_period).sin()
            }
            PinningSpec::Sum(a, b) => a.eval(x, y, kappa) + b.eval(x, y, kappa),
            PinningSpec::Tabulated(f) => f.interp(x, y),
        }
    }

    /// The slowly varying periodic profile `alpha(t)` itself (identity for
    /// non-oscillating families). The second period coordinate is accepted
    /// for two-period profiles even though the built-in family only
    /// oscillates in `t1`.
    pub fn profile(&self, t1: f64, _t2: f64, x: f64, y: f64) -> f64 {
        match self {
            PinningSpec::PeriodicOsc { base, amp, t1_period, .. } => {
                base + amp * (2.0 * std::f64::consts::PI * t1 / t1_period).sin()
            }
            PinningSpec::Sum(a, b) => a.profile(t1, _t2, x, y) + b.profile(t1, _t2, x, y),
            other => other.eval(x, y, 1.0),
        }
    }

    pub fn sample(&self, grid: &Arc<Grid2D>, kappa: f64) -> Result<ScalarField2D> {
        ScalarField2D::from_fn(grid.clone(), |x, y| self.eval(x, y, kappa))
    }
}

/// Applied magnetic field family (kappa independent).
#[derive(Debug, Clone)]
pub enum FieldSpec {
    Constant(f64),
    /// `scale * x1`; vanishes along the vertical line `x1 = 0`
    LinearX1 { scale: f64 },
    /// `|x - c|^2 - r0^2`; vanishes on a ring
    RadialRing { center: (f64, f64), r0: f64 },
    Tabulated(Arc<ScalarField2D>),
}

impl FieldSpec {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            FieldSpec::Constant(c) => *c,
            FieldSpec::LinearX1 { scale } => scale * x,
            FieldSpec::RadialRing { center, r0 } => {
                (x - center.0).powi(2) + (y - center.1).powi(2) - r0 * r0
            }
            FieldSpec::Tabulated(f) => f.interp(x, y),
        }
    }

    pub fn sample(&self, grid: &Arc<Grid2D>) -> Result<ScalarField2D> {
        ScalarField2D::from_fn(grid.clone(), |x, y| self.eval(x, y))
    }
}
