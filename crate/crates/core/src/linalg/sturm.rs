//! Smallest eigenvalue of a real symmetric tridiagonal matrix by bisection on
//! the Sturm (negative pivot) count, plus inverse iteration for the vector.

/// Number of eigenvalues of the tridiagonal `(diag, off)` strictly below `x`,
/// from the signs of the LDL pivots. Vanishing pivots are treated as
/// negative, the usual convention.
fn count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    const TINY: f64 = 1e-306;
    let n = diag.len();
    let mut count = 0usize;
    let mut d = diag[0] - x;
    if d.abs() < TINY {
        d = -TINY;
    }
    if d < 0.0 {
        count += 1;
    }
    for i in 1..n {
        d = (diag[i] - x) - off[i - 1] * off[i - 1] / d;
        if d.abs() < TINY {
            d = -TINY;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue of the symmetric tridiagonal matrix, to absolute
/// accuracy `tol`.
pub fn tridiag_smallest(diag: &[f64], off: &[f64], tol: f64) -> f64 {
    assert_eq!(off.len() + 1, diag.len());
    // Gershgorin bounds
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let n = diag.len();
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i < n - 1 { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let mut a = lo;
    let mut b = hi;
    while b - a > tol.max((b.abs() + a.abs()) * 1e-15) {
        let mid = 0.5 * (a + b);
        if count_below(diag, off, mid) >= 1 {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

/// Eigenvector for an isolated eigenvalue `lambda` by inverse iteration with
/// a slightly shifted LU (Thomas) solve.
pub fn tridiag_eigenvector(diag: &[f64], off: &[f64], lambda: f64) -> Vec<f64> {
    let n = diag.len();
    let scale = diag.iter().fold(0.0f64, |m, d| m.max(d.abs())).max(1.0);
    let shift = lambda + 1e-12 * scale;
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.3 * ((i * 2654435761) % 97) as f64 / 97.0).collect();
    for _ in 0..4 {
        // solve (T - shift) w = v by Thomas with regularized pivots
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = diag[0] - shift;
        if denom.abs() < 1e-14 * scale {
            denom = 1e-14 * scale;
        }
        c[0] = if n > 1 { off[0] / denom } else { 0.0 };
        d[0] = v[0] / denom;
        for i in 1..n {
            let mut m = diag[i] - shift - off[i - 1] * c[i - 1];
            if m.abs() < 1e-14 * scale {
                m = 1e-14 * scale;
            }
            if i < n - 1 {
                c[i] = off[i] / m;
            }
            d[i] = (v[i] - off[i - 1] * d[i - 1]) / m;
        }
        let mut w = vec![0.0; n];
        w[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            w[i] = d[i] - c[i] * w[i + 1];
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_of_laplacian() {
        // -u'' on (0,1), Dirichlet, n interior nodes: lambda_1 = 4/h^2 sin^2(pi h/2)
        let n = 200;
        let h = 1.0 / (n as f64 + 1.0);
        let diag = vec![2.0 / (h * h); n];
        let off = vec![-1.0 / (h * h); n - 1];
        let exact = 4.0 / (h * h) * (std::f64::consts::PI * h / 2.0).sin().powi(2);
        let got = tridiag_smallest(&diag, &off, 1e-10);
        assert!((got - exact).abs() < 1e-6, "got {got}, want {exact}");
        let v = tridiag_eigenvector(&diag, &off, got);
        // residual check
        let mut r: f64 = 0.0;
        for i in 0..n {
            let mut tv = diag[i] * v[i];
            if i > 0 {
                tv += off[i - 1] * v[i - 1];
            }
            if i < n - 1 {
                tv += off[i] * v[i + 1];
            }
            r = r.max((tv - got * v[i]).abs());
        }
        assert!(r < 1e-6 / (h * h) * 1e-6, "residual {r}");
    }
}
