use crate::C64;

/// Sparse Hermitian operator given by its action.
pub trait HermitianOp: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64], y: &mut [C64]);
    /// Real diagonal, used for Jacobi preconditioning.
    fn diag(&self) -> Vec<f64>;
}

/// Sparse real symmetric operator given by its action.
pub trait RealOp: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn diag(&self) -> Vec<f64>;
}

fn cdot(a: &[C64], b: &[C64]) -> C64 {
    const CHUNK: usize = 4096;
    let partials: Vec<C64> = a
        .chunks(CHUNK)
        .zip(b.chunks(CHUNK))
        .map(|(xa, xb)| xa.iter().zip(xb).map(|(p, q)| p.conj() * q).sum())
        .collect();
    partials.into_iter().sum()
}

/// Jacobi-preconditioned CG for `(A - shift) x = b` with `A` Hermitian and
/// `A - shift` positive definite. Returns the achieved relative residual.
pub fn cg_hermitian(
    op: &dyn HermitianOp,
    shift: f64,
    b: &[C64],
    x: &mut [C64],
    tol: f64,
    max_iter: usize,
) -> f64 {
    let n = op.dim();
    let mut diag = op.diag();
    for d in diag.iter_mut() {
        *d -= shift;
        if d.abs() < 1e-300 {
            *d = 1.0;
        }
    }
    let bnorm = cdot(b, b).re.sqrt();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        return 0.0;
    }
    let mut r = vec![C64::new(0.0, 0.0); n];
    let mut ap = vec![C64::new(0.0, 0.0); n];
    op.apply(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - (r[i] - shift * x[i]);
    }
    let mut z: Vec<C64> = r.iter().zip(&diag).map(|(ri, d)| ri / d).collect();
    let mut p = z.clone();
    let mut rz = cdot(&r, &z).re;
    let mut rnorm = cdot(&r, &r).re.sqrt();
    let mut it = 0;
    while rnorm > tol * bnorm && it < max_iter {
        op.apply(&p, &mut ap);
        for i in 0..n {
            ap[i] -= shift * p[i];
        }
        let pap = cdot(&p, &ap).re;
        if pap <= 0.0 {
            break; // lost positive definiteness; caller inspects the residual
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = cdot(&r, &z).re;
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rnorm = cdot(&r, &r).re.sqrt();
        it += 1;
    }
    rnorm / bnorm
}

/// Jacobi-preconditioned CG for real SPD systems.
pub fn cg_real(op: &dyn RealOp, b: &[f64], x: &mut [f64], tol: f64, max_iter: usize) -> f64 {
    let n = op.dim();
    let diag: Vec<f64> = op.diag().iter().map(|d| if d.abs() < 1e-300 { 1.0 } else { *d }).collect();
    let dot = |a: &[f64], b: &[f64]| -> f64 {
        const CHUNK: usize = 4096;
        let partials: Vec<f64> = a
            .chunks(CHUNK)
            .zip(b.chunks(CHUNK))
            .map(|(xa, xb)| xa.iter().zip(xb).map(|(p, q)| p * q).sum())
            .collect();
        partials.iter().sum()
    };
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return 0.0;
    }
    let mut r = vec![0.0; n];
    let mut ap = vec![0.0; n];
    op.apply(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, d)| ri / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut rnorm = dot(&r, &r).sqrt();
    let mut it = 0;
    while rnorm > tol * bnorm && it < max_iter {
        op.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rnorm = dot(&r, &r).sqrt();
        it += 1;
    }
    rnorm / bnorm
}

#[cfg(test)]
mod tests {
    use super::*;

    struct DenseReal(Vec<Vec<f64>>);

    impl RealOp for DenseReal {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for (i, row) in self.0.iter().enumerate() {
                y[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
            }
        }
        fn diag(&self) -> Vec<f64> {
            (0..self.0.len()).map(|i| self.0[i][i]).collect()
        }
    }

    #[test]
    fn real_cg_solves_spd() {
        // diagonally dominant symmetric matrix
        let n = 20;
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = 4.0 + i as f64 * 0.1;
            if i + 1 < n {
                m[i][i + 1] = -1.0;
                m[i + 1][i] = -1.0;
            }
        }
        let op = DenseReal(m.clone());
        let xtrue: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut b = vec![0.0; n];
        op.apply(&xtrue, &mut b);
        let mut x = vec![0.0; n];
        let res = cg_real(&op, &b, &mut x, 1e-12, 500);
        assert!(res < 1e-12);
        for (a, c) in x.iter().zip(&xtrue) {
            assert!((a - c).abs() < 1e-9);
        }
    }
}
