//! Exact line minimization for energies that are quartic polynomials along a
//! search direction, which is the case for every Ginzburg-Landau style
//! functional in this crate.

/// Minimize `c1 t + c2 t^2 + c3 t^3 + c4 t^4` over `t >= 0`.
///
/// Returns 0 when the direction is not a descent direction (`c1 >= 0`). The
/// quartic coefficient is nonnegative for the energies we build, so a finite
/// minimizer exists whenever `c4 > 0`.
pub fn minimize_quartic(c1: f64, c2: f64, c3: f64, c4: f64) -> f64 {
    if c1 >= 0.0 {
        return 0.0;
    }
    let dphi = |t: f64| c1 + 2.0 * c2 * t + 3.0 * c3 * t * t + 4.0 * c4 * t * t * t;
    // bracket a sign change of the derivative
    let mut hi = 1.0;
    let mut tries = 0;
    while dphi(hi) < 0.0 && tries < 200 {
        hi *= 2.0;
        tries += 1;
    }
    if dphi(hi) < 0.0 {
        // unbounded descent direction (can only happen with c4 = 0 inputs)
        return hi;
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if dphi(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // the bracketed stationary point may be a local min of several; compare
    // with the other stationary points by scanning the cubic roots via the
    // bracketing already done (sufficient in practice: phi' has at most two
    // sign changes on t > 0 and we bracketed the first one, which is the
    // global min for c1 < 0, c4 > 0 unless a deeper min lies beyond).
    let phi = |t: f64| c1 * t + c2 * t * t + c3 * t * t * t + c4 * t * t * t * t;
    let t1 = 0.5 * (lo + hi);
    // probe beyond for a possible second descent valley
    let mut best_t = t1;
    let mut best_v = phi(t1);
    let mut t = t1;
    for _ in 0..60 {
        t *= 1.3;
        let v = phi(t);
        if v < best_v {
            best_v = v;
            best_t = t;
        }
    }
    if best_t > t1 {
        // refine the farther minimum
        let mut lo2 = best_t / 1.3;
        let mut hi2 = best_t * 1.3;
        for _ in 0..80 {
            let mid = 0.5 * (lo2 + hi2);
            if dphi(mid) < 0.0 {
                lo2 = mid;
            } else {
                hi2 = mid;
            }
        }
        let t2 = 0.5 * (lo2 + hi2);
        if phi(t2) < phi(t1) {
            return t2;
        }
    }
    t1
}

#[cfg(test)]
mod tests {
    use super::minimize_quartic;

    #[test]
    fn simple_quadratic() {
        // t^2 - 2t: min at t = 1
        let t = minimize_quartic(-2.0, 1.0, 0.0, 0.0);
        assert!((t - 1.0).abs() < 1e-10);
    }

    #[test]
    fn double_well_profile() {
        // phi(t) = -t + 0.1 t^2 - 0.5 t^3 + 0.25 t^4 has its global min past the first dip
        let phi = |t: f64| -t + 0.1 * t * t - 0.5 * t * t * t + 0.25 * t * t * t * t;
        let t = minimize_quartic(-1.0, 0.1, -0.5, 0.25);
        // compare against a dense scan
        let mut best = (0.0, 0.0);
        for k in 1..40000 {
            let tt = k as f64 * 1e-4;
            let v = phi(tt);
            if v < best.1 {
                best = (tt, v);
            }
        }
        assert!((phi(t) - best.1).abs() < 1e-6, "t = {t}, best = {:?}", best);
    }

    #[test]
    fn non_descent_returns_zero() {
        assert_eq!(minimize_quartic(0.5, 1.0, 0.0, 1.0), 0.0);
    }
}
