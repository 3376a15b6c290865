//! Oracles shared by the integration tests.

#![allow(dead_code)]

/// Support moments of a continuous Euler beam from the three-moment equation,
/// sagging positive, outer supports pinned.
pub fn three_moment(spans: &[f64], ei: &[f64], w: &[f64]) -> Vec<f64> {
    let m = spans.len();
    let mut moments = vec![0.0; m + 1];
    if m < 2 {
        return moments;
    }
    let n = m - 1;
    let f: Vec<f64> = (0..m).map(|i| spans[i] / ei[i]).collect();
    let (mut lower, mut diag, mut upper, mut rhs) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for k in 0..n {
        lower[k] = f[k];
        diag[k] = 2.0 * (f[k] + f[k + 1]);
        upper[k] = f[k + 1];
        rhs[k] = -(w[k] * spans[k].powi(3) / ei[k] + w[k + 1] * spans[k + 1].powi(3) / ei[k + 1]) / 4.0;
    }
    for k in 1..n {
        let factor = lower[k] / diag[k - 1];
        diag[k] -= factor * upper[k - 1];
        rhs[k] -= factor * rhs[k - 1];
    }
    let mut x = vec![0.0; n];
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for k in (0..n - 1).rev() {
        x[k] = (rhs[k] - upper[k] * x[k + 1]) / diag[k];
    }
    moments[1..m].copy_from_slice(&x);
    moments
}
