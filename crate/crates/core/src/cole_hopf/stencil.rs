//! Fourth-order finite-difference derivatives on a uniform grid.
//!
//! Interior nodes use the five-point central stencils; the two nodes at
//! each end use one-sided stencils of the same order. Every stencil is
//! evaluated on differences so that constants differentiate to exactly zero.

// Weights sum to zero; applied to `f[j] - f[0]`.
fn edge<const N: usize>(w: &[f64; N], f: impl Fn(usize) -> f64) -> f64 {
    let f0 = f(0);
    w.iter().enumerate().skip(1).map(|(j, c)| c * (f(j) - f0)).sum()
}

const D1_EDGE: [[f64; 5]; 2] = [[-25.0, 48.0, -36.0, 16.0, -3.0], [-3.0, -10.0, 18.0, -6.0, 1.0]];
const D2_EDGE: [[f64; 6]; 2] = [
    [45.0, -154.0, 214.0, -156.0, 61.0, -10.0],
    [10.0, -15.0, -4.0, 14.0, -6.0, 1.0],
];

/// First derivative. Needs at least six samples.
pub fn d1(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 6, "d1 needs at least 6 samples, got {n}");
    let s = 1.0 / (12.0 * dx);
    let mut out = vec![0.0; n];
    for (k, w) in D1_EDGE.iter().enumerate() {
        out[k] = edge(w, |j| f[j]) * s;
        out[n - 1 - k] = -edge(w, |j| f[n - 1 - j]) * s;
    }
    for k in 2..n - 2 {
        out[k] = (8.0 * (f[k + 1] - f[k - 1]) - (f[k + 2] - f[k - 2])) * s;
    }
    out
}

/// Second derivative. Needs at least six samples.
pub fn d2(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    assert!(n >= 6, "d2 needs at least 6 samples, got {n}");
    let s = 1.0 / (12.0 * dx * dx);
    let mut out = vec![0.0; n];
    for (k, w) in D2_EDGE.iter().enumerate() {
        out[k] = edge(w, |j| f[j]) * s;
        out[n - 1 - k] = edge(w, |j| f[n - 1 - j]) * s;
    }
    for k in 2..n - 2 {
        out[k] = (16.0 * ((f[k + 1] - f[k]) + (f[k - 1] - f[k])) - ((f[k + 2] - f[k]) + (f[k - 2] - f[k]))) * s;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(x: f64) -> f64 {
        x.powi(4) - 2.0 * x.powi(3) + x - 7.0
    }

    #[test]
    fn quartics_differentiate_exactly() {
        let dx = 0.1;
        let xs: Vec<f64> = (0..12).map(|k| -0.5 + k as f64 * dx).collect();
        let f: Vec<f64> = xs.iter().map(|&x| poly(x)).collect();
        let g1 = d1(&f, dx);
        let g2 = d2(&f, dx);
        for (k, &x) in xs.iter().enumerate() {
            let e1 = 4.0 * x.powi(3) - 6.0 * x * x + 1.0;
            let e2 = 12.0 * x * x - 12.0 * x;
            assert!((g1[k] - e1).abs() < 1e-10, "d1 at {k}: {} vs {e1}", g1[k]);
            assert!((g2[k] - e2).abs() < 1e-8, "d2 at {k}: {} vs {e2}", g2[k]);
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |n: usize| {
            let dx = 2.0 / (n - 1) as f64;
            let f: Vec<f64> = (0..n).map(|k| (-1.0 + k as f64 * dx).sin()).collect();
            let g = d1(&f, dx);
            (0..n)
                .map(|k| (g[k] - (-1.0 + k as f64 * dx).cos()).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(41) / err(81);
        assert!(ratio > 14.0, "ratio {ratio}");
    }
}
