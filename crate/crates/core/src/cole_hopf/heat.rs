use super::{FieldSeries, GridFunction1D, HeatParams};
use crate::error::{LabError, Result};

/// Crank-Nicolson for `u_t = mu^{-1/2} u_xx` with `u(t, +-L) = 0`.
pub fn solve_heat_dirichlet(u0: &GridFunction1D, p: &HeatParams) -> Result<FieldSeries> {
    solve_heat_with_boundary(u0, p, |_| 0.0, |_| 0.0)
}

/// Crank-Nicolson with prescribed boundary traces `u(t, -L) = left(t)` and
/// `u(t, L) = right(t)`. Time starts at 0; every step is recorded.
pub fn solve_heat_with_boundary(
    u0: &GridFunction1D,
    p: &HeatParams,
    left: impl Fn(f64) -> f64,
    right: impl Fn(f64) -> f64,
) -> Result<FieldSeries> {
    const OP: &str = "solve_heat";
    p.validate()?;
    let grid = *u0.grid();
    let n = grid.len();
    let (steps, dt) = p.steps();
    let r = p.diffusivity() * dt / (grid.dx() * grid.dx());

    // The implicit matrix is tridiag(-r/2, 1 + r, -r/2); factor it once.
    let (off, diag) = (-0.5 * r, 1.0 + r);
    let mut c_prime = vec![0.0; n];
    let mut denom = vec![0.0; n];
    denom[0] = diag;
    c_prime[0] = off / diag;
    for k in 1..n {
        denom[k] = diag - off * c_prime[k - 1];
        c_prime[k] = off / denom[k];
    }

    let mut u = u0.values().to_vec();
    let mut rhs = vec![0.0; n];
    let mut times = vec![0.0];
    let mut slices = vec![u0.clone()];
    for step in 1..=steps {
        let t_old = (step - 1) as f64 * dt;
        let t_new = step as f64 * dt;
        for k in 0..n {
            let um = if k == 0 { left(t_old) } else { u[k - 1] };
            let up = if k == n - 1 { right(t_old) } else { u[k + 1] };
            rhs[k] = u[k] + 0.5 * r * (um - 2.0 * u[k] + up);
        }
        rhs[0] += 0.5 * r * left(t_new);
        rhs[n - 1] += 0.5 * r * right(t_new);

        // Thomas sweep.
        u[0] = rhs[0] / denom[0];
        for k in 1..n {
            u[k] = (rhs[k] - off * u[k - 1]) / denom[k];
        }
        for k in (0..n - 1).rev() {
            u[k] -= c_prime[k] * u[k + 1];
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(LabError::Stability { op: OP, step });
        }
        times.push(t_new);
        slices.push(GridFunction1D::new(grid, u.clone())?);
    }
    Ok(FieldSeries { dt, times, slices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cole_hopf::{exact, Grid1D};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_stays_zero() {
        let g = Grid1D::new(1.0, 32).unwrap();
        let u0 = GridFunction1D::constant(g, 0.0).unwrap();
        let p = HeatParams {
            mu: 1.0,
            dt: 0.01,
            t_end: 0.5,
        };
        let s = solve_heat_dirichlet(&u0, &p).unwrap();
        assert!(s.slices.iter().all(|u| u.max_abs() == 0.0));
        assert_eq!(s.len(), 51);
    }

    #[test]
    fn cosine_decays_at_unit_rate() {
        for n in [31usize, 63] {
            let g = Grid1D::new(FRAC_PI_2, n).unwrap();
            let u0 = GridFunction1D::from_fn(g, f64::cos).unwrap();
            let dt = g.dx();
            let p = HeatParams {
                mu: 1.0,
                dt,
                t_end: 1.0,
            };
            let s = solve_heat_dirichlet(&u0, &p).unwrap();
            let exact = GridFunction1D::from_fn(g, |x| (-1.0f64).exp() * x.cos()).unwrap();
            let err = s.last().unwrap().max_abs_diff(&exact);
            let (_, dt_eff) = p.steps();
            let bound = 5.0 * (g.dx().powi(2) + dt_eff.powi(2));
            assert!(err <= bound, "n={n}: {err} > {bound}");
        }
    }

    #[test]
    fn two_modes_decay_independently() {
        let (l, mu) = (1.0, 4.0f64);
        let g = Grid1D::new(l, 79).unwrap();
        let d = 1.0 / mu.sqrt();
        let f = |t: f64, x: f64| exact::sine_mode(d, l, 1, t, x) + 0.5 * exact::sine_mode(d, l, 3, t, x);
        let u0 = GridFunction1D::from_fn(g, |x| f(0.0, x)).unwrap();
        let p = HeatParams {
            mu,
            dt: 0.01,
            t_end: 0.4,
        };
        let s = solve_heat_dirichlet(&u0, &p).unwrap();
        let exact = GridFunction1D::from_fn(g, |x| f(0.4, x)).unwrap();
        let err = s.last().unwrap().max_abs_diff(&exact);
        assert!(err <= 5.0 * (g.dx().powi(2) + 1e-4), "{err}");
    }

    #[test]
    fn boundary_traces_reproduce_shock_heat() {
        let l = 4.0;
        let g = Grid1D::new(l, 127).unwrap();
        let u0 = GridFunction1D::from_fn(g, |x| exact::shock_heat(0.0, x)).unwrap();
        let p = HeatParams {
            mu: 1.0,
            dt: g.dx(),
            t_end: 0.5,
        };
        let s = solve_heat_with_boundary(&u0, &p, |t| exact::shock_heat(t, -l), |t| exact::shock_heat(t, l)).unwrap();
        let exact = GridFunction1D::from_fn(g, |x| exact::shock_heat(0.5, x)).unwrap();
        let rel = s.last().unwrap().max_abs_diff(&exact) / exact.max_abs();
        assert!(rel < 1e-3, "{rel}");
    }
}
