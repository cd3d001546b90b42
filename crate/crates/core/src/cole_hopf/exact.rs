//! Closed-form reference solutions used as oracles.

/// Positive heat solution `1 + exp(x + t)` (for `mu = 1`).
pub fn shock_heat(t: f64, x: f64) -> f64 {
    1.0 + (x + t).exp()
}

/// Its transform, the travelling Burgers front `-(1 + tanh((x + t)/2))`.
pub fn shock_psi(t: f64, x: f64) -> f64 {
    -(1.0 + ((x + t) / 2.0).tanh())
}

/// `exp(-D k^2 t) sin(k (x + L))`, a Dirichlet eigenmode on `(-L, L)`.
pub fn sine_mode(diffusivity: f64, half_width: f64, mode: usize, t: f64, x: f64) -> f64 {
    let k = mode as f64 * std::f64::consts::PI / (2.0 * half_width);
    (-diffusivity * k * k * t).exp() * (k * (x + half_width)).sin()
}

/// `1 + exp(x + t / mu^{1/2})`, the same front for `u_t = mu^{-1/2} u_xx`.
pub fn shock_heat_mu(mu: f64, t: f64, x: f64) -> f64 {
    1.0 + (x + t / mu.sqrt()).exp()
}

/// Transform of [`shock_heat_mu`]: `-mu^{-1/2} (1 + tanh((x + t/mu^{1/2})/2))`.
pub fn shock_psi_mu(mu: f64, t: f64, x: f64) -> f64 {
    -(1.0 + ((x + t / mu.sqrt()) / 2.0).tanh()) / mu.sqrt()
}
