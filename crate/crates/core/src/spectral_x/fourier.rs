use rustfft::FftPlanner;

use super::{FrequencyGrid, SpectralField, TimeSamples};
use crate::error::{LabError, Result};
use crate::operator_core::C64;

fn alternate(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `u~_j = dt sum_k u_k exp(-i omega_j t_k)` on the grid dual to the samples.
pub fn fourier_forward(trace: &TimeSamples) -> Result<SpectralField> {
    let grid = trace.frequency_grid()?;
    // omega_j t_k = omega_j t0 + 2 pi (j - m/2) k / m, and exp(i pi k) = (-1)^k.
    let mut buf: Vec<C64> = trace
        .values
        .iter()
        .enumerate()
        .map(|(k, &v)| v * alternate(k))
        .collect();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    let coeffs = buf
        .into_iter()
        .enumerate()
        .map(|(j, c)| c * trace.dt * C64::from_polar(1.0, -grid.omega(j) * trace.t0))
        .collect();
    SpectralField::new(grid, coeffs)
}

/// `u_k = (d_omega / 2 pi) sum_j u~_j exp(i omega_j t_k)`, sampled like `like`.
pub fn fourier_inverse(field: &SpectralField, t0: f64, dt: f64) -> Result<TimeSamples> {
    const OP: &str = "fourier_inverse";
    let m = field.grid.len();
    let expected = FrequencyGrid::for_samples(m, dt)?;
    if (expected.d_omega() - field.grid.d_omega()).abs() > 1e-12 * expected.d_omega() {
        return Err(LabError::Shape {
            op: OP,
            detail: format!(
                "frequency spacing {} does not match {m} samples at dt = {dt}",
                field.grid.d_omega()
            ),
        });
    }
    let mut buf: Vec<C64> = field
        .coeffs
        .iter()
        .enumerate()
        .map(|(j, &c)| c * C64::from_polar(1.0, field.grid.omega(j) * t0))
        .collect();
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    let scale = 1.0 / (m as f64 * dt);
    let values = buf
        .into_iter()
        .enumerate()
        .map(|(k, v)| v * (scale * alternate(k)))
        .collect();
    TimeSamples::new(t0, dt, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_maps_to_zero() {
        let z = TimeSamples::new(0.0, 0.1, vec![C64::new(0.0, 0.0); 16]).unwrap();
        let f = fourier_forward(&z).unwrap();
        assert!(f.coeffs.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn grid_mode_is_a_single_coefficient() {
        let (m, dt, t0) = (32, 0.2, -1.3);
        let g = FrequencyGrid::for_samples(m, dt).unwrap();
        let w0 = g.omega(20);
        let trace = TimeSamples::from_fn(t0, dt, m, |t| C64::from_polar(1.0, w0 * t)).unwrap();
        let f = fourier_forward(&trace).unwrap();
        for (j, c) in f.coeffs.iter().enumerate() {
            if j == 20 {
                // dt * m = period
                assert!((c - C64::new(m as f64 * dt, 0.0)).norm() < 1e-12, "{c}");
            } else {
                assert!(c.norm() < 1e-12, "j={j}: {c}");
            }
        }
    }

    #[test]
    fn matches_direct_sum() {
        let (m, dt, t0) = (12, 0.3, 0.7);
        let trace = TimeSamples::from_fn(t0, dt, m, |t| C64::new(t.sin(), t * t)).unwrap();
        let f = fourier_forward(&trace).unwrap();
        for (j, &c) in f.coeffs.iter().enumerate() {
            let w = f.grid.omega(j);
            let direct: C64 = (0..m)
                .map(|k| trace.values[k] * C64::from_polar(dt, -w * trace.time(k)))
                .sum();
            assert!((c - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn white_noise_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let values: Vec<C64> = (0..256)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let trace = TimeSamples::new(2.5, 0.05, values).unwrap();
        let back = fourier_inverse(&fourier_forward(&trace).unwrap(), trace.t0, trace.dt).unwrap();
        let scale = trace.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(trace.max_abs_diff(&back) <= 1e-12 * scale);
    }

    #[test]
    fn mismatched_spacing_is_a_shape_error() {
        let trace = TimeSamples::from_fn(0.0, 0.1, 16, |t| C64::new(t, 0.0)).unwrap();
        let f = fourier_forward(&trace).unwrap();
        assert!(matches!(fourier_inverse(&f, 0.0, 0.2), Err(LabError::Shape { .. })));
    }
}
