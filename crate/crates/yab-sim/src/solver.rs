//! Frequency-domain steady-state solver for the link current.
//!
//! Divides each harmonic of the sampled inductor voltage by the link
//! impedance at the signed bin frequency and transforms back. The DC bin is
//! forced to zero: the blocking capacitor, not the series resistance, sets
//! the DC operating point.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::params::ConverterParams;
use crate::waveforms::SwitchingCycle;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("link inductance must be positive (got {l})")]
    NonPositiveInductance { l: f64 },
    #[error("series resistance must be non-negative (got {r})")]
    NegativeResistance { r: f64 },
    #[error("inductor voltage length {got} does not match N_sw = {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite inductor voltage sample at index {index}")]
    NonFinite { index: usize },
}

/// Link impedance parameters for one solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkImpedanceSpec {
    /// Link inductance, henries.
    pub l: f64,
    /// Series resistance, ohms; zero selects the ideal link.
    pub r: f64,
    /// Switching frequency, hertz.
    pub f_sw: f64,
    /// Samples per switching period.
    pub n_sw: usize,
}

impl LinkImpedanceSpec {
    pub fn from_params(params: &ConverterParams) -> Self {
        LinkImpedanceSpec {
            l: params.l_t,
            r: params.r_series,
            f_sw: params.f_sw,
            n_sw: params.n_sw,
        }
    }
}

/// Periodic steady-state inductor current from one period of inductor
/// voltage.
///
/// The mean of `v_l` is removed first (the blocking capacitor carries the
/// DC), bin k is divided by Z_k = R + j·2π·m·f_sw·L with m the signed
/// harmonic multiple, the Nyquist bin keeps only the real part of 1/Z to
/// preserve conjugate symmetry, and the DC bin of the current is zero.
pub fn steady_state_current(
    v_l: &[f64],
    spec: &LinkImpedanceSpec,
) -> Result<Vec<f64>, SolverError> {
    if spec.l.is_nan() || spec.l <= 0.0 {
        return Err(SolverError::NonPositiveInductance { l: spec.l });
    }
    if spec.r.is_nan() || spec.r < 0.0 {
        return Err(SolverError::NegativeResistance { r: spec.r });
    }
    if v_l.len() != spec.n_sw {
        return Err(SolverError::LengthMismatch {
            expected: spec.n_sw,
            got: v_l.len(),
        });
    }
    if let Some(index) = v_l.iter().position(|s| !s.is_finite()) {
        return Err(SolverError::NonFinite { index });
    }

    let n = v_l.len();
    let mean = v_l.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = v_l
        .iter()
        .map(|&s| Complex::new(s - mean, 0.0))
        .collect();

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);

    let omega_base = 2.0 * std::f64::consts::PI * spec.f_sw * spec.l;
    buf[0] = Complex::new(0.0, 0.0);
    for (k, bin) in buf.iter_mut().enumerate().skip(1) {
        let m = if k <= n / 2 {
            k as f64
        } else {
            k as f64 - n as f64
        };
        let z = Complex::new(spec.r, omega_base * m);
        let mut admittance = z.inv();
        if 2 * k == n {
            admittance = Complex::new(admittance.re, 0.0);
        }
        *bin *= admittance;
    }

    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    Ok(buf.into_iter().map(|c| c.re * scale).collect())
}

/// Fills `cycle.i_t` from its inductor voltage.
pub fn solve_cycle(
    cycle: &mut SwitchingCycle,
    spec: &LinkImpedanceSpec,
) -> Result<(), SolverError> {
    cycle.i_t = steady_state_current(&cycle.v_l, spec)?;
    Ok(())
}
