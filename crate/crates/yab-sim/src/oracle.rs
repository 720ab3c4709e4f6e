//! Independent time-domain ground truth for the link current.
//!
//! Integrates the single-phase R-L equivalent exactly, treating the sampled
//! inductor voltage as zero-order-hold over each sample interval, and
//! iterates switching periods until the homogeneous transient has decayed to
//! periodic steady state. Used to validate the frequency-domain solver.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("link inductance must be positive (got {l})")]
    NonPositiveInductance { l: f64 },
    #[error("series resistance must be non-negative (got {r})")]
    NegativeResistance { r: f64 },
    #[error("empty voltage sequence")]
    Empty,
    #[error("non-finite inductor voltage sample at index {index}")]
    NonFinite { index: usize },
    #[error(
        "ideal link (R = 0) requires zero-mean voltage: |mean| = {mean_abs} exceeds 1e-9 of the {peak} V peak"
    )]
    NonZeroMeanIdeal { mean_abs: f64, peak: f64 },
    #[error("not periodic after {cycles} cycles (change {change}, peak {peak})")]
    NotConverged { cycles: usize, change: f64, peak: f64 },
    #[error("sequence length mismatch: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("oracle reference signal is identically zero")]
    ZeroReference,
}

/// Steady-state current from the time-domain integration.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Current at the left boundary of each sample interval, amperes.
    pub i: Vec<f64>,
    /// Cycles integrated before the periodicity check.
    pub cycles_to_converge: usize,
    /// Set when the period-to-period change fell within 1e-12 of the peak.
    pub converged: bool,
}

/// Periodicity threshold: the exact update has no truncation error, so once
/// the homogeneous term decays below 1e-12 of the peak only rounding remains.
const PERIODICITY_TOL: f64 = 1e-12;

/// Mean-voltage rejection threshold for the ideal link, relative to the peak
/// sample. An R = 0 link integrates any mean voltage into an unbounded ramp.
const IDEAL_MEAN_TOL: f64 = 1e-9;

/// Exact zero-order-hold integration of di/dt = (v − R·i)/L over whole
/// switching periods.
///
/// For R > 0 the homogeneous solution decays by e^(−R·T_sw/L) per cycle;
/// the cycle count ⌈12·ln10·L/(R·T_sw)⌉ brings it below 1e-12, after which
/// one further cycle verifies periodicity. For R = 0 one pass integrates
/// exactly and the mean current is set to zero, which is the blocking
/// capacitor's DC constraint.
pub fn simulate_zoh(
    v_l: &[f64],
    l: f64,
    r: f64,
    t_sw: f64,
    max_cycles: usize,
) -> Result<OracleResult, OracleError> {
    if l.is_nan() || l <= 0.0 {
        return Err(OracleError::NonPositiveInductance { l });
    }
    if r.is_nan() || r < 0.0 {
        return Err(OracleError::NegativeResistance { r });
    }
    if v_l.is_empty() {
        return Err(OracleError::Empty);
    }
    if let Some(index) = v_l.iter().position(|s| !s.is_finite()) {
        return Err(OracleError::NonFinite { index });
    }

    let n = v_l.len();
    let dt = t_sw / n as f64;

    if r == 0.0 {
        let peak = v_l.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let mean = v_l.iter().sum::<f64>() / n as f64;
        if mean.abs() > IDEAL_MEAN_TOL * peak {
            return Err(OracleError::NonZeroMeanIdeal {
                mean_abs: mean.abs(),
                peak,
            });
        }
        let mut i = Vec::with_capacity(n);
        let mut acc = 0.0;
        for &v in v_l {
            i.push(acc);
            acc += v * dt / l;
        }
        let i_mean = i.iter().sum::<f64>() / n as f64;
        for s in i.iter_mut() {
            *s -= i_mean;
        }
        return Ok(OracleResult {
            i,
            cycles_to_converge: 1,
            converged: true,
        });
    }

    let a = (-r * dt / l).exp();
    let b: Vec<f64> = v_l.iter().map(|&v| v * (1.0 - a) / r).collect();
    let decay_cycles = (12.0 * std::f64::consts::LN_10 * l / (r * t_sw)).ceil() as usize;
    let cycles = decay_cycles.max(1).min(max_cycles);

    let mut acc = 0.0;
    for _ in 0..cycles {
        for &b_n in &b {
            acc = acc * a + b_n;
        }
    }

    let start = acc;
    let mut i = Vec::with_capacity(n);
    let mut peak = 0.0f64;
    for &b_n in &b {
        i.push(acc);
        peak = peak.max(acc.abs());
        acc = acc * a + b_n;
    }
    let change = (acc - start).abs();
    let converged = change <= PERIODICITY_TOL * peak;
    if !converged && cycles >= max_cycles {
        return Err(OracleError::NotConverged {
            cycles,
            change,
            peak,
        });
    }
    Ok(OracleResult {
        i,
        cycles_to_converge: cycles,
        converged,
    })
}

/// Error measures of a candidate current against the oracle current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison {
    /// RMS of the difference over RMS of the oracle signal.
    pub rel_rms_err: f64,
    /// Largest absolute difference over the oracle peak.
    pub max_abs_err_over_peak: f64,
}

pub fn compare(i_fft: &[f64], i_oracle: &[f64]) -> Result<OracleComparison, OracleError> {
    if i_fft.len() != i_oracle.len() {
        return Err(OracleError::LengthMismatch {
            a: i_fft.len(),
            b: i_oracle.len(),
        });
    }
    let n = i_oracle.len() as f64;
    let rms_ref = (i_oracle.iter().map(|s| s * s).sum::<f64>() / n).sqrt();
    let peak_ref = i_oracle.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if rms_ref == 0.0 || peak_ref == 0.0 {
        return Err(OracleError::ZeroReference);
    }
    let rms_diff = (i_fft
        .iter()
        .zip(i_oracle)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n)
        .sqrt();
    let max_diff = i_fft
        .iter()
        .zip(i_oracle)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(OracleComparison {
        rel_rms_err: rms_diff / rms_ref,
        max_abs_err_over_peak: max_diff / peak_ref,
    })
}
