//! Sinusoidal phase-shift modulation quantities.
//!
//! Produces the three-phase grid voltages, the sinusoidally varying DC-side
//! pulse widths, the 50 % duty gate reference, and circularly shifted gate
//! waveforms for any grid angle θ and main phase shift φ.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModulationError {
    #[error("over-modulation: |v_p| = {v_p_abs} V exceeds 2·v_dc = {} V", 2.0 * v_dc)]
    OverModulation { v_p_abs: f64, v_dc: f64 },
    #[error("gate waveform needs an even sample count, got {n_sw}")]
    OddSampleCount { n_sw: usize },
    #[error("gate waveform needs at least 2 samples, got {n_sw}")]
    TooShort { n_sw: usize },
}

/// A length-N_sw binary gate waveform with exactly N_sw/2 ones.
///
/// Instances only come from [`gate_reference`] and [`shifted_gate`], so the
/// 50 % duty invariant always holds and there is exactly one rising edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateWaveform {
    samples: Vec<u8>,
}

impl GateWaveform {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn ones(&self) -> usize {
        self.samples.iter().map(|&s| s as usize).sum()
    }

    /// Index n with g(n) = 1 and g(n−1 mod N) = 0. Unique for any circular
    /// shift of the 50 % reference.
    pub fn rising_edge(&self) -> usize {
        let n = self.samples.len();
        (0..n)
            .find(|&i| self.samples[i] == 1 && self.samples[(i + n - 1) % n] == 0)
            .expect("50 % duty waveform always has a rising edge")
    }
}

/// Three-phase grid voltages at grid angle θ: cosine references 120° apart,
/// summing to zero.
pub fn grid_voltages(theta_deg: f64, v_g_peak: f64) -> [f64; 3] {
    let rad = std::f64::consts::PI / 180.0;
    [
        v_g_peak * (theta_deg * rad).cos(),
        v_g_peak * ((theta_deg - 120.0) * rad).cos(),
        v_g_peak * ((theta_deg + 120.0) * rad).cos(),
    ]
}

/// Signed DC-side pulse widths d_p = v_p/(2·v_dc) · T_sw/2, seconds.
pub fn duty_cycles(v_abc: [f64; 3], v_dc: f64, t_sw: f64) -> Result<[f64; 3], ModulationError> {
    let mut d = [0.0; 3];
    for (slot, v_p) in d.iter_mut().zip(v_abc) {
        if v_p.abs() > 2.0 * v_dc {
            return Err(ModulationError::OverModulation {
                v_p_abs: v_p.abs(),
                v_dc,
            });
        }
        *slot = v_p / (2.0 * v_dc) * t_sw / 2.0;
    }
    Ok(d)
}

/// 50 % duty reference gate: first N_sw/2 samples one, remainder zero.
pub fn gate_reference(n_sw: usize) -> Result<GateWaveform, ModulationError> {
    if n_sw < 2 {
        return Err(ModulationError::TooShort { n_sw });
    }
    if !n_sw.is_multiple_of(2) {
        return Err(ModulationError::OddSampleCount { n_sw });
    }
    let mut samples = vec![0u8; n_sw];
    samples[..n_sw / 2].fill(1);
    Ok(GateWaveform { samples })
}

/// Circular shift of a gate waveform by τ seconds (rounded to the nearest
/// sample): a rising edge at index m moves to index m + round(N_sw·τ/T_sw).
pub fn shifted_gate(g_ref: &GateWaveform, tau: f64, t_sw: f64) -> GateWaveform {
    let n = g_ref.len() as i64;
    let shift = (g_ref.len() as f64 * tau / t_sw).round() as i64;
    let samples = (0..n)
        .map(|i| g_ref.samples[(i - shift).rem_euclid(n) as usize])
        .collect();
    GateWaveform { samples }
}

/// Modulation state for one (θ, φ) operating point: pulse widths for all
/// three phases and the phase-x DC-side edge offsets τ₁, τ₂.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulationPoint {
    /// Grid angle, degrees.
    pub theta: f64,
    /// Main phase shift, seconds.
    pub phi: f64,
    /// Switching period, seconds.
    pub t_sw: f64,
    /// Signed pulse widths (d_x, d_y, d_z), seconds.
    pub d: [f64; 3],
    /// τ₁ = T_sw/4 + φ − d_x/2.
    pub tau_1: f64,
    /// τ₂ = T_sw/4 + φ + d_x/2.
    pub tau_2: f64,
}

impl ModulationPoint {
    /// Builds the modulation point from grid angle and phase shift given as a
    /// fraction of T_sw.
    pub fn new(
        theta_deg: f64,
        phi_frac: f64,
        v_g_peak: f64,
        v_dc: f64,
        t_sw: f64,
    ) -> Result<Self, ModulationError> {
        let v = grid_voltages(theta_deg, v_g_peak);
        let d = duty_cycles(v, v_dc, t_sw)?;
        let phi = phi_frac * t_sw;
        let (tau_1, tau_2) = dc_edge_offsets(phi, d[0], t_sw);
        Ok(ModulationPoint {
            theta: theta_deg,
            phi,
            t_sw,
            d,
            tau_1,
            tau_2,
        })
    }

    /// DC-side edge offsets (τ₁, τ₂) for phase 0, 1, or 2.
    pub fn taus(&self, phase: usize) -> (f64, f64) {
        dc_edge_offsets(self.phi, self.d[phase], self.t_sw)
    }
}

fn dc_edge_offsets(phi: f64, d_p: f64, t_sw: f64) -> (f64, f64) {
    (
        t_sw / 4.0 + phi - d_p / 2.0,
        t_sw / 4.0 + phi + d_p / 2.0,
    )
}

/// Gate pair (g_p1, g_p2) for one DC-side full bridge: the reference shifted
/// by τ₁ and τ₂. Their difference is a three-level sequence whose nonzero
/// window spans |d_p| rounded to the sample grid.
pub fn dc_gates_phase(
    point: &ModulationPoint,
    phase: usize,
    n_sw: usize,
) -> Result<(GateWaveform, GateWaveform), ModulationError> {
    let g_ref = gate_reference(n_sw)?;
    let (tau_1, tau_2) = point.taus(phase);
    Ok((
        shifted_gate(&g_ref, tau_1, point.t_sw),
        shifted_gate(&g_ref, tau_2, point.t_sw),
    ))
}

/// Phase-x DC-side gate pair; see [`dc_gates_phase`].
pub fn dc_gates(
    point: &ModulationPoint,
    n_sw: usize,
) -> Result<(GateWaveform, GateWaveform), ModulationError> {
    dc_gates_phase(point, 0, n_sw)
}

/// Per-switch phase shifts: zero for the three AC half-bridges, and
/// φ + (1 ∓ d_p′)/4 · T_sw for the two legs of each DC bridge, where
/// d_p′ = d_p/(T_sw/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseShiftSchedule {
    /// AC half-bridge shifts (always zero), seconds.
    pub ac: [f64; 3],
    /// DC-side shifts [leg 1, leg 2] per phase, seconds.
    pub dc: [[f64; 2]; 3],
}

pub fn phase_shift_schedule(phi: f64, d: [f64; 3], t_sw: f64) -> PhaseShiftSchedule {
    let mut dc = [[0.0; 2]; 3];
    for (slot, d_p) in dc.iter_mut().zip(d) {
        let d_norm = d_p / (t_sw / 2.0);
        slot[0] = phi + (1.0 - d_norm) / 4.0 * t_sw;
        slot[1] = phi + (1.0 + d_norm) / 4.0 * t_sw;
    }
    PhaseShiftSchedule {
        ac: [0.0; 3],
        dc,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Trig identities on f64 leave residues a few ulps above 1e-16 relative;
    /// 1e-10 of the peak is far above that and far below any model effect.
    const SUM_TOL: f64 = 1e-10;
    /// Duty sums inherit the grid-voltage identity through one multiply.
    const DUTY_SUM_TOL: f64 = 1e-12;

    const T_SW: f64 = 1e-5;
    const V_PEAK: f64 = 391.7372;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs()
    }

    #[test]
    fn grid_voltages_at_zero_angle() {
        let [v_a, v_b, v_c] = grid_voltages(0.0, 391.7);
        assert!(rel_close(v_a, 391.7, 1e-12));
        assert!(rel_close(v_b, -195.85, 1e-9), "v_b = {v_b}");
        assert!(rel_close(v_c, -195.85, 1e-9), "v_c = {v_c}");
    }

    #[test]
    fn grid_voltage_phase_a_vanishes_at_ninety() {
        let [v_a, _, _] = grid_voltages(90.0, V_PEAK);
        assert!(v_a.abs() <= 1e-13 * V_PEAK, "v_a = {v_a}");
    }

    #[test]
    fn grid_voltages_sum_to_zero() {
        for i in 0..360 {
            let theta = 0.5 + i as f64;
            let [v_a, v_b, v_c] = grid_voltages(theta, V_PEAK);
            assert!((v_a + v_b + v_c).abs() <= SUM_TOL * V_PEAK, "theta = {theta}");
        }
    }

    #[test]
    fn duty_cycle_reference_value() {
        let d = duty_cycles([391.7, -195.85, -195.85], 200.0, T_SW).unwrap();
        assert!(rel_close(d[0], 4.89625e-6, 1e-12), "d_x = {}", d[0]);
    }

    #[test]
    fn duty_cycle_zero_crossing() {
        let d = duty_cycles([0.0, 100.0, -100.0], 200.0, T_SW).unwrap();
        assert_eq!(d[0], 0.0);
    }

    #[test]
    fn duty_cycle_over_modulation() {
        let err = duty_cycles([391.7, -195.85, -195.85], 150.0, T_SW).unwrap_err();
        assert!(matches!(err, ModulationError::OverModulation { .. }));
    }

    #[test]
    fn duty_sum_is_zero_over_the_grid() {
        for i in 0..360 {
            let theta = 0.5 + i as f64;
            let d = duty_cycles(grid_voltages(theta, V_PEAK), 200.0, T_SW).unwrap();
            assert!((d[0] + d[1] + d[2]).abs() <= DUTY_SUM_TOL * T_SW);
        }
    }

    #[test]
    fn gate_reference_structure() {
        assert_eq!(gate_reference(8).unwrap().samples(), [1, 1, 1, 1, 0, 0, 0, 0]);
        assert_eq!(gate_reference(2).unwrap().samples(), [1, 0]);
        assert!(matches!(
            gate_reference(7),
            Err(ModulationError::OddSampleCount { n_sw: 7 })
        ));
    }

    #[test]
    fn gate_reference_popcount() {
        for n_sw in [2usize, 8, 512, 2048] {
            assert_eq!(gate_reference(n_sw).unwrap().ones(), n_sw / 2);
        }
    }

    #[test]
    fn shifted_gate_identity_and_quarter_period() {
        let g_ref = gate_reference(8).unwrap();
        assert_eq!(shifted_gate(&g_ref, 0.0, T_SW), g_ref);
        let quarter = shifted_gate(&g_ref, T_SW / 4.0, T_SW);
        assert_eq!(quarter.samples(), [0, 0, 1, 1, 1, 1, 0, 0]);
    }

    #[test]
    fn half_period_shift_is_complement() {
        let g_ref = gate_reference(512).unwrap();
        let half = shifted_gate(&g_ref, T_SW / 2.0, T_SW);
        for (a, b) in g_ref.samples().iter().zip(half.samples()) {
            assert_eq!(a + b, 1);
        }
    }

    #[test]
    fn shifts_compose_for_sample_aligned_offsets() {
        let g_ref = gate_reference(64).unwrap();
        let dt = T_SW / 64.0;
        let a = 3.0 * dt;
        let b = 50.0 * dt;
        let two_step = shifted_gate(&shifted_gate(&g_ref, a, T_SW), b, T_SW);
        assert_eq!(two_step, shifted_gate(&g_ref, a + b, T_SW));
    }

    #[test]
    fn shift_moves_rising_edge_and_keeps_popcount() {
        let g_ref = gate_reference(512).unwrap();
        assert_eq!(g_ref.rising_edge(), 0);
        for shift_samples in [1usize, 17, 255, 256, 511] {
            let tau = shift_samples as f64 * T_SW / 512.0;
            let g = shifted_gate(&g_ref, tau, T_SW);
            assert_eq!(g.ones(), 256);
            assert_eq!(g.rising_edge(), shift_samples % 512);
        }
    }

    #[test]
    fn negative_shift_wraps() {
        let g_ref = gate_reference(8).unwrap();
        let g = shifted_gate(&g_ref, -T_SW / 4.0, T_SW);
        assert_eq!(g.samples(), [1, 1, 0, 0, 0, 0, 1, 1]);
    }

    #[test]
    fn dc_gates_collapse_at_zero_duty() {
        // d = 0 for every phase at v_p = 0; use θ = 90° where d_x = 0.
        let mut point = ModulationPoint::new(90.0, 0.1, V_PEAK, 200.0, T_SW).unwrap();
        point.d[0] = 0.0;
        let (g_x1, g_x2) = dc_gates(&point, 64).unwrap();
        assert_eq!(g_x1, g_x2);
    }

    #[test]
    fn full_duty_leaves_no_zero_interval() {
        // d_x = T_sw/2 needs v_a = 2·v_dc; synthesize the point directly.
        // Each half period carries a pulse of width d_x, so at full duty the
        // bridge output becomes a square wave: the legs disagree everywhere.
        let point = ModulationPoint {
            theta: 0.0,
            phi: 0.0,
            t_sw: T_SW,
            d: [T_SW / 2.0, -T_SW / 4.0, -T_SW / 4.0],
            tau_1: T_SW / 4.0 - T_SW / 4.0,
            tau_2: T_SW / 4.0 + T_SW / 4.0,
        };
        let (g_x1, g_x2) = dc_gates(&point, 64).unwrap();
        let window: usize = g_x1
            .samples()
            .iter()
            .zip(g_x2.samples())
            .filter(|(a, b)| a != b)
            .count();
        assert_eq!(window, 64);
    }

    #[test]
    fn dc_gate_window_matches_quantized_duty() {
        let point = ModulationPoint::new(23.5, 0.13, V_PEAK, 200.0, T_SW).unwrap();
        for phase in 0..3 {
            let (g_1, g_2) = dc_gates_phase(&point, phase, 512).unwrap();
            let window = g_1
                .samples()
                .iter()
                .zip(g_2.samples())
                .filter(|(a, b)| a != b)
                .count() as f64;
            // One pulse of width |d| per half period, so the legs disagree on
            // ~2·|d|/T_sw of the samples; each leg shift rounds independently.
            let expected = 2.0 * (512.0 * point.d[phase].abs() / T_SW).round();
            assert!(
                (window - expected).abs() <= 3.0,
                "phase {phase}: window {window}, duty window {expected}"
            );
        }
    }

    #[test]
    fn dc_gates_rotation_equivariance() {
        for theta in [0.5, 37.5, 211.5, 359.5] {
            let at_theta = ModulationPoint::new(theta, 0.2, V_PEAK, 200.0, T_SW).unwrap();
            let rotated = ModulationPoint::new(theta - 120.0, 0.2, V_PEAK, 200.0, T_SW).unwrap();
            let y = dc_gates_phase(&at_theta, 1, 512).unwrap();
            let x = dc_gates_phase(&rotated, 0, 512).unwrap();
            assert_eq!(y, x, "theta = {theta}");
        }
    }

    #[test]
    fn schedule_with_zero_inputs_is_quarter_period() {
        let s = phase_shift_schedule(0.0, [0.0; 3], T_SW);
        assert_eq!(s.ac, [0.0; 3]);
        for leg in s.dc {
            assert_eq!(leg, [T_SW / 4.0, T_SW / 4.0]);
        }
    }

    #[test]
    fn schedule_leg_separation_equals_duty() {
        let d = [3.1e-6, -1.9e-6, -1.2e-6];
        let s = phase_shift_schedule(0.07 * T_SW, d, T_SW);
        for (leg, d_p) in s.dc.iter().zip(d) {
            assert!((leg[1] - leg[0] - d_p).abs() <= 1e-12 * T_SW);
        }
    }

    #[test]
    fn schedule_reference_values() {
        let d_x = 0.9 * T_SW / 2.0;
        let s = phase_shift_schedule(0.2 * T_SW, [d_x, 0.0, 0.0], T_SW);
        assert!(rel_close(s.dc[0][0], 0.225 * T_SW, 1e-12));
        assert!(rel_close(s.dc[0][1], 0.675 * T_SW, 1e-12));
    }

    #[test]
    fn schedule_matches_edge_offsets() {
        let point = ModulationPoint::new(41.5, 0.2, V_PEAK, 200.0, T_SW).unwrap();
        let s = phase_shift_schedule(point.phi, point.d, T_SW);
        assert!((s.dc[0][0] - point.tau_1).abs() <= 1e-12 * T_SW);
        assert!((s.dc[0][1] - point.tau_2).abs() <= 1e-12 * T_SW);
    }

    #[test]
    fn pulse_widths_bounded_by_half_period() {
        for i in 0..360 {
            let point =
                ModulationPoint::new(0.5 + i as f64, 0.25, V_PEAK, 200.0, T_SW).unwrap();
            for d_p in point.d {
                assert!(d_p.abs() <= T_SW / 2.0);
            }
        }
    }
}
