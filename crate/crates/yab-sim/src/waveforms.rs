//! Per-switching-period winding voltage synthesis.
//!
//! Builds the AC-side winding voltage, the DC-side bridge voltages, the
//! common-mode/differential-mode decomposition specific to the Y-configured
//! link, the inductor voltage for either topology, and the AC-side
//! switching-voltage envelope.

use thiserror::Error;

use crate::modulation::{
    dc_gates_phase, gate_reference, GateWaveform, ModulationError, ModulationPoint,
};
use crate::params::{ConverterParams, Topology};

#[derive(Debug, Error)]
pub enum WaveformError {
    #[error("sequence length mismatch: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error(transparent)]
    Modulation(#[from] ModulationError),
}

/// One switching period of one phase: winding and inductor voltages plus the
/// solved transformer current (empty until the solver fills it).
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingCycle {
    /// Grid angle, degrees.
    pub theta: f64,
    /// AC-side winding voltage, volts. Bipolar ±v_a/2 square wave, zero mean.
    pub v_an: Vec<f64>,
    /// This phase's DC-side bridge voltage, volts, levels {−v_dc, 0, +v_dc}.
    pub v_xx: Vec<f64>,
    /// Differential-mode bridge voltage v_Xx − v_cm_dc, volts.
    pub v_xn: Vec<f64>,
    /// Inductor voltage, volts: v_AN − v_XN (YAB) or v_AN − v_Xx (AC-DC DAB).
    pub v_l: Vec<f64>,
    /// Transformer winding current, amperes.
    pub i_t: Vec<f64>,
}

/// Gate waveforms backing a [`SwitchingCycle`], kept for turn-on instant
/// extraction.
#[derive(Debug, Clone)]
pub struct CycleGates {
    /// AC half-bridge gate (the unshifted 50 % reference).
    pub ac: GateWaveform,
    /// DC-side leg-1 gate (shift τ₁).
    pub dc_1: GateWaveform,
    /// DC-side leg-2 gate (shift τ₂).
    pub dc_2: GateWaveform,
}

/// AC-side winding voltage: bipolar square wave at ±v_a/2 gated by `g`.
///
/// The half-bridge splits the phase voltage symmetrically about the winding
/// neutral, so the sequence has zero mean and carries the full v_a swing.
pub fn primary_winding_voltage(g: &GateWaveform, v_a: f64) -> Vec<f64> {
    g.samples()
        .iter()
        .map(|&s| v_a * (s as f64 - 0.5))
        .collect()
}

/// DC-side full-bridge voltage v_dc·(g_1 − g_2), levels {−v_dc, 0, +v_dc}.
pub fn bridge_voltage(g_1: &GateWaveform, g_2: &GateWaveform, v_dc: f64) -> Vec<f64> {
    g_1.samples()
        .iter()
        .zip(g_2.samples())
        .map(|(&a, &b)| v_dc * (a as f64 - b as f64))
        .collect()
}

/// The three DC-side bridge voltages and their per-sample common mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreePhaseBridgeSet {
    pub v_xx: Vec<f64>,
    pub v_yy: Vec<f64>,
    pub v_zz: Vec<f64>,
    pub v_cm_dc: Vec<f64>,
}

impl ThreePhaseBridgeSet {
    pub fn new(
        v_xx: Vec<f64>,
        v_yy: Vec<f64>,
        v_zz: Vec<f64>,
    ) -> Result<Self, WaveformError> {
        check_len(&v_xx, &v_yy)?;
        check_len(&v_xx, &v_zz)?;
        let v_cm_dc = v_xx
            .iter()
            .zip(&v_yy)
            .zip(&v_zz)
            .map(|((x, y), z)| (x + y + z) / 3.0)
            .collect();
        Ok(ThreePhaseBridgeSet {
            v_xx,
            v_yy,
            v_zz,
            v_cm_dc,
        })
    }
}

fn check_len(a: &[f64], b: &[f64]) -> Result<(), WaveformError> {
    if a.len() == b.len() {
        Ok(())
    } else {
        Err(WaveformError::LengthMismatch {
            a: a.len(),
            b: b.len(),
        })
    }
}

/// Differential-mode bridge voltages v_PN = v_Pp − v_cm_dc; the three outputs
/// sum to zero per sample.
pub fn dm_decompose(set: &ThreePhaseBridgeSet) -> [Vec<f64>; 3] {
    let sub = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .zip(&set.v_cm_dc)
            .map(|(p, cm)| p - cm)
            .collect()
    };
    [sub(&set.v_xx), sub(&set.v_yy), sub(&set.v_zz)]
}

/// Inductor voltage: sample-wise v_AN − dc_side, where dc_side is v_XN for
/// the YAB and v_Xx for the AC-DC DAB.
pub fn inductor_voltage(v_an: &[f64], dc_side: &[f64]) -> Result<Vec<f64>, WaveformError> {
    check_len(v_an, dc_side)?;
    Ok(v_an.iter().zip(dc_side).map(|(a, d)| a - d).collect())
}

/// Scaling convention for [`ac_switch_voltage`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchVoltageMode {
    /// √6·(v_g_rms/v_dc)·sin(·), dimensionless.
    Normalized,
    /// √6·v_g_rms·sin(·), volts; used for loss-map lookup.
    Volts,
}

/// AC half-bridge switching-voltage envelope at grid angle θ.
///
/// Zero on the clamped interval (120°, 240°); sinusoidal lobes peaking at the
/// line-to-line peak elsewhere. Continuous at both interval ends.
pub fn ac_switch_voltage(
    theta_deg: f64,
    v_g_rms: f64,
    v_dc: f64,
    mode: SwitchVoltageMode,
) -> f64 {
    let theta = theta_deg.rem_euclid(360.0);
    let rad = std::f64::consts::PI / 180.0;
    let two_thirds_pi = 2.0 * std::f64::consts::FRAC_PI_3;
    let shape = if theta <= 120.0 {
        (two_thirds_pi - theta * rad).sin()
    } else if theta < 240.0 {
        0.0
    } else {
        (two_thirds_pi + theta * rad).sin()
    };
    let scale = match mode {
        SwitchVoltageMode::Normalized => 6f64.sqrt() * v_g_rms / v_dc,
        SwitchVoltageMode::Volts => 6f64.sqrt() * v_g_rms,
    };
    scale * shape
}

/// Synthesizes the voltage waveforms of one phase (0 = a/x, 1 = b/y,
/// 2 = c/z) at one (θ, φ) operating point. The returned cycle has an empty
/// current; the harmonic solver fills it.
pub fn synthesize_cycle(
    params: &ConverterParams,
    theta_deg: f64,
    phi_frac: f64,
    phase: usize,
) -> Result<(SwitchingCycle, CycleGates), WaveformError> {
    let n_sw = params.n_sw;
    let t_sw = params.t_sw();
    let point = ModulationPoint::new(theta_deg, phi_frac, params.v_g_peak(), params.v_dc, t_sw)?;
    let v = crate::modulation::grid_voltages(theta_deg, params.v_g_peak());

    let g_ref = gate_reference(n_sw)?;
    let mut bridges = Vec::with_capacity(3);
    let mut gates = None;
    for p in 0..3 {
        let (g_1, g_2) = dc_gates_phase(&point, p, n_sw)?;
        bridges.push(bridge_voltage(&g_1, &g_2, params.v_dc));
        if p == phase {
            gates = Some(CycleGates {
                ac: g_ref.clone(),
                dc_1: g_1,
                dc_2: g_2,
            });
        }
    }
    let [b_x, b_y, b_z]: [Vec<f64>; 3] = bridges.try_into().expect("three phases");
    let set = ThreePhaseBridgeSet::new(b_x, b_y, b_z)?;
    let dm = dm_decompose(&set);

    let v_an = primary_winding_voltage(&g_ref, v[phase]);
    let v_xx = match phase {
        0 => set.v_xx.clone(),
        1 => set.v_yy.clone(),
        _ => set.v_zz.clone(),
    };
    let v_xn = dm[phase].clone();
    let dc_side = match params.topology {
        Topology::Yab => &v_xn,
        Topology::AcdcDab => &v_xx,
    };
    let v_l = inductor_voltage(&v_an, dc_side)?;

    Ok((
        SwitchingCycle {
            theta: theta_deg,
            v_an,
            v_xx,
            v_xn,
            v_l,
            i_t: Vec::new(),
        },
        gates.expect("phase index 0..3"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulation::shifted_gate;

    /// CM subtraction is two adds and a divide per sample; 1e-10 V on
    /// hundreds-of-volts signals leaves six orders of float headroom.
    const CM_TOL: f64 = 1e-10;

    const T_SW: f64 = 1e-5;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs()
    }

    #[test]
    fn winding_voltage_is_bipolar_half_amplitude() {
        let g = gate_reference(8).unwrap();
        let v = primary_winding_voltage(&g, 391.74);
        for s in &v[..4] {
            assert_eq!(*s, 195.87);
        }
        for s in &v[4..] {
            assert_eq!(*s, -195.87);
        }
    }

    #[test]
    fn winding_voltage_zero_input() {
        let g = gate_reference(16).unwrap();
        assert!(primary_winding_voltage(&g, 0.0).iter().all(|&s| s == 0.0));
    }

    #[test]
    fn winding_voltage_linear_and_zero_mean() {
        let g = shifted_gate(&gate_reference(64).unwrap(), 0.3 * T_SW, T_SW);
        let v1 = primary_winding_voltage(&g, 123.456);
        let v2 = primary_winding_voltage(&g, 246.912);
        for (a, b) in v1.iter().zip(&v2) {
            assert_eq!(2.0 * a, *b);
        }
        let mean = v1.iter().sum::<f64>() / v1.len() as f64;
        assert!(mean.abs() <= 1e-12 * 123.456);
    }

    #[test]
    fn bridge_voltage_of_equal_gates_is_zero() {
        let g = gate_reference(32).unwrap();
        assert!(bridge_voltage(&g, &g, 200.0).iter().all(|&s| s == 0.0));
    }

    #[test]
    fn bridge_voltage_three_level_window() {
        let g_ref = gate_reference(64).unwrap();
        // d_x = T_sw/2 at φ = 0 puts the legs at τ = 0 and τ = T_sw/2.
        let g_1 = shifted_gate(&g_ref, 0.0, T_SW);
        let g_2 = shifted_gate(&g_ref, T_SW / 2.0, T_SW);
        let v = bridge_voltage(&g_1, &g_2, 200.0);
        assert_eq!(v.iter().filter(|&&s| s == 200.0).count(), 32);
        assert!(v.iter().all(|&s| s == 200.0 || s == -200.0 || s == 0.0));
    }

    #[test]
    fn bridge_voltage_negates_under_leg_swap() {
        let g_ref = gate_reference(64).unwrap();
        let g_1 = shifted_gate(&g_ref, 0.21 * T_SW, T_SW);
        let g_2 = shifted_gate(&g_ref, 0.29 * T_SW, T_SW);
        let v = bridge_voltage(&g_1, &g_2, 200.0);
        let v_swapped = bridge_voltage(&g_2, &g_1, 200.0);
        for (a, b) in v.iter().zip(&v_swapped) {
            assert_eq!(*a, -b);
        }
    }

    #[test]
    fn dm_of_pure_common_mode_is_zero() {
        let seq = vec![200.0, 0.0, -200.0, 200.0];
        let set = ThreePhaseBridgeSet::new(seq.clone(), seq.clone(), seq).unwrap();
        for out in dm_decompose(&set) {
            assert!(out.iter().all(|&s| s == 0.0));
        }
    }

    #[test]
    fn dm_of_zero_sum_inputs_is_identity() {
        let x = vec![200.0, -100.0];
        let y = vec![-150.0, 400.0];
        let z = vec![-50.0, -300.0];
        let set = ThreePhaseBridgeSet::new(x.clone(), y.clone(), z.clone()).unwrap();
        let [ox, oy, oz] = dm_decompose(&set);
        assert_eq!(ox, x);
        assert_eq!(oy, y);
        assert_eq!(oz, z);
    }

    #[test]
    fn dm_outputs_sum_to_zero_on_synthesized_gates() {
        let params = ConverterParams::default();
        let point = ModulationPoint::new(30.0, 0.2, params.v_g_peak(), params.v_dc, T_SW).unwrap();
        let mut bridges = Vec::new();
        for p in 0..3 {
            let (g_1, g_2) = dc_gates_phase(&point, p, 512).unwrap();
            bridges.push(bridge_voltage(&g_1, &g_2, params.v_dc));
        }
        let [x, y, z]: [Vec<f64>; 3] = bridges.try_into().unwrap();
        let set = ThreePhaseBridgeSet::new(x, y, z).unwrap();
        let [ox, oy, oz] = dm_decompose(&set);
        for i in 0..512 {
            assert!((ox[i] + oy[i] + oz[i]).abs() <= CM_TOL);
        }
    }

    #[test]
    fn bridge_set_rejects_mismatched_lengths() {
        let err = ThreePhaseBridgeSet::new(vec![0.0; 8], vec![0.0; 8], vec![0.0; 9]).unwrap_err();
        assert!(matches!(err, WaveformError::LengthMismatch { a: 8, b: 9 }));
    }

    #[test]
    fn inductor_voltage_cancels_matched_input() {
        let v = vec![1.0, -2.0, 3.0];
        assert!(inductor_voltage(&v, &v)
            .unwrap()
            .iter()
            .all(|&s| s == 0.0));
    }

    #[test]
    fn topologies_differ_by_common_mode() {
        let mut params = ConverterParams {
            topology: Topology::Yab,
            ..ConverterParams::default()
        };
        let (yab, _) = synthesize_cycle(&params, 30.0, 0.2, 0).unwrap();
        params.topology = Topology::AcdcDab;
        let (dab, _) = synthesize_cycle(&params, 30.0, 0.2, 0).unwrap();
        // v_L(YAB) − v_L(DAB) = v_Xx − v_XN = v_cm_dc per sample.
        for i in 0..params.n_sw {
            let cm = yab.v_xx[i] - yab.v_xn[i];
            assert!((yab.v_l[i] - dab.v_l[i] - cm).abs() <= CM_TOL);
        }
    }

    #[test]
    fn zero_crossing_phase_sees_only_dc_side() {
        let params = ConverterParams::default();
        let (cycle, _) = synthesize_cycle(&params, 90.0, 0.15, 0).unwrap();
        for i in 0..params.n_sw {
            assert!((cycle.v_l[i] + cycle.v_xn[i]).abs() <= 1e-10);
        }
    }

    #[test]
    fn bridge_levels_are_exact() {
        let params = ConverterParams::default();
        let (cycle, _) = synthesize_cycle(&params, 77.5, 0.1, 0).unwrap();
        let v_dc = params.v_dc;
        assert!(cycle
            .v_xx
            .iter()
            .all(|&s| s == v_dc || s == 0.0 || s == -v_dc));
        assert!(cycle.v_xx.contains(&v_dc));
    }

    #[test]
    fn cycle_rotation_between_phases() {
        let params = ConverterParams::default();
        let (b_cycle, _) = synthesize_cycle(&params, 200.5, 0.2, 1).unwrap();
        let (a_cycle, _) = synthesize_cycle(&params, 80.5, 0.2, 0).unwrap();
        for i in 0..params.n_sw {
            assert!((b_cycle.v_an[i] - a_cycle.v_an[i]).abs() <= 1e-9 * params.v_g_peak());
            assert!((b_cycle.v_l[i] - a_cycle.v_l[i]).abs() <= 1e-9 * params.v_dc);
        }
    }

    #[test]
    fn switch_voltage_clamped_interval() {
        assert_eq!(
            ac_switch_voltage(180.0, 277.0, 200.0, SwitchVoltageMode::Volts),
            0.0
        );
        assert_eq!(
            ac_switch_voltage(120.5, 277.0, 200.0, SwitchVoltageMode::Normalized),
            0.0
        );
        assert_eq!(
            ac_switch_voltage(239.5, 277.0, 200.0, SwitchVoltageMode::Volts),
            0.0
        );
    }

    #[test]
    fn switch_voltage_peak_values() {
        let volts = ac_switch_voltage(30.0, 277.0, 200.0, SwitchVoltageMode::Volts);
        assert!(rel_close(volts, 678.47, 1e-4), "volts = {volts}");
        let norm = ac_switch_voltage(30.0, 277.0, 200.0, SwitchVoltageMode::Normalized);
        assert!(rel_close(norm, 3.3924, 1e-4), "normalized = {norm}");
    }

    #[test]
    fn switch_voltage_continuous_at_clamp_edges() {
        let scale = 6f64.sqrt() * 277.0;
        for edge in [120.0, 240.0] {
            let inside = ac_switch_voltage(edge, 277.0, 200.0, SwitchVoltageMode::Volts);
            let outside = ac_switch_voltage(
                edge + if edge == 120.0 { -1e-6 } else { 1e-6 },
                277.0,
                200.0,
                SwitchVoltageMode::Volts,
            );
            assert!(inside.abs() <= 1e-9 * scale, "edge {edge}: {inside}");
            assert!(outside.abs() <= 1e-6 * scale, "edge {edge}: {outside}");
        }
    }

    #[test]
    fn switch_voltage_wraps_angle() {
        let a = ac_switch_voltage(30.0, 277.0, 200.0, SwitchVoltageMode::Volts);
        let b = ac_switch_voltage(390.0, 277.0, 200.0, SwitchVoltageMode::Volts);
        assert!((a - b).abs() <= 1e-9 * a.abs());
    }
}
