//! Grid-period sweep and derived metrics.
//!
//! Runs the switching-cycle model over one grid period of angles and
//! computes phase and total power, grid current and THD, winding current
//! stress, turn-on currents with ZVS classification, switching and
//! conduction losses, and magnetic flux figures.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::modulation::ModulationError;
use crate::params::ConverterParams;
use crate::solver::{solve_cycle, LinkImpedanceSpec, SolverError};
use crate::waveforms::{
    ac_switch_voltage, synthesize_cycle, CycleGates, SwitchVoltageMode, SwitchingCycle,
    WaveformError,
};

/// Harmonics summed in the THD numerator by default.
pub const DEFAULT_THD_HARMONICS: usize = 50;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Waveform(#[from] WaveformError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Modulation(#[from] ModulationError),
    #[error(transparent)]
    LossMap(#[from] LossMapError),
    #[error("grid voltage magnitude {v_a} V at grid index {index} is below 1e-6 of the peak")]
    GridVoltageTooSmall { index: usize, v_a: f64 },
    #[error("harmonic count {n} outside 2..{max}")]
    BadHarmonicCount { n: usize, max: usize },
    #[error("cycle current not solved")]
    CurrentNotSolved,
    #[error("phase power {p_hat} W is not positive; flux cannot be normalized")]
    ZeroPhasePower { p_hat: f64 },
}

/// Turn-on condition of a half-bridge switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZvsClass {
    /// Commutating current magnitude large enough to complete the resonant
    /// transition: lossless turn-on.
    FullZvs,
    /// Negative turn-on current but below the complete-commutation
    /// threshold.
    PartialZvs,
    /// Non-negative turn-on current: hard switching.
    Hard,
    /// Switch voltage already zero (clamped interval): no switching event.
    Clamped,
}

/// Turn-on classification. `v_sw = 0` means the device is clamped; a
/// non-negative current is hard switching; otherwise the magnitude is
/// compared against v_sw·√(2·C_oss/L_t), the current needed to complete the
/// capacitive commutation from the link inductance.
pub fn zvs_classify(i_sw: f64, v_sw: f64, l_t: f64, c_oss: f64) -> ZvsClass {
    if v_sw == 0.0 {
        ZvsClass::Clamped
    } else if i_sw >= 0.0 {
        ZvsClass::Hard
    } else if i_sw.abs() > v_sw * (2.0 * c_oss / l_t).sqrt() {
        ZvsClass::FullZvs
    } else {
        ZvsClass::PartialZvs
    }
}

#[derive(Debug, Error)]
pub enum LossMapError {
    #[error("cannot read loss map {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("loss map header must be `v,i,e`, got `{0}`")]
    Header(String),
    #[error("loss map line {line_no}: `{line}` is not three numbers")]
    Row { line_no: usize, line: String },
    #[error("loss map is not a rectangular grid: {rows} rows for {n_v} × {n_i} axis points")]
    NotRectangular { rows: usize, n_v: usize, n_i: usize },
    #[error("duplicate loss map grid point (v = {v}, i = {i})")]
    DuplicatePoint { v: f64, i: f64 },
    #[error("negative switching energy {e} J at (v = {v}, i = {i})")]
    NegativeEnergy { v: f64, i: f64, e: f64 },
    #[error("loss map needs at least a 2 × 2 grid, got {n_v} × {n_i}")]
    TooSmall { n_v: usize, n_i: usize },
}

/// Synthetic map: capacitive turn-on energy at the reference voltage.
pub const SYNTHETIC_E_CAP: f64 = 100e-6;
/// Synthetic map: voltage at which the capacitive term equals
/// [`SYNTHETIC_E_CAP`].
pub const SYNTHETIC_V_REF: f64 = 200.0;
/// Synthetic map: turn-on V·I overlap coefficient, joules per volt-ampere.
pub const SYNTHETIC_K_ON: f64 = 0.05e-6;
/// Synthetic map: turn-off V·I overlap coefficient, joules per volt-ampere.
pub const SYNTHETIC_K_OFF: f64 = 0.005e-6;

/// Half-bridge switching-energy surface E_sw(v, i).
///
/// Negative turn-on current means the device commutates under zero-voltage
/// conditions and only the turn-off overlap remains; non-negative current
/// adds the capacitive dump and the turn-on overlap. The shipped synthetic
/// surface is analytic plumbing for pipeline testing, not device data:
///
/// - i ≥ 0: E = E_cap·(v/V_ref) + (k_on + k_off)·v·|i|
/// - i < 0: E = k_off·v·|i|
///
/// A measured map can be supplied as CSV (`v,i,e` header, rectangular grid)
/// and is evaluated by bilinear interpolation with edge clamping; clamp
/// events are counted.
#[derive(Debug)]
pub enum LossMap {
    Synthetic,
    Table(TableLossMap),
}

impl LossMap {
    /// The analytic default surface.
    pub fn synthetic_default() -> Self {
        LossMap::Synthetic
    }

    pub fn from_csv(path: &Path) -> Result<Self, LossMapError> {
        Ok(LossMap::Table(TableLossMap::from_csv(path)?))
    }

    /// Resolves the map configured in `params` (CSV if a path is set,
    /// synthetic otherwise).
    pub fn from_params(params: &ConverterParams) -> Result<Self, LossMapError> {
        match &params.loss_map {
            Some(path) => Self::from_csv(path),
            None => Ok(Self::synthetic_default()),
        }
    }

    pub fn is_synthetic(&self) -> bool {
        matches!(self, LossMap::Synthetic)
    }

    /// Switching energy at (v, i), joules.
    pub fn energy(&self, v_sw: f64, i_sw: f64) -> f64 {
        match self {
            LossMap::Synthetic => {
                let v = v_sw.max(0.0);
                if i_sw >= 0.0 {
                    SYNTHETIC_E_CAP * (v / SYNTHETIC_V_REF)
                        + (SYNTHETIC_K_ON + SYNTHETIC_K_OFF) * v * i_sw.abs()
                } else {
                    SYNTHETIC_K_OFF * v * i_sw.abs()
                }
            }
            LossMap::Table(t) => t.energy(v_sw, i_sw),
        }
    }

    /// Lookups that fell outside the table and were clamped to its edge.
    /// Always zero for the synthetic surface.
    pub fn clamp_count(&self) -> usize {
        match self {
            LossMap::Synthetic => 0,
            LossMap::Table(t) => t.clamp_count.load(Ordering::Relaxed),
        }
    }
}

/// Measured switching-energy table on a rectangular (v, i) grid.
#[derive(Debug)]
pub struct TableLossMap {
    v_axis: Vec<f64>,
    i_axis: Vec<f64>,
    /// Row-major energy: `energy[vi * i_axis.len() + ii]`.
    energy: Vec<f64>,
    clamp_count: AtomicUsize,
}

impl TableLossMap {
    pub fn from_csv(path: &Path) -> Result<Self, LossMapError> {
        let text = std::fs::read_to_string(path).map_err(|source| LossMapError::Io {
            path: path.to_owned(),
            source,
        })?;
        let mut lines = text.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, l)) if l.trim().is_empty() => continue,
                Some((_, l)) => break l.trim().to_owned(),
                None => return Err(LossMapError::Header(String::new())),
            }
        };
        let normalized: String = header.chars().filter(|c| !c.is_whitespace()).collect();
        if normalized != "v,i,e" {
            return Err(LossMapError::Header(header));
        }

        let mut points: Vec<(f64, f64, f64)> = Vec::new();
        for (idx, raw) in lines {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let row = || LossMapError::Row {
                line_no: idx + 1,
                line: line.to_owned(),
            };
            let mut fields = line.split(',');
            let mut next = || -> Result<f64, LossMapError> {
                fields
                    .next()
                    .ok_or_else(row)?
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| row())
            };
            let (v, i, e) = (next()?, next()?, next()?);
            if fields.next().is_some() || !v.is_finite() || !i.is_finite() || !e.is_finite() {
                return Err(row());
            }
            if e < 0.0 {
                return Err(LossMapError::NegativeEnergy { v, i, e });
            }
            points.push((v, i, e));
        }

        let mut v_axis: Vec<f64> = points.iter().map(|p| p.0).collect();
        v_axis.sort_by(f64::total_cmp);
        v_axis.dedup();
        let mut i_axis: Vec<f64> = points.iter().map(|p| p.1).collect();
        i_axis.sort_by(f64::total_cmp);
        i_axis.dedup();
        if v_axis.len() < 2 || i_axis.len() < 2 {
            return Err(LossMapError::TooSmall {
                n_v: v_axis.len(),
                n_i: i_axis.len(),
            });
        }
        if points.len() != v_axis.len() * i_axis.len() {
            return Err(LossMapError::NotRectangular {
                rows: points.len(),
                n_v: v_axis.len(),
                n_i: i_axis.len(),
            });
        }

        let mut energy = vec![f64::NAN; points.len()];
        for (v, i, e) in points {
            let vi = v_axis.binary_search_by(|x| x.total_cmp(&v)).unwrap();
            let ii = i_axis.binary_search_by(|x| x.total_cmp(&i)).unwrap();
            let slot = &mut energy[vi * i_axis.len() + ii];
            if !slot.is_nan() {
                return Err(LossMapError::DuplicatePoint { v, i });
            }
            *slot = e;
        }
        Ok(TableLossMap {
            v_axis,
            i_axis,
            energy,
            clamp_count: AtomicUsize::new(0),
        })
    }

    fn energy(&self, v: f64, i: f64) -> f64 {
        let (v, clamped_v) = clamp_to(&self.v_axis, v);
        let (i, clamped_i) = clamp_to(&self.i_axis, i);
        if clamped_v || clamped_i {
            self.clamp_count.fetch_add(1, Ordering::Relaxed);
        }
        let (vi, tv) = cell_of(&self.v_axis, v);
        let (ii, ti) = cell_of(&self.i_axis, i);
        let ni = self.i_axis.len();
        let e00 = self.energy[vi * ni + ii];
        let e01 = self.energy[vi * ni + ii + 1];
        let e10 = self.energy[(vi + 1) * ni + ii];
        let e11 = self.energy[(vi + 1) * ni + ii + 1];
        let low = e00 * (1.0 - ti) + e01 * ti;
        let high = e10 * (1.0 - ti) + e11 * ti;
        low * (1.0 - tv) + high * tv
    }
}

fn clamp_to(axis: &[f64], x: f64) -> (f64, bool) {
    let lo = axis[0];
    let hi = axis[axis.len() - 1];
    if x < lo {
        (lo, true)
    } else if x > hi {
        (hi, true)
    } else {
        (x, false)
    }
}

/// Cell index and interpolation fraction for `x` already inside the axis.
fn cell_of(axis: &[f64], x: f64) -> (usize, f64) {
    let idx = axis.partition_point(|&a| a <= x).min(axis.len() - 1) - 1;
    let span = axis[idx + 1] - axis[idx];
    (idx, (x - axis[idx]) / span)
}

/// Switching loss of one half-bridge at one grid angle:
/// f_sw · E_sw(v_sw, i_sw), zero when the switch is clamped.
pub fn switching_loss(
    v_sw: f64,
    i_sw: f64,
    cls: ZvsClass,
    map: &LossMap,
    f_sw: f64,
) -> f64 {
    if cls == ZvsClass::Clamped {
        0.0
    } else {
        f_sw * map.energy(v_sw, i_sw)
    }
}

/// Conduction loss of one half-bridge: mean-square current times on-state
/// resistance.
pub fn conduction_loss(i_t: &[f64], r_ds_on: f64) -> f64 {
    if i_t.is_empty() {
        return 0.0;
    }
    i_t.iter().map(|s| s * s).sum::<f64>() / i_t.len() as f64 * r_ds_on
}

/// Average power delivered through one phase over a switching period.
pub fn phase_power(v_an: &[f64], i_t: &[f64]) -> f64 {
    assert_eq!(v_an.len(), i_t.len(), "sequence lengths must match");
    if v_an.is_empty() {
        return 0.0;
    }
    v_an.iter().zip(i_t).map(|(v, i)| v * i).sum::<f64>() / v_an.len() as f64
}

/// Grid current i_a = p_a/v_a per angle, plus its total harmonic distortion
/// over the first `n_harmonics` harmonics.
pub fn grid_current_and_thd(
    p_a: &[f64],
    v_a: &[f64],
    n_harmonics: usize,
) -> Result<(Vec<f64>, f64), MetricsError> {
    assert_eq!(p_a.len(), v_a.len(), "sequence lengths must match");
    let n = p_a.len();
    if n_harmonics < 2 || n_harmonics >= n / 2 {
        return Err(MetricsError::BadHarmonicCount {
            n: n_harmonics,
            max: n / 2,
        });
    }
    let v_peak = v_a.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let i_a: Vec<f64> = p_a
        .iter()
        .zip(v_a)
        .enumerate()
        .map(|(idx, (p, v))| {
            if v.abs() < 1e-6 * v_peak {
                Err(MetricsError::GridVoltageTooSmall {
                    index: idx,
                    v_a: *v,
                })
            } else {
                Ok(p / v)
            }
        })
        .collect::<Result<_, _>>()?;
    let thd = thd_of(&i_a, n_harmonics);
    Ok((i_a, thd))
}

fn thd_of(i_a: &[f64], n_harmonics: usize) -> f64 {
    let n = i_a.len();
    let mut buf: Vec<Complex<f64>> = i_a.iter().map(|&s| Complex::new(s, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let fundamental = buf[1].norm();
    let harmonics: f64 = (2..=n_harmonics).map(|k| buf[k].norm_sqr()).sum();
    harmonics.sqrt() / fundamental
}

/// System current stress: RMS of the winding current over the whole grid
/// period (the concatenation of all per-angle cycles).
pub fn current_stress<'a>(cycles: impl IntoIterator<Item = &'a SwitchingCycle>) -> f64 {
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    for cycle in cycles {
        sum_sq += cycle.i_t.iter().map(|s| s * s).sum::<f64>();
        count += cycle.i_t.len();
    }
    if count == 0 {
        0.0
    } else {
        (sum_sq / count as f64).sqrt()
    }
}

/// Turn-on currents of the three switches of one phase leg set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurnOnCurrents {
    /// AC half-bridge high switch: winding current at its rising edge.
    pub i_sw_a: f64,
    /// DC leg 1 high switch: negated winding current at its rising edge.
    pub i_sw_x1: f64,
    /// DC leg 2 high switch: winding current at its rising edge.
    pub i_sw_x2: f64,
}

/// Extracts turn-on currents from a solved cycle; the turn-on instants are
/// the rising edges of the gate waveforms.
pub fn turn_on_currents(
    cycle: &SwitchingCycle,
    gates: &CycleGates,
) -> Result<TurnOnCurrents, MetricsError> {
    if cycle.i_t.len() != cycle.v_l.len() {
        return Err(MetricsError::CurrentNotSolved);
    }
    Ok(TurnOnCurrents {
        i_sw_a: cycle.i_t[gates.ac.rising_edge()],
        i_sw_x1: -cycle.i_t[gates.dc_1.rising_edge()],
        i_sw_x2: cycle.i_t[gates.dc_2.rising_edge()],
    })
}

/// Peak flux density in the external inductor and its power-normalized form.
///
/// B_max integrates |v_L| over the worst half-resonant excursion:
/// ‖v_L‖₁/(4·N_l·N_sw·f_sw·A_c_l). The normalized figure divides by the
/// phase power at the same angle.
pub fn inductor_flux(
    v_l: &[f64],
    n_l: usize,
    a_c_l: f64,
    f_sw: f64,
    p_hat_a: f64,
) -> Result<(f64, f64), MetricsError> {
    if p_hat_a.is_nan() || p_hat_a <= 0.0 {
        return Err(MetricsError::ZeroPhasePower { p_hat: p_hat_a });
    }
    let l1: f64 = v_l.iter().map(|s| s.abs()).sum();
    let b_max = l1 / (4.0 * n_l as f64 * v_l.len() as f64 * f_sw * a_c_l);
    Ok((b_max, b_max / p_hat_a))
}

/// Peak transformer flux density due to the HF pulse train:
/// v̂_g/(2·N_t)·1/(4·f_sw·A_c_t).
pub fn hft_startup_flux(v_g_peak: f64, n_t: usize, a_c_t: f64, f_sw: f64) -> f64 {
    v_g_peak / (2.0 * n_t as f64) / (4.0 * f_sw) / a_c_t
}

/// Per-angle turn-on record of phase a's switch set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurnOnRecord {
    pub i_sw_a: f64,
    pub i_sw_x1: f64,
    pub i_sw_x2: f64,
    /// AC switching voltage (volts scale), used for the loss lookup.
    pub v_sw_a: f64,
    pub zvs_a: ZvsClass,
    pub zvs_x1: ZvsClass,
    pub zvs_x2: ZvsClass,
}

/// Per-angle switching loss, watts per half-bridge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchLoss {
    pub ac: f64,
    pub x1: f64,
    pub x2: f64,
}

/// Everything the grid sweep produces at one (parameters, φ) point.
#[derive(Debug, Clone)]
pub struct GridCycleResult {
    /// Phase shift as a fraction of T_sw.
    pub phi_frac: f64,
    /// Grid angles, degrees, offset-centered: {0.5°, 1.5°, …}.
    pub theta_grid: Vec<f64>,
    pub p_a: Vec<f64>,
    pub p_b: Vec<f64>,
    pub p_c: Vec<f64>,
    pub p_total: Vec<f64>,
    /// Mean of `p_total` over the grid period, watts.
    pub p_avg: f64,
    /// Grid current per angle, amperes.
    pub i_a: Vec<f64>,
    pub thd: f64,
    /// Current stress: winding RMS over the grid period, amperes.
    pub i_t_rms: f64,
    pub turn_on: Vec<TurnOnRecord>,
    pub p_sw: Vec<SwitchLoss>,
    /// Conduction loss per DC half-bridge per angle, watts.
    pub p_cond: Vec<f64>,
    /// Peak inductor flux density at the peak-voltage angle, tesla.
    pub b_max: f64,
    /// Power-normalized flux density, tesla per watt; `None` when the phase
    /// power at the peak-voltage angle is not positive (φ ≈ 0).
    pub b_bar_max: Option<f64>,
    /// Set when placeholder device values stood in for R_ds_on or C_oss.
    pub used_placeholder_device: bool,
    /// Set when the analytic default loss surface was used.
    pub loss_map_is_synthetic: bool,
    /// Loss-map lookups clamped to the table edge during this sweep.
    pub clamp_events: usize,
}

/// Total switching and conduction losses averaged over the grid period,
/// summed over the 3 AC half-bridges and 6 DC half-bridges via phase and leg
/// symmetry.
pub fn aggregate_losses(result: &GridCycleResult) -> (f64, f64) {
    let n = result.theta_grid.len() as f64;
    let sw: f64 = result.p_sw.iter().map(|s| s.ac + s.x1 + s.x2).sum::<f64>() / n;
    let cond: f64 = result.p_cond.iter().sum::<f64>() / n;
    (3.0 * sw, 9.0 * cond)
}

/// Synthesizes and solves one phase cycle at (θ, φ).
pub fn simulate_cycle(
    params: &ConverterParams,
    theta_deg: f64,
    phi_frac: f64,
    phase: usize,
) -> Result<(SwitchingCycle, CycleGates), MetricsError> {
    let (mut cycle, gates) = synthesize_cycle(params, theta_deg, phi_frac, phase)?;
    solve_cycle(&mut cycle, &LinkImpedanceSpec::from_params(params))?;
    Ok((cycle, gates))
}

struct ThetaRecord {
    p_a: f64,
    irms_sq: f64,
    v_l_l1: f64,
    n_samples: usize,
    turn_on: TurnOnRecord,
    p_sw: SwitchLoss,
    p_cond: f64,
}

fn theta_point(
    params: &ConverterParams,
    phi_frac: f64,
    theta: f64,
    r_ds_on: f64,
    c_oss: f64,
    map: &LossMap,
) -> Result<ThetaRecord, MetricsError> {
    let (cycle, gates) = simulate_cycle(params, theta, phi_frac, 0)?;
    let n = cycle.i_t.len() as f64;
    let p_a = phase_power(&cycle.v_an, &cycle.i_t);
    let irms_sq = cycle.i_t.iter().map(|s| s * s).sum::<f64>() / n;
    let v_l_l1 = cycle.v_l.iter().map(|s| s.abs()).sum();

    let t = turn_on_currents(&cycle, &gates)?;
    let v_sw_a = ac_switch_voltage(theta, params.v_g_rms, params.v_dc, SwitchVoltageMode::Volts);
    let zvs_a = zvs_classify(t.i_sw_a, v_sw_a, params.l_t, c_oss);
    let zvs_x1 = zvs_classify(t.i_sw_x1, params.v_dc, params.l_t, c_oss);
    let zvs_x2 = zvs_classify(t.i_sw_x2, params.v_dc, params.l_t, c_oss);
    let p_sw = SwitchLoss {
        ac: switching_loss(v_sw_a, t.i_sw_a, zvs_a, map, params.f_sw),
        x1: switching_loss(params.v_dc, t.i_sw_x1, zvs_x1, map, params.f_sw),
        x2: switching_loss(params.v_dc, t.i_sw_x2, zvs_x2, map, params.f_sw),
    };

    Ok(ThetaRecord {
        p_a,
        irms_sq,
        v_l_l1,
        n_samples: cycle.i_t.len(),
        turn_on: TurnOnRecord {
            i_sw_a: t.i_sw_a,
            i_sw_x1: t.i_sw_x1,
            i_sw_x2: t.i_sw_x2,
            v_sw_a,
            zvs_a,
            zvs_x1,
            zvs_x2,
        },
        p_sw,
        p_cond: irms_sq * r_ds_on,
    })
}

/// Full grid sweep at one phase shift, using the loss map configured in
/// `params`.
pub fn grid_cycle(params: &ConverterParams, phi_frac: f64) -> Result<GridCycleResult, MetricsError> {
    let map = LossMap::from_params(params)?;
    grid_cycle_with_map(params, phi_frac, &map)
}

/// Full grid sweep with an explicit loss map (reusable across φ points).
pub fn grid_cycle_with_map(
    params: &ConverterParams,
    phi_frac: f64,
    map: &LossMap,
) -> Result<GridCycleResult, MetricsError> {
    let errors: Vec<String> = params
        .validate()
        .into_iter()
        .filter(|v| v.severity == crate::params::Severity::Error)
        .map(|v| v.message)
        .collect();
    if !errors.is_empty() {
        return Err(MetricsError::InvalidParams(errors.join("; ")));
    }

    let (r_ds_on, used_r_placeholder) = params.resolve_r_ds_on();
    let (c_oss, used_c_placeholder) = params.resolve_c_oss();
    let clamp_before = map.clamp_count();

    let n = params.n_theta;
    let step = 360.0 / n as f64;
    let theta_grid: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * step).collect();

    let records: Vec<ThetaRecord> = theta_grid
        .par_iter()
        .map(|&theta| theta_point(params, phi_frac, theta, r_ds_on, c_oss, map))
        .collect::<Result<_, _>>()?;

    let p_a: Vec<f64> = records.iter().map(|r| r.p_a).collect();
    let third = n / 3;
    let rotate = |shift: usize| -> Vec<f64> {
        (0..n).map(|i| p_a[(i + n - shift) % n]).collect()
    };
    let p_b = rotate(third);
    let p_c = rotate(2 * third);
    let p_total: Vec<f64> = (0..n).map(|i| p_a[i] + p_b[i] + p_c[i]).collect();
    let p_avg = p_total.iter().sum::<f64>() / n as f64;

    let v_a: Vec<f64> = theta_grid
        .iter()
        .map(|&t| crate::modulation::grid_voltages(t, params.v_g_peak())[0])
        .collect();
    // Coarser grids than the default 360 support fewer harmonics.
    let n_harmonics = DEFAULT_THD_HARMONICS.min(n / 2 - 1);
    let (i_a, thd) = grid_current_and_thd(&p_a, &v_a, n_harmonics)?;

    let irms_sq_sum: f64 = records.iter().map(|r| r.irms_sq).sum();
    let i_t_rms = (irms_sq_sum / n as f64).sqrt();

    // Peak-voltage angle: nearest to θ = 0 on the offset grid is the first
    // point.
    let flux_rec = &records[0];
    let b_max = flux_rec.v_l_l1
        / (4.0 * params.n_l as f64 * flux_rec.n_samples as f64 * params.f_sw * params.a_c_l);
    let b_bar_max = if flux_rec.p_a > 0.0 {
        Some(b_max / flux_rec.p_a)
    } else {
        None
    };

    Ok(GridCycleResult {
        phi_frac,
        theta_grid,
        p_a,
        p_b,
        p_c,
        p_total,
        p_avg,
        i_a,
        thd,
        i_t_rms,
        turn_on: records.iter().map(|r| r.turn_on).collect(),
        p_sw: records.iter().map(|r| r.p_sw).collect(),
        p_cond: records.iter().map(|r| r.p_cond).collect(),
        b_max,
        b_bar_max,
        used_placeholder_device: used_r_placeholder || used_c_placeholder,
        loss_map_is_synthetic: map.is_synthetic(),
        clamp_events: map.clamp_count() - clamp_before,
    })
}
