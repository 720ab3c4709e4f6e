//! System parameters, configuration ingestion, and blocking-capacitor design bounds.
//!
//! All electrical, magnetic, device, and sampling parameters live in
//! [`ConverterParams`]. The config format is flat `key = value` text with `#`
//! comments; keys are named exactly after the parameter fields.

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Placeholder device on-resistance used when `R_ds_on` is not configured.
///
/// This is plumbing for the loss pipeline, not device data; outputs that
/// relied on it are flagged (see [`crate::metrics::GridCycleResult::used_placeholder_device`]).
pub const PLACEHOLDER_R_DS_ON: f64 = 21e-3;

/// Placeholder device output capacitance used when `C_oss` is not configured.
/// Same caveat as [`PLACEHOLDER_R_DS_ON`].
pub const PLACEHOLDER_C_OSS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ParamsError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config line {line_no}: expected `key = value`, got `{line}`")]
    Parse { line_no: usize, line: String },
    #[error("unknown config key `{key}`")]
    UnknownKey { key: String },
    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("preconditions violated: {0}")]
    Precondition(String),
}

/// Converter topology selector.
///
/// Both topologies share the same modulation and AC-side waveforms; they
/// differ only in whether the DC-side common-mode component is removed from
/// the inductor voltage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    /// Y-configuration active bridge: inductor sees the differential-mode
    /// bridge voltage (common mode subtracted).
    Yab,
    /// Phase-modular AC-DC dual-active-bridge baseline: inductor sees the
    /// full bridge voltage.
    AcdcDab,
}

impl Topology {
    pub const ALL: [Topology; 2] = [Topology::Yab, Topology::AcdcDab];

    pub fn config_name(self) -> &'static str {
        match self {
            Topology::Yab => "YAB",
            Topology::AcdcDab => "ACDC_DAB",
        }
    }

    pub fn parse(s: &str) -> Option<Topology> {
        match s {
            "YAB" => Some(Topology::Yab),
            "ACDC_DAB" => Some(Topology::AcdcDab),
            _ => None,
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.config_name())
    }
}

/// Full parameter set.
///
/// `Default` carries the reference design values: 277 V RMS / 60 Hz grid,
/// 200 V DC, 100 kHz switching, 19.3 µH link inductance, 24.8 mΩ series
/// resistance, 4.5 µF blocking capacitance, 512 samples per switching period,
/// 360 grid angles, 6-turn 1.56e-3 m² external inductor, 21-turn 7.84e-4 m²
/// transformer. Device values (`r_ds_on`, `c_oss`) and the loss-map path have
/// no defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ConverterParams {
    /// Grid phase voltage, volts RMS.
    pub v_g_rms: f64,
    /// Grid frequency, hertz.
    pub f_g: f64,
    /// DC output voltage, volts.
    pub v_dc: f64,
    /// Switching frequency, hertz.
    pub f_sw: f64,
    /// Total link inductance per phase, henries.
    pub l_t: f64,
    /// Total series resistance per phase, ohms. Zero selects the ideal
    /// inductor model.
    pub r_series: f64,
    /// Blocking capacitance, farads.
    pub c_b: f64,
    /// Samples per switching period (must be even, ≥ 8).
    pub n_sw: usize,
    /// Grid-angle samples per grid period (must be divisible by 3).
    pub n_theta: usize,
    /// Device on-resistance, ohms. `None` → placeholder with flagged output.
    pub r_ds_on: Option<f64>,
    /// Device output capacitance, farads. `None` → placeholder with flagged
    /// output.
    pub c_oss: Option<f64>,
    /// External inductor turns.
    pub n_l: usize,
    /// External inductor core cross-section, m².
    pub a_c_l: f64,
    /// Transformer turns (1:1).
    pub n_t: usize,
    /// Transformer core cross-section, m².
    pub a_c_t: f64,
    pub topology: Topology,
    /// Optional switching-energy map CSV; absent → synthetic default map.
    pub loss_map: Option<PathBuf>,
}

impl Default for ConverterParams {
    fn default() -> Self {
        ConverterParams {
            v_g_rms: 277.0,
            f_g: 60.0,
            v_dc: 200.0,
            f_sw: 100e3,
            l_t: 19.3e-6,
            r_series: 24.8e-3,
            c_b: 4.5e-6,
            n_sw: 512,
            n_theta: 360,
            r_ds_on: None,
            c_oss: None,
            n_l: 6,
            a_c_l: 1.56e-3,
            n_t: 21,
            a_c_t: 7.84e-4,
            topology: Topology::Yab,
            loss_map: None,
        }
    }
}

impl ConverterParams {
    /// Peak grid phase voltage, √2 · v_g_rms.
    pub fn v_g_peak(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.v_g_rms
    }

    /// Switching period, seconds.
    pub fn t_sw(&self) -> f64 {
        1.0 / self.f_sw
    }

    /// Device on-resistance with placeholder fallback; second value is true
    /// when the placeholder was used.
    pub fn resolve_r_ds_on(&self) -> (f64, bool) {
        match self.r_ds_on {
            Some(r) => (r, false),
            None => (PLACEHOLDER_R_DS_ON, true),
        }
    }

    /// Device output capacitance with placeholder fallback.
    pub fn resolve_c_oss(&self) -> (f64, bool) {
        match self.c_oss {
            Some(c) => (c, false),
            None => (PLACEHOLDER_C_OSS, true),
        }
    }

    /// Checks every invariant; returns all violations, errors and warnings
    /// alike. An empty error set means the parameters are usable.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut err = |msg: String| {
            out.push(Violation {
                severity: Severity::Error,
                message: msg,
            })
        };

        for (key, val) in [
            ("v_g_rms", self.v_g_rms),
            ("f_g", self.f_g),
            ("v_dc", self.v_dc),
            ("f_sw", self.f_sw),
            ("L_t", self.l_t),
            ("C_B", self.c_b),
            ("A_c_l", self.a_c_l),
            ("A_c_t", self.a_c_t),
        ] {
            if val <= 0.0 || !val.is_finite() {
                err(format!("{key} must be positive (got {val})"));
            }
        }
        if self.r_series < 0.0 || !self.r_series.is_finite() {
            err(format!(
                "R_series must be non-negative (got {})",
                self.r_series
            ));
        }
        for (key, val) in [("R_ds_on", self.r_ds_on), ("C_oss", self.c_oss)] {
            if let Some(v) = val {
                if v <= 0.0 || !v.is_finite() {
                    err(format!("{key} must be positive (got {v})"));
                }
            }
        }
        if !self.n_sw.is_multiple_of(2) {
            err(format!("N_sw must be even (got {})", self.n_sw));
        }
        if self.n_sw < 8 {
            err(format!("N_sw must be at least 8 (got {})", self.n_sw));
        }
        if self.n_theta == 0 || !self.n_theta.is_multiple_of(3) {
            err(format!(
                "n_theta must be a positive multiple of 3 (got {})",
                self.n_theta
            ));
        }
        if self.n_l == 0 {
            err("N_l must be positive".into());
        }
        if self.n_t == 0 {
            err("N_t must be positive".into());
        }
        // Duty magnitude |v_p|/(2 v_dc)·T_sw/2 must stay within a half period.
        if self.v_dc > 0.0 && self.v_dc < self.v_g_peak() / 2.0 {
            err(format!(
                "v_dc over-modulation: v_dc = {} is below v_g_peak/2 = {:.2}",
                self.v_dc,
                self.v_g_peak() / 2.0
            ));
        }

        if out.is_empty() {
            if let Ok(bounds) =
                blocking_cap_bounds(self.l_t, self.f_g, self.f_sw, DESIGN_EPSILON, DESIGN_LAMBDA)
            {
                if self.c_b < bounds.c_min {
                    out.push(Violation {
                        severity: Severity::Warning,
                        message: format!(
                            "C_B = {} F is below resonance lower bound {:.3e} F",
                            self.c_b, bounds.c_min
                        ),
                    });
                } else if self.c_b > bounds.c_max {
                    out.push(Violation {
                        severity: Severity::Warning,
                        message: format!(
                            "C_B = {} F is above grid-blocking upper bound {:.3e} F",
                            self.c_b, bounds.c_max
                        ),
                    });
                }
            }
        }
        out
    }

    fn validated(self) -> Result<Self, ParamsError> {
        let errors: Vec<String> = self
            .validate()
            .into_iter()
            .filter(|v| v.severity == Severity::Error)
            .map(|v| v.message)
            .collect();
        if errors.is_empty() {
            Ok(self)
        } else {
            Err(ParamsError::Invalid(errors.join("; ")))
        }
    }

    /// Applies one `key = value` setting. Keys match the config-file names.
    pub fn apply_setting(&mut self, key: &str, value: &str) -> Result<(), ParamsError> {
        fn f64_of(key: &str, value: &str) -> Result<f64, ParamsError> {
            value.parse().map_err(|_| ParamsError::InvalidValue {
                key: key.into(),
                reason: format!("`{value}` is not a number"),
            })
        }
        fn usize_of(key: &str, value: &str) -> Result<usize, ParamsError> {
            value.parse().map_err(|_| ParamsError::InvalidValue {
                key: key.into(),
                reason: format!("`{value}` is not a non-negative integer"),
            })
        }

        match key {
            "v_g_rms" => self.v_g_rms = f64_of(key, value)?,
            "f_g" => self.f_g = f64_of(key, value)?,
            "v_dc" => self.v_dc = f64_of(key, value)?,
            "f_sw" => self.f_sw = f64_of(key, value)?,
            "L_t" => self.l_t = f64_of(key, value)?,
            "R_series" => self.r_series = f64_of(key, value)?,
            "C_B" => self.c_b = f64_of(key, value)?,
            "N_sw" => self.n_sw = usize_of(key, value)?,
            "n_theta" => self.n_theta = usize_of(key, value)?,
            "R_ds_on" => self.r_ds_on = Some(f64_of(key, value)?),
            "C_oss" => self.c_oss = Some(f64_of(key, value)?),
            "N_l" => self.n_l = usize_of(key, value)?,
            "A_c_l" => self.a_c_l = f64_of(key, value)?,
            "N_t" => self.n_t = usize_of(key, value)?,
            "A_c_t" => self.a_c_t = f64_of(key, value)?,
            "topology" => {
                self.topology = Topology::parse(value).ok_or_else(|| ParamsError::InvalidValue {
                    key: key.into(),
                    reason: format!("`{value}` is not one of YAB, ACDC_DAB"),
                })?
            }
            "loss_map" => self.loss_map = Some(PathBuf::from(value)),
            _ => return Err(ParamsError::UnknownKey { key: key.into() }),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub severity: Severity,
    pub message: String,
}

/// Parses a flat `key = value` config file on top of the defaults and
/// validates the result.
pub fn load_config(path: &Path) -> Result<ConverterParams, ParamsError> {
    let text = std::fs::read_to_string(path).map_err(|source| ParamsError::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut params = ConverterParams::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ParamsError::Parse {
            line_no: idx + 1,
            line: raw.trim().to_owned(),
        })?;
        params.apply_setting(key.trim(), value.trim())?;
    }
    params.validated()
}

/// Writes the full parameter set in the config format; `load_config` of the
/// output reproduces the input exactly.
pub fn save_config(params: &ConverterParams, path: &Path) -> Result<(), ParamsError> {
    let mut text = String::from("# converter parameters\n");
    for (key, value) in config_entries(params) {
        text.push_str(&format!("{key} = {value}\n"));
    }
    std::fs::write(path, text).map_err(|source| ParamsError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Key/value view of the parameter set, in fixed order. Shared by
/// `save_config` and the CSV header stamps.
pub fn config_entries(params: &ConverterParams) -> Vec<(&'static str, String)> {
    let mut out = vec![
        ("v_g_rms", params.v_g_rms.to_string()),
        ("f_g", params.f_g.to_string()),
        ("v_dc", params.v_dc.to_string()),
        ("f_sw", params.f_sw.to_string()),
        ("L_t", params.l_t.to_string()),
        ("R_series", params.r_series.to_string()),
        ("C_B", params.c_b.to_string()),
        ("N_sw", params.n_sw.to_string()),
        ("n_theta", params.n_theta.to_string()),
    ];
    if let Some(r) = params.r_ds_on {
        out.push(("R_ds_on", r.to_string()));
    }
    if let Some(c) = params.c_oss {
        out.push(("C_oss", c.to_string()));
    }
    out.push(("N_l", params.n_l.to_string()));
    out.push(("A_c_l", params.a_c_l.to_string()));
    out.push(("N_t", params.n_t.to_string()));
    out.push(("A_c_t", params.a_c_t.to_string()));
    out.push(("topology", params.topology.to_string()));
    if let Some(p) = &params.loss_map {
        out.push(("loss_map", p.display().to_string()));
    }
    out
}

/// Flux-ratio bound used for the blocking-capacitor upper limit.
pub const DESIGN_EPSILON: f64 = 0.01;
/// Resonance-ratio bound used for the blocking-capacitor lower limit.
pub const DESIGN_LAMBDA: f64 = 0.2;

/// Allowable blocking-capacitance range for a given design point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapBounds {
    pub c_min: f64,
    pub c_max: f64,
    pub epsilon: f64,
    pub lambda: f64,
}

/// Blocking-capacitor design bounds.
///
/// The upper limit keeps the grid-frequency flux contribution below `epsilon`
/// of the switching-frequency flux; the lower limit keeps the series-resonant
/// frequency of C_B with the link inductance below `lambda · f_sw`.
pub fn blocking_cap_bounds(
    l_t: f64,
    f_g: f64,
    f_sw: f64,
    epsilon: f64,
    lambda: f64,
) -> Result<CapBounds, ParamsError> {
    let mut bad = Vec::new();
    for (name, v) in [("L_t", l_t), ("f_g", f_g), ("f_sw", f_sw)] {
        if v.is_nan() || v <= 0.0 {
            bad.push(format!("{name} must be positive (got {v})"));
        }
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        bad.push(format!("epsilon must lie in (0, 1) (got {epsilon})"));
    }
    if !(lambda > 0.0 && lambda <= 1.0) {
        bad.push(format!("lambda must lie in (0, 1] (got {lambda})"));
    }
    if !bad.is_empty() {
        return Err(ParamsError::Precondition(bad.join("; ")));
    }
    let c_max = epsilon / (f_g * (f_sw - epsilon * f_g) * l_t);
    let c_min = 1.0 / (4.0 * std::f64::consts::PI.powi(2) * lambda * lambda * f_sw * f_sw * l_t);
    Ok(CapBounds {
        c_min,
        c_max,
        epsilon,
        lambda,
    })
}

/// Ratio of grid-frequency to switching-frequency flux implied by a chosen
/// blocking capacitance; the inverse of the `c_max` design relation.
pub fn lf_flux_ratio(c_b: f64, l_t: f64, f_g: f64, f_sw: f64) -> f64 {
    c_b * f_g * f_sw * l_t / (1.0 + c_b * f_g * f_g * l_t)
}
