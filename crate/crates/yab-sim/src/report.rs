//! Sweep and figure generation: CSV datasets plus plain-text plot scripts.
//!
//! Every CSV starts with comment lines recording the fully resolved
//! parameter set, so a file is self-describing and a rerun with the same
//! inputs is byte-identical (floats use the shortest round-trip form).

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::metrics::{
    aggregate_losses, grid_cycle_with_map, simulate_cycle, GridCycleResult, LossMap, MetricsError,
    ZvsClass,
};
use crate::oracle::{compare, simulate_zoh, OracleError};
use crate::params::{config_entries, ConverterParams, ParamsError, Topology};
use crate::solver::{steady_state_current, LinkImpedanceSpec};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    LossMap(#[from] crate::metrics::LossMapError),
    #[error(transparent)]
    Waveform(#[from] crate::waveforms::WaveformError),
    #[error(transparent)]
    Solver(#[from] crate::solver::SolverError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),
    #[error("unknown figure id `{0}`")]
    UnknownFigure(String),
}

/// Metric families a sweep can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Power,
    Thd,
    Stress,
    Zvs,
    Loss,
    Flux,
}

impl MetricKind {
    pub const ALL: [MetricKind; 6] = [
        MetricKind::Power,
        MetricKind::Thd,
        MetricKind::Stress,
        MetricKind::Zvs,
        MetricKind::Loss,
        MetricKind::Flux,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Power => "power",
            MetricKind::Thd => "thd",
            MetricKind::Stress => "stress",
            MetricKind::Zvs => "zvs",
            MetricKind::Loss => "loss",
            MetricKind::Flux => "flux",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }
}

/// What a sweep runs over: φ grid (fractions of T_sw), DC voltages,
/// topologies, and which metric families to emit.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub phi_grid: Vec<f64>,
    pub v_dc_list: Vec<f64>,
    pub topologies: Vec<Topology>,
    pub metrics: Vec<MetricKind>,
}

/// The standard φ grid: 26 points covering [0, 0.25]·T_sw.
pub fn default_phi_grid() -> Vec<f64> {
    (0..=25).map(|k| k as f64 / 100.0).collect()
}

/// Extended φ grid to 0.5·T_sw (51 points), used by the loss study.
pub fn full_phi_grid() -> Vec<f64> {
    (0..=50).map(|k| k as f64 / 100.0).collect()
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            phi_grid: default_phi_grid(),
            v_dc_list: vec![200.0, 250.0, 300.0],
            topologies: Topology::ALL.to_vec(),
            metrics: MetricKind::ALL.to_vec(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), ReportError> {
        if self.phi_grid.is_empty()
            || self.v_dc_list.is_empty()
            || self.topologies.is_empty()
            || self.metrics.is_empty()
        {
            return Err(ReportError::InvalidSpec(
                "phi grid, v_dc list, topologies, and metrics must be non-empty".into(),
            ));
        }
        for &phi in &self.phi_grid {
            if !(0.0..=0.5).contains(&phi) {
                return Err(ReportError::InvalidSpec(format!(
                    "phi fraction {phi} outside [0, 0.5]"
                )));
            }
        }
        Ok(())
    }
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn param_comment_lines(params: &ConverterParams) -> String {
    let entries: Vec<String> = config_entries(params)
        .into_iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    let mut out = format!("# params: {}\n", entries.join(" "));
    let (r, r_ph) = params.resolve_r_ds_on();
    let (c, c_ph) = params.resolve_c_oss();
    if r_ph || c_ph {
        out.push_str(&format!(
            "# note: placeholder device values in use, not device data: R_ds_on={r} C_oss={c}\n"
        ));
    }
    if params.loss_map.is_none() {
        out.push_str("# note: synthetic loss map in use, not device data\n");
    }
    out
}

/// Fraction of grid angles where the named DC leg-1 switch turns on with
/// zero-voltage conditions (full or partial).
fn x1_soft_fraction(result: &GridCycleResult) -> f64 {
    let soft = result
        .turn_on
        .iter()
        .filter(|t| matches!(t.zvs_x1, ZvsClass::FullZvs | ZvsClass::PartialZvs))
        .count();
    soft as f64 / result.turn_on.len() as f64
}

/// Largest AC-switch turn-on current over θ ∈ (0°, 90°); negative means ZVS
/// everywhere on that quarter.
fn i_sw_a_max_first_quadrant(result: &GridCycleResult) -> f64 {
    result
        .theta_grid
        .iter()
        .zip(&result.turn_on)
        .filter(|(&theta, _)| theta > 0.0 && theta < 90.0)
        .map(|(_, t)| t.i_sw_a)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Runs the sweep and renders one CSV row per (topology, v_dc, φ), ordered
/// exactly that way. A v_dc that over-modulates the configured grid voltage
/// produces a single error row and skips that series.
pub fn sweep(spec: &SweepSpec, params: &ConverterParams) -> Result<String, ReportError> {
    spec.validate()?;
    let map = LossMap::from_params(params)?;

    let mut columns = vec!["topology".to_owned(), "v_dc".to_owned(), "phi_frac".to_owned()];
    for m in &spec.metrics {
        match m {
            MetricKind::Power => columns.push("P_avg_w".into()),
            MetricKind::Thd => columns.push("thd".into()),
            MetricKind::Stress => columns.push("i_t_rms_a".into()),
            MetricKind::Zvs => {
                columns.push("zvs_x1_soft_frac".into());
                columns.push("i_sw_a_max_q1_a".into());
            }
            MetricKind::Loss => {
                columns.push("p_sw_total_w".into());
                columns.push("p_cond_total_w".into());
            }
            MetricKind::Flux => {
                columns.push("b_max_t".into());
                columns.push("b_bar_max_t_per_w".into());
            }
        }
    }
    columns.push("error".into());

    let mut out = param_comment_lines(params);
    out.push_str(&columns.join(","));
    out.push('\n');

    for &topology in &spec.topologies {
        for &v_dc in &spec.v_dc_list {
            let mut p = params.clone();
            p.topology = topology;
            p.v_dc = v_dc;
            if v_dc < p.v_g_peak() / 2.0 {
                let blank = vec![String::new(); columns.len() - 4];
                let mut row = vec![topology.to_string(), fmt(v_dc), String::new()];
                row.extend(blank);
                row.push(format!(
                    "over-modulation: v_dc below v_g_peak/2 = {}",
                    fmt(p.v_g_peak() / 2.0)
                ));
                out.push_str(&row.join(","));
                out.push('\n');
                continue;
            }
            for &phi in &spec.phi_grid {
                let result = grid_cycle_with_map(&p, phi, &map)?;
                let mut row = vec![topology.to_string(), fmt(v_dc), fmt(phi)];
                for m in &spec.metrics {
                    match m {
                        MetricKind::Power => row.push(fmt(result.p_avg)),
                        MetricKind::Thd => row.push(fmt(result.thd)),
                        MetricKind::Stress => row.push(fmt(result.i_t_rms)),
                        MetricKind::Zvs => {
                            row.push(fmt(x1_soft_fraction(&result)));
                            row.push(fmt(i_sw_a_max_first_quadrant(&result)));
                        }
                        MetricKind::Loss => {
                            let (sw, cond) = aggregate_losses(&result);
                            row.push(fmt(sw));
                            row.push(fmt(cond));
                        }
                        MetricKind::Flux => {
                            row.push(fmt(result.b_max));
                            row.push(result.b_bar_max.map(fmt).unwrap_or_default());
                        }
                    }
                }
                row.push(String::new());
                out.push_str(&row.join(","));
                out.push('\n');
            }
        }
    }
    Ok(out)
}

/// The model figures this artifact reproduces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Per-angle phase and total power at φ = 0.2·T_sw, both topologies.
    PhasePower,
    /// Total power vs φ for v_dc ∈ {200, 250, 300} V.
    PowerVsPhi,
    /// Grid-current THD vs φ, both topologies, three DC voltages.
    Thd,
    /// Winding-current stress vs φ, both topologies, three DC voltages.
    Stress,
    /// Normalized inductor flux density vs φ at v_dc = 300 V.
    Flux,
    /// Turn-on currents of the AC and DC-leg-1 switches vs θ at
    /// v_dc = 200 V.
    Zvs,
    /// Per-angle switching and conduction losses at φ = 0.2·T_sw.
    LossCycle,
    /// Aggregate losses vs φ over the full [0, 0.5]·T_sw range.
    LossVsPhi,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::PhasePower,
        FigureId::PowerVsPhi,
        FigureId::Thd,
        FigureId::Stress,
        FigureId::Flux,
        FigureId::Zvs,
        FigureId::LossCycle,
        FigureId::LossVsPhi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::PhasePower => "phase-power",
            FigureId::PowerVsPhi => "power-vs-phi",
            FigureId::Thd => "thd",
            FigureId::Stress => "stress",
            FigureId::Flux => "flux",
            FigureId::Zvs => "zvs",
            FigureId::LossCycle => "loss-cycle",
            FigureId::LossVsPhi => "loss-vs-phi",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }
}

/// A rendered figure: CSV data and a matching plain-text plot script.
#[derive(Debug, Clone)]
pub struct Figure {
    pub id: FigureId,
    pub csv: String,
    pub plot: String,
}

fn plot_script(id: FigureId, title: &str, xlabel: &str, ylabel: &str, series: &[(usize, String)]) -> String {
    let name = id.name();
    let mut s = String::new();
    s.push_str("set datafile separator \",\"\n");
    s.push_str(&format!("set title \"{title}\"\n"));
    s.push_str(&format!("set xlabel \"{xlabel}\"\n"));
    s.push_str(&format!("set ylabel \"{ylabel}\"\n"));
    s.push_str("set key outside\n");
    let plots: Vec<String> = series
        .iter()
        .map(|(col, label)| {
            format!("\"{name}.csv\" using 1:{col} with lines title \"{label}\"")
        })
        .collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s
}

fn csv_from_columns(
    params: &ConverterParams,
    extra_comments: &[String],
    header: &[String],
    rows: Vec<Vec<String>>,
) -> String {
    let mut out = param_comment_lines(params);
    for c in extra_comments {
        out.push_str(&format!("# {c}\n"));
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Renders one figure using its stated operating conditions (which may
/// override v_dc, v_g, or the sample count recorded in `params`; the CSV
/// header records what was actually used).
pub fn reproduce_figure(id: FigureId, params: &ConverterParams) -> Result<Figure, ReportError> {
    match id {
        FigureId::PhasePower => figure_phase_power(params),
        FigureId::PowerVsPhi => figure_power_vs_phi(params),
        FigureId::Thd => figure_thd(params),
        FigureId::Stress => figure_stress(params),
        FigureId::Flux => figure_flux(params),
        FigureId::Zvs => figure_zvs(params),
        FigureId::LossCycle => figure_loss_cycle(params),
        FigureId::LossVsPhi => figure_loss_vs_phi(params),
    }
}

/// Writes `<id>.csv` and `<id>.plot` into `out_dir`; returns both paths.
pub fn write_figure(
    id: FigureId,
    params: &ConverterParams,
    out_dir: &Path,
) -> Result<(PathBuf, PathBuf), ReportError> {
    let figure = reproduce_figure(id, params)?;
    let csv_path = out_dir.join(format!("{}.csv", id.name()));
    let plot_path = out_dir.join(format!("{}.plot", id.name()));
    write_text(&csv_path, &figure.csv)?;
    write_text(&plot_path, &figure.plot)?;
    Ok((csv_path, plot_path))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), ReportError> {
    std::fs::write(path, text).map_err(|source| ReportError::Io {
        path: path.to_owned(),
        source,
    })
}

const FIGURE_PHI: f64 = 0.2;

fn figure_phase_power(params: &ConverterParams) -> Result<Figure, ReportError> {
    let mut results = Vec::new();
    for topology in Topology::ALL {
        let mut p = params.clone();
        p.topology = topology;
        results.push(crate::metrics::grid_cycle(&p, FIGURE_PHI)?);
    }
    let [yab, dab] = <[GridCycleResult; 2]>::try_from(results).expect("two topologies");
    let header: Vec<String> = [
        "theta_deg",
        "p_a_yab_w",
        "p_b_yab_w",
        "p_c_yab_w",
        "p_total_yab_w",
        "p_a_acdc_dab_w",
        "p_total_acdc_dab_w",
    ]
    .map(String::from)
    .to_vec();
    let rows: Vec<Vec<String>> = (0..yab.theta_grid.len())
        .map(|i| {
            vec![
                fmt(yab.theta_grid[i]),
                fmt(yab.p_a[i]),
                fmt(yab.p_b[i]),
                fmt(yab.p_c[i]),
                fmt(yab.p_total[i]),
                fmt(dab.p_a[i]),
                fmt(dab.p_total[i]),
            ]
        })
        .collect();
    let comments = vec![format!("phi_frac={}", fmt(FIGURE_PHI))];
    let csv = csv_from_columns(params, &comments, &header, rows);
    let series = vec![
        (2, "p_a YAB".to_owned()),
        (3, "p_b YAB".to_owned()),
        (4, "p_c YAB".to_owned()),
        (5, "p_total YAB".to_owned()),
        (6, "p_a AC-DC DAB".to_owned()),
        (7, "p_total AC-DC DAB".to_owned()),
    ];
    let plot = plot_script(
        FigureId::PhasePower,
        "Phase and total power over one grid period",
        "grid angle / deg",
        "power / W",
        &series,
    );
    Ok(Figure {
        id: FigureId::PhasePower,
        csv,
        plot,
    })
}

fn figure_power_vs_phi(params: &ConverterParams) -> Result<Figure, ReportError> {
    let v_dc_list = [200.0, 250.0, 300.0];
    let phi_grid = default_phi_grid();
    let map = LossMap::from_params(params)?;
    let mut curves: Vec<Vec<f64>> = Vec::new();
    for &v_dc in &v_dc_list {
        let mut p = params.clone();
        p.v_dc = v_dc;
        let mut curve = Vec::new();
        for &phi in &phi_grid {
            curve.push(grid_cycle_with_map(&p, phi, &map)?.p_avg);
        }
        curves.push(curve);
    }
    let header: Vec<String> = ["phi_frac", "p_avg_200v_w", "p_avg_250v_w", "p_avg_300v_w"]
        .map(String::from)
        .to_vec();
    let rows: Vec<Vec<String>> = phi_grid
        .iter()
        .enumerate()
        .map(|(i, &phi)| {
            vec![
                fmt(phi),
                fmt(curves[0][i]),
                fmt(curves[1][i]),
                fmt(curves[2][i]),
            ]
        })
        .collect();
    let csv = csv_from_columns(params, &[], &header, rows);
    let series = vec![
        (2, "v_dc = 200 V".to_owned()),
        (3, "v_dc = 250 V".to_owned()),
        (4, "v_dc = 300 V".to_owned()),
    ];
    let plot = plot_script(
        FigureId::PowerVsPhi,
        "Total power vs phase shift",
        "phi / T_sw",
        "P / W",
        &series,
    );
    Ok(Figure {
        id: FigureId::PowerVsPhi,
        csv,
        plot,
    })
}

/// Shared layout for the per-(topology, v_dc) φ-curve figures.
fn topology_vdc_curves(
    params: &ConverterParams,
    phi_grid: &[f64],
    value: impl Fn(&GridCycleResult) -> String,
) -> Result<(Vec<String>, Vec<Vec<String>>), ReportError> {
    let v_dc_list = [200.0, 250.0, 300.0];
    let map = LossMap::from_params(params)?;
    let mut header = vec!["phi_frac".to_owned()];
    let mut columns: Vec<Vec<String>> = Vec::new();
    for topology in Topology::ALL {
        for &v_dc in &v_dc_list {
            let mut p = params.clone();
            p.topology = topology;
            p.v_dc = v_dc;
            header.push(format!(
                "{}_{}v",
                topology.config_name().to_lowercase(),
                v_dc as i64
            ));
            let mut col = Vec::new();
            for &phi in phi_grid {
                col.push(value(&grid_cycle_with_map(&p, phi, &map)?));
            }
            columns.push(col);
        }
    }
    let rows: Vec<Vec<String>> = phi_grid
        .iter()
        .enumerate()
        .map(|(i, &phi)| {
            let mut row = vec![fmt(phi)];
            row.extend(columns.iter().map(|c| c[i].clone()));
            row
        })
        .collect();
    Ok((header, rows))
}

fn curve_series(header: &[String]) -> Vec<(usize, String)> {
    header
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, name)| (i + 1, name.replace('_', " ")))
        .collect()
}

fn figure_thd(params: &ConverterParams) -> Result<Figure, ReportError> {
    // THD needs fine harmonic resolution; coarser sampling aliases into the
    // low harmonics.
    let mut p = params.clone();
    p.n_sw = p.n_sw.max(2048);
    let (header, rows) = topology_vdc_curves(&p, &default_phi_grid(), |r| fmt(r.thd))?;
    let csv = csv_from_columns(&p, &[], &header, rows);
    let plot = plot_script(
        FigureId::Thd,
        "Grid current THD vs phase shift",
        "phi / T_sw",
        "THD",
        &curve_series(&header),
    );
    Ok(Figure {
        id: FigureId::Thd,
        csv,
        plot,
    })
}

fn figure_stress(params: &ConverterParams) -> Result<Figure, ReportError> {
    let (header, rows) = topology_vdc_curves(params, &default_phi_grid(), |r| fmt(r.i_t_rms))?;
    let csv = csv_from_columns(params, &[], &header, rows);
    let plot = plot_script(
        FigureId::Stress,
        "Winding current stress vs phase shift",
        "phi / T_sw",
        "I_t,rms / A",
        &curve_series(&header),
    );
    Ok(Figure {
        id: FigureId::Stress,
        csv,
        plot,
    })
}

fn figure_flux(params: &ConverterParams) -> Result<Figure, ReportError> {
    let mut p = params.clone();
    p.v_dc = 300.0;
    let phi_grid: Vec<f64> = (5..=25).map(|k| k as f64 / 100.0).collect();
    let map = LossMap::from_params(&p)?;
    let mut by_topology = Vec::new();
    for topology in Topology::ALL {
        let mut pt = p.clone();
        pt.topology = topology;
        let mut col = Vec::new();
        for &phi in &phi_grid {
            let r = grid_cycle_with_map(&pt, phi, &map)?;
            col.push((r.b_max, r.b_bar_max));
        }
        by_topology.push(col);
    }
    let header: Vec<String> = [
        "phi_frac",
        "b_bar_max_yab_t_per_w",
        "b_bar_max_acdc_dab_t_per_w",
        "b_max_yab_t",
        "b_max_acdc_dab_t",
    ]
    .map(String::from)
    .to_vec();
    let rows: Vec<Vec<String>> = phi_grid
        .iter()
        .enumerate()
        .map(|(i, &phi)| {
            vec![
                fmt(phi),
                by_topology[0][i].1.map(fmt).unwrap_or_default(),
                by_topology[1][i].1.map(fmt).unwrap_or_default(),
                fmt(by_topology[0][i].0),
                fmt(by_topology[1][i].0),
            ]
        })
        .collect();
    let comments = vec![
        "AC-DC DAB flux computed under plain sinusoidal phase-shift modulation \
         (no DC-side compensation)"
            .to_owned(),
    ];
    let csv = csv_from_columns(&p, &comments, &header, rows);
    let series = vec![
        (2, "YAB".to_owned()),
        (3, "AC-DC DAB".to_owned()),
    ];
    let plot = plot_script(
        FigureId::Flux,
        "Normalized inductor flux density vs phase shift",
        "phi / T_sw",
        "B_max / p_a / (T/W)",
        &series,
    );
    Ok(Figure {
        id: FigureId::Flux,
        csv,
        plot,
    })
}

fn figure_zvs(params: &ConverterParams) -> Result<Figure, ReportError> {
    // The turn-on current map is stated at the 277 V RMS / 200 V DC
    // operating point.
    let mut p = params.clone();
    p.v_g_rms = 277.0;
    p.v_dc = 200.0;
    let phi_list = [0.05, 0.10, 0.15, 0.20, 0.25];
    let map = LossMap::from_params(&p)?;
    let mut results = Vec::new();
    for &phi in &phi_list {
        results.push(grid_cycle_with_map(&p, phi, &map)?);
    }
    let mut header = vec!["theta_deg".to_owned()];
    for &phi in &phi_list {
        header.push(format!("i_sw_a_phi{}", fmt(phi)));
        header.push(format!("i_sw_x1_phi{}", fmt(phi)));
    }
    let rows: Vec<Vec<String>> = (0..results[0].theta_grid.len())
        .map(|i| {
            let mut row = vec![fmt(results[0].theta_grid[i])];
            for r in &results {
                row.push(fmt(r.turn_on[i].i_sw_a));
                row.push(fmt(r.turn_on[i].i_sw_x1));
            }
            row
        })
        .collect();
    let csv = csv_from_columns(&p, &[], &header, rows);
    let plot = plot_script(
        FigureId::Zvs,
        "Turn-on currents over one grid period",
        "grid angle / deg",
        "i_sw / A",
        &curve_series(&header),
    );
    Ok(Figure {
        id: FigureId::Zvs,
        csv,
        plot,
    })
}

fn figure_loss_cycle(params: &ConverterParams) -> Result<Figure, ReportError> {
    let result = crate::metrics::grid_cycle(params, FIGURE_PHI)?;
    let (p_sw_total, p_cond_total) = aggregate_losses(&result);
    let comments = vec![
        format!("phi_frac={}", fmt(FIGURE_PHI)),
        format!("P_avg_w={}", fmt(result.p_avg)),
        format!("p_sw_total_w={}", fmt(p_sw_total)),
        format!("p_cond_total_w={}", fmt(p_cond_total)),
    ];
    let header: Vec<String> = [
        "theta_deg",
        "p_sw_ac_w",
        "p_sw_x1_w",
        "p_sw_x2_w",
        "p_cond_per_hb_w",
    ]
    .map(String::from)
    .to_vec();
    let rows: Vec<Vec<String>> = (0..result.theta_grid.len())
        .map(|i| {
            vec![
                fmt(result.theta_grid[i]),
                fmt(result.p_sw[i].ac),
                fmt(result.p_sw[i].x1),
                fmt(result.p_sw[i].x2),
                fmt(result.p_cond[i]),
            ]
        })
        .collect();
    let csv = csv_from_columns(params, &comments, &header, rows);
    let series = vec![
        (2, "switching, AC half-bridge".to_owned()),
        (3, "switching, DC leg 1".to_owned()),
        (4, "switching, DC leg 2".to_owned()),
        (5, "conduction per half-bridge".to_owned()),
    ];
    let plot = plot_script(
        FigureId::LossCycle,
        "Per-angle device losses over one grid period",
        "grid angle / deg",
        "loss / W",
        &series,
    );
    Ok(Figure {
        id: FigureId::LossCycle,
        csv,
        plot,
    })
}

fn figure_loss_vs_phi(params: &ConverterParams) -> Result<Figure, ReportError> {
    let phi_grid = full_phi_grid();
    let map = LossMap::from_params(params)?;
    let mut rows = Vec::new();
    for &phi in &phi_grid {
        let result = grid_cycle_with_map(params, phi, &map)?;
        let (sw, cond) = aggregate_losses(&result);
        rows.push(vec![fmt(phi), fmt(sw), fmt(cond), fmt(sw + cond)]);
    }
    let header: Vec<String> = ["phi_frac", "p_sw_total_w", "p_cond_total_w", "p_loss_total_w"]
        .map(String::from)
        .to_vec();
    let csv = csv_from_columns(params, &[], &header, rows);
    let series = vec![
        (2, "switching".to_owned()),
        (3, "conduction".to_owned()),
        (4, "total".to_owned()),
    ];
    let plot = plot_script(
        FigureId::LossVsPhi,
        "Aggregate losses vs phase shift",
        "phi / T_sw",
        "loss / W",
        &series,
    );
    Ok(Figure {
        id: FigureId::LossVsPhi,
        csv,
        plot,
    })
}

/// One switching cycle as CSV: sample index, synthesized voltages, and the
/// solved current.
pub fn dump_cycle_csv(
    params: &ConverterParams,
    theta_deg: f64,
    phi_frac: f64,
) -> Result<String, ReportError> {
    let (cycle, _) = simulate_cycle(params, theta_deg, phi_frac, 0)?;
    let comments = vec![format!("phi_frac={}", fmt(phi_frac))];
    let header: Vec<String> = ["theta", "n", "v_AN", "v_Xx", "v_XN", "v_L", "i_t"]
        .map(String::from)
        .to_vec();
    let rows: Vec<Vec<String>> = (0..params.n_sw)
        .map(|n| {
            vec![
                fmt(theta_deg),
                n.to_string(),
                fmt(cycle.v_an[n]),
                fmt(cycle.v_xx[n]),
                fmt(cycle.v_xn[n]),
                fmt(cycle.v_l[n]),
                fmt(cycle.i_t[n]),
            ]
        })
        .collect();
    Ok(csv_from_columns(params, &comments, &header, rows))
}

/// Default operating-point count for the oracle check.
pub const ORACLE_CHECK_POINTS: usize = 100;
/// Default seed for the randomized oracle-check operating points.
pub const ORACLE_CHECK_SEED: u64 = 42;
/// Pooled RMS disagreement budget between the two solvers.
pub const ORACLE_REL_RMS_BOUND: f64 = 5e-3;
/// Budget for the single worst sample, relative to the largest current seen.
pub const ORACLE_PEAK_ERR_BOUND: f64 = 2e-2;

/// Outcome of the randomized solver-vs-oracle comparison. The pooled
/// statistics aggregate every sample of every point, so near-zero-current
/// points do not dominate the way per-point ratios would let them.
#[derive(Debug, Clone)]
pub struct OracleCheck {
    pub csv: String,
    /// √(Σ residual² / Σ reference²) over all points and samples.
    pub pooled_rel_rms: f64,
    /// max |residual| / max |reference| over all points and samples.
    pub global_max_over_peak: f64,
}

impl OracleCheck {
    pub fn within_bounds(&self) -> bool {
        self.pooled_rel_rms < ORACLE_REL_RMS_BOUND
            && self.global_max_over_peak < ORACLE_PEAK_ERR_BOUND
    }
}

/// The deterministic operating-point sample the oracle check runs over:
/// θ uniform over the grid period, φ uniform in [0, 0.25]·T_sw, v_dc uniform
/// in [200, 300] V.
pub fn oracle_check_points(n_points: usize, seed: u64) -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_points)
        .map(|_| {
            let theta = rng.gen_range(0.0..360.0);
            let phi = rng.gen_range(0.0..0.25);
            let v_dc = rng.gen_range(200.0..300.0);
            (theta, phi, v_dc)
        })
        .collect()
}

/// Compares the frequency-domain solver against the time-domain oracle on
/// the randomized operating points of [`oracle_check_points`].
pub fn oracle_check(
    params: &ConverterParams,
    n_points: usize,
    seed: u64,
) -> Result<OracleCheck, ReportError> {
    let header: Vec<String> = ["theta", "phi", "v_dc", "rel_rms_err", "max_err"]
        .map(String::from)
        .to_vec();
    let mut rows = Vec::with_capacity(n_points);
    let (mut sum_d2, mut sum_r2) = (0.0_f64, 0.0_f64);
    let (mut max_d, mut max_r) = (0.0_f64, 0.0_f64);
    for (theta, phi, v_dc) in oracle_check_points(n_points, seed) {
        let mut p = params.clone();
        p.v_dc = v_dc;
        let (cycle, _) = crate::waveforms::synthesize_cycle(&p, theta, phi, 0)?;
        let i_fft = steady_state_current(&cycle.v_l, &LinkImpedanceSpec::from_params(&p))?;
        let oracle = simulate_zoh(&cycle.v_l, p.l_t, p.r_series, p.t_sw(), 1_000_000)?;
        for (&a, &b) in i_fft.iter().zip(&oracle.i) {
            let d = a - b;
            sum_d2 += d * d;
            sum_r2 += b * b;
            max_d = max_d.max(d.abs());
            max_r = max_r.max(b.abs());
        }
        let c = compare(&i_fft, &oracle.i)?;
        rows.push(vec![
            fmt(theta),
            fmt(phi),
            fmt(v_dc),
            fmt(c.rel_rms_err),
            fmt(c.max_abs_err_over_peak),
        ]);
    }
    let pooled_rel_rms = (sum_d2 / sum_r2).sqrt();
    let global_max_over_peak = max_d / max_r;
    let comments = vec![
        format!("seed={seed} n_points={n_points}"),
        format!(
            "pooled_rel_rms={} global_max_over_peak={}",
            fmt(pooled_rel_rms),
            fmt(global_max_over_peak)
        ),
    ];
    Ok(OracleCheck {
        csv: csv_from_columns(params, &comments, &header, rows),
        pooled_rel_rms,
        global_max_over_peak,
    })
}

/// CSV-only view of [`oracle_check`].
pub fn oracle_check_csv(
    params: &ConverterParams,
    n_points: usize,
    seed: u64,
) -> Result<String, ReportError> {
    Ok(oracle_check(params, n_points, seed)?.csv)
}

/// Blocking-capacitor design summary in `key = value` form.
pub fn capbounds_text(params: &ConverterParams) -> Result<String, ReportError> {
    let bounds = crate::params::blocking_cap_bounds(
        params.l_t,
        params.f_g,
        params.f_sw,
        crate::params::DESIGN_EPSILON,
        crate::params::DESIGN_LAMBDA,
    )?;
    let ratio = crate::params::lf_flux_ratio(params.c_b, params.l_t, params.f_g, params.f_sw);
    let within = params.c_b >= bounds.c_min && params.c_b <= bounds.c_max;
    let mut out = param_comment_lines(params);
    out.push_str(&format!("epsilon = {}\n", fmt(bounds.epsilon)));
    out.push_str(&format!("lambda = {}\n", fmt(bounds.lambda)));
    out.push_str(&format!("c_min_f = {}\n", fmt(bounds.c_min)));
    out.push_str(&format!("c_max_f = {}\n", fmt(bounds.c_max)));
    out.push_str(&format!("c_b_configured_f = {}\n", fmt(params.c_b)));
    out.push_str(&format!("lf_hf_flux_ratio = {}\n", fmt(ratio)));
    out.push_str(&format!("within_bounds = {within}\n"));
    Ok(out)
}
