//! Steady-state simulator for a single-stage isolated three-phase AC-DC
//! converter built from Y-connected AC half-bridges and per-phase DC full
//! bridges coupled through a high-frequency transformer (the YAB converter),
//! with a conventional AC-DC dual-active-bridge as the comparison topology.
//!
//! The model works per switching cycle under sinusoidal phase-shift
//! modulation. For each grid angle it synthesizes the bridge voltages,
//! solves the series R-L link current in the frequency domain, and derives
//! power, grid-current THD, winding current stress, soft-switching
//! boundaries, device losses, and magnetic flux metrics. An independent
//! time-domain integrator cross-checks the solver, and a report layer
//! renders sweeps and figure datasets as CSV.
//!
//! Modules, bottom up:
//! - [`params`]: parameter set, validation, config I/O, capacitor sizing.
//! - [`modulation`]: duty cycles, gate waveforms, phase-shift schedule.
//! - [`waveforms`]: bridge and inductor voltage synthesis per cycle.
//! - [`solver`]: FFT-based steady-state current solution.
//! - [`oracle`]: time-domain reference integrator and comparison.
//! - [`metrics`]: per-angle and grid-period quantities, losses, ZVS, flux.
//! - [`report`]: sweeps, figures, CSV and plot-script rendering.

pub mod metrics;
pub mod modulation;
pub mod oracle;
pub mod params;
pub mod report;
pub mod solver;
pub mod waveforms;

pub use metrics::{
    aggregate_losses, grid_cycle, grid_cycle_with_map, simulate_cycle, GridCycleResult, LossMap,
    MetricsError, ZvsClass,
};
pub use modulation::{ModulationError, ModulationPoint};
pub use oracle::{compare, simulate_zoh, OracleComparison, OracleError, OracleResult};
pub use params::{
    blocking_cap_bounds, lf_flux_ratio, load_config, save_config, CapBounds, ConverterParams,
    ParamsError, Topology,
};
pub use report::{
    dump_cycle_csv, oracle_check, oracle_check_csv, reproduce_figure, sweep, write_figure, Figure,
    FigureId, MetricKind, OracleCheck, ReportError, SweepSpec,
};
pub use solver::{steady_state_current, LinkImpedanceSpec, SolverError};
pub use waveforms::{synthesize_cycle, SwitchingCycle, WaveformError};
