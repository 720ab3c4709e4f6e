//! Compares grid-current THD between the YAB converter and the AC-DC DAB
//! baseline at a few operating points.
//!
//! THD is sensitive to harmonic resolution, so this example raises the
//! per-cycle sample count to 2048.

use yab_sim::params::Topology;
use yab_sim::{grid_cycle, ConverterParams};

fn main() {
    let phi_list = [0.05, 0.10, 0.15, 0.20, 0.25];
    let v_dc = 200.0;

    println!("v_dc = {v_dc} V, N_sw = 2048");
    println!("{:>8} {:>12} {:>14}", "phi/Tsw", "YAB THD %", "AC-DC DAB THD %");
    for &phi in &phi_list {
        let mut thd = [0.0; 2];
        for (slot, topology) in Topology::ALL.into_iter().enumerate() {
            let params = ConverterParams {
                n_sw: 2048,
                v_dc,
                topology,
                ..ConverterParams::default()
            };
            let result = grid_cycle(&params, phi).expect("operating point is valid");
            thd[slot] = 100.0 * result.thd;
        }
        println!("{:>8.2} {:>12.3} {:>14.3}", phi, thd[0], thd[1]);
    }
    println!("\nThe common-mode subtraction in the YAB link keeps the grid");
    println!("current sinusoidal where the plain DAB link distorts it.");
}
