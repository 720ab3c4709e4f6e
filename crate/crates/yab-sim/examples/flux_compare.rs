//! Compares per-watt inductor flux density between the topologies at the
//! 300 V DC operating point, where the difference is largest.

use yab_sim::params::Topology;
use yab_sim::{grid_cycle, ConverterParams};

fn main() {
    println!("v_dc = 300 V; B_bar = peak flux density / phase power at theta near 0");
    println!(
        "{:>8} {:>16} {:>16} {:>8}",
        "phi/Tsw", "YAB / (T/kW)", "DAB / (T/kW)", "ratio"
    );
    for k in 1..=5 {
        let phi = 0.05 * k as f64;
        let mut b_bar = [0.0; 2];
        for (slot, topology) in Topology::ALL.into_iter().enumerate() {
            let params = ConverterParams {
                v_dc: 300.0,
                topology,
                ..ConverterParams::default()
            };
            let result = grid_cycle(&params, phi).expect("operating point is valid");
            b_bar[slot] = result
                .b_bar_max
                .expect("phase power is positive away from phi = 0");
        }
        println!(
            "{:>8.2} {:>16.4} {:>16.4} {:>8.3}",
            phi,
            b_bar[0] * 1e3,
            b_bar[1] * 1e3,
            b_bar[0] / b_bar[1]
        );
    }
}
