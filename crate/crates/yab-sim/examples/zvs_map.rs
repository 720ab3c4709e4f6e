//! Summarizes soft-switching behaviour over one grid period: turn-on
//! currents of the AC-side switch and the first DC leg, and how much of the
//! period each switch commutates at zero voltage.

use yab_sim::metrics::ZvsClass;
use yab_sim::{grid_cycle, ConverterParams};

fn soft(cls: ZvsClass) -> bool {
    matches!(cls, ZvsClass::FullZvs | ZvsClass::PartialZvs)
}

fn main() {
    let params = ConverterParams {
        v_dc: 200.0,
        ..ConverterParams::default()
    };

    println!("v_dc = 200 V; negative turn-on current means ZVS");
    println!(
        "{:>8} {:>16} {:>16} {:>12} {:>12}",
        "phi/Tsw", "max i_sw_a / A", "max i_sw_x1 / A", "AC soft %", "x1 soft %"
    );
    for phi in [0.05, 0.10, 0.15, 0.20, 0.25] {
        let result = grid_cycle(&params, phi).expect("operating point is valid");
        let n = result.turn_on.len() as f64;
        let max_a = result
            .turn_on
            .iter()
            .map(|t| t.i_sw_a)
            .fold(f64::NEG_INFINITY, f64::max);
        let max_x1 = result
            .turn_on
            .iter()
            .map(|t| t.i_sw_x1)
            .fold(f64::NEG_INFINITY, f64::max);
        let ac_soft = result.turn_on.iter().filter(|t| soft(t.zvs_a)).count() as f64 / n;
        let x1_soft = result.turn_on.iter().filter(|t| soft(t.zvs_x1)).count() as f64 / n;
        println!(
            "{:>8.2} {:>16.3} {:>16.3} {:>12.1} {:>12.1}",
            phi,
            max_a,
            max_x1,
            100.0 * ac_soft,
            100.0 * x1_soft
        );
    }
}
