//! Sweeps total delivered power over the phase shift for three DC-port
//! voltages and prints the resulting curves as a table.

use yab_sim::{grid_cycle, ConverterParams};

fn main() {
    let phi_grid: Vec<f64> = (0..=25).map(|k| k as f64 / 100.0).collect();
    let v_dc_list = [200.0, 250.0, 300.0];

    println!("{:>8} {:>12} {:>12} {:>12}", "phi/Tsw", "P@200V / W", "P@250V / W", "P@300V / W");
    for &phi in &phi_grid {
        let mut row = format!("{phi:>8.2}");
        for &v_dc in &v_dc_list {
            let params = ConverterParams {
                v_dc,
                ..ConverterParams::default()
            };
            let result = grid_cycle(&params, phi).expect("operating point is valid");
            row.push_str(&format!(" {:>12.1}", result.p_avg));
        }
        println!("{row}");
    }

    let params = ConverterParams {
        v_dc: 200.0,
        ..ConverterParams::default()
    };
    let rated = grid_cycle(&params, 0.25).expect("operating point is valid");
    println!(
        "\npeak power at phi = 0.25, v_dc = 200 V: {:.1} W ({:.1}% of the 6 kW rating)",
        rated.p_avg,
        100.0 * rated.p_avg / 6000.0
    );
}
