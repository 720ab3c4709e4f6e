//! Synthesizes and solves one switching cycle, then prints a compact view of
//! the waveforms: winding voltage, bridge voltage, link voltage, current.

use yab_sim::metrics::phase_power;
use yab_sim::{simulate_cycle, ConverterParams};

fn main() {
    let params = ConverterParams::default();
    let (theta, phi) = (30.0, 0.2);
    let (cycle, _) = simulate_cycle(&params, theta, phi, 0).expect("operating point is valid");

    println!(
        "theta = {theta} deg, phi = {phi}·T_sw, v_dc = {} V, N_sw = {}",
        params.v_dc, params.n_sw
    );
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "n", "v_AN / V", "v_Xx / V", "v_XN / V", "v_L / V", "i_t / A"
    );
    let step = params.n_sw / 16;
    for n in (0..params.n_sw).step_by(step) {
        println!(
            "{:>6} {:>10.2} {:>10.2} {:>10.2} {:>10.2} {:>10.3}",
            n, cycle.v_an[n], cycle.v_xx[n], cycle.v_xn[n], cycle.v_l[n], cycle.i_t[n]
        );
    }

    let peak = cycle.i_t.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
    println!("\npeak winding current: {peak:.3} A");
    println!(
        "cycle-average power into this phase: {:.1} W",
        phase_power(&cycle.v_an, &cycle.i_t)
    );
}
