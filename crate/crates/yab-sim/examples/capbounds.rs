//! Prints the blocking-capacitor design window for the reference link and
//! shows where the configured capacitor sits inside it.

use yab_sim::params::{blocking_cap_bounds, lf_flux_ratio, DESIGN_EPSILON, DESIGN_LAMBDA};
use yab_sim::ConverterParams;

fn main() {
    let params = ConverterParams::default();
    let bounds = blocking_cap_bounds(
        params.l_t,
        params.f_g,
        params.f_sw,
        DESIGN_EPSILON,
        DESIGN_LAMBDA,
    )
    .expect("reference parameters are valid");

    println!(
        "link: L_t = {:.1} uH, f_sw = {:.0} kHz, f_g = {:.0} Hz",
        params.l_t * 1e6,
        params.f_sw / 1e3,
        params.f_g
    );
    println!(
        "resonance guard lambda = {}, low-frequency flux budget epsilon = {}",
        bounds.lambda, bounds.epsilon
    );
    println!("C_B lower bound: {:9.4} uF", bounds.c_min * 1e6);
    println!("C_B upper bound: {:9.4} uF", bounds.c_max * 1e6);
    println!("configured C_B:  {:9.4} uF", params.c_b * 1e6);

    let ratio = lf_flux_ratio(params.c_b, params.l_t, params.f_g, params.f_sw);
    println!(
        "low-frequency / switching-frequency flux ratio at configured C_B: {ratio:.3e}"
    );

    // With lambda = 1 the lower bound sits exactly at series resonance with
    // the switching frequency.
    let at_resonance = blocking_cap_bounds(params.l_t, params.f_g, params.f_sw, DESIGN_EPSILON, 1.0)
        .expect("lambda = 1 is the resonance limit");
    println!(
        "resonance-limit C_B (lambda = 1): {:9.4} uF",
        at_resonance.c_min * 1e6
    );
}
