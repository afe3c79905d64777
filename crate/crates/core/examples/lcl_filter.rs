//! Transmission of the LCL gate-line filter, from the closed form and from
//! cascaded ABCD matrices.
//!
//! Run with `cargo run --example lcl_filter`.

use cpb_fridge::filter::{cascade, lcl_cutoff, lcl_s21, s21, series_element, shunt_element, to_db, LclFilter};

fn main() {
    let filt = LclFilter::gate_line();
    println!("L = {:.1} nH, C = {:.1} pF, Z0 = {} ohm", filt.inductance * 1e9, filt.capacitance * 1e12, filt.z0);
    println!("cutoff {:.4} GHz", lcl_cutoff(&filt) / 1e9);
    for f in [0.5e9, 2.0e9, 4.718e9, 8.001e9, 12e9] {
        let closed = lcl_s21(f, &filt);
        let (zl, zc) = (filt.z_l(f), filt.z_c(f));
        let parts = [series_element(zl), shunt_element(zc).unwrap(), series_element(zl)];
        let abcd = s21(&cascade(parts.iter()), filt.z0).unwrap();
        println!("{:>6.3} GHz: {:>8.3} dB (ABCD {:>8.3} dB)", f / 1e9, to_db(closed), to_db(abcd));
    }
}
