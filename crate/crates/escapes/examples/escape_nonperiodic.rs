//! Escape rates through holes shrinking onto a non-periodic point.
//!
//! At a point whose orbit never returns to itself the normalized escape rates
//! r(U_n)/mu(U_n) converge to 1: nothing re-enters the hole at leading order,
//! so each unit of measure removed costs a full unit of escape. The center
//! here is the binary Champernowne word 0 1 0 0 0 1 1 0 ..., which is not
//! eventually periodic at any depth we touch.
//!
//! Run with `cargo run --release --example escape_nonperiodic`.

use escapes::holes::{self, HoleFamily};
use escapes::symbolic::{Subshift, SymbolicPoint};
use escapes::thermo::Potential;

fn main() -> escapes::Result<()> {
    let shift = Subshift::full_shift(2);
    let phi = Potential::constant(-(2f64.ln()));

    let n_max = 14;
    let center = SymbolicPoint::binary_champernowne(n_max);
    println!(
        "center address: {} (period {:?})",
        center.prefix(n_max)?,
        center.prime_period()
    );
    let family = HoleFamily::standard(&shift, &center, n_max)?;

    let sweep = holes::escape_sweep(&shift, &phi, &family, 2..=n_max)?;
    println!("{:>3} {:>12} {:>14} {:>10}", "n", "mu(U_n)", "escape rate", "ratio");
    for row in &sweep.rows {
        println!(
            "{:>3} {:>12.6e} {:>14.6e} {:>10.6}",
            row.n, row.mu_hole, row.escape_rate, row.ratio
        );
    }
    println!("predicted limit  = {}", sweep.predicted);
    println!("final ratio      = {:.6}", sweep.final_ratio);
    println!("final deviation  = {:.2e}", sweep.final_deviation);

    // Same potential, same hole depths, but a periodic center for contrast:
    // the (0111)^infinity orbit re-enters its own holes every four steps and
    // the limit drops to 1 - 2^{-4}.
    let periodic = SymbolicPoint::periodic(escapes::symbolic::Word::new(vec![0, 1, 1, 1]))?;
    let contrast = HoleFamily::standard(&shift, &periodic, n_max)?;
    let contrast_sweep = holes::escape_sweep(&shift, &phi, &contrast, 2..=n_max)?;
    println!(
        "contrast (0111)^inf: predicted = {}, final ratio = {:.6}",
        contrast_sweep.predicted, contrast_sweep.final_ratio
    );
    Ok(())
}
