//! Escape rates through shrinking cylinder holes at a periodic point of the
//! middle-thirds Cantor map.
//!
//! The center z = 1/4 has the period-2 address (01)^infinity, so the
//! measure-normalized escape rates r(U_n)/mu(U_n) do not converge to 1: the
//! orbit re-enters the hole and slows the escape down to the limit
//! 1 - e^{phi(z) + phi(sigma z)} = 3/4 under the log(1/2)-weighted measure.
//!
//! Run with `cargo run --release --example escape_cantor`.

use escapes::geometry::cantor_middle_thirds;
use escapes::holes::{self, HoleFamily};
use escapes::thermo::Potential;

fn main() -> escapes::Result<()> {
    let map = cantor_middle_thirds();
    let shift = map.subshift();
    let phi = Potential::constant(-(2f64.ln()));

    let n_max = 12;
    let center = map.encode_rational(&"1/4".parse().unwrap(), n_max)?;
    println!(
        "center address: {} (period {:?})",
        center.prefix(n_max)?,
        center.prime_period()
    );
    let family = HoleFamily::standard(shift, &center, n_max)?;

    let sweep = holes::escape_sweep(shift, &phi, &family, 2..=n_max)?;
    println!("{:>3} {:>12} {:>14} {:>10} {:>10}", "n", "mu(U_n)", "escape rate", "ratio", "gap ratio");
    for row in &sweep.rows {
        println!(
            "{:>3} {:>12.6e} {:>14.6e} {:>10.6} {:>10.6}",
            row.n, row.mu_hole, row.escape_rate, row.ratio, row.gap_ratio
        );
    }
    println!("predicted limit  = {}", sweep.predicted);
    println!("final ratio      = {:.6}", sweep.final_ratio);
    println!("final deviation  = {:.2e}", sweep.final_deviation);
    println!("lambda_n nondecreasing: {}", sweep.lambda_monotone);
    println!("deviations shrinking over the last rows: {}", sweep.deviations_shrinking);
    Ok(())
}
