//! Pressure and Gibbs data for two classical systems.
//!
//! Run with `cargo run --example pressure`.

use escapes::symbolic::Subshift;
use escapes::thermo::{self, Potential};

fn report(name: &str, shift: &Subshift, phi: &Potential) -> escapes::Result<()> {
    let matrix = thermo::build_transfer_matrix(shift, phi, phi.depth().max(2))?;
    let data = thermo::leading_eigentriple(&matrix)?;
    let check = thermo::gibbs_constant_check(shift, phi, 6)?;
    println!("{name}");
    println!("  lambda        = {:.15}", data.lambda);
    println!("  pressure      = {:.15}", data.pressure);
    println!("  gibbs const   <= {:.12} (depths 1..=6)", check.constant);
    println!(
        "  eigendata     : depth {}, {} iterations, residual {:.3e}",
        data.depth, data.iterations, data.residual
    );
    Ok(())
}

fn main() -> escapes::Result<()> {
    // Full 2-shift with the measure of maximal entropy: pressure log 2.
    let full = Subshift::full_shift(2);
    report("full 2-shift, phi = 0", &full, &Potential::constant(0.0))?;

    // Weighting each symbol by 1/2 normalizes the pressure to 0 and the
    // Gibbs constant to exactly 1 (the measure is Bernoulli(1/2, 1/2)).
    report(
        "full 2-shift, phi = -log 2",
        &full,
        &Potential::constant(-(2f64.ln())),
    )?;

    // Golden-mean shift (11 forbidden): the maximal entropy is the log of
    // the golden ratio, and the Parry weights appear in the eigenvectors.
    let golden = Subshift::new(vec![vec![1, 1], vec![1, 0]])?;
    report("golden-mean shift, phi = 0", &golden, &Potential::constant(0.0))?;
    let gamma = (1.0 + 5f64.sqrt()) / 2.0;
    println!("  log golden ratio = {:.15}", gamma.ln());
    Ok(())
}
