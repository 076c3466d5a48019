//! Metric balls bracketed by unions of cylinders.
//!
//! Cylinder holes are the natural objects for the transfer operator, but a
//! metric ball B(z, eps) is not a cylinder. Sandwiching each ball between an
//! inner union (cylinders inside the ball) and an outer union (cylinders
//! meeting it), with the measure slack between the two kept below eta,
//! brackets every ball quantity between two cylinder computations. Here both
//! normalized escape-rate sweeps converge to the same periodic-point limit
//! 3/4, and the bracket pins the ball rates down to the slack.
//!
//! Run with `cargo run --release --example ball_approximation`.

use escapes::geometry::{ball_family, cantor_middle_thirds};
use escapes::holes;
use escapes::thermo::Potential;

fn main() -> escapes::Result<()> {
    let map = cantor_middle_thirds();
    let shift = map.subshift();
    let phi = Potential::constant(-(2f64.ln()));

    let epsilons = [0.05, 0.02, 8e-3, 3e-3, 1e-3, 4e-4, 1.5e-4];
    let eta = 0.05;
    let family = ball_family(&map, &phi, 0.25, &epsilons, eta)?;

    println!(
        "center 0.25 encoded as {} (period {:?})",
        family.center.prefix(8)?,
        family.center.prime_period()
    );
    println!(
        "{:>10} {:>6} {:>7} {:>7} {:>10} {:>12} {:>12}",
        "epsilon", "depth", "inner", "outer", "slack", "mu_inner", "mu_outer"
    );
    let mut eta_achieved = 0.0f64;
    for a in &family.approximations {
        eta_achieved = eta_achieved.max(a.eta);
        println!(
            "{:>10.1e} {:>6} {:>7} {:>7} {:>10.3e} {:>12.6e} {:>12.6e}",
            a.epsilon,
            a.depth,
            a.inner.len(),
            a.outer.len(),
            a.eta,
            a.mu_inner,
            a.mu_outer
        );
    }

    let count = family.approximations.len();
    let inner = holes::escape_sweep(shift, &phi, &family.inner, 1..=count)?;
    let outer = holes::escape_sweep(shift, &phi, &family.outer, 1..=count)?;
    println!("inner sweep: predicted {}, final ratio {:.6}", inner.predicted, inner.final_ratio);
    println!("outer sweep: predicted {}, final ratio {:.6}", outer.predicted, outer.final_ratio);

    let low = inner.final_ratio.min(outer.final_ratio) * (1.0 - eta_achieved);
    let high = inner.final_ratio.max(outer.final_ratio) * (1.0 + eta_achieved);
    println!("bracket for the ball ratio: [{low:.6}, {high:.6}] (slack {eta_achieved:.3e})");
    println!("limit 0.75 inside bracket: {}", low <= 0.75 && 0.75 <= high);
    Ok(())
}
