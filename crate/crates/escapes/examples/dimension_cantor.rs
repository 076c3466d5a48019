//! Hausdorff dimension of survivor sets in the middle-thirds Cantor map.
//!
//! The closed repeller has dimension s = log 2 / log 3. Punching out the
//! n-th cylinder hole around z = 1/4 lowers the root of the pressure
//! equation to s_n, and the drop per unit of hole measure converges to
//! d(z) / chi where d(z) = 3/4 is the local escape density at the period-2
//! center and chi = log 3 is the Lyapunov exponent. So the limit is
//! 3/(4 log 3), about 0.6826.
//!
//! Run with `cargo run --release --example dimension_cantor`.

use escapes::dimension;
use escapes::geometry::cantor_middle_thirds;
use escapes::holes::HoleFamily;

fn main() -> escapes::Result<()> {
    let map = cantor_middle_thirds();
    let shift = map.subshift();

    let closed = dimension::bowen_root(&map, 2, None)?;
    println!(
        "closed system: s = {:.12} (log2/log3 = {:.12})",
        closed.t,
        2f64.ln() / 3f64.ln()
    );
    println!(
        "  residual {:.2e}, {} eigenvalue evaluations, {} newton steps, mixing {}",
        closed.residual, closed.evaluations, closed.newton_steps, closed.mixing
    );

    let n_max = 12;
    let center = map.encode_rational(&"1/4".parse().unwrap(), n_max)?;
    let family = HoleFamily::standard(shift, &center, n_max)?;
    let sweep = dimension::dimension_sweep(&map, &family, 2..=n_max)?;

    println!(
        "{:>3} {:>12} {:>14} {:>14} {:>10}",
        "n", "mu(U_n)", "s_n", "(s-s_n)/mu", "deviation"
    );
    for row in &sweep.rows {
        println!(
            "{:>3} {:>12.6e} {:>14.10} {:>14.6} {:>10.2e}",
            row.n, row.mu_hole, row.s_n, row.ratio, row.deviation
        );
    }
    println!("predicted limit  = {} (= 3/(4 log 3))", sweep.predicted);
    println!("final ratio      = {:.6}", sweep.final_ratio);
    println!("s_n nondecreasing: {}", sweep.s_n_monotone);
    println!("deviations shrinking over the last rows: {}", sweep.deviations_shrinking);
    Ok(())
}
