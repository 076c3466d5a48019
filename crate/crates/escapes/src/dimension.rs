//! Bowen-equation roots and the dimension drop of survivor sets.
//!
//! The Hausdorff dimension of the repeller of an expanding Markov interval
//! map is the unique root s of log lambda_t = 0, where lambda_t is the
//! leading eigenvalue of the transfer operator for -t log|f'|. Punching a
//! hole out of the system shifts the root down to the survivor-set dimension
//! s_n, and for a family of holes shrinking to a point z the drop obeys
//!
//!   (s - s_n) / mu(U_n)  ->  d_phi(z) / integral log|f'| dmu,
//!
//! with mu the equilibrium measure at t = s and d_phi(z) the same periodic /
//! non-periodic limit as in the escape-rate asymptotics. Roots are bracketed
//! by bisection and polished by Newton steps driven by the exact derivative
//! lambda'_t = -lambda_t * integral log|f'| dmu_t; when the survivor graph is
//! not primitive the eigenvalue can have kinks, so the solver stays with
//! plain bisection.
//!
//! Both s and s_n are solved at the hole's own cylinder depth, so the
//! depth-truncation bias of the sampled potential cancels in the difference.
//! For piecewise-linear maps the sampling is exact and the reported
//! oscillation diagnostic is 0.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::MarkovIntervalMap;
use crate::holes::{self, Hole, HoleFamily};
use crate::params::{BISECT_WIDTH, BOWEN_TOL, NEWTON_MAX_STEPS};
use crate::spectral;
use crate::symbolic::Subshift;
use crate::thermo::{self, build_transfer_matrix, Potential};

/// Root of t -> log lambda_t located by `bowen_root`.
#[derive(Debug, Clone, Serialize)]
pub struct BowenRoot {
    /// The root t*.
    pub t: f64,
    /// Leading eigenvalue at the root.
    pub lambda: f64,
    /// |log lambda_{t*}|.
    pub residual: f64,
    /// Eigenvalue evaluations spent bracketing and refining.
    pub evaluations: usize,
    /// Newton polish steps taken after the bisection phase.
    pub newton_steps: usize,
    /// Survivor graph is primitive. The graph does not depend on t, so a
    /// false value forces pure bisection for the whole solve.
    pub mixing: bool,
}

/// Eigenvalue derivative data at one parameter value t.
#[derive(Debug, Clone, Serialize)]
pub struct LyapunovDerivative {
    pub t: f64,
    /// Leading eigenvalue of the (possibly holed) operator for -t log|f'|.
    pub lambda: f64,
    /// d lambda / dt = -lambda * integral log|f'| dmu_t, exact at this depth.
    pub lambda_prime: f64,
    /// integral log|f'| dmu_t over the equilibrium measure of the system.
    pub lyapunov: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// One row of a dimension sweep: closed and holed Bowen roots at the hole's
/// own depth, and the measure-normalized drop.
#[derive(Debug, Clone, Serialize)]
pub struct DimensionResult {
    /// 1-based index into the hole family.
    pub n: usize,
    /// Hole word length, also the sampling depth of this row.
    pub len_n: usize,
    /// mu(U_n) under the equilibrium measure at t = s.
    pub mu_hole: f64,
    /// Dimension of the closed repeller.
    pub s: f64,
    /// Dimension of the survivor set.
    pub s_n: f64,
    /// (s - s_n) / mu(U_n).
    pub ratio: f64,
    /// Limit d_phi(z) / integral log|f'| dmu of the ratios.
    pub predicted: f64,
    pub deviation: f64,
    /// integral log|f'| dmu at t = s.
    pub lyapunov: f64,
    /// Max variation of -s log|f'| over any cylinder at this depth; exactly 0
    /// for piecewise-linear maps.
    pub oscillation: f64,
    /// Survivor graph primitive for this row's hole.
    pub mixing_flag: bool,
}

/// Dimension sweep over a hole family, with a convergence report.
#[derive(Debug, Clone, Serialize)]
pub struct DimensionSweep {
    pub rows: Vec<DimensionResult>,
    /// Closed-system dimension on the deepest row.
    pub s: f64,
    /// Lyapunov integral at t = s on the deepest row.
    pub lyapunov: f64,
    /// Limit of the ratios, from the deepest row.
    pub predicted: f64,
    pub final_ratio: f64,
    pub final_deviation: f64,
    /// s_n nondecreasing across the sweep: survivor sets grow as holes shrink.
    pub s_n_monotone: bool,
    /// Deviations strictly decreasing over the last (up to) five rows.
    pub deviations_shrinking: bool,
}

/// Positive log-slope potential of the map at the given depth, sampled at
/// cylinder left endpoints, plus the sampling oscillation.
fn log_deriv_base(map: &MarkovIntervalMap, depth: usize) -> Result<(Potential, f64)> {
    let sampled = map.log_deriv_potential(1.0, depth)?;
    Ok((sampled.potential.scaled(-1.0), sampled.oscillation))
}

/// Spectral radius of the operator for -t log|f'|, with the hole punched out.
fn eval_lambda(
    shift: &Subshift,
    log_deriv: &Potential,
    t: f64,
    hole: Option<&Hole>,
) -> Result<spectral::RadiusOutcome> {
    let depth = log_deriv.depth().max(hole.map_or(1, Hole::len));
    let phi = log_deriv.scaled(-t);
    let matrix = build_transfer_matrix(shift, &phi, depth)?;
    match hole {
        Some(h) => {
            let perturbed = holes::perturbed_matrix(&matrix, h)?;
            spectral::spectral_radius(perturbed.weights(), perturbed.in_edges())
        }
        None => spectral::spectral_radius(matrix.weights(), matrix.in_edges()),
    }
}

/// Eigenvalue, its exact t-derivative, and the Lyapunov integral at t.
///
/// `log_deriv` holds log|f'| per cylinder; the potential in play is
/// -t log|f'|. With a hole the equilibrium weights come from the left and
/// right eigenvectors of the perturbed matrix, which requires a primitive
/// survivor graph.
pub fn lyapunov_derivative(
    shift: &Subshift,
    log_deriv: &Potential,
    t: f64,
    hole: Option<&Hole>,
) -> Result<LyapunovDerivative> {
    let depth = log_deriv.depth().max(hole.map_or(1, Hole::len));
    let phi = log_deriv.scaled(-t);
    let matrix = build_transfer_matrix(shift, &phi, depth)?;
    let (lambda, gibbs, iterations, residual) = match hole {
        None => {
            let data = thermo::leading_eigentriple(&matrix)?;
            (data.lambda, data.gibbs.clone(), data.iterations, data.residual)
        }
        Some(h) => {
            let perturbed = holes::perturbed_matrix(&matrix, h)?;
            let outcome = spectral::spectral_radius(perturbed.weights(), perturbed.in_edges())?;
            if !outcome.mixing {
                return Err(Error::NotMixing(if outcome.empty {
                    "no positive-weight cycle survives the hole".into()
                } else {
                    format!(
                        "survivor graph is not primitive ({} cyclic components)",
                        outcome.cyclic_components
                    )
                }));
            }
            // Transient states keep a zero left entry, so the product
            // left * right is supported exactly on the survivor core.
            let fwd = spectral::power_iteration(perturbed.dim(), |x, y| perturbed.apply(x, y))?;
            let bwd = spectral::power_iteration(perturbed.dim(), |x, y| {
                perturbed.apply_transpose(x, y)
            })?;
            let mut gibbs: Vec<f64> =
                fwd.vector.iter().zip(&bwd.vector).map(|(&r, &l)| r * l).collect();
            let total: f64 = gibbs.iter().sum();
            if !(total > 0.0) {
                return Err(Error::NoConvergence {
                    iterations: fwd.iterations + bwd.iterations,
                    residual: total,
                });
            }
            for v in &mut gibbs {
                *v /= total;
            }
            let residual = fwd
                .residual
                .max(bwd.residual)
                .max((fwd.lambda - bwd.lambda).abs() / fwd.lambda);
            (fwd.lambda, gibbs, fwd.iterations + bwd.iterations, residual)
        }
    };
    let mut lyapunov = 0.0;
    for (w, &gw) in matrix.basis().words().iter().zip(&gibbs) {
        if gw > 0.0 {
            lyapunov += gw * log_deriv.value(w.symbols())?;
        }
    }
    Ok(LyapunovDerivative {
        t,
        lambda,
        lambda_prime: -lambda * lyapunov,
        lyapunov,
        iterations,
        residual,
    })
}

/// Root of log lambda_t = 0 for the map's log-slope potential at `depth`,
/// with an optional hole: the Hausdorff dimension of the (survivor set of
/// the) repeller at this cylinder depth.
///
/// Bisection brackets the root down to width 1e-4; Newton steps with the
/// analytic derivative finish the job when the survivor graph is primitive,
/// otherwise bisection continues to the residual target. Errors with
/// `NoRoot` when already lambda_0 < 1.
pub fn bowen_root(map: &MarkovIntervalMap, depth: usize, hole: Option<&Hole>) -> Result<BowenRoot> {
    let depth = depth.max(1).max(hole.map_or(1, Hole::len));
    let (ell, _) = log_deriv_base(map, depth)?;
    bowen_solve(map.subshift(), &ell, hole)
}

/// Shared solver: `log_deriv` plays the role of log|f'|.
fn bowen_solve(shift: &Subshift, log_deriv: &Potential, hole: Option<&Hole>) -> Result<BowenRoot> {
    let mut evaluations = 0usize;
    let eval = |evals: &mut usize, t: f64| -> Result<f64> {
        *evals += 1;
        Ok(eval_lambda(shift, log_deriv, t, hole)?.radius.ln())
    };
    let first = eval_lambda(shift, log_deriv, 0.0, hole)?;
    evaluations += 1;
    let mixing = first.mixing;
    let g0 = first.radius.ln();
    if g0.abs() <= BOWEN_TOL {
        return Ok(BowenRoot {
            t: 0.0,
            lambda: first.radius,
            residual: g0.abs(),
            evaluations,
            newton_steps: 0,
            mixing,
        });
    }
    if g0 < 0.0 {
        return Err(Error::NoRoot {
            lambda_at_zero: first.radius,
        });
    }

    // Bracket: g(lo) > 0 > g(hi). Expansion makes g strictly decreasing with
    // slope at least log(min |f'|), so the doubling terminates.
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut ghi = eval(&mut evaluations, hi)?;
    let mut doublings = 0;
    while ghi > BOWEN_TOL {
        doublings += 1;
        if doublings > 60 {
            return Err(Error::NoConvergence {
                iterations: evaluations,
                residual: ghi,
            });
        }
        lo = hi;
        hi *= 2.0;
        ghi = eval(&mut evaluations, hi)?;
    }
    if ghi.abs() <= BOWEN_TOL {
        return Ok(BowenRoot {
            t: hi,
            lambda: ghi.exp(),
            residual: ghi.abs(),
            evaluations,
            newton_steps: 0,
            mixing,
        });
    }

    let mut t;
    let mut g;
    loop {
        t = 0.5 * (lo + hi);
        g = eval(&mut evaluations, t)?;
        if g.abs() <= BOWEN_TOL || hi - lo <= BISECT_WIDTH {
            break;
        }
        if g > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
    }

    let mut newton_steps = 0usize;
    if mixing {
        while g.abs() > BOWEN_TOL && newton_steps < NEWTON_MAX_STEPS {
            if g > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let ld = lyapunov_derivative(shift, log_deriv, t, hole)?;
            newton_steps += 1;
            // g' = lambda'/lambda = -lyapunov.
            let mut next = t + g / ld.lyapunov;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            t = next;
            g = eval(&mut evaluations, t)?;
        }
    }

    // Bisection tail: reached with a valid bracket when Newton was skipped
    // or capped out.
    let mut steps = 0;
    while g.abs() > BOWEN_TOL {
        steps += 1;
        if g > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        t = 0.5 * (lo + hi);
        if steps > 200 || !(t > lo && t < hi) {
            return Err(Error::NoConvergence {
                iterations: evaluations,
                residual: g.abs(),
            });
        }
        g = eval(&mut evaluations, t)?;
    }
    Ok(BowenRoot {
        t,
        lambda: g.exp(),
        residual: g.abs(),
        evaluations,
        newton_steps,
        mixing,
    })
}

fn dimension_row(map: &MarkovIntervalMap, family: &HoleFamily, n: usize) -> Result<DimensionResult> {
    let shift = map.subshift();
    let hole = family.hole(n).expect("sweep range validated");
    let depth = hole.len();
    let (ell, oscillation) = log_deriv_base(map, depth)?;
    let closed = bowen_solve(shift, &ell, None)?;
    let open = bowen_solve(shift, &ell, Some(hole))?;
    let s = closed.t;

    let phi = ell.scaled(-s);
    let matrix = build_transfer_matrix(shift, &phi, depth)?;
    let data = thermo::leading_eigentriple(&matrix)?;
    let mut lyapunov = 0.0;
    for (w, &gw) in data.basis().words().iter().zip(&data.gibbs) {
        lyapunov += gw * ell.value(w.symbols())?;
    }
    let mu_hole = data.measure_of_prefixes(hole.words());
    let d = holes::predicted_from_pressure(&phi, family.center(), data.pressure)?;
    let ratio = (s - open.t) / mu_hole;
    let predicted = d / lyapunov;
    Ok(DimensionResult {
        n,
        len_n: depth,
        mu_hole,
        s,
        s_n: open.t,
        ratio,
        predicted,
        deviation: (ratio - predicted).abs(),
        lyapunov,
        oscillation: s * oscillation,
        mixing_flag: open.mixing,
    })
}

/// Run the closed and holed Bowen solves for every n in the range (in
/// parallel) and fit the convergence report.
pub fn dimension_sweep(
    map: &MarkovIntervalMap,
    family: &HoleFamily,
    n_range: RangeInclusive<usize>,
) -> Result<DimensionSweep> {
    let (lo, hi) = (*n_range.start(), *n_range.end());
    if lo < 1 || hi > family.n_max() || lo > hi {
        return Err(Error::Config(format!(
            "sweep range {lo}..={hi} outside family of {} holes",
            family.n_max()
        )));
    }
    let rows: Vec<DimensionResult> = (lo..=hi)
        .into_par_iter()
        .map(|n| dimension_row(map, family, n))
        .collect::<Result<_>>()?;

    let last = rows.last().expect("range is nonempty");
    let tail_start = rows.len().saturating_sub(5);
    let deviations_shrinking = rows[tail_start..]
        .windows(2)
        .all(|w| w[1].deviation < w[0].deviation);
    let s_n_monotone = rows.windows(2).all(|w| w[1].s_n >= w[0].s_n - 1e-12);
    Ok(DimensionSweep {
        s: last.s,
        lyapunov: last.lyapunov,
        predicted: last.predicted,
        final_ratio: last.ratio,
        final_deviation: last.deviation,
        s_n_monotone,
        deviations_shrinking,
        rows,
    })
}
