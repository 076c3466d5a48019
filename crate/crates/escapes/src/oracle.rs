//! Independent checks on the spectral escape-rate numbers.
//!
//! Three routes to the same survival probabilities S_k, the invariant mass of
//! points whose first k coordinate windows all miss the hole:
//!
//! * [`exhaustive_survival`] enumerates first-escape cylinders and sums their
//!   invariant measures, exact up to eigendata accuracy;
//! * [`matrix_survival`] contracts powers of the perturbed transfer matrix
//!   against the unperturbed leading pair, S_k = lambda^-k l^T M_n^k r;
//! * [`monte_carlo_survival`] samples symbol paths from the Gibbs Markov
//!   chain and counts survivors.
//!
//! The routes share no numerics beyond the leading eigendata, so agreement is
//! a genuine cross-check. [`fit_escape_rate`] turns a curve tail into a decay
//! rate, and [`kac_check`] brackets the expected first-return time of the
//! hole against 1/mu(hole) with an explicit remainder bound.

use serde::Serialize;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::holes::{self, Hole};
use crate::params::{ENUM_CAP, MC_BATCH};
use crate::symbolic::Subshift;
use crate::thermo::{self, Potential, SpectralData};

/// How a survival curve was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// First-escape cylinder enumeration.
    Exhaustive,
    /// Powers of the perturbed transfer matrix.
    Matrix,
    /// Paths sampled from the Gibbs Markov chain.
    MonteCarlo,
}

/// Survival probabilities S_0, ..., S_k_max for one hole.
///
/// S_k is the invariant measure of the set of points whose windows at times
/// 0, ..., k-1 all avoid the hole; S_0 = 1 by convention.
#[derive(Debug, Clone, Serialize)]
pub struct SurvivalCurve {
    pub k_values: Vec<usize>,
    pub survival: Vec<f64>,
    pub method: Method,
    /// Sample count, Monte Carlo only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    /// Base RNG seed, Monte Carlo only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Binomial standard errors per point, Monte Carlo only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<Vec<f64>>,
    /// True when the curve carries no estimates (zero samples requested).
    pub empty: bool,
}

/// Survival by exhaustive enumeration of first-escape cylinders.
///
/// Walks admissible words depth-first. As soon as the newest window of hole
/// length lands in the hole, the whole cylinder escapes at that time: its
/// invariant measure is charged to that step and the branch is pruned. Words
/// reaching length k_max - 1 + |hole| untouched survive every check. S_k is
/// the suffix sum of later escapes plus the untouched mass, never 1 minus the
/// escaped mass: a dead survivor set then reads exactly zero instead of
/// subtraction dust at machine epsilon.
pub fn exhaustive_survival(
    shift: &Subshift,
    phi: &Potential,
    hole: &Hole,
    k_max: usize,
) -> Result<SurvivalCurve> {
    exhaustive_capped(shift, phi, hole, k_max, ENUM_CAP)
}

/// The same walk with an explicit node budget; the public entry point runs
/// under `params::ENUM_CAP`.
fn exhaustive_capped(
    shift: &Subshift,
    phi: &Potential,
    hole: &Hole,
    k_max: usize,
    cap: usize,
) -> Result<SurvivalCurve> {
    let matrix = thermo::build_transfer_matrix(shift, phi, phi.depth())?;
    let data = thermo::leading_eigentriple(&matrix)?;
    let mut survival = vec![1.0; k_max + 1];
    if !hole.is_empty() && k_max > 0 {
        let target = k_max - 1 + hole.len();
        let mut word = Vec::with_capacity(target);
        let mut visited = 0usize;
        let mut mass = vec![0.0; k_max];
        let mut tail = 0.0;
        descend(
            shift,
            phi,
            &data,
            hole,
            &mut word,
            target,
            &mut mass,
            &mut tail,
            &mut visited,
            cap,
        )?;
        survival[k_max] = tail;
        for k in (0..k_max).rev() {
            survival[k] = survival[k + 1] + mass[k];
        }
    }
    Ok(SurvivalCurve {
        k_values: (0..=k_max).collect(),
        survival,
        method: Method::Exhaustive,
        samples: None,
        seed: None,
        stderr: None,
        empty: false,
    })
}

#[allow(clippy::too_many_arguments)]
fn descend(
    shift: &Subshift,
    phi: &Potential,
    data: &SpectralData,
    hole: &Hole,
    word: &mut Vec<u8>,
    target: usize,
    mass: &mut [f64],
    tail: &mut f64,
    visited: &mut usize,
    cap: usize,
) -> Result<()> {
    *visited += 1;
    if *visited > cap {
        return Err(Error::EnumerationCapExceeded { cap });
    }
    let len = word.len();
    let lu = hole.len();
    // Only the newest window needs checking: earlier hits were pruned.
    if len >= lu && hole.contains(&word[len - lu..]) {
        mass[len - lu] += data.word_measure(phi, word)?;
        return Ok(());
    }
    if len == target {
        *tail += data.word_measure(phi, word)?;
        return Ok(());
    }
    if let Some(&last) = word.last() {
        for s in shift.successors(last) {
            word.push(s);
            descend(shift, phi, data, hole, word, target, mass, tail, visited, cap)?;
            word.pop();
        }
    } else {
        for s in 0..shift.alphabet_size() as u8 {
            word.push(s);
            descend(shift, phi, data, hole, word, target, mass, tail, visited, cap)?;
            word.pop();
        }
    }
    Ok(())
}

/// Survival from powers of the perturbed transfer matrix.
///
/// S_k = lambda^-k l^T M_n^k r with l, r the unperturbed leading pair at the
/// given depth (raised to fit the hole and the potential if necessary).
/// Zeroed columns delete every path through the hole, so the bilinear form is
/// the exact invariant mass of the k-step survivor set; the value is
/// independent of the depth.
pub fn matrix_survival(
    shift: &Subshift,
    phi: &Potential,
    hole: &Hole,
    k_max: usize,
    depth: usize,
) -> Result<SurvivalCurve> {
    let depth = depth.max(hole.len()).max(phi.depth());
    let matrix = thermo::build_transfer_matrix(shift, phi, depth)?;
    let data = thermo::leading_eigentriple(&matrix)?;
    let perturbed = holes::perturbed_matrix(&matrix, hole)?;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut y = data.right.clone();
    let mut buf = vec![0.0; y.len()];
    let mut survival = Vec::with_capacity(k_max + 1);
    survival.push(dot(&data.left, &y));
    for _ in 0..k_max {
        perturbed.apply(&y, &mut buf);
        for v in &mut buf {
            *v /= data.lambda;
        }
        std::mem::swap(&mut y, &mut buf);
        survival.push(dot(&data.left, &y));
    }
    Ok(SurvivalCurve {
        k_values: (0..=k_max).collect(),
        survival,
        method: Method::Matrix,
        samples: None,
        seed: None,
        stderr: None,
        empty: false,
    })
}

/// Survival estimated by sampling paths of the Gibbs Markov chain.
///
/// The chain lives on the depth-m cylinder states with transition law
/// e^phi(w) l(w') / (lambda l(w)) and the Gibbs weights as initial law; each
/// sample extends a start word far enough for k_max window checks and the
/// first window inside the hole fixes its escape step. Samples are drawn in
/// fixed-size batches, one RNG stream per batch, so merged estimates do not
/// depend on how batches are scheduled across threads.
pub fn monte_carlo_survival(
    shift: &Subshift,
    phi: &Potential,
    hole: &Hole,
    k_max: usize,
    samples: u64,
    seed: u64,
) -> Result<SurvivalCurve> {
    let matrix = thermo::build_transfer_matrix(shift, phi, phi.depth())?;
    let data = thermo::leading_eigentriple(&matrix)?;
    if samples == 0 {
        return Ok(SurvivalCurve {
            k_values: Vec::new(),
            survival: Vec::new(),
            method: Method::MonteCarlo,
            samples: Some(0),
            seed: Some(seed),
            stderr: Some(Vec::new()),
            empty: true,
        });
    }
    let m = matrix.depth();
    let dim = matrix.dim();
    let basis = matrix.basis();
    let mut init_cdf = Vec::with_capacity(dim);
    let mut acc = 0.0;
    for &g in &data.gibbs {
        acc += g;
        init_cdf.push(acc);
    }
    // Cumulative transition tables per state. Rows sum to 1 up to the
    // eigendata residual; renormalize so the last entry is exactly reachable.
    let mut transitions: Vec<Vec<(f64, u32)>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let base = matrix.weight(j) / (data.lambda * data.left[j]);
        let mut row = Vec::new();
        let mut cum = 0.0;
        for &i in &matrix.out_edges()[j] {
            cum += base * data.left[i as usize];
            row.push((cum, i));
        }
        if cum > 0.0 {
            for e in &mut row {
                e.0 /= cum;
            }
        }
        transitions.push(row);
    }
    let lu = hole.len();
    let total_syms = m.max(k_max.saturating_sub(1) + lu);
    let counts: Vec<u64> = if k_max == 0 || hole.is_empty() {
        vec![0; k_max]
    } else {
        (0..samples.div_ceil(MC_BATCH))
            .into_par_iter()
            .map(|b| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(b + 1);
                let todo = MC_BATCH.min(samples - b * MC_BATCH);
                let mut counts = vec![0u64; k_max];
                let mut path: Vec<u8> = Vec::with_capacity(total_syms);
                for _ in 0..todo {
                    path.clear();
                    let u: f64 = rng.random();
                    let mut state = init_cdf.partition_point(|&c| c <= u).min(dim - 1);
                    path.extend_from_slice(basis.word(state).symbols());
                    while path.len() < total_syms {
                        let u: f64 = rng.random();
                        let row = &transitions[state];
                        let pick = row.partition_point(|e| e.0 <= u).min(row.len() - 1);
                        let next = row[pick].1 as usize;
                        path.push(basis.word(next).symbols()[m - 1]);
                        state = next;
                    }
                    for j in 0..k_max {
                        if hole.contains(&path[j..j + lu]) {
                            counts[j] += 1;
                            break;
                        }
                    }
                }
                counts
            })
            .reduce(
                || vec![0; k_max],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            )
    };
    let n = samples as f64;
    let mut survival = Vec::with_capacity(k_max + 1);
    let mut stderr = Vec::with_capacity(k_max + 1);
    survival.push(1.0);
    stderr.push(0.0);
    let mut escaped = 0u64;
    for &c in &counts {
        escaped += c;
        let s = 1.0 - escaped as f64 / n;
        survival.push(s);
        stderr.push((s * (1.0 - s) / n).sqrt());
    }
    Ok(SurvivalCurve {
        k_values: (0..=k_max).collect(),
        survival,
        method: Method::MonteCarlo,
        samples: Some(samples),
        seed: Some(seed),
        stderr: Some(stderr),
        empty: false,
    })
}

/// Least-squares decay rate fitted to the tail of a survival curve.
#[derive(Debug, Clone, Serialize)]
pub struct EscapeRateFit {
    /// Slope of -log S_k against k over the fit window.
    pub rate: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    /// Points used in the fit.
    pub points: usize,
    pub k_lo: usize,
    pub k_hi: usize,
}

/// Fits -log S_k = rate * k + c on the trailing `tail_fraction` of a curve.
///
/// Zero survivals are skipped (their logarithm carries no information);
/// fewer than four usable points is an error rather than a meaningless slope.
pub fn fit_escape_rate(curve: &SurvivalCurve, tail_fraction: f64) -> Result<EscapeRateFit> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::Config(format!(
            "tail fraction must lie in (0, 1], got {tail_fraction}"
        )));
    }
    let n = curve.k_values.len();
    let take = ((tail_fraction * n as f64).ceil() as usize).min(n);
    let pts: Vec<(f64, f64)> = (n - take..n)
        .filter(|&i| curve.survival[i] > 0.0)
        .map(|i| (curve.k_values[i] as f64, -curve.survival[i].ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::InsufficientTail {
            points: pts.len(),
            needed: 4,
        });
    }
    let np = pts.len() as f64;
    let xbar = pts.iter().map(|p| p.0).sum::<f64>() / np;
    let ybar = pts.iter().map(|p| p.1).sum::<f64>() / np;
    let sxx: f64 = pts.iter().map(|p| (p.0 - xbar).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - xbar) * (p.1 - ybar)).sum();
    let rate = sxy / sxx;
    let intercept = ybar - rate * xbar;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - rate * p.0 - intercept).powi(2))
        .sum();
    Ok(EscapeRateFit {
        rate,
        stderr: (ss_res / (np - 2.0) / sxx).sqrt(),
        points: pts.len(),
        k_lo: pts.first().unwrap().0 as usize,
        k_hi: pts.last().unwrap().0 as usize,
    })
}

/// Both sides of the expected first-return identity E_U[T] * mu(U) = 1, with
/// an explicit bracket for the summation remainder.
#[derive(Debug, Clone, Serialize)]
pub struct KacCheck {
    /// Return times were summed exactly up to this cutoff.
    pub k_max: usize,
    pub depth: usize,
    pub mu_hole: f64,
    /// 1 / mu(U), the value the return-time expectation must equal.
    pub rhs: f64,
    /// sum_{i <= k_max} i * P_U(T = i).
    pub head: f64,
    /// P_U(T <= k_max), the conditional mass the head accounts for.
    pub head_mass: f64,
    /// Upper bound on the remainder sum_{i > k_max} i * P_U(T = i); infinite
    /// when no contracting block length was found.
    pub tail_upper: f64,
    /// Distance from rhs to the interval [head, head + tail_upper].
    pub gap: f64,
    /// True when rhs lies inside the bracket.
    pub within: bool,
    /// True when the hole has zero measure and the identity is vacuous.
    pub degenerate: bool,
}

/// Checks the expected first-return time of the hole against 1/mu(U).
///
/// With D_U the restriction to hole states, the vector chain u_1 = M D_U r /
/// lambda, u_{i+1} = M_n u_i / lambda makes l^T D_U u_i the invariant mass of
/// hole points whose first return happens at step i. The remainder past the
/// cutoff K is bracketed by Abel summation as (K+1) P_U(T > K) plus the
/// leftover survival sums, the latter bounded geometrically through row-sum
/// contraction factors of M_n / lambda over power-of-two block lengths.
pub fn kac_check(shift: &Subshift, phi: &Potential, hole: &Hole, k_max: usize) -> Result<KacCheck> {
    if k_max == 0 {
        return Err(Error::Config("return-time cutoff must be at least 1".into()));
    }
    let depth = phi.depth().max(hole.len());
    let matrix = thermo::build_transfer_matrix(shift, phi, depth)?;
    let data = thermo::leading_eigentriple(&matrix)?;
    let dim = matrix.dim();
    let in_hole: Vec<bool> = matrix
        .basis()
        .words()
        .iter()
        .map(|w| hole.contains(w.symbols()))
        .collect();
    let mu: f64 = data
        .gibbs
        .iter()
        .zip(&in_hole)
        .filter(|(_, &h)| h)
        .map(|(&g, _)| g)
        .sum();
    if hole.is_empty() || mu <= 0.0 {
        return Ok(KacCheck {
            k_max,
            depth,
            mu_hole: mu,
            rhs: f64::INFINITY,
            head: 0.0,
            head_mass: 0.0,
            tail_upper: f64::INFINITY,
            gap: f64::INFINITY,
            within: false,
            degenerate: true,
        });
    }
    let perturbed = holes::perturbed_matrix(&matrix, hole)?;
    let lambda = data.lambda;
    let hole_dot = |u: &[f64], keep: bool| -> f64 {
        u.iter()
            .zip(&data.left)
            .zip(&in_hole)
            .filter(|(_, &h)| h == keep)
            .map(|((&v, &l), _)| l * v)
            .sum()
    };
    // u_1 through the full matrix: the first return step may go anywhere.
    let mut u: Vec<f64> = data
        .right
        .iter()
        .zip(&in_hole)
        .map(|(&r, &h)| if h { r } else { 0.0 })
        .collect();
    let mut buf = vec![0.0; dim];
    matrix.apply(&u, &mut buf);
    for v in &mut buf {
        *v /= lambda;
    }
    std::mem::swap(&mut u, &mut buf);
    let mut head = 0.0;
    let mut head_mass = 0.0;
    for i in 1..=k_max {
        if i > 1 {
            perturbed.apply(&u, &mut buf);
            for v in &mut buf {
                *v /= lambda;
            }
            std::mem::swap(&mut u, &mut buf);
        }
        let mass = hole_dot(&u, true);
        head += i as f64 * mass;
        head_mass += mass;
    }
    head /= mu;
    head_mass /= mu;
    let q_k = hole_dot(&u, false);
    let sup_u = u.iter().cloned().fold(0.0f64, f64::max);
    let nu_off: f64 = data
        .left
        .iter()
        .zip(&in_hole)
        .filter(|(_, &h)| !h)
        .map(|(&l, _)| l)
        .sum();
    // Row-sum contraction factors c_b = max row sum of (M_n / lambda)^b.
    let mut w = vec![1.0; dim];
    let mut c = Vec::with_capacity(257);
    c.push(1.0);
    for _ in 1..=256 {
        perturbed.apply(&w, &mut buf);
        for v in &mut buf {
            *v /= lambda;
        }
        std::mem::swap(&mut w, &mut buf);
        c.push(w.iter().cloned().fold(0.0f64, f64::max));
    }
    let tail_upper = [1usize, 2, 4, 8, 16, 32, 64, 128, 256]
        .into_iter()
        .find(|&b| c[b] < 1.0)
        .map(|b| {
            // sum_{d >= 1} c_d <= (c_0 + ... + c_{B-1}) / (1 - c_B) - 1 by
            // submultiplicativity over blocks of length B.
            let g = c[..b].iter().sum::<f64>() / (1.0 - c[b]) - 1.0;
            ((k_max as f64 + 1.0) * q_k + nu_off * sup_u * g) / mu
        })
        .unwrap_or(f64::INFINITY);
    let rhs = 1.0 / mu;
    let upper = head + tail_upper;
    let gap = if rhs < head {
        head - rhs
    } else if rhs > upper {
        rhs - upper
    } else {
        0.0
    };
    Ok(KacCheck {
        k_max,
        depth,
        mu_hole: mu,
        rhs,
        head,
        head_mass,
        tail_upper,
        gap,
        within: gap == 0.0,
        degenerate: false,
    })
}
