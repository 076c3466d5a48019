//! Hole families, perturbed transfer operators, and escape-rate asymptotics.
//!
//! A hole is a finite union of admissible cylinders of one common length.
//! Punching it out of the system zeroes the matching preimage columns of the
//! transfer matrix; the spectral radius lambda_n of the perturbed matrix gives
//! the escape rate log(lambda) - log(lambda_n). As a nested family of holes
//! shrinks to a point z, the rate normalized by the hole measure converges to
//! a limit that only depends on whether z is periodic:
//!
//! * non-periodic z: the ratio tends to 1;
//! * prime period p: the ratio tends to 1 - e^{phi^p(z) - p P(phi)}, the
//!   defect accounting for orbits that fall back into the hole after one
//!   period.
//!
//! The eigenvalue gap (lambda - lambda_n)/mu(U_n) converges to lambda times
//! the same limit, and both routes are reported side by side in sweeps.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral;
use crate::symbolic::{Subshift, SymbolicPoint, Word};
use crate::thermo::{
    build_transfer_matrix, leading_eigentriple, Potential, SpectralData, TransferMatrix,
};

/// A union of cylinders of one common length.
///
/// The word list is kept sorted and deduplicated. An empty word list is a
/// legal degenerate hole (nothing is removed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hole {
    len: usize,
    words: Vec<Word>,
}

impl Hole {
    /// Hole made of the given words, all of which must have length `len`.
    pub fn new(len: usize, mut words: Vec<Word>) -> Result<Self> {
        if len == 0 {
            return Err(Error::Config("hole cylinder length must be positive".into()));
        }
        for w in &words {
            if w.len() != len {
                return Err(Error::Config(format!(
                    "hole word {w} has length {}, expected {len}",
                    w.len()
                )));
            }
        }
        words.sort();
        words.dedup();
        Ok(Hole { len, words })
    }

    /// Hole consisting of a single cylinder.
    pub fn cylinder(word: Word) -> Result<Self> {
        let len = word.len();
        Hole::new(len, vec![word])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Whether the cylinder of `symbols` lies inside the hole. Requires
    /// `symbols` to be at least as long as the hole words.
    pub fn contains(&self, symbols: &[u8]) -> bool {
        symbols.len() >= self.len
            && self
                .words
                .binary_search_by(|w| w.symbols().cmp(&symbols[..self.len]))
                .is_ok()
    }
}

/// A nested sequence of holes shrinking to a marked point.
///
/// `holes[n]` (1-based via [`HoleFamily::hole`]) is a set of same-length words
/// whose lengths are nondecreasing in n. The structural invariants (nesting,
/// the center's own cylinder staying inside every hole, exponential decay of
/// the measures) are reported by [`HoleFamily::diagnostics`] rather than
/// enforced, so deliberately broken families can be inspected.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HoleFamily {
    center: SymbolicPoint,
    holes: Vec<Hole>,
}

impl HoleFamily {
    /// The single-cylinder family U_n = [z]_n for n = 1..=n_max.
    ///
    /// Every structural invariant holds automatically: the family is nested,
    /// each hole is exactly the center's prefix cylinder (kappa = 1), and for
    /// a periodic center the pulled-back hole condition holds at every level.
    pub fn standard(shift: &Subshift, z: &SymbolicPoint, n_max: usize) -> Result<Self> {
        shift.validate_point(z)?;
        let mut holes = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            holes.push(Hole {
                len: n,
                words: vec![z.prefix(n)?],
            });
        }
        Ok(HoleFamily {
            center: z.clone(),
            holes,
        })
    }

    /// Family assembled from explicit holes.
    ///
    /// Hole lengths must be nondecreasing and every word admissible; the
    /// remaining invariants are only diagnosed, not enforced.
    pub fn from_parts(shift: &Subshift, center: SymbolicPoint, holes: Vec<Hole>) -> Result<Self> {
        shift.validate_point(&center)?;
        for pair in holes.windows(2) {
            if pair[1].len < pair[0].len {
                return Err(Error::Config(format!(
                    "hole lengths must be nondecreasing, got {} after {}",
                    pair[1].len, pair[0].len
                )));
            }
        }
        for hole in &holes {
            for w in &hole.words {
                if !shift.is_admissible(w) {
                    return Err(Error::InadmissibleWord {
                        word: w.to_string(),
                        reason: "hole words must be admissible cylinders".into(),
                    });
                }
            }
        }
        Ok(HoleFamily { center, holes })
    }

    pub fn center(&self) -> &SymbolicPoint {
        &self.center
    }

    /// Number of holes in the family.
    pub fn n_max(&self) -> usize {
        self.holes.len()
    }

    /// The n-th hole, 1-based.
    pub fn hole(&self, n: usize) -> Option<&Hole> {
        (1..=self.holes.len()).contains(&n).then(|| &self.holes[n - 1])
    }

    pub fn holes(&self) -> &[Hole] {
        &self.holes
    }

    /// Structural health report; see [`FamilyDiagnostics`].
    pub fn diagnostics(&self, shift: &Subshift, phi: &Potential) -> Result<FamilyDiagnostics> {
        let depth = phi.depth().max(2);
        let data = leading_eigentriple(&build_transfer_matrix(shift, phi, depth)?)?;

        let mut nested = true;
        for pair in self.holes.windows(2) {
            for w in pair[1].words() {
                if !pair[0].contains(w.symbols()) {
                    nested = false;
                }
            }
        }

        let mut center_contained = true;
        let mut l_values = Vec::with_capacity(self.holes.len());
        for hole in &self.holes {
            match self.center.prefix(hole.len) {
                Ok(w) => {
                    if !hole.contains(w.symbols()) {
                        center_contained = false;
                    }
                }
                Err(_) => center_contained = false,
            }
            l_values.push(common_prefix_len(hole));
        }
        let kappa = self
            .holes
            .iter()
            .zip(&l_values)
            .map(|(hole, &l)| l as f64 / hole.len as f64)
            .fold(f64::INFINITY, f64::min);

        let mut mu = Vec::with_capacity(self.holes.len());
        for hole in &self.holes {
            let mut m = 0.0;
            for w in hole.words() {
                m += data.word_measure(phi, w.symbols())?;
            }
            mu.push(m);
        }
        let decay = fit_decay(&self.holes, &mu);

        let periodic_threshold = self.center.prime_period().and_then(|p| {
            let block = self.center.prefix(p).expect("periodic points have all digits");
            let ok: Vec<bool> = self
                .holes
                .iter()
                .map(|hole| {
                    hole.words().iter().all(|w| {
                        let pulled = block.concat(w);
                        !shift.is_admissible(&pulled.prefix(hole.len.max(2)))
                            || hole.contains(pulled.symbols())
                    })
                })
                .collect();
            // Threshold = start of the trailing all-true run.
            let mut threshold = None;
            for (i, &good) in ok.iter().enumerate().rev() {
                if !good {
                    break;
                }
                threshold = Some(i + 1);
            }
            threshold
        });

        Ok(FamilyDiagnostics {
            nested,
            center_contained,
            l_values,
            kappa,
            mu,
            decay,
            periodic_threshold,
        })
    }
}

/// Length of the longest common prefix of the hole's words; for an empty hole
/// the full word length, since the empty set sits inside every cylinder.
fn common_prefix_len(hole: &Hole) -> usize {
    let words = hole.words();
    match words.split_first() {
        None => hole.len(),
        Some((first, rest)) => {
            let mut l = first.len();
            for w in rest {
                let agree = first
                    .symbols()
                    .iter()
                    .zip(w.symbols())
                    .take_while(|(a, b)| a == b)
                    .count();
                l = l.min(agree);
            }
            l
        }
    }
}

/// Least-squares fit of log mu against hole length.
fn fit_decay(holes: &[Hole], mu: &[f64]) -> Option<DecayFit> {
    let points: Vec<(f64, f64)> = holes
        .iter()
        .zip(mu)
        .filter(|(_, &m)| m > 0.0)
        .map(|(hole, &m)| (hole.len() as f64, m.ln()))
        .collect();
    let distinct = {
        let mut lens: Vec<u64> = points.iter().map(|p| p.0 as u64).collect();
        lens.dedup();
        lens.len()
    };
    if distinct < 2 {
        return None;
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    Some(DecayFit {
        c: intercept.exp(),
        rho: slope.exp(),
    })
}

/// Structural report for a hole family. Nothing here is enforced; sweeps run
/// on broken families too, but the asymptotic theory only applies when the
/// flags hold.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyDiagnostics {
    /// union(holes[n+1]) contained in union(holes[n]) for every n.
    pub nested: bool,
    /// Every hole contains the center's own prefix cylinder.
    pub center_contained: bool,
    /// Depth of the smallest single cylinder containing each hole.
    pub l_values: Vec<usize>,
    /// min over n of l_n / len_n; bounded away from 0 keeps holes comparable
    /// to cylinders around the center.
    pub kappa: f64,
    /// Gibbs measures mu(U_n).
    pub mu: Vec<f64>,
    /// Fit mu(U_n) ~ c * rho^{len_n}; None with fewer than two usable rows.
    pub decay: Option<DecayFit>,
    /// For a periodic center of prime period p: least n from which
    /// sigma^{-p}(U_n) cut to the center's period cylinder stays inside U_n.
    /// None for non-periodic centers or when the last hole fails the check.
    pub periodic_threshold: Option<usize>,
}

/// Coefficients of the exponential decay fit mu <= c * rho^len.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayFit {
    pub c: f64,
    pub rho: f64,
}

/// Copy of `matrix` with every preimage column inside the hole zeroed.
///
/// Hole words shorter than the matrix depth are padded implicitly: a column is
/// zeroed when its word starts with a hole word.
pub fn perturbed_matrix(matrix: &TransferMatrix, hole: &Hole) -> Result<TransferMatrix> {
    if hole.len() > matrix.depth() {
        return Err(Error::DepthMismatch {
            hole_len: hole.len(),
            depth: matrix.depth(),
        });
    }
    let states: Vec<usize> = matrix
        .basis()
        .words()
        .iter()
        .enumerate()
        .filter(|(_, w)| hole.contains(w.symbols()))
        .map(|(i, _)| i)
        .collect();
    Ok(matrix.with_zeroed_columns(states))
}

/// Leading eigenvalue of a perturbed transfer matrix plus survivor-graph
/// diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct PerturbedSpectrum {
    /// Depth of the matrix the hole was punched out of.
    pub depth: usize,
    /// Spectral radius lambda_n of the perturbed matrix; 0 when no cycle
    /// survives.
    pub lambda: f64,
    /// True when the survivor graph is primitive. When false the radius is
    /// still exact: it is the max of the Perron roots over strongly connected
    /// components.
    pub mixing: bool,
    /// Surviving strongly connected components that carry a cycle.
    pub cyclic_components: usize,
    /// No positive-weight cycle survives; lambda = 0 and the escape rate is
    /// infinite.
    pub empty_survivor: bool,
    pub iterations: usize,
    pub residual: f64,
}

/// Perturbed leading eigenvalue for the hole, at matrix depth
/// max(depth, hole length, potential depth).
pub fn perturbed_eigenvalue(
    shift: &Subshift,
    phi: &Potential,
    hole: &Hole,
    depth: usize,
) -> Result<PerturbedSpectrum> {
    let depth = depth.max(hole.len()).max(phi.depth());
    let matrix = build_transfer_matrix(shift, phi, depth)?;
    let perturbed = perturbed_matrix(&matrix, hole)?;
    let outcome = spectral::spectral_radius(perturbed.weights(), perturbed.in_edges())?;
    Ok(PerturbedSpectrum {
        depth,
        lambda: outcome.radius,
        mixing: outcome.mixing,
        cyclic_components: outcome.cyclic_components,
        empty_survivor: outcome.empty,
        iterations: outcome.iterations,
        residual: outcome.residual,
    })
}

/// One row of an escape-rate sweep.
#[derive(Debug, Clone, Serialize)]
pub struct EscapeRateResult {
    /// 1-based index into the hole family.
    pub n: usize,
    /// Cylinder length of the hole words.
    pub len_n: usize,
    /// Gibbs measure mu(U_n).
    pub mu_hole: f64,
    /// Unperturbed leading eigenvalue.
    pub lambda: f64,
    /// Perturbed leading eigenvalue.
    pub lambda_n: f64,
    /// log(lambda) - log(lambda_n); infinite when the survivor set is empty,
    /// exactly 0 for an empty hole.
    pub escape_rate: f64,
    /// escape_rate / mu_hole; NaN for an empty hole.
    pub ratio: f64,
    /// (lambda - lambda_n) / mu_hole, the eigenvalue-gap route to the same
    /// asymptotics; its limit is lambda times `predicted`.
    pub gap_ratio: f64,
    /// Limit d_phi(z) of `ratio` as the holes shrink.
    pub predicted: f64,
    /// |ratio - predicted|.
    pub deviation: f64,
    /// Survivor graph primitive?
    pub mixing_flag: bool,
    pub empty_survivor: bool,
}

/// Escape-rate data for the n-th hole of the family.
pub fn escape_rate(
    shift: &Subshift,
    phi: &Potential,
    family: &HoleFamily,
    n: usize,
) -> Result<EscapeRateResult> {
    let hole = family_hole(family, n)?;
    let data = base_spectral_data(shift, phi)?;
    let predicted = predicted_from_pressure(phi, family.center(), data.pressure)?;
    escape_row(shift, phi, &data, hole, n, predicted)
}

/// Ratio (lambda - lambda_n)/mu(U_n) for the n-th hole.
pub fn eigenvalue_gap_ratio(
    shift: &Subshift,
    phi: &Potential,
    family: &HoleFamily,
    n: usize,
) -> Result<f64> {
    Ok(escape_rate(shift, phi, family, n)?.gap_ratio)
}

fn family_hole<'f>(family: &'f HoleFamily, n: usize) -> Result<&'f Hole> {
    family.hole(n).ok_or_else(|| {
        Error::Config(format!(
            "hole index {n} outside family of {} holes",
            family.n_max()
        ))
    })
}

fn base_spectral_data(shift: &Subshift, phi: &Potential) -> Result<SpectralData> {
    leading_eigentriple(&build_transfer_matrix(shift, phi, phi.depth().max(2))?)
}

fn escape_row(
    shift: &Subshift,
    phi: &Potential,
    data: &SpectralData,
    hole: &Hole,
    n: usize,
    predicted: f64,
) -> Result<EscapeRateResult> {
    let mut mu = 0.0;
    for w in hole.words() {
        mu += data.word_measure(phi, w.symbols())?;
    }
    let lambda = data.lambda;
    // An empty hole leaves the matrix untouched; report the identity values
    // exactly instead of comparing two power-iteration runs.
    let (lambda_n, escape, mixing, empty_survivor) = if hole.is_empty() {
        (lambda, 0.0, true, false)
    } else {
        let spectrum = perturbed_eigenvalue(shift, phi, hole, hole.len())?;
        let escape = if spectrum.empty_survivor {
            f64::INFINITY
        } else {
            data.pressure - spectrum.lambda.ln()
        };
        (spectrum.lambda, escape, spectrum.mixing, spectrum.empty_survivor)
    };
    let ratio = escape / mu;
    Ok(EscapeRateResult {
        n,
        len_n: hole.len(),
        mu_hole: mu,
        lambda,
        lambda_n,
        escape_rate: escape,
        ratio,
        gap_ratio: (lambda - lambda_n) / mu,
        predicted,
        deviation: (ratio - predicted).abs(),
        mixing_flag: mixing,
        empty_survivor,
    })
}

/// Limiting normalized escape rate d_phi(z): 1 for a non-periodic center,
/// 1 - e^{phi^p(z) - p P(phi)} for prime period p.
pub fn predicted_limit(shift: &Subshift, phi: &Potential, z: &SymbolicPoint) -> Result<f64> {
    let pressure = crate::thermo::pressure(shift, phi)?;
    predicted_from_pressure(phi, z, pressure)
}

pub(crate) fn predicted_from_pressure(
    phi: &Potential,
    z: &SymbolicPoint,
    pressure: f64,
) -> Result<f64> {
    match z.prime_period() {
        None => Ok(1.0),
        Some(p) => {
            let s = crate::thermo::birkhoff_sum(phi, z, p)?;
            Ok(1.0 - (s - pressure * p as f64).exp())
        }
    }
}

/// Escape-rate sweep over a range of holes, with a convergence report.
#[derive(Debug, Clone, Serialize)]
pub struct EscapeSweep {
    pub rows: Vec<EscapeRateResult>,
    /// Unperturbed leading eigenvalue.
    pub lambda: f64,
    /// Limit the ratios converge to.
    pub predicted: f64,
    pub final_ratio: f64,
    pub final_deviation: f64,
    /// Deviations strictly decreasing over the last (up to) five rows.
    pub deviations_shrinking: bool,
    /// lambda_n nondecreasing across the sweep, as nested holes shrink.
    pub lambda_monotone: bool,
    /// Limit lambda * d_phi(z) of the eigenvalue-gap ratio.
    pub gap_ratio_limit: f64,
    pub final_gap_ratio: f64,
    /// Final eigenvalue gap below a tenth of the first: lambda_n has moved
    /// decisively toward lambda over the sweep.
    pub gap_collapsed: bool,
}

/// Run [`escape_rate`] for every n in the range (in parallel) and fit the
/// convergence report.
pub fn escape_sweep(
    shift: &Subshift,
    phi: &Potential,
    family: &HoleFamily,
    n_range: RangeInclusive<usize>,
) -> Result<EscapeSweep> {
    let (lo, hi) = (*n_range.start(), *n_range.end());
    if lo < 1 || hi > family.n_max() || lo > hi {
        return Err(Error::Config(format!(
            "sweep range {lo}..={hi} outside family of {} holes",
            family.n_max()
        )));
    }
    let data = base_spectral_data(shift, phi)?;
    let predicted = predicted_from_pressure(phi, family.center(), data.pressure)?;
    let rows: Vec<EscapeRateResult> = (lo..=hi)
        .into_par_iter()
        .map(|n| escape_row(shift, phi, &data, family_hole(family, n)?, n, predicted))
        .collect::<Result<_>>()?;

    let last = rows.last().expect("range is nonempty");
    let tail_start = rows.len().saturating_sub(5);
    let deviations_shrinking = rows[tail_start..]
        .windows(2)
        .all(|w| w[1].deviation < w[0].deviation);
    let lambda_monotone = rows
        .windows(2)
        .all(|w| w[1].lambda_n >= w[0].lambda_n - 1e-12);
    let first_gap = data.lambda - rows[0].lambda_n;
    let last_gap = data.lambda - last.lambda_n;
    Ok(EscapeSweep {
        lambda: data.lambda,
        predicted,
        final_ratio: last.ratio,
        final_deviation: last.deviation,
        deviations_shrinking,
        lambda_monotone,
        gap_ratio_limit: data.lambda * predicted,
        final_gap_ratio: last.gap_ratio,
        gap_collapsed: last_gap < first_gap / 10.0,
        rows,
    })
}

/// Pressure-gap ratio (P(phi) - log lambda_n)/mu(U_n) for the n-th hole.
#[derive(Debug, Clone, Serialize)]
pub struct PressureGapRatio {
    pub n: usize,
    pub pressure: f64,
    /// log(lambda_n); -inf when the survivor set is empty.
    pub pressure_n: f64,
    pub mu_hole: f64,
    /// NaN when the hole is degenerate (empty or of measure zero).
    pub ratio: f64,
    pub degenerate: bool,
}

/// Pressure drop per unit of hole measure; converges to the same limit as the
/// escape-rate ratio.
pub fn pressure_gap_ratio(
    shift: &Subshift,
    phi: &Potential,
    family: &HoleFamily,
    n: usize,
) -> Result<PressureGapRatio> {
    let hole = family_hole(family, n)?;
    let data = base_spectral_data(shift, phi)?;
    let mut mu = 0.0;
    for w in hole.words() {
        mu += data.word_measure(phi, w.symbols())?;
    }
    if hole.is_empty() || mu == 0.0 {
        return Ok(PressureGapRatio {
            n,
            pressure: data.pressure,
            pressure_n: data.pressure,
            mu_hole: mu,
            ratio: f64::NAN,
            degenerate: true,
        });
    }
    let spectrum = perturbed_eigenvalue(shift, phi, hole, hole.len())?;
    let pressure_n = if spectrum.empty_survivor {
        f64::NEG_INFINITY
    } else {
        spectrum.lambda.ln()
    };
    Ok(PressureGapRatio {
        n,
        pressure: data.pressure,
        pressure_n,
        mu_hole: mu,
        ratio: (data.pressure - pressure_n) / mu,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::Subshift;
    use proptest::prelude::*;

    fn word(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn golden_mean() -> Subshift {
        Subshift::new(vec![vec![1, 1], vec![1, 0]]).unwrap()
    }

    /// Full 2-shift with the normalized potential of the ternary Cantor
    /// repeller: phi = -log 2, pressure 0.
    fn cantor() -> (Subshift, Potential) {
        (Subshift::full_shift(2), Potential::constant(-(2f64).ln()))
    }

    #[test]
    fn standard_family_lists_prefixes() {
        let shift = Subshift::full_shift(2);
        let z = SymbolicPoint::periodic(word("01")).unwrap();
        let family = HoleFamily::standard(&shift, &z, 3).unwrap();
        let words: Vec<String> = family
            .holes()
            .iter()
            .map(|h| h.words()[0].to_string())
            .collect();
        assert_eq!(words, ["0", "01", "010"]);
        assert_eq!(family.hole(2).unwrap().len(), 2);
        assert!(family.hole(4).is_none());
        assert!(family.hole(0).is_none());
    }

    #[test]
    fn standard_family_needs_digits() {
        let shift = Subshift::full_shift(2);
        let z = SymbolicPoint::aperiodic_prefix(word("0110"));
        let err = HoleFamily::standard(&shift, &z, 9).unwrap_err();
        assert!(matches!(err, Error::InsufficientDigits { needed: 5, available: 4 }));
    }

    #[test]
    fn from_parts_rejects_inadmissible_words() {
        let shift = golden_mean();
        let z = SymbolicPoint::periodic(word("0")).unwrap();
        let bad = Hole::new(2, vec![word("11")]).unwrap();
        let err = HoleFamily::from_parts(&shift, z, vec![bad]).unwrap_err();
        assert!(matches!(err, Error::InadmissibleWord { .. }));
    }

    #[test]
    fn from_parts_rejects_shrinking_lengths() {
        let shift = Subshift::full_shift(2);
        let z = SymbolicPoint::periodic(word("0")).unwrap();
        let holes = vec![
            Hole::new(2, vec![word("00")]).unwrap(),
            Hole::new(1, vec![word("0")]).unwrap(),
        ];
        let err = HoleFamily::from_parts(&shift, z, holes).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn perturbed_matrix_matches_hand_examples() {
        let (shift, phi) = cantor();
        let matrix = build_transfer_matrix(&shift, &phi, 1).unwrap();
        let hole = Hole::cylinder(word("0")).unwrap();
        let dense = perturbed_matrix(&matrix, &hole).unwrap().to_dense();
        assert_eq!(dense, vec![vec![0.0, 0.5], vec![0.0, 0.5]]);

        let empty = Hole::new(1, vec![]).unwrap();
        assert_eq!(perturbed_matrix(&matrix, &empty).unwrap().to_dense(), matrix.to_dense());

        let matrix = build_transfer_matrix(&golden_mean(), &Potential::constant(0.0), 1).unwrap();
        let hole = Hole::cylinder(word("1")).unwrap();
        let dense = perturbed_matrix(&matrix, &hole).unwrap().to_dense();
        assert_eq!(dense, vec![vec![1.0, 0.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn perturbed_matrix_pads_short_holes() {
        let (shift, phi) = cantor();
        let matrix = build_transfer_matrix(&shift, &phi, 3).unwrap();
        let hole = Hole::cylinder(word("0")).unwrap();
        let perturbed = perturbed_matrix(&matrix, &hole).unwrap();
        for (i, w) in perturbed.basis().words().iter().enumerate() {
            let expected = if w.symbols()[0] == 0 { 0.0 } else { 0.5 };
            assert_eq!(perturbed.weight(i), expected);
        }
    }

    #[test]
    fn perturbed_matrix_depth_mismatch() {
        let (shift, phi) = cantor();
        let matrix = build_transfer_matrix(&shift, &phi, 2).unwrap();
        let hole = Hole::cylinder(word("010")).unwrap();
        let err = perturbed_matrix(&matrix, &hole).unwrap_err();
        assert!(matches!(err, Error::DepthMismatch { hole_len: 3, depth: 2 }));
    }

    #[test]
    fn perturbed_eigenvalue_hand_examples() {
        let (shift, phi) = cantor();
        let spectrum =
            perturbed_eigenvalue(&shift, &phi, &Hole::cylinder(word("0")).unwrap(), 1).unwrap();
        assert!((spectrum.lambda - 0.5).abs() < 1e-12);
        assert!(spectrum.mixing);
        assert!(!spectrum.empty_survivor);

        let all = Hole::new(2, vec![word("00"), word("01"), word("10"), word("11")]).unwrap();
        let spectrum = perturbed_eigenvalue(&shift, &phi, &all, 2).unwrap();
        assert_eq!(spectrum.lambda, 0.0);
        assert!(spectrum.empty_survivor);

        let spectrum = perturbed_eigenvalue(
            &golden_mean(),
            &Potential::constant(0.0),
            &Hole::cylinder(word("1")).unwrap(),
            1,
        )
        .unwrap();
        assert!((spectrum.lambda - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perturbed_eigenvalue_flags_split_survivor() {
        // Deleting the cylinder 01 from the full 2-shift leaves the two fixed
        // points joined only by a one-way transient, so the survivor graph is
        // not strongly connected and the radius 1/2 is not simple.
        let (shift, phi) = cantor();
        let spectrum =
            perturbed_eigenvalue(&shift, &phi, &Hole::cylinder(word("01")).unwrap(), 2).unwrap();
        assert!((spectrum.lambda - 0.5).abs() < 1e-12);
        assert!(!spectrum.mixing);
        assert_eq!(spectrum.cyclic_components, 2);
        assert!(!spectrum.empty_survivor);
    }

    #[test]
    fn escape_rate_symbol_hole_on_full_shift() {
        let (shift, phi) = cantor();
        let z = SymbolicPoint::periodic(word("0")).unwrap();
        let family = HoleFamily::standard(&shift, &z, 3).unwrap();
        let row = escape_rate(&shift, &phi, &family, 1).unwrap();
        assert!((row.mu_hole - 0.5).abs() < 1e-12);
        assert!((row.lambda - 1.0).abs() < 1e-12);
        assert!((row.lambda_n - 0.5).abs() < 1e-12);
        assert!((row.escape_rate - (2f64).ln()).abs() < 1e-12);
        assert!((row.predicted - 0.5).abs() < 1e-12);
        assert!((row.gap_ratio - 1.0).abs() < 1e-11);
    }

    #[test]
    fn escape_rate_empty_hole_is_exactly_zero() {
        let shift = Subshift::full_shift(2);
        let phi = Potential::constant(-(2f64).ln());
        let z = SymbolicPoint::periodic(word("0")).unwrap();
        let family =
            HoleFamily::from_parts(&shift, z, vec![Hole::new(1, vec![]).unwrap()]).unwrap();
        let row = escape_rate(&shift, &phi, &family, 1).unwrap();
        assert_eq!(row.escape_rate, 0.0);
        assert_eq!(row.mu_hole, 0.0);
        assert!(row.ratio.is_nan());
        assert!(!row.empty_survivor);
    }

    #[test]
    fn predicted_limit_examples() {
        let (shift, phi) = cantor();
        // Period-2 center of the ternary Cantor repeller.
        let z = SymbolicPoint::periodic(word("01")).unwrap();
        let d = predicted_limit(&shift, &phi, &z).unwrap();
        assert!((d - 0.75).abs() < 1e-12);

        let aperiodic = SymbolicPoint::binary_champernowne(16);
        assert_eq!(predicted_limit(&shift, &phi, &aperiodic).unwrap(), 1.0);

        // Measure of maximal entropy: 1 - e^{-p h_top}.
        let phi0 = Potential::constant(0.0);
        for p in 1..=3usize {
            let block = Word::new((0..p as u8).collect());
            let z = SymbolicPoint::periodic(block).unwrap();
            let d = predicted_limit(&Subshift::full_shift(4), &phi0, &z).unwrap();
            assert!((d - (1.0 - 4f64.powi(-(p as i32)))).abs() < 1e-12);
        }
    }

    #[test]
    fn predicted_limit_invariant_under_constant_shift() {
        let shift = Subshift::full_shift(2);
        let phi = Potential::constant(-(2f64).ln());
        let z = SymbolicPoint::periodic(word("01")).unwrap();
        let base = predicted_limit(&shift, &phi, &z).unwrap();
        for c in [-1.5, -0.3, 0.7, 2.0] {
            let shifted = predicted_limit(&shift, &phi.shifted(c), &z).unwrap();
            assert!((shifted - base).abs() < 1e-9, "c={c}: {shifted} vs {base}");
        }
    }

    #[test]
    fn sweep_converges_on_cantor_period_two() {
        let (shift, phi) = cantor();
        let z = SymbolicPoint::periodic(word("01")).unwrap();
        let family = HoleFamily::standard(&shift, &z, 12).unwrap();
        let sweep = escape_sweep(&shift, &phi, &family, 2..=12).unwrap();
        assert!((sweep.predicted - 0.75).abs() < 1e-12);
        assert!(sweep.final_deviation < 0.05, "deviation {}", sweep.final_deviation);
        assert!(sweep.deviations_shrinking);
        assert!(sweep.lambda_monotone);
        assert!(sweep.gap_collapsed);
        // Eigenvalue-gap route approaches lambda * predicted = 3/4.
        assert!((sweep.final_gap_ratio - sweep.gap_ratio_limit).abs() < 0.05);
    }

    #[test]
    fn sweep_trends_to_one_for_nonperiodic_center() {
        let (shift, phi) = cantor();
        let z = SymbolicPoint::binary_champernowne(14);
        let family = HoleFamily::standard(&shift, &z, 12).unwrap();
        let sweep = escape_sweep(&shift, &phi, &family, 2..=12).unwrap();
        assert_eq!(sweep.predicted, 1.0);
        assert!(sweep.final_deviation < 0.05, "deviation {}", sweep.final_deviation);
        assert!(sweep.lambda_monotone);
    }

    #[test]
    fn sweep_of_length_one() {
        let (shift, phi) = cantor();
        let z = SymbolicPoint::periodic(word("01")).unwrap();
        let family = HoleFamily::standard(&shift, &z, 3).unwrap();
        let sweep = escape_sweep(&shift, &phi, &family, 2..=2).unwrap();
        assert_eq!(sweep.rows.len(), 1);
        assert!(sweep.deviations_shrinking);
        assert!(sweep.lambda_monotone);
    }

    #[test]
    fn sweep_range_validation() {
        let (shift, phi) = cantor();
        let z = SymbolicPoint::periodic(word("0")).unwrap();
        let family = HoleFamily::standard(&shift, &z, 3).unwrap();
        assert!(escape_sweep(&shift, &phi, &family, 1..=4).is_err());
        assert!(escape_sweep(&shift, &phi, &family, 0..=2).is_err());
    }

    #[test]
    fn pressure_gap_matches_entropy_corollary() {
        // Entropy case: phi = 0 on the full 2-shift, Parry measure uniform;
        // the pressure drop per unit hole measure tends to 1 - 2^{-p}.
        let shift = Subshift::full_shift(2);
        let phi = Potential::constant(0.0);
        let z = SymbolicPoint::periodic(word("0")).unwrap();
        let family = HoleFamily::standard(&shift, &z, 10).unwrap();
        let gap = pressure_gap_ratio(&shift, &phi, &family, 10).unwrap();
        assert!(!gap.degenerate);
        assert!((gap.pressure - (2f64).ln()).abs() < 1e-10);
        assert!((gap.ratio - 0.5).abs() < 0.05, "ratio {}", gap.ratio);
    }

    #[test]
    fn pressure_gap_empty_hole_is_degenerate() {
        let shift = Subshift::full_shift(2);
        let phi = Potential::constant(0.0);
        let z = SymbolicPoint::periodic(word("0")).unwrap();
        let family =
            HoleFamily::from_parts(&shift, z, vec![Hole::new(1, vec![]).unwrap()]).unwrap();
        let gap = pressure_gap_ratio(&shift, &phi, &family, 1).unwrap();
        assert!(gap.degenerate);
        assert!(gap.ratio.is_nan());
    }

    #[test]
    fn diagnostics_on_standard_cantor_family() {
        let (shift, phi) = cantor();
        let z = SymbolicPoint::periodic(word("01")).unwrap();
        let family = HoleFamily::standard(&shift, &z, 8).unwrap();
        let diag = family.diagnostics(&shift, &phi).unwrap();
        assert!(diag.nested);
        assert!(diag.center_contained);
        assert_eq!(diag.l_values, (1..=8).collect::<Vec<_>>());
        assert!((diag.kappa - 1.0).abs() < 1e-12);
        for (i, &m) in diag.mu.iter().enumerate() {
            assert!((m - 0.5f64.powi(i as i32 + 1)).abs() < 1e-12);
        }
        let fit = diag.decay.unwrap();
        assert!((fit.rho - 0.5).abs() < 1e-9);
        assert!((fit.c - 1.0).abs() < 1e-9);
        assert_eq!(diag.periodic_threshold, Some(1));
    }

    #[test]
    fn diagnostics_flag_broken_families() {
        let shift = Subshift::full_shift(2);
        let phi = Potential::constant(-(2f64).ln());
        let z = SymbolicPoint::periodic(word("0")).unwrap();
        let holes = vec![
            Hole::cylinder(word("00")).unwrap(),
            Hole::cylinder(word("01")).unwrap(),
        ];
        let family = HoleFamily::from_parts(&shift, z, holes).unwrap();
        let diag = family.diagnostics(&shift, &phi).unwrap();
        assert!(!diag.nested);
        assert!(!diag.center_contained);
    }

    #[test]
    fn diagnostics_union_hole_common_prefix() {
        let shift = Subshift::full_shift(2);
        let phi = Potential::constant(-(2f64).ln());
        let z = SymbolicPoint::periodic(word("0")).unwrap();
        let holes = vec![Hole::new(3, vec![word("000"), word("001")]).unwrap()];
        let family = HoleFamily::from_parts(&shift, z, holes).unwrap();
        let diag = family.diagnostics(&shift, &phi).unwrap();
        assert_eq!(diag.l_values, vec![2]);
        assert!((diag.kappa - 2.0 / 3.0).abs() < 1e-12);
        assert!((diag.mu[0] - 0.25).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        /// Nested holes only ever grow the survivor system: lambda_n is
        /// nondecreasing in n and bounded by lambda.
        #[test]
        fn lambda_n_monotone_under_nesting(
            weight0 in -1.0f64..1.0,
            weight1 in -1.0f64..1.0,
            block in proptest::collection::vec(0u8..2, 1..=3),
        ) {
            let shift = Subshift::full_shift(2);
            let mut values = std::collections::BTreeMap::new();
            values.insert(Word::new(vec![0]), weight0);
            values.insert(Word::new(vec![1]), weight1);
            let phi = Potential::new(1, values, None).unwrap();
            let z = SymbolicPoint::periodic(Word::new(block)).unwrap();
            let family = HoleFamily::standard(&shift, &z, 6).unwrap();
            let sweep = escape_sweep(&shift, &phi, &family, 1..=6).unwrap();
            prop_assert!(sweep.lambda_monotone);
            for row in &sweep.rows {
                prop_assert!(row.lambda_n <= row.lambda + 1e-10);
                prop_assert!(row.escape_rate >= -1e-10);
            }
        }
    }
}
