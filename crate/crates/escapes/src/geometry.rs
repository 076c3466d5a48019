//! Expanding Markov interval maps and their symbolic coding.
//!
//! A map is a list of monotone expanding branches on disjoint subintervals of
//! [0, 1]; the Markov condition (each branch image overlaps every branch
//! interval either fully or not at all) induces a subshift of finite type on
//! the branch indices. The module translates between the two pictures:
//! cylinder words to geometric intervals, points to address sequences, and
//! metric balls to inner/outer cylinder unions whose Gibbs measures sandwich
//! the ball.
//!
//! Linear branches are iterated in exact rational arithmetic, so cylinder
//! endpoints and eventually periodic addresses of rational points are exact;
//! nonlinear branches fall back to floating point with bisection inverses.

use std::collections::{BTreeMap, HashMap, HashSet};

use num::{BigRational, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holes::{Hole, HoleFamily};
use crate::params;
use crate::symbolic::{Subshift, SymbolicPoint, Word};
use crate::thermo::{build_transfer_matrix, leading_eigentriple, Potential, SpectralData};

/// Analytic description of one branch on its interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BranchKind {
    /// f(x) = slope * x + offset.
    Linear { slope: f64, offset: f64 },
    /// f(x) = sum coeffs[i] * x^i.
    Poly { coeffs: Vec<f64> },
}

/// One branch: a closed subinterval of [0, 1] and the map on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub interval: [f64; 2],
    #[serde(flatten)]
    pub kind: BranchKind,
}

impl Branch {
    pub fn linear(a: f64, b: f64, slope: f64, offset: f64) -> Self {
        Branch {
            interval: [a, b],
            kind: BranchKind::Linear { slope, offset },
        }
    }

    pub fn poly(a: f64, b: f64, coeffs: Vec<f64>) -> Self {
        Branch {
            interval: [a, b],
            kind: BranchKind::Poly { coeffs },
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        match &self.kind {
            BranchKind::Linear { slope, offset } => slope * x + offset,
            BranchKind::Poly { coeffs } => {
                coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
            }
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match &self.kind {
            BranchKind::Linear { slope, .. } => *slope,
            BranchKind::Poly { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (i, &c)| acc * x + i as f64 * c),
        }
    }

    /// Image interval, endpoints sorted.
    fn image(&self) -> (f64, f64) {
        let (fa, fb) = (self.apply(self.interval[0]), self.apply(self.interval[1]));
        (fa.min(fb), fa.max(fb))
    }

    fn is_linear(&self) -> bool {
        matches!(self.kind, BranchKind::Linear { .. })
    }

    /// Exact image of a rational point; only valid for linear branches.
    fn apply_exact(&self, x: &BigRational) -> BigRational {
        match &self.kind {
            BranchKind::Linear { slope, offset } => {
                rational(*slope) * x + rational(*offset)
            }
            BranchKind::Poly { .. } => unreachable!("exact path requires linear branches"),
        }
    }

    /// Exact branch inverse; only valid for linear branches.
    fn invert_exact(&self, y: &BigRational) -> BigRational {
        match &self.kind {
            BranchKind::Linear { slope, offset } => (y - rational(*offset)) / rational(*slope),
            BranchKind::Poly { .. } => unreachable!("exact path requires linear branches"),
        }
    }

    /// x in the branch interval with f(x) = y, by bisection for nonlinear
    /// branches. `y` is assumed to lie in the branch image.
    fn invert(&self, y: f64) -> f64 {
        match &self.kind {
            BranchKind::Linear { slope, offset } => {
                ((y - offset) / slope).clamp(self.interval[0], self.interval[1])
            }
            BranchKind::Poly { .. } => {
                let (mut lo, mut hi) = (self.interval[0], self.interval[1]);
                let increasing = self.apply(hi) > self.apply(lo);
                while hi - lo > params::INVERSE_TOL {
                    let mid = 0.5 * (lo + hi);
                    if (self.apply(mid) < y) == increasing {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }
}

/// Exact rational value of an f64 (every finite f64 is rational).
fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// A piecewise expanding Markov map of the unit interval.
///
/// Branch order defines the symbol alphabet of the induced subshift: symbol i
/// is the i-th branch, left to right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapRepr", into = "MapRepr")]
pub struct MarkovIntervalMap {
    branches: Vec<Branch>,
    shift: Subshift,
    expansion: f64,
    all_linear: bool,
}

/// Serialization surface for [`MarkovIntervalMap`]; deserialization re-runs
/// the validating constructor.
#[derive(Serialize, Deserialize)]
struct MapRepr {
    branches: Vec<Branch>,
}

impl TryFrom<MapRepr> for MarkovIntervalMap {
    type Error = Error;

    fn try_from(repr: MapRepr) -> Result<Self> {
        MarkovIntervalMap::new(repr.branches)
    }
}

impl From<MarkovIntervalMap> for MapRepr {
    fn from(map: MarkovIntervalMap) -> Self {
        MapRepr { branches: map.branches }
    }
}

/// Tolerance for the Markov image condition: each branch image must overlap
/// each branch interval either fully or not at all, up to this slack.
const MARKOV_TOL: f64 = 1e-9;

impl MarkovIntervalMap {
    /// Validate the branch data and derive the induced subshift.
    ///
    /// Requirements: intervals inside [0, 1], left to right with disjoint
    /// interiors; each branch monotone with |f'| > 1 on a sample grid; the
    /// Markov image condition within 1e-9.
    pub fn new(branches: Vec<Branch>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::InvalidMap("no branches".into()));
        }
        if branches.len() > 256 {
            return Err(Error::InvalidMap(format!("{} branches, at most 256", branches.len())));
        }
        for (i, br) in branches.iter().enumerate() {
            let [a, b] = br.interval;
            if !(a.is_finite() && b.is_finite() && a < b && a >= 0.0 && b <= 1.0) {
                return Err(Error::InvalidMap(format!(
                    "branch {i} interval [{a}, {b}] is not a subinterval of [0, 1]"
                )));
            }
        }
        for (i, pair) in branches.windows(2).enumerate() {
            if pair[1].interval[0] < pair[0].interval[1] - 1e-12 {
                return Err(Error::InvalidMap(format!(
                    "branch intervals {i} and {} overlap or are out of order",
                    i + 1
                )));
            }
        }

        // Monotonicity and expansion on a sample grid.
        let mut expansion = f64::INFINITY;
        for (i, br) in branches.iter().enumerate() {
            let [a, b] = br.interval;
            let mut sign = 0.0;
            for s in 0..params::DERIV_SAMPLES {
                let x = a + (b - a) * s as f64 / (params::DERIV_SAMPLES - 1) as f64;
                let d = br.deriv(x);
                if d == 0.0 || (sign != 0.0 && d.signum() != sign) {
                    return Err(Error::InvalidMap(format!(
                        "branch {i} is not strictly monotone (f'({x}) = {d})"
                    )));
                }
                sign = d.signum();
                expansion = expansion.min(d.abs());
            }
        }
        if expansion <= 1.0 {
            return Err(Error::InvalidMap(format!(
                "map is not uniformly expanding: min |f'| = {expansion}"
            )));
        }

        // Markov condition and induced transitions.
        let mut transition = vec![vec![0u8; branches.len()]; branches.len()];
        for (i, br) in branches.iter().enumerate() {
            let (ilo, ihi) = br.image();
            for (k, target) in branches.iter().enumerate() {
                let [a, b] = target.interval;
                let overlap = (ihi.min(b) - ilo.max(a)).max(0.0);
                if overlap > MARKOV_TOL && overlap < (b - a) - MARKOV_TOL {
                    return Err(Error::InvalidMap(format!(
                        "image of branch {i} covers branch {k} only partially \
                         (overlap {overlap:.6} of {:.6})",
                        b - a
                    )));
                }
                transition[i][k] = u8::from(overlap >= (b - a) - MARKOV_TOL);
            }
        }
        let shift = Subshift::new(transition)
            .map_err(|e| Error::InvalidMap(format!("induced transitions are degenerate: {e}")))?;
        let all_linear = branches.iter().all(Branch::is_linear);
        Ok(MarkovIntervalMap {
            branches,
            shift,
            expansion,
            all_linear,
        })
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Induced subshift on branch indices.
    pub fn subshift(&self) -> &Subshift {
        &self.shift
    }

    /// Minimal sampled |f'| over all branches; > 1 by construction.
    pub fn expansion(&self) -> f64 {
        self.expansion
    }

    /// Geometric interval of the cylinder with address `w`, endpoints sorted.
    ///
    /// Exact (up to final rounding) for all-linear maps via rational backward
    /// iteration; otherwise computed with bisection inverses to 1e-14.
    pub fn cylinder_interval(&self, w: &Word) -> Result<(f64, f64)> {
        if w.is_empty() || !self.shift.is_admissible(w) {
            return Err(Error::InadmissibleWord {
                word: w.to_string(),
                reason: "not an address of the induced subshift".into(),
            });
        }
        let syms = w.symbols();
        if self.all_linear {
            let last = &self.branches[syms[syms.len() - 1] as usize];
            let mut lo = rational(last.interval[0]);
            let mut hi = rational(last.interval[1]);
            for &s in syms[..syms.len() - 1].iter().rev() {
                let br = &self.branches[s as usize];
                let x = br.invert_exact(&lo);
                let y = br.invert_exact(&hi);
                if x <= y {
                    (lo, hi) = (x, y);
                } else {
                    (lo, hi) = (y, x);
                }
            }
            Ok((lo.to_f64().unwrap(), hi.to_f64().unwrap()))
        } else {
            let last = &self.branches[syms[syms.len() - 1] as usize];
            let (mut lo, mut hi) = (last.interval[0], last.interval[1]);
            for &s in syms[..syms.len() - 1].iter().rev() {
                let br = &self.branches[s as usize];
                let (x, y) = (br.invert(lo), br.invert(hi));
                (lo, hi) = (x.min(y), x.max(y));
            }
            Ok((lo, hi))
        }
    }

    fn branch_containing(&self, x: f64, tol: f64) -> Option<usize> {
        self.branches
            .iter()
            .position(|br| x >= br.interval[0] - tol && x <= br.interval[1] + tol)
    }

    fn branch_containing_exact(&self, x: &BigRational) -> Option<usize> {
        self.branches.iter().position(|br| {
            *x >= rational(br.interval[0]) && *x <= rational(br.interval[1])
        })
    }

    /// Exact branch lookup with a 1e-12 snapping grace: inputs rounded to
    /// floating point can land a few ulps outside a branch, and are clamped
    /// onto its nearest endpoint. Genuine gap points stay errors.
    fn branch_snapped_exact(&self, x: &BigRational) -> Option<(usize, Option<BigRational>)> {
        if let Some(b) = self.branch_containing_exact(x) {
            return Some((b, None));
        }
        let tol = rational(1e-12);
        self.branches.iter().position(|br| {
            *x >= rational(br.interval[0]) - &tol && *x <= rational(br.interval[1]) + &tol
        }).map(|b| {
            let lo = rational(self.branches[b].interval[0]);
            let hi = rational(self.branches[b].interval[1]);
            let clamped = if *x < lo { lo } else { hi };
            (b, Some(clamped))
        })
    }

    /// Address of the point x, as far as `digits` symbols.
    ///
    /// For all-linear maps the orbit is followed in exact rational arithmetic
    /// and eventual periodicity is detected, so rational points get their
    /// exact periodic address. Otherwise a plain floating-point orbit yields a
    /// finite prefix.
    pub fn encode_point(&self, x: f64, digits: usize) -> Result<SymbolicPoint> {
        if self.all_linear {
            let r = BigRational::from_float(x)
                .ok_or(Error::NotInRepeller { step: 0, value: x })?;
            self.encode_rational(&r, digits)
        } else {
            self.encode_float(x, digits)
        }
    }

    /// Like [`MarkovIntervalMap::encode_point`] but with an exact rational
    /// input, so points like 1/3 (not representable in floating point) encode
    /// exactly on all-linear maps.
    pub fn encode_rational(&self, x: &BigRational, digits: usize) -> Result<SymbolicPoint> {
        if !self.all_linear {
            return self.encode_float(x.to_f64().unwrap_or(f64::NAN), digits);
        }
        // Orbits of rationals under linear-rational branches revisit a value
        // whenever denominators stay bounded; cap the search and fall back to
        // a plain prefix otherwise.
        let cap = digits.max(256);
        let mut seen: HashMap<BigRational, usize> = HashMap::new();
        let mut syms: Vec<u8> = Vec::with_capacity(cap);
        let mut x = x.clone();
        for step in 0..cap {
            let b = match self.branch_snapped_exact(&x) {
                Some((b, snapped)) => {
                    if let Some(s) = snapped {
                        x = s;
                    }
                    b
                }
                // Escaping after the requested digits is fine (the extra
                // steps were only a periodicity probe); before it, the point
                // really is outside the repeller.
                None if step >= digits => {
                    return Ok(SymbolicPoint::aperiodic_prefix(Word::new(
                        syms[..digits].to_vec(),
                    )));
                }
                None => {
                    return Err(Error::NotInRepeller {
                        step,
                        value: x.to_f64().unwrap_or(f64::NAN),
                    });
                }
            };
            if let Some(&first) = seen.get(&x) {
                let preperiod = Word::new(syms[..first].to_vec());
                let block = Word::new(syms[first..].to_vec());
                return SymbolicPoint::eventually_periodic(preperiod, block);
            }
            seen.insert(x.clone(), step);
            syms.push(b as u8);
            x = self.branches[b].apply_exact(&x);
        }
        Ok(SymbolicPoint::aperiodic_prefix(Word::new(syms[..digits].to_vec())))
    }

    fn encode_float(&self, x: f64, digits: usize) -> Result<SymbolicPoint> {
        let mut x = x;
        let mut syms = Vec::with_capacity(digits);
        for step in 0..digits {
            let b = self
                .branch_containing(x, 1e-12)
                .ok_or(Error::NotInRepeller { step, value: x })?;
            let br = &self.branches[b];
            syms.push(b as u8);
            x = br.apply(x.clamp(br.interval[0], br.interval[1]));
        }
        Ok(SymbolicPoint::aperiodic_prefix(Word::new(syms)))
    }

    /// Inner and outer cylinder approximations of the ball B(z, epsilon).
    ///
    /// The refinement depth is raised until (a) every cylinder meeting the
    /// sphere {z - eps, z + eps} is shorter than eta * epsilon and (b) the
    /// achieved measure slack (mu(outer) - mu(inner))/mu(outer) under the
    /// Gibbs measure of `phi` is at most eta.
    pub fn ball_to_cylinders(
        &self,
        phi: &Potential,
        z: f64,
        epsilon: f64,
        eta: f64,
    ) -> Result<BallApproximation> {
        let data = leading_eigentriple(&build_transfer_matrix(
            &self.shift,
            phi,
            phi.depth().max(2),
        )?)?;
        self.ball_cover(&data, phi, z, epsilon, eta, 1, None)
    }

    /// Shared worker for [`MarkovIntervalMap::ball_to_cylinders`] and
    /// [`ball_family`]: refinement starts at `start_depth` and the inner set
    /// may be forced inside a previously computed inner union.
    #[allow(clippy::too_many_arguments)]
    fn ball_cover(
        &self,
        data: &SpectralData,
        phi: &Potential,
        z: f64,
        epsilon: f64,
        eta: f64,
        start_depth: usize,
        nested_within: Option<(usize, &HashSet<Vec<u8>>)>,
    ) -> Result<BallApproximation> {
        if !(epsilon > 0.0) || !eta.is_finite() || eta < 0.0 {
            return Err(Error::Config(format!(
                "ball approximation needs epsilon > 0 and eta >= 0, got {epsilon}, {eta}"
            )));
        }
        if self.branch_containing(z, 1e-12).is_none() {
            return Err(Error::NotInRepeller { step: 0, value: z });
        }
        let (ball_lo, ball_hi) = (z - epsilon, z + epsilon);
        let mut best_eta = f64::INFINITY;
        let mut frontier: Vec<(Word, (f64, f64))> = Vec::new();
        for depth in 1..=params::BALL_DEPTH_CAP {
            let candidates: Vec<Word> = if depth == 1 {
                (0..self.branches.len() as u8).map(|s| Word::new(vec![s])).collect()
            } else {
                frontier
                    .iter()
                    .flat_map(|(w, _)| {
                        let last = w.symbols()[w.len() - 1];
                        self.shift
                            .successors(last)
                            .map(|s| w.concat(&Word::new(vec![s])))
                            .collect::<Vec<_>>()
                    })
                    .collect()
            };
            frontier = candidates
                .into_iter()
                .map(|w| {
                    let iv = self.cylinder_interval(&w)?;
                    Ok((w, iv))
                })
                .collect::<Result<Vec<_>>>()?;
            frontier.retain(|(_, (lo, hi))| *hi >= ball_lo && *lo <= ball_hi);
            if frontier.len() > params::BALL_WORD_CAP {
                return Err(Error::DepthCapExceeded { depth, best_eta });
            }
            if depth < start_depth {
                continue;
            }

            let boundary_ok = frontier.iter().all(|(_, (lo, hi))| {
                let meets_sphere = (*lo <= ball_lo && ball_lo <= *hi)
                    || (*lo <= ball_hi && ball_hi <= *hi);
                !meets_sphere || (hi - lo) < eta * epsilon
            });
            let inner: Vec<&(Word, (f64, f64))> = frontier
                .iter()
                .filter(|(w, (lo, hi))| {
                    *lo >= ball_lo
                        && *hi <= ball_hi
                        && nested_within.is_none_or(|(d, set)| set.contains(&w.symbols()[..d]))
                })
                .collect();
            let mut mu_outer = 0.0;
            for (w, _) in &frontier {
                mu_outer += data.word_measure(phi, w.symbols())?;
            }
            let mut mu_inner = 0.0;
            for (w, _) in &inner {
                mu_inner += data.word_measure(phi, w.symbols())?;
            }
            let slack = (mu_outer - mu_inner) / mu_outer;
            best_eta = best_eta.min(slack);
            if boundary_ok && slack <= eta {
                return Ok(BallApproximation {
                    epsilon,
                    depth,
                    inner: inner.iter().map(|(w, _)| w.clone()).collect(),
                    outer: frontier.iter().map(|(w, _)| w.clone()).collect(),
                    eta: slack,
                    mu_inner,
                    mu_outer,
                });
            }
        }
        Err(Error::DepthCapExceeded {
            depth: params::BALL_DEPTH_CAP,
            best_eta,
        })
    }

    /// Locally constant sampling of -t log|f'| at cylinder left endpoints,
    /// with the worst variation of log|f'| across a cylinder as diagnostic.
    pub fn log_deriv_potential(&self, t: f64, depth: usize) -> Result<SampledPotential> {
        let basis = self.shift.enumerate_cylinders(depth)?;
        let mut values = BTreeMap::new();
        let mut oscillation = 0f64;
        for w in basis.words() {
            let (lo, hi) = self.cylinder_interval(w)?;
            let br = &self.branches[w.symbols()[0] as usize];
            values.insert(w.clone(), -t * br.deriv(lo).abs().ln());
            if !br.is_linear() {
                let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
                for s in 0..=16 {
                    let x = lo + (hi - lo) * s as f64 / 16.0;
                    let v = br.deriv(x).abs().ln();
                    min = min.min(v);
                    max = max.max(v);
                }
                oscillation = oscillation.max(max - min);
            }
        }
        Ok(SampledPotential {
            potential: Potential::new(depth, values, None)?,
            oscillation,
        })
    }
}

/// A depth-k potential sampled from branch derivatives, plus the sampling
/// error indicator.
#[derive(Debug, Clone)]
pub struct SampledPotential {
    pub potential: Potential,
    /// Max over depth-k cylinders of the variation of log|f'| over the
    /// cylinder interval; exactly 0 for piecewise-linear maps.
    pub oscillation: f64,
}

/// Cylinder sandwich of a metric ball: union(inner) <= B(z, eps) <= union(outer).
#[derive(Debug, Clone, Serialize)]
pub struct BallApproximation {
    pub epsilon: f64,
    /// Common word length of the inner and outer cylinders.
    pub depth: usize,
    pub inner: Vec<Word>,
    pub outer: Vec<Word>,
    /// Achieved measure slack (mu(outer) - mu(inner)) / mu(outer).
    pub eta: f64,
    pub mu_inner: f64,
    pub mu_outer: f64,
}

/// Inner and outer hole families for a decreasing sequence of ball radii
/// around a common center.
///
/// The outer family is nested automatically (depths never decrease, and a
/// cylinder meeting a smaller ball meets the larger one); the inner family is
/// forced nested by intersecting each inner union with the refinement of the
/// previous one, which can only increase the reported slack.
#[derive(Debug, Clone)]
pub struct BallFamily {
    pub center: SymbolicPoint,
    pub approximations: Vec<BallApproximation>,
    pub inner: HoleFamily,
    pub outer: HoleFamily,
}

/// Build nested inner/outer cylinder families for balls B(z, eps_n).
pub fn ball_family(
    map: &MarkovIntervalMap,
    phi: &Potential,
    z: f64,
    epsilons: &[f64],
    eta: f64,
) -> Result<BallFamily> {
    if epsilons.is_empty() {
        return Err(Error::Config("ball family needs at least one radius".into()));
    }
    for pair in epsilons.windows(2) {
        if !(pair[1] < pair[0]) {
            return Err(Error::Config(format!(
                "ball radii must be strictly decreasing, got {} after {}",
                pair[1], pair[0]
            )));
        }
    }
    let shift = map.subshift();
    let data = leading_eigentriple(&build_transfer_matrix(shift, phi, phi.depth().max(2))?)?;
    let mut approximations: Vec<BallApproximation> = Vec::with_capacity(epsilons.len());
    let mut prev_inner: Option<(usize, HashSet<Vec<u8>>)> = None;
    let mut start_depth = 1;
    for &eps in epsilons {
        let approx = map.ball_cover(
            &data,
            phi,
            z,
            eps,
            eta,
            start_depth,
            prev_inner.as_ref().map(|(d, set)| (*d, set)),
        )?;
        start_depth = approx.depth;
        prev_inner = Some((
            approx.depth,
            approx.inner.iter().map(|w| w.symbols().to_vec()).collect(),
        ));
        approximations.push(approx);
    }
    let max_depth = approximations.last().unwrap().depth;
    let center = map.encode_point(z, max_depth)?;
    let inner = HoleFamily::from_parts(
        shift,
        center.clone(),
        approximations
            .iter()
            .map(|a| Hole::new(a.depth, a.inner.clone()))
            .collect::<Result<_>>()?,
    )?;
    let outer = HoleFamily::from_parts(
        shift,
        center.clone(),
        approximations
            .iter()
            .map(|a| Hole::new(a.depth, a.outer.clone()))
            .collect::<Result<_>>()?,
    )?;
    Ok(BallFamily {
        center,
        approximations,
        inner,
        outer,
    })
}

/// Multiply-by-3 map on [0, 1/3] and [2/3, 1]; the repeller is the
/// middle-thirds Cantor set.
pub fn cantor_middle_thirds() -> MarkovIntervalMap {
    MarkovIntervalMap::new(vec![
        Branch::linear(0.0, 1.0 / 3.0, 3.0, 0.0),
        Branch::linear(2.0 / 3.0, 1.0, 3.0, -2.0),
    ])
    .expect("valid map")
}

/// Doubling map with full branches on [0, 1/2] and [1/2, 1]; the repeller is
/// the whole interval.
pub fn doubling_map() -> MarkovIntervalMap {
    MarkovIntervalMap::new(vec![
        Branch::linear(0.0, 0.5, 2.0, 0.0),
        Branch::linear(0.5, 1.0, 2.0, -1.0),
    ])
    .expect("valid map")
}

/// Expanding map with one cubic branch 2x^3 + 1.5x on [0, 1/2] and a linear
/// branch on [1/2, 1]; used to exercise nonconstant derivatives.
pub fn cubic_toy_map() -> MarkovIntervalMap {
    MarkovIntervalMap::new(vec![
        Branch::poly(0.0, 0.5, vec![0.0, 1.5, 0.0, 2.0]),
        Branch::linear(0.5, 1.0, 2.0, -1.0),
    ])
    .expect("valid map")
}
