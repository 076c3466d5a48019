//! Thermodynamic formalism on subshifts: locally constant potentials, the
//! transfer operator restricted to cylinder functions, its leading
//! eigentriple, and the induced Gibbs weights on cylinders.
//!
//! A depth-k potential is constant on k-cylinders. The transfer operator
//! acting on functions constant on n-cylinders (n >= k) is the sparse matrix
//! with entry e^{phi(c')} at (c, c') when c' = a . prefix(c, n-1) is
//! admissible, i.e. when c' -> c is an edge of the de Bruijn graph on
//! admissible n-words. All entries in a column are equal, so the matrix is
//! stored as one weight per column plus the edge structure.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{self, GraphClass};
use crate::symbolic::{CylinderBasis, Subshift, SymbolicPoint, Word};

/// A potential that is constant on cylinders of length `depth`.
///
/// Admissible words without an explicit value fall back to `default`;
/// operators fail with `MissingPotentialValue` if neither exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    depth: usize,
    values: BTreeMap<Word, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    default: Option<f64>,
}

impl Potential {
    pub fn new(depth: usize, values: BTreeMap<Word, f64>, default: Option<f64>) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Config("potential depth must be at least 1".into()));
        }
        for w in values.keys() {
            if w.len() != depth {
                return Err(Error::Config(format!(
                    "potential value for {w:?} has length {} but depth is {depth}",
                    w.len()
                )));
            }
        }
        Ok(Potential {
            depth,
            values,
            default,
        })
    }

    /// The constant potential phi = value at depth 1.
    pub fn constant(value: f64) -> Self {
        Potential {
            depth: 1,
            values: BTreeMap::new(),
            default: Some(value),
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Value on the cylinder of the first `depth` symbols of `symbols`.
    pub fn value(&self, symbols: &[u8]) -> Result<f64> {
        assert!(
            symbols.len() >= self.depth,
            "potential of depth {} evaluated on {} symbols",
            self.depth,
            symbols.len()
        );
        let key = &symbols[..self.depth];
        if let Some(&v) = self.values.get(key) {
            return Ok(v);
        }
        self.default.ok_or_else(|| Error::MissingPotentialValue {
            word: Word::from(key).to_string(),
        })
    }

    /// The potential `factor * phi`.
    pub fn scaled(&self, factor: f64) -> Potential {
        Potential {
            depth: self.depth,
            values: self.values.iter().map(|(w, &v)| (w.clone(), factor * v)).collect(),
            default: self.default.map(|v| factor * v),
        }
    }

    /// The potential `phi + c`.
    pub fn shifted(&self, c: f64) -> Potential {
        Potential {
            depth: self.depth,
            values: self.values.iter().map(|(w, &v)| (w.clone(), v + c)).collect(),
            default: self.default.map(|v| v + c),
        }
    }
}

/// The transfer operator on functions constant on `depth`-cylinders, stored
/// as a column weight per state plus de Bruijn edge structure.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    basis: CylinderBasis,
    weights: Vec<f64>,
    in_edges: Vec<Vec<u32>>,
    out_edges: Vec<Vec<u32>>,
}

impl TransferMatrix {
    pub fn depth(&self) -> usize {
        self.basis.depth()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &CylinderBasis {
        &self.basis
    }

    /// Column weight e^{phi(state)}; 0 for a deleted (hole) column.
    pub fn weight(&self, state: usize) -> f64 {
        self.weights[state]
    }

    pub(crate) fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn in_edges(&self) -> &[Vec<u32>] {
        &self.in_edges
    }

    pub(crate) fn out_edges(&self) -> &[Vec<u32>] {
        &self.out_edges
    }

    /// y = M x.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, sources) in self.in_edges.iter().enumerate() {
            let mut acc = 0.0;
            for &j in sources {
                acc += self.weights[j as usize] * x[j as usize];
            }
            y[i] = acc;
        }
    }

    /// y = M^T x.
    pub fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        for (j, targets) in self.out_edges.iter().enumerate() {
            let mut acc = 0.0;
            for &i in targets {
                acc += x[i as usize];
            }
            y[j] = self.weights[j] * acc;
        }
    }

    /// Copy with the given states' columns zeroed.
    pub fn with_zeroed_columns(&self, states: impl IntoIterator<Item = usize>) -> TransferMatrix {
        let mut out = self.clone();
        for s in states {
            out.weights[s] = 0.0;
        }
        out
    }

    /// Dense copy, for small-system diagnostics and tests.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut dense = vec![vec![0.0; n]; n];
        for (i, sources) in self.in_edges.iter().enumerate() {
            for &j in sources {
                dense[i][j as usize] = self.weights[j as usize];
            }
        }
        dense
    }
}

/// Builds the transfer matrix of `phi` at cylinder depth `max(depth,
/// phi.depth())`. Every admissible state must have a potential value.
pub fn build_transfer_matrix(
    shift: &Subshift,
    phi: &Potential,
    depth: usize,
) -> Result<TransferMatrix> {
    let depth = depth.max(phi.depth());
    let basis = shift.enumerate_cylinders(depth)?;
    let n = basis.len();
    let mut weights = Vec::with_capacity(n);
    for w in basis.words() {
        weights.push(phi.value(w.symbols())?.exp());
    }
    let mut in_edges: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut out_edges: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut key = Vec::with_capacity(depth);
    for i in 0..n {
        let w = basis.word(i).symbols();
        for a in shift.predecessors(w[0]) {
            key.clear();
            key.push(a);
            key.extend_from_slice(&w[..depth - 1]);
            let j = basis
                .position(&key)
                .expect("predecessor extension of an admissible word is admissible");
            in_edges[i].push(j as u32);
            out_edges[j].push(i as u32);
        }
    }
    Ok(TransferMatrix {
        basis,
        weights,
        in_edges,
        out_edges,
    })
}

/// Leading eigendata of a transfer matrix with primitive digraph.
///
/// `left` holds the eigenmeasure weights of the cylinders (sums to 1),
/// `right` the eigenfunction values (scaled so that sum(left * right) = 1),
/// and `gibbs = left * right` the invariant Gibbs weights.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub depth: usize,
    pub lambda: f64,
    /// log(lambda).
    pub pressure: f64,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    pub gibbs: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    basis: CylinderBasis,
}

impl SpectralData {
    pub fn basis(&self) -> &CylinderBasis {
        &self.basis
    }

    /// Gibbs weight of the state with the given symbols, if admissible.
    pub fn gibbs_of(&self, symbols: &[u8]) -> Option<f64> {
        self.basis.position(symbols).map(|i| self.gibbs[i])
    }

    /// Invariant measure of the cylinder of any word, at any length.
    ///
    /// For words at least as long as the matrix depth this is the exact
    /// refinement formula mu[w] = g(w) * prod_j e^{phi(sigma^j w)}/lambda *
    /// nu[suffix]; shorter words are marginals over the basis.
    pub fn word_measure(&self, phi: &Potential, symbols: &[u8]) -> Result<f64> {
        let m = self.depth;
        let n = symbols.len();
        if n == 0 {
            return Ok(1.0);
        }
        if n < m {
            let mut acc = 0.0;
            for (i, w) in self.basis.words().iter().enumerate() {
                if &w.symbols()[..n] == symbols {
                    acc += self.gibbs[i];
                }
            }
            return Ok(acc);
        }
        let head = match self.basis.position(&symbols[..m]) {
            Some(i) => i,
            None => return Ok(0.0),
        };
        let tail = match self.basis.position(&symbols[n - m..]) {
            Some(i) => i,
            None => return Ok(0.0),
        };
        let mut acc = self.right[head];
        for j in 0..n - m {
            // Inadmissible interior transitions would have failed the
            // position() lookups only at the ends; check the window itself.
            acc *= phi.value(&symbols[j..])?.exp() / self.lambda;
        }
        // A word with an inadmissible junction has measure zero; detect it by
        // scanning the transitions once rather than trusting the product.
        for w in symbols.windows(2) {
            if !self.transition_ok(w[0], w[1]) {
                return Ok(0.0);
            }
        }
        Ok(acc * self.left[tail])
    }

    fn transition_ok(&self, a: u8, b: u8) -> bool {
        // The basis only contains admissible words; a pair is admissible iff
        // some basis word contains it. Cheaper: look the pair up through the
        // index at depth >= 2, else fall back to scanning depth-1 structure.
        if self.depth >= 2 {
            // Any admissible word of the basis starting with `a b` witnesses
            // admissibility; absence of every extension means forbidden.
            self.pair_witness(a, b)
        } else {
            true
        }
    }

    fn pair_witness(&self, a: u8, b: u8) -> bool {
        for w in self.basis.words() {
            let s = w.symbols();
            if s[0] == a && s[1] == b {
                return true;
            }
            if s[0] > a {
                break;
            }
        }
        false
    }

    /// Total Gibbs weight of the states whose prefix lies in `prefixes`.
    pub fn measure_of_prefixes(&self, prefixes: &[Word]) -> f64 {
        if prefixes.is_empty() {
            return 0.0;
        }
        let set: std::collections::HashSet<&[u8]> =
            prefixes.iter().map(|w| w.symbols()).collect();
        let plen = prefixes[0].len();
        self.basis
            .words()
            .iter()
            .enumerate()
            .filter(|(_, w)| set.contains(&w.symbols()[..plen.min(w.len())]))
            .map(|(i, _)| self.gibbs[i])
            .sum()
    }
}

/// Power iteration on M and M^T, with joint normalization.
///
/// Fails with `NotMixing` when the digraph of the matrix (after any column
/// deletions) is not primitive, and `NoConvergence` past the iteration cap.
pub fn leading_eigentriple(matrix: &TransferMatrix) -> Result<SpectralData> {
    match spectral::classify_matrix(matrix.weights(), matrix.in_edges()) {
        GraphClass::Primitive => {}
        GraphClass::Empty => {
            return Err(Error::NotMixing("no states with positive weight".into()))
        }
        GraphClass::NotStronglyConnected { components } => {
            return Err(Error::NotMixing(format!(
                "digraph is not strongly connected ({components} components)"
            )))
        }
        GraphClass::Periodic { period } => {
            return Err(Error::NotMixing(format!("digraph has period {period}")))
        }
    }
    let n = matrix.dim();
    let fwd = spectral::power_iteration(n, |x, y| matrix.apply(x, y))?;
    let bwd = spectral::power_iteration(n, |x, y| matrix.apply_transpose(x, y))?;
    let lambda = fwd.lambda;
    let mut left = bwd.vector;
    let lsum: f64 = left.iter().sum();
    for v in &mut left {
        *v /= lsum;
    }
    let mut right = fwd.vector;
    let cross: f64 = left.iter().zip(&right).map(|(&l, &r)| l * r).sum();
    for v in &mut right {
        *v /= cross;
    }
    let mut gibbs: Vec<f64> = left.iter().zip(&right).map(|(&l, &r)| l * r).collect();
    let gsum: f64 = gibbs.iter().sum();
    for v in &mut gibbs {
        *v /= gsum;
    }
    Ok(SpectralData {
        depth: matrix.depth(),
        lambda,
        pressure: lambda.ln(),
        right,
        left,
        gibbs,
        iterations: fwd.iterations + bwd.iterations,
        residual: fwd.residual.max(bwd.residual).max((fwd.lambda - bwd.lambda).abs() / lambda),
        basis: matrix.basis().clone(),
    })
}

/// Topological pressure P(phi) = log lambda, computed at the potential's own
/// depth.
pub fn pressure(shift: &Subshift, phi: &Potential) -> Result<f64> {
    let m = build_transfer_matrix(shift, phi, phi.depth())?;
    Ok(leading_eigentriple(&m)?.pressure)
}

/// Gibbs weights of all admissible `depth`-cylinders.
#[derive(Debug, Clone)]
pub struct GibbsWeights {
    basis: CylinderBasis,
    mu: Vec<f64>,
}

impl GibbsWeights {
    pub fn basis(&self) -> &CylinderBasis {
        &self.basis
    }

    pub fn weights(&self) -> &[f64] {
        &self.mu
    }

    pub fn get(&self, word: &Word) -> Option<f64> {
        self.basis.position(word.symbols()).map(|i| self.mu[i])
    }

    /// Total weight of the cylinders whose word lies in `words` (all of the
    /// basis depth or shorter, interpreted as prefixes).
    pub fn measure_of(&self, words: &[Word]) -> f64 {
        if words.is_empty() {
            return 0.0;
        }
        let plen = words[0].len();
        if plen == self.basis.depth() {
            return words.iter().filter_map(|w| self.get(w)).sum();
        }
        let set: std::collections::HashSet<&[u8]> = words.iter().map(|w| w.symbols()).collect();
        self.basis
            .words()
            .iter()
            .enumerate()
            .filter(|(_, w)| set.contains(&w.symbols()[..plen.min(w.len())]))
            .map(|(i, _)| self.mu[i])
            .sum()
    }
}

/// Gibbs weights of `depth`-cylinders, computed from the eigentriple at depth
/// `max(depth, phi.depth())` and marginalized down when the potential is
/// deeper than requested.
pub fn gibbs_measure(shift: &Subshift, phi: &Potential, depth: usize) -> Result<GibbsWeights> {
    let m = depth.max(phi.depth());
    let matrix = build_transfer_matrix(shift, phi, m)?;
    let spectral = leading_eigentriple(&matrix)?;
    if m == depth {
        return Ok(GibbsWeights {
            basis: matrix.basis().clone(),
            mu: spectral.gibbs,
        });
    }
    let basis = shift.enumerate_cylinders(depth)?;
    let mut mu = vec![0.0; basis.len()];
    for (i, w) in spectral.basis().words().iter().enumerate() {
        let idx = basis
            .position(&w.symbols()[..depth])
            .expect("prefix of an admissible word is admissible");
        mu[idx] += spectral.gibbs[i];
    }
    Ok(GibbsWeights { basis, mu })
}

/// Birkhoff sum phi(z) + phi(sigma z) + ... + phi(sigma^{p-1} z).
pub fn birkhoff_sum(phi: &Potential, z: &SymbolicPoint, p: usize) -> Result<f64> {
    let need = p + phi.depth() - 1;
    let w = z.prefix(need.max(phi.depth()))?;
    let s = w.symbols();
    let mut acc = 0.0;
    for j in 0..p {
        acc += phi.value(&s[j..])?;
    }
    Ok(acc)
}

/// Empirical Gibbs constant: the smallest c with c^{-1} <= mu[w] /
/// e^{phi^n(x_w) - nP} <= c over all cylinders of depth <= `n_max`, where
/// x_w is the lexicographically least point of [w].
#[derive(Debug, Clone)]
pub struct GibbsCheck {
    /// Smallest admissible constant per depth 1..=n_max.
    pub per_depth: Vec<f64>,
    /// Overall constant (max over depths).
    pub constant: f64,
    pub pressure: f64,
}

pub fn gibbs_constant_check(shift: &Subshift, phi: &Potential, n_max: usize) -> Result<GibbsCheck> {
    if n_max == 0 {
        return Err(Error::Config("gibbs check needs n_max >= 1".into()));
    }
    let k = phi.depth();
    let matrix = build_transfer_matrix(shift, phi, n_max.max(k))?;
    let spectral = leading_eigentriple(&matrix)?;
    let pressure = spectral.pressure;
    let mut per_depth = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let basis = shift.enumerate_cylinders(n)?;
        let mut worst = 1.0f64;
        for w in basis.words() {
            let mu = spectral.word_measure(phi, w.symbols())?;
            let x = shift.lex_min_extension(w, n + k - 1)?;
            let s = x.symbols();
            let mut birkhoff = 0.0;
            for j in 0..n {
                birkhoff += phi.value(&s[j..])?;
            }
            let ratio = mu / (birkhoff - n as f64 * pressure).exp();
            worst = worst.max(ratio).max(1.0 / ratio);
        }
        per_depth.push(worst);
    }
    Ok(GibbsCheck {
        constant: per_depth.iter().fold(1.0f64, |a, &b| a.max(b)),
        per_depth,
        pressure,
    })
}

/// The normalized potential phi~ = phi + log g - log g(sigma .) - P(phi),
/// expressed at depth max(phi.depth(), 2). Its transfer operator fixes the
/// constant function 1, so its pressure is 0; used as a consistency check
/// and for working in the lambda = 1 normalization.
pub fn normalized_potential(shift: &Subshift, phi: &Potential) -> Result<Potential> {
    let depth = phi.depth().max(2);
    let matrix = build_transfer_matrix(shift, phi, depth)?;
    let spectral = leading_eigentriple(&matrix)?;
    let basis = matrix.basis();
    let mut values = BTreeMap::new();
    for (i, w) in basis.words().iter().enumerate() {
        let s = w.symbols();
        // g(sigma x) depends only on the first depth-1 symbols of sigma x;
        // any admissible extension of them reads the same eigenfunction value.
        let shifted = Word::from(&s[1..]);
        let ext = shift.lex_min_extension(&shifted, depth)?;
        let j = basis
            .position(ext.symbols())
            .expect("extension stays admissible");
        let v = phi.value(s)? + spectral.right[i].ln() - spectral.right[j].ln()
            - spectral.pressure;
        values.insert(w.clone(), v);
    }
    Potential::new(depth, values, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::dense_radius_by_squaring;
    use proptest::prelude::*;

    fn golden_mean() -> Subshift {
        Subshift::new(vec![vec![1, 1], vec![1, 0]]).unwrap()
    }

    fn word(s: &str) -> Word {
        s.parse().unwrap()
    }

    /// phi(0) = -log 2, phi(1) = -log 4 on the full 2-shift.
    fn asym_potential() -> Potential {
        let mut values = BTreeMap::new();
        values.insert(word("0"), -(2.0f64.ln()));
        values.insert(word("1"), -(4.0f64.ln()));
        Potential::new(1, values, None).unwrap()
    }

    #[test]
    fn constant_potential_full_shift_matrix() {
        let s = Subshift::full_shift(2);
        let phi = Potential::constant(-(2.0f64.ln()));
        let m = build_transfer_matrix(&s, &phi, 1).unwrap();
        let dense = m.to_dense();
        for row in &dense {
            for &e in row {
                assert!((e - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn asymmetric_matrix_entries() {
        let s = Subshift::full_shift(2);
        let m = build_transfer_matrix(&s, &asym_potential(), 1).unwrap();
        let dense = m.to_dense();
        assert!((dense[0][0] - 0.5).abs() < 1e-15);
        assert!((dense[0][1] - 0.25).abs() < 1e-15);
        assert!((dense[1][0] - 0.5).abs() < 1e-15);
        assert!((dense[1][1] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn golden_mean_adjacency_matrix() {
        let m = build_transfer_matrix(&golden_mean(), &Potential::constant(0.0), 1).unwrap();
        assert_eq!(m.to_dense(), vec![vec![1.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn depth_is_raised_to_potential_depth() {
        let s = Subshift::full_shift(2);
        let mut values = BTreeMap::new();
        for w in s.enumerate_cylinders(2).unwrap().words() {
            values.insert(w.clone(), 0.25 * w.symbols()[0] as f64);
        }
        let phi = Potential::new(2, values, None).unwrap();
        let m = build_transfer_matrix(&s, &phi, 1).unwrap();
        assert_eq!(m.depth(), 2);
        assert_eq!(m.dim(), 4);
    }

    #[test]
    fn golden_mean_eigenvalue_is_golden_ratio() {
        let m = build_transfer_matrix(&golden_mean(), &Potential::constant(0.0), 1).unwrap();
        let sd = leading_eigentriple(&m).unwrap();
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((sd.lambda - phi).abs() < 1e-9, "lambda {}", sd.lambda);
        assert!(sd.residual <= 1e-11);
    }

    #[test]
    fn asymmetric_eigenvalue_and_gibbs() {
        let s = Subshift::full_shift(2);
        let m = build_transfer_matrix(&s, &asym_potential(), 1).unwrap();
        let sd = leading_eigentriple(&m).unwrap();
        assert!((sd.lambda - 0.75).abs() < 1e-12);
        // Rank-one matrix: left = (2/3, 1/3), right constant.
        assert!((sd.gibbs[0] - 2.0 / 3.0).abs() < 1e-12, "mu[0] {}", sd.gibbs[0]);
        assert!((sd.gibbs[1] - 1.0 / 3.0).abs() < 1e-12);
        let lsum: f64 = sd.left.iter().sum();
        assert!((lsum - 1.0).abs() < 1e-14);
        let cross: f64 = sd.left.iter().zip(&sd.right).map(|(&l, &r)| l * r).sum();
        assert!((cross - 1.0).abs() < 1e-14);
    }

    #[test]
    fn parry_weights_on_golden_mean() {
        // Perron vectors of [[1,1],[1,0]] are (gamma, 1) on both sides, so
        // the invariant weights are ((5+sqrt5)/10, (5-sqrt5)/10).
        let mu = gibbs_measure(&golden_mean(), &Potential::constant(0.0), 1).unwrap();
        let expect0 = (5.0 + 5.0f64.sqrt()) / 10.0;
        assert!((mu.get(&word("0")).unwrap() - expect0).abs() < 1e-10);
        assert!((mu.get(&word("1")).unwrap() - (1.0 - expect0)).abs() < 1e-10);
    }

    #[test]
    fn uniform_gibbs_on_full_shift() {
        let s = Subshift::full_shift(2);
        let mu = gibbs_measure(&s, &Potential::constant(-(2.0f64.ln())), 3).unwrap();
        for w in mu.basis().words() {
            assert!((mu.get(w).unwrap() - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_oracle_agreement_on_small_systems() {
        let systems: Vec<(Subshift, Potential, usize)> = vec![
            (golden_mean(), Potential::constant(0.0), 5),
            (Subshift::full_shift(2), asym_potential(), 5),
            (
                Subshift::new(vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap(),
                Potential::constant(-0.3),
                3,
            ),
        ];
        for (s, phi, max_depth) in systems {
            for depth in 1..=max_depth {
                let m = build_transfer_matrix(&s, &phi, depth).unwrap();
                if m.dim() > 64 {
                    continue;
                }
                let sd = leading_eigentriple(&m).unwrap();
                let oracle = dense_radius_by_squaring(&m.to_dense());
                assert!(
                    (sd.lambda - oracle).abs() < 1e-10,
                    "depth {depth}: {} vs {}",
                    sd.lambda,
                    oracle
                );
            }
        }
    }

    #[test]
    fn eigenvalue_is_depth_independent() {
        let s = golden_mean();
        let phi = Potential::constant(-0.25);
        let mut lambdas = Vec::new();
        for depth in 1..=6 {
            let m = build_transfer_matrix(&s, &phi, depth).unwrap();
            lambdas.push(leading_eigentriple(&m).unwrap().lambda);
        }
        for &l in &lambdas[1..] {
            assert!((l - lambdas[0]).abs() < 1e-10);
        }
    }

    #[test]
    fn non_mixing_matrix_is_refused() {
        let swap = Subshift::new(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let m = build_transfer_matrix(&swap, &Potential::constant(0.0), 1).unwrap();
        match leading_eigentriple(&m) {
            Err(Error::NotMixing(_)) => {}
            other => panic!("expected NotMixing, got {other:?}"),
        }
    }

    #[test]
    fn missing_potential_value_is_reported() {
        let s = Subshift::full_shift(2);
        let mut values = BTreeMap::new();
        values.insert(word("0"), -0.7);
        let phi = Potential::new(1, values, None).unwrap();
        match build_transfer_matrix(&s, &phi, 1) {
            Err(Error::MissingPotentialValue { word }) => assert_eq!(word, "1"),
            other => panic!("expected MissingPotentialValue, got {other:?}"),
        }
    }

    #[test]
    fn refinement_consistency_across_depths() {
        let s = golden_mean();
        let phi = asym_potential_on(&s);
        let coarse = gibbs_measure(&s, &phi, 2).unwrap();
        let fine = gibbs_measure(&s, &phi, 4).unwrap();
        for w in coarse.basis().words() {
            let refined: f64 = s
                .refine_cylinder(w, 4)
                .unwrap()
                .iter()
                .map(|v| fine.get(v).unwrap())
                .sum();
            assert!(
                (refined - coarse.get(w).unwrap()).abs() < 1e-11,
                "cylinder {w}"
            );
        }
    }

    fn asym_potential_on(s: &Subshift) -> Potential {
        let mut values = BTreeMap::new();
        for (i, w) in s.enumerate_cylinders(1).unwrap().words().iter().enumerate() {
            values.insert(w.clone(), -0.5 - 0.3 * i as f64);
        }
        Potential::new(1, values, None).unwrap()
    }

    #[test]
    fn word_measure_is_additive_and_stationary() {
        let s = golden_mean();
        let phi = asym_potential_on(&s);
        let m = build_transfer_matrix(&s, &phi, 3).unwrap();
        let sd = leading_eigentriple(&m).unwrap();
        for w in s.enumerate_cylinders(5).unwrap().words() {
            let mu = sd.word_measure(&phi, w.symbols()).unwrap();
            // Forward additivity: children partition the cylinder.
            let children: f64 = s
                .refine_cylinder(w, 6)
                .unwrap()
                .iter()
                .map(|v| sd.word_measure(&phi, v.symbols()).unwrap())
                .sum();
            assert!((children - mu).abs() < 1e-13, "additivity at {w}");
            // Stationarity: mu(sigma^{-1}[w]) = mu[w].
            let mut preimage = 0.0;
            for a in s.predecessors(w.symbols()[0]) {
                let mut v = vec![a];
                v.extend_from_slice(w.symbols());
                preimage += sd.word_measure(&phi, &v).unwrap();
            }
            assert!((preimage - mu).abs() < 1e-13, "stationarity at {w}");
        }
    }

    #[test]
    fn birkhoff_sum_on_periodic_orbit() {
        let phi = Potential::constant(-(2.0f64.ln()));
        let z = SymbolicPoint::periodic(word("01")).unwrap();
        let sum = birkhoff_sum(&phi, &z, 2).unwrap();
        assert!((sum + 2.0 * 2.0f64.ln()).abs() < 1e-15);
        // Depth-2 potential distinguishes the two cyclic windows.
        let s = Subshift::full_shift(2);
        let mut values = BTreeMap::new();
        for w in s.enumerate_cylinders(2).unwrap().words() {
            values.insert(w.clone(), w.symbols()[0] as f64 + 10.0 * w.symbols()[1] as f64);
        }
        let phi2 = Potential::new(2, values, None).unwrap();
        // phi2(01) + phi2(10) = (0 + 10) + (1 + 0) = 11.
        assert!((birkhoff_sum(&phi2, &z, 2).unwrap() - 11.0).abs() < 1e-15);
    }

    #[test]
    fn exact_gibbs_constant_is_one_on_full_shift() {
        let s = Subshift::full_shift(2);
        let check = gibbs_constant_check(&s, &Potential::constant(-(2.0f64.ln())), 6).unwrap();
        assert!((check.constant - 1.0).abs() < 1e-10, "c = {}", check.constant);
    }

    #[test]
    fn gibbs_constant_stabilizes_on_golden_mean() {
        let check = gibbs_constant_check(&golden_mean(), &Potential::constant(0.0), 8).unwrap();
        // Extremal ratio is attained by words starting and ending in 1:
        // mu[w] gamma^n = gamma/(gamma^2+1), whose reciprocal is sqrt 5.
        assert!((check.constant - 5.0f64.sqrt()).abs() < 1e-9, "c = {}", check.constant);
        // Once every first/last symbol combination has been seen (depth 3),
        // the per-depth constants are flat.
        let tail = &check.per_depth[2..];
        for pair in tail.windows(2) {
            assert!((pair[1] - pair[0]).abs() <= 1e-10);
        }
        assert!((check.pressure - ((1.0 + 5.0f64.sqrt()) / 2.0).ln()).abs() < 1e-10);
    }

    #[test]
    fn normalized_potential_has_zero_pressure() {
        for (s, phi) in [
            (golden_mean(), Potential::constant(0.0)),
            (Subshift::full_shift(2), asym_potential()),
            (golden_mean(), asym_potential_on(&golden_mean())),
        ] {
            let tilde = normalized_potential(&s, &phi).unwrap();
            let p = pressure(&s, &tilde).unwrap();
            assert!(p.abs() < 1e-9, "pressure {p}");
            // Same Gibbs weights as the original potential.
            let mu = gibbs_measure(&s, &phi, 2).unwrap();
            let mu_tilde = gibbs_measure(&s, &tilde, 2).unwrap();
            for w in mu.basis().words() {
                assert!((mu.get(w).unwrap() - mu_tilde.get(w).unwrap()).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn potential_json_roundtrip() {
        let phi = asym_potential();
        let js = serde_json::to_string(&phi).unwrap();
        let back: Potential = serde_json::from_str(&js).unwrap();
        assert_eq!(back, phi);
        let parsed: Potential =
            serde_json::from_str(r#"{"depth":1,"values":{"0":-0.5},"default":-1.0}"#).unwrap();
        assert!((parsed.value(&[0]).unwrap() + 0.5).abs() < 1e-15);
        assert!((parsed.value(&[1]).unwrap() + 1.0).abs() < 1e-15);
    }

    fn arb_system() -> impl Strategy<Value = (Subshift, Potential)> {
        (2usize..=3)
            .prop_flat_map(|l| {
                (
                    prop::collection::vec(prop::collection::vec(0u8..=1, l), l),
                    prop::collection::vec(-1.5f64..0.5, l),
                )
            })
            .prop_filter_map("mixing subshift", |(t, vals)| {
                let s = Subshift::new(t).ok()?;
                s.is_mixing()?;
                let mut values = BTreeMap::new();
                for (i, w) in s.enumerate_cylinders(1).ok()?.words().iter().enumerate() {
                    values.insert(w.clone(), vals[i]);
                }
                let phi = Potential::new(1, values, None).ok()?;
                Some((s, phi))
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn gibbs_marginals_agree((s, phi) in arb_system(), depth in 1usize..=3) {
            let coarse = gibbs_measure(&s, &phi, depth).unwrap();
            let fine = gibbs_measure(&s, &phi, depth + 2).unwrap();
            for w in coarse.basis().words() {
                let refined: f64 = s.refine_cylinder(w, depth + 2).unwrap()
                    .iter()
                    .map(|v| fine.get(v).unwrap())
                    .sum();
                prop_assert!((refined - coarse.get(w).unwrap()).abs() < 1e-11);
            }
            let total: f64 = coarse.weights().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }

        #[test]
        fn pressure_shifts_by_constants((s, phi) in arb_system(), c in -0.5f64..0.5) {
            let p0 = pressure(&s, &phi).unwrap();
            let p1 = pressure(&s, &phi.shifted(c)).unwrap();
            prop_assert!((p1 - (p0 + c)).abs() < 1e-9);
        }
    }
}
