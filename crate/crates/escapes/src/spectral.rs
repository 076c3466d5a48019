//! Power iteration and nonnegative-matrix spectral radius helpers.
//!
//! Matrices arrive in column-weighted form: entry (i, j) is `weights[j]` when
//! the structural edge j -> i is present and 0 otherwise. Deleting a column
//! (a hole) is just zeroing its weight. The spectral radius of a reducible
//! matrix is taken per strongly connected component with a diagonal shift, so
//! periodic components cannot stall the iteration.

// kosaraju_scc is iterative; the tarjan variant recurses and overflows
// 2 MiB worker stacks on deep cylinder graphs (~16k states).
use petgraph::algo::kosaraju_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::error::{Error, Result};
use crate::params::{POWER_MAX_ITERS, POWER_TOL};

#[derive(Debug, Clone)]
pub(crate) struct PowerOutcome {
    pub lambda: f64,
    /// l1-normalized nonnegative eigenvector.
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Power iteration with l1 normalization, started from the uniform positive
/// vector. `apply` computes y = M x. Converges for primitive nonnegative M;
/// the caller is responsible for primitivity.
///
/// The l1 residual |Mx - lambda x| / lambda is the sole stopping criterion:
/// it certifies the eigenpair directly, while eigenvalue drift between
/// iterations bottoms out at the summation noise of large systems and can
/// straddle any fixed tolerance forever. The lambda sum is compensated so
/// the certificate floor stays near machine epsilon at every dimension.
/// After the tolerance is met the iteration keeps polishing while the
/// residual still improves, so small systems land on their float floor
/// rather than on POWER_TOL; downstream identities compare quantities from
/// independently solved matrices and need the extra digits.
pub(crate) fn power_iteration<F>(dim: usize, apply: F) -> Result<PowerOutcome>
where
    F: Fn(&[f64], &mut [f64]),
{
    assert!(dim > 0, "power iteration on an empty matrix");
    let mut x = vec![1.0 / dim as f64; dim];
    let mut y = vec![0.0; dim];
    let mut best: Option<PowerOutcome> = None;
    let mut stalled = 0;
    for it in 1..=POWER_MAX_ITERS {
        apply(&x, &mut y);
        let lambda = kahan_sum(y.iter().copied());
        if lambda <= 0.0 {
            // The cone collapsed: spectral radius 0 (e.g. nilpotent part only).
            return Ok(PowerOutcome {
                lambda: 0.0,
                vector: x,
                iterations: it,
                residual: 0.0,
            });
        }
        let residual = l1_residual(&y, &x, lambda);
        let inv = 1.0 / lambda;
        for (xi, &yi) in x.iter_mut().zip(&y) {
            *xi = yi * inv;
        }
        if residual <= POWER_TOL {
            let improved = best.as_ref().is_none_or(|b| residual < b.residual);
            if improved {
                best = Some(PowerOutcome {
                    lambda,
                    vector: x.clone(),
                    iterations: it,
                    residual,
                });
                stalled = 0;
            } else {
                stalled += 1;
            }
            if residual == 0.0 || stalled >= 3 {
                return Ok(best.expect("converged outcome recorded"));
            }
        }
    }
    if let Some(b) = best {
        return Ok(b);
    }
    // Final residual for the error report.
    apply(&x, &mut y);
    let lambda = kahan_sum(y.iter().copied()).max(f64::MIN_POSITIVE);
    Err(Error::NoConvergence {
        iterations: POWER_MAX_ITERS,
        residual: l1_residual(&y, &x, lambda),
    })
}

/// Compensated sequential sum; deterministic for a fixed iteration order.
fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = v - c;
        let s = sum + t;
        c = (s - sum) - t;
        sum = s;
    }
    sum
}

fn l1_residual(y: &[f64], x: &[f64], lambda: f64) -> f64 {
    kahan_sum(y.iter().zip(x).map(|(&yi, &xi)| (yi - lambda * xi).abs())) / lambda
}

/// Classification of the digraph spanned by the positive-weight columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum GraphClass {
    /// Strongly connected and aperiodic.
    Primitive,
    NotStronglyConnected { components: usize },
    Periodic { period: usize },
    Empty,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Classifies the digraph induced on `nodes` by `edges` (pairs source ->
/// target, already restricted to `nodes`).
fn classify(nodes: &[u32], edges: &[(u32, u32)]) -> GraphClass {
    if nodes.is_empty() {
        return GraphClass::Empty;
    }
    let mut local = std::collections::HashMap::with_capacity(nodes.len());
    for (li, &g) in nodes.iter().enumerate() {
        local.insert(g, li);
    }
    let n = nodes.len();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[local[&u]].push(local[&v] as u32);
    }
    let mut graph = DiGraph::<(), ()>::with_capacity(n, edges.len());
    let idx: Vec<NodeIndex> = (0..n).map(|_| graph.add_node(())).collect();
    for (u, targets) in adj.iter().enumerate() {
        for &v in targets {
            graph.add_edge(idx[u], idx[v as usize], ());
        }
    }
    let sccs = kosaraju_scc(&graph);
    if sccs.len() > 1 {
        return GraphClass::NotStronglyConnected {
            components: sccs.len(),
        };
    }
    if n == 1 && adj[0].is_empty() {
        // A single node with no self-loop has no cycles at all.
        return GraphClass::NotStronglyConnected { components: 1 };
    }
    // Aperiodicity: gcd over all edges of |dist(u) + 1 - dist(v)| with BFS
    // distances from any root equals the period of a strongly connected graph.
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    dist[0] = 0;
    queue.push_back(0usize);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v as usize] == usize::MAX {
                dist[v as usize] = dist[u] + 1;
                queue.push_back(v as usize);
            }
        }
    }
    let mut g = 0usize;
    for (u, targets) in adj.iter().enumerate() {
        for &v in targets {
            let diff = (dist[u] as i64 + 1 - dist[v as usize] as i64).unsigned_abs() as usize;
            g = gcd(g, diff);
        }
    }
    if g == 1 {
        GraphClass::Primitive
    } else {
        GraphClass::Periodic { period: g }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct RadiusOutcome {
    pub radius: f64,
    /// True when the positive-weight survivor graph is primitive.
    pub mixing: bool,
    /// Strongly connected components of the survivor graph that contain a
    /// cycle (components without cycles contribute radius 0).
    pub cyclic_components: usize,
    /// True when no positive-weight cycle remains at all.
    pub empty: bool,
    pub iterations: usize,
    pub residual: f64,
}

/// Spectral radius of the column-weighted matrix, valid for reducible
/// structures. Each strongly connected component is handled by shifted power
/// iteration: M_c + sI is primitive for irreducible M_c, and its radius is
/// radius(M_c) + s.
pub(crate) fn spectral_radius(weights: &[f64], in_edges: &[Vec<u32>]) -> Result<RadiusOutcome> {
    let n = weights.len();
    let alive: Vec<u32> = (0..n as u32).filter(|&j| weights[j as usize] > 0.0).collect();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for (i, sources) in in_edges.iter().enumerate() {
        if weights[i] <= 0.0 {
            continue;
        }
        for &j in sources {
            if weights[j as usize] > 0.0 {
                edges.push((j, i as u32));
            }
        }
    }
    let class = classify(&alive, &edges);
    let mixing = class == GraphClass::Primitive;
    if alive.is_empty() {
        return Ok(RadiusOutcome {
            radius: 0.0,
            mixing: false,
            cyclic_components: 0,
            empty: true,
            iterations: 0,
            residual: 0.0,
        });
    }

    // Strongly connected components of the survivor graph.
    let mut local = std::collections::HashMap::with_capacity(alive.len());
    for (li, &g) in alive.iter().enumerate() {
        local.insert(g, li);
    }
    let mut graph = DiGraph::<(), ()>::with_capacity(alive.len(), edges.len());
    let idx: Vec<NodeIndex> = (0..alive.len()).map(|_| graph.add_node(())).collect();
    for &(u, v) in &edges {
        graph.add_edge(idx[local[&u]], idx[local[&v]], ());
    }
    let sccs = kosaraju_scc(&graph);

    let mut radius: f64 = 0.0;
    let mut cyclic = 0usize;
    let mut iterations = 0usize;
    let mut residual: f64 = 0.0;
    for scc in &sccs {
        let members: Vec<u32> = scc.iter().map(|ni| alive[ni.index()]).collect();
        let member_set: std::collections::HashSet<u32> = members.iter().copied().collect();
        if members.len() == 1 {
            let j = members[0];
            let has_loop = in_edges[j as usize].contains(&j);
            if has_loop {
                cyclic += 1;
                radius = radius.max(weights[j as usize]);
            }
            continue;
        }
        cyclic += 1;
        // Shifted power iteration on the component.
        let mut comp_index = std::collections::HashMap::with_capacity(members.len());
        for (li, &g) in members.iter().enumerate() {
            comp_index.insert(g, li);
        }
        let comp_in: Vec<Vec<(u32, f64)>> = members
            .iter()
            .map(|&gi| {
                in_edges[gi as usize]
                    .iter()
                    .filter(|j| member_set.contains(j))
                    .map(|&j| (comp_index[&j] as u32, weights[j as usize]))
                    .collect()
            })
            .collect();
        let shift = members
            .iter()
            .map(|&g| weights[g as usize])
            .fold(0.0f64, f64::max);
        let outcome = power_iteration(members.len(), |x, y| {
            for (i, sources) in comp_in.iter().enumerate() {
                let mut acc = shift * x[i];
                for &(j, w) in sources {
                    acc += w * x[j as usize];
                }
                y[i] = acc;
            }
        })?;
        iterations += outcome.iterations;
        residual = residual.max(outcome.residual);
        radius = radius.max(outcome.lambda - shift);
    }
    Ok(RadiusOutcome {
        radius,
        mixing,
        cyclic_components: cyclic,
        empty: cyclic == 0,
        iterations,
        residual,
    })
}

/// Classifies the full digraph of the column-weighted matrix (positive-weight
/// columns only), for callers that must refuse non-primitive structures.
pub(crate) fn classify_matrix(weights: &[f64], in_edges: &[Vec<u32>]) -> GraphClass {
    let n = weights.len();
    let alive: Vec<u32> = (0..n as u32).filter(|&j| weights[j as usize] > 0.0).collect();
    if alive.len() < n {
        // Zero-weight columns are outside every cycle, so the matrix as a
        // whole cannot be irreducible.
        return GraphClass::NotStronglyConnected {
            components: n - alive.len() + 1,
        };
    }
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for (i, sources) in in_edges.iter().enumerate() {
        for &j in sources {
            if weights[j as usize] > 0.0 {
                edges.push((j, i as u32));
            }
        }
    }
    classify(&alive, &edges)
}

/// Spectral radius by normalized repeated squaring of a dense matrix:
/// log rho = sum 2^{-k} log ||A_k|| with A_{k+1} = (A_k/||A_k||)^2 (the sum
/// telescopes against Gelfand's formula). Independent of power iteration;
/// used as a test oracle.
#[cfg(test)]
pub(crate) fn dense_radius_by_squaring(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut log_rho = 0.0f64;
    for k in 0..60 {
        let norm = m
            .iter()
            .map(|row| row.iter().map(|e| e.abs()).sum::<f64>())
            .fold(0.0f64, f64::max);
        if norm == 0.0 {
            return 0.0;
        }
        log_rho += norm.ln() / 2f64.powi(k);
        let mut sq = vec![vec![0.0; n]; n];
        for i in 0..n {
            for l in 0..n {
                let v = m[i][l] / norm;
                if v != 0.0 {
                    for j in 0..n {
                        sq[i][j] += v * m[l][j] / norm;
                    }
                }
            }
        }
        m = sq;
    }
    log_rho.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_dense(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<u32>>) {
        // Only column-constant dense matrices can be represented; assert it.
        let n = a.len();
        let mut weights = vec![0.0; n];
        let mut in_edges = vec![Vec::new(); n];
        for j in 0..n {
            let mut w = 0.0;
            for i in 0..n {
                if a[i][j] != 0.0 {
                    assert!(w == 0.0 || w == a[i][j], "column {j} not constant");
                    w = a[i][j];
                    in_edges[i].push(j as u32);
                }
            }
            weights[j] = w;
        }
        (weights, in_edges)
    }

    #[test]
    fn golden_mean_radius_is_golden_ratio() {
        let dense = vec![vec![1.0, 1.0], vec![1.0, 0.0]];
        let (w, ie) = from_dense(&dense);
        let out = spectral_radius(&w, &ie).unwrap();
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!(out.mixing);
        assert!((out.radius - phi).abs() < 1e-10, "radius {}", out.radius);
        assert!((dense_radius_by_squaring(&dense) - phi).abs() < 1e-10);
    }

    #[test]
    fn rank_one_matrix_radius() {
        let dense = vec![vec![0.5, 0.25], vec![0.5, 0.25]];
        let (w, ie) = from_dense(&dense);
        let out = spectral_radius(&w, &ie).unwrap();
        assert!((out.radius - 0.75).abs() < 1e-12);
        assert!((dense_radius_by_squaring(&dense) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn periodic_cycle_is_flagged_but_radius_converges() {
        // Pure 2-cycle with weights 2 and 8: radius 4, period 2.
        let dense = vec![vec![0.0, 8.0], vec![2.0, 0.0]];
        let (w, ie) = from_dense(&dense);
        assert_eq!(classify_matrix(&w, &ie), GraphClass::Periodic { period: 2 });
        let out = spectral_radius(&w, &ie).unwrap();
        assert!(!out.mixing);
        assert!((out.radius - 4.0).abs() < 1e-10, "radius {}", out.radius);
        assert!((dense_radius_by_squaring(&dense) - 4.0).abs() < 1e-10);
    }

    #[test]
    fn reducible_takes_max_over_components() {
        // Two self-loops 0.3 and 0.7 joined by a one-way edge.
        let dense = vec![vec![0.3, 0.0], vec![0.3, 0.7]];
        let (w, ie) = from_dense(&dense);
        let out = spectral_radius(&w, &ie).unwrap();
        assert!(!out.mixing);
        assert_eq!(out.cyclic_components, 2);
        assert!((out.radius - 0.7).abs() < 1e-12);
    }

    #[test]
    fn deleted_columns_leave_empty_graph() {
        let (mut w, ie) = from_dense(&vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        w[0] = 0.0;
        let out = spectral_radius(&w, &ie).unwrap();
        assert!((out.radius - 0.5).abs() < 1e-12);
        w[1] = 0.0;
        let out = spectral_radius(&w, &ie).unwrap();
        assert!(out.empty);
        assert_eq!(out.radius, 0.0);
    }

    #[test]
    fn acyclic_survivors_have_radius_zero() {
        // 0 -> 1 only: no cycle.
        let w = vec![1.0, 1.0];
        let ie = vec![vec![], vec![0u32]];
        let out = spectral_radius(&w, &ie).unwrap();
        assert!(out.empty);
        assert_eq!(out.radius, 0.0);
    }

    #[test]
    fn random_dense_agreement() {
        // Deterministic pseudo-random column weights over a fixed structure.
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for trial in 0..20 {
            let n = 2 + (trial % 5);
            let weights: Vec<f64> = (0..n).map(|_| 0.1 + next()).collect();
            let mut in_edges: Vec<Vec<u32>> = vec![Vec::new(); n];
            let mut dense = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    if next() < 0.6 {
                        in_edges[i].push(j as u32);
                        dense[i][j] = weights[j];
                    }
                }
            }
            let ours = match spectral_radius(&weights, &in_edges) {
                Ok(out) => out.radius,
                Err(_) => continue,
            };
            let oracle = dense_radius_by_squaring(&dense);
            assert!(
                (ours - oracle).abs() <= 1e-9 * oracle.max(1.0),
                "trial {trial}: ours {ours} oracle {oracle}"
            );
        }
    }
}
