//! Mixing diagnostics: the three walks run on explicit benchmark graphs, and
//! the distance of the target walk's empirical law to uniform.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::mcmc::TransitionMatrix;
use crate::rng::{self, stream, uniform_f64, uniform_index};

/// Undirected simple graph on nodes `0..n` with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    adjacency: Vec<Vec<usize>>,
}

impl SimpleGraph {
    /// Checks symmetry, sortedness, and the absence of loops and parallel edges.
    pub fn from_adjacency(adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let n = adjacency.len();
        if n == 0 {
            return Err(Error::domain("graph needs at least one node"));
        }
        for (i, nbrs) in adjacency.iter().enumerate() {
            if nbrs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::domain(alloc::format!("neighbours of {i} are unsorted or repeated")));
            }
            for &j in nbrs {
                if j >= n || j == i {
                    return Err(Error::domain(alloc::format!("bad edge {i} - {j}")));
                }
                if adjacency[j].binary_search(&i).is_err() {
                    return Err(Error::domain(alloc::format!("edge {i} - {j} is not symmetric")));
                }
            }
        }
        Ok(SimpleGraph { adjacency })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::domain(alloc::format!("edge {a} - {b} out of range")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Self::from_adjacency(adjacency)
    }

    fn from_sets(sets: Vec<BTreeSet<usize>>) -> Result<Self> {
        Self::from_adjacency(sets.into_iter().map(|s| s.into_iter().collect()).collect())
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degree_sum(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == n
    }
}

/// Node `i` joined to `i +- j (mod n)` for every jump `j`.
pub fn gen_circulant(n: usize, jumps: &[usize]) -> Result<SimpleGraph> {
    if jumps.is_empty() {
        return Err(Error::domain("circulant graph needs at least one jump"));
    }
    if n < 2 {
        return Err(Error::domain("circulant graph needs n >= 2"));
    }
    if let Some(j) = jumps.iter().find(|&&j| j % n == 0) {
        return Err(Error::domain(alloc::format!("jump {j} is a multiple of n = {n}")));
    }
    let mut sets = vec![BTreeSet::new(); n];
    for (i, set) in sets.iter_mut().enumerate() {
        for &j in jumps {
            let j = j % n;
            set.insert((i + j) % n);
            set.insert((i + n - j) % n);
        }
    }
    SimpleGraph::from_sets(sets)
}

const REGULAR_MAX_RESTARTS: usize = 100_000;

/// Uniform `k`-regular simple graph by the pairing model, restarting on loops
/// or parallel edges.
pub fn gen_random_regular<R: RngCore + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<SimpleGraph> {
    if k >= n || !(n * k).is_multiple_of(2) {
        return Err(Error::domain(alloc::format!("no simple {k}-regular graph on {n} nodes")));
    }
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| core::iter::repeat_n(v, k)).collect();
    'attempt: for _ in 0..REGULAR_MAX_RESTARTS {
        rng::shuffle(rng, &mut stubs);
        let mut sets = vec![BTreeSet::new(); n];
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b || !sets[a].insert(b) {
                continue 'attempt;
            }
            sets[b].insert(a);
        }
        return SimpleGraph::from_sets(sets);
    }
    Err(Error::NoConvergence { iterations: REGULAR_MAX_RESTARTS, residual: f64::NAN })
}

/// Ring lattice with `k/2` neighbours per side, each lattice edge `(u, u + j)`
/// rewired with probability `p` to a uniform new endpoint of `u`.
pub fn gen_watts_strogatz<R: RngCore + ?Sized>(n: usize, k: usize, p: f64, rng: &mut R) -> Result<SimpleGraph> {
    if k == 0 || !k.is_multiple_of(2) || k >= n {
        return Err(Error::domain(alloc::format!("Watts-Strogatz needs even 0 < k < n, got k = {k}, n = {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(alloc::format!("rewiring probability {p} outside [0, 1]")));
    }
    let mut sets = vec![BTreeSet::new(); n];
    for u in 0..n {
        for j in 1..=k / 2 {
            let v = (u + j) % n;
            sets[u].insert(v);
            sets[v].insert(u);
        }
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if uniform_f64(rng) >= p {
                continue;
            }
            if sets[u].len() >= n - 1 {
                continue;
            }
            let mut w = uniform_index(rng, n);
            while w == u || sets[u].contains(&w) {
                w = uniform_index(rng, n);
            }
            sets[u].remove(&v);
            sets[v].remove(&u);
            sets[u].insert(w);
            sets[w].insert(u);
        }
    }
    SimpleGraph::from_sets(sets)
}

/// Propose a uniform node, move iff it is a neighbour.
pub fn graph_step_target<R: RngCore + ?Sized>(graph: &SimpleGraph, v: usize, rng: &mut R) -> usize {
    let u = uniform_index(rng, graph.node_count());
    if u != v && graph.has_edge(v, u) {
        u
    } else {
        v
    }
}

/// Move to a uniform neighbour.
pub fn graph_step_degree<R: RngCore + ?Sized>(graph: &SimpleGraph, v: usize, rng: &mut R) -> Result<usize> {
    let nbrs = graph.neighbors(v);
    if nbrs.is_empty() {
        return Err(Error::IsolatedNode);
    }
    Ok(nbrs[uniform_index(rng, nbrs.len())])
}

/// One target step, one degree step, then the degree-ratio exchange.
pub fn graph_step_coupled<R: RngCore + ?Sized>(
    graph: &SimpleGraph,
    v: usize,
    w: usize,
    rng: &mut R,
) -> Result<(usize, usize)> {
    let v = graph_step_target(graph, v, rng);
    let w = graph_step_degree(graph, w, rng)?;
    let u = uniform_f64(rng);
    if u * graph.degree(w) as f64 <= graph.degree(v) as f64 {
        Ok((w, v))
    } else {
        Ok((v, w))
    }
}

/// State of one of the three walks on a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphChain {
    Target(usize),
    Degree(usize),
    Coupled { v: usize, w: usize },
}

pub fn graph_chain_step<R: RngCore + ?Sized>(
    graph: &SimpleGraph,
    state: GraphChain,
    rng: &mut R,
) -> Result<GraphChain> {
    Ok(match state {
        GraphChain::Target(v) => GraphChain::Target(graph_step_target(graph, v, rng)),
        GraphChain::Degree(v) => GraphChain::Degree(graph_step_degree(graph, v, rng)?),
        GraphChain::Coupled { v, w } => {
            let (v, w) = graph_step_coupled(graph, v, w, rng)?;
            GraphChain::Coupled { v, w }
        }
    })
}

pub fn graph_transition_target(graph: &SimpleGraph) -> TransitionMatrix<usize> {
    let n = graph.node_count();
    let mut probs = vec![0.0; n * n];
    let step = 1.0 / n as f64;
    for v in 0..n {
        for &u in graph.neighbors(v) {
            probs[v * n + u] = step;
        }
        probs[v * n + v] = 1.0 - graph.degree(v) as f64 * step;
    }
    TransitionMatrix::from_parts((0..n).collect(), probs)
}

pub fn graph_transition_degree(graph: &SimpleGraph) -> Result<TransitionMatrix<usize>> {
    let n = graph.node_count();
    let mut probs = vec![0.0; n * n];
    for v in 0..n {
        let d = graph.degree(v);
        if d == 0 {
            return Err(Error::IsolatedNode);
        }
        for &u in graph.neighbors(v) {
            probs[v * n + u] = 1.0 / d as f64;
        }
    }
    Ok(TransitionMatrix::from_parts((0..n).collect(), probs))
}

fn check_distributions(f: &[f64], g: &[f64]) -> Result<()> {
    if f.len() != g.len() {
        return Err(Error::domain(alloc::format!("distributions of lengths {} and {}", f.len(), g.len())));
    }
    for h in [f, g] {
        let total: f64 = h.iter().sum();
        if libm::fabs(total - 1.0) > 1e-9 || h.iter().any(|&x| x.is_nan() || x < 0.0) {
            return Err(Error::domain(alloc::format!("not a probability vector (sum {total})")));
        }
    }
    Ok(())
}

/// `max_v |f(v) - g(v)|`.
pub fn sup_distance(f: &[f64], g: &[f64]) -> Result<f64> {
    check_distributions(f, g)?;
    Ok(f.iter().zip(g).map(|(a, b)| libm::fabs(a - b)).fold(0.0, f64::max))
}

/// `(1/2) sum_v |f(v) - g(v)|`.
pub fn tv_distance(f: &[f64], g: &[f64]) -> Result<f64> {
    check_distributions(f, g)?;
    Ok(0.5 * f.iter().zip(g).map(|(a, b)| libm::fabs(a - b)).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MixMode {
    /// Target and degree walks run side by side without exchanges.
    Independent,
    Coupled,
}

impl MixMode {
    pub fn name(&self) -> &'static str {
        match self {
            MixMode::Independent => "independent",
            MixMode::Coupled => "coupled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub mode: MixMode,
    /// Thinned samples kept so far.
    pub retained: usize,
    pub d_sup: f64,
    pub d_tv: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTrace {
    pub rows: Vec<TraceRow>,
}

impl DistanceTrace {
    pub fn mode(&self, mode: MixMode) -> impl Iterator<Item = &TraceRow> {
        self.rows.iter().filter(move |r| r.mode == mode)
    }

    /// Last row of a mode, i.e. the largest checkpoint.
    pub fn last(&self, mode: MixMode) -> Option<&TraceRow> {
        self.mode(mode).last()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixingConfig {
    pub burn_in: usize,
    pub thin: usize,
    /// Retained-sample counts at which distances are recorded; a zero
    /// checkpoint is skipped.
    pub checkpoints: Vec<usize>,
    pub seed: u64,
    pub start: usize,
}

impl MixingConfig {
    pub fn new(total: usize, seed: u64) -> Self {
        MixingConfig { burn_in: 5_000, thin: 100, checkpoints: geometric_checkpoints(total), seed, start: 0 }
    }
}

/// `100, 1000, 10000, ...` below `total`, followed by `total` itself.
pub fn geometric_checkpoints(total: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut c = 100;
    while c < total {
        out.push(c);
        c *= 10;
    }
    if total > 0 {
        out.push(total);
    }
    out
}

fn trace_mode(graph: &SimpleGraph, config: &MixingConfig, mode: MixMode, rows: &mut Vec<TraceRow>) -> Result<()> {
    let n = graph.node_count();
    let tag = match mode {
        MixMode::Independent => stream::MIX_INDEPENDENT,
        MixMode::Coupled => stream::MIX_COUPLED,
    };
    let mut rng = rng::derived(config.seed, tag, 0);
    let (mut v, mut w) = (config.start, config.start);
    let mut advance = |v: &mut usize, w: &mut usize| -> Result<()> {
        match mode {
            MixMode::Independent => {
                *v = graph_step_target(graph, *v, &mut rng);
                *w = graph_step_degree(graph, *w, &mut rng)?;
            }
            MixMode::Coupled => (*v, *w) = graph_step_coupled(graph, *v, *w, &mut rng)?,
        }
        Ok(())
    };
    for _ in 0..config.burn_in {
        advance(&mut v, &mut w)?;
    }
    let uniform = vec![1.0 / n as f64; n];
    let mut counts = vec![0usize; n];
    let mut retained = 0;
    for &checkpoint in &config.checkpoints {
        if checkpoint == 0 {
            continue;
        }
        while retained < checkpoint {
            for _ in 0..config.thin {
                advance(&mut v, &mut w)?;
            }
            counts[v] += 1;
            retained += 1;
        }
        let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / retained as f64).collect();
        rows.push(TraceRow {
            mode,
            retained,
            d_sup: sup_distance(&empirical, &uniform)?,
            d_tv: tv_distance(&empirical, &uniform)?,
        });
    }
    Ok(())
}

/// Distances to uniform of the target slot's empirical law, for an
/// independent pair and a coupled pair started at the same node.
pub fn mixing_report(graph: &SimpleGraph, config: &MixingConfig) -> Result<DistanceTrace> {
    if config.thin == 0 {
        return Err(Error::domain("thin must be at least 1"));
    }
    if config.start >= graph.node_count() {
        return Err(Error::domain("start node out of range"));
    }
    let nonzero: Vec<usize> = config.checkpoints.iter().copied().filter(|&c| c > 0).collect();
    if nonzero.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("checkpoints must be strictly increasing"));
    }
    let mut rows = Vec::new();
    trace_mode(graph, config, MixMode::Independent, &mut rows)?;
    trace_mode(graph, config, MixMode::Coupled, &mut rows)?;
    Ok(DistanceTrace { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circulant_degrees() {
        let g = gen_circulant(101, &[1]).unwrap();
        assert!((0..101).all(|v| g.degree(v) == 2));
        let g = gen_circulant(100, &[1, 2, 3]).unwrap();
        assert!((0..100).all(|v| g.degree(v) == 6));
        let g = gen_circulant(4, &[2]).unwrap();
        assert!((0..4).all(|v| g.degree(v) == 1));
        assert!(gen_circulant(5, &[]).is_err());
        assert!(gen_circulant(5, &[5]).is_err());
    }

    #[test]
    fn regular_degrees() {
        let mut rng = rng::seeded(1);
        let g = gen_random_regular(100, 3, &mut rng).unwrap();
        assert!((0..100).all(|v| g.degree(v) == 3));
        assert!(gen_random_regular(5, 3, &mut rng).is_err());
        assert!(gen_random_regular(3, 3, &mut rng).is_err());
    }

    #[test]
    fn watts_strogatz_edge_cases() {
        let mut rng = rng::seeded(2);
        assert_eq!(gen_watts_strogatz(100, 4, 0.0, &mut rng).unwrap(), gen_circulant(100, &[1, 2]).unwrap());
        let g = gen_watts_strogatz(100, 4, 1.0, &mut rng).unwrap();
        assert_eq!(g.degree_sum(), 400);
        assert!(gen_watts_strogatz(10, 3, 0.1, &mut rng).is_err());
        assert!(gen_watts_strogatz(10, 4, 1.5, &mut rng).is_err());
    }

    #[test]
    fn rejects_non_simple_graphs() {
        assert!(SimpleGraph::from_edges(3, &[(0, 0)]).is_err());
        assert!(SimpleGraph::from_edges(3, &[(0, 1), (1, 0)]).is_err());
        assert!(SimpleGraph::from_adjacency(vec![vec![1], vec![]]).is_err());
        assert!(SimpleGraph::from_edges(3, &[(0, 3)]).is_err());
    }

    #[test]
    fn target_matrix_on_cycle() {
        let g = gen_circulant(101, &[1]).unwrap();
        let m = graph_transition_target(&g);
        assert!((m.get(5, 5) - 99.0 / 101.0).abs() < 1e-15);
        assert!(m.row_sum_error() < 1e-12);
    }

    #[test]
    fn coupled_regular_always_exchanges() {
        let g = gen_circulant(11, &[1, 2]).unwrap();
        let mut rng = rng::seeded(3);
        let (mut v, mut w) = (0, 0);
        for _ in 0..200 {
            let v_moved = graph_step_target(&g, v, &mut rng.clone());
            let (nv, nw) = graph_step_coupled(&g, v, w, &mut rng).unwrap();
            assert_eq!(nw, v_moved);
            (v, w) = (nv, nw);
        }
    }

    #[test]
    fn degree_step_isolated() {
        let g = SimpleGraph::from_edges(3, &[(0, 1)]).unwrap();
        let mut rng = rng::seeded(0);
        assert_eq!(graph_step_degree(&g, 2, &mut rng), Err(Error::IsolatedNode));
        assert!(graph_transition_degree(&g).is_err());
        assert!(graph_chain_step(&g, GraphChain::Coupled { v: 0, w: 2 }, &mut rng).is_err());
    }

    #[test]
    fn distance_examples() {
        let f = [0.5, 0.5, 0.0];
        let g = [1.0 / 3.0; 3];
        assert!((sup_distance(&f, &g).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((tv_distance(&f, &g).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(sup_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(tv_distance(&g, &g).unwrap(), 0.0);
        assert!(tv_distance(&[1.0], &[0.5, 0.5]).is_err());
        assert!(tv_distance(&[0.6, 0.6], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn checkpoints() {
        assert_eq!(geometric_checkpoints(5000), vec![100, 1000, 5000]);
        assert_eq!(geometric_checkpoints(1000), vec![100, 1000]);
        assert_eq!(geometric_checkpoints(50), vec![50]);
    }

    #[test]
    fn report_skips_zero_checkpoint() {
        let g = gen_circulant(7, &[1]).unwrap();
        let cfg = MixingConfig { burn_in: 10, thin: 2, checkpoints: vec![0, 5, 20], seed: 1, start: 0 };
        let trace = mixing_report(&g, &cfg).unwrap();
        assert_eq!(trace.rows.len(), 4);
        assert_eq!(trace.mode(MixMode::Coupled).map(|r| r.retained).collect::<Vec<_>>(), vec![5, 20]);
        let bad = MixingConfig { checkpoints: vec![5, 5], ..cfg };
        assert!(mixing_report(&g, &bad).is_err());
    }
}
