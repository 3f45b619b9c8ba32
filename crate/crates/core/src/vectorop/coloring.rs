use serde::{Deserialize, Serialize};

use super::graph::{build_superposition_graph, SuperpositionGraph};
use super::system::EMZSystem;
use crate::error::Result;

/// Largest graph searched exactly.
pub const EXACT_NODE_LIMIT: usize = 12;
/// Largest graph on which all optimal partitions are counted.
pub const COUNT_NODE_LIMIT: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "greedy+clique-bound")]
    GreedyCliqueBound,
}

/// Groups `A_k` of a minimal partition and the resulting spectral index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionResult {
    pub lambda: usize,
    pub groups: Vec<Vec<String>>,
    pub certificate: Certificate,
    /// Size of the largest clique found (a lower bound on `Λ`).
    pub clique_bound: usize,
    /// `Λ − clique_bound`; zero proves optimality even for greedy results.
    pub gap: usize,
    /// Number of minimal partitions when counted (small graphs only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimal_count: Option<u64>,
    /// `max m_i` over the operators before splitting.
    pub max_multiplicity: usize,
}

impl PartitionResult {
    pub fn is_unique(&self) -> Option<bool> {
        self.optimal_count.map(|c| c == 1)
    }
}

/// Minimal partition of the superposition graph into independent sets.
pub fn spectral_index(sys: &EMZSystem) -> Result<PartitionResult> {
    let graph = build_superposition_graph(sys)?;
    let mut out = partition_graph(&graph);
    out.max_multiplicity = sys.max_multiplicity();
    if out.lambda < out.max_multiplicity {
        log::error!(
            "spectral index {} is below the largest coordinate multiplicity {}",
            out.lambda,
            out.max_multiplicity
        );
    }
    Ok(out)
}

/// Colors a graph: exactly up to [`EXACT_NODE_LIMIT`] nodes, by DSATUR above.
pub fn partition_graph(graph: &SuperpositionGraph) -> PartitionResult {
    let n = graph.len();
    let clique = max_clique(graph);
    let (colors, certificate) = if n <= EXACT_NODE_LIMIT {
        (exact_coloring(graph, clique), Certificate::Exact)
    } else {
        (canonical_labels(&dsatur(graph)), Certificate::GreedyCliqueBound)
    };
    let lambda = colors.iter().map(|c| c + 1).max().unwrap_or(0);
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); lambda];
    for (v, &c) in colors.iter().enumerate() {
        groups[c].push(v);
    }
    for g in &groups {
        assert!(graph.is_independent(g), "coloring produced a dependent group");
    }
    let optimal_count =
        (certificate == Certificate::Exact && n <= COUNT_NODE_LIMIT).then(|| count_colorings(graph, lambda));
    if optimal_count.is_some_and(|c| c > 1) {
        log::info!(
            "{} minimal partitions; reporting the lexicographically first",
            optimal_count.unwrap()
        );
    }
    PartitionResult {
        lambda,
        groups: groups
            .into_iter()
            .map(|g| g.into_iter().map(|v| graph.nodes[v].clone()).collect())
            .collect(),
        certificate,
        clique_bound: clique,
        gap: lambda - clique.min(lambda),
        optimal_count,
        max_multiplicity: 0,
    }
}

/// Lexicographically first restricted-growth coloring with the fewest colors.
fn exact_coloring(graph: &SuperpositionGraph, lower: usize) -> Vec<usize> {
    let n = graph.len();
    if n == 0 {
        return Vec::new();
    }
    let upper = dsatur(graph).iter().map(|c| c + 1).max().unwrap_or(1);
    for k in lower.max(1)..upper {
        let mut colors = vec![usize::MAX; n];
        if rgs_search(graph, k, 0, 0, &mut colors) {
            return colors;
        }
    }
    // the DSATUR color count is attainable; search again for the first such assignment
    let mut colors = vec![usize::MAX; n];
    assert!(rgs_search(graph, upper, 0, 0, &mut colors));
    colors
}

fn feasible(graph: &SuperpositionGraph, colors: &[usize], v: usize, c: usize) -> bool {
    (0..v).all(|u| !(graph.adjacent(u, v) && colors[u] == c))
}

fn rgs_search(graph: &SuperpositionGraph, k: usize, v: usize, used: usize, colors: &mut [usize]) -> bool {
    let n = graph.len();
    if v == n {
        return true;
    }
    // not enough nodes left to open the remaining colors
    if k - used > n - v {
        return false;
    }
    for c in 0..(used + 1).min(k) {
        if feasible(graph, colors, v, c) {
            colors[v] = c;
            if rgs_search(graph, k, v + 1, used.max(c + 1), colors) {
                return true;
            }
        }
    }
    colors[v] = usize::MAX;
    false
}

/// Number of partitions into exactly `k` independent sets.
fn count_colorings(graph: &SuperpositionGraph, k: usize) -> u64 {
    fn go(graph: &SuperpositionGraph, k: usize, v: usize, used: usize, colors: &mut [usize]) -> u64 {
        let n = graph.len();
        if v == n {
            return u64::from(used == k);
        }
        if k - used > n - v {
            return 0;
        }
        let mut total = 0;
        for c in 0..(used + 1).min(k) {
            if feasible(graph, colors, v, c) {
                colors[v] = c;
                total += go(graph, k, v + 1, used.max(c + 1), colors);
            }
        }
        colors[v] = usize::MAX;
        total
    }
    if graph.is_empty() {
        return 1;
    }
    go(graph, k, 0, 0, &mut vec![usize::MAX; graph.len()])
}

/// DSATUR: most saturated node first, ties by degree then index; smallest free color.
pub fn dsatur(graph: &SuperpositionGraph) -> Vec<usize> {
    let n = graph.len();
    let mut colors = vec![usize::MAX; n];
    for _ in 0..n {
        let mut best: Option<(usize, usize, usize)> = None;
        for v in (0..n).filter(|&v| colors[v] == usize::MAX) {
            let mut seen: Vec<usize> = (0..n)
                .filter(|&u| graph.adjacent(u, v) && colors[u] != usize::MAX)
                .map(|u| colors[u])
                .collect();
            seen.sort_unstable();
            seen.dedup();
            let key = (seen.len(), graph.degree(v));
            if best.is_none_or(|(s, d, _)| key > (s, d)) {
                best = Some((key.0, key.1, v));
            }
        }
        let (_, _, v) = best.expect("an uncolored node remains");
        let c = (0..).find(|&c| feasible_all(graph, &colors, v, c)).unwrap();
        colors[v] = c;
    }
    colors
}

fn feasible_all(graph: &SuperpositionGraph, colors: &[usize], v: usize, c: usize) -> bool {
    (0..graph.len()).all(|u| !(graph.adjacent(u, v) && colors[u] == c))
}

/// Relabels colors in order of first appearance.
fn canonical_labels(colors: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    colors
        .iter()
        .map(|c| {
            let next = map.len();
            *map.entry(*c).or_insert(next)
        })
        .collect()
}

/// Clique number by branch and bound with greedy-coloring pruning.
pub fn max_clique(graph: &SuperpositionGraph) -> usize {
    fn expand(graph: &SuperpositionGraph, size: usize, cand: Vec<usize>, best: &mut usize) {
        if cand.is_empty() {
            *best = (*best).max(size);
            return;
        }
        if size + cand.len() <= *best {
            return;
        }
        for (j, &v) in cand.iter().enumerate() {
            if size + cand.len() - j <= *best {
                return;
            }
            let next: Vec<usize> = cand[j + 1..]
                .iter()
                .copied()
                .filter(|&u| graph.adjacent(u, v))
                .collect();
            expand(graph, size + 1, next, best);
        }
    }
    let mut best = 0;
    expand(graph, 0, (0..graph.len()).collect(), &mut best);
    best
}
