use serde::{Deserialize, Serialize};

use super::system::EMZSystem;
use crate::error::Result;
use crate::realset::RealSet;

/// Superposition between two slots: the overlap of their subspectra and the
/// slots whose measure charges it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: String,
    pub b: String,
    pub overlap: RealSet,
    pub charged_by: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
    #[serde(skip)]
    adjacency: Vec<Vec<bool>>,
}

impl SuperpositionGraph {
    /// Graph on `n` anonymous nodes `0..n` from an edge list (for searches and tests).
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![vec![false; n]; n];
        for &(a, b) in edges {
            if a != b {
                adjacency[a][b] = true;
                adjacency[b][a] = true;
            }
        }
        SuperpositionGraph {
            nodes: (0..n).map(|j| j.to_string()).collect(),
            edges: Vec::new(),
            adjacency,
        }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a][b]
    }

    pub fn adjacency(&self) -> &[Vec<bool>] {
        &self.adjacency
    }

    pub fn degree(&self, a: usize) -> usize {
        self.adjacency[a].iter().filter(|x| **x).count()
    }

    /// Whether the node indices form an independent set.
    pub fn is_independent(&self, group: &[usize]) -> bool {
        group
            .iter()
            .enumerate()
            .all(|(j, &a)| group[j + 1..].iter().all(|&b| !self.adjacency[a][b]))
    }
}

/// Slots `s, l` superpose when the measure of either one charges `B_sl`,
/// the intersection of their subspectra.
pub fn build_superposition_graph(sys: &EMZSystem) -> Result<SuperpositionGraph> {
    let slots = sys.slots();
    let n = slots.len();
    let supports: Vec<RealSet> = slots.iter().map(|s| s.class.support()).collect();
    let mut adjacency = vec![vec![false; n]; n];
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let overlap = supports[a].intersect(&supports[b])?;
            if overlap.is_empty() {
                continue;
            }
            let mut charged_by = Vec::new();
            for j in [a, b] {
                if slots[j].class.sign(&overlap)?.is_positive() {
                    charged_by.push(slots[j].id.clone());
                }
            }
            if !charged_by.is_empty() {
                adjacency[a][b] = true;
                adjacency[b][a] = true;
                edges.push(Edge {
                    a: slots[a].id.clone(),
                    b: slots[b].id.clone(),
                    overlap,
                    charged_by,
                });
            }
        }
    }
    Ok(SuperpositionGraph {
        nodes: slots.iter().map(|s| s.id.clone()).collect(),
        edges,
        adjacency,
    })
}
