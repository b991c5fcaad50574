//! Undirected conditional-independence graphs.
//!
//! Nodes are stored 0-based. The user-facing entry points that speak the
//! conventional 1-based labels are [`Graph::from_edge_list`],
//! [`Graph::edge_list`] and the text format handled in [`crate::io`]; every
//! other method takes and returns 0-based indices so they line up with matrix
//! rows and columns.

use std::fmt;

use crate::error::{Error, Result};

/// Undirected simple graph on `p` nodes.
///
/// Values are immutable: [`Graph::toggle_edge`] returns a new graph, which
/// keeps rollback on a rejected MCMC move free.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    p: usize,
    adj: Vec<bool>,
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(p: usize) -> Self {
        Graph {
            p,
            adj: vec![false; p * p],
            neighbors: vec![Vec::new(); p],
        }
    }

    pub fn complete(p: usize) -> Self {
        let mut adj = vec![true; p * p];
        for i in 0..p {
            adj[i * p + i] = false;
        }
        Self::from_adjacency(p, adj)
    }

    /// Builds a graph from 1-based pairs. Duplicates and reversed pairs are
    /// merged.
    pub fn from_edge_list(p: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![false; p * p];
        for &(i, j) in pairs {
            for idx in [i, j] {
                if idx == 0 || idx > p {
                    return Err(Error::NodeOutOfRange { index: idx, p });
                }
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            adj[(i - 1) * p + (j - 1)] = true;
            adj[(j - 1) * p + (i - 1)] = true;
        }
        Ok(Self::from_adjacency(p, adj))
    }

    /// Same as [`Graph::from_edge_list`] but with 0-based pairs.
    pub fn from_edges(p: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let shifted: Vec<_> = pairs.iter().map(|&(i, j)| (i + 1, j + 1)).collect();
        Self::from_edge_list(p, &shifted)
    }

    /// Decodes a graph from a bitmask over the pairs `(i, j)`, `i < j`, in
    /// row-major order. Bit `k` refers to the `k`-th entry of [`pair_index`].
    pub fn from_mask(p: usize, mask: u64) -> Self {
        let mut adj = vec![false; p * p];
        for (k, (i, j)) in pair_list(p).into_iter().enumerate() {
            if mask >> k & 1 == 1 {
                adj[i * p + j] = true;
                adj[j * p + i] = true;
            }
        }
        Self::from_adjacency(p, adj)
    }

    fn from_adjacency(p: usize, adj: Vec<bool>) -> Self {
        let neighbors = (0..p)
            .map(|i| (0..p).filter(|&j| adj[i * p + j]).collect())
            .collect();
        Graph { p, adj, neighbors }
    }

    /// Number of nodes.
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.p + j]
    }

    /// Sorted neighbors of node `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// Edges `(i, j)` with `i < j`, 0-based, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.p).flat_map(move |i| {
            self.neighbors[i]
                .iter()
                .copied()
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// Edges as 1-based pairs.
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        self.edges().map(|(i, j)| (i + 1, j + 1)).collect()
    }

    pub fn n_edges(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_complete(&self) -> bool {
        self.n_edges() == self.p * self.p.saturating_sub(1) / 2
    }

    /// Encodes the edge set as a bitmask (see [`Graph::from_mask`]).
    /// Only meaningful for `p(p-1)/2 <= 64`.
    pub fn mask(&self) -> u64 {
        pair_list(self.p)
            .into_iter()
            .enumerate()
            .filter(|&(_, (i, j))| self.has_edge(i, j))
            .fold(0u64, |acc, (k, _)| acc | 1 << k)
    }

    /// Returns a copy with the edge `(l, m)` flipped (0-based).
    pub fn toggle_edge(&self, l: usize, m: usize) -> Result<Graph> {
        for idx in [l, m] {
            if idx >= self.p {
                return Err(Error::NodeOutOfRange {
                    index: idx + 1,
                    p: self.p,
                });
            }
        }
        if l == m {
            return Err(Error::SelfLoop(l + 1));
        }
        let mut adj = self.adj.clone();
        let present = adj[l * self.p + m];
        adj[l * self.p + m] = !present;
        adj[m * self.p + l] = !present;
        Ok(Self::from_adjacency(self.p, adj))
    }

    /// `ν_i`: the number of neighbors of `i` with a larger index.
    pub fn nu_counts(&self) -> Vec<usize> {
        (0..self.p)
            .map(|i| self.neighbors[i].iter().filter(|&&j| j > i).count())
            .collect()
    }

    /// Whether every pair of `nodes` is adjacent.
    pub fn is_clique(&self, nodes: &[usize]) -> bool {
        nodes.iter().enumerate().all(|(a, &i)| {
            i < self.p
                && nodes[a + 1..]
                    .iter()
                    .all(|&j| j < self.p && i != j && self.has_edge(i, j))
        })
    }

    /// All maximal cliques (Bron–Kerbosch with pivoting), each sorted, the list
    /// sorted lexicographically. Isolated nodes appear as singletons.
    pub fn maximal_cliques(&self) -> CliqueList {
        let mut out = Vec::new();
        let candidates: Vec<usize> = (0..self.p).collect();
        self.bron_kerbosch(&mut Vec::new(), candidates, Vec::new(), &mut out);
        for c in &mut out {
            c.sort_unstable();
        }
        out.sort();
        CliqueList { cliques: out }
    }

    fn bron_kerbosch(
        &self,
        r: &mut Vec<usize>,
        p: Vec<usize>,
        mut x: Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_empty() {
            if x.is_empty() {
                out.push(r.clone());
            }
            return;
        }
        // Pivot on the vertex of P ∪ X covering the most of P.
        let pivot = p
            .iter()
            .chain(x.iter())
            .copied()
            .max_by_key(|&u| p.iter().filter(|&&v| self.has_edge(u, v)).count())
            .expect("p is nonempty");
        let branch: Vec<usize> = p
            .iter()
            .copied()
            .filter(|&v| !self.has_edge(pivot, v))
            .collect();
        let mut p = p;
        for v in branch {
            let np = p.iter().copied().filter(|&u| self.has_edge(u, v)).collect();
            let nx = x.iter().copied().filter(|&u| self.has_edge(u, v)).collect();
            r.push(v);
            self.bron_kerbosch(r, np, nx, out);
            r.pop();
            p.retain(|&u| u != v);
            x.push(v);
        }
    }

    /// Maximum cardinality search order (first visited first).
    fn mcs_order(&self) -> Vec<usize> {
        let mut weight = vec![0usize; self.p];
        let mut visited = vec![false; self.p];
        let mut order = Vec::with_capacity(self.p);
        for _ in 0..self.p {
            let v = (0..self.p)
                .filter(|&v| !visited[v])
                .max_by_key(|&v| (weight[v], std::cmp::Reverse(v)))
                .expect("unvisited node remains");
            visited[v] = true;
            order.push(v);
            for &u in &self.neighbors[v] {
                if !visited[u] {
                    weight[u] += 1;
                }
            }
        }
        order
    }

    /// Chordality test: the reverse of a maximum cardinality search order must
    /// be a perfect elimination ordering.
    pub fn is_decomposable(&self) -> bool {
        let order = self.mcs_order();
        let mut position = vec![0usize; self.p];
        for (k, &v) in order.iter().enumerate() {
            position[v] = k;
        }
        for (k, &v) in order.iter().enumerate() {
            // Earlier-visited neighbors of v must form a clique; it suffices to
            // check they are all adjacent to the latest of them.
            let earlier: Vec<usize> = self.neighbors[v]
                .iter()
                .copied()
                .filter(|&u| position[u] < k)
                .collect();
            if let Some(&parent) = earlier.iter().max_by_key(|&&u| position[u]) {
                if earlier
                    .iter()
                    .any(|&u| u != parent && !self.has_edge(u, parent))
                {
                    return false;
                }
            }
        }
        true
    }

    /// Separators of a junction tree for a decomposable graph, built as a
    /// maximum-weight spanning tree of the clique intersection graph. Forests
    /// (disconnected graphs) yield empty separators between components.
    pub fn separators(&self) -> Result<Vec<Vec<usize>>> {
        if !self.is_decomposable() {
            return Err(Error::NotDecomposable);
        }
        let cliques = self.maximal_cliques().cliques;
        let n = cliques.len();
        let overlap = |a: &[usize], b: &[usize]| -> Vec<usize> {
            a.iter().copied().filter(|v| b.contains(v)).collect()
        };
        let mut in_tree = vec![false; n];
        let mut best: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seps = Vec::with_capacity(n.saturating_sub(1));
        if n == 0 {
            return Ok(seps);
        }
        in_tree[0] = true;
        for j in 1..n {
            best[j] = Some((overlap(&cliques[0], &cliques[j]).len(), 0));
        }
        for _ in 1..n {
            let next = (0..n)
                .filter(|&j| !in_tree[j])
                .max_by_key(|&j| (best[j].map_or(0, |b| b.0), std::cmp::Reverse(j)))
                .expect("clique outside tree");
            let (_, parent) = best[next].expect("weight set");
            seps.push(overlap(&cliques[next], &cliques[parent]));
            in_tree[next] = true;
            for j in 0..n {
                if !in_tree[j] {
                    let w = overlap(&cliques[next], &cliques[j]).len();
                    if best[j].is_none_or(|b| w > b.0) {
                        best[j] = Some((w, next));
                    }
                }
            }
        }
        Ok(seps)
    }
}

/// Writes the graph text format: `p` on the first line, then one 1-based
/// `i j` pair per line.
impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.p)?;
        for (i, j) in self.edge_list() {
            writeln!(f, "{i} {j}")?;
        }
        Ok(())
    }
}

/// All unordered pairs `(i, j)`, `i < j`, in row-major order.
pub fn pair_list(p: usize) -> Vec<(usize, usize)> {
    (0..p)
        .flat_map(|i| (i + 1..p).map(move |j| (i, j)))
        .collect()
}

/// Position of the pair `(i, j)` in [`pair_list`].
pub fn pair_index(p: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * p - i * (i + 1) / 2 + (j - i - 1)
}

/// Maximal cliques of a graph, deterministically ordered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueList {
    pub cliques: Vec<Vec<usize>>,
}

impl CliqueList {
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Vec<usize>> {
        self.cliques.iter()
    }
}

impl<'a> IntoIterator for &'a CliqueList {
    type Item = &'a Vec<usize>;
    type IntoIter = std::slice::Iter<'a, Vec<usize>>;

    fn into_iter(self) -> Self::IntoIter {
        self.cliques.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> Graph {
        Graph::from_edge_list(4, &[(1, 2), (1, 3), (2, 4), (3, 4)]).unwrap()
    }

    #[test]
    fn builds_c4() {
        let g = c4();
        assert_eq!(g.n_edges(), 4);
        assert!(!g.has_edge(0, 3));
        assert!(!g.has_edge(1, 2));
        assert_eq!(g.neighbors(0), &[1, 2]);
        assert_eq!(g.edge_list(), vec![(1, 2), (1, 3), (2, 4), (3, 4)]);
    }

    #[test]
    fn empty_graph_has_no_neighbors() {
        let g = Graph::from_edge_list(3, &[]).unwrap();
        assert!((0..3).all(|i| g.neighbors(i).is_empty()));
        assert_eq!(g, Graph::empty(3));
    }

    #[test]
    fn duplicate_pairs_are_merged() {
        let g = Graph::from_edge_list(2, &[(2, 1), (1, 2)]).unwrap();
        assert_eq!(g.edge_list(), vec![(1, 2)]);
    }

    #[test]
    fn rejects_bad_pairs() {
        assert!(matches!(
            Graph::from_edge_list(3, &[(1, 4)]),
            Err(Error::NodeOutOfRange { index: 4, p: 3 })
        ));
        assert!(matches!(
            Graph::from_edge_list(3, &[(0, 1)]),
            Err(Error::NodeOutOfRange { index: 0, .. })
        ));
        assert!(matches!(
            Graph::from_edge_list(3, &[(2, 2)]),
            Err(Error::SelfLoop(2))
        ));
    }

    #[test]
    fn cliques_of_small_graphs() {
        assert_eq!(
            c4().maximal_cliques().cliques,
            vec![vec![0, 1], vec![0, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(Graph::complete(3).maximal_cliques().cliques, vec![vec![0, 1, 2]]);
        assert_eq!(
            Graph::empty(3).maximal_cliques().cliques,
            vec![vec![0], vec![1], vec![2]]
        );
    }

    #[test]
    fn nu_counts_examples() {
        assert_eq!(c4().nu_counts(), vec![2, 1, 1, 0]);
        assert_eq!(Graph::complete(3).nu_counts(), vec![2, 1, 0]);
        assert_eq!(Graph::empty(5).nu_counts(), vec![0; 5]);
    }

    #[test]
    fn decomposability_examples() {
        assert!(!c4().is_decomposable());
        assert!(Graph::complete(6).is_decomposable());
        for mask in 0..8 {
            assert!(Graph::from_mask(3, mask).is_decomposable());
        }
    }

    #[test]
    fn toggles() {
        let g = c4();
        let h = g.toggle_edge(0, 3).unwrap();
        assert_eq!(h.n_edges(), 5);
        assert_eq!(h.toggle_edge(0, 3).unwrap(), g);
        assert_eq!(
            Graph::empty(2).toggle_edge(0, 1).unwrap(),
            Graph::complete(2)
        );
        let path = Graph::complete(3).toggle_edge(0, 1).unwrap();
        assert_eq!(path.edge_list(), vec![(1, 3), (2, 3)]);
        assert!(matches!(g.toggle_edge(1, 1), Err(Error::SelfLoop(2))));
    }

    #[test]
    fn mask_round_trip_and_pair_index() {
        let p = 5;
        for (k, (i, j)) in pair_list(p).into_iter().enumerate() {
            assert_eq!(pair_index(p, i, j), k);
            assert_eq!(pair_index(p, j, i), k);
        }
        let g = c4();
        assert_eq!(Graph::from_mask(4, g.mask()), g);
    }

    #[test]
    fn separators_of_path_and_forest() {
        let path = Graph::from_edge_list(3, &[(1, 2), (2, 3)]).unwrap();
        assert_eq!(path.separators().unwrap(), vec![vec![1]]);
        let forest = Graph::from_edge_list(4, &[(1, 2)]).unwrap();
        assert_eq!(forest.separators().unwrap(), vec![Vec::<usize>::new(); 2]);
        assert!(matches!(c4().separators(), Err(Error::NotDecomposable)));
    }

    #[test]
    fn display_uses_one_based_labels() {
        assert_eq!(c4().to_string(), "4\n1 2\n1 3\n2 4\n3 4\n");
    }
}
