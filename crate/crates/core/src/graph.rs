//! Undirected simple connected graphs and the edge-list text format.
//!
//! Vertices are 0-based internally. Every textual surface (edge lists,
//! state strings, traces) uses 1-based vertex ids.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: duplicate edge {u}-{v}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { line: usize, vertex: usize, n: usize },
    #[error("graph is disconnected: vertex {vertex} unreachable from vertex 1")]
    Disconnected { vertex: usize },
    #[error("expected {expected} edges, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("graph must have at least one vertex")]
    Empty,
}

/// A finite simple connected undirected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    closed: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph from 0-based edges. `lines` is only used for error
    /// reporting; pass `None` to number edges by position.
    fn build(n: usize, edges: &[(usize, usize)], lines: Option<&[usize]>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let line_of = |i: usize| lines.map_or(i + 1, |l| l[i]);
        let mut adjacency = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        let mut canonical = Vec::with_capacity(edges.len());
        for (i, &(u, v)) in edges.iter().enumerate() {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { line: line_of(i), vertex: w + 1, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { line: line_of(i), vertex: u + 1 });
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge { line: line_of(i), u: u + 1, v: v + 1 });
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            canonical.push(key);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        canonical.sort_unstable();
        let closed = adjacency
            .iter()
            .enumerate()
            .map(|(v, nbrs)| {
                let mut c = nbrs.clone();
                c.push(v);
                c.sort_unstable();
                c
            })
            .collect();
        let g = Graph { adjacency, closed, edges: canonical };
        let dist = g.distances_from(0);
        if let Some(v) = dist.iter().position(Option::is_none) {
            return Err(GraphError::Disconnected { vertex: v + 1 });
        }
        Ok(g)
    }

    /// Builds a validated graph from 1-based edge pairs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut zero = Vec::with_capacity(edges.len());
        for (i, &(u, v)) in edges.iter().enumerate() {
            for w in [u, v] {
                if w == 0 || w > n {
                    return Err(GraphError::VertexOutOfRange { line: i + 1, vertex: w, n });
                }
            }
            zero.push((u - 1, v - 1));
        }
        Self::build(n, &zero, None)
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical 0-based edge list, each pair with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// N[v] = N(v) ∪ {v}, sorted ascending.
    pub fn closed_neighborhood(&self, v: usize) -> &[usize] {
        &self.closed[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// BFS distances from `src`; `None` marks unreachable vertices.
    pub fn distances_from(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        dist[src] = Some(0);
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or(0);
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// All-pairs shortest path lengths.
    pub fn distance_matrix(&self) -> Vec<Vec<usize>> {
        (0..self.vertex_count())
            .map(|v| self.distances_from(v).into_iter().map(|d| d.unwrap_or(usize::MAX)).collect())
            .collect()
    }

    /// Serializes to the canonical edge-list text (`u < v`, lines sorted).
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.vertex_count(), self.edge_count());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{} {}", u + 1, v + 1);
        }
        out
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        Self::from_edges(n, &edges).expect("path graph is valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let mut edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        edges.push((n, 1));
        Self::from_edges(n, &edges).expect("cycle graph is valid")
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 1..=n {
            for v in u + 1..=n {
                edges.push((u, v));
            }
        }
        Self::from_edges(n, &edges).expect("complete graph is valid")
    }

    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (2..=leaves + 1).map(|v| (1, v)).collect();
        Self::from_edges(leaves + 1, &edges).expect("star graph is valid")
    }

    /// Outer 5-cycle 1..5, inner pentagram 6..10, spokes i -- i+5.
    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i + 1, (i + 1) % 5 + 1));
            edges.push((i + 6, (i + 2) % 5 + 6));
            edges.push((i + 1, i + 6));
        }
        Self::from_edges(10, &edges).expect("Petersen graph is valid")
    }

    /// The 9-vertex tree of the delayed-capture example: path 1..7 with a
    /// pendant path 5-8-9.
    pub fn delayed_capture_example() -> Self {
        Self::from_edges(9, &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (5, 8), (8, 9)])
            .expect("example graph is valid")
    }
}

/// Parses the edge-list format: a header `n m`, then `m` lines `u v`
/// (1-based). Blank lines and lines starting with `#` are ignored.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(GraphError::Parse {
                line: line_no,
                message: format!("expected two integers, found {:?}", line),
            });
        }
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| GraphError::Parse { line: line_no, message: format!("invalid integer {:?}", s) })
        };
        let (a, b) = (parse(fields[0])?, parse(fields[1])?);
        match header {
            None => header = Some((a, b)),
            Some((n, _)) => {
                for w in [a, b] {
                    if w == 0 || w > n {
                        return Err(GraphError::VertexOutOfRange { line: line_no, vertex: w, n });
                    }
                }
                edges.push((a - 1, b - 1));
                lines.push(line_no);
            }
        }
    }
    let (n, m) = header.ok_or(GraphError::Parse { line: 0, message: "missing header line".into() })?;
    if edges.len() != m {
        return Err(GraphError::EdgeCount { expected: m, found: edges.len() });
    }
    Graph::build(n, &edges, Some(&lines))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG: &str = "9 8\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n5 8\n8 9\n";

    fn one_based(g: &Graph, v: usize) -> Vec<usize> {
        g.closed_neighborhood(v - 1).iter().map(|w| w + 1).collect()
    }

    #[test]
    fn parses_example_tree() {
        let g = parse_graph(FIG).unwrap();
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.edge_count(), 8);
        assert_eq!(g, Graph::delayed_capture_example());
        assert_eq!(one_based(&g, 5), vec![4, 5, 6, 8]);
        assert_eq!(one_based(&g, 9), vec![8, 9]);
    }

    #[test]
    fn smallest_graph() {
        let g = parse_graph("2 1\n1 2").unwrap();
        assert_eq!(one_based(&g, 1), vec![1, 2]);
    }

    #[test]
    fn rejects_duplicate_edge() {
        let err = parse_graph("3 2\n1 2\n1 2\n").unwrap_err();
        assert_eq!(err, GraphError::DuplicateEdge { line: 3, u: 1, v: 2 });
        let err = parse_graph("3 2\n1 2\n2 1\n").unwrap_err();
        assert!(matches!(err, GraphError::DuplicateEdge { line: 3, .. }));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(parse_graph("2 1\n1 1\n"), Err(GraphError::SelfLoop { line: 2, vertex: 1 })));
        assert!(matches!(parse_graph("2 1\n1 3\n"), Err(GraphError::VertexOutOfRange { vertex: 3, .. })));
        assert!(matches!(parse_graph("4 2\n1 2\n3 4\n"), Err(GraphError::Disconnected { vertex: 3 })));
        assert!(matches!(parse_graph("2 1\n1 x\n"), Err(GraphError::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("3 3\n1 2\n2 3\n"), Err(GraphError::EdgeCount { .. })));
        assert!(matches!(parse_graph("# only comments\n"), Err(GraphError::Parse { .. })));
    }

    #[test]
    fn comments_are_skipped() {
        let g = parse_graph("# a path\n3 2\n# edges\n1 2\n\n2 3\n").unwrap();
        assert_eq!(g, Graph::path(3));
    }

    #[test]
    fn petersen_is_cubic() {
        let g = Graph::petersen();
        assert_eq!(g.edge_count(), 15);
        assert!((0..10).all(|v| g.degree(v) == 3));
    }

    #[test]
    fn round_trip_is_canonical() {
        let text = "4 4\n4 1\n3 4\n2 3\n2 1\n";
        let g = parse_graph(text).unwrap();
        let canon = g.to_edge_list();
        assert_eq!(canon, "4 4\n1 2\n1 4\n2 3\n3 4\n");
        assert_eq!(parse_graph(&canon).unwrap().to_edge_list(), canon);
    }
}
