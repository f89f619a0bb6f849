//! Simple undirected graphs with a dense adjacency matrix and sorted
//! neighbour lists.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    n: usize,
    adj: Vec<bool>,
    neighbors: Vec<Vec<usize>>,
}

impl UndirectedGraph {
    pub fn empty(n: usize) -> Self {
        Self { n, adj: vec![false; n * n], neighbors: vec![Vec::new(); n] }
    }

    /// Builds a graph from `(i, j)` pairs. Self-loops and duplicates are ignored.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::empty(n);
        for (i, j) in edges {
            g.add_edge(i, j);
        }
        g.sort_neighbors();
        g
    }

    /// Builds a graph from a row-major `n x n` predicate; only `i < j` is read.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                if f(i, j) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    fn add_edge(&mut self, i: usize, j: usize) {
        assert!(i < self.n && j < self.n, "edge ({i}, {j}) out of range for {} nodes", self.n);
        if i == j || self.adj[i * self.n + j] {
            return;
        }
        self.adj[i * self.n + j] = true;
        self.adj[j * self.n + i] = true;
        self.neighbors[i].push(j);
        self.neighbors[j].push(i);
    }

    fn sort_neighbors(&mut self) {
        for l in &mut self.neighbors {
            l.sort_unstable();
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n + j]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// Edges with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.neighbors[i].iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn edge_list_csv(&self) -> String {
        let mut s = String::from("i,j\n");
        for (i, j) in self.edges() {
            let _ = writeln!(s, "{i},{j}");
        }
        s
    }

    pub fn matrix_csv(&self) -> String {
        let mut s = String::with_capacity(self.n * self.n * 2);
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    s.push(',');
                }
                s.push(if self.has_edge(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    /// Parses the edge-list format; `#` lines and the `i,j` header are skipped.
    pub fn from_edge_list_csv(n: usize, text: &str) -> Result<Self, String> {
        let mut edges = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line == "i,j" {
                continue;
            }
            let (a, b) = line.split_once(',').ok_or_else(|| format!("line {}: expected `i,j`", ln + 1))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&v| v < n)
                    .ok_or_else(|| format!("line {}: bad node index `{s}`", ln + 1))
            };
            edges.push((parse(a)?, parse(b)?));
        }
        Ok(Self::from_edges(n, edges))
    }
}
