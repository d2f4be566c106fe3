use std::collections::BTreeSet;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Simple undirected graph on nodes `0..n` (no self-loops, no multi-edges).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl UndirectedGraph {
    pub fn empty(n: usize) -> Self {
        UndirectedGraph {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = UndirectedGraph::empty(n);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = UndirectedGraph::empty(n);
        for a in 0..n {
            for b in a + 1..n {
                g.edges.insert((a, b));
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = UndirectedGraph::empty(n);
        for a in 1..n {
            g.edges.insert((a - 1, a));
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = UndirectedGraph::path(n);
        if n > 2 {
            g.edges.insert((0, n - 1));
        }
        g
    }

    pub fn star(n: usize) -> Self {
        let mut g = UndirectedGraph::empty(n);
        for a in 1..n {
            g.edges.insert((0, a));
        }
        g
    }

    /// Random spanning tree plus `extra_edges` random chords.
    pub fn random_connected<R: Rng + ?Sized>(n: usize, extra_edges: usize, rng: &mut R) -> Self {
        let mut g = UndirectedGraph::empty(n);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        for k in 1..n {
            let parent = order[rng.random_range(0..k)];
            g.insert(order[k], parent);
        }
        let max_edges = n * n.saturating_sub(1) / 2;
        let target = (g.edge_count() + extra_edges).min(max_edges);
        while g.edge_count() < target {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a != b {
                g.insert(a, b);
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        if a >= self.n || b >= self.n {
            return Err(Error::Construction(format!(
                "edge ({a}, {b}) out of range for {} nodes",
                self.n
            )));
        }
        if a == b {
            return Err(Error::Construction(format!("self-loop at node {a}")));
        }
        self.insert(a, b);
        Ok(())
    }

    fn insert(&mut self, a: usize, b: usize) -> bool {
        self.edges.insert((a.min(b), a.max(b)))
    }

    fn toggle(&mut self, a: usize, b: usize) {
        let key = (a.min(b), a.max(b));
        if !self.edges.remove(&key) {
            self.edges.insert(key);
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Combinatorial Laplacian `D - A`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for &(a, b) in &self.edges {
            l[(a, a)] += 1.0;
            l[(b, b)] += 1.0;
            l[(a, b)] -= 1.0;
            l[(b, a)] -= 1.0;
        }
        l
    }
}

/// Second smallest Laplacian eigenvalue; `0` for graphs with fewer than two nodes.
pub fn algebraic_connectivity(g: &UndirectedGraph) -> f64 {
    if g.n() < 2 {
        return 0.0;
    }
    let mut eig = SymmetricEigen::new(g.laplacian()).eigenvalues.as_slice().to_vec();
    eig.sort_by(f64::total_cmp);
    eig[1].max(0.0)
}

const SEARCH_RESTARTS: usize = 400;
const SEARCH_STEPS: usize = 400;

/// Connected graph on `n` nodes whose algebraic connectivity is within `tol`
/// of `target`.
///
/// Path, cycle, star and complete graphs are tried first; after that a
/// seeded local search toggles random edges from random spanning trees,
/// accepting moves that keep the graph connected and do not increase the
/// distance to the target.
pub fn graph_with_target_connectivity(
    n: usize,
    target: f64,
    tol: f64,
    seed: u64,
) -> Result<UndirectedGraph> {
    if n < 2 {
        return Err(Error::Parameter("need at least two nodes".into()));
    }
    if !(target > 0.0 && target <= n as f64) {
        return Err(Error::Parameter(format!(
            "target algebraic connectivity must lie in (0, {n}], got {target}"
        )));
    }
    if !(tol >= 0.0) {
        return Err(Error::Parameter(format!("tolerance must be nonnegative, got {tol}")));
    }
    let mut best_gap = f64::INFINITY;
    let mut closest = 0.0;
    let mut consider = |g: &UndirectedGraph| -> Option<f64> {
        let l2 = algebraic_connectivity(g);
        let gap = (l2 - target).abs();
        if gap < best_gap {
            best_gap = gap;
            closest = l2;
        }
        (gap <= tol).then_some(gap)
    };
    let families = [
        UndirectedGraph::path(n),
        UndirectedGraph::cycle(n),
        UndirectedGraph::star(n),
        UndirectedGraph::complete(n),
    ];
    for g in families {
        if consider(&g).is_some() {
            return Ok(g);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SEARCH_RESTARTS {
        let mut g = UndirectedGraph::random_connected(n, 0, &mut rng);
        let mut gap = (algebraic_connectivity(&g) - target).abs();
        for _ in 0..SEARCH_STEPS {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a == b {
                continue;
            }
            g.toggle(a, b);
            if !g.is_connected() {
                g.toggle(a, b);
                continue;
            }
            match consider(&g) {
                Some(_) => return Ok(g),
                None => {
                    let new_gap = (algebraic_connectivity(&g) - target).abs();
                    if new_gap <= gap {
                        gap = new_gap;
                    } else {
                        g.toggle(a, b);
                    }
                }
            }
        }
    }
    Err(Error::GraphNotFound { target, closest })
}

/// Reads a pool of graphs from edge-list text: one `u v` pair per line
/// (0-indexed), graphs separated by blank lines, `#` starts a comment.
/// Every graph gets `n` nodes.
pub fn parse_graph_pool(text: &str, n: usize) -> Result<Vec<UndirectedGraph>> {
    let mut pool = Vec::new();
    let mut current: Option<UndirectedGraph> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            if raw.trim().is_empty() {
                pool.extend(current.take());
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let parse = |s: Option<&str>| -> Result<usize> {
            s.and_then(|v| v.parse().ok()).ok_or_else(|| {
                Error::Config(format!("line {}: expected `u v`, got `{line}`", lineno + 1))
            })
        };
        let a = parse(parts.next())?;
        let b = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(Error::Config(format!(
                "line {}: expected `u v`, got `{line}`",
                lineno + 1
            )));
        }
        current
            .get_or_insert_with(|| UndirectedGraph::empty(n))
            .add_edge(a, b)
            .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
    }
    pool.extend(current);
    if pool.is_empty() {
        return Err(Error::Config("graph pool is empty".into()));
    }
    Ok(pool)
}

/// Inverse of [`parse_graph_pool`].
pub fn format_graph_pool(pool: &[UndirectedGraph]) -> String {
    pool.iter()
        .map(|g| {
            g.edges()
                .map(|(a, b)| format!("{a} {b}\n"))
                .collect::<String>()
        })
        .collect::<Vec<_>>()
        .join("\n")
}
