//! Exact matching solvers.
//!
//! * [`max_weight_bipartite_matching`]: Hungarian method with potentials,
//!   `O(n^2 m)` on the dense `n x m` weight matrix (`n <= m`).
//! * [`max_cardinality_matching`]: Edmonds' blossom algorithm, `O(V^3)`.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightedEdge {
    pub left: usize,
    pub right: usize,
    pub weight: i64,
}

/// Bipartite graph with non-negative integer edge weights. In the allocators
/// the left side holds channels and the right side devices.
#[derive(Debug, Clone, Default)]
pub struct WeightedBipartiteGraph {
    pub n_left: usize,
    pub n_right: usize,
    pub edges: Vec<WeightedEdge>,
}

impl WeightedBipartiteGraph {
    pub fn new(n_left: usize, n_right: usize) -> Self {
        Self { n_left, n_right, edges: Vec::new() }
    }

    pub fn add_edge(&mut self, left: usize, right: usize, weight: i64) {
        assert!(left < self.n_left && right < self.n_right, "edge endpoint out of range");
        assert!(weight >= 0, "edge weights must be non-negative");
        self.edges.push(WeightedEdge { left, right, weight });
    }
}

/// Maximum total weight matching. Returned edges are sorted by left vertex.
///
/// Among maximum-weight matchings, ones using lower right-vertex ids are
/// preferred: each edge carries a bonus that is too small to trade against a
/// unit of real weight.
pub fn max_weight_bipartite_matching(g: &WeightedBipartiteGraph) -> Vec<WeightedEdge> {
    if g.edges.is_empty() || g.n_left == 0 || g.n_right == 0 {
        return Vec::new();
    }
    let scale = (g.n_left as i64) * (g.n_right as i64) + 1;
    let mut best: Vec<Vec<Option<i64>>> = vec![vec![None; g.n_right]; g.n_left];
    for e in &g.edges {
        let slot = &mut best[e.left][e.right];
        *slot = Some(slot.map_or(e.weight, |w: i64| w.max(e.weight)));
    }
    let scaled = |l: usize, r: usize| -> i64 { best[l][r].map_or(0, |w| w * scale + (g.n_right - r) as i64) };

    // Rows must be the smaller side.
    let transpose = g.n_left > g.n_right;
    let (rows, cols) = if transpose { (g.n_right, g.n_left) } else { (g.n_left, g.n_right) };
    let cost = |i: usize, j: usize| -> i64 {
        if transpose {
            -scaled(j, i)
        } else {
            -scaled(i, j)
        }
    };
    let assignment = hungarian_min_cost(rows, cols, cost);

    let mut out: Vec<WeightedEdge> = assignment
        .into_iter()
        .enumerate()
        .filter_map(|(row, col)| {
            let (l, r) = if transpose { (col, row) } else { (row, col) };
            best[l][r].map(|weight| WeightedEdge { left: l, right: r, weight })
        })
        .collect();
    out.sort_by_key(|e| (e.left, e.right));
    out
}

/// Assigns every row to a distinct column minimising total cost. Requires
/// `rows <= cols`. Returns the column of each row.
fn hungarian_min_cost(rows: usize, cols: usize, cost: impl Fn(usize, usize) -> i64) -> Vec<usize> {
    debug_assert!(rows <= cols);
    const INF: i64 = i64::MAX / 4;
    let (n, m) = (rows, cols);
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![INF; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = INF;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![usize::MAX; n];
    for j in 1..=m {
        if p[j] != 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    row_to_col
}

/// Simple undirected graph.
#[derive(Debug, Clone, Default)]
pub struct GeneralGraph {
    adj: Vec<Vec<usize>>,
}

impl GeneralGraph {
    pub fn new(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n] }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    /// Adds `{a, b}`; self-loops and duplicates are ignored.
    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a == b || self.adj[a].contains(&b) {
            return;
        }
        self.adj[a].push(b);
        self.adj[b].push(a);
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(a, ns)| ns.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }
}

const NONE: usize = usize::MAX;

struct Blossom<'g> {
    g: &'g GeneralGraph,
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: VecDeque<usize>,
}

impl<'g> Blossom<'g> {
    fn new(g: &'g GeneralGraph) -> Self {
        let n = g.vertex_count();
        Self {
            g,
            mate: vec![NONE; n],
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
            queue: VecDeque::new(),
        }
    }

    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.mate.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// BFS for an augmenting path from `root`; returns its free endpoint.
    fn find_path(&mut self, root: usize) -> Option<usize> {
        let n = self.mate.len();
        self.used.iter_mut().for_each(|u| *u = false);
        self.parent.iter_mut().for_each(|p| *p = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for &to in self.g.neighbors(v) {
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    self.queue.push_back(next);
                }
            }
        }
        None
    }

    fn augment(&mut self, mut v: usize) {
        while v != NONE {
            let pv = self.parent[v];
            let ppv = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = ppv;
        }
    }
}

/// Maximum cardinality matching on a general graph. Pairs are returned as
/// `(a, b)` with `a < b`, sorted.
pub fn max_cardinality_matching(g: &GeneralGraph) -> Vec<(usize, usize)> {
    let n = g.vertex_count();
    let mut state = Blossom::new(g);
    for v in 0..n {
        if state.mate[v] == NONE {
            if let Some(end) = state.find_path(v) {
                state.augment(end);
            }
        }
    }
    let mut out: Vec<(usize, usize)> =
        (0..n).filter(|&v| state.mate[v] != NONE && v < state.mate[v]).map(|v| (v, state.mate[v])).collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_bipartite() {
        let g = WeightedBipartiteGraph::new(3, 4);
        assert!(max_weight_bipartite_matching(&g).is_empty());
    }

    #[test]
    fn diagonal_dominance() {
        let mut g = WeightedBipartiteGraph::new(2, 2);
        g.add_edge(0, 0, 5);
        g.add_edge(0, 1, 1);
        g.add_edge(1, 0, 1);
        g.add_edge(1, 1, 5);
        let m = max_weight_bipartite_matching(&g);
        assert_eq!(m.iter().map(|e| (e.left, e.right)).collect::<Vec<_>>(), vec![(0, 0), (1, 1)]);
        assert_eq!(m.iter().map(|e| e.weight).sum::<i64>(), 10);
    }

    #[test]
    fn more_left_than_right() {
        let mut g = WeightedBipartiteGraph::new(3, 1);
        g.add_edge(0, 0, 2);
        g.add_edge(1, 0, 7);
        g.add_edge(2, 0, 3);
        let m = max_weight_bipartite_matching(&g);
        assert_eq!(m, vec![WeightedEdge { left: 1, right: 0, weight: 7 }]);
    }

    #[test]
    fn prefers_low_ids_on_ties() {
        let mut g = WeightedBipartiteGraph::new(1, 3);
        for r in 0..3 {
            g.add_edge(0, r, 4);
        }
        let m = max_weight_bipartite_matching(&g);
        assert_eq!(m[0].right, 0);
    }

    #[test]
    fn sparse_rows_are_not_forced() {
        // Row 1 has no edges; it must not steal an edge from row 0.
        let mut g = WeightedBipartiteGraph::new(2, 2);
        g.add_edge(0, 1, 3);
        let m = max_weight_bipartite_matching(&g);
        assert_eq!(m, vec![WeightedEdge { left: 0, right: 1, weight: 3 }]);
    }

    #[test]
    fn triangle_and_odd_cycle() {
        let mut k3 = GeneralGraph::new(3);
        k3.add_edge(0, 1);
        k3.add_edge(1, 2);
        k3.add_edge(2, 0);
        assert_eq!(max_cardinality_matching(&k3).len(), 1);

        let mut c5 = GeneralGraph::new(5);
        for i in 0..5 {
            c5.add_edge(i, (i + 1) % 5);
        }
        assert_eq!(max_cardinality_matching(&c5).len(), 2);
    }

    #[test]
    fn path_and_blossom_with_stem() {
        let mut p4 = GeneralGraph::new(4);
        p4.add_edge(0, 1);
        p4.add_edge(1, 2);
        p4.add_edge(2, 3);
        assert_eq!(max_cardinality_matching(&p4), vec![(0, 1), (2, 3)]);

        // Odd cycle 1-2-3-4-5 with pendant 0 on 1 and pendant 6 on 4.
        let mut g = GeneralGraph::new(7);
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (4, 6)] {
            g.add_edge(a, b);
        }
        assert_eq!(max_cardinality_matching(&g).len(), 3);
    }

    #[test]
    fn graph_ignores_loops_and_duplicates() {
        let mut g = GeneralGraph::new(3);
        g.add_edge(0, 0);
        g.add_edge(0, 1);
        g.add_edge(1, 0);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }
}
