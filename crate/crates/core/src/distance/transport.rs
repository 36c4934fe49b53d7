//! Searches over the transportation polytope of joint distributions with
//! fixed marginals.
//!
//! Vertices are the feasible basic solutions: their supports are contained
//! in spanning trees of the complete bipartite graph `K_{m,k}`, and a
//! spanning tree determines its flow by peeling leaves. Enumerating spanning
//! trees therefore reaches every vertex (degenerate vertices more than once).

use super::coupling::Cell;

const FLOW_EPS: f64 = 1e-13;

/// Undo-able union-find over `m + k` nodes.
struct Forest {
    parent: Vec<usize>,
    size: Vec<usize>,
    history: Vec<(usize, usize)>,
}

impl Forest {
    fn new(n: usize) -> Self {
        Forest { parent: (0..n).collect(), size: vec![1; n], history: Vec::new() }
    }

    fn root(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.root(a), self.root(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.history.push((ra, rb));
        true
    }

    fn undo(&mut self) {
        let (ra, rb) = self.history.pop().expect("undo after union");
        self.parent[rb] = rb;
        self.size[ra] -= self.size[rb];
    }
}

/// The flow on a spanning tree, or `None` if some edge would be negative.
fn tree_flow(rows: &[f64], cols: &[f64], edges: &[(usize, usize)]) -> Option<Vec<Cell>> {
    let m = rows.len();
    let n = m + cols.len();
    let mut rest: Vec<f64> = rows.iter().chain(cols).copied().collect();
    let mut degree = vec![0usize; n];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (e, &(i, j)) in edges.iter().enumerate() {
        degree[i] += 1;
        degree[m + j] += 1;
        incident[i].push(e);
        incident[m + j].push(e);
    }
    let mut flow = vec![0.0; edges.len()];
    let mut done = vec![false; edges.len()];
    let mut stack: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    while let Some(v) = stack.pop() {
        if degree[v] != 1 {
            continue;
        }
        let e = *incident[v].iter().find(|&&e| !done[e]).expect("leaf has an edge");
        let (i, j) = edges[e];
        let other = if v == i { m + j } else { i };
        let f = rest[v];
        if f < -FLOW_EPS {
            return None;
        }
        flow[e] = f.max(0.0);
        done[e] = true;
        rest[v] = 0.0;
        rest[other] -= f;
        degree[v] -= 1;
        degree[other] -= 1;
        if degree[other] == 1 {
            stack.push(other);
        }
    }
    if rest.iter().any(|r| r.abs() > 1e-9) {
        return None;
    }
    Some(edges.iter().zip(flow).filter(|(_, f)| *f > FLOW_EPS).map(|(&(i, j), f)| (i, j, f)).collect())
}

/// Calls `visit` on every vertex of the polytope (with repetitions at
/// degenerate vertices), in a fixed order.
pub(crate) fn for_each_vertex<F: FnMut(&[Cell])>(rows: &[f64], cols: &[f64], mut visit: F) {
    let (m, k) = (rows.len(), cols.len());
    let all: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    let need = m + k - 1;
    let mut forest = Forest::new(m + k);
    let mut chosen = Vec::with_capacity(need);
    fn go<F: FnMut(&[Cell])>(
        start: usize,
        all: &[(usize, usize)],
        need: usize,
        m: usize,
        rows: &[f64],
        cols: &[f64],
        forest: &mut Forest,
        chosen: &mut Vec<(usize, usize)>,
        visit: &mut F,
    ) {
        if chosen.len() == need {
            if let Some(cells) = tree_flow(rows, cols, chosen) {
                visit(&cells);
            }
            return;
        }
        for e in start..all.len() {
            if all.len() - e < need - chosen.len() {
                break;
            }
            let (i, j) = all[e];
            if forest.union(i, m + j) {
                chosen.push((i, j));
                go(e + 1, all, need, m, rows, cols, forest, chosen, visit);
                chosen.pop();
                forest.undo();
            }
        }
    }
    go(0, &all, need, m, rows, cols, &mut forest, &mut chosen, &mut visit);
}

/// Minimizes `objective` over the vertices; the first minimum in
/// enumeration order wins ties.
pub(crate) fn minimize_over_vertices<F: FnMut(&[Cell]) -> f64>(
    rows: &[f64],
    cols: &[f64],
    mut objective: F,
) -> (Vec<Cell>, f64) {
    let mut best: Option<(Vec<Cell>, f64)> = None;
    for_each_vertex(rows, cols, |cells| {
        let v = objective(cells);
        if best.as_ref().is_none_or(|b| v < b.1 - 1e-15) {
            best = Some((cells.to_vec(), v));
        }
    });
    best.expect("the transportation polytope is non-empty")
}

/// Minimum-cost transport for a linear cost `cost[i][j]`.
pub(crate) fn min_linear_transport(rows: &[f64], cols: &[f64], cost: &[Vec<f64>]) -> (Vec<Cell>, f64) {
    minimize_over_vertices(rows, cols, |cells| cells.iter().map(|&(i, j, w)| w * cost[i][j]).sum())
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Descending-mass matching: repeatedly pair the largest remaining row and
/// column masses.
pub(crate) fn greedy(rows: &[f64], cols: &[f64]) -> Vec<Cell> {
    let mut r = rows.to_vec();
    let mut c = cols.to_vec();
    let mut cells = Vec::new();
    for _ in 0..rows.len() + cols.len() - 1 {
        let (i, j) = (argmax(&r), argmax(&c));
        let t = r[i].min(c[j]);
        if t <= FLOW_EPS {
            break;
        }
        cells.push((i, j, t));
        r[i] -= t;
        c[j] -= t;
    }
    cells
}

/// North-west corner rule in the given order.
pub(crate) fn north_west(rows: &[f64], cols: &[f64]) -> Vec<Cell> {
    let (mut i, mut j) = (0, 0);
    let mut r = rows.to_vec();
    let mut c = cols.to_vec();
    let mut cells = Vec::new();
    while i < r.len() && j < c.len() {
        let t = r[i].min(c[j]);
        if t > FLOW_EPS {
            cells.push((i, j, t));
        }
        r[i] -= t;
        c[j] -= t;
        if r[i] <= FLOW_EPS && i + 1 < r.len() {
            i += 1;
        } else {
            j += 1;
        }
    }
    cells
}

/// A spanning tree containing the support of `cells`, padded with zero
/// edges where the support is a forest.
fn basis_of(m: usize, k: usize, cells: &[Cell]) -> Vec<Cell> {
    let mut forest = Forest::new(m + k);
    let mut basis: Vec<Cell> = Vec::new();
    for &c in cells {
        if forest.union(c.0, m + c.1) {
            basis.push(c);
        }
    }
    for i in 0..m {
        for j in 0..k {
            if basis.len() == m + k - 1 {
                return basis;
            }
            if forest.union(i, m + j) {
                basis.push((i, j, 0.0));
            }
        }
    }
    basis
}

/// Tree path from row `i` to column `j`, as indices into `basis`.
fn tree_path(m: usize, k: usize, basis: &[Cell], i: usize, j: usize) -> Vec<usize> {
    let n = m + k;
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, &(a, b, _)) in basis.iter().enumerate() {
        adj[a].push((m + b, e));
        adj[m + b].push((a, e));
    }
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([i]);
    seen[i] = true;
    while let Some(v) = queue.pop_front() {
        for &(w, e) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some((v, e));
                queue.push_back(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut v = m + j;
    while let Some((u, e)) = prev[v] {
        path.push(e);
        v = u;
    }
    path.reverse();
    path
}

/// Steepest-descent pivoting between adjacent vertices, from the better of
/// the greedy and north-west starts, for at most `max_iter` moves.
pub(crate) fn local_search<F: FnMut(&[Cell]) -> f64>(
    rows: &[f64],
    cols: &[f64],
    mut objective: F,
    max_iter: usize,
) -> (Vec<Cell>, f64) {
    let (m, k) = (rows.len(), cols.len());
    let starts = [greedy(rows, cols), north_west(rows, cols)];
    let mut best: Option<(Vec<Cell>, f64)> = None;
    for start in starts {
        let mut basis = basis_of(m, k, &start);
        let mut value = objective(&start);
        for _ in 0..max_iter {
            let mut step: Option<(Vec<Cell>, f64)> = None;
            for i in 0..m {
                for j in 0..k {
                    if basis.iter().any(|c| c.0 == i && c.1 == j) {
                        continue;
                    }
                    // the cycle enters at (i,j) and alternates along the path row i .. col j
                    let path = tree_path(m, k, &basis, i, j);
                    let theta = path.iter().step_by(2).map(|&e| basis[e].2).fold(f64::INFINITY, f64::min);
                    if theta <= FLOW_EPS {
                        continue;
                    }
                    let mut next = basis.clone();
                    for (pos, &e) in path.iter().enumerate() {
                        next[e].2 += if pos % 2 == 0 { -theta } else { theta };
                    }
                    let leave =
                        path.iter().step_by(2).copied().find(|&e| next[e].2 <= FLOW_EPS).expect("some edge leaves");
                    next[leave] = (i, j, theta);
                    let support: Vec<Cell> = next.iter().copied().filter(|c| c.2 > FLOW_EPS).collect();
                    let v = objective(&support);
                    if v < value - 1e-12 && step.as_ref().is_none_or(|s| v < s.1) {
                        step = Some((next, v));
                    }
                }
            }
            match step {
                Some((next, v)) => {
                    basis = next;
                    value = v;
                }
                None => break,
            }
        }
        let support: Vec<Cell> = basis.into_iter().filter(|c| c.2 > FLOW_EPS).collect();
        if best.as_ref().is_none_or(|b| value < b.1 - 1e-15) {
            best = Some((support, value));
        }
    }
    best.expect("two starts")
}
