//! Isomorphisms of diagrams by backtracking over initial-atom bijections.
//!
//! An isomorphism is determined by its initial component; the component at
//! every other object is induced and must be a well-defined, weight-preserving
//! bijection. Partial assignments are pruned as soon as an induced component
//! becomes inconsistent.

use super::ProbDiagram;

const WEIGHT_EPS: f64 = 1e-10;

fn sorted_weights(d: &ProbDiagram, i: usize) -> Vec<f64> {
    let mut w = d.weights(i).to_vec();
    w.sort_by(f64::total_cmp);
    w
}

fn compatible(x: &ProbDiagram, y: &ProbDiagram) -> bool {
    if **x.shape() != **y.shape() {
        return false;
    }
    (0..x.shape().len()).all(|i| {
        x.set(i).len() == y.set(i).len()
            && sorted_weights(x, i).iter().zip(sorted_weights(y, i)).all(|(a, b)| (a - b).abs() <= WEIGHT_EPS)
    })
}

struct Search<'a> {
    x: &'a ProbDiagram,
    y: &'a ProbDiagram,
    fwd: Vec<Vec<Option<usize>>>,
    bwd: Vec<Vec<Option<usize>>>,
    used: Vec<bool>,
}

impl Search<'_> {
    /// Tries `s -> t`; on success returns the component entries it added.
    fn assign(&mut self, s: usize, t: usize) -> Option<Vec<(usize, usize, usize)>> {
        let n = self.x.shape().len();
        let mut fresh = Vec::new();
        for i in 0..n {
            let a = self.x.map(i)[s];
            let b = self.y.map(i)[t];
            let consistent = match (self.fwd[i][a], self.bwd[i][b]) {
                (Some(b2), _) if b2 != b => false,
                (_, Some(a2)) if a2 != a => false,
                (Some(_), Some(_)) => true,
                _ => {
                    let ok = (self.x.weights(i)[a] - self.y.weights(i)[b]).abs() <= WEIGHT_EPS;
                    if ok {
                        self.fwd[i][a] = Some(b);
                        self.bwd[i][b] = Some(a);
                        fresh.push((i, a, b));
                    }
                    ok
                }
            };
            if !consistent {
                self.release(fresh);
                return None;
            }
        }
        Some(fresh)
    }

    fn release(&mut self, entries: Vec<(usize, usize, usize)>) {
        for (i, a, b) in entries {
            self.fwd[i][a] = None;
            self.bwd[i][b] = None;
        }
    }

    fn components(&self) -> Vec<Vec<usize>> {
        self.fwd.iter().map(|c| c.iter().map(|v| v.expect("complete assignment")).collect()).collect()
    }

    fn run<F: FnMut(Vec<Vec<usize>>) -> bool>(&mut self, s: usize, visit: &mut F) -> bool {
        if s == self.x.initial_len() {
            return visit(self.components());
        }
        for t in 0..self.y.initial_len() {
            if self.used[t] {
                continue;
            }
            if let Some(entries) = self.assign(s, t) {
                self.used[t] = true;
                let go_on = self.run(s + 1, visit);
                self.used[t] = false;
                self.release(entries);
                if !go_on {
                    return false;
                }
            }
        }
        true
    }
}

/// Calls `visit` with the per-object components of every isomorphism
/// `x -> y`, in lexicographic order of the initial component, until it
/// returns `false`.
pub fn for_each_isomorphism<F>(x: &ProbDiagram, y: &ProbDiagram, mut visit: F)
where
    F: FnMut(Vec<Vec<usize>>) -> bool,
{
    if !compatible(x, y) {
        return;
    }
    let n = x.shape().len();
    let mut search = Search {
        x,
        y,
        fwd: (0..n).map(|i| vec![None; x.set(i).len()]).collect(),
        bwd: (0..n).map(|i| vec![None; y.set(i).len()]).collect(),
        used: vec![false; y.initial_len()],
    };
    search.run(0, &mut visit);
}

/// The per-object components of some isomorphism `x -> y`, if one exists.
pub fn find_isomorphism(x: &ProbDiagram, y: &ProbDiagram) -> Option<Vec<Vec<usize>>> {
    let mut found = None;
    for_each_isomorphism(x, y, |c| {
        found = Some(c);
        false
    });
    found
}

pub fn is_isomorphic(x: &ProbDiagram, y: &ProbDiagram) -> bool {
    find_isomorphism(x, y).is_some()
}
