use std::sync::Arc;

use crate::category::IndexingCategory;
use crate::diagram::{DiagramFan, DiagramReduction, EntropyVector, ProbDiagram, SetDiagram};
use crate::error::{Error, Result};
use crate::prob::{entropy_of, TOLERANCE};

/// A cell of a joint distribution: `(left initial atom, right initial atom, mass)`.
pub type Cell = (usize, usize, f64);

/// A coupling of two diagrams of the same shape, given by a joint
/// distribution on the product of their initial sets. The apex is the
/// object-wise joint image.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingFan {
    left: ProbDiagram,
    right: ProbDiagram,
    cells: Vec<Cell>,
}

fn same_shape(a: &Arc<IndexingCategory>, b: &Arc<IndexingCategory>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl CouplingFan {
    /// Checks both marginals to within the global tolerance. Cells with zero
    /// mass are dropped and repeated cells merged.
    pub fn new(left: ProbDiagram, right: ProbDiagram, cells: Vec<Cell>) -> Result<Self> {
        if !same_shape(left.shape(), right.shape()) {
            return Err(Error::ShapeMismatch);
        }
        let (m, k) = (left.initial_len(), right.initial_len());
        let mut rows = vec![0.0; m];
        let mut cols = vec![0.0; k];
        for &(a, b, w) in &cells {
            if a >= m || b >= k {
                return Err(Error::BadCoupling(format!("cell ({a},{b}) outside {m}x{k}")));
            }
            if !w.is_finite() || w < -TOLERANCE {
                return Err(Error::BadCoupling(format!("cell ({a},{b}) has mass {w}")));
            }
            rows[a] += w;
            cols[b] += w;
        }
        for (side, got, want) in [("left", &rows, left.pi0()), ("right", &cols, right.pi0())] {
            let gap = got.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
            if gap > TOLERANCE {
                return Err(Error::BadCoupling(format!("{side} marginal off by {gap:e}")));
            }
        }
        Ok(Self::from_trusted(left, right, cells))
    }

    pub(crate) fn from_trusted(left: ProbDiagram, right: ProbDiagram, mut cells: Vec<Cell>) -> Self {
        cells.retain(|c| c.2 > 0.0);
        cells.sort_by_key(|c| (c.0, c.1));
        cells.dedup_by(|b, a| {
            let same = a.0 == b.0 && a.1 == b.1;
            if same {
                a.2 += b.2;
            }
            same
        });
        CouplingFan { left, right, cells }
    }

    pub fn independence(left: &ProbDiagram, right: &ProbDiagram) -> Result<Self> {
        let cells = left
            .pi0()
            .iter()
            .enumerate()
            .flat_map(|(a, &p)| right.pi0().iter().enumerate().map(move |(b, &q)| (a, b, p * q)))
            .collect();
        Self::new(left.clone(), right.clone(), cells)
    }

    /// The identity coupling of a diagram with itself.
    pub fn diagonal(x: &ProbDiagram) -> Self {
        let cells = x.pi0().iter().enumerate().map(|(a, &p)| (a, a, p)).collect();
        Self::from_trusted(x.clone(), x.clone(), cells)
    }

    /// The coupling along an isomorphism with initial component `perm`.
    pub fn from_isomorphism(left: &ProbDiagram, right: &ProbDiagram, perm: &[usize]) -> Result<Self> {
        if perm.len() != left.initial_len() {
            return Err(Error::LengthMismatch(perm.len(), left.initial_len()));
        }
        let cells = perm.iter().enumerate().map(|(a, &b)| (a, b, left.pi0()[a])).collect();
        Self::new(left.clone(), right.clone(), cells)
    }

    pub fn left(&self) -> &ProbDiagram {
        &self.left
    }

    pub fn right(&self) -> &ProbDiagram {
        &self.right
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn transpose(&self) -> Self {
        let cells = self.cells.iter().map(|&(a, b, w)| (b, a, w)).collect();
        Self::from_trusted(self.right.clone(), self.left.clone(), cells)
    }

    /// Atoms of the apex at object `i` as pairs of foot atoms, with the map
    /// from cells and the weights.
    fn apex_object(&self, i: usize) -> (Vec<(usize, usize)>, Vec<usize>, Vec<f64>) {
        let (xm, ym) = (self.left.map(i), self.right.map(i));
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        let mut map = Vec::with_capacity(self.cells.len());
        let mut weights: Vec<f64> = Vec::new();
        for &(a, b, w) in &self.cells {
            let p = (xm[a], ym[b]);
            let k = match pairs.iter().position(|&q| q == p) {
                Some(k) => k,
                None => {
                    pairs.push(p);
                    weights.push(0.0);
                    pairs.len() - 1
                }
            };
            weights[k] += w;
            map.push(k);
        }
        (pairs, map, weights)
    }

    pub fn apex(&self) -> ProbDiagram {
        let shape = self.left.shape().clone();
        let mut sets = Vec::with_capacity(shape.len());
        let mut maps = Vec::with_capacity(shape.len());
        for i in 0..shape.len() {
            let (pairs, map, _) = self.apex_object(i);
            sets.push(
                pairs.iter().map(|&(x, y)| format!("({},{})", self.left.set(i)[x], self.right.set(i)[y])).collect(),
            );
            maps.push(map);
        }
        let pi0 = self.cells.iter().map(|c| c.2).collect();
        let carrier = SetDiagram::new(shape, sets, maps).expect("joint image is a set diagram");
        ProbDiagram::from_trusted(carrier, pi0)
    }

    pub fn apex_entropy_vector(&self) -> EntropyVector {
        EntropyVector((0..self.left.shape().len()).map(|i| entropy_of(&self.apex_object(i).2)).collect())
    }

    /// `kd = sum_i 2 H(Z_i) - H(X_i) - H(Y_i)`.
    pub fn entropy_distance(&self) -> f64 {
        let z = self.apex_entropy_vector();
        z.l1_distance(&self.left.entropy_vector()) + z.l1_distance(&self.right.entropy_vector())
    }

    /// The same coupling as a fan of diagram reductions.
    pub fn to_fan(&self) -> DiagramFan {
        let apex = self.apex();
        let n = apex.shape().len();
        let mut left = Vec::with_capacity(n);
        let mut right = Vec::with_capacity(n);
        for i in 0..n {
            let (pairs, _, _) = self.apex_object(i);
            left.push(pairs.iter().map(|p| p.0).collect());
            right.push(pairs.iter().map(|p| p.1).collect());
        }
        let l = DiagramReduction::new(apex.clone(), self.left.clone(), left)
            .expect("left projection of a coupling is a reduction");
        let r = DiagramReduction::new(apex, self.right.clone(), right)
            .expect("right projection of a coupling is a reduction");
        DiagramFan::new(l, r).expect("legs share the apex")
    }

    fn restrict(&self, keep: impl Fn(&Cell) -> bool) -> Self {
        let cells: Vec<Cell> = self.cells.iter().copied().filter(|c| keep(c)).collect();
        let mass: f64 = cells.iter().map(|c| c.2).sum();
        let mut rows = vec![0.0; self.left.initial_len()];
        let mut cols = vec![0.0; self.right.initial_len()];
        for &(a, b, w) in &cells {
            rows[a] += w / mass;
            cols[b] += w / mass;
        }
        let (left, lmap) = reweighted(&self.left, &rows);
        let (right, rmap) = reweighted(&self.right, &cols);
        let cells = cells.iter().map(|&(a, b, w)| (lmap[a], rmap[b], w / mass)).collect();
        Self::from_trusted(left, right, cells)
    }

    /// The coupling `X|u <- Z|u -> Y'` for an atom `u` of the left foot at
    /// object `i`; `Y'` is the right foot reweighted by the conditional marginal.
    pub fn condition_left(&self, i: usize, u: usize) -> Self {
        let m = self.left.map(i);
        self.restrict(|c| m[c.0] == u)
    }

    pub fn condition_right(&self, i: usize, v: usize) -> Self {
        let m = self.right.map(i);
        self.restrict(|c| m[c.1] == v)
    }
}

/// The diagram on the same carrier with a new initial distribution, and the
/// renumbering of surviving initial atoms.
fn reweighted(d: &ProbDiagram, pi0: &[f64]) -> (ProbDiagram, Vec<usize>) {
    let mut renum = vec![usize::MAX; pi0.len()];
    let mut next = 0;
    for (s, &w) in pi0.iter().enumerate() {
        if w > 0.0 {
            renum[s] = next;
            next += 1;
        }
    }
    let total: f64 = pi0.iter().sum();
    let pi0: Vec<f64> = pi0.iter().map(|w| w / total).collect();
    let out = ProbDiagram::new(d.carrier().clone(), pi0).expect("conditional marginal is a distribution");
    (out, renum)
}

/// Object-wise tensor product of couplings, coupling the tensor products of
/// the feet.
pub fn tensor_couplings(couplings: &[&CouplingFan], budget: u128) -> Result<CouplingFan> {
    let Some(first) = couplings.first() else {
        return Err(Error::LengthMismatch(0, 1));
    };
    let shape = first.left.shape();
    let lefts: Vec<&ProbDiagram> = couplings.iter().map(|c| &c.left).collect();
    let rights: Vec<&ProbDiagram> = couplings.iter().map(|c| &c.right).collect();
    let left = crate::diagram::tensor_all(shape, &lefts, budget)?;
    let right = crate::diagram::tensor_all(shape, &rights, budget)?;
    let mut cells: Vec<Cell> = vec![(0, 0, 1.0)];
    for c in couplings {
        let (m, k) = (c.left.initial_len(), c.right.initial_len());
        cells = cells
            .iter()
            .flat_map(|&(a, b, w)| c.cells.iter().map(move |&(x, y, v)| (a * m + x, b * k + y, w * v)))
            .collect();
    }
    CouplingFan::new(left, right, cells)
}

/// Evaluates `kd` of the couplings of two fixed diagrams directly from a
/// list of cells, reusing scratch buffers.
pub(crate) struct KdObjective<'a> {
    left: &'a ProbDiagram,
    right: &'a ProbDiagram,
    scratch: Vec<Vec<f64>>,
    feet: f64,
}

impl<'a> KdObjective<'a> {
    pub(crate) fn new(left: &'a ProbDiagram, right: &'a ProbDiagram) -> Self {
        let n = left.shape().len();
        let scratch = (0..n).map(|i| vec![0.0; left.set(i).len() * right.set(i).len()]).collect();
        let feet = left.entropy_vector().l1_norm() + right.entropy_vector().l1_norm();
        KdObjective { left, right, scratch, feet }
    }

    pub(crate) fn eval(&mut self, cells: &[Cell]) -> f64 {
        let mut total = 0.0;
        for (i, buf) in self.scratch.iter_mut().enumerate() {
            let (xm, ym) = (self.left.map(i), self.right.map(i));
            let ky = self.right.set(i).len();
            for &(a, b, w) in cells {
                buf[xm[a] * ky + ym[b]] += w;
            }
            let mut h = 0.0;
            for &(a, b, _) in cells {
                let slot = &mut buf[xm[a] * ky + ym[b]];
                if *slot > 0.0 {
                    h -= *slot * slot.ln();
                    *slot = 0.0;
                }
            }
            total += 2.0 * h;
        }
        (total - self.feet).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::ProbSpace;
    use std::f64::consts::LN_2;

    fn single(w: &[f64]) -> ProbDiagram {
        ProbDiagram::single(&ProbSpace::from_weights(w).unwrap())
    }

    #[test]
    fn diagonal_has_zero_distance() {
        let x = single(&[0.2, 0.3, 0.5]);
        assert!(CouplingFan::diagonal(&x).entropy_distance().abs() < 1e-12);
    }

    #[test]
    fn independence_distance_is_sum_of_entropies() {
        let x = single(&[0.2, 0.8]);
        let y = single(&[0.5, 0.25, 0.25]);
        let k = CouplingFan::independence(&x, &y).unwrap();
        let want = x.entropy(0) + y.entropy(0);
        assert!((k.entropy_distance() - want).abs() < 1e-12);
    }

    #[test]
    fn marginals_are_checked() {
        let x = single(&[0.5, 0.5]);
        let err = CouplingFan::new(x.clone(), x, vec![(0, 0, 0.5), (0, 1, 0.5)]).unwrap_err();
        assert!(matches!(err, Error::BadCoupling(_)));
    }

    #[test]
    fn objective_matches_apex_entropies() {
        let x = crate::diagram::tests::joint_two_fan();
        let y = ProbDiagram::constant(x.shape().clone(), &ProbSpace::uniform(2));
        let k = CouplingFan::independence(&x, &y).unwrap();
        let mut obj = KdObjective::new(&x, &y);
        assert!((obj.eval(k.cells()) - k.entropy_distance()).abs() < 1e-12);
        // the fan view agrees
        assert!((k.to_fan().entropy_distance() - k.entropy_distance()).abs() < 1e-12);
        let want: f64 = (0..3).map(|i| x.entropy(i) + LN_2).sum();
        assert!((k.entropy_distance() - want).abs() < 1e-12);
    }

    #[test]
    fn conditioning_a_coupling() {
        let x = single(&[0.25, 0.75]);
        let k = CouplingFan::independence(&x, &x).unwrap().condition_left(0, 1);
        assert_eq!(k.left().initial_len(), 1);
        assert_eq!(k.right().pi0(), &[0.25, 0.75]);
        assert!((k.entropy_distance() - x.entropy(0)).abs() < 1e-12);
    }

    #[test]
    fn tensor_of_couplings_adds_distances() {
        let x = single(&[0.3, 0.7]);
        let y = single(&[0.5, 0.5]);
        let a = CouplingFan::independence(&x, &y).unwrap();
        let b = CouplingFan::diagonal(&y);
        let t = tensor_couplings(&[&a, &b], 1_000).unwrap();
        assert!((t.entropy_distance() - a.entropy_distance() - b.entropy_distance()).abs() < 1e-12);
    }
}
