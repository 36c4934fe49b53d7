//! Commutative diagrams of finite sets and probability spaces.
//!
//! A diagram is stored in canonical form: the initial set `S0`, a surjection
//! `S0 -> S_i` for every object, and a distribution on `S0`. Every other space
//! and internal map is derived from these. Distributions on the diagram and
//! distributions on `S0` are in bijection, so nothing is lost.

mod fan;
mod iso;

use std::collections::HashSet;
use std::ops::{Add, Sub};
use std::sync::Arc;

pub use fan::{DiagramFan, DiagramReduction};
pub use iso::{find_isomorphism, for_each_isomorphism, is_isomorphic};

use crate::category::IndexingCategory;
use crate::error::{Error, Result};
use crate::prob::{entropy_of, normalized, ProbSpace, Reduction, TOLERANCE};

/// Per-object entropies in nats, in the shape's object order.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EntropyVector(pub Vec<f64>);

impl EntropyVector {
    pub fn zeros(n: usize) -> Self {
        EntropyVector(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|x| x.abs()).sum()
    }

    pub fn l1_distance(&self, other: &EntropyVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum()
    }

    pub fn max_abs_diff(&self, other: &EntropyVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> EntropyVector {
        EntropyVector(self.0.iter().map(|x| x * factor).collect())
    }

    /// `self += factor * other`
    pub fn add_scaled(&mut self, factor: f64, other: &EntropyVector) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += factor * b;
        }
    }
}

impl Add for &EntropyVector {
    type Output = EntropyVector;
    fn add(self, rhs: &EntropyVector) -> EntropyVector {
        EntropyVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &EntropyVector {
    type Output = EntropyVector;
    fn sub(self, rhs: &EntropyVector) -> EntropyVector {
        EntropyVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// A commutative diagram of finite sets and surjections, in canonical form.
#[derive(Debug, Clone, PartialEq)]
pub struct SetDiagram {
    shape: Arc<IndexingCategory>,
    sets: Vec<Vec<String>>,
    // maps[i][s] = image of initial atom s in sets[i]
    maps: Vec<Vec<usize>>,
}

impl SetDiagram {
    /// `sets[i]` is the set at object `i` and `maps[i]` the surjection from the
    /// initial set; `maps[initial]` must be the identity.
    pub fn new(shape: Arc<IndexingCategory>, sets: Vec<Vec<String>>, maps: Vec<Vec<usize>>) -> Result<Self> {
        let n = shape.len();
        if sets.len() != n || maps.len() != n {
            return Err(Error::ShapeMismatch);
        }
        let i0 = shape.initial();
        let s0 = sets[i0].len();
        for (i, set) in sets.iter().enumerate() {
            let mut seen = HashSet::new();
            for a in set {
                if !seen.insert(a.as_str()) {
                    return Err(Error::DuplicateAtom { object: shape.label(i).to_string(), atom: a.clone() });
                }
            }
        }
        if maps[i0].iter().enumerate().any(|(s, &t)| s != t) || maps[i0].len() != s0 {
            return Err(Error::InitialMapNotIdentity(shape.label(i0).to_string()));
        }
        for i in 0..n {
            let label = shape.label(i).to_string();
            if maps[i].len() != s0 {
                return Err(Error::MapLength { object: label, expected: s0, got: maps[i].len() });
            }
            let mut hit = vec![false; sets[i].len()];
            for &t in &maps[i] {
                if t >= sets[i].len() {
                    return Err(Error::MapOutOfRange { object: label, index: t });
                }
                hit[t] = true;
            }
            if hit.iter().any(|h| !h) {
                return Err(Error::NotSurjective(label));
            }
        }
        for (i, j) in shape.morphisms() {
            if i == i0 {
                continue;
            }
            let mut induced: Vec<Option<usize>> = vec![None; sets[i].len()];
            for s in 0..s0 {
                let (a, b) = (maps[i][s], maps[j][s]);
                match induced[a] {
                    None => induced[a] = Some(b),
                    Some(prev) if prev != b => {
                        return Err(Error::NotWellDefined(shape.label(i).to_string(), shape.label(j).to_string()))
                    }
                    _ => {}
                }
            }
        }
        Ok(SetDiagram { shape, sets, maps })
    }

    pub fn shape(&self) -> &Arc<IndexingCategory> {
        &self.shape
    }

    pub fn set(&self, i: usize) -> &[String] {
        &self.sets[i]
    }

    pub fn map(&self, i: usize) -> &[usize] {
        &self.maps[i]
    }

    pub fn initial_len(&self) -> usize {
        self.sets[self.shape.initial()].len()
    }

    /// The internal map `S_i -> S_j` for a morphism `i -> j`.
    pub fn internal_map(&self, i: usize, j: usize) -> Option<Vec<usize>> {
        if !self.shape.is_ancestor(i, j) {
            return None;
        }
        let mut out = vec![usize::MAX; self.sets[i].len()];
        for s in 0..self.initial_len() {
            out[self.maps[i][s]] = self.maps[j][s];
        }
        Some(out)
    }

    /// Restricts to the initial atoms in `keep` (ascending), dropping atoms of
    /// other sets that lose every preimage. Declared order is preserved.
    fn restrict(&self, keep: &[usize]) -> SetDiagram {
        let mut sets = Vec::with_capacity(self.sets.len());
        let mut maps = Vec::with_capacity(self.maps.len());
        for (set, map) in self.sets.iter().zip(&self.maps) {
            let mut used = vec![false; set.len()];
            keep.iter().for_each(|&s| used[map[s]] = true);
            let mut renum = vec![usize::MAX; set.len()];
            let mut new_set = Vec::new();
            for (a, label) in set.iter().enumerate() {
                if used[a] {
                    renum[a] = new_set.len();
                    new_set.push(label.clone());
                }
            }
            maps.push(keep.iter().map(|&s| renum[map[s]]).collect());
            sets.push(new_set);
        }
        SetDiagram { shape: self.shape.clone(), sets, maps }
    }
}

/// A commutative diagram of finite probability spaces: a set diagram with a
/// distribution on its initial set. Only atoms of positive weight are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbDiagram {
    carrier: SetDiagram,
    weights: Vec<Vec<f64>>,
}

impl ProbDiagram {
    /// Validates `pi0` and pushes it forward to every object. Initial atoms of
    /// zero weight are dropped together with the atoms only they reach.
    pub fn new(carrier: SetDiagram, pi0: Vec<f64>) -> Result<Self> {
        if pi0.len() != carrier.initial_len() {
            return Err(Error::BadDistribution(format!(
                "{} weights for {} initial atoms",
                pi0.len(),
                carrier.initial_len()
            )));
        }
        let pi0 = normalized(&pi0)?;
        let keep: Vec<usize> = (0..pi0.len()).filter(|&s| pi0[s] > 0.0).collect();
        if keep.len() == pi0.len() {
            return Ok(Self::from_trusted(carrier, pi0));
        }
        let pi0 = keep.iter().map(|&s| pi0[s]).collect();
        Ok(Self::from_trusted(carrier.restrict(&keep), pi0))
    }

    /// `pi0` must be positive and normalized.
    pub(crate) fn from_trusted(carrier: SetDiagram, pi0: Vec<f64>) -> Self {
        let weights = carrier
            .maps
            .iter()
            .zip(&carrier.sets)
            .map(|(map, set)| {
                let mut w = vec![0.0; set.len()];
                for (s, &t) in map.iter().enumerate() {
                    w[t] += pi0[s];
                }
                w
            })
            .collect();
        ProbDiagram { carrier, weights }
    }

    /// Builds a diagram from labelled maps, the form used by the JSON format:
    /// `maps` gives, for every non-initial object, the image label of each
    /// initial atom. Sets are the images in order of first appearance unless
    /// declared in `declared_sets`, in which case maps must be onto them.
    pub fn from_labelled_maps(
        shape: Arc<IndexingCategory>,
        initial_atoms: Vec<String>,
        pi0: Vec<f64>,
        maps: &[(String, Vec<String>)],
        declared_sets: &[(String, Vec<String>)],
    ) -> Result<Self> {
        let n = shape.len();
        let i0 = shape.initial();
        let mut sets: Vec<Option<Vec<String>>> = vec![None; n];
        let mut idx_maps: Vec<Option<Vec<usize>>> = vec![None; n];
        for (object, set) in declared_sets {
            let i = shape.index_of(object)?;
            if i != i0 {
                sets[i] = Some(set.clone());
            }
        }
        for (object, images) in maps {
            let i = shape.index_of(object)?;
            if i == i0 {
                return Err(Error::InitialMapNotIdentity(object.clone()));
            }
            if images.len() != initial_atoms.len() {
                return Err(Error::MapLength {
                    object: object.clone(),
                    expected: initial_atoms.len(),
                    got: images.len(),
                });
            }
            let set = sets[i].get_or_insert_with(|| {
                let mut seen = HashSet::new();
                images.iter().filter(|a| seen.insert(a.as_str())).cloned().collect()
            });
            let m = images
                .iter()
                .map(|a| {
                    set.iter()
                        .position(|b| b == a)
                        .ok_or_else(|| Error::AtomNotFound { object: object.clone(), atom: a.clone() })
                })
                .collect::<Result<Vec<_>>>()?;
            idx_maps[i] = Some(m);
        }
        sets[i0] = Some(initial_atoms.clone());
        idx_maps[i0] = Some((0..initial_atoms.len()).collect());
        let mut all_sets = Vec::with_capacity(n);
        let mut all_maps = Vec::with_capacity(n);
        for i in 0..n {
            match (sets[i].take(), idx_maps[i].take()) {
                (Some(s), Some(m)) => {
                    all_sets.push(s);
                    all_maps.push(m);
                }
                _ => return Err(Error::MissingMap(shape.label(i).to_string())),
            }
        }
        let carrier = SetDiagram::new(shape, all_sets, all_maps)?;
        ProbDiagram::new(carrier, pi0)
    }

    /// The diagram over `shape` with every space equal to `space` and identity maps.
    pub fn constant(shape: Arc<IndexingCategory>, space: &ProbSpace) -> Self {
        let n = shape.len();
        let k = space.len();
        let carrier = SetDiagram { shape, sets: vec![space.atoms().to_vec(); n], maps: vec![(0..k).collect(); n] };
        ProbDiagram::from_trusted(carrier, space.weights().to_vec())
    }

    /// The constant diagram of a one-atom space.
    pub fn point(shape: Arc<IndexingCategory>) -> Self {
        Self::constant(shape, &ProbSpace::point())
    }

    /// A diagram on the singleton category.
    pub fn single(space: &ProbSpace) -> Self {
        Self::constant(Arc::new(IndexingCategory::singleton("X")), space)
    }

    pub fn shape(&self) -> &Arc<IndexingCategory> {
        self.carrier.shape()
    }

    pub fn carrier(&self) -> &SetDiagram {
        &self.carrier
    }

    pub fn initial(&self) -> usize {
        self.shape().initial()
    }

    pub fn initial_len(&self) -> usize {
        self.carrier.initial_len()
    }

    pub fn initial_atoms(&self) -> &[String] {
        self.carrier.set(self.initial())
    }

    pub fn pi0(&self) -> &[f64] {
        &self.weights[self.initial()]
    }

    pub fn set(&self, i: usize) -> &[String] {
        self.carrier.set(i)
    }

    pub fn map(&self, i: usize) -> &[usize] {
        self.carrier.map(i)
    }

    pub fn weights(&self, i: usize) -> &[f64] {
        &self.weights[i]
    }

    pub fn space(&self, i: usize) -> ProbSpace {
        ProbSpace::from_parts_unchecked(self.set(i).to_vec(), self.weights[i].clone())
    }

    pub fn entropy(&self, i: usize) -> f64 {
        entropy_of(&self.weights[i])
    }

    pub fn entropy_vector(&self) -> EntropyVector {
        EntropyVector((0..self.shape().len()).map(|i| self.entropy(i)).collect())
    }

    /// The reduction `X_i -> X_j` for a morphism `i -> j`.
    pub fn reduction(&self, i: usize, j: usize) -> Option<Reduction> {
        let map = self.carrier.internal_map(i, j)?;
        Some(Reduction::new(self.space(i), self.space(j), map).expect("diagram maps are reductions"))
    }

    pub fn atom_index(&self, i: usize, atom: &str) -> Result<usize> {
        self.set(i)
            .iter()
            .position(|a| a == atom)
            .ok_or_else(|| Error::AtomNotFound { object: self.shape().label(i).to_string(), atom: atom.to_string() })
    }

    /// `X | u` for an atom `u` of the space at object `i`.
    pub fn condition(&self, i: usize, atom: &str) -> Result<ProbDiagram> {
        Ok(self.condition_index(i, self.atom_index(i, atom)?))
    }

    pub fn condition_index(&self, i: usize, u: usize) -> ProbDiagram {
        let mass = self.weights[i][u];
        let map = self.map(i);
        let keep: Vec<usize> = (0..self.initial_len()).filter(|&s| map[s] == u).collect();
        let pi0 = keep.iter().map(|&s| self.pi0()[s] / mass).collect();
        ProbDiagram::from_trusted(self.carrier.restrict(&keep), pi0)
    }

    /// The joint-image fan `X <- X^ -> U^G` over the space `U = X_iota`:
    /// `X^_i` is the image of `S0` under `s -> (sigma_0i(s), sigma_0iota(s))`.
    pub fn fan_over_space(&self, iota: usize) -> DiagramFan {
        let n = self.shape().len();
        let s0 = self.initial_len();
        let u_map = self.map(iota);
        let u_space = self.space(iota);
        let mut sets = Vec::with_capacity(n);
        let mut maps = Vec::with_capacity(n);
        let mut left = Vec::with_capacity(n);
        let mut right = Vec::with_capacity(n);
        for i in 0..n {
            let xi = self.map(i);
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            let mut m = Vec::with_capacity(s0);
            for s in 0..s0 {
                let p = (xi[s], u_map[s]);
                let k = match pairs.iter().position(|&q| q == p) {
                    Some(k) => k,
                    None => {
                        pairs.push(p);
                        pairs.len() - 1
                    }
                };
                m.push(k);
            }
            sets.push(pairs.iter().map(|&(x, u)| format!("({},{})", self.set(i)[x], u_space.atoms()[u])).collect());
            left.push(pairs.iter().map(|&(x, _)| x).collect());
            right.push(pairs.iter().map(|&(_, u)| u).collect());
            maps.push(m);
        }
        let apex =
            ProbDiagram::from_trusted(SetDiagram { shape: self.shape().clone(), sets, maps }, self.pi0().to_vec());
        let constant = ProbDiagram::constant(self.shape().clone(), &u_space);
        let l = DiagramReduction::new(apex.clone(), self.clone(), left)
            .expect("left leg of the joint-image fan is a reduction");
        let r = DiagramReduction::new(apex, constant, right).expect("right leg of the joint-image fan is a reduction");
        DiagramFan::new(l, r).expect("legs share the apex")
    }

    /// Tensor power `X^n`; `n = 0` gives the point diagram.
    pub fn power(&self, n: usize, budget: u128) -> Result<ProbDiagram> {
        let factors = vec![self; n];
        tensor_all(self.shape(), &factors, budget)
    }

    pub fn tensor(&self, other: &ProbDiagram, budget: u128) -> Result<ProbDiagram> {
        tensor_all(self.shape(), &[self, other], budget)
    }
}

/// Object-wise independent product of diagrams sharing `shape`. Atoms are
/// labelled by tuples `(a,b,...)`; the empty product is the point diagram
/// and a single factor is returned unchanged.
pub fn tensor_all(shape: &Arc<IndexingCategory>, factors: &[&ProbDiagram], budget: u128) -> Result<ProbDiagram> {
    if factors.iter().any(|f| !Arc::ptr_eq(f.shape(), shape) && **f.shape() != **shape) {
        return Err(Error::ShapeMismatch);
    }
    match factors {
        [] => {
            let point = ProbSpace::new(vec!["()".into()], vec![1.0])?;
            return Ok(ProbDiagram::constant(shape.clone(), &point));
        }
        [single] => return Ok((*single).clone()),
        _ => {}
    }
    let needed = tensor_size(factors.iter().map(|f| f.initial_len()));
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let n = shape.len();
    let i0 = shape.initial();
    let first = factors[0];
    let mut labels: Vec<Vec<String>> = (0..n).map(|i| first.set(i).to_vec()).collect();
    let mut maps: Vec<Vec<usize>> = (0..n).map(|i| first.map(i).to_vec()).collect();
    let mut pi0 = first.pi0().to_vec();
    for f in &factors[1..] {
        let k0 = f.initial_len();
        for i in 0..n {
            let ki = f.set(i).len();
            labels[i] = labels[i].iter().flat_map(|a| f.set(i).iter().map(move |b| format!("{a},{b}"))).collect();
            let fm = f.map(i);
            maps[i] = maps[i].iter().flat_map(|&a| fm.iter().map(move |&b| a * ki + b)).collect();
            debug_assert_eq!(maps[i].len(), pi0.len() * k0);
        }
        pi0 = pi0.iter().flat_map(|&p| f.pi0().iter().map(move |&q| p * q)).collect();
    }
    let sets = labels.into_iter().map(|set| set.into_iter().map(|l| format!("({l})")).collect()).collect();
    debug_assert!(maps[i0].iter().enumerate().all(|(s, &t)| s == t));
    Ok(ProbDiagram::from_trusted(SetDiagram { shape: shape.clone(), sets, maps }, pi0))
}

/// Number of initial atoms of a tensor product, saturating.
pub(crate) fn tensor_size(sizes: impl IntoIterator<Item = usize>) -> u128 {
    sizes.into_iter().fold(1u128, |acc, s| acc.saturating_mul(s as u128))
}

/// Sum of `p(u) * x` over a family of weighted vectors.
pub fn weighted_entropy(family: &[(f64, EntropyVector)], n: usize) -> EntropyVector {
    let mut acc = EntropyVector::zeros(n);
    for (p, v) in family {
        acc.add_scaled(*p, v);
    }
    acc
}

pub(crate) fn weights_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOLERANCE
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::prob::DEFAULT_OUTCOME_BUDGET;
    use std::f64::consts::LN_2;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    pub(crate) fn joint_two_fan() -> ProbDiagram {
        ProbDiagram::from_labelled_maps(
            Arc::new(IndexingCategory::two_fan()),
            s(&["(a,0)", "(a,1)", "(b,1)"]),
            vec![0.25, 0.25, 0.5],
            &[("left".into(), s(&["a", "a", "b"])), ("right".into(), s(&["0", "1", "1"]))],
            &[],
        )
        .unwrap()
    }

    fn independent_pair() -> ProbDiagram {
        ProbDiagram::from_labelled_maps(
            Arc::new(IndexingCategory::two_fan()),
            s(&["00", "01", "10", "11"]),
            vec![0.25; 4],
            &[("left".into(), s(&["0", "0", "1", "1"])), ("right".into(), s(&["0", "1", "0", "1"]))],
            &[],
        )
        .unwrap()
    }

    fn close_vec(a: &EntropyVector, b: &[f64]) -> bool {
        a.0.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-9)
    }

    #[test]
    fn singleton_diagram_is_the_space() {
        let x = ProbSpace::from_weights(&[0.2, 0.8]).unwrap();
        let d = ProbDiagram::single(&x);
        assert_eq!(d.space(0), x);
    }

    #[test]
    fn two_fan_over_joint() {
        let d = joint_two_fan();
        let l = d.shape().index_of("left").unwrap();
        let r = d.shape().index_of("right").unwrap();
        assert_eq!(d.weights(l), &[0.5, 0.5]);
        assert_eq!(d.weights(r), &[0.25, 0.75]);
        let red = d.reduction(0, r).unwrap();
        assert_eq!(red.map(), &[0, 1, 1]);
    }

    #[test]
    fn ill_defined_internal_map_rejected() {
        // chain x0 -> x1 -> x2: x1 merges s0,s1 but x2 separates them
        let err = ProbDiagram::from_labelled_maps(
            Arc::new(IndexingCategory::chain(3)),
            s(&["s0", "s1", "s2"]),
            vec![0.2, 0.3, 0.5],
            &[("x1".into(), s(&["a", "a", "b"])), ("x2".into(), s(&["p", "q", "q"]))],
            &[],
        )
        .unwrap_err();
        assert_eq!(err, Error::NotWellDefined("x1".into(), "x2".into()));
    }

    #[test]
    fn non_surjective_declared_set_rejected() {
        let err = ProbDiagram::from_labelled_maps(
            Arc::new(IndexingCategory::two_fan()),
            s(&["s0", "s1"]),
            vec![0.5, 0.5],
            &[("left".into(), s(&["a", "a"])), ("right".into(), s(&["0", "1"]))],
            &[("left".into(), s(&["a", "b"]))],
        )
        .unwrap_err();
        assert_eq!(err, Error::NotSurjective("left".into()));
    }

    #[test]
    fn missing_map_and_bad_distribution() {
        let err = ProbDiagram::from_labelled_maps(
            Arc::new(IndexingCategory::two_fan()),
            s(&["s0", "s1"]),
            vec![0.5, 0.5],
            &[("left".into(), s(&["a", "a"]))],
            &[],
        )
        .unwrap_err();
        assert_eq!(err, Error::MissingMap("right".into()));
        let err = ProbDiagram::from_labelled_maps(
            Arc::new(IndexingCategory::singleton("X")),
            s(&["a", "b"]),
            vec![0.5, 0.4],
            &[],
            &[],
        )
        .unwrap_err();
        assert!(matches!(err, Error::BadDistribution(_)));
    }

    #[test]
    fn zero_weight_initial_atoms_dropped_with_their_images() {
        let d = ProbDiagram::from_labelled_maps(
            Arc::new(IndexingCategory::two_fan()),
            s(&["s0", "s1", "s2"]),
            vec![0.5, 0.5, 0.0],
            &[("left".into(), s(&["a", "a", "b"])), ("right".into(), s(&["0", "1", "2"]))],
            &[],
        )
        .unwrap();
        assert_eq!(d.initial_len(), 2);
        assert_eq!(d.set(1), &["a".to_string()]);
        assert_eq!(d.set(2), &["0".to_string(), "1".to_string()]);
    }

    #[test]
    fn entropy_vectors() {
        let g = Arc::new(IndexingCategory::two_fan());
        let c = ProbDiagram::constant(g, &ProbSpace::uniform(2));
        assert!(close_vec(&c.entropy_vector(), &[LN_2; 3]));
        let p = independent_pair();
        assert!(close_vec(&p.entropy_vector(), &[2.0 * LN_2, LN_2, LN_2]));
    }

    #[test]
    fn tensor_identities() {
        let d = joint_two_fan();
        let pt = ProbDiagram::point(d.shape().clone());
        let t = d.tensor(&pt, DEFAULT_OUTCOME_BUDGET).unwrap();
        assert!(is_isomorphic(&t, &d));
        assert_eq!(d.power(1, DEFAULT_OUTCOME_BUDGET).unwrap(), d);
        let zero = d.power(0, DEFAULT_OUTCOME_BUDGET).unwrap();
        assert_eq!(zero.initial_len(), 1);
        assert!(zero.entropy_vector().l1_norm() == 0.0);
    }

    #[test]
    fn power_scales_entropy() {
        let d = joint_two_fan();
        for n in [2, 3] {
            let p = d.power(n, DEFAULT_OUTCOME_BUDGET).unwrap();
            let want = d.entropy_vector().scaled(n as f64);
            assert!(p.entropy_vector().max_abs_diff(&want) < 1e-9);
        }
        assert!(d.power(20, DEFAULT_OUTCOME_BUDGET).unwrap_err().is_budget());
    }

    #[test]
    fn tensor_rejects_shape_mismatch() {
        let a = joint_two_fan();
        let b = ProbDiagram::single(&ProbSpace::uniform(2));
        assert_eq!(a.tensor(&b, DEFAULT_OUTCOME_BUDGET).unwrap_err(), Error::ShapeMismatch);
    }

    #[test]
    fn conditioning_examples() {
        let d = joint_two_fan();
        let r = d.shape().index_of("right").unwrap();
        let c = d.condition(r, "1").unwrap();
        assert_eq!(c.initial_atoms(), &s(&["(a,1)", "(b,1)"]));
        assert!((c.pi0()[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((c.pi0()[1] - 2.0 / 3.0).abs() < 1e-12);

        // conditioning on the initial object yields a point diagram
        let c = d.condition(0, "(b,1)").unwrap();
        assert_eq!(c.initial_len(), 1);
        assert_eq!(c.entropy_vector().l1_norm(), 0.0);

        // constant diagram conditioned on its space is a point diagram
        let u = ProbDiagram::constant(d.shape().clone(), &ProbSpace::uniform(3));
        let c = u.condition(1, "2").unwrap();
        assert!(c.shape().objects().iter().enumerate().all(|(i, _)| c.set(i).len() == 1));

        assert!(matches!(d.condition(r, "9"), Err(Error::AtomNotFound { .. })));
    }

    #[test]
    fn conditional_entropy_average() {
        let d = joint_two_fan();
        let r = d.shape().index_of("right").unwrap();
        let mut avg = EntropyVector::zeros(3);
        for (u, &p) in d.weights(r).iter().enumerate() {
            avg.add_scaled(p, &d.condition_index(r, u).entropy_vector());
        }
        // H(X_i | U) = H(X_i, U) - H(U); at the initial object that is H(X0) - H(U)
        let want0 = d.entropy(0) - d.entropy(r);
        assert!((avg.0[0] - want0).abs() < 1e-12);
        assert!(avg.0[r].abs() < 1e-12);
    }

    #[test]
    fn fan_over_initial_object_is_the_diagram() {
        let d = joint_two_fan();
        let fan = d.fan_over_space(0);
        for i in 0..3 {
            assert_eq!(fan.apex().set(i).len(), d.initial_len());
        }
        assert!((fan.left().entropy_distance() - 2.0 * d.entropy(0) + d.entropy(1) + d.entropy(2)).abs() < 1e-12);
    }

    #[test]
    fn fan_over_one_foot_of_independent_pair() {
        let d = independent_pair();
        let r = d.shape().index_of("right").unwrap();
        let l = d.shape().index_of("left").unwrap();
        let fan = d.fan_over_space(r);
        // the apex at the left foot is the product of both feet
        assert_eq!(fan.apex().set(l).len(), 4);
        assert!((fan.apex().entropy(l) - 2.0 * LN_2).abs() < 1e-12);
        assert_eq!(fan.apex().set(r).len(), 2);
        assert_eq!(fan.right().target().entropy_vector(), EntropyVector(vec![LN_2; 3]));
    }

    #[test]
    fn entropy_monotone_along_morphisms() {
        let d = joint_two_fan();
        for (i, j) in d.shape().morphisms() {
            assert!(d.entropy(i) + 1e-12 >= d.entropy(j));
        }
    }
}
