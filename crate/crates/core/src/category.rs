//! Finite indexing categories.
//!
//! Between any two objects there is at most one morphism, so a category is a
//! preorder and is stored as its reflexive-transitive ancestry matrix:
//! `is_ancestor(i, j)` means there is a morphism `i -> j`. A valid category
//! has an initial object and a minimal common ancestor for every pair.

use std::collections::HashSet;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexingCategory {
    objects: Vec<String>,
    // row-major, ancestry[i * n + j] <=> i -> j
    ancestry: Vec<bool>,
    initial: usize,
    mca: Vec<usize>,
}

/// A pair of morphisms `left <- apex -> right`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fan {
    pub apex: usize,
    pub left: usize,
    pub right: usize,
}

impl IndexingCategory {
    /// Validates an ancestry matrix over `objects`. The diagonal is forced to
    /// `true`; identities are implicit.
    pub fn new(objects: Vec<String>, mut ancestry: Vec<Vec<bool>>) -> Result<Self> {
        let n = objects.len();
        if ancestry.len() != n || ancestry.iter().any(|row| row.len() != n) {
            let got = ancestry.len();
            return Err(Error::MatrixShape { expected: n, got });
        }
        let mut seen = HashSet::new();
        for o in &objects {
            if !seen.insert(o.as_str()) {
                return Err(Error::DuplicateObject(o.clone()));
            }
        }
        for (i, row) in ancestry.iter_mut().enumerate() {
            row[i] = true;
        }
        let flat: Vec<bool> = ancestry.into_iter().flatten().collect();
        Self::validate(objects, flat)
    }

    /// Builds a category from a generating set of morphisms by taking the
    /// reflexive-transitive closure.
    pub fn from_generators<S: AsRef<str>>(objects: &[S], morphisms: &[(S, S)]) -> Result<Self> {
        let objects: Vec<String> = objects.iter().map(|s| s.as_ref().to_string()).collect();
        let n = objects.len();
        let index = |label: &str| {
            objects.iter().position(|o| o == label).ok_or_else(|| Error::UnknownObject(label.to_string()))
        };
        let mut m = vec![vec![false; n]; n];
        for (a, b) in morphisms {
            m[index(a.as_ref())?][index(b.as_ref())?] = true;
        }
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if m[i][k] {
                    for j in 0..n {
                        if m[k][j] {
                            m[i][j] = true;
                        }
                    }
                }
            }
        }
        Self::new(objects, m)
    }

    fn validate(objects: Vec<String>, ancestry: Vec<bool>) -> Result<Self> {
        let n = objects.len();
        let rel = |i: usize, j: usize| ancestry[i * n + j];
        for i in 0..n {
            for j in 0..n {
                if !rel(i, j) {
                    continue;
                }
                if i != j && rel(j, i) {
                    return Err(Error::TwoWayMorphismBetweenDistinct(objects[i].clone(), objects[j].clone()));
                }
                for k in 0..n {
                    if rel(j, k) && !rel(i, k) {
                        return Err(Error::NotTransitive(objects[i].clone(), objects[j].clone(), objects[k].clone()));
                    }
                }
            }
        }

        let mut mca = vec![0; n * n];
        for i in 0..n {
            for j in i..n {
                let common: Vec<usize> = (0..n).filter(|&k| rel(k, i) && rel(k, j)).collect();
                let hat = common
                    .iter()
                    .copied()
                    .find(|&c| common.iter().all(|&k| rel(k, c)))
                    .ok_or_else(|| Error::NoMinimalCommonAncestor(objects[i].clone(), objects[j].clone()))?;
                mca[i * n + j] = hat;
                mca[j * n + i] = hat;
            }
        }

        let initial = (0..n).find(|&i| (0..n).all(|j| rel(i, j))).ok_or(Error::MissingInitial)?;

        Ok(IndexingCategory { objects, ancestry, initial, mca })
    }

    pub fn singleton(label: &str) -> Self {
        Self::from_generators::<&str>(&[label], &[]).expect("singleton is valid")
    }

    /// `x0 -> x1 -> ... -> x{k-1}`.
    pub fn chain(k: usize) -> Self {
        assert!(k > 0, "chain needs at least one object");
        let labels: Vec<String> = (0..k).map(|i| format!("x{i}")).collect();
        let gens: Vec<(String, String)> = labels.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        Self::from_generators(&labels, &gens).expect("chain is valid")
    }

    /// The two-fan `left <- top -> right`.
    pub fn two_fan() -> Self {
        Self::from_generators(&["top", "left", "right"], &[("top", "left"), ("top", "right")])
            .expect("two-fan is valid")
    }

    /// The full diagram on two spaces: `top -> X, top -> Y, X -> bottom, Y -> bottom`.
    pub fn diamond() -> Self {
        Self::from_generators(
            &["top", "X", "Y", "bottom"],
            &[("top", "X"), ("top", "Y"), ("X", "bottom"), ("Y", "bottom")],
        )
        .expect("diamond is valid")
    }

    /// Number of objects.
    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn label(&self, i: usize) -> &str {
        &self.objects[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.objects.iter().position(|o| o == label).ok_or_else(|| Error::UnknownObject(label.to_string()))
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    /// True iff there is a morphism `i -> j`.
    pub fn is_ancestor(&self, i: usize, j: usize) -> bool {
        self.ancestry[i * self.len() + j]
    }

    pub fn minimal_common_ancestor(&self, i: usize, j: usize) -> usize {
        self.mca[i * self.len() + j]
    }

    /// Ancestors of `i`, including `i`, in declared order.
    pub fn coideal(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.is_ancestor(k, i)).collect()
    }

    /// Descendants of `i`, including `i`, in declared order.
    pub fn ideal(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.is_ancestor(i, k)).collect()
    }

    /// All non-identity morphisms `(i, j)`.
    pub fn morphisms(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| (0..n).map(move |j| (i, j))).filter(move |&(i, j)| i != j && self.is_ancestor(i, j))
    }

    /// The covering relation, a minimal generating set of morphisms.
    pub fn generating_morphisms(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        self.morphisms()
            .filter(|&(i, j)| !(0..n).any(|k| k != i && k != j && self.is_ancestor(i, k) && self.is_ancestor(k, j)))
            .collect()
    }

    /// Objects ordered so that every ancestor precedes its descendants.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| (self.coideal(i).len(), i));
        order
    }

    pub fn fan(&self, apex: usize, left: usize, right: usize) -> Result<Fan> {
        if self.is_ancestor(apex, left) && self.is_ancestor(apex, right) {
            Ok(Fan { apex, left, right })
        } else {
            Err(Error::NotAFan {
                apex: self.label(apex).to_string(),
                left: self.label(left).to_string(),
                right: self.label(right).to_string(),
            })
        }
    }

    /// The unique minimal fan with feet `i` and `j`.
    pub fn minimal_fan(&self, i: usize, j: usize) -> Fan {
        Fan { apex: self.minimal_common_ancestor(i, j), left: i, right: j }
    }
}
