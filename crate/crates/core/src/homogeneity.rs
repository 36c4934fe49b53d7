//! Automorphism groups of diagrams and homogeneity.

use serde::Serialize;

use crate::diagram::{for_each_isomorphism, is_isomorphic, EntropyVector, ProbDiagram};
use crate::error::{Error, Result};
use crate::tropical::tropical_condition;

/// Largest initial set searched; `8! = 40320` candidate permutations.
pub const MAX_AUTOMORPHISM_ATOMS: usize = 8;

/// Per-object permutations `components[i][a] = b`, weight preserving and natural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DiagramAutomorphism {
    pub components: Vec<Vec<usize>>,
}

impl DiagramAutomorphism {
    pub fn identity(x: &ProbDiagram) -> Self {
        DiagramAutomorphism { components: (0..x.shape().len()).map(|i| (0..x.set(i).len()).collect()).collect() }
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &DiagramAutomorphism) -> Self {
        let components =
            self.components.iter().zip(&other.components).map(|(s, o)| o.iter().map(|&a| s[a]).collect()).collect();
        DiagramAutomorphism { components }
    }

    pub fn inverse(&self) -> Self {
        let components = self
            .components
            .iter()
            .map(|p| {
                let mut inv = vec![0; p.len()];
                for (a, &b) in p.iter().enumerate() {
                    inv[b] = a;
                }
                inv
            })
            .collect();
        DiagramAutomorphism { components }
    }
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// All automorphisms in lexicographic order of their components.
pub fn automorphisms(x: &ProbDiagram) -> Result<Vec<DiagramAutomorphism>> {
    let n = x.initial_len();
    if n > MAX_AUTOMORPHISM_ATOMS {
        return Err(Error::BudgetExceeded { needed: factorial(n), budget: factorial(MAX_AUTOMORPHISM_ATOMS) });
    }
    let mut found = Vec::new();
    for_each_isomorphism(x, x, |components| {
        found.push(DiagramAutomorphism { components });
        true
    });
    found.sort();
    Ok(found)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomogeneityReport {
    pub homogeneous: bool,
    pub group_order: usize,
    /// Orbits of the group on the support of every space, as atom labels.
    pub orbits: Vec<Vec<Vec<String>>>,
}

pub fn is_homogeneous(x: &ProbDiagram) -> Result<HomogeneityReport> {
    let group = automorphisms(x)?;
    let mut orbits = Vec::with_capacity(x.shape().len());
    let mut homogeneous = true;
    for i in 0..x.shape().len() {
        let k = x.set(i).len();
        let mut orbit_of: Vec<Option<usize>> = vec![None; k];
        let mut space_orbits: Vec<Vec<String>> = Vec::new();
        for a in 0..k {
            if orbit_of[a].is_some() || x.weights(i)[a] <= 0.0 {
                continue;
            }
            let id = space_orbits.len();
            let mut members: Vec<usize> = group.iter().map(|g| g.components[i][a]).collect();
            members.sort_unstable();
            members.dedup();
            for &b in &members {
                orbit_of[b] = Some(id);
            }
            space_orbits.push(members.iter().map(|&b| x.set(i)[b].clone()).collect());
        }
        homogeneous &= space_orbits.len() <= 1;
        orbits.push(space_orbits);
    }
    Ok(HomogeneityReport { homogeneous, group_order: group.len(), orbits })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapseReport {
    pub iota: usize,
    pub components: usize,
    /// Every pair of conditioned diagrams `X|u`, `X|u'` is isomorphic.
    pub pairwise_isomorphic: bool,
    /// `ent[X|U]`.
    pub conditioned_entropy: EntropyVector,
    /// `ent(X|u)` for the first atom `u`.
    pub component_entropy: EntropyVector,
    pub entropy_gap: f64,
    pub holds: bool,
}

/// For homogeneous `X`, `[X|U]` is the linear sequence of any single `X|u`.
pub fn homogeneous_conditioning_collapse(x: &ProbDiagram, iota: usize) -> Result<CollapseReport> {
    if !is_homogeneous(x)?.homogeneous {
        return Err(Error::NotHomogeneous);
    }
    let c = tropical_condition(x, iota);
    let comps: Vec<&ProbDiagram> = c.components().iter().filter(|c| c.weight > 0.0).map(|c| &c.diagram).collect();
    let pairwise_isomorphic = comps.iter().enumerate().all(|(a, x)| comps[a + 1..].iter().all(|y| is_isomorphic(x, y)));
    let conditioned_entropy = c.entropy();
    let component_entropy = comps[0].entropy_vector();
    let entropy_gap = conditioned_entropy.l1_distance(&component_entropy);
    Ok(CollapseReport {
        iota,
        components: comps.len(),
        pairwise_isomorphic,
        conditioned_entropy,
        component_entropy,
        entropy_gap,
        holds: pairwise_isomorphic && entropy_gap <= 1e-9,
    })
}
