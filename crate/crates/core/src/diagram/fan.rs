use super::{weights_close, EntropyVector, ProbDiagram};
use crate::error::{Error, Result};

/// A reduction of diagrams: object-wise reductions commuting with the
/// diagrams' internal maps.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramReduction {
    source: ProbDiagram,
    target: ProbDiagram,
    maps: Vec<Vec<usize>>,
}

impl DiagramReduction {
    pub fn new(source: ProbDiagram, target: ProbDiagram, maps: Vec<Vec<usize>>) -> Result<Self> {
        let shape = source.shape();
        if **shape != **target.shape() || maps.len() != shape.len() {
            return Err(Error::ShapeMismatch);
        }
        for (i, map) in maps.iter().enumerate() {
            let label = shape.label(i).to_string();
            if map.len() != source.set(i).len() {
                return Err(Error::MapLength { object: label, expected: source.set(i).len(), got: map.len() });
            }
            let mut pushed = vec![0.0; target.set(i).len()];
            let mut hit = vec![false; pushed.len()];
            for (a, &b) in map.iter().enumerate() {
                if b >= pushed.len() {
                    return Err(Error::MapOutOfRange { object: label, index: b });
                }
                hit[b] = true;
                pushed[b] += source.weights(i)[a];
            }
            if hit.iter().any(|h| !h) {
                return Err(Error::NotSurjective(label));
            }
            if pushed.iter().zip(target.weights(i)).any(|(a, b)| !weights_close(*a, *b)) {
                return Err(Error::NotMeasurePreserving(label));
            }
        }
        let i0 = shape.initial();
        for s in 0..source.initial_len() {
            let t = maps[i0][s];
            for (i, map) in maps.iter().enumerate() {
                if map[source.map(i)[s]] != target.map(i)[t] {
                    return Err(Error::NotNatural(shape.label(i).to_string()));
                }
            }
        }
        Ok(DiagramReduction { source, target, maps })
    }

    pub fn source(&self) -> &ProbDiagram {
        &self.source
    }

    pub fn target(&self) -> &ProbDiagram {
        &self.target
    }

    pub fn map(&self, i: usize) -> &[usize] {
        &self.maps[i]
    }

    /// `sum_i H(source_i) - H(target_i)`.
    pub fn entropy_distance(&self) -> f64 {
        (0..self.source.shape().len()).map(|i| self.source.entropy(i) - self.target.entropy(i)).sum::<f64>().max(0.0)
    }
}

/// A fan of diagrams `left <- apex -> right`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramFan {
    left: DiagramReduction,
    right: DiagramReduction,
}

impl DiagramFan {
    pub fn new(left: DiagramReduction, right: DiagramReduction) -> Result<Self> {
        if left.source != right.source {
            return Err(Error::BadCoupling("legs have different sources".into()));
        }
        Ok(DiagramFan { left, right })
    }

    pub fn apex(&self) -> &ProbDiagram {
        &self.left.source
    }

    pub fn left(&self) -> &DiagramReduction {
        &self.left
    }

    pub fn right(&self) -> &DiagramReduction {
        &self.right
    }

    /// `||ent Z - ent X||_1 + ||ent Z - ent Y||_1`.
    pub fn entropy_distance(&self) -> f64 {
        let z: EntropyVector = self.apex().entropy_vector();
        z.l1_distance(&self.left.target.entropy_vector()) + z.l1_distance(&self.right.target.entropy_vector())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::IndexingCategory;
    use crate::prob::ProbSpace;
    use std::sync::Arc;

    #[test]
    fn naturality_is_enforced() {
        let g = Arc::new(IndexingCategory::chain(2));
        let src = ProbDiagram::from_labelled_maps(
            g.clone(),
            vec!["a".into(), "b".into()],
            vec![0.5, 0.5],
            &[("x1".into(), vec!["p".into(), "q".into()])],
            &[],
        )
        .unwrap();
        let tgt = ProbDiagram::constant(g, &ProbSpace::uniform(2));
        // swapping at x0 but not at x1 breaks the square
        let err = DiagramReduction::new(src.clone(), tgt.clone(), vec![vec![1, 0], vec![0, 1]]).unwrap_err();
        assert!(matches!(err, Error::NotNatural(_)));
        assert!(DiagramReduction::new(src, tgt, vec![vec![1, 0], vec![1, 0]]).is_ok());
    }

    #[test]
    fn identity_reduction_has_zero_distance() {
        let x = ProbDiagram::single(&ProbSpace::from_weights(&[0.3, 0.7]).unwrap());
        let r = DiagramReduction::new(x.clone(), x, vec![vec![0, 1]]).unwrap();
        assert_eq!(r.entropy_distance(), 0.0);
    }
}
