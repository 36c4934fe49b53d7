//! Seeded random instances for property checks.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::category::IndexingCategory;
use crate::diagram::ProbDiagram;
use crate::error::{Error, Result};
use crate::format::format_weight;
use crate::prob::ProbSpace;

/// Shapes used by randomized checks.
pub const SHAPES: [&str; 3] = ["two-fan", "chain3", "diamond"];

pub fn shape_by_name(name: &str) -> Result<Arc<IndexingCategory>> {
    let c = match name {
        "two-fan" | "lambda2" => IndexingCategory::two_fan(),
        "chain2" => IndexingCategory::chain(2),
        "chain3" => IndexingCategory::chain(3),
        "diamond" => IndexingCategory::diamond(),
        "single" => IndexingCategory::singleton("X"),
        other => return Err(Error::UnknownObject(other.to_string())),
    };
    Ok(Arc::new(c))
}

/// Independent stream `trial` of the generator seeded by `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// A uniform point of the simplex with `k` vertices, rounded to 12
/// significant digits and renormalized.
pub fn dirichlet_weights<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).map(|x: f64| x.max(1e-12)).collect();
    let total: f64 = raw.iter().sum();
    let rounded: Vec<f64> = raw.iter().map(|x| format_weight(x / total).parse().expect("formatted float")).collect();
    let total: f64 = rounded.iter().sum();
    rounded.into_iter().map(|x| x / total).collect()
}

/// Index of `u` drawn from `weights`.
pub fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let mut r: f64 = rng.random();
    for (i, &w) in weights.iter().enumerate() {
        if r < w {
            return i;
        }
        r -= w;
    }
    weights.len() - 1
}

/// Finest common coarsening of labellings of `0..n`, relabelled by first appearance.
fn join(n: usize, parts: &[&Vec<usize>]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    for part in parts {
        let mut first: Vec<Option<usize>> = vec![None; n];
        for (a, &b) in part.iter().enumerate() {
            match first[b] {
                None => first[b] = Some(a),
                Some(r) => {
                    let (x, y) = (find(&mut parent, a), find(&mut parent, r));
                    parent[x] = y;
                }
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|a| find(&mut parent, a)).collect();
    relabel(&roots)
}

fn relabel(labels: &[usize]) -> Vec<usize> {
    let mut seen: Vec<usize> = Vec::new();
    labels
        .iter()
        .map(|l| match seen.iter().position(|s| s == l) {
            Some(i) => i,
            None => {
                seen.push(*l);
                seen.len() - 1
            }
        })
        .collect()
}

/// A random diagram of the given shape with `atoms` initial atoms: Dirichlet
/// weights, and at every object a random coarsening of what its ancestors
/// force.
pub fn random_diagram<R: Rng + ?Sized>(
    shape: &Arc<IndexingCategory>,
    atoms: usize,
    rng: &mut R,
) -> Result<ProbDiagram> {
    let weights = dirichlet_weights(atoms, rng);
    let n = shape.len();
    let i0 = shape.initial();
    let mut parts: Vec<Option<Vec<usize>>> = vec![None; n];
    parts[i0] = Some((0..atoms).collect());
    for j in shape.topological_order() {
        if j == i0 {
            continue;
        }
        let ancestors: Vec<&Vec<usize>> =
            (0..n).filter(|&i| i != j && shape.is_ancestor(i, j)).filter_map(|i| parts[i].as_ref()).collect();
        let forced = join(atoms, &ancestors);
        let blocks = forced.iter().max().map_or(0, |m| m + 1);
        let r = rng.random_range(1..=blocks);
        // random surjection blocks -> 0..r
        let mut image: Vec<usize> = (0..blocks).map(|b| if b < r { b } else { rng.random_range(0..r) }).collect();
        image.shuffle(rng);
        parts[j] = Some(relabel(&forced.iter().map(|&b| image[b]).collect::<Vec<_>>()));
    }
    let maps: Vec<(String, Vec<String>)> = (0..n)
        .filter(|&i| i != i0)
        .map(|i| {
            let p = parts[i].as_ref().expect("assigned in topological order");
            (shape.label(i).to_string(), p.iter().map(|b| b.to_string()).collect())
        })
        .collect();
    ProbDiagram::from_labelled_maps(shape.clone(), (0..atoms).map(|a| format!("s{a}")).collect(), weights, &maps, &[])
}

/// `Z_m` with the uniform measure and `S_i = Z_m / d_i`; `d_j` must divide
/// `d_i` whenever `i -> j`. Rotations act transitively on every space.
pub fn cyclic_diagram(shape: &Arc<IndexingCategory>, m: usize, divisors: &[usize]) -> Result<ProbDiagram> {
    let n = shape.len();
    let i0 = shape.initial();
    for i in 0..n {
        for j in 0..n {
            if shape.is_ancestor(i, j) && divisors[i] % divisors[j] != 0 {
                return Err(Error::NotWellDefined(shape.label(i).into(), shape.label(j).into()));
            }
        }
    }
    let maps: Vec<(String, Vec<String>)> = (0..n)
        .filter(|&i| i != i0)
        .map(|i| (shape.label(i).to_string(), (0..m).map(|s| (s % divisors[i]).to_string()).collect()))
        .collect();
    ProbDiagram::from_labelled_maps(
        shape.clone(),
        (0..m).map(|s| s.to_string()).collect(),
        vec![1.0 / m as f64; m],
        &maps,
        &[],
    )
}

/// Uniform `Z_a x Z_b` over the two-fan with the coordinate projections.
pub fn uniform_pair(a: usize, b: usize) -> ProbDiagram {
    let atoms: Vec<(usize, usize)> = (0..a).flat_map(|x| (0..b).map(move |y| (x, y))).collect();
    ProbDiagram::from_labelled_maps(
        Arc::new(IndexingCategory::two_fan()),
        atoms.iter().map(|(x, y)| format!("({x},{y})")).collect(),
        vec![1.0 / atoms.len() as f64; atoms.len()],
        &[
            ("left".into(), atoms.iter().map(|(x, _)| x.to_string()).collect()),
            ("right".into(), atoms.iter().map(|(_, y)| y.to_string()).collect()),
        ],
        &[],
    )
    .expect("product diagram is valid")
}

/// Twenty homogeneous diagrams paired with the object to condition on.
pub fn homogeneous_examples() -> Vec<(ProbDiagram, usize)> {
    let fan = Arc::new(IndexingCategory::two_fan());
    let chain = Arc::new(IndexingCategory::chain(3));
    let diamond = Arc::new(IndexingCategory::diamond());
    let mut out = Vec::new();
    for k in 1..=4 {
        out.push((ProbDiagram::constant(fan.clone(), &ProbSpace::uniform(k)), 1));
    }
    for (a, b, iota) in [(2, 2, 1), (2, 3, 2), (3, 2, 1), (2, 4, 1)] {
        out.push((uniform_pair(a, b), iota));
    }
    for (m, d, iota) in [(6, [6, 2, 3], 1), (6, [6, 3, 2], 2), (8, [8, 4, 2], 1), (4, [4, 4, 1], 2), (6, [6, 6, 6], 0)]
    {
        out.push((cyclic_diagram(&fan, m, &d).expect("valid divisors"), iota));
    }
    for (m, d, iota) in [(8, [8, 4, 2], 1), (6, [6, 3, 1], 2), (4, [4, 2, 2], 1), (6, [6, 6, 3], 2)] {
        out.push((cyclic_diagram(&chain, m, &d).expect("valid divisors"), iota));
    }
    for (m, d, iota) in [(6, [6, 2, 3, 1], 1), (8, [8, 4, 2, 2], 2), (4, [4, 2, 4, 2], 3)] {
        out.push((cyclic_diagram(&diamond, m, &d).expect("valid divisors"), iota));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_diagrams_are_valid_and_reproducible() {
        for name in SHAPES {
            let shape = shape_by_name(name).unwrap();
            for trial in 0..20 {
                let a = random_diagram(&shape, 4, &mut trial_rng(7, trial)).unwrap();
                let b = random_diagram(&shape, 4, &mut trial_rng(7, trial)).unwrap();
                assert_eq!(a, b);
                assert!((a.pi0().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn streams_differ() {
        let shape = shape_by_name("two-fan").unwrap();
        let a = random_diagram(&shape, 3, &mut trial_rng(1, 0)).unwrap();
        let b = random_diagram(&shape, 3, &mut trial_rng(1, 1)).unwrap();
        assert_ne!(a.pi0(), b.pi0());
    }

    #[test]
    fn join_merges_blocks() {
        assert_eq!(join(4, &[&vec![0, 0, 1, 2], &vec![0, 1, 1, 2]]), vec![0, 0, 0, 1]);
        assert_eq!(join(3, &[]), vec![0, 1, 2]);
    }

    #[test]
    fn cyclic_rejects_bad_divisors() {
        let shape = shape_by_name("chain3").unwrap();
        assert!(cyclic_diagram(&shape, 6, &[6, 2, 3]).is_err());
        assert!(cyclic_diagram(&shape, 6, &[6, 3, 1]).is_ok());
    }

    #[test]
    fn examples_are_homogeneous() {
        let ex = homogeneous_examples();
        assert_eq!(ex.len(), 20);
        for (x, _) in &ex {
            assert!(crate::homogeneity::is_homogeneous(x).unwrap().homogeneous);
        }
    }

    #[test]
    fn sampling_follows_weights() {
        let mut rng = trial_rng(3, 0);
        let hits = (0..10_000).filter(|_| sample_index(&[0.2, 0.8], &mut rng) == 0).count();
        assert!((1700..2300).contains(&hits));
    }
}
