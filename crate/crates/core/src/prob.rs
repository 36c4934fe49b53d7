//! Finite probability spaces, reductions and the method of types.

use std::collections::HashSet;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};

/// Absolute tolerance for probability comparisons.
pub const TOLERANCE: f64 = 1e-9;

/// Default cap on the number of enumerated outcomes.
pub const DEFAULT_OUTCOME_BUDGET: u128 = 1_000_000;

/// Shannon entropy in nats of a weight vector; zero weights contribute nothing.
pub fn entropy_of(weights: &[f64]) -> f64 {
    weights.iter().filter(|&&w| w > 0.0).map(|&w| -w * w.ln()).sum::<f64>().max(0.0)
}

/// Checks that `weights` is a distribution (finite, non-negative, sums to one
/// within [`TOLERANCE`]) and returns it renormalized.
pub(crate) fn normalized(weights: &[f64]) -> Result<Vec<f64>> {
    if weights.is_empty() {
        return Err(Error::BadDistribution("empty".into()));
    }
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::BadDistribution(format!("weight {w} at index {i}")));
        }
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > TOLERANCE {
        return Err(Error::BadDistribution(format!("weights sum to {sum}")));
    }
    Ok(weights.iter().map(|w| w / sum).collect())
}

/// A finitely supported probability measure on labelled atoms.
///
/// Zero-weight atoms are dropped at construction, so every stored atom has
/// positive weight.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbSpace {
    atoms: Vec<String>,
    weights: Vec<f64>,
}

impl ProbSpace {
    pub fn new(atoms: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::BadDistribution(format!("{} atoms but {} weights", atoms.len(), weights.len())));
        }
        let mut seen = HashSet::new();
        for a in &atoms {
            if !seen.insert(a.as_str()) {
                return Err(Error::DuplicateAtom { object: String::new(), atom: a.clone() });
            }
        }
        let weights = normalized(&weights)?;
        let (atoms, weights) = atoms.into_iter().zip(weights).filter(|(_, w)| *w > 0.0).unzip();
        Ok(ProbSpace { atoms, weights })
    }

    /// Atoms labelled `"0"`, `"1"`, ...
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        Self::new((0..weights.len()).map(|i| i.to_string()).collect(), weights.to_vec())
    }

    pub fn uniform(k: usize) -> Self {
        assert!(k > 0);
        Self::from_weights(&vec![1.0 / k as f64; k]).expect("uniform is valid")
    }

    pub fn point() -> Self {
        Self::uniform(1)
    }

    pub(crate) fn from_parts_unchecked(atoms: Vec<String>, weights: Vec<f64>) -> Self {
        ProbSpace { atoms, weights }
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Support cardinality `|X|`.
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn index_of(&self, atom: &str) -> Result<usize> {
        self.atoms.iter().position(|a| a == atom).ok_or_else(|| Error::UnknownAtom(atom.to_string()))
    }

    pub fn entropy(&self) -> f64 {
        entropy_of(&self.weights)
    }

    /// Independent product; atoms are labelled `(x,y)`.
    pub fn tensor(&self, other: &ProbSpace) -> ProbSpace {
        let mut atoms = Vec::with_capacity(self.len() * other.len());
        let mut weights = Vec::with_capacity(self.len() * other.len());
        for (a, p) in self.atoms.iter().zip(&self.weights) {
            for (b, q) in other.atoms.iter().zip(&other.weights) {
                atoms.push(format!("({a},{b})"));
                weights.push(p * q);
            }
        }
        ProbSpace { atoms, weights }
    }
}

/// A measure-preserving surjection between finite probability spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    source: ProbSpace,
    target: ProbSpace,
    map: Vec<usize>,
}

impl Reduction {
    pub fn new(source: ProbSpace, target: ProbSpace, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.len() {
            return Err(Error::MapLength { object: String::new(), expected: source.len(), got: map.len() });
        }
        let mut pushed = vec![0.0; target.len()];
        for (s, &t) in map.iter().enumerate() {
            if t >= target.len() {
                return Err(Error::MapOutOfRange { object: String::new(), index: t });
            }
            pushed[t] += source.weights[s];
        }
        let mut hit = vec![false; target.len()];
        map.iter().for_each(|&t| hit[t] = true);
        if hit.iter().any(|h| !h) {
            return Err(Error::NotSurjective(String::new()));
        }
        if pushed.iter().zip(&target.weights).any(|(a, b)| (a - b).abs() > TOLERANCE) {
            return Err(Error::NotMeasurePreserving(String::new()));
        }
        Ok(Reduction { source, target, map })
    }

    /// The reduction `source -> f_* source` obtained by pushing forward along `map`,
    /// where `map` labels each source atom with its image label.
    pub fn pushforward(source: ProbSpace, image: &[String]) -> Result<Self> {
        if image.len() != source.len() {
            return Err(Error::MapLength { object: String::new(), expected: source.len(), got: image.len() });
        }
        let mut atoms: Vec<String> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        let mut map = Vec::with_capacity(image.len());
        for (s, label) in image.iter().enumerate() {
            let t = match atoms.iter().position(|a| a == label) {
                Some(t) => t,
                None => {
                    atoms.push(label.clone());
                    weights.push(0.0);
                    atoms.len() - 1
                }
            };
            weights[t] += source.weights[s];
            map.push(t);
        }
        Ok(Reduction { source, target: ProbSpace { atoms, weights }, map })
    }

    pub fn identity(space: ProbSpace) -> Self {
        let map = (0..space.len()).collect();
        Reduction { source: space.clone(), target: space, map }
    }

    pub fn source(&self) -> &ProbSpace {
        &self.source
    }

    pub fn target(&self) -> &ProbSpace {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Reduction) -> Result<Reduction> {
        if next.source.len() != self.target.len() {
            return Err(Error::LengthMismatch(self.target.len(), next.source.len()));
        }
        let map = self.map.iter().map(|&t| next.map[t]).collect();
        Reduction::new(self.source.clone(), next.target.clone(), map)
    }

    /// `H(source) - H(target)`: the entropy distance of the reduction viewed
    /// as the fan `source <- source -> target`.
    pub fn entropy_distance(&self) -> f64 {
        (self.source.entropy() - self.target.entropy()).max(0.0)
    }

    /// The source space conditioned on the fiber over `u`.
    pub fn condition(&self, u: &str) -> Result<ProbSpace> {
        let t = self.target.index_of(u).map_err(|_| Error::AtomNotInTarget(u.to_string()))?;
        Ok(self.condition_index(t))
    }

    pub(crate) fn condition_index(&self, t: usize) -> ProbSpace {
        let mass = self.target.weights[t];
        let (atoms, weights) = self
            .map
            .iter()
            .enumerate()
            .filter(|(_, &img)| img == t)
            .map(|(s, _)| (self.source.atoms[s].clone(), self.source.weights[s] / mass))
            .unzip();
        ProbSpace { atoms, weights }
    }
}

/// Conditions the source of `f` on the atom `u` of its target.
pub fn condition_space(f: &Reduction, u: &str) -> Result<ProbSpace> {
    f.condition(u)
}

/// `sum |p(s) - q(s)|` over a common index set.
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::MismatchedSupportSets(p.len(), q.len()));
    }
    Ok(p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum())
}

/// Letter counts of a tuple of atom indices over an alphabet of size `k`.
pub fn type_counts(k: usize, tuple: &[usize]) -> Vec<u32> {
    let mut c = vec![0u32; k];
    for &s in tuple {
        c[s] += 1;
    }
    c
}

/// The empirical map: the normalized letter-count distribution of `tuple`
/// over the atoms of `space`.
pub fn empirical_map<S: AsRef<str>>(space: &ProbSpace, tuple: &[S]) -> Result<Vec<f64>> {
    let idx: Vec<usize> = tuple.iter().map(|s| space.index_of(s.as_ref())).collect::<Result<_>>()?;
    let n = idx.len() as f64;
    Ok(type_counts(space.len(), &idx).into_iter().map(|c| c as f64 / n).collect())
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Probability of a type class (given by counts) under `weights^n`.
pub fn type_probability(weights: &[f64], counts: &[u32]) -> f64 {
    let n: u32 = counts.iter().sum();
    let mut lw = ln_factorial(n);
    for (&c, &p) in counts.iter().zip(weights) {
        if c > 0 {
            lw += c as f64 * p.ln() - ln_factorial(c);
        }
    }
    lw.exp()
}

/// All compositions of `n` into `k` non-negative parts, in lexicographically
/// decreasing order of the first coordinate.
pub fn compositions(n: u32, k: usize) -> Vec<Vec<u32>> {
    fn rec(n: u32, k: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 1 {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for c in (0..=n).rev() {
            prefix.push(c);
            rec(n - c, k - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        rec(n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// `base^n` as a count, saturating.
pub(crate) fn outcome_count(base: usize, n: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..n {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

/// The law of the empirical type of `n` i.i.d. draws from `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    base: ProbSpace,
    n: u32,
    types: Vec<Vec<u32>>,
    weights: Vec<f64>,
}

impl EmpiricalDistribution {
    /// Exact enumeration of the `n`-types; refused when `|X|^n` exceeds `budget`.
    pub fn exact(base: &ProbSpace, n: u32, budget: u128) -> Result<Self> {
        assert!(n >= 1, "empirical distribution needs n >= 1");
        let needed = outcome_count(base.len(), n as usize);
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        let types = compositions(n, base.len());
        let weights = types.iter().map(|c| type_probability(base.weights(), c)).collect();
        Ok(EmpiricalDistribution { base: base.clone(), n, types, weights })
    }

    pub fn base(&self) -> &ProbSpace {
        &self.base
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Type classes as letter counts.
    pub fn types(&self) -> &[Vec<u32>] {
        &self.types
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Type `c` as a distribution on the base atoms.
    pub fn type_distribution(&self, t: usize) -> Vec<f64> {
        self.types[t].iter().map(|&c| c as f64 / self.n as f64).collect()
    }

    /// As a probability space whose atoms are labelled by their counts, e.g. `"2,1"`.
    pub fn to_space(&self) -> ProbSpace {
        let atoms = self.types.iter().map(|c| c.iter().map(u32::to_string).collect::<Vec<_>>().join(",")).collect();
        ProbSpace::from_parts_unchecked(atoms, self.weights.clone())
    }

    /// `E ||pi - pi'||_1` for independent `pi, pi'` with this law.
    pub fn expected_pair_distance(&self) -> f64 {
        let dists: Vec<Vec<f64>> = (0..self.types.len()).map(|t| self.type_distribution(t)).collect();
        let mut acc = 0.0;
        for (a, wa) in dists.iter().zip(&self.weights) {
            for (b, wb) in dists.iter().zip(&self.weights) {
                acc += wa * wb * total_variation(a, b).expect("same alphabet");
            }
        }
        acc
    }
}

/// Draws one `n`-type from `base` (sequential binomial splitting).
pub fn sample_type<R: Rng + ?Sized>(base: &ProbSpace, n: u32, rng: &mut R) -> Vec<u32> {
    let k = base.len();
    let mut counts = vec![0u32; k];
    let mut remaining = n as u64;
    let mut mass = 1.0;
    for (i, &p) in base.weights().iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == k {
            counts[i] = remaining as u32;
            break;
        }
        let prob = (p / mass).clamp(0.0, 1.0);
        let c = Binomial::new(remaining, prob).expect("valid binomial").sample(rng);
        counts[i] = c as u32;
        remaining -= c;
        mass -= p;
    }
    counts
}

/// Monte Carlo estimate of `E ||pi - pi'||_1` under `tau_n (x) tau_n`.
pub fn sampled_pair_distance<R: Rng + ?Sized>(base: &ProbSpace, n: u32, samples: usize, rng: &mut R) -> f64 {
    let mut acc = 0.0;
    for _ in 0..samples {
        let a = sample_type(base, n, rng);
        let b = sample_type(base, n, rng);
        let d: u32 = a.iter().zip(&b).map(|(x, y)| x.abs_diff(*y)).sum();
        acc += d as f64 / n as f64;
    }
    acc / samples as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn entropy_examples() {
        assert!(close(ProbSpace::uniform(2).entropy(), std::f64::consts::LN_2));
        assert_eq!(ProbSpace::point().entropy(), 0.0);
        let x = ProbSpace::from_weights(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        // -(1/3) ln(1/3) - (2/3) ln(2/3)
        assert!((x.entropy() - 0.636514168294813).abs() < 1e-12);
    }

    #[test]
    fn zero_weight_atoms_are_dropped() {
        let x = ProbSpace::from_weights(&[0.5, 0.0, 0.5]).unwrap();
        assert_eq!(x.atoms(), &["0".to_string(), "2".to_string()]);
    }

    #[test]
    fn bad_distributions_rejected() {
        assert!(matches!(ProbSpace::from_weights(&[0.5, 0.4]), Err(Error::BadDistribution(_))));
        assert!(matches!(ProbSpace::from_weights(&[1.5, -0.5]), Err(Error::BadDistribution(_))));
        assert!(matches!(
            ProbSpace::new(vec!["a".into(), "a".into()], vec![0.5, 0.5]),
            Err(Error::DuplicateAtom { .. })
        ));
    }

    #[test]
    fn tensor_examples() {
        let x = ProbSpace::from_weights(&[0.2, 0.8]).unwrap();
        let t = x.tensor(&ProbSpace::point());
        assert_eq!(t.weights(), x.weights());
        let u4 = ProbSpace::uniform(2).tensor(&ProbSpace::uniform(2));
        assert!(u4.weights().iter().all(|&w| close(w, 0.25)));
    }

    #[test]
    fn total_variation_examples() {
        let p = [0.5, 0.5];
        assert_eq!(total_variation(&p, &p).unwrap(), 0.0);
        assert_eq!(total_variation(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 2.0);
        assert!(close(total_variation(&p, &[0.25, 0.75]).unwrap(), 0.5));
        assert_eq!(total_variation(&p, &[1.0]).unwrap_err(), Error::MismatchedSupportSets(2, 1));
    }

    #[test]
    fn empirical_map_examples() {
        let x = ProbSpace::new(vec!["a".into(), "b".into()], vec![0.5, 0.5]).unwrap();
        let t = empirical_map(&x, &["a", "a", "b"]).unwrap();
        assert!(close(t[0], 2.0 / 3.0) && close(t[1], 1.0 / 3.0));
        assert_eq!(empirical_map(&x, &["a"; 4]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(empirical_map(&x, &["c"]).unwrap_err(), Error::UnknownAtom("c".into()));
    }

    #[test]
    fn empirical_distribution_uniform_two() {
        // brute force over the four outcomes aa, ab, ba, bb
        let e = EmpiricalDistribution::exact(&ProbSpace::uniform(2), 2, DEFAULT_OUTCOME_BUDGET).unwrap();
        assert_eq!(e.types(), &[vec![2, 0], vec![1, 1], vec![0, 2]]);
        let w = e.weights();
        assert!(close(w[0], 0.25) && close(w[1], 0.5) && close(w[2], 0.25));
    }

    #[test]
    fn empirical_distribution_n_one_matches_base() {
        let x = ProbSpace::from_weights(&[0.2, 0.3, 0.5]).unwrap();
        let e = EmpiricalDistribution::exact(&x, 1, DEFAULT_OUTCOME_BUDGET).unwrap();
        for (t, w) in e.types().iter().zip(e.weights()) {
            let i = t.iter().position(|&c| c == 1).unwrap();
            assert!(close(*w, x.weights()[i]));
        }
    }

    #[test]
    fn empirical_distribution_budget() {
        let err = EmpiricalDistribution::exact(&ProbSpace::uniform(10), 7, DEFAULT_OUTCOME_BUDGET).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn exact_types_match_brute_force_enumeration() {
        let x = ProbSpace::from_weights(&[0.1, 0.6, 0.3]).unwrap();
        let n = 4;
        let e = EmpiricalDistribution::exact(&x, n, DEFAULT_OUTCOME_BUDGET).unwrap();
        // independent oracle: enumerate all 3^4 sequences
        let mut brute = std::collections::BTreeMap::new();
        for code in 0..81usize {
            let mut c = code;
            let mut seq = Vec::new();
            let mut p = 1.0;
            for _ in 0..n {
                seq.push(c % 3);
                p *= x.weights()[c % 3];
                c /= 3;
            }
            *brute.entry(type_counts(3, &seq)).or_insert(0.0) += p;
        }
        assert_eq!(brute.len(), e.types().len());
        for (t, w) in e.types().iter().zip(e.weights()) {
            assert!((brute[t] - w).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_types_match_exact_frequencies() {
        let x = ProbSpace::from_weights(&[0.3, 0.7]).unwrap();
        let e = EmpiricalDistribution::exact(&x, 3, DEFAULT_OUTCOME_BUDGET).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let draws = 20_000;
        let mut freq = vec![0usize; e.types().len()];
        for _ in 0..draws {
            let t = sample_type(&x, 3, &mut rng);
            freq[e.types().iter().position(|c| *c == t).unwrap()] += 1;
        }
        for (f, w) in freq.iter().zip(e.weights()) {
            let sigma = (w * (1.0 - w) / draws as f64).sqrt();
            assert!((*f as f64 / draws as f64 - w).abs() <= 3.0 * sigma + 1e-12);
        }
    }

    #[test]
    fn expected_pair_distance_decays() {
        let x = ProbSpace::uniform(2);
        let d4 = EmpiricalDistribution::exact(&x, 4, DEFAULT_OUTCOME_BUDGET).unwrap().expected_pair_distance();
        // X - X' for X, X' ~ Bin(4, 1/2) is Bin(8, 1/2) - 4; E|.| = 280/256
        assert!((d4 - 2.0 * (280.0 / 256.0) / 4.0).abs() < 1e-12);
        let d16 = EmpiricalDistribution::exact(&x, 16, DEFAULT_OUTCOME_BUDGET).unwrap().expected_pair_distance();
        assert!(d16 < d4);
    }

    #[test]
    fn conditioning_a_joint_on_its_second_coordinate() {
        let joint =
            ProbSpace::new(vec!["(a,0)".into(), "(a,1)".into(), "(b,1)".into()], vec![0.25, 0.25, 0.5]).unwrap();
        let f = Reduction::pushforward(joint, &["0".into(), "1".into(), "1".into()]).unwrap();
        let c = condition_space(&f, "1").unwrap();
        assert_eq!(c.atoms(), &["(a,1)".to_string(), "(b,1)".to_string()]);
        assert!(close(c.weights()[0], 1.0 / 3.0) && close(c.weights()[1], 2.0 / 3.0));
        assert_eq!(f.condition("7").unwrap_err(), Error::AtomNotInTarget("7".into()));

        let id = Reduction::identity(ProbSpace::uniform(3));
        let c = id.condition("1").unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn reduction_rejects_bad_maps() {
        let x = ProbSpace::uniform(2);
        assert!(matches!(Reduction::new(x.clone(), ProbSpace::uniform(2), vec![0, 0]), Err(Error::NotSurjective(_))));
        let y = ProbSpace::from_weights(&[0.3, 0.7]).unwrap();
        assert!(matches!(Reduction::new(x, y, vec![0, 1]), Err(Error::NotMeasurePreserving(_))));
    }

    #[test]
    fn coordinate_map_kd() {
        let u4 = ProbSpace::uniform(4);
        let f = Reduction::pushforward(u4, &["0".into(), "1".into(), "0".into(), "1".into()]).unwrap();
        assert!(close(f.entropy_distance(), std::f64::consts::LN_2));
        assert_eq!(Reduction::identity(ProbSpace::uniform(3)).entropy_distance(), 0.0);
    }

    fn weights_strategy(max: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.01f64..1.0, 1..=max).prop_map(|v| {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect()
        })
    }

    proptest! {
        #[test]
        fn entropy_additive_and_permutation_invariant(a in weights_strategy(5), b in weights_strategy(5)) {
            let x = ProbSpace::from_weights(&a).unwrap();
            let y = ProbSpace::from_weights(&b).unwrap();
            prop_assert!((x.tensor(&y).entropy() - x.entropy() - y.entropy()).abs() < 1e-9);
            let mut r = a.clone();
            r.reverse();
            prop_assert!((ProbSpace::from_weights(&r).unwrap().entropy() - x.entropy()).abs() < 1e-9);
        }

        #[test]
        fn chain_rule_for_any_reduction(a in weights_strategy(6), labels in prop::collection::vec(0usize..3, 6)) {
            let x = ProbSpace::from_weights(&a).unwrap();
            let image: Vec<String> = (0..x.len()).map(|i| labels[i].to_string()).collect();
            let f = Reduction::pushforward(x.clone(), &image).unwrap();
            let mut avg = 0.0;
            for (i, u) in f.target().atoms().iter().enumerate() {
                let c = f.condition(u).unwrap();
                prop_assert!((c.weights().iter().sum::<f64>() - 1.0).abs() < 1e-9);
                avg += f.target().weights()[i] * c.entropy();
            }
            prop_assert!((avg - (x.entropy() - f.target().entropy())).abs() < 1e-9);
        }

        #[test]
        fn total_variation_is_a_metric(a in weights_strategy(4), b in weights_strategy(4), c in weights_strategy(4)) {
            let k = a.len().min(b.len()).min(c.len());
            let (a, b, c) = (&a[..k], &b[..k], &c[..k]);
            let ab = total_variation(a, b).unwrap();
            prop_assert!((ab - total_variation(b, a).unwrap()).abs() < 1e-15);
            prop_assert!(ab <= total_variation(a, c).unwrap() + total_variation(c, b).unwrap() + 1e-12);
            prop_assert_eq!(total_variation(a, a).unwrap(), 0.0);
        }

        #[test]
        fn empirical_map_is_functorial(tuple in prop::collection::vec(0usize..4, 1..8), f in prop::collection::vec(0usize..2, 4)) {
            // f : {0..3} -> {0,1} (made surjective by fixing f(0)=0, f(1)=1)
            let mut f = f;
            f[0] = 0;
            f[1] = 1;
            let x = ProbSpace::uniform(4);
            let labels: Vec<String> = tuple.iter().map(|i| i.to_string()).collect();
            let emp = empirical_map(&x, &labels).unwrap();
            let mut pushed = [0.0; 2];
            for (i, w) in emp.iter().enumerate() {
                pushed[f[i]] += w;
            }
            let y = ProbSpace::uniform(2);
            let mapped: Vec<String> = tuple.iter().map(|&i| f[i].to_string()).collect();
            let emp_y = empirical_map(&y, &mapped).unwrap();
            prop_assert!(total_variation(&emp_y, &pushed).unwrap() < 1e-12);
        }
    }
}
