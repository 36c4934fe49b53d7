//! Entropy distance of fans and the intrinsic entropy distance between
//! diagrams, computed by optimizing over couplings.
//!
//! A coupling of `X` and `Y` is a joint distribution on `S0^X x S0^Y` with
//! the two initial distributions as marginals. The objective
//! `sum_i 2 H(Z_i)` is concave in the joint, so its minimum over the
//! transportation polytope sits at a vertex.

mod coupling;
mod transport;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

pub(crate) use coupling::KdObjective;
pub use coupling::{tensor_couplings, Cell, CouplingFan};
pub(crate) use transport::{local_search, min_linear_transport};

use crate::diagram::ProbDiagram;
use crate::error::{Error, Result};
use crate::format::format_weight;
use crate::prob::EmpiricalDistribution;

/// Default bound on `|S0^X| * |S0^Y|` for exhaustive vertex enumeration.
pub const EXACT_BUDGET: usize = 20;
/// Largest product size for which `Auto` still runs local search.
pub const LOCAL_SEARCH_LIMIT: usize = 1024;
/// Slack used when comparing an exact distance with a bound.
pub const INEQUALITY_SLACK: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Greedy,
    LocalSearch,
    /// Exact within budget, then local search, then greedy.
    Auto,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Greedy => "greedy",
            Method::LocalSearch => "local-search",
            Method::Auto => "auto",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "greedy" => Ok(Method::Greedy),
            "local-search" => Ok(Method::LocalSearch),
            "auto" => Ok(Method::Auto),
            other => Err(Error::Parse(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkdOptions {
    pub method: Method,
    pub exact_budget: usize,
    pub max_iter: usize,
}

impl Default for IkdOptions {
    fn default() -> Self {
        IkdOptions { method: Method::Auto, exact_budget: EXACT_BUDGET, max_iter: 200 }
    }
}

impl IkdOptions {
    pub fn exact() -> Self {
        IkdOptions { method: Method::Exact, ..Self::default() }
    }

    pub fn with_method(method: Method) -> Self {
        IkdOptions { method, ..Self::default() }
    }
}

/// A distance value with the coupling that achieves it.
#[derive(Debug, Clone)]
pub struct DistanceReport {
    pub value: f64,
    pub certificate: CouplingFan,
    pub method: Method,
    pub is_exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceSummary {
    pub value: f64,
    pub method: Method,
    pub is_exact: bool,
    /// `(left atom, right atom, mass)` for every cell of the certificate.
    pub certificate_support: Vec<(String, String, String)>,
}

impl DistanceReport {
    pub fn summary(&self) -> DistanceSummary {
        let k = &self.certificate;
        DistanceSummary {
            value: self.value,
            method: self.method,
            is_exact: self.is_exact,
            certificate_support: k
                .cells()
                .iter()
                .map(|&(a, b, w)| {
                    (k.left().initial_atoms()[a].clone(), k.right().initial_atoms()[b].clone(), format_weight(w))
                })
                .collect(),
        }
    }
}

fn check_shapes(x: &ProbDiagram, y: &ProbDiagram) -> Result<()> {
    if Arc::ptr_eq(x.shape(), y.shape()) || **x.shape() == **y.shape() {
        Ok(())
    } else {
        Err(Error::ShapeMismatch)
    }
}

/// The intrinsic entropy distance, exact or as a certified upper bound.
pub fn ikd(x: &ProbDiagram, y: &ProbDiagram, opts: IkdOptions) -> Result<DistanceReport> {
    check_shapes(x, y)?;
    let size = x.initial_len() * y.initial_len();
    let method = match opts.method {
        Method::Auto if size <= opts.exact_budget => Method::Exact,
        Method::Auto if size <= LOCAL_SEARCH_LIMIT => Method::LocalSearch,
        Method::Auto => Method::Greedy,
        Method::Exact if size > opts.exact_budget => {
            return Err(Error::ExactBudgetExceeded { needed: size, budget: opts.exact_budget })
        }
        m => m,
    };
    let (rows, cols) = (x.pi0(), y.pi0());
    let mut objective = KdObjective::new(x, y);
    let cells = match method {
        Method::Exact => transport::minimize_over_vertices(rows, cols, |c| objective.eval(c)).0,
        Method::LocalSearch => transport::local_search(rows, cols, |c| objective.eval(c), opts.max_iter).0,
        _ => transport::greedy(rows, cols),
    };
    let certificate = CouplingFan::from_trusted(x.clone(), y.clone(), cells);
    Ok(DistanceReport { value: certificate.entropy_distance(), certificate, method, is_exact: method == Method::Exact })
}

pub fn ikd_exact(x: &ProbDiagram, y: &ProbDiagram) -> Result<f64> {
    Ok(ikd(x, y, IkdOptions::exact())?.value)
}

/// An upper bound on `ikd` together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpperDistance {
    pub value: f64,
    /// `exact`, `greedy`, `local-search` or `index-identity`.
    pub method: String,
    pub is_exact: bool,
}

/// The better of `ikd` under `opts` and, when both diagrams have initial
/// atoms in matching positions with equal weights, the coupling that pairs
/// atoms by index. The latter is how tensor products that differ only in
/// labelling are recognized without a search.
pub fn distance_upper(x: &ProbDiagram, y: &ProbDiagram, opts: IkdOptions) -> Result<UpperDistance> {
    check_shapes(x, y)?;
    if x.initial_len() == y.initial_len() {
        let perm: Vec<usize> = (0..x.initial_len()).collect();
        if let Ok(k) = CouplingFan::from_isomorphism(x, y, &perm) {
            let value = k.entropy_distance();
            if value <= 1e-12 {
                return Ok(UpperDistance { value, method: "index-identity".into(), is_exact: true });
            }
        }
    }
    let r = ikd(x, y, opts)?;
    Ok(UpperDistance { value: r.value, method: r.method.to_string(), is_exact: r.is_exact })
}

/// `ikd(X, Y) <= sum_u p(u) ikd(X|u, Y) + 2|G| H(U)` with `U = X_iota`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlicingReport {
    pub lhs: f64,
    pub integral: f64,
    pub entropy_term: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn slicing_bound_check(
    x: &ProbDiagram,
    iota: usize,
    y: &ProbDiagram,
    exact_budget: usize,
) -> Result<SlicingReport> {
    check_shapes(x, y)?;
    let opts = IkdOptions { exact_budget, ..IkdOptions::exact() };
    let lhs = ikd(x, y, opts)?.value;
    let mut integral = 0.0;
    for (u, &p) in x.weights(iota).iter().enumerate() {
        integral += p * ikd(&x.condition_index(iota, u), y, opts)?.value;
    }
    let entropy_term = 2.0 * x.shape().len() as f64 * x.entropy(iota);
    let rhs = integral + entropy_term;
    Ok(SlicingReport { lhs, integral, entropy_term, rhs, holds: lhs <= rhs + INEQUALITY_SLACK })
}

/// `||ent(A|x)||_1` for every atom `x` of `A_iota`.
fn conditional_norms(a: &ProbDiagram, iota: usize) -> Vec<f64> {
    (0..a.set(iota).len()).map(|x| a.condition_index(iota, x).entropy_vector().l1_norm()).collect()
}

/// A permutation `sigma` of `0..n` pairing equal letters of `e` and
/// `e2[sigma]` first, in order of position; the rest are paired in order.
pub fn matching_permutation(e: &[usize], e2: &[usize]) -> Vec<usize> {
    let n = e.len();
    let mut sigma = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for i in 0..n {
        if let Some(j) = (0..n).find(|&j| !taken[j] && e2[j] == e[i]) {
            sigma[i] = j;
            taken[j] = true;
        }
    }
    let mut free = (0..n).filter(|&j| !taken[j]);
    for s in sigma.iter_mut().filter(|s| **s == usize::MAX) {
        *s = free.next().expect("as many free slots as unmatched positions");
    }
    sigma
}

/// The permutation coupling between `A^n | e` and `A^n | e2`: factor `i` of
/// the left is coupled with factor `sigma(i)` of the right, by the identity
/// where the letters agree and by independence otherwise.
#[derive(Debug, Clone, Serialize)]
pub struct CondTypesReport {
    pub n: usize,
    pub permutation: Vec<usize>,
    pub mismatches: usize,
    /// `||emp(e) - emp(e2)||_1`.
    pub type_distance: f64,
    /// kd of the assembled coupling.
    pub cost: f64,
    /// `n * ||ent A||_1 * ||emp(e) - emp(e2)||_1`.
    pub bound: f64,
    #[serde(skip)]
    pub factors: Vec<CouplingFan>,
}

impl CondTypesReport {
    /// `(n/2) * ||emp(e) - emp(e2)||_1`, compared in integers.
    pub fn mismatch_count_matches(&self) -> bool {
        (self.type_distance * self.n as f64 / 2.0 - self.mismatches as f64).abs() < 1e-9
    }

    /// The coupling itself; its right foot is `A^n | e2` with factors reordered by `sigma`.
    pub fn coupling(&self, budget: u128) -> Result<CouplingFan> {
        let refs: Vec<&CouplingFan> = self.factors.iter().collect();
        tensor_couplings(&refs, budget)
    }
}

pub fn conditioned_power_coupling<S: AsRef<str>>(
    a: &ProbDiagram,
    iota: usize,
    e: &[S],
    e2: &[S],
) -> Result<CondTypesReport> {
    if e.len() != e2.len() {
        return Err(Error::LengthMismatch(e.len(), e2.len()));
    }
    let idx = |t: &[S]| t.iter().map(|s| a.atom_index(iota, s.as_ref())).collect::<Result<Vec<_>>>();
    let (e, e2) = (idx(e)?, idx(e2)?);
    let n = e.len();
    let k = a.set(iota).len();
    let sigma = matching_permutation(&e, &e2);
    let conditioned: Vec<ProbDiagram> = (0..k).map(|x| a.condition_index(iota, x)).collect();
    let mut factors = Vec::with_capacity(n);
    let mut mismatches = 0;
    for i in 0..n {
        let (x, y) = (e[i], e2[sigma[i]]);
        if x == y {
            factors.push(CouplingFan::diagonal(&conditioned[x]));
        } else {
            mismatches += 1;
            factors.push(CouplingFan::independence(&conditioned[x], &conditioned[y])?);
        }
    }
    let count = |t: &[usize]| {
        let mut c = vec![0usize; k];
        t.iter().for_each(|&x| c[x] += 1);
        c
    };
    let (c, c2) = (count(&e), count(&e2));
    let type_distance =
        if n == 0 { 0.0 } else { c.iter().zip(&c2).map(|(&p, &q)| p.abs_diff(q) as f64).sum::<f64>() / n as f64 };
    let cost = factors.iter().map(CouplingFan::entropy_distance).sum();
    let bound = n as f64 * a.entropy_vector().l1_norm() * type_distance;
    Ok(CondTypesReport { n, permutation: sigma, mismatches, type_distance, cost, bound, factors })
}

/// Upper estimate of `E_e ikd(A^n, A^n | e)` against the bound
/// `2n|G|H(E) + n|G| ||ent A||_1 E||pi - pi'||_1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfConditioningReport {
    pub n: u32,
    pub estimate: f64,
    /// `2n|G|H(E)`.
    pub leading: f64,
    /// `E ||pi - pi'||_1` under two independent empirical types.
    pub sanov_term: f64,
    pub bound: f64,
    /// Types at which the exhaustive distance was used.
    pub exact_types: usize,
}

/// The expectation is taken exactly over `n`-types, since both the
/// permutation coupling cost and `A^n | e` up to isomorphism depend only on
/// the type of `e`. Per type the estimate is the least of the independence
/// coupling, slicing through `E^n` with permutation couplings, and the exact
/// distance when the instance fits `exact_budget`.
pub fn expected_self_conditioning(
    a: &ProbDiagram,
    iota: usize,
    n: u32,
    type_budget: u128,
    exact_budget: usize,
) -> Result<SelfConditioningReport> {
    let space = a.space(iota);
    let k = space.len();
    let g = a.shape().len() as f64;
    let nf = n as f64;
    let norm = a.entropy_vector().l1_norm();
    let h_e = space.entropy();
    let types = EmpiricalDistribution::exact(&space, n, type_budget)?;
    let h = conditional_norms(a, iota);
    let tau: Vec<f64> = types.weights().to_vec();
    let cost = |c: &[u32], d: &[u32]| -> f64 { (0..k).map(|x| c[x].abs_diff(d[x]) as f64 * h[x]).sum() };
    let power_len = (a.initial_len() as u128).saturating_pow(n);
    let mut estimate = 0.0;
    let mut exact_types = 0;
    for (t, c) in types.types().iter().enumerate() {
        let independence = nf * norm + (0..k).map(|x| c[x] as f64 * h[x]).sum::<f64>();
        let sliced = types.types().iter().zip(&tau).map(|(d, &w)| w * cost(d, c)).sum::<f64>() + 2.0 * g * nf * h_e;
        let mut best = independence.min(sliced);
        let fibers: u128 = (0..k).map(|x| (a.condition_index(iota, x).initial_len() as u128).pow(c[x])).product();
        if power_len.saturating_mul(fibers) <= exact_budget as u128 {
            let word: Vec<ProbDiagram> =
                (0..k).flat_map(|x| std::iter::repeat_n(a.condition_index(iota, x), c[x] as usize)).collect();
            let refs: Vec<&ProbDiagram> = word.iter().collect();
            let cond = crate::diagram::tensor_all(a.shape(), &refs, type_budget)?;
            let pow = a.power(n as usize, type_budget)?;
            best = best.min(ikd_exact(&pow, &cond)?);
            exact_types += 1;
        }
        estimate += tau[t] * best;
    }
    let sanov_term = types.expected_pair_distance();
    let leading = 2.0 * nf * g * h_e;
    Ok(SelfConditioningReport {
        n,
        estimate,
        leading,
        sanov_term,
        bound: leading + nf * g * norm * sanov_term,
        exact_types,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::IndexingCategory;
    use crate::prob::ProbSpace;
    use std::f64::consts::LN_2;

    fn single(w: &[f64]) -> ProbDiagram {
        ProbDiagram::single(&ProbSpace::from_weights(w).unwrap())
    }

    /// Minimum of kd over a fine grid of 2x2 joints, parameterized by the
    /// mass on cell (0,0).
    fn grid_ikd_2x2(x: &ProbDiagram, y: &ProbDiagram) -> f64 {
        let (p, q) = (x.pi0(), y.pi0());
        let lo = (p[0] - q[1]).max(0.0);
        let hi = p[0].min(q[0]);
        let steps = 20_000;
        (0..=steps)
            .map(|s| {
                let t = lo + (hi - lo) * s as f64 / steps as f64;
                let cells = vec![(0, 0, t), (0, 1, p[0] - t), (1, 0, q[0] - t), (1, 1, 1.0 - p[0] - q[0] + t)];
                let cells = cells.into_iter().filter(|c| c.2 > 0.0).collect();
                CouplingFan::from_trusted(x.clone(), y.clone(), cells).entropy_distance()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn uniform_two_versus_four_is_ln2() {
        let r = ikd(
            &ProbDiagram::single(&ProbSpace::uniform(2)),
            &ProbDiagram::single(&ProbSpace::uniform(4)),
            IkdOptions::exact(),
        )
        .unwrap();
        assert!((r.value - LN_2).abs() < 1e-12);
        assert!(r.is_exact);
    }

    #[test]
    fn self_distance_is_zero() {
        let x = crate::diagram::tests::joint_two_fan();
        let r = ikd(&x, &x, IkdOptions::exact()).unwrap();
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn exact_matches_grid_scan_on_fans() {
        let g = Arc::new(IndexingCategory::two_fan());
        let mk = |w: Vec<f64>, l: [&str; 2], r: [&str; 2]| {
            ProbDiagram::from_labelled_maps(
                g.clone(),
                vec!["s".into(), "t".into()],
                w,
                &[
                    ("left".into(), l.iter().map(|s| s.to_string()).collect()),
                    ("right".into(), r.iter().map(|s| s.to_string()).collect()),
                ],
                &[],
            )
            .unwrap()
        };
        let x = mk(vec![0.3, 0.7], ["a", "b"], ["c", "c"]);
        let y = mk(vec![0.45, 0.55], ["a", "a"], ["c", "d"]);
        let exact = ikd_exact(&x, &y).unwrap();
        let grid = grid_ikd_2x2(&x, &y);
        assert!(exact <= grid + 1e-12);
        assert!(grid - exact < 1e-6, "grid {grid} exact {exact}");
    }

    #[test]
    fn exact_matches_grid_scan_on_spaces() {
        let x = single(&[0.2, 0.8]);
        let y = single(&[0.65, 0.35]);
        let exact = ikd_exact(&x, &y).unwrap();
        assert!((grid_ikd_2x2(&x, &y) - exact).abs() < 1e-6);
    }

    #[test]
    fn heuristics_bound_exact_from_above() {
        let x = single(&[0.1, 0.2, 0.3, 0.4]);
        let y = single(&[0.5, 0.3, 0.15, 0.05]);
        let exact = ikd_exact(&x, &y).unwrap();
        for m in [Method::Greedy, Method::LocalSearch] {
            let r = ikd(&x, &y, IkdOptions::with_method(m)).unwrap();
            assert!(r.value >= exact - 1e-12);
            assert!(!r.is_exact);
        }
    }

    #[test]
    fn exact_budget_is_enforced() {
        let x = single(&[0.2; 5]);
        let err = ikd(&x, &x, IkdOptions::exact()).unwrap_err();
        assert_eq!(err, Error::ExactBudgetExceeded { needed: 25, budget: 20 });
        assert_eq!(ikd(&x, &x, IkdOptions::default()).unwrap().method, Method::LocalSearch);
    }

    #[test]
    fn summary_lists_support() {
        let x = single(&[0.5, 0.5]);
        let s = ikd(&x, &x, IkdOptions::exact()).unwrap().summary();
        assert_eq!(s.certificate_support.len(), 2);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"method\":\"exact\""));
    }

    #[test]
    fn slicing_over_a_point_space_is_equality() {
        let g = Arc::new(IndexingCategory::chain(2));
        let mk = |w: Vec<f64>| {
            ProbDiagram::from_labelled_maps(
                g.clone(),
                vec!["p".into(), "q".into()],
                w,
                &[("x1".into(), vec!["u".into(), "u".into()])],
                &[],
            )
            .unwrap()
        };
        let (x, y) = (mk(vec![0.3, 0.7]), mk(vec![0.5, 0.5]));
        let r = slicing_bound_check(&x, 1, &y, 20).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-12 && r.holds);
        let r = slicing_bound_check(&x, 0, &x, 20).unwrap();
        assert!(r.lhs.abs() < 1e-12 && r.holds);
    }

    #[test]
    fn permutation_matches_equal_letters_first() {
        let sigma = matching_permutation(&[0, 1, 1, 2], &[1, 2, 0, 0]);
        assert_eq!(sigma, vec![2, 0, 3, 1]);
    }

    #[test]
    fn cond_types_identity_and_disjoint_letters() {
        let a = single(&[0.25, 0.75]);
        let r = conditioned_power_coupling(&a, 0, &["0", "1"], &["0", "1"]).unwrap();
        assert_eq!(r.cost, 0.0);
        assert_eq!(r.mismatches, 0);
        let r = conditioned_power_coupling(&a, 0, &["0"], &["1"]).unwrap();
        assert_eq!(r.mismatches, 1);
        assert!(r.mismatch_count_matches());
        // conditioning a single space on its own atom leaves points
        assert!(r.cost.abs() < 1e-12 && r.cost <= r.bound);
    }

    #[test]
    fn cond_types_cost_matches_materialized_coupling() {
        let x = crate::diagram::tests::joint_two_fan();
        let r = conditioned_power_coupling(&x, 2, &["0", "1", "1"], &["1", "1", "0"]).unwrap();
        let k = r.coupling(1_000_000).unwrap();
        assert!((k.entropy_distance() - r.cost).abs() < 1e-12);
        let r = conditioned_power_coupling(&x, 1, &["a", "a"], &["b", "b"]).unwrap();
        let k = r.coupling(1_000_000).unwrap();
        assert!((k.entropy_distance() - r.cost).abs() < 1e-12);
        assert_eq!(r.mismatches, 2);
    }

    /// Conditioning on a rare letter can raise the entropy of every space
    /// above that of the unconditioned diagram, so the per-tuple bound fails.
    #[test]
    fn cond_types_bound_fails_on_rare_letters() {
        let g = Arc::new(IndexingCategory::chain(2));
        let eps = 0.01;
        let a = ProbDiagram::from_labelled_maps(
            g,
            vec!["p".into(), "q".into(), "r".into(), "s".into()],
            vec![eps / 3.0, eps / 3.0, eps / 3.0, 1.0 - eps],
            &[("x1".into(), vec!["e".into(), "e".into(), "e".into(), "f".into()])],
            &[],
        )
        .unwrap();
        let r = conditioned_power_coupling(&a, 1, &["e"], &["f"]).unwrap();
        assert!(r.cost > r.bound);
        let exact = ikd_exact(&a.condition(1, "e").unwrap(), &a.condition(1, "f").unwrap()).unwrap();
        assert!((exact - 3f64.ln()).abs() < 1e-12);
        assert!(exact > r.bound);
    }

    #[test]
    fn self_conditioning_on_point_and_uniform_pair() {
        let a = single(&[0.5, 0.5]);
        let r = expected_self_conditioning(&a, 0, 1, 1_000_000, 20).unwrap();
        assert!((r.estimate - LN_2).abs() < 1e-12);
        let g = Arc::new(IndexingCategory::chain(2));
        let a = ProbDiagram::from_labelled_maps(
            g,
            vec!["p".into(), "q".into()],
            vec![0.4, 0.6],
            &[("x1".into(), vec!["e".into(), "e".into()])],
            &[],
        )
        .unwrap();
        let r = expected_self_conditioning(&a, 1, 3, 1_000_000, 20).unwrap();
        assert!(r.estimate.abs() < 1e-12);
    }

    #[test]
    fn self_conditioning_slack_shrinks() {
        let x = crate::diagram::tests::joint_two_fan();
        let mut last = f64::INFINITY;
        for n in [2u32, 4, 8, 16] {
            let r = expected_self_conditioning(&x, 2, n, 1_000_000, 20).unwrap();
            let slack = r.estimate / n as f64 - r.leading / n as f64;
            assert!(slack <= 1e-12 || slack < last);
            last = slack;
            assert!(r.estimate <= r.bound + 1e-9);
        }
    }
}
