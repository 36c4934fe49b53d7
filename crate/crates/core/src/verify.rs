//! Randomized property suites. Every suite is a pure function of its
//! configuration: trials draw from independent seeded streams and results are
//! assembled in trial order, so reports are byte-for-byte reproducible.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::diagram::ProbDiagram;
use crate::distance::{
    conditioned_power_coupling, expected_self_conditioning, ikd, slicing_bound_check, IkdOptions, EXACT_BUDGET,
    INEQUALITY_SLACK,
};
use crate::error::{Error, Result};
use crate::format::diagram_to_value;
use crate::homogeneity::homogeneous_conditioning_collapse;
use crate::prob::{sampled_pair_distance, ProbSpace, DEFAULT_OUTCOME_BUDGET};
use crate::random::{homogeneous_examples, random_diagram, sample_index, shape_by_name, trial_rng, SHAPES};
use crate::tropical::{
    check_admissible, conditioning_additivity_check, conditioning_lipschitz_check, conditioning_power_check,
    AdmissibleFunction,
};

const EXACT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    EntropyHomomorphism,
    LipschitzEntropy,
    IkdMetric,
    Slicing,
    CondTypes,
    SelfConditioning,
    Additivity,
    HomogeneityPower,
    CondLipschitz,
    SanovDecay,
    Admissible,
    HomogeneousCollapse,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::EntropyHomomorphism,
        Suite::LipschitzEntropy,
        Suite::IkdMetric,
        Suite::Slicing,
        Suite::CondTypes,
        Suite::SelfConditioning,
        Suite::Additivity,
        Suite::HomogeneityPower,
        Suite::CondLipschitz,
        Suite::SanovDecay,
        Suite::Admissible,
        Suite::HomogeneousCollapse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::EntropyHomomorphism => "entropy-homomorphism",
            Suite::LipschitzEntropy => "lipschitz-entropy",
            Suite::IkdMetric => "ikd-metric",
            Suite::Slicing => "slicing",
            Suite::CondTypes => "cond-types",
            Suite::SelfConditioning => "self-conditioning",
            Suite::Additivity => "additivity",
            Suite::HomogeneityPower => "homogeneity-power",
            Suite::CondLipschitz => "cond-lipschitz",
            Suite::SanovDecay => "sanov-decay",
            Suite::Admissible => "admissible",
            Suite::HomogeneousCollapse => "homogeneous-collapse",
        }
    }

    /// Trials run when none are requested. Sanov decay counts Monte Carlo samples.
    pub fn default_trials(self) -> usize {
        match self {
            Suite::EntropyHomomorphism | Suite::Additivity | Suite::HomogeneityPower => 200,
            Suite::LipschitzEntropy | Suite::IkdMetric | Suite::CondTypes => 100,
            Suite::Slicing | Suite::CondLipschitz => 50,
            Suite::SelfConditioning | Suite::HomogeneousCollapse => 20,
            Suite::SanovDecay => 10_000,
            Suite::Admissible => 3,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub trials: Option<usize>,
    pub seed: u64,
    pub outcome_budget: u128,
    pub exact_budget: usize,
    pub n_max: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            trials: None,
            seed: 1,
            outcome_budget: DEFAULT_OUTCOME_BUDGET,
            exact_budget: EXACT_BUDGET,
            n_max: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    pub message: String,
    /// Suite-specific parameters of the trial, such as the conditioning words.
    #[serde(skip_serializing_if = "Value::is_null")]
    pub context: Value,
    /// The offending diagrams in the JSON diagram format.
    pub instances: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    /// Smallest slack over all trials: `bound - observed` for inequalities,
    /// `-gap` for identities. Negative beyond the tolerance means a violation.
    pub worst_margin: f64,
    pub details: Value,
    pub counterexamples: Vec<Counterexample>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

struct Trial {
    ok: bool,
    margin: f64,
    message: String,
    instances: Vec<ProbDiagram>,
    detail: Option<Value>,
}

impl Trial {
    fn new(ok: bool, margin: f64, message: String, instances: &[&ProbDiagram]) -> Self {
        Trial { ok, margin, message, instances: instances.iter().map(|d| (*d).clone()).collect(), detail: None }
    }
}

fn random_atoms<R: Rng + ?Sized>(rng: &mut R, max: usize) -> usize {
    rng.random_range(2..=max)
}

fn assemble(suite: Suite, config: &VerifyConfig, trials: usize, results: Vec<Trial>, details: Value) -> SuiteReport {
    let mut passed = 0;
    let mut worst = f64::INFINITY;
    let mut counterexamples = Vec::new();
    for (i, t) in results.into_iter().enumerate() {
        worst = worst.min(t.margin);
        if t.ok {
            passed += 1;
        } else {
            counterexamples.push(Counterexample {
                trial: i,
                message: t.message,
                context: t.detail.unwrap_or(Value::Null),
                instances: t.instances.iter().map(diagram_to_value).collect(),
            });
        }
    }
    SuiteReport {
        suite,
        seed: config.seed,
        trials,
        passed,
        failed: counterexamples.len(),
        worst_margin: if worst.is_finite() { worst } else { 0.0 },
        details,
        counterexamples,
    }
}

/// Runs `count` trials in parallel; the first error in trial order wins.
fn run_trials<F>(count: usize, f: F) -> Result<Vec<Trial>>
where
    F: Fn(usize) -> Result<Trial> + Sync + Send,
{
    (0..count).into_par_iter().map(&f).collect::<Vec<_>>().into_iter().collect()
}

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> Result<SuiteReport> {
    let trials = config.trials.unwrap_or(suite.default_trials());
    let seed = config.seed;
    let budget = config.outcome_budget;
    let exact = IkdOptions { exact_budget: config.exact_budget, ..IkdOptions::exact() };
    // `t` indexes the stream; shapes rotate with it unless a suite loops over them
    let shape_of = |t: usize| shape_by_name(SHAPES[t % SHAPES.len()]);
    let (results, details) = match suite {
        Suite::EntropyHomomorphism => {
            let r = run_trials(trials * SHAPES.len(), |t| {
                let shape = shape_by_name(SHAPES[t / trials])?;
                let mut rng = trial_rng(seed, t as u64);
                let x = random_diagram(&shape, random_atoms(&mut rng, 4), &mut rng)?;
                let y = random_diagram(&shape, random_atoms(&mut rng, 4), &mut rng)?;
                let xy = x.tensor(&y, budget)?;
                let gap = xy.entropy_vector().l1_distance(&(&x.entropy_vector() + &y.entropy_vector()));
                Ok(Trial::new(gap < EXACT_TOLERANCE, -gap, format!("entropy gap {gap:e}"), &[&x, &y]))
            })?;
            (r, json!({ "shapes": SHAPES, "per_shape": trials }))
        }
        Suite::LipschitzEntropy => {
            let r = run_trials(trials, |t| {
                let shape = shape_of(t)?;
                let mut rng = trial_rng(seed, t as u64);
                let x = random_diagram(&shape, random_atoms(&mut rng, 4), &mut rng)?;
                let y = random_diagram(&shape, random_atoms(&mut rng, 4), &mut rng)?;
                let d = ikd(&x, &y, exact)?.value;
                let gap = x.entropy_vector().l1_distance(&y.entropy_vector());
                let margin = d - gap;
                Ok(Trial::new(margin >= -EXACT_TOLERANCE, margin, format!("entropy gap {gap} > ikd {d}"), &[&x, &y]))
            })?;
            (r, Value::Null)
        }
        Suite::IkdMetric => {
            let r = run_trials(trials, |t| {
                let shape = shape_of(t)?;
                let mut rng = trial_rng(seed, t as u64);
                let x = random_diagram(&shape, random_atoms(&mut rng, 4), &mut rng)?;
                let y = random_diagram(&shape, random_atoms(&mut rng, 4), &mut rng)?;
                let z = random_diagram(&shape, random_atoms(&mut rng, 4), &mut rng)?;
                let d = |a: &ProbDiagram, b: &ProbDiagram| ikd(a, b, exact).map(|r| r.value);
                let (xy, yx, xx) = (d(&x, &y)?, d(&y, &x)?, d(&x, &x)?);
                let (xz, zy) = (d(&x, &z)?, d(&z, &y)?);
                let asym = (xy - yx).abs();
                let triangle = xz + zy - xy;
                let ok = asym <= EXACT_TOLERANCE && xx.abs() <= EXACT_TOLERANCE && triangle >= -EXACT_TOLERANCE;
                let margin = triangle.min(-asym).min(-xx.abs());
                let msg = format!("d(x,y)={xy} d(y,x)={yx} d(x,x)={xx} d(x,z)+d(z,y)={}", xz + zy);
                Ok(Trial::new(ok, margin, msg, &[&x, &y, &z]))
            })?;
            (r, Value::Null)
        }
        Suite::Slicing => {
            let r = run_trials(trials * SHAPES.len(), |t| {
                let shape = shape_by_name(SHAPES[t / trials])?;
                let mut rng = trial_rng(seed, t as u64);
                let x = random_diagram(&shape, random_atoms(&mut rng, 4), &mut rng)?;
                let y = random_diagram(&shape, random_atoms(&mut rng, 4), &mut rng)?;
                let iota = rng.random_range(0..shape.len());
                let s = slicing_bound_check(&x, iota, &y, config.exact_budget)?;
                let msg = format!("ikd {} > {} + {} at object {iota}", s.lhs, s.integral, s.entropy_term);
                Ok(Trial::new(s.holds, s.rhs - s.lhs, msg, &[&x, &y]))
            })?;
            (r, json!({ "shapes": SHAPES, "per_shape": trials }))
        }
        Suite::CondTypes => {
            let r = run_trials(trials, |t| {
                let shape = shape_of(t)?;
                let mut rng = trial_rng(seed, t as u64);
                let a = random_diagram(&shape, random_atoms(&mut rng, 4), &mut rng)?;
                let iota = rng.random_range(0..shape.len());
                let n = rng.random_range(1..=4);
                let w = a.weights(iota);
                let mut word =
                    || -> Vec<String> { (0..n).map(|_| a.set(iota)[sample_index(w, &mut rng)].clone()).collect() };
                let (e, e2) = (word(), word());
                let r = conditioned_power_coupling(&a, iota, &e, &e2)?;
                let counts_ok = r.mismatch_count_matches();
                let margin = r.bound - r.cost;
                let ok = counts_ok && margin >= -EXACT_TOLERANCE;
                let msg = format!(
                    "object {iota}, e={e:?}, e'={e2:?}: kd {} vs bound {}, {} mismatches at distance {}",
                    r.cost, r.bound, r.mismatches, r.type_distance
                );
                let mut trial = Trial::new(ok, margin, msg, &[&a]);
                trial.detail = Some(json!({ "object": iota, "e": e, "e2": e2 }));
                Ok(trial)
            })?;
            (r, Value::Null)
        }
        Suite::SelfConditioning => {
            let ns = [1u32, 2, 4, 8];
            let r = run_trials(trials, |t| {
                let shape = shape_of(t)?;
                let mut rng = trial_rng(seed, t as u64);
                let a = random_diagram(&shape, random_atoms(&mut rng, 3), &mut rng)?;
                let iota = rng.random_range(0..shape.len());
                let mut margin = f64::INFINITY;
                let mut msg = String::new();
                for n in ns {
                    let s = expected_self_conditioning(&a, iota, n, budget, config.exact_budget)?;
                    let m = s.bound - s.estimate;
                    if m < margin {
                        margin = m;
                        msg = format!("n={n} object {iota}: estimate {} > bound {}", s.estimate, s.bound);
                    }
                }
                Ok(Trial::new(margin >= -INEQUALITY_SLACK, margin, msg, &[&a]))
            })?;
            (r, json!({ "n": ns }))
        }
        Suite::Additivity => {
            let r = run_trials(trials, |t| {
                let shape = shape_of(t)?;
                let mut rng = trial_rng(seed, t as u64);
                let x = random_diagram(&shape, random_atoms(&mut rng, 3), &mut rng)?;
                let y = random_diagram(&shape, random_atoms(&mut rng, 3), &mut rng)?;
                let iota = rng.random_range(0..shape.len());
                let a = conditioning_additivity_check(&x, &y, iota, budget)?;
                let gap = a.entropy_gap.max(a.mixture_bound);
                let msg =
                    format!("object {iota}: entropy gap {:e}, mixture bound {:e}", a.entropy_gap, a.mixture_bound);
                Ok(Trial::new(a.holds, -gap, msg, &[&x, &y]))
            })?;
            (r, Value::Null)
        }
        Suite::HomogeneityPower => {
            let ns = [2usize, 3];
            let r = run_trials(trials, |t| {
                let shape = shape_of(t)?;
                let mut rng = trial_rng(seed, t as u64);
                let x = random_diagram(&shape, random_atoms(&mut rng, 4), &mut rng)?;
                let iota = rng.random_range(0..shape.len());
                let mut gap: f64 = 0.0;
                for n in ns {
                    gap = gap.max(conditioning_power_check(&x, iota, n, budget)?.gap);
                }
                let msg = format!("object {iota}: power gap {gap:e}");
                Ok(Trial::new(gap <= EXACT_TOLERANCE, -gap, msg, &[&x]))
            })?;
            (r, json!({ "n": ns }))
        }
        Suite::CondLipschitz => {
            let shape = shape_by_name("two-fan")?;
            let r = run_trials(trials, |t| {
                let mut rng = trial_rng(seed, t as u64);
                let x = random_diagram(&shape, random_atoms(&mut rng, 4), &mut rng)?;
                let y = random_diagram(&shape, random_atoms(&mut rng, 4), &mut rng)?;
                let iota = rng.random_range(0..shape.len());
                let l = conditioning_lipschitz_check(&x, &y, iota, config.n_max, budget, config.exact_budget)?;
                let msg = format!("object {iota}: lhs_upper {} > rhs {}", l.lhs_upper, l.rhs);
                let mut trial = Trial::new(l.holds, l.margin, msg, &[&x, &y]);
                trial.detail = Some(json!({ "chain": l.chain, "transport": l.transport }));
                Ok(trial)
            })?;
            let chain_wins = r
                .iter()
                .filter(|t| t.detail.as_ref().is_some_and(|d| d["chain"].as_f64() <= d["transport"].as_f64()))
                .count();
            (r, json!({ "shape": "two-fan", "n_max": config.n_max, "chain_at_most_transport": chain_wins }))
        }
        Suite::SanovDecay => {
            let ns = [4u32, 16, 64, 256];
            let space = ProbSpace::uniform(2);
            let mut rng = trial_rng(seed, 0);
            let means: Vec<f64> = ns.iter().map(|&n| sampled_pair_distance(&space, n, trials, &mut rng)).collect();
            let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
            let ys: Vec<f64> = means.iter().map(|m| m.ln()).collect();
            let slope = least_squares_slope(&xs, &ys);
            let margin = 0.1 - (slope + 0.5).abs();
            let ok = (-0.6..=-0.4).contains(&slope);
            let trial = Trial::new(ok, margin, format!("log-log slope {slope}"), &[]);
            let details = json!({ "n": ns, "samples": trials, "means": means, "slope": slope });
            return Ok(assemble(suite, config, 1, vec![trial], details));
        }
        Suite::Admissible => {
            let mut results = Vec::new();
            let mut constants = Vec::new();
            for (alpha, closed) in [(0.5, 16.0), (0.75, 32.0)] {
                let r = check_admissible(&AdmissibleFunction::Power(alpha), Some(closed * 1.05))?;
                let rel = (r.numeric_constant - closed).abs() / closed;
                constants.push(json!({ "function": r.function, "numeric": r.numeric_constant, "closed_form": closed }));
                let msg = format!("{}: numeric constant {} vs {closed}", r.function, r.numeric_constant);
                results.push(Trial::new(r.admissible && rel <= 0.05, 0.05 - rel, msg, &[]));
            }
            let linear = check_admissible(&AdmissibleFunction::Power(1.0), None);
            let diverges = matches!(linear, Err(Error::TailDiverges));
            results.push(Trial::new(diverges, 0.0, format!("t^1 gave {linear:?}"), &[]));
            let n = results.len();
            return Ok(assemble(
                suite,
                config,
                n,
                results,
                json!({ "constants": constants, "linear_diverges": diverges }),
            ));
        }
        Suite::HomogeneousCollapse => {
            let examples = homogeneous_examples();
            let count = trials.min(examples.len());
            let r = run_trials(count, |t| {
                let (x, iota) = &examples[t];
                let c = homogeneous_conditioning_collapse(x, *iota)?;
                let msg =
                    format!("object {iota}: isomorphic {}, entropy gap {:e}", c.pairwise_isomorphic, c.entropy_gap);
                Ok(Trial::new(c.holds, -c.entropy_gap, msg, &[x]))
            })?;
            return Ok(assemble(suite, config, count, r, Value::Null));
        }
    };
    let total = results.len();
    Ok(assemble(suite, config, total, results, details))
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
