//! Fixtures shared by the benchmarks.

use tropcond_core::random::{random_diagram, shape_by_name, trial_rng};
use tropcond_core::ProbDiagram;

/// A reproducible pair of two-fan diagrams with `m` and `k` initial atoms.
pub fn fan_pair(m: usize, k: usize) -> (ProbDiagram, ProbDiagram) {
    let shape = shape_by_name("two-fan").expect("known shape");
    let mut rng = trial_rng(42, (m * 100 + k) as u64);
    let x = random_diagram(&shape, m, &mut rng).expect("valid diagram");
    let y = random_diagram(&shape, k, &mut rng).expect("valid diagram");
    (x, y)
}
