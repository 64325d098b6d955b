//! Run the paired search engines and report their agreement.
//!
//! Every structure decision is computed twice, once as a conditional
//! independence test and once as a score comparison. The two framings are
//! algebraically the same quantity, so the searches must take identical
//! steps with matching statistics. `dual_search` runs both and diffs them.

use daglearn::{
    dual_search, random_dataset, random_joint, DecisionRule, DirichletPrior, DualInput,
    EmpiricalContext, NodeOrdering,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);

    // empirical input: counts from sampled rows, four different rules
    let data = random_dataset(&[2, 3, 2, 2], 0.5, 800, &mut rng).unwrap();
    let ctx = EmpiricalContext::new(data);
    let ordering = NodeOrdering::identity(4);
    let rules = [
        ("epsilon 0.02", DecisionRule::epsilon(0.02).unwrap()),
        ("chi2 at 0.05", DecisionRule::chi_squared(0.05).unwrap()),
        ("aic", DecisionRule::aic()),
        (
            "bayes",
            DecisionRule::bayes(DirichletPrior::uniform(1.0).unwrap(), 0.0).unwrap(),
        ),
    ];
    for (name, rule) in &rules {
        let report = dual_search(DualInput::Empirical(&ctx), &ordering, rule, 1e-10).unwrap();
        println!(
            "{name:>12} on data: structures equal: {}, max step discrepancy {:.3e}",
            report.structures_equal, report.max_step_discrepancy
        );
    }

    // exact input: a random joint table, threshold rule
    let joint = random_joint(&[2, 2, 2, 3], &mut rng).unwrap();
    let rule = DecisionRule::epsilon(0.01).unwrap();
    let report = dual_search(DualInput::Exact(&joint), &ordering, &rule, 1e-10).unwrap();
    println!(
        "{:>12} on joint: structures equal: {}, max step discrepancy {:.3e}",
        "epsilon 0.01", report.structures_equal, report.max_step_discrepancy
    );
    println!(
        "engines: {:?} versus {:?}",
        report.ci_evaluator, report.score_evaluator
    );
}
