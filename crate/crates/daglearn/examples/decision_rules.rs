//! Run the same search under each decision rule.
//!
//! The four rules answer the same question on different scales: a raw
//! dependence threshold, a chi-squared test, a parameter-count penalty, and
//! a Bayes factor. On the same data they often, but not always, agree; the
//! sample size and the thresholds decide how eagerly each one adds parents.

use daglearn::{
    learn_structure, num_free_parameters, random_dataset, DecisionRule, DirichletPrior,
    EmpiricalContext, EmpiricalEvaluator, NodeOrdering,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let data = random_dataset(&[2, 2, 3, 2], 0.5, 1500, &mut rng).unwrap();
    let ctx = EmpiricalContext::new(data);
    let eval = EmpiricalEvaluator::cross_entropy(&ctx);
    let ordering = NodeOrdering::identity(4);

    let rules = [
        ("epsilon 0.01", DecisionRule::epsilon(0.01).unwrap()),
        ("chi2 at 0.05", DecisionRule::chi_squared(0.05).unwrap()),
        ("aic", DecisionRule::aic()),
        (
            "bayes, unit prior",
            DecisionRule::bayes(DirichletPrior::uniform(1.0).unwrap(), 0.0).unwrap(),
        ),
    ];

    for (name, rule) in rules {
        let (dag, _) = learn_structure(&eval, &ordering, &rule).unwrap();
        let params = num_free_parameters(ctx.variables(), &dag);
        println!("{name:>18}: parents {:?}, {params} free parameters", dag.parent_sets());
    }
}
