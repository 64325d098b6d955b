//! Learn a structure from sampled rows.
//!
//! Samples 2000 rows from a known chain, then runs the grow/thin search
//! with a chi-squared decision rule and prints every move the search made.

use daglearn::{
    ancestral_sample, learn_structure, random_net, DecisionRule, EmpiricalContext,
    EmpiricalEvaluator, NodeOrdering, OrderedDag, Phase, Variables,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let vars = Variables::binary(4);
    let ordering = NodeOrdering::identity(4);
    let dag = OrderedDag::new(ordering.clone(), vec![vec![], vec![0], vec![1], vec![2]]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let net = random_net(&vars, &dag, &mut rng).unwrap();

    let data = ancestral_sample(&net, 2000, 7).unwrap();
    let ctx = EmpiricalContext::new(data);
    let eval = EmpiricalEvaluator::cross_entropy(&ctx);
    let rule = DecisionRule::chi_squared(0.01).unwrap();
    let (learned, trace) = learn_structure(&eval, &ordering, &rule).unwrap();

    println!("true parents:    {:?}", dag.parent_sets());
    println!("learned parents: {:?}", learned.parent_sets());
    println!();
    for steps in &trace.steps {
        for step in steps {
            let action = match step.phase {
                Phase::Grow => "grow",
                Phase::Thin => "thin",
            };
            println!(
                "node {} {action} {:?}: statistic {:.4}, independent: {}, parents now {:?}",
                step.node, step.candidate, step.statistic, step.verdict, step.parents_after
            );
        }
    }
}
