//! Cross-checks between the two views of structure learning: per-node
//! divergence terms against directly summed cross entropies, likelihood
//! ratios against count-based cross entropies, Bayesian independence tests
//! against Bayes factors, and complete searches run under both framings.

use serde::Serialize;

use crate::empirical::{empirical_cce, log_likelihood_ratio, EmpiricalContext};
use crate::error::Result;
use crate::exact::{kl_decomposed, marginalize, nested_difference, JointTable};
use crate::model::{NodeOrdering, OrderedDag, SubIndexer};
use crate::scoring::{bayes_independence_test, log_bayes_factor, DecisionRule, DirichletPrior};
use crate::search::{
    learn_structure, EmpiricalEvaluator, EvaluatorKind, ExactEvaluator, SearchTrace,
};

/// Outcome of one identity check batch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub instances: u64,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityReport {
    pub fn new(identity: impl Into<String>, tolerance: f64) -> Self {
        IdentityReport {
            identity: identity.into(),
            instances: 0,
            max_discrepancy: 0.0,
            tolerance,
            pass: true,
        }
    }

    /// Adds one compared instance. A NaN discrepancy fails the report.
    pub fn record(&mut self, discrepancy: f64) {
        self.instances += 1;
        if !(discrepancy <= self.max_discrepancy) {
            self.max_discrepancy = discrepancy;
        }
        self.pass = self.max_discrepancy <= self.tolerance;
    }

    /// Folds another batch of the same identity into this one.
    pub fn merge(&mut self, other: &IdentityReport) {
        self.instances += other.instances;
        if !(other.max_discrepancy <= self.max_discrepancy) {
            self.max_discrepancy = other.max_discrepancy;
        }
        self.pass = self.max_discrepancy <= self.tolerance;
    }
}

/// Compares every per-node term of the divergence decomposition against
/// the same cross entropy summed by an unrelated code path: all marginals
/// are taken from the joint directly and the term is accumulated as a
/// difference of conditional log probabilities over the predecessor
/// margin, rather than as a single log of a probability ratio product.
pub fn verify_kl_identity(p: &JointTable, dag: &OrderedDag, tol: f64) -> Result<IdentityReport> {
    let decomp = kl_decomposed(p, dag)?;
    let mut report = IdentityReport::new("kl-term-vs-cross-entropy", tol);
    for i in 0..dag.n_nodes() {
        let direct = direct_node_term(p, dag, i)?;
        report.record((decomp.per_node[i] - direct).abs());
    }
    Ok(report)
}

fn direct_node_term(p: &JointTable, dag: &OrderedDag, i: usize) -> Result<f64> {
    let mut pred = dag.ordering().predecessors(i);
    pred.sort_unstable();
    let mut full = pred.clone();
    full.push(i);
    full.sort_unstable();
    let mut ipa: Vec<usize> = dag.parents(i).to_vec();
    ipa.push(i);
    ipa.sort_unstable();
    let t = marginalize(p, &full)?;
    let t_pred = marginalize(p, &pred)?;
    let t_ipa = marginalize(p, &ipa)?;
    let t_pa = marginalize(p, dag.parents(i))?;
    let to_pred = SubIndexer::new(t.scope(), t.cards(), &pred);
    let to_ipa = SubIndexer::new(t.scope(), t.cards(), &ipa);
    let to_pa = SubIndexer::new(t.scope(), t.cards(), dag.parents(i));
    let mut sum = 0.0;
    for (idx, &q) in t.probs().iter().enumerate() {
        if q > 0.0 {
            let full_cond = q / t_pred.probs()[to_pred.project(idx)];
            let pa_cond = t_ipa.probs()[to_ipa.project(idx)] / t_pa.probs()[to_pa.project(idx)];
            sum += q * (full_cond.ln() - pa_cond.ln());
        }
    }
    Ok(sum)
}

/// Compares the per-row log-likelihood ratio of two nested parent sets
/// against the count-based conditional cross entropy of the added
/// variables.
pub fn verify_llr_identity(
    ctx: &EmpiricalContext,
    i: usize,
    pa_old: &[usize],
    pa_new: &[usize],
    tol: f64,
) -> Result<IdentityReport> {
    let added = nested_difference(i, pa_old, pa_new)?;
    let llr = log_likelihood_ratio(ctx, i, pa_old, pa_new)?;
    let n = ctx.n_rows();
    let per_row = if n == 0 { 0.0 } else { llr / n as f64 };
    let cce = empirical_cce(ctx, &[i], &added, pa_old)?;
    let mut report = IdentityReport::new("llr-vs-conditional-cross-entropy", tol);
    report.record((per_row - cce).abs());
    Ok(report)
}

/// Compares the Bayesian independence test, built from two explicit
/// hypothesis marginals, against the log Bayes factor of the matching
/// nested parent sets.
pub fn verify_bayes_identity(
    ctx: &EmpiricalContext,
    i: usize,
    s: &[usize],
    c: &[usize],
    prior: &DirichletPrior,
    tol: f64,
) -> Result<IdentityReport> {
    let test = bayes_independence_test(ctx, i, s, c, prior)?;
    let mut union: Vec<usize> = c.iter().chain(s).copied().collect();
    union.sort_unstable();
    let factor = log_bayes_factor(ctx, i, c, &union, prior)?;
    let mut report = IdentityReport::new("bayes-test-vs-bayes-factor", tol);
    report.record((test - factor).abs());
    Ok(report)
}

/// Input shared by both engines of a dual search.
#[derive(Clone, Copy)]
pub enum DualInput<'a> {
    Exact(&'a JointTable),
    Empirical(&'a EmpiricalContext),
}

/// Outcome of running the same search under both framings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualSearchReport {
    pub rule: DecisionRule,
    pub ci_evaluator: EvaluatorKind,
    pub score_evaluator: EvaluatorKind,
    pub ci_parents: Vec<Vec<usize>>,
    pub score_parents: Vec<Vec<usize>>,
    pub structures_equal: bool,
    pub steps_aligned: bool,
    pub max_step_discrepancy: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub ci_trace: SearchTrace,
    pub score_trace: SearchTrace,
}

/// Learns a structure twice, once with the independence-testing evaluator
/// and once with the score-based one, and reports whether the moves, the
/// statistics, and the final parent sets agree. Disagreement is a report
/// outcome, not an error.
pub fn dual_search(
    input: DualInput<'_>,
    ordering: &NodeOrdering,
    rule: &DecisionRule,
    tol: f64,
) -> Result<DualSearchReport> {
    let ((ci_dag, ci_trace), (score_dag, score_trace)) = match input {
        DualInput::Exact(p) => {
            let ci = ExactEvaluator::cross_entropy(p);
            let score = ExactEvaluator::score_based(p);
            (
                learn_structure(&ci, ordering, rule)?,
                learn_structure(&score, ordering, rule)?,
            )
        }
        DualInput::Empirical(ctx) => {
            let ci = EmpiricalEvaluator::cross_entropy(ctx);
            let score = EmpiricalEvaluator::score_based(ctx);
            (
                learn_structure(&ci, ordering, rule)?,
                learn_structure(&score, ordering, rule)?,
            )
        }
    };
    let structures_equal = ci_dag.parent_sets() == score_dag.parent_sets();
    let (steps_aligned, max_step_discrepancy) = compare_traces(&ci_trace, &score_trace);
    let pass = structures_equal && steps_aligned && max_step_discrepancy <= tol;
    Ok(DualSearchReport {
        rule: *rule,
        ci_evaluator: ci_trace.evaluator,
        score_evaluator: score_trace.evaluator,
        ci_parents: ci_dag.parent_sets().to_vec(),
        score_parents: score_dag.parent_sets().to_vec(),
        structures_equal,
        steps_aligned,
        max_step_discrepancy,
        tolerance: tol,
        pass,
        ci_trace,
        score_trace,
    })
}

/// Steps align when both traces make the same moves with the same
/// verdicts; the returned discrepancy is the largest statistic gap, or
/// infinity when the moves differ.
fn compare_traces(a: &SearchTrace, b: &SearchTrace) -> (bool, f64) {
    if a.steps.len() != b.steps.len() {
        return (false, f64::INFINITY);
    }
    let mut max_gap = 0.0f64;
    for (node_a, node_b) in a.steps.iter().zip(&b.steps) {
        if node_a.len() != node_b.len() {
            return (false, f64::INFINITY);
        }
        for (sa, sb) in node_a.iter().zip(node_b) {
            let same_move = sa.node == sb.node
                && sa.phase == sb.phase
                && sa.candidate == sb.candidate
                && sa.verdict == sb.verdict
                && sa.parents_after == sb.parents_after;
            if !same_move {
                return (false, f64::INFINITY);
            }
            let gap = (sa.statistic - sb.statistic).abs();
            if !(gap <= max_gap) {
                max_gap = gap;
            }
        }
    }
    (true, max_gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::joint_from_bayesnet;
    use crate::model::{Dataset, Variables};
    use crate::search::exhaustive_parents;
    use crate::synth::{
        random_ci_triple, random_dag, random_dataset, random_joint, random_nested_pair,
        random_net,
    };
    use crate::testsupport::{chain_net, copy_dataset};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn coins_joint() -> JointTable {
        JointTable::new(Variables::binary(2), vec![0.5, 0.0, 0.0, 0.5]).unwrap()
    }

    #[test]
    fn reports_accumulate_and_flag_failures() {
        let mut report = IdentityReport::new("probe", 1e-10);
        report.record(5e-11);
        assert!(report.pass);
        report.record(2e-10);
        assert_eq!(report.instances, 2);
        assert_abs_diff_eq!(report.max_discrepancy, 2e-10);
        assert!(!report.pass);

        let mut total = IdentityReport::new("probe", 1e-10);
        total.record(1e-12);
        total.merge(&report);
        assert_eq!(total.instances, 3);
        assert_abs_diff_eq!(total.max_discrepancy, 2e-10);
        assert!(!total.pass);
    }

    #[test]
    fn kl_identity_on_correlated_coins() {
        let joint = coins_joint();
        let dag = OrderedDag::empty(NodeOrdering::identity(2));
        let report = verify_kl_identity(&joint, &dag, 1e-12).unwrap();
        assert_eq!(report.instances, 2);
        assert!(report.pass, "max discrepancy {}", report.max_discrepancy);
        assert_abs_diff_eq!(
            direct_node_term(&joint, &dag, 1).unwrap(),
            2.0f64.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn kl_identity_on_the_saturated_graph() {
        let joint = coins_joint();
        let dag = OrderedDag::saturated(NodeOrdering::identity(2));
        let report = verify_kl_identity(&joint, &dag, 1e-12).unwrap();
        assert_eq!(report.max_discrepancy, 0.0);
        assert!(report.pass);
    }

    #[test]
    fn kl_identity_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut total = IdentityReport::new("kl-term-vs-cross-entropy", 1e-10);
        for _ in 0..100 {
            let n = rng.random_range(2..=4);
            let cards: Vec<usize> = (0..n).map(|_| rng.random_range(2..=3)).collect();
            let joint = random_joint(&cards, &mut rng).unwrap();
            let dag = random_dag(&NodeOrdering::identity(n), 0.5, &mut rng).unwrap();
            let report = verify_kl_identity(&joint, &dag, 1e-10).unwrap();
            assert!(report.pass, "discrepancy {}", report.max_discrepancy);
            total.merge(&report);
        }
        assert!(total.pass);
        assert!(total.instances >= 200);
    }

    #[test]
    fn llr_identity_on_the_copy_dataset() {
        let ctx = EmpiricalContext::new(copy_dataset());
        let report = verify_llr_identity(&ctx, 1, &[], &[0], 1e-12).unwrap();
        assert!(report.pass, "discrepancy {}", report.max_discrepancy);
        assert_abs_diff_eq!(
            empirical_cce(&ctx, &[1], &[0], &[]).unwrap(),
            2.0f64.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn llr_identity_with_a_constant_added_parent() {
        let variables = Variables::from_cards(&[2, 2, 2]);
        let rows = vec![vec![0, 0, 0], vec![1, 1, 0], vec![0, 0, 0], vec![1, 1, 0]];
        let ctx = EmpiricalContext::new(Dataset::new(variables, rows).unwrap());
        let report = verify_llr_identity(&ctx, 1, &[], &[2], 1e-15).unwrap();
        assert_eq!(report.max_discrepancy, 0.0);
        assert!(report.pass);
    }

    #[test]
    fn llr_identity_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..100 {
            let n = rng.random_range(2..=5);
            let cards: Vec<usize> = (0..n).map(|_| rng.random_range(2..=3)).collect();
            let n_rows = rng.random_range(1..=500);
            let data = random_dataset(&cards, 0.5, n_rows, &mut rng).unwrap();
            let ctx = EmpiricalContext::new(data);
            let (i, pa_old, pa_new) = random_nested_pair(n, &mut rng);
            let report = verify_llr_identity(&ctx, i, &pa_old, &pa_new, 1e-10).unwrap();
            assert!(report.pass, "discrepancy {}", report.max_discrepancy);
        }
    }

    #[test]
    fn bayes_identity_on_the_copy_dataset() {
        let ctx = EmpiricalContext::new(copy_dataset());
        let prior = DirichletPrior::uniform(1.0).unwrap();
        let report = verify_bayes_identity(&ctx, 1, &[0], &[], &prior, 1e-12).unwrap();
        assert!(report.pass, "discrepancy {}", report.max_discrepancy);
        let value = bayes_independence_test(&ctx, 1, &[0], &[], &prior).unwrap();
        assert_abs_diff_eq!(value, (10.0f64 / 3.0).ln(), epsilon = 1e-12);
    }

    #[test]
    fn bayes_identity_on_empty_data() {
        let ctx = EmpiricalContext::new(Dataset::new(Variables::binary(2), vec![]).unwrap());
        let prior = DirichletPrior::uniform(1.0).unwrap();
        let report = verify_bayes_identity(&ctx, 1, &[0], &[], &prior, 1e-15).unwrap();
        assert_eq!(report.max_discrepancy, 0.0);
        assert!(report.pass);
    }

    #[test]
    fn bayes_identity_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let alphas = [0.5, 1.0, 2.0];
        for trial in 0..100 {
            let n = rng.random_range(2..=5);
            let cards: Vec<usize> = (0..n).map(|_| rng.random_range(2..=3)).collect();
            let n_rows = rng.random_range(0..=400);
            let data = random_dataset(&cards, 0.5, n_rows, &mut rng).unwrap();
            let ctx = EmpiricalContext::new(data);
            let (i, s, c) = random_ci_triple(n, &mut rng);
            let prior = DirichletPrior::uniform(alphas[trial % alphas.len()]).unwrap();
            let report = verify_bayes_identity(&ctx, i, &s, &c, &prior, 1e-10).unwrap();
            assert!(report.pass, "discrepancy {}", report.max_discrepancy);
        }
    }

    #[test]
    fn dual_search_on_the_copy_dataset() {
        let ctx = EmpiricalContext::new(copy_dataset());
        let rule = DecisionRule::epsilon(0.1).unwrap();
        let ordering = NodeOrdering::identity(2);
        let report = dual_search(DualInput::Empirical(&ctx), &ordering, &rule, 1e-10).unwrap();
        assert!(report.pass);
        assert!(report.structures_equal && report.steps_aligned);
        assert_eq!(report.ci_parents, vec![vec![], vec![0]]);
        assert_eq!(report.score_parents, vec![vec![], vec![0]]);
    }

    #[test]
    fn dual_search_recovers_the_exact_chain() {
        let net = chain_net();
        let joint = joint_from_bayesnet(&net).unwrap();
        let rule = DecisionRule::epsilon(1e-9).unwrap();
        let ordering = NodeOrdering::identity(3);
        let report = dual_search(DualInput::Exact(&joint), &ordering, &rule, 1e-10).unwrap();
        assert!(report.pass, "max step gap {}", report.max_step_discrepancy);
        assert_eq!(report.ci_parents, vec![vec![], vec![0], vec![1]]);
        let eval = ExactEvaluator::cross_entropy(&joint);
        for i in 0..3 {
            let minimal = exhaustive_parents(&eval, &ordering, i, &rule).unwrap();
            assert_eq!(report.ci_parents[i], minimal);
        }
    }

    #[test]
    fn dual_search_agrees_across_rules_on_sampled_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let prior = DirichletPrior::uniform(1.0).unwrap();
        let rules = [
            DecisionRule::epsilon(0.02).unwrap(),
            DecisionRule::chi_squared(0.05).unwrap(),
            DecisionRule::aic(),
            DecisionRule::bayes(prior, 0.0).unwrap(),
        ];
        for _ in 0..6 {
            let n = rng.random_range(2..=4);
            let cards: Vec<usize> = (0..n).map(|_| rng.random_range(2..=3)).collect();
            let n_rows = rng.random_range(120..=400);
            let data = random_dataset(&cards, 0.5, n_rows, &mut rng).unwrap();
            let ctx = EmpiricalContext::new(data);
            let ordering = NodeOrdering::identity(n);
            for rule in &rules {
                let report =
                    dual_search(DualInput::Empirical(&ctx), &ordering, rule, 1e-10).unwrap();
                assert!(
                    report.pass,
                    "rule {rule:?}: equal={} aligned={} gap={}",
                    report.structures_equal, report.steps_aligned, report.max_step_discrepancy
                );
            }
        }
    }

    #[test]
    fn dual_search_rejects_count_rules_on_exact_input() {
        let joint = coins_joint();
        let ordering = NodeOrdering::identity(2);
        let rule = DecisionRule::chi_squared(0.05).unwrap();
        let err = dual_search(DualInput::Exact(&joint), &ordering, &rule, 1e-10).unwrap_err();
        assert!(matches!(err, crate::error::Error::RuleInputMismatch { .. }));
    }

    #[test]
    fn minimal_total_divergence_matches_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let ordering = NodeOrdering::identity(4);
        let variables = Variables::binary(4);
        let rule = DecisionRule::epsilon(1e-9).unwrap();
        for _ in 0..25 {
            let dag = random_dag(&ordering, 0.5, &mut rng).unwrap();
            let net = random_net(&variables, &dag, &mut rng).unwrap();
            let joint = joint_from_bayesnet(&net).unwrap();

            let mut best: Option<(usize, Vec<Vec<usize>>)> = None;
            let mut best_count = 0usize;
            for code in 0..64usize {
                let masks = [0usize, code & 1, (code >> 1) & 3, (code >> 3) & 7];
                let parents: Vec<Vec<usize>> = masks
                    .iter()
                    .map(|m| (0..4).filter(|b| (m >> b) & 1 == 1).collect())
                    .collect();
                let candidate = OrderedDag::new(ordering.clone(), parents).unwrap();
                if kl_decomposed(&joint, &candidate).unwrap().total <= 1e-9 {
                    let edges = candidate.edge_count();
                    match &best {
                        Some((e, _)) if *e < edges => {}
                        Some((e, _)) if *e == edges => best_count += 1,
                        _ => {
                            best = Some((edges, candidate.parent_sets().to_vec()));
                            best_count = 1;
                        }
                    }
                }
            }
            let (_, enumerated) = best.expect("the generating dag itself is always feasible");
            assert_eq!(best_count, 1, "tied minimal structures");

            let eval = ExactEvaluator::cross_entropy(&joint);
            for i in 0..4 {
                let minimal = exhaustive_parents(&eval, &ordering, i, &rule).unwrap();
                assert_eq!(enumerated[i], minimal);
            }
        }
    }
}
