//! Greedy grow/thin parent selection under a fixed node ordering, driven by
//! an evaluator and a decision rule, plus an exhaustive reference search and
//! exact-distribution structure recovery.
//!
//! An evaluator answers dependence queries either from an exact joint table
//! or from data counts, and each input kind comes in two framings that
//! compute the same quantity along different routes: cross-entropy sums on
//! probability tables, or score differences (divergence drops, normalized
//! likelihood ratios, Bayes factors). The search logic never knows which
//! framing it is driving.

use itertools::Itertools;
use serde::Serialize;

use crate::empirical::{empirical_cce, log_likelihood_ratio, EmpiricalContext};
use crate::error::{Error, Result};
use crate::exact::{
    check_disjoint, clamp_entropy, conditional_cross_entropy, joint_from_bayesnet, kl_divergence,
    project_to_dag, JointTable,
};
use crate::model::{normalized_scope, NodeOrdering, OrderedDag, Variables};
use crate::scoring::{
    bayes_independence_test, evaluate_rule, log_bayes_factor, DecisionRule, DirichletPrior,
};

/// Cap on predecessor-set size for the exhaustive subset search.
pub const MAX_EXHAUSTIVE_PREDECESSORS: usize = 12;

/// Which input and framing an evaluator computes its statistics from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EvaluatorKind {
    ExactCrossEntropy,
    ExactScore,
    EmpiricalCrossEntropy,
    EmpiricalScore,
}

/// Source of the dependence statistics consumed by the search.
pub trait NodeEvaluator: Sync {
    fn variables(&self) -> &Variables;

    /// Number of observations, or `None` for exact-distribution inputs.
    fn sample_size(&self) -> Option<u64>;

    /// Dependence statistic between `i` and `s` given `c`, on the
    /// cross-entropy scale (nats).
    fn statistic(&self, i: usize, s: &[usize], c: &[usize]) -> Result<f64>;

    /// Log Bayes factor for the dependence of `i` on `s` given `c`.
    fn log_bayes(
        &self,
        i: usize,
        s: &[usize],
        c: &[usize],
        prior: &DirichletPrior,
    ) -> Result<f64>;

    fn kind(&self) -> EvaluatorKind;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Framing {
    CrossEntropy,
    Score,
}

/// Evaluator over an exactly known joint distribution.
pub struct ExactEvaluator<'a> {
    joint: &'a JointTable,
    framing: Framing,
}

impl<'a> ExactEvaluator<'a> {
    /// Statistics computed as conditional cross entropies.
    pub fn cross_entropy(joint: &'a JointTable) -> Self {
        ExactEvaluator {
            joint,
            framing: Framing::CrossEntropy,
        }
    }

    /// Statistics computed as divergence drops between projected models.
    pub fn score_based(joint: &'a JointTable) -> Self {
        ExactEvaluator {
            joint,
            framing: Framing::Score,
        }
    }
}

/// How much closer (in KL) the best model that factorizes over a dag gets
/// to `joint` when node `i`'s parents grow from `c` to `c` plus `s`, with
/// every other node saturated so only node `i`'s term differs.
fn divergence_drop(joint: &JointTable, i: usize, s: &[usize], c: &[usize]) -> Result<f64> {
    check_disjoint(&[("X", &[i][..]), ("S", s), ("C", c)])?;
    let n = joint.variables().len();
    let mut order: Vec<usize> = (0..n).filter(|&v| v != i).collect();
    order.push(i);
    let mut saturated: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (pos, &v) in order.iter().enumerate() {
        saturated[v] = order[..pos].to_vec();
    }
    let mut small = saturated.clone();
    small[i] = c.to_vec();
    let mut large = saturated;
    large[i] = c.iter().chain(s).copied().collect();
    let ordering = NodeOrdering::new(order)?;
    let g_small = OrderedDag::new(ordering.clone(), small)?;
    let g_large = OrderedDag::new(ordering, large)?;
    let d_small = kl_divergence(joint, &joint_from_bayesnet(&project_to_dag(joint, &g_small)?)?);
    let d_large = kl_divergence(joint, &joint_from_bayesnet(&project_to_dag(joint, &g_large)?)?);
    Ok(clamp_entropy(d_small - d_large, "divergence drop"))
}

impl NodeEvaluator for ExactEvaluator<'_> {
    fn variables(&self) -> &Variables {
        self.joint.variables()
    }

    fn sample_size(&self) -> Option<u64> {
        None
    }

    fn statistic(&self, i: usize, s: &[usize], c: &[usize]) -> Result<f64> {
        match self.framing {
            Framing::CrossEntropy => conditional_cross_entropy(self.joint, &[i], s, c),
            Framing::Score => divergence_drop(self.joint, i, s, c),
        }
    }

    fn log_bayes(
        &self,
        _i: usize,
        _s: &[usize],
        _c: &[usize],
        _prior: &DirichletPrior,
    ) -> Result<f64> {
        Err(Error::RuleInputMismatch {
            detail: "Bayes factors need counts, not an exact distribution".into(),
        })
    }

    fn kind(&self) -> EvaluatorKind {
        match self.framing {
            Framing::CrossEntropy => EvaluatorKind::ExactCrossEntropy,
            Framing::Score => EvaluatorKind::ExactScore,
        }
    }
}

/// Evaluator over a dataset.
pub struct EmpiricalEvaluator<'a> {
    ctx: &'a EmpiricalContext,
    framing: Framing,
}

impl<'a> EmpiricalEvaluator<'a> {
    /// Statistics computed as empirical conditional cross entropies.
    pub fn cross_entropy(ctx: &'a EmpiricalContext) -> Self {
        EmpiricalEvaluator {
            ctx,
            framing: Framing::CrossEntropy,
        }
    }

    /// Statistics computed as normalized log-likelihood ratios and Bayes
    /// factors of nested fits.
    pub fn score_based(ctx: &'a EmpiricalContext) -> Self {
        EmpiricalEvaluator {
            ctx,
            framing: Framing::Score,
        }
    }
}

impl NodeEvaluator for EmpiricalEvaluator<'_> {
    fn variables(&self) -> &Variables {
        self.ctx.variables()
    }

    fn sample_size(&self) -> Option<u64> {
        Some(self.ctx.n_rows())
    }

    fn statistic(&self, i: usize, s: &[usize], c: &[usize]) -> Result<f64> {
        match self.framing {
            Framing::CrossEntropy => empirical_cce(self.ctx, &[i], s, c),
            Framing::Score => {
                check_disjoint(&[("X", &[i][..]), ("S", s), ("C", c)])?;
                if self.ctx.n_rows() == 0 {
                    return Ok(0.0);
                }
                let mut union: Vec<usize> = c.iter().chain(s).copied().collect();
                union.sort_unstable();
                let llr = log_likelihood_ratio(self.ctx, i, c, &union)?;
                Ok(llr / self.ctx.n_rows() as f64)
            }
        }
    }

    fn log_bayes(
        &self,
        i: usize,
        s: &[usize],
        c: &[usize],
        prior: &DirichletPrior,
    ) -> Result<f64> {
        match self.framing {
            Framing::CrossEntropy => bayes_independence_test(self.ctx, i, s, c, prior),
            Framing::Score => {
                check_disjoint(&[("X", &[i][..]), ("S", s), ("C", c)])?;
                let mut union: Vec<usize> = c.iter().chain(s).copied().collect();
                union.sort_unstable();
                log_bayes_factor(self.ctx, i, c, &union, prior)
            }
        }
    }

    fn kind(&self) -> EvaluatorKind {
        match self.framing {
            Framing::CrossEntropy => EvaluatorKind::EmpiricalCrossEntropy,
            Framing::Score => EvaluatorKind::EmpiricalScore,
        }
    }
}

/// Which half of the search a step belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Phase {
    Grow,
    Thin,
}

/// One structure move: a parent set grown by `candidate` or thinned by its
/// single member.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchStep {
    pub node: usize,
    pub phase: Phase,
    /// Variables added (grow) or the variable removed (thin).
    pub candidate: Vec<usize>,
    /// Selection statistic: cross-entropy scale, or log Bayes factor under
    /// the Bayes rule.
    pub statistic: f64,
    /// The independence verdict that triggered the move: false for grow
    /// (dependence persisted), true for thin (the parent proved removable).
    pub verdict: bool,
    pub parents_after: Vec<usize>,
}

/// Complete record of a structure search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchTrace {
    pub rule: DecisionRule,
    pub evaluator: EvaluatorKind,
    /// Steps per node, in execution order.
    pub steps: Vec<Vec<SearchStep>>,
}

/// Tunables for the grow phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Largest candidate subset scored per grow move (1 to 3).
    pub max_candidate_size: usize,
    /// Stop growing when the selected candidate itself tests independent,
    /// instead of adding it while the full-remainder guard still rejects.
    pub stop_early: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_candidate_size: 1,
            stop_early: false,
        }
    }
}

fn selection_statistic(
    rule: &DecisionRule,
    eval: &dyn NodeEvaluator,
    i: usize,
    s: &[usize],
    c: &[usize],
) -> Result<f64> {
    match rule {
        DecisionRule::BayesFactor { prior, .. } => eval.log_bayes(i, s, c, prior),
        _ => eval.statistic(i, s, c),
    }
}

/// Grow phase for one node: while the remainder of its predecessors is not
/// independent of it given the current parents, move the best-scoring
/// candidate subset into the parent set. Ties keep the earliest candidate
/// in (size, lexicographic) order.
pub fn grow_parents(
    eval: &dyn NodeEvaluator,
    ordering: &NodeOrdering,
    i: usize,
    rule: &DecisionRule,
) -> Result<(Vec<usize>, Vec<SearchStep>)> {
    grow_parents_with(eval, ordering, i, rule, &SearchConfig::default())
}

pub fn grow_parents_with(
    eval: &dyn NodeEvaluator,
    ordering: &NodeOrdering,
    i: usize,
    rule: &DecisionRule,
    config: &SearchConfig,
) -> Result<(Vec<usize>, Vec<SearchStep>)> {
    if !(1..=3).contains(&config.max_candidate_size) {
        return Err(Error::invalid(format!(
            "candidate subset size {} is outside 1..=3",
            config.max_candidate_size
        )));
    }
    check_search_node(eval, ordering, i)?;
    let pred = ordering.predecessors(i);
    let mut pa: Vec<usize> = Vec::new();
    let mut steps = Vec::new();
    loop {
        let rem: Vec<usize> = pred.iter().copied().filter(|v| !pa.contains(v)).collect();
        if rem.is_empty() {
            break;
        }
        if evaluate_rule(rule, eval, i, &rem, &pa)?.independent {
            break;
        }
        let mut best: Option<(Vec<usize>, f64)> = None;
        for size in 1..=config.max_candidate_size.min(rem.len()) {
            for combo in rem.iter().copied().combinations(size) {
                let stat = selection_statistic(rule, eval, i, &combo, &pa)?;
                if best.as_ref().map_or(true, |(_, b)| stat > *b) {
                    best = Some((combo, stat));
                }
            }
        }
        let (candidate, statistic) = best.expect("remainder was nonempty");
        if config.stop_early && evaluate_rule(rule, eval, i, &candidate, &pa)?.independent {
            break;
        }
        pa.extend(&candidate);
        pa.sort_unstable();
        steps.push(SearchStep {
            node: i,
            phase: Phase::Grow,
            candidate,
            statistic,
            verdict: false,
            parents_after: pa.clone(),
        });
    }
    Ok((pa, steps))
}

/// Thin phase for one node: repeatedly scan the parents in ascending order
/// and drop the first one that tests independent of the node given the
/// others, until a full scan removes nothing.
pub fn thin_parents(
    eval: &dyn NodeEvaluator,
    ordering: &NodeOrdering,
    i: usize,
    parents: &[usize],
    rule: &DecisionRule,
) -> Result<(Vec<usize>, Vec<SearchStep>)> {
    check_search_node(eval, ordering, i)?;
    let mut pa = normalized_scope(eval.variables(), parents)?;
    for &p in &pa {
        if ordering.position(p) >= ordering.position(i) {
            return Err(Error::OrderViolation { child: i, parent: p });
        }
    }
    let mut steps = Vec::new();
    'scan: loop {
        for idx in 0..pa.len() {
            let y = pa[idx];
            let rest: Vec<usize> = pa.iter().copied().filter(|&v| v != y).collect();
            if evaluate_rule(rule, eval, i, &[y], &rest)?.independent {
                let statistic = selection_statistic(rule, eval, i, &[y], &rest)?;
                pa.remove(idx);
                steps.push(SearchStep {
                    node: i,
                    phase: Phase::Thin,
                    candidate: vec![y],
                    statistic,
                    verdict: true,
                    parents_after: pa.clone(),
                });
                continue 'scan;
            }
        }
        break;
    }
    Ok((pa, steps))
}

fn check_search_node(
    eval: &dyn NodeEvaluator,
    ordering: &NodeOrdering,
    i: usize,
) -> Result<()> {
    let n = eval.variables().len();
    if ordering.len() != n {
        return Err(Error::invalid(format!(
            "ordering covers {} nodes, evaluator has {n} variables",
            ordering.len()
        )));
    }
    eval.variables().check_scope(&[i])
}

/// Runs grow then thin for every node and assembles the learned dag with
/// the full step trace.
pub fn learn_structure(
    eval: &dyn NodeEvaluator,
    ordering: &NodeOrdering,
    rule: &DecisionRule,
) -> Result<(OrderedDag, SearchTrace)> {
    learn_structure_with(eval, ordering, rule, &SearchConfig::default())
}

pub fn learn_structure_with(
    eval: &dyn NodeEvaluator,
    ordering: &NodeOrdering,
    rule: &DecisionRule,
    config: &SearchConfig,
) -> Result<(OrderedDag, SearchTrace)> {
    let n = eval.variables().len();
    if ordering.len() != n {
        return Err(Error::invalid(format!(
            "ordering covers {} nodes, evaluator has {n} variables",
            ordering.len()
        )));
    }
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut steps: Vec<Vec<SearchStep>> = vec![Vec::new(); n];
    for &i in ordering.order() {
        let (grown, mut node_steps) = grow_parents_with(eval, ordering, i, rule, config)?;
        let (thinned, thin_steps) = thin_parents(eval, ordering, i, &grown, rule)?;
        node_steps.extend(thin_steps);
        parents[i] = thinned;
        steps[i] = node_steps;
    }
    let dag = OrderedDag::new(ordering.clone(), parents)?;
    Ok((
        dag,
        SearchTrace {
            rule: *rule,
            evaluator: eval.kind(),
            steps,
        },
    ))
}

/// Smallest parent set (by cardinality, then lexicographic order) whose
/// complement among the predecessors tests independent. Falls back to the
/// full predecessor set when nothing smaller works.
pub fn exhaustive_parents(
    eval: &dyn NodeEvaluator,
    ordering: &NodeOrdering,
    i: usize,
    rule: &DecisionRule,
) -> Result<Vec<usize>> {
    check_search_node(eval, ordering, i)?;
    let pred = ordering.predecessors(i);
    if pred.len() > MAX_EXHAUSTIVE_PREDECESSORS {
        return Err(Error::TooManyPredecessors {
            node: i,
            count: pred.len(),
            limit: MAX_EXHAUSTIVE_PREDECESSORS,
        });
    }
    for size in 0..=pred.len() {
        for combo in pred.iter().copied().combinations(size) {
            let rem: Vec<usize> = pred.iter().copied().filter(|v| !combo.contains(v)).collect();
            if evaluate_rule(rule, eval, i, &rem, &combo)?.independent {
                return Ok(combo);
            }
        }
    }
    Ok(pred)
}

/// Learns the minimal structure of an exactly known distribution with the
/// threshold rule. The projection of the result onto the returned dag
/// diverges from the input by at most the number of nodes times `epsilon`.
pub fn recover_from_distribution(
    joint: &JointTable,
    ordering: &NodeOrdering,
    epsilon: f64,
) -> Result<OrderedDag> {
    let rule = DecisionRule::epsilon(epsilon)?;
    let eval = ExactEvaluator::cross_entropy(joint);
    let (dag, _) = learn_structure(&eval, ordering, &rule)?;
    Ok(dag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ancestral_sample;
    use crate::model::{BayesNet, Cpt, Variables};
    use crate::testsupport::{chain_net, copy_dataset};
    use approx::assert_abs_diff_eq;

    fn eps(e: f64) -> DecisionRule {
        DecisionRule::epsilon(e).unwrap()
    }

    /// Chain with distinct singleton statistics at node 2.
    fn steep_chain_joint() -> JointTable {
        let vars = Variables::binary(3);
        let dag = OrderedDag::new(NodeOrdering::identity(3), vec![vec![], vec![0], vec![1]])
            .unwrap();
        let cpts = vec![
            Cpt::new(&vars, 0, vec![], vec![vec![0.4, 0.6]], vec![true]).unwrap(),
            Cpt::new(
                &vars,
                1,
                vec![0],
                vec![vec![0.8, 0.2], vec![0.1, 0.9]],
                vec![true, true],
            )
            .unwrap(),
            Cpt::new(
                &vars,
                2,
                vec![1],
                vec![vec![0.7, 0.3], vec![0.2, 0.8]],
                vec![true, true],
            )
            .unwrap(),
        ];
        let net = BayesNet::new(vars, dag, cpts).unwrap();
        joint_from_bayesnet(&net).unwrap()
    }

    /// Fair independent inputs with an exclusive-or third variable; both
    /// pairwise statistics at node 2 vanish while the joint one does not.
    fn xor_joint() -> JointTable {
        JointTable::new(
            Variables::binary(3),
            vec![0.25, 0.0, 0.0, 0.25, 0.0, 0.25, 0.25, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn grow_adds_the_copy_parent() {
        let ctx = EmpiricalContext::new(copy_dataset());
        let eval = EmpiricalEvaluator::cross_entropy(&ctx);
        let (pa, steps) =
            grow_parents(&eval, &NodeOrdering::identity(2), 1, &eps(0.1)).unwrap();
        assert_eq!(pa, vec![0]);
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].candidate, vec![0]);
        assert!(!steps[0].verdict);
        assert_abs_diff_eq!(steps[0].statistic, 2.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn grow_skips_independent_targets() {
        let joint = JointTable::new(Variables::binary(2), vec![0.25; 4]).unwrap();
        let eval = ExactEvaluator::cross_entropy(&joint);
        let (pa, steps) =
            grow_parents(&eval, &NodeOrdering::identity(2), 1, &eps(1e-9)).unwrap();
        assert!(pa.is_empty());
        assert!(steps.is_empty());
    }

    #[test]
    fn grow_picks_the_stronger_singleton_first() {
        let joint = steep_chain_joint();
        let near = conditional_cross_entropy(&joint, &[2], &[1], &[]).unwrap();
        let far = conditional_cross_entropy(&joint, &[2], &[0], &[]).unwrap();
        assert!(near > far);
        let eval = ExactEvaluator::cross_entropy(&joint);
        let (pa, steps) =
            grow_parents(&eval, &NodeOrdering::identity(3), 2, &eps(1e-9)).unwrap();
        assert_eq!(pa, vec![1]);
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].candidate, vec![1]);
        assert_abs_diff_eq!(steps[0].statistic, near, epsilon = 1e-15);
    }

    #[test]
    fn thin_drops_the_screened_off_parent() {
        let joint = steep_chain_joint();
        let eval = ExactEvaluator::cross_entropy(&joint);
        let (pa, steps) =
            thin_parents(&eval, &NodeOrdering::identity(3), 2, &[0, 1], &eps(1e-9)).unwrap();
        assert_eq!(pa, vec![1]);
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].candidate, vec![0]);
        assert!(steps[0].verdict);
    }

    #[test]
    fn thin_keeps_a_real_parent() {
        let ctx = EmpiricalContext::new(copy_dataset());
        let eval = EmpiricalEvaluator::cross_entropy(&ctx);
        let (pa, steps) =
            thin_parents(&eval, &NodeOrdering::identity(2), 1, &[0], &eps(0.1)).unwrap();
        assert_eq!(pa, vec![0]);
        assert!(steps.is_empty());
        let (pa, steps) =
            thin_parents(&eval, &NodeOrdering::identity(2), 1, &[], &eps(0.1)).unwrap();
        assert!(pa.is_empty() && steps.is_empty());
    }

    #[test]
    fn learn_recovers_the_chain_exactly() {
        let joint = joint_from_bayesnet(&chain_net()).unwrap();
        let eval = ExactEvaluator::cross_entropy(&joint);
        let (dag, trace) =
            learn_structure(&eval, &NodeOrdering::identity(3), &eps(1e-9)).unwrap();
        assert_eq!(dag.parent_sets(), &[vec![], vec![0], vec![1]]);
        assert_eq!(trace.evaluator, EvaluatorKind::ExactCrossEntropy);
        for i in 0..3 {
            if let Some(last) = trace.steps[i].last() {
                assert_eq!(&last.parents_after, dag.parents(i));
            } else {
                assert!(dag.parents(i).is_empty());
            }
        }
    }

    #[test]
    fn learn_handles_a_single_variable() {
        let joint = JointTable::new(Variables::binary(1), vec![0.3, 0.7]).unwrap();
        let eval = ExactEvaluator::cross_entropy(&joint);
        let (dag, trace) =
            learn_structure(&eval, &NodeOrdering::identity(1), &eps(1e-9)).unwrap();
        assert_eq!(dag.edge_count(), 0);
        assert!(trace.steps[0].is_empty());
    }

    #[test]
    fn learn_is_deterministic() {
        let joint = steep_chain_joint();
        let eval = ExactEvaluator::cross_entropy(&joint);
        let run1 = learn_structure(&eval, &NodeOrdering::identity(3), &eps(1e-9)).unwrap();
        let run2 = learn_structure(&eval, &NodeOrdering::identity(3), &eps(1e-9)).unwrap();
        assert_eq!(run1.0.parent_sets(), run2.0.parent_sets());
        assert_eq!(run1.1, run2.1);
    }

    #[test]
    fn score_framing_learns_the_same_chain() {
        let joint = steep_chain_joint();
        let ci = ExactEvaluator::cross_entropy(&joint);
        let sc = ExactEvaluator::score_based(&joint);
        let rule = eps(1e-9);
        let (dag_ci, _) = learn_structure(&ci, &NodeOrdering::identity(3), &rule).unwrap();
        let (dag_sc, _) = learn_structure(&sc, &NodeOrdering::identity(3), &rule).unwrap();
        assert_eq!(dag_ci.parent_sets(), dag_sc.parent_sets());
    }

    #[test]
    fn exhaustive_finds_minimal_separators() {
        let joint = steep_chain_joint();
        let eval = ExactEvaluator::cross_entropy(&joint);
        let ordering = NodeOrdering::identity(3);
        assert_eq!(
            exhaustive_parents(&eval, &ordering, 2, &eps(1e-9)).unwrap(),
            vec![1]
        );
        assert_eq!(
            exhaustive_parents(&eval, &ordering, 1, &eps(1e-9)).unwrap(),
            vec![0]
        );
        assert!(exhaustive_parents(&eval, &ordering, 0, &eps(1e-9))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn exhaustive_matches_greedy_on_sampled_data() {
        let data = ancestral_sample(&chain_net(), 600, 77).unwrap();
        let ctx = EmpiricalContext::new(data);
        let eval = EmpiricalEvaluator::cross_entropy(&ctx);
        let ordering = NodeOrdering::identity(3);
        let rule = DecisionRule::chi_squared(0.05).unwrap();
        let (dag, _) = learn_structure(&eval, &ordering, &rule).unwrap();
        for i in 0..3 {
            let direct = exhaustive_parents(&eval, &ordering, i, &rule).unwrap();
            assert_eq!(dag.parents(i), &direct, "node {i}");
        }
    }

    #[test]
    fn exhaustive_guards_predecessor_count() {
        let n = 14;
        let cells = 1usize << n;
        let joint = JointTable::new(
            Variables::binary(n),
            vec![1.0 / cells as f64; cells],
        )
        .unwrap();
        let eval = ExactEvaluator::cross_entropy(&joint);
        let err = exhaustive_parents(&eval, &NodeOrdering::identity(n), 13, &eps(1e-9));
        assert!(matches!(
            err,
            Err(Error::TooManyPredecessors { node: 13, count: 13, limit: 12 })
        ));
    }

    #[test]
    fn xor_target_needs_both_parents() {
        let joint = xor_joint();
        let eval = ExactEvaluator::cross_entropy(&joint);
        let ordering = NodeOrdering::identity(3);
        let (pa, steps) = grow_parents(&eval, &ordering, 2, &eps(0.01)).unwrap();
        assert_eq!(pa, vec![0, 1]);
        // Both singles score zero, so the tie keeps node 0 first.
        assert_eq!(steps[0].candidate, vec![0]);
        let (kept, _) = thin_parents(&eval, &ordering, 2, &pa, &eps(0.01)).unwrap();
        assert_eq!(kept, vec![0, 1]);
    }

    #[test]
    fn stop_early_leaves_the_xor_target_alone() {
        let joint = xor_joint();
        let eval = ExactEvaluator::cross_entropy(&joint);
        let config = SearchConfig {
            stop_early: true,
            ..SearchConfig::default()
        };
        let (pa, steps) =
            grow_parents_with(&eval, &NodeOrdering::identity(3), 2, &eps(0.01), &config)
                .unwrap();
        assert!(pa.is_empty());
        assert!(steps.is_empty());
    }

    #[test]
    fn paired_candidates_capture_the_xor_at_once() {
        let joint = xor_joint();
        let eval = ExactEvaluator::cross_entropy(&joint);
        let config = SearchConfig {
            max_candidate_size: 2,
            ..SearchConfig::default()
        };
        let (pa, steps) =
            grow_parents_with(&eval, &NodeOrdering::identity(3), 2, &eps(0.01), &config)
                .unwrap();
        assert_eq!(pa, vec![0, 1]);
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].candidate, vec![0, 1]);
        assert_abs_diff_eq!(steps[0].statistic, 2.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn recover_matches_the_generating_graphs() {
        let chain = joint_from_bayesnet(&chain_net()).unwrap();
        let dag = recover_from_distribution(&chain, &NodeOrdering::identity(3), 1e-9).unwrap();
        assert_eq!(dag.parent_sets(), &[vec![], vec![0], vec![1]]);

        let product = JointTable::new(Variables::binary(2), vec![0.25; 4]).unwrap();
        let dag = recover_from_distribution(&product, &NodeOrdering::identity(2), 1e-9).unwrap();
        assert_eq!(dag.edge_count(), 0);

        let coupled = JointTable::new(Variables::binary(2), vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let dag = recover_from_distribution(&coupled, &NodeOrdering::identity(2), 1e-9).unwrap();
        assert_eq!(dag.parents(1), &[0]);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let joint = xor_joint();
        let eval = ExactEvaluator::cross_entropy(&joint);
        let config = SearchConfig {
            max_candidate_size: 0,
            ..SearchConfig::default()
        };
        assert!(grow_parents_with(
            &eval,
            &NodeOrdering::identity(3),
            2,
            &eps(0.01),
            &config
        )
        .is_err());
    }
}
