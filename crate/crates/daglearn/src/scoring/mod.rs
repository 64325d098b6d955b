//! Decision-grade scores and tests built on the empirical quantities:
//! deviance differences, chi-squared tails, AIC, Dirichlet marginal
//! likelihoods in the Cooper-Herskovits closed form, local Bayes factors,
//! and the rule evaluator shared by every search configuration.

mod special;

pub use special::{chi2_sf, log_gamma};
pub(crate) use special::ln_gamma_pos;

use serde::Serialize;

use crate::empirical::{dof_delta, log_likelihood, log_likelihood_ratio, EmpiricalContext};
use crate::error::{Error, Result};
use crate::exact::{check_disjoint, nested_difference};
use crate::model::{
    normalized_scope, num_free_parameters, strides_of, Cpt, OrderedDag, SubIndexer,
};
use crate::search::NodeEvaluator;

/// Dirichlet prior over each CPT row, either a fixed pseudo-count per cell
/// or a total equivalent sample size split evenly over a family's cells.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum DirichletPrior {
    Uniform { alpha: f64 },
    EquivalentSampleSize { total: f64 },
}

impl DirichletPrior {
    pub fn uniform(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::invalid(format!(
                "Dirichlet pseudo-count must be positive and finite, got {alpha}"
            )));
        }
        Ok(DirichletPrior::Uniform { alpha })
    }

    pub fn equivalent_sample_size(total: f64) -> Result<Self> {
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::invalid(format!(
                "equivalent sample size must be positive and finite, got {total}"
            )));
        }
        Ok(DirichletPrior::EquivalentSampleSize { total })
    }

    /// Pseudo-count for one cell of a table with `cells` cells in total.
    pub fn cell_alpha(&self, cells: usize) -> Result<f64> {
        if cells == 0 {
            return Err(Error::invalid("a prior needs at least one cell"));
        }
        match *self {
            DirichletPrior::Uniform { alpha } => {
                if !(alpha > 0.0) || !alpha.is_finite() {
                    return Err(Error::invalid(format!("invalid pseudo-count {alpha}")));
                }
                Ok(alpha)
            }
            DirichletPrior::EquivalentSampleSize { total } => {
                if !(total > 0.0) || !total.is_finite() {
                    return Err(Error::invalid(format!("invalid sample size {total}")));
                }
                Ok(total / cells as f64)
            }
        }
    }
}

impl Default for DirichletPrior {
    fn default() -> Self {
        DirichletPrior::Uniform { alpha: 1.0 }
    }
}

/// How an independence question is decided: a fixed threshold on the
/// cross-entropy statistic, a chi-squared significance test, the AIC
/// comparison, or a Bayes-factor threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum DecisionRule {
    EpsilonThreshold { epsilon: f64 },
    ChiSquared { alpha_level: f64 },
    Aic,
    BayesFactor { prior: DirichletPrior, log_threshold: f64 },
}

impl DecisionRule {
    pub fn epsilon(epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::invalid(format!(
                "threshold must be nonnegative and finite, got {epsilon}"
            )));
        }
        Ok(DecisionRule::EpsilonThreshold { epsilon })
    }

    pub fn chi_squared(alpha_level: f64) -> Result<Self> {
        if !(alpha_level > 0.0 && alpha_level < 1.0) {
            return Err(Error::invalid(format!(
                "significance level must lie in (0,1), got {alpha_level}"
            )));
        }
        Ok(DecisionRule::ChiSquared { alpha_level })
    }

    pub fn aic() -> Self {
        DecisionRule::Aic
    }

    /// Bayes-factor rule; dependence is accepted when the log Bayes factor
    /// exceeds `log_threshold` (0 keeps whichever model is more probable).
    pub fn bayes(prior: DirichletPrior, log_threshold: f64) -> Result<Self> {
        if !log_threshold.is_finite() {
            return Err(Error::invalid(format!(
                "log threshold must be finite, got {log_threshold}"
            )));
        }
        Ok(DecisionRule::BayesFactor { prior, log_threshold })
    }
}

/// Result of one decided independence question.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TestOutcome {
    /// The decided statistic, on the rule's own scale.
    pub statistic: f64,
    /// The cutoff the statistic was held against.
    pub threshold_used: f64,
    /// Degrees of freedom, 0 when the rule has none.
    pub dof: u64,
    /// True when the rule accepts the independence hypothesis.
    pub independent: bool,
}

/// Floor applied to epsilon thresholds on exact-distribution inputs, since
/// cross entropies that vanish analytically still carry float noise.
pub const EXACT_EPSILON_FLOOR: f64 = 1e-12;

/// Deviance difference between the nested fits: twice the log-likelihood
/// ratio, with the degrees of freedom of the comparison.
pub fn deviance_difference(
    ctx: &EmpiricalContext,
    i: usize,
    pa_old: &[usize],
    pa_new: &[usize],
) -> Result<(f64, u64)> {
    let statistic = 2.0 * log_likelihood_ratio(ctx, i, pa_old, pa_new)?;
    let dof = dof_delta(ctx.variables(), i, pa_old, pa_new)?;
    Ok((statistic, dof))
}

/// Akaike information criterion of the fitted dag; lower is better.
pub fn aic_score(ctx: &EmpiricalContext, dag: &OrderedDag) -> Result<f64> {
    let ll = log_likelihood(ctx, dag)?;
    let params = num_free_parameters(ctx.variables(), dag) as f64;
    Ok(-2.0 * ll + 2.0 * params)
}

/// Log marginal likelihood of one node family under a Dirichlet prior, in
/// the Cooper-Herskovits closed form: a sum of log-gamma terms per parent
/// configuration. Parent configurations with no observations contribute 0.
pub fn ch_family_log_marginal(
    ctx: &EmpiricalContext,
    child: usize,
    parents: &[usize],
    prior: &DirichletPrior,
) -> Result<f64> {
    let vars = ctx.variables();
    let parents = normalized_scope(vars, parents)?;
    if parents.contains(&child) {
        return Err(Error::invalid(format!(
            "node {child} cannot be its own parent"
        )));
    }
    vars.check_scope(&[child])?;
    let card = vars.cardinality(child);
    let mut family = parents.clone();
    family.push(child);
    family.sort_unstable();
    let fam = ctx.marginal_counts(&family)?;
    let pa = ctx.marginal_counts(&parents)?;
    let alpha = prior.cell_alpha(pa.len() * card)?;
    let alpha_row = alpha * card as f64;
    let child_pos = family.binary_search(&child).unwrap();
    let strides = strides_of(fam.cards());
    let to_row = SubIndexer::new(&family, fam.cards(), &parents);
    let mut row_counts = vec![vec![0u64; card]; pa.len()];
    for (idx, &n) in fam.counts().iter().enumerate() {
        let state = (idx / strides[child_pos]) % card;
        row_counts[to_row.project(idx)][state] = n;
    }
    let mut total = 0.0f64;
    for (j, counts) in row_counts.iter().enumerate() {
        let n_j = pa.counts()[j];
        if n_j == 0 {
            continue;
        }
        let mut term = ln_gamma_pos(alpha_row) - ln_gamma_pos(alpha_row + n_j as f64);
        for &n in counts {
            if n > 0 {
                term += ln_gamma_pos(alpha + n as f64) - ln_gamma_pos(alpha);
            }
        }
        total += term;
    }
    Ok(total)
}

/// Log marginal likelihood of the whole dag: the sum of the family terms
/// in ascending node order.
pub fn log_marginal_likelihood(
    ctx: &EmpiricalContext,
    dag: &OrderedDag,
    prior: &DirichletPrior,
) -> Result<f64> {
    if dag.n_nodes() != ctx.variables().len() {
        return Err(Error::invalid(format!(
            "DAG has {} nodes, dataset has {} variables",
            dag.n_nodes(),
            ctx.variables().len()
        )));
    }
    let mut total = 0.0f64;
    for i in 0..dag.n_nodes() {
        total += ch_family_log_marginal(ctx, i, dag.parents(i), prior)?;
    }
    Ok(total)
}

/// Log Bayes factor at node `i` for growing its parents from `pa_old` to
/// `pa_new`, under a uniform prior over the two structures. Positive favors
/// the larger parent set.
pub fn log_bayes_factor(
    ctx: &EmpiricalContext,
    i: usize,
    pa_old: &[usize],
    pa_new: &[usize],
    prior: &DirichletPrior,
) -> Result<f64> {
    nested_difference(i, pa_old, pa_new)?;
    let new = ch_family_log_marginal(ctx, i, pa_new, prior)?;
    let old = ch_family_log_marginal(ctx, i, pa_old, prior)?;
    Ok(new - old)
}

/// Dirichlet-multinomial log marginal likelihood of one categorical block
/// with pseudo-count `alpha` per cell.
fn polya_log_marginal(counts: &[u64], alpha: f64) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let alpha_all = alpha * counts.len() as f64;
    let mut sum = ln_gamma_pos(alpha_all) - ln_gamma_pos(alpha_all + total as f64);
    for &n in counts {
        if n > 0 {
            sum += ln_gamma_pos(alpha + n as f64) - ln_gamma_pos(alpha);
        }
    }
    sum
}

/// Log posterior odds that `i` depends on `S` given `C`, built as two full
/// model marginal likelihoods: each model pairs the same marginal block
/// over S∪C with a conditional block for `i`, keyed by S∪C under the
/// dependence hypothesis and by C alone under independence. The shared
/// block cancels in the difference.
pub fn bayes_independence_test(
    ctx: &EmpiricalContext,
    i: usize,
    s: &[usize],
    c: &[usize],
    prior: &DirichletPrior,
) -> Result<f64> {
    check_disjoint(&[("X", &[i][..]), ("S", s), ("C", c)])?;
    let vars = ctx.variables();
    vars.check_scope(&[i])?;
    let card = vars.cardinality(i);
    let mut sc: Vec<usize> = s.iter().chain(c).copied().collect();
    sc = normalized_scope(vars, &sc)?;
    let cs = normalized_scope(vars, c)?;
    let mut u = sc.clone();
    u.push(i);
    u.sort_unstable();
    let t_u = ctx.marginal_counts(&u)?;
    let t_sc = ctx.marginal_counts(&sc)?;
    let t_c = ctx.marginal_counts(&cs)?;
    let phi = polya_log_marginal(t_sc.counts(), prior.cell_alpha(t_sc.len())?);
    let strides = strides_of(t_u.cards());
    let child_pos = u.binary_search(&i).unwrap();
    let to_sc = SubIndexer::new(&u, t_u.cards(), &sc);
    let to_c = SubIndexer::new(&u, t_u.cards(), &cs);
    let mut dep_rows = vec![vec![0u64; card]; t_sc.len()];
    let mut ind_rows = vec![vec![0u64; card]; t_c.len()];
    for (idx, &n) in t_u.counts().iter().enumerate() {
        let state = (idx / strides[child_pos]) % card;
        dep_rows[to_sc.project(idx)][state] += n;
        ind_rows[to_c.project(idx)][state] += n;
    }
    let a_dep = prior.cell_alpha(dep_rows.len() * card)?;
    let a_ind = prior.cell_alpha(ind_rows.len() * card)?;
    let m_dep = phi
        + dep_rows
            .iter()
            .map(|r| polya_log_marginal(r, a_dep))
            .sum::<f64>();
    let m_ind = phi
        + ind_rows
            .iter()
            .map(|r| polya_log_marginal(r, a_ind))
            .sum::<f64>();
    Ok(m_dep - m_ind)
}

/// Posterior-mean CPT under a Dirichlet prior: every row is defined since
/// the pseudo-counts keep it proper even without observations.
pub fn posterior_mean_cpt(
    ctx: &EmpiricalContext,
    child: usize,
    parents: &[usize],
    prior: &DirichletPrior,
) -> Result<Cpt> {
    let vars = ctx.variables();
    let parents = normalized_scope(vars, parents)?;
    if parents.contains(&child) {
        return Err(Error::invalid(format!(
            "node {child} cannot be its own parent"
        )));
    }
    vars.check_scope(&[child])?;
    let card = vars.cardinality(child);
    let mut family = parents.clone();
    family.push(child);
    family.sort_unstable();
    let fam = ctx.marginal_counts(&family)?;
    let pa = ctx.marginal_counts(&parents)?;
    let alpha = prior.cell_alpha(pa.len() * card)?;
    let child_pos = family.binary_search(&child).unwrap();
    let strides = strides_of(fam.cards());
    let to_row = SubIndexer::new(&family, fam.cards(), &parents);
    let mut rows = vec![vec![0.0f64; card]; pa.len()];
    for (idx, &n) in fam.counts().iter().enumerate() {
        let row = to_row.project(idx);
        let state = (idx / strides[child_pos]) % card;
        let denom = pa.counts()[row] as f64 + alpha * card as f64;
        rows[row][state] = (n as f64 + alpha) / denom;
    }
    Cpt::new(vars, child, parents, rows, vec![true; pa.len()])
}

/// Decides whether `i` is independent of `S` given `C` under `rule`, using
/// whichever statistics the evaluator provides. An empty `S` is
/// independent by definition. Rules that need counts reject evaluators
/// without a sample size.
pub fn evaluate_rule(
    rule: &DecisionRule,
    eval: &dyn NodeEvaluator,
    i: usize,
    s: &[usize],
    c: &[usize],
) -> Result<TestOutcome> {
    check_disjoint(&[("X", &[i][..]), ("S", s), ("C", c)])?;
    if s.is_empty() {
        let threshold = match *rule {
            DecisionRule::EpsilonThreshold { epsilon } => epsilon,
            DecisionRule::ChiSquared { alpha_level } => alpha_level,
            DecisionRule::Aic => 0.0,
            DecisionRule::BayesFactor { log_threshold, .. } => log_threshold,
        };
        return Ok(TestOutcome {
            statistic: 0.0,
            threshold_used: threshold,
            dof: 0,
            independent: true,
        });
    }
    match *rule {
        DecisionRule::EpsilonThreshold { epsilon } => {
            if !(epsilon >= 0.0) || !epsilon.is_finite() {
                return Err(Error::invalid(format!("invalid threshold {epsilon}")));
            }
            let effective = if eval.sample_size().is_none() {
                epsilon.max(EXACT_EPSILON_FLOOR)
            } else {
                epsilon
            };
            let h = eval.statistic(i, s, c)?;
            Ok(TestOutcome {
                statistic: h,
                threshold_used: effective,
                dof: 0,
                independent: h <= effective,
            })
        }
        DecisionRule::ChiSquared { alpha_level } => {
            if !(alpha_level > 0.0 && alpha_level < 1.0) {
                return Err(Error::invalid(format!(
                    "invalid significance level {alpha_level}"
                )));
            }
            let n = eval.sample_size().ok_or_else(|| Error::RuleInputMismatch {
                detail: "the chi-squared rule needs counts, not an exact distribution".into(),
            })?;
            let mut union: Vec<usize> = c.iter().chain(s).copied().collect();
            union.sort_unstable();
            let dof = dof_delta_for(eval, i, c, &union)?;
            let g2 = 2.0 * n as f64 * eval.statistic(i, s, c)?;
            let p = chi2_sf(g2, dof)?;
            Ok(TestOutcome {
                statistic: g2,
                threshold_used: alpha_level,
                dof,
                independent: p >= alpha_level,
            })
        }
        DecisionRule::Aic => {
            let n = eval.sample_size().ok_or_else(|| Error::RuleInputMismatch {
                detail: "the AIC rule needs counts, not an exact distribution".into(),
            })?;
            let mut union: Vec<usize> = c.iter().chain(s).copied().collect();
            union.sort_unstable();
            let dof = dof_delta_for(eval, i, c, &union)?;
            let g2 = 2.0 * n as f64 * eval.statistic(i, s, c)?;
            let threshold = 2.0 * dof as f64;
            Ok(TestOutcome {
                statistic: g2,
                threshold_used: threshold,
                dof,
                independent: g2 <= threshold,
            })
        }
        DecisionRule::BayesFactor { prior, log_threshold } => {
            if !log_threshold.is_finite() {
                return Err(Error::invalid(format!(
                    "invalid log threshold {log_threshold}"
                )));
            }
            if eval.sample_size().is_none() {
                return Err(Error::RuleInputMismatch {
                    detail: "the Bayes rule needs counts, not an exact distribution".into(),
                });
            }
            let lb = eval.log_bayes(i, s, c, &prior)?;
            Ok(TestOutcome {
                statistic: lb,
                threshold_used: log_threshold,
                dof: 0,
                independent: lb <= log_threshold,
            })
        }
    }
}

fn dof_delta_for(eval: &dyn NodeEvaluator, i: usize, c: &[usize], union: &[usize]) -> Result<u64> {
    dof_delta(eval.variables(), i, c, union)
}
