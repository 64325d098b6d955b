//! Exact distribution machinery: dense joint tables, marginals, KL
//! divergence, conditional cross entropy, projection onto a DAG, and
//! ancestral sampling.
//!
//! Entropy-style sums are accumulated in ascending cell order with plain
//! double-precision addition so that identical inputs always reproduce the
//! same value bit for bit. Probability-mass checks use compensated summation
//! so that validation stays sharp even for large tables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{
    normalized_scope, strides_of, table_len, BayesNet, Cpt, Dataset, OrderedDag, SubIndexer,
    Variables,
};

/// Largest joint table this crate will materialize.
pub const MAX_JOINT_CELLS: usize = 1 << 22;

/// Tolerance for "this table is a probability distribution" checks.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Magnitude of negative round-off tolerated in entropy-style sums before it
/// is treated as a bug.
pub const ENTROPY_CLAMP: f64 = 1e-12;

/// Compensated (Neumaier) summation; the result is deterministic for a fixed
/// input order and accurate to a few ulps regardless of length.
pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Clamps the tiny negative round-off allowed in nonnegative entropy sums.
/// Anything below `-ENTROPY_CLAMP` indicates an internal inconsistency.
pub(crate) fn clamp_entropy(sum: f64, what: &str) -> f64 {
    if sum < 0.0 {
        assert!(
            sum >= -ENTROPY_CLAMP,
            "{what} came out {sum}, below the negative round-off allowance"
        );
        0.0
    } else {
        sum
    }
}

/// A dense joint probability table over all variables, row-major with the
/// last variable fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct JointTable {
    variables: Variables,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn new(variables: Variables, probs: Vec<f64>) -> Result<Self> {
        let scope: Vec<usize> = (0..variables.len()).collect();
        let cells = variables.state_space_size(&scope);
        if cells > MAX_JOINT_CELLS as u128 {
            return Err(Error::StateSpaceTooLarge {
                cells,
                limit: MAX_JOINT_CELLS,
            });
        }
        if probs.len() as u128 != cells {
            return Err(Error::invalid(format!(
                "joint table has {} cells, state space has {cells}",
                probs.len()
            )));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !(p >= 0.0) || !p.is_finite() {
                return Err(Error::invalid(format!(
                    "joint table cell {i} holds {p}, expected a finite nonnegative value"
                )));
            }
        }
        let total = neumaier_sum(probs.iter().copied());
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::invalid(format!(
                "joint table sums to {total}, expected 1"
            )));
        }
        Ok(JointTable { variables, probs })
    }

    pub fn variables(&self) -> &Variables {
        &self.variables
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n_cells(&self) -> usize {
        self.probs.len()
    }

    /// Probability of a full assignment.
    pub fn prob(&self, assignment: &[usize]) -> Result<f64> {
        let scope: Vec<usize> = (0..self.variables.len()).collect();
        let idx = crate::model::config_index(&self.variables.cards(&scope), assignment)?;
        Ok(self.probs[idx])
    }
}

/// A dense probability table over a subset of the variables (ascending
/// scope order).
#[derive(Clone, Debug, PartialEq)]
pub struct ProbTable {
    scope: Vec<usize>,
    cards: Vec<usize>,
    probs: Vec<f64>,
}

impl ProbTable {
    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Aggregate onto a subset of this table's scope.
    pub fn marginalize(&self, sub: &[usize]) -> Result<ProbTable> {
        let mut sub = sub.to_vec();
        sub.sort_unstable();
        sub.dedup();
        for v in &sub {
            if self.scope.binary_search(v).is_err() {
                return Err(Error::invalid(format!(
                    "variable {v} is not in scope {:?}",
                    self.scope
                )));
            }
        }
        let sub_cards: Vec<usize> = sub
            .iter()
            .map(|v| self.cards[self.scope.binary_search(v).unwrap()])
            .collect();
        let indexer = SubIndexer::new(&self.scope, &self.cards, &sub);
        let mut probs = vec![0.0f64; table_len(&sub_cards)];
        for (i, &p) in self.probs.iter().enumerate() {
            probs[indexer.project(i)] += p;
        }
        Ok(ProbTable {
            scope: sub,
            cards: sub_cards,
            probs,
        })
    }
}

/// Marginal distribution of a joint table over a scope (any order given,
/// normalized ascending). An empty scope yields a single-cell table holding
/// the total mass.
pub fn marginalize(joint: &JointTable, scope: &[usize]) -> Result<ProbTable> {
    let scope = normalized_scope(joint.variables(), scope)?;
    let full: Vec<usize> = (0..joint.variables().len()).collect();
    let full_cards = joint.variables().cards(&full);
    let cards = joint.variables().cards(&scope);
    let indexer = SubIndexer::new(&full, &full_cards, &scope);
    let mut probs = vec![0.0f64; table_len(&cards)];
    for (i, &p) in joint.probs().iter().enumerate() {
        probs[indexer.project(i)] += p;
    }
    Ok(ProbTable {
        scope,
        cards,
        probs,
    })
}

/// Joint table defined by a Bayesian network: the product of its CPT entries.
///
/// Factors are multiplied in ordering order, so a CPT row may be undefined as
/// long as every path reaching it has probability zero.
pub fn joint_from_bayesnet(net: &BayesNet) -> Result<JointTable> {
    let vars = net.variables();
    let full: Vec<usize> = (0..vars.len()).collect();
    let cells = vars.state_space_size(&full);
    if cells > MAX_JOINT_CELLS as u128 {
        return Err(Error::StateSpaceTooLarge {
            cells,
            limit: MAX_JOINT_CELLS,
        });
    }
    let cards = vars.cards(&full);
    let mut probs = vec![0.0f64; cells as usize];
    let mut assignment = vec![0usize; vars.len()];
    for (idx, slot) in probs.iter_mut().enumerate() {
        let mut rest = idx;
        for j in (0..cards.len()).rev() {
            assignment[j] = rest % cards[j];
            rest /= cards[j];
        }
        let mut p = 1.0f64;
        for &v in net.ordering().order() {
            let cpt = net.cpt(v);
            let row = cpt.row_index_of(&assignment);
            if !cpt.is_defined(row) {
                if p > 0.0 {
                    return Err(Error::UndefinedCptRow { child: v, row });
                }
                break;
            }
            p *= cpt.row(row)[assignment[v]];
            if p == 0.0 {
                break;
            }
        }
        *slot = p;
    }
    JointTable::new(vars.clone(), probs)
}

/// Kullback-Leibler divergence between two joints over the same variables,
/// in nats. Returns positive infinity when `p` puts mass where `q` does not.
pub fn kl_divergence(p: &JointTable, q: &JointTable) -> f64 {
    assert_eq!(
        p.variables(),
        q.variables(),
        "KL divergence needs both tables over the same variables"
    );
    let mut sum = 0.0f64;
    for (&pp, &qq) in p.probs().iter().zip(q.probs()) {
        if pp > 0.0 {
            if qq == 0.0 {
                return f64::INFINITY;
            }
            sum += pp * (pp / qq).ln();
        }
    }
    clamp_entropy(sum, "KL divergence")
}

/// Conditional cross entropy H(X_A, X_B | X_C) under `p`, in nats: the
/// expected log ratio between the joint of A and B given C and the product
/// of their individual conditionals given C. Zero exactly when A and B are
/// conditionally independent given C; symmetric in A and B.
///
/// Computed by summing over the marginal on the union scope.
pub fn conditional_cross_entropy(
    p: &JointTable,
    a: &[usize],
    b: &[usize],
    c: &[usize],
) -> Result<f64> {
    check_disjoint(&[("A", a), ("B", b), ("C", c)])?;
    let mut union: Vec<usize> = Vec::with_capacity(a.len() + b.len() + c.len());
    union.extend_from_slice(a);
    union.extend_from_slice(b);
    union.extend_from_slice(c);
    let m = marginalize(p, &union)?;
    let mut ac: Vec<usize> = a.iter().chain(c).copied().collect();
    ac.sort_unstable();
    let mut bc: Vec<usize> = b.iter().chain(c).copied().collect();
    bc.sort_unstable();
    let mut cs: Vec<usize> = c.to_vec();
    cs.sort_unstable();
    let t_ac = m.marginalize(&ac)?;
    let t_bc = m.marginalize(&bc)?;
    let t_c = m.marginalize(&cs)?;
    let idx_ac = SubIndexer::new(m.scope(), m.cards(), &ac);
    let idx_bc = SubIndexer::new(m.scope(), m.cards(), &bc);
    let idx_c = SubIndexer::new(m.scope(), m.cards(), &cs);
    let mut sum = 0.0f64;
    for (i, &p_abc) in m.probs().iter().enumerate() {
        if p_abc > 0.0 {
            let p_ac = t_ac.probs()[idx_ac.project(i)];
            let p_bc = t_bc.probs()[idx_bc.project(i)];
            let p_c = t_c.probs()[idx_c.project(i)];
            sum += p_abc * ((p_abc * p_c) / (p_ac * p_bc)).ln();
        }
    }
    Ok(clamp_entropy(sum, "conditional cross entropy"))
}

pub(crate) fn check_disjoint(scopes: &[(&str, &[usize])]) -> Result<()> {
    for (i, (name_a, a)) in scopes.iter().enumerate() {
        crate::model::check_distinct(a)?;
        for (name_b, b) in &scopes[i + 1..] {
            if a.iter().any(|v| b.contains(v)) {
                return Err(Error::ScopeOverlap {
                    detail: format!("{name_a} {a:?} and {name_b} {b:?} share a variable"),
                });
            }
        }
    }
    Ok(())
}

/// The KL divergence from `p` to its projection onto `dag`, split into one
/// term per node.
#[derive(Clone, Debug, PartialEq)]
pub struct KlDecomposition {
    /// Term for each variable: the cross entropy between it and its skipped
    /// predecessors, given its parents.
    pub per_node: Vec<f64>,
    /// Sum of the per-node terms, accumulated in ascending node order.
    pub total: f64,
}

/// Per-node decomposition of the divergence between `p` and the closest
/// distribution that factorizes over `dag`.
pub fn kl_decomposed(p: &JointTable, dag: &OrderedDag) -> Result<KlDecomposition> {
    if dag.n_nodes() != p.variables().len() {
        return Err(Error::invalid(format!(
            "DAG has {} nodes, joint has {} variables",
            dag.n_nodes(),
            p.variables().len()
        )));
    }
    let ordering = dag.ordering();
    let mut per_node = vec![0.0f64; dag.n_nodes()];
    for i in 0..dag.n_nodes() {
        let parents = dag.parents(i);
        let skipped: Vec<usize> = ordering
            .predecessors(i)
            .into_iter()
            .filter(|v| !parents.contains(v))
            .collect();
        per_node[i] = conditional_cross_entropy(p, &[i], &skipped, parents)?;
    }
    let total = per_node.iter().sum();
    Ok(KlDecomposition { per_node, total })
}

/// How much the divergence at node `i` falls when its parents grow from
/// `pa_old` to `pa_new`: the cross entropy between `i` and the added
/// variables given the old parents.
pub fn delta_kl(p: &JointTable, i: usize, pa_old: &[usize], pa_new: &[usize]) -> Result<f64> {
    let added = nested_difference(i, pa_old, pa_new)?;
    conditional_cross_entropy(p, &[i], &added, pa_old)
}

/// Checks `pa_old` is contained in `pa_new`, neither contains `i`, and
/// returns the added variables sorted ascending.
pub(crate) fn nested_difference(
    i: usize,
    pa_old: &[usize],
    pa_new: &[usize],
) -> Result<Vec<usize>> {
    crate::model::check_distinct(pa_old)?;
    crate::model::check_distinct(pa_new)?;
    if pa_old.contains(&i) || pa_new.contains(&i) {
        return Err(Error::NotNested {
            detail: format!("node {i} appears in its own parent set"),
        });
    }
    for v in pa_old {
        if !pa_new.contains(v) {
            return Err(Error::NotNested {
                detail: format!("{pa_old:?} is not contained in {pa_new:?}"),
            });
        }
    }
    let mut added: Vec<usize> = pa_new
        .iter()
        .copied()
        .filter(|v| !pa_old.contains(v))
        .collect();
    added.sort_unstable();
    Ok(added)
}

/// Closest distribution to `p` that factorizes over `dag`: each node keeps
/// its exact conditional given its parents. Rows for parent configurations
/// with zero probability are marked undefined.
pub fn project_to_dag(p: &JointTable, dag: &OrderedDag) -> Result<BayesNet> {
    if dag.n_nodes() != p.variables().len() {
        return Err(Error::invalid(format!(
            "DAG has {} nodes, joint has {} variables",
            dag.n_nodes(),
            p.variables().len()
        )));
    }
    let vars = p.variables();
    let mut cpts = Vec::with_capacity(dag.n_nodes());
    for v in 0..dag.n_nodes() {
        let parents = dag.parents(v).to_vec();
        let mut family: Vec<usize> = parents.clone();
        family.push(v);
        family.sort_unstable();
        let fam_table = marginalize(p, &family)?;
        let pa_table = fam_table.marginalize(&parents)?;
        let card = vars.cardinality(v);
        let n_rows = pa_table.len();
        let fam_strides = strides_of(fam_table.cards());
        let child_pos = family.binary_search(&v).unwrap();
        let pa_indexer = SubIndexer::new(&family, fam_table.cards(), &parents);
        let mut rows = vec![vec![0.0f64; card]; n_rows];
        let mut defined = vec![false; n_rows];
        // Walk family cells with the child state factored out via its stride.
        for (i, &pf) in fam_table.probs().iter().enumerate() {
            let row = pa_indexer.project(i);
            let state = (i / fam_strides[child_pos]) % card;
            let p_pa = pa_table.probs()[row];
            if p_pa > 0.0 {
                defined[row] = true;
                rows[row][state] = pf / p_pa;
            }
        }
        for (row, slot) in rows.iter_mut().enumerate() {
            if !defined[row] {
                *slot = vec![1.0 / card as f64; card];
            }
        }
        cpts.push(Cpt::new(vars, v, parents, rows, defined)?);
    }
    BayesNet::new(vars.clone(), dag.clone(), cpts)
}

/// Draws `n_rows` complete samples from the network, deterministically for a
/// fixed seed.
pub fn ancestral_sample(net: &BayesNet, n_rows: usize, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = net.variables().len();
    let mut rows = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        let mut assignment = vec![0usize; n];
        for &v in net.ordering().order() {
            let cpt = net.cpt(v);
            let row_idx = cpt.row_index_of(&assignment);
            if !cpt.is_defined(row_idx) {
                return Err(Error::UndefinedCptRow {
                    child: v,
                    row: row_idx,
                });
            }
            let row = cpt.row(row_idx);
            let u: f64 = rng.random();
            let mut acc = 0.0f64;
            let mut state = row.len() - 1;
            for (k, &pk) in row.iter().enumerate() {
                acc += pk;
                if u < acc {
                    state = k;
                    break;
                }
            }
            assignment[v] = state;
        }
        rows.push(assignment);
    }
    Dataset::new(net.variables().clone(), rows)
}
