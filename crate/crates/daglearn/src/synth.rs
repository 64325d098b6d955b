//! Random instance generators for tests, examples, and the verification
//! harness: strictly positive joints, order-consistent dags, networks with
//! parameters bounded away from determinism, and random scope choices.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::{ancestral_sample, neumaier_sum, JointTable, MAX_JOINT_CELLS};
use crate::model::{BayesNet, Cpt, Dataset, NodeOrdering, OrderedDag, Variables};

/// A joint distribution with independent exponential cell weights. Every
/// cell is strictly positive, so no independence holds by accident.
pub fn random_joint(cards: &[usize], rng: &mut impl Rng) -> Result<JointTable> {
    let variables = Variables::from_cards(cards);
    let scope: Vec<usize> = (0..cards.len()).collect();
    let size = variables.state_space_size(&scope);
    if size > MAX_JOINT_CELLS as u128 {
        return Err(Error::StateSpaceTooLarge {
            cells: size,
            limit: MAX_JOINT_CELLS,
        });
    }
    let mut probs = Vec::with_capacity(size as usize);
    for _ in 0..size as usize {
        probs.push(-positive_unit(rng).ln());
    }
    let total = neumaier_sum(probs.iter().copied());
    for p in &mut probs {
        *p /= total;
    }
    JointTable::new(variables, probs)
}

fn positive_unit(rng: &mut impl Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// An order-consistent dag keeping each possible edge independently with
/// probability `edge_prob`.
pub fn random_dag(
    ordering: &NodeOrdering,
    edge_prob: f64,
    rng: &mut impl Rng,
) -> Result<OrderedDag> {
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::invalid(format!(
            "edge probability {edge_prob} is not in [0, 1]"
        )));
    }
    let mut parents = Vec::with_capacity(ordering.len());
    for v in 0..ordering.len() {
        let mut pa: Vec<usize> = ordering
            .predecessors(v)
            .into_iter()
            .filter(|_| rng.random_bool(edge_prob))
            .collect();
        pa.sort_unstable();
        parents.push(pa);
    }
    OrderedDag::new(ordering.clone(), parents)
}

/// A network over `dag` whose CPT rows are normalized uniform draws from
/// [0.15, 0.85], keeping every state reachable and every edge effective
/// with overwhelming probability.
pub fn random_net(
    variables: &Variables,
    dag: &OrderedDag,
    rng: &mut impl Rng,
) -> Result<BayesNet> {
    let mut cpts = Vec::with_capacity(dag.n_nodes());
    for v in 0..dag.n_nodes() {
        let card = variables.cardinality(v);
        let row_space = variables.state_space_size(dag.parents(v));
        if row_space > MAX_JOINT_CELLS as u128 {
            return Err(Error::StateSpaceTooLarge {
                cells: row_space,
                limit: MAX_JOINT_CELLS,
            });
        }
        let n_rows = row_space as usize;
        let mut rows = Vec::with_capacity(n_rows);
        for _ in 0..n_rows {
            let mut row: Vec<f64> = (0..card)
                .map(|_| 0.15 + 0.7 * rng.random::<f64>())
                .collect();
            let sum: f64 = row.iter().sum();
            for p in &mut row {
                *p /= sum;
            }
            rows.push(row);
        }
        cpts.push(Cpt::new(
            variables,
            v,
            dag.parents(v).to_vec(),
            rows,
            vec![true; n_rows],
        )?);
    }
    BayesNet::new(variables.clone(), dag.clone(), cpts)
}

/// A dataset sampled from a random network over a random dag on the
/// identity ordering.
pub fn random_dataset(
    cards: &[usize],
    edge_prob: f64,
    n_rows: usize,
    rng: &mut impl Rng,
) -> Result<Dataset> {
    let variables = Variables::from_cards(cards);
    let ordering = NodeOrdering::identity(cards.len());
    let dag = random_dag(&ordering, edge_prob, rng)?;
    let net = random_net(&variables, &dag, rng)?;
    ancestral_sample(&net, n_rows, rng.random())
}

/// A node together with two nested parent sets drawn from the remaining
/// variables. The outer set is strictly larger whenever any other variable
/// exists.
pub fn random_nested_pair(
    n_vars: usize,
    rng: &mut impl Rng,
) -> (usize, Vec<usize>, Vec<usize>) {
    assert!(n_vars >= 1, "need at least one variable");
    let i = rng.random_range(0..n_vars);
    let others: Vec<usize> = (0..n_vars).filter(|&v| v != i).collect();
    loop {
        let pa_new: Vec<usize> = others
            .iter()
            .copied()
            .filter(|_| rng.random_bool(0.5))
            .collect();
        let pa_old: Vec<usize> = pa_new
            .iter()
            .copied()
            .filter(|_| rng.random_bool(0.5))
            .collect();
        if pa_new.len() > pa_old.len() || others.is_empty() {
            return (i, pa_old, pa_new);
        }
    }
}

/// A target node with a nonempty candidate set and a disjoint conditioning
/// set (possibly empty) drawn from the remaining variables.
pub fn random_ci_triple(
    n_vars: usize,
    rng: &mut impl Rng,
) -> (usize, Vec<usize>, Vec<usize>) {
    assert!(n_vars >= 2, "need at least two variables");
    let i = rng.random_range(0..n_vars);
    let others: Vec<usize> = (0..n_vars).filter(|&v| v != i).collect();
    loop {
        let mut s = Vec::new();
        let mut c = Vec::new();
        for &v in &others {
            match rng.random_range(0..3) {
                0 => s.push(v),
                1 => c.push(v),
                _ => {}
            }
        }
        if !s.is_empty() {
            return (i, s, c);
        }
    }
}
