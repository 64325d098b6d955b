//! Core model types: variables, orderings, DAGs, CPTs, datasets and count
//! tables, together with the dense table addressing convention used by every
//! other module.
//!
//! All dense tables in this crate are row-major with the *last* scope
//! variable varying fastest, and scopes are kept sorted in ascending
//! variable-index order unless a function documents otherwise.

use crate::error::{Error, Result};

/// A named discrete variable with at least two states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableSpec {
    pub name: String,
    pub cardinality: usize,
}

impl VariableSpec {
    pub fn new(name: impl Into<String>, cardinality: usize) -> Result<Self> {
        let name = name.into();
        if cardinality < 2 {
            return Err(Error::invalid(format!(
                "variable {name:?} has cardinality {cardinality}, need at least 2"
            )));
        }
        if name.is_empty() {
            return Err(Error::invalid("variable name is empty"));
        }
        Ok(VariableSpec { name, cardinality })
    }
}

/// A validated list of variables; names are unique and cardinalities are >= 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variables {
    specs: Vec<VariableSpec>,
}

impl Variables {
    pub fn new(specs: Vec<VariableSpec>) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::invalid("need at least one variable"));
        }
        for spec in &specs {
            if spec.cardinality < 2 {
                return Err(Error::invalid(format!(
                    "variable {:?} has cardinality {}, need at least 2",
                    spec.name, spec.cardinality
                )));
            }
        }
        let mut names: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("variable names are not unique"));
        }
        Ok(Variables { specs })
    }

    /// `n` binary variables named `x0`, `x1`, ...
    pub fn binary(n: usize) -> Self {
        Self::from_cards(&vec![2; n])
    }

    /// Variables named `x0`, `x1`, ... with the given cardinalities.
    pub fn from_cards(cards: &[usize]) -> Self {
        let specs = cards
            .iter()
            .enumerate()
            .map(|(i, &c)| VariableSpec {
                name: format!("x{i}"),
                cardinality: c,
            })
            .collect();
        Variables::new(specs).expect("cardinalities must be at least 2")
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn specs(&self) -> &[VariableSpec] {
        &self.specs
    }

    pub fn cardinality(&self, v: usize) -> usize {
        self.specs[v].cardinality
    }

    pub fn name(&self, v: usize) -> &str {
        &self.specs[v].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.specs.iter().position(|s| s.name == name)
    }

    /// Cardinalities of a scope, in scope order.
    pub fn cards(&self, scope: &[usize]) -> Vec<usize> {
        scope.iter().map(|&v| self.cardinality(v)).collect()
    }

    /// Number of joint configurations of a scope. Exact in `u128`.
    pub fn state_space_size(&self, scope: &[usize]) -> u128 {
        scope
            .iter()
            .map(|&v| self.cardinality(v) as u128)
            .product()
    }

    pub(crate) fn check_scope(&self, scope: &[usize]) -> Result<()> {
        for &v in scope {
            if v >= self.len() {
                return Err(Error::UnknownVariable {
                    index: v,
                    n_variables: self.len(),
                });
            }
        }
        Ok(())
    }
}

/// Row-major strides for a card vector: the last variable has stride 1.
pub(crate) fn strides_of(cards: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; cards.len()];
    for j in (0..cards.len().saturating_sub(1)).rev() {
        strides[j] = strides[j + 1] * cards[j + 1];
    }
    strides
}

pub(crate) fn table_len(cards: &[usize]) -> usize {
    cards.iter().product()
}

/// Flat row-major index of an assignment, last scope variable fastest.
pub fn config_index(cards: &[usize], assignment: &[usize]) -> Result<usize> {
    if cards.len() != assignment.len() {
        return Err(Error::OutOfRange {
            detail: format!(
                "assignment has {} values, scope has {} variables",
                assignment.len(),
                cards.len()
            ),
        });
    }
    let mut index = 0usize;
    for (j, (&card, &value)) in cards.iter().zip(assignment).enumerate() {
        if value >= card {
            return Err(Error::OutOfRange {
                detail: format!(
                    "value {value} at scope position {j} exceeds cardinality {card}"
                ),
            });
        }
        index = index * card + value;
    }
    Ok(index)
}

/// Inverse of [`config_index`].
pub fn config_from_index(cards: &[usize], index: usize) -> Result<Vec<usize>> {
    let len = table_len(cards);
    if index >= len {
        return Err(Error::OutOfRange {
            detail: format!("index {index} exceeds table size {len}"),
        });
    }
    let mut rest = index;
    let mut out = vec![0usize; cards.len()];
    for j in (0..cards.len()).rev() {
        out[j] = rest % cards[j];
        rest /= cards[j];
    }
    Ok(out)
}

/// Flat index of an assignment to `scope`, in the order the scope is given.
pub fn family_config_index(
    variables: &Variables,
    scope: &[usize],
    assignment: &[usize],
) -> Result<usize> {
    variables.check_scope(scope)?;
    check_distinct(scope)?;
    config_index(&variables.cards(scope), assignment)
}

/// Inverse of [`family_config_index`]; returns the assignment in scope order.
pub fn family_config_from_index(
    variables: &Variables,
    scope: &[usize],
    index: usize,
) -> Result<Vec<usize>> {
    variables.check_scope(scope)?;
    check_distinct(scope)?;
    config_from_index(&variables.cards(scope), index)
}

pub(crate) fn check_distinct(scope: &[usize]) -> Result<()> {
    let mut sorted = scope.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid(format!(
            "scope {scope:?} contains a repeated variable"
        )));
    }
    Ok(())
}

/// Sorted ascending copy of a scope; errors on duplicates or unknown indices.
pub(crate) fn normalized_scope(variables: &Variables, scope: &[usize]) -> Result<Vec<usize>> {
    variables.check_scope(scope)?;
    let mut sorted = scope.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid(format!(
            "scope {scope:?} contains a repeated variable"
        )));
    }
    Ok(sorted)
}

/// Maps flat indices of a table over `big` to flat indices of a table over a
/// subset `sub`. Both scopes are ascending.
pub(crate) struct SubIndexer {
    // (stride in big table, cardinality, stride in sub table) per sub variable
    entries: Vec<(usize, usize, usize)>,
}

impl SubIndexer {
    pub(crate) fn new(big: &[usize], big_cards: &[usize], sub: &[usize]) -> Self {
        let big_strides = strides_of(big_cards);
        let sub_cards: Vec<usize> = sub
            .iter()
            .map(|v| {
                let pos = big.binary_search(v).expect("sub scope not inside big scope");
                big_cards[pos]
            })
            .collect();
        let sub_strides = strides_of(&sub_cards);
        let entries = sub
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let pos = big.binary_search(v).unwrap();
                (big_strides[pos], big_cards[pos], sub_strides[k])
            })
            .collect();
        SubIndexer { entries }
    }

    #[inline]
    pub(crate) fn project(&self, big_index: usize) -> usize {
        let mut out = 0usize;
        for &(big_stride, card, sub_stride) in &self.entries {
            out += (big_index / big_stride) % card * sub_stride;
        }
        out
    }
}

/// A permutation of the variable indices; earlier positions may serve as
/// parents of later ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeOrdering {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl NodeOrdering {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        if n == 0 {
            return Err(Error::invalid("ordering is empty"));
        }
        let mut position = vec![usize::MAX; n];
        for (pos, &v) in order.iter().enumerate() {
            if v >= n {
                return Err(Error::UnknownVariable {
                    index: v,
                    n_variables: n,
                });
            }
            if position[v] != usize::MAX {
                return Err(Error::invalid(format!(
                    "ordering repeats variable {v}, not a permutation"
                )));
            }
            position[v] = pos;
        }
        Ok(NodeOrdering { order, position })
    }

    pub fn identity(n: usize) -> Self {
        NodeOrdering::new((0..n).collect()).expect("identity ordering is valid")
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Variable at each position, first to last.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn position(&self, v: usize) -> usize {
        self.position[v]
    }

    /// Variables strictly before `v` in the ordering, ascending by index.
    pub fn predecessors(&self, v: usize) -> Vec<usize> {
        let pos = self.position[v];
        let mut pred: Vec<usize> = self.order[..pos].to_vec();
        pred.sort_unstable();
        pred
    }
}

/// A DAG whose every arc points from an earlier variable in the ordering to a
/// later one. Parent lists are sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedDag {
    ordering: NodeOrdering,
    parents: Vec<Vec<usize>>,
}

impl OrderedDag {
    pub fn new(ordering: NodeOrdering, parents: Vec<Vec<usize>>) -> Result<Self> {
        let n = ordering.len();
        if parents.len() != n {
            return Err(Error::invalid(format!(
                "got parent sets for {} nodes, ordering has {n}",
                parents.len()
            )));
        }
        let mut normalized = Vec::with_capacity(n);
        for (child, set) in parents.into_iter().enumerate() {
            let mut set = set;
            set.sort_unstable();
            set.dedup();
            for &p in &set {
                if p >= n {
                    return Err(Error::UnknownVariable {
                        index: p,
                        n_variables: n,
                    });
                }
                if ordering.position(p) >= ordering.position(child) {
                    return Err(Error::OrderViolation { child, parent: p });
                }
            }
            normalized.push(set);
        }
        Ok(OrderedDag {
            ordering,
            parents: normalized,
        })
    }

    /// No arcs at all.
    pub fn empty(ordering: NodeOrdering) -> Self {
        let n = ordering.len();
        OrderedDag {
            ordering,
            parents: vec![Vec::new(); n],
        }
    }

    /// Every node gets all of its predecessors as parents.
    pub fn saturated(ordering: NodeOrdering) -> Self {
        let parents = (0..ordering.len())
            .map(|v| ordering.predecessors(v))
            .collect();
        OrderedDag { ordering, parents }
    }

    /// Copy of this DAG with node `v` reassigned the given parent set.
    pub fn with_parents(&self, v: usize, parents: Vec<usize>) -> Result<Self> {
        let mut sets = self.parents.clone();
        if v >= sets.len() {
            return Err(Error::UnknownVariable {
                index: v,
                n_variables: sets.len(),
            });
        }
        sets[v] = parents;
        OrderedDag::new(self.ordering.clone(), sets)
    }

    pub fn ordering(&self) -> &NodeOrdering {
        &self.ordering
    }

    pub fn n_nodes(&self) -> usize {
        self.parents.len()
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn parent_sets(&self) -> &[Vec<usize>] {
        &self.parents
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }
}

/// Validates that the parent map respects the ordering and builds the DAG.
pub fn validate_dag(
    variables: &Variables,
    ordering: NodeOrdering,
    parents: Vec<Vec<usize>>,
) -> Result<OrderedDag> {
    if ordering.len() != variables.len() {
        return Err(Error::invalid(format!(
            "ordering covers {} variables, model has {}",
            ordering.len(),
            variables.len()
        )));
    }
    OrderedDag::new(ordering, parents)
}

/// Total count of free parameters of a DAG-structured model:
/// per node, (cardinality - 1) times the number of parent configurations.
pub fn num_free_parameters(variables: &Variables, dag: &OrderedDag) -> u64 {
    let mut total: u128 = 0;
    for v in 0..dag.n_nodes() {
        let rows = variables.state_space_size(dag.parents(v));
        total += (variables.cardinality(v) as u128 - 1) * rows;
    }
    u64::try_from(total).expect("parameter count exceeds u64")
}

pub const CPT_ROW_SUM_TOL: f64 = 1e-12;

/// Conditional probability table for one node. Rows are indexed by parent
/// configuration (parents ascending, last parent fastest); each defined row
/// holds a distribution over the child's states.
#[derive(Clone, Debug, PartialEq)]
pub struct Cpt {
    child: usize,
    child_card: usize,
    parents: Vec<usize>,
    parent_cards: Vec<usize>,
    values: Vec<f64>,
    defined: Vec<bool>,
}

impl Cpt {
    pub fn new(
        variables: &Variables,
        child: usize,
        parents: Vec<usize>,
        rows: Vec<Vec<f64>>,
        defined: Vec<bool>,
    ) -> Result<Self> {
        variables.check_scope(&[child])?;
        variables.check_scope(&parents)?;
        if parents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "parents {parents:?} of node {child} are not sorted ascending and distinct"
            )));
        }
        if parents.contains(&child) {
            return Err(Error::invalid(format!("node {child} cannot be its own parent")));
        }
        let child_card = variables.cardinality(child);
        let parent_cards = variables.cards(&parents);
        let n_rows = table_len(&parent_cards);
        if rows.len() != n_rows {
            return Err(Error::invalid(format!(
                "CPT for node {child} has {} rows, expected {n_rows}",
                rows.len()
            )));
        }
        if defined.len() != n_rows {
            return Err(Error::invalid(format!(
                "CPT for node {child} has {} defined flags, expected {n_rows}",
                defined.len()
            )));
        }
        let mut values = Vec::with_capacity(n_rows * child_card);
        for (j, row) in rows.iter().enumerate() {
            if row.len() != child_card {
                return Err(Error::invalid(format!(
                    "CPT row {j} for node {child} has {} entries, expected {child_card}",
                    row.len()
                )));
            }
            if defined[j] {
                let mut sum = 0.0;
                for &p in row {
                    if !(p >= 0.0) {
                        return Err(Error::invalid(format!(
                            "CPT row {j} for node {child} has negative entry {p}"
                        )));
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > CPT_ROW_SUM_TOL {
                    return Err(Error::invalid(format!(
                        "CPT row {j} for node {child} sums to {sum}, expected 1"
                    )));
                }
            }
            values.extend_from_slice(row);
        }
        Ok(Cpt {
            child,
            child_card,
            parents,
            parent_cards,
            values,
            defined,
        })
    }

    /// A CPT with every row defined and uniform.
    pub fn uniform(variables: &Variables, child: usize, parents: Vec<usize>) -> Result<Self> {
        let child_card = variables.cardinality(child);
        let n_rows = table_len(&variables.cards(&parents));
        let row = vec![1.0 / child_card as f64; child_card];
        Cpt::new(variables, child, parents, vec![row; n_rows], vec![true; n_rows])
    }

    pub fn child(&self) -> usize {
        self.child
    }

    pub fn child_cardinality(&self) -> usize {
        self.child_card
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn n_rows(&self) -> usize {
        self.defined.len()
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.child_card..(j + 1) * self.child_card]
    }

    pub fn is_defined(&self, j: usize) -> bool {
        self.defined[j]
    }

    /// Row index selected by a full assignment over all variables.
    pub fn row_index_of(&self, full_assignment: &[usize]) -> usize {
        let mut index = 0usize;
        for (&p, &card) in self.parents.iter().zip(&self.parent_cards) {
            index = index * card + full_assignment[p];
        }
        index
    }
}

/// A Bayesian network: variables, an order-consistent DAG, and one CPT per
/// node.
#[derive(Clone, Debug, PartialEq)]
pub struct BayesNet {
    variables: Variables,
    dag: OrderedDag,
    cpts: Vec<Cpt>,
}

impl BayesNet {
    pub fn new(variables: Variables, dag: OrderedDag, cpts: Vec<Cpt>) -> Result<Self> {
        if dag.n_nodes() != variables.len() {
            return Err(Error::invalid(format!(
                "DAG has {} nodes, model has {} variables",
                dag.n_nodes(),
                variables.len()
            )));
        }
        if cpts.len() != variables.len() {
            return Err(Error::invalid(format!(
                "got {} CPTs, expected {}",
                cpts.len(),
                variables.len()
            )));
        }
        for (v, cpt) in cpts.iter().enumerate() {
            if cpt.child() != v {
                return Err(Error::invalid(format!(
                    "CPT at slot {v} is for node {}",
                    cpt.child()
                )));
            }
            if cpt.parents() != dag.parents(v) {
                return Err(Error::invalid(format!(
                    "CPT for node {v} uses parents {:?}, DAG says {:?}",
                    cpt.parents(),
                    dag.parents(v)
                )));
            }
            if cpt.child_cardinality() != variables.cardinality(v) {
                return Err(Error::invalid(format!(
                    "CPT for node {v} has {} states, variable has {}",
                    cpt.child_cardinality(),
                    variables.cardinality(v)
                )));
            }
        }
        Ok(BayesNet {
            variables,
            dag,
            cpts,
        })
    }

    pub fn variables(&self) -> &Variables {
        &self.variables
    }

    pub fn dag(&self) -> &OrderedDag {
        &self.dag
    }

    pub fn ordering(&self) -> &NodeOrdering {
        self.dag.ordering()
    }

    pub fn cpt(&self, v: usize) -> &Cpt {
        &self.cpts[v]
    }

    /// Copy of this net in which undefined CPT rows become defined uniform
    /// rows, so every parent configuration can be sampled.
    pub fn with_uniform_fallback_rows(&self) -> BayesNet {
        let cpts = self
            .cpts
            .iter()
            .map(|cpt| {
                let child_card = cpt.child_cardinality();
                let rows: Vec<Vec<f64>> = (0..cpt.n_rows())
                    .map(|j| {
                        if cpt.is_defined(j) {
                            cpt.row(j).to_vec()
                        } else {
                            vec![1.0 / child_card as f64; child_card]
                        }
                    })
                    .collect();
                Cpt::new(
                    &self.variables,
                    cpt.child(),
                    cpt.parents().to_vec(),
                    rows,
                    vec![true; cpt.n_rows()],
                )
                .expect("rows already validated")
            })
            .collect();
        BayesNet {
            variables: self.variables.clone(),
            dag: self.dag.clone(),
            cpts,
        }
    }
}

/// Complete discrete data: every cell holds a state index for its column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    variables: Variables,
    rows: Vec<Vec<usize>>,
}

impl Dataset {
    pub fn new(variables: Variables, rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = variables.len();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "data row {r} has {} cells, expected {n}",
                    row.len()
                )));
            }
            for (v, &value) in row.iter().enumerate() {
                if value >= variables.cardinality(v) {
                    return Err(Error::OutOfRange {
                        detail: format!(
                            "data row {r} has value {value} for variable {v} of cardinality {}",
                            variables.cardinality(v)
                        ),
                    });
                }
            }
        }
        Ok(Dataset { variables, rows })
    }

    pub fn variables(&self) -> &Variables {
        &self.variables
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }
}

/// Dense table of occurrence counts over a scope (ascending variable order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    scope: Vec<usize>,
    cards: Vec<usize>,
    counts: Vec<u64>,
}

impl CountTable {
    /// Tally a dataset over a scope. The scope may be given in any order;
    /// it is normalized to ascending.
    pub fn tally(dataset: &Dataset, scope: &[usize]) -> Result<Self> {
        let scope = normalized_scope(dataset.variables(), scope)?;
        let cards = dataset.variables().cards(&scope);
        let strides = strides_of(&cards);
        let mut counts = vec![0u64; table_len(&cards)];
        for row in dataset.rows() {
            let mut index = 0usize;
            for (k, &v) in scope.iter().enumerate() {
                index += row[v] * strides[k];
            }
            counts[index] += 1;
        }
        Ok(CountTable {
            scope,
            cards,
            counts,
        })
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Count for an assignment given in scope order.
    pub fn count(&self, assignment: &[usize]) -> Result<u64> {
        Ok(self.counts[config_index(&self.cards, assignment)?])
    }

    /// Aggregate onto a subset of this table's scope.
    pub fn marginalize(&self, sub: &[usize]) -> Result<CountTable> {
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
        let mut counts = vec![0u64; table_len(&sub_cards)];
        for (i, &c) in self.counts.iter().enumerate() {
            counts[indexer.project(i)] += c;
        }
        Ok(CountTable {
            scope: sub,
            cards: sub_cards,
            counts,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_index_roundtrip_binary_pair() {
        let cards = [2, 2];
        assert_eq!(config_index(&cards, &[1, 0]).unwrap(), 2);
        assert_eq!(config_from_index(&cards, 2).unwrap(), vec![1, 0]);
    }

    #[test]
    fn config_index_last_variable_fastest() {
        let cards = [2, 3];
        assert_eq!(config_index(&cards, &[1, 2]).unwrap(), 5);
        assert_eq!(config_index(&cards, &[0, 1]).unwrap(), 1);
        assert_eq!(config_from_index(&cards, 5).unwrap(), vec![1, 2]);
    }

    #[test]
    fn config_index_rejects_out_of_range() {
        assert!(matches!(
            config_index(&[2, 2], &[0, 2]),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            config_from_index(&[2, 2], 4),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn empty_scope_has_one_configuration() {
        assert_eq!(config_index(&[], &[]).unwrap(), 0);
        assert_eq!(config_from_index(&[], 0).unwrap(), Vec::<usize>::new());
        assert_eq!(table_len(&[]), 1);
    }

    #[test]
    fn family_index_checks_variables() {
        let vars = Variables::from_cards(&[2, 3]);
        assert_eq!(family_config_index(&vars, &[0, 1], &[1, 2]).unwrap(), 5);
        assert!(matches!(
            family_config_index(&vars, &[0, 7], &[0, 0]),
            Err(Error::UnknownVariable { .. })
        ));
    }

    #[test]
    fn variables_reject_cardinality_one() {
        assert!(VariableSpec::new("a", 1).is_err());
        let specs = vec![
            VariableSpec::new("a", 2).unwrap(),
            VariableSpec::new("a", 2).unwrap(),
        ];
        assert!(Variables::new(specs).is_err());
    }

    #[test]
    fn ordering_must_be_permutation() {
        assert!(NodeOrdering::new(vec![0, 0]).is_err());
        assert!(NodeOrdering::new(vec![0, 2]).is_err());
        let ord = NodeOrdering::new(vec![2, 0, 1]).unwrap();
        assert_eq!(ord.position(2), 0);
        assert_eq!(ord.predecessors(1), vec![0, 2]);
        assert_eq!(ord.predecessors(2), Vec::<usize>::new());
    }

    #[test]
    fn dag_rejects_parent_after_child() {
        let ord = NodeOrdering::identity(3);
        let bad = OrderedDag::new(ord.clone(), vec![vec![], vec![2], vec![]]);
        assert!(matches!(bad, Err(Error::OrderViolation { child: 1, parent: 2 })));
        let good = OrderedDag::new(ord, vec![vec![], vec![0], vec![0, 1]]).unwrap();
        assert_eq!(good.edge_count(), 3);
    }

    #[test]
    fn dag_rejects_self_loop() {
        let ord = NodeOrdering::identity(2);
        assert!(matches!(
            OrderedDag::new(ord, vec![vec![0], vec![]]),
            Err(Error::OrderViolation { child: 0, parent: 0 })
        ));
    }

    #[test]
    fn saturated_dag_under_reversed_ordering() {
        let ord = NodeOrdering::new(vec![1, 0]).unwrap();
        let dag = OrderedDag::saturated(ord);
        assert_eq!(dag.parents(0), &[1]);
        assert_eq!(dag.parents(1), &[] as &[usize]);
    }

    #[test]
    fn free_parameters_of_saturated_binary_triple() {
        let vars = Variables::binary(3);
        let dag = OrderedDag::saturated(NodeOrdering::identity(3));
        assert_eq!(num_free_parameters(&vars, &dag), 7);
        let empty = OrderedDag::empty(NodeOrdering::identity(3));
        assert_eq!(num_free_parameters(&vars, &empty), 3);
    }

    #[test]
    fn free_parameters_with_ternary_parent() {
        let vars = Variables::from_cards(&[3, 2]);
        let dag = OrderedDag::new(NodeOrdering::identity(2), vec![vec![], vec![0]]).unwrap();
        assert_eq!(num_free_parameters(&vars, &dag), 2 + 3);
    }

    #[test]
    fn cpt_rejects_bad_row_sum() {
        let vars = Variables::binary(2);
        let bad = Cpt::new(
            &vars,
            1,
            vec![0],
            vec![vec![0.6, 0.5], vec![0.5, 0.5]],
            vec![true, true],
        );
        assert!(bad.is_err());
        let ok = Cpt::new(
            &vars,
            1,
            vec![0],
            vec![vec![0.6, 0.4], vec![0.1, 0.9]],
            vec![true, true],
        )
        .unwrap();
        assert_eq!(ok.row(1), &[0.1, 0.9]);
    }

    #[test]
    fn cpt_ignores_undefined_row_content() {
        let vars = Variables::binary(2);
        let cpt = Cpt::new(
            &vars,
            1,
            vec![0],
            vec![vec![2.0, 5.0], vec![0.3, 0.7]],
            vec![false, true],
        )
        .unwrap();
        assert!(!cpt.is_defined(0));
        assert!(cpt.is_defined(1));
    }

    #[test]
    fn cpt_row_lookup_uses_parent_values() {
        let vars = Variables::from_cards(&[2, 3, 2]);
        let rows: Vec<Vec<f64>> = (0..6).map(|_| vec![0.5, 0.5]).collect();
        let cpt = Cpt::new(&vars, 2, vec![0, 1], rows, vec![true; 6]).unwrap();
        assert_eq!(cpt.row_index_of(&[1, 2, 0]), 5);
        assert_eq!(cpt.row_index_of(&[0, 1, 1]), 1);
    }

    #[test]
    fn dataset_rejects_out_of_range_values() {
        let vars = Variables::binary(2);
        assert!(Dataset::new(vars.clone(), vec![vec![0, 2]]).is_err());
        let data = Dataset::new(vars, vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(data.n_rows(), 2);
    }

    #[test]
    fn count_table_tally_and_marginalize() {
        let vars = Variables::binary(2);
        let data = Dataset::new(
            vars,
            vec![vec![0, 0], vec![0, 0], vec![1, 1], vec![1, 1]],
        )
        .unwrap();
        let joint = CountTable::tally(&data, &[0, 1]).unwrap();
        assert_eq!(joint.counts(), &[2, 0, 0, 2]);
        assert_eq!(joint.total(), 4);
        let left = joint.marginalize(&[0]).unwrap();
        assert_eq!(left.counts(), &[2, 2]);
        let direct = CountTable::tally(&data, &[0]).unwrap();
        assert_eq!(left, direct);
        let scalar = joint.marginalize(&[]).unwrap();
        assert_eq!(scalar.counts(), &[4]);
    }

    #[test]
    fn count_table_scope_is_normalized() {
        let vars = Variables::from_cards(&[2, 3]);
        let data = Dataset::new(vars, vec![vec![1, 2], vec![0, 1]]).unwrap();
        let t = CountTable::tally(&data, &[1, 0]).unwrap();
        assert_eq!(t.scope(), &[0, 1]);
        assert_eq!(t.count(&[1, 2]).unwrap(), 1);
    }

    #[test]
    fn uniform_fallback_fills_undefined_rows() {
        let vars = Variables::binary(2);
        let dag = OrderedDag::new(NodeOrdering::identity(2), vec![vec![], vec![0]]).unwrap();
        let cpts = vec![
            Cpt::new(&vars, 0, vec![], vec![vec![1.0, 0.0]], vec![true]).unwrap(),
            Cpt::new(
                &vars,
                1,
                vec![0],
                vec![vec![0.3, 0.7], vec![0.5, 0.5]],
                vec![true, false],
            )
            .unwrap(),
        ];
        let net = BayesNet::new(vars, dag, cpts).unwrap();
        let filled = net.with_uniform_fallback_rows();
        assert!(filled.cpt(1).is_defined(1));
        assert_eq!(filled.cpt(1).row(1), &[0.5, 0.5]);
        assert_eq!(filled.cpt(1).row(0), &[0.3, 0.7]);
    }
}
