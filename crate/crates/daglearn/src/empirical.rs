//! Empirical counterparts of the exact-distribution quantities: count
//! caches, maximum-likelihood CPTs, the empirical joint, empirical
//! conditional cross entropy, and log likelihoods.
//!
//! Everything here works from integer counts. Counts convert to f64 exactly
//! for any dataset small enough to be practical, so the only rounding in
//! these routines comes from divisions and logarithms.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::exact::{clamp_entropy, nested_difference, JointTable, MAX_JOINT_CELLS};
use crate::model::{
    normalized_scope, strides_of, CountTable, Cpt, Dataset, OrderedDag, SubIndexer, Variables,
};

/// A dataset together with a cache of marginal count tables.
///
/// The cache is synchronized internally, so a context can be shared across
/// threads. Repeated queries for the same scope return the same table, and
/// a query whose scope is contained in an already cached table aggregates
/// from that table instead of rescanning the data when doing so is cheaper.
pub struct EmpiricalContext {
    dataset: Dataset,
    cache: Mutex<HashMap<Vec<usize>, Arc<CountTable>>>,
}

impl EmpiricalContext {
    pub fn new(dataset: Dataset) -> Self {
        EmpiricalContext {
            dataset,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn variables(&self) -> &Variables {
        self.dataset.variables()
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn n_rows(&self) -> u64 {
        self.dataset.n_rows() as u64
    }

    /// Count table over a scope (any order given, stored ascending).
    pub fn marginal_counts(&self, scope: &[usize]) -> Result<Arc<CountTable>> {
        let scope = normalized_scope(self.dataset.variables(), scope)?;
        let cells = self.dataset.variables().state_space_size(&scope);
        if cells > MAX_JOINT_CELLS as u128 {
            return Err(Error::StateSpaceTooLarge {
                cells,
                limit: MAX_JOINT_CELLS,
            });
        }
        let mut cache = self.cache.lock().unwrap();
        if let Some(table) = cache.get(&scope) {
            return Ok(table.clone());
        }
        let n = self.dataset.n_rows() as u128;
        let mut source: Option<Arc<CountTable>> = None;
        for (key, table) in cache.iter() {
            if (table.len() as u128) < n
                && scope.iter().all(|v| key.binary_search(v).is_ok())
                && source.as_ref().map_or(true, |s| table.len() < s.len())
            {
                source = Some(table.clone());
            }
        }
        let table = match source {
            Some(sup) => sup.marginalize(&scope)?,
            None => CountTable::tally(&self.dataset, &scope)?,
        };
        let arc = Arc::new(table);
        cache.insert(scope, arc.clone());
        Ok(arc)
    }
}

/// Maximum-likelihood CPT for `child` given `parents`. Rows whose parent
/// configuration never occurs in the data are marked undefined and filled
/// with a uniform placeholder.
pub fn mle_cpt(ctx: &EmpiricalContext, child: usize, parents: &[usize]) -> Result<Cpt> {
    let vars = ctx.variables();
    let parents = normalized_scope(vars, parents)?;
    if parents.contains(&child) {
        return Err(Error::invalid(format!(
            "node {child} cannot be its own parent"
        )));
    }
    vars.check_scope(&[child])?;
    let mut family = parents.clone();
    family.push(child);
    family.sort_unstable();
    let fam = ctx.marginal_counts(&family)?;
    let pa = ctx.marginal_counts(&parents)?;
    let card = vars.cardinality(child);
    let child_pos = family.binary_search(&child).unwrap();
    let fam_strides = strides_of(fam.cards());
    let to_row = SubIndexer::new(&family, fam.cards(), &parents);
    let mut rows = vec![vec![0.0f64; card]; pa.len()];
    let mut defined = vec![false; pa.len()];
    for (i, &n) in fam.counts().iter().enumerate() {
        let row = to_row.project(i);
        let state = (i / fam_strides[child_pos]) % card;
        let n_pa = pa.counts()[row];
        if n_pa > 0 {
            defined[row] = true;
            rows[row][state] = n as f64 / n_pa as f64;
        }
    }
    for (row, slot) in rows.iter_mut().enumerate() {
        if !defined[row] {
            *slot = vec![1.0 / card as f64; card];
        }
    }
    Cpt::new(vars, child, parents, rows, defined)
}

/// The empirical joint distribution: cell counts divided by the number of
/// rows.
pub fn empirical_joint(ctx: &EmpiricalContext) -> Result<JointTable> {
    if ctx.n_rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    let full: Vec<usize> = (0..ctx.variables().len()).collect();
    let counts = ctx.marginal_counts(&full)?;
    let n = ctx.n_rows() as f64;
    let probs = counts.counts().iter().map(|&c| c as f64 / n).collect();
    JointTable::new(ctx.variables().clone(), probs)
}

/// Empirical conditional cross entropy between `a` and `b` given `c`, in
/// nats: the count-ratio analogue of the exact quantity, equal to
/// evaluating it on the empirical joint. Computed directly from four count
/// tables so the two routes stay independent.
pub fn empirical_cce(ctx: &EmpiricalContext, a: &[usize], b: &[usize], c: &[usize]) -> Result<f64> {
    crate::exact::check_disjoint(&[("A", a), ("B", b), ("C", c)])?;
    if ctx.n_rows() == 0 {
        return Ok(0.0);
    }
    let mut union: Vec<usize> = Vec::with_capacity(a.len() + b.len() + c.len());
    union.extend_from_slice(a);
    union.extend_from_slice(b);
    union.extend_from_slice(c);
    let u = normalized_scope(ctx.variables(), &union)?;
    let mut ac: Vec<usize> = a.iter().chain(c).copied().collect();
    ac.sort_unstable();
    let mut bc: Vec<usize> = b.iter().chain(c).copied().collect();
    bc.sort_unstable();
    let mut cs: Vec<usize> = c.to_vec();
    cs.sort_unstable();
    let t_u = ctx.marginal_counts(&u)?;
    let t_ac = ctx.marginal_counts(&ac)?;
    let t_bc = ctx.marginal_counts(&bc)?;
    let t_c = ctx.marginal_counts(&cs)?;
    let idx_ac = SubIndexer::new(&u, t_u.cards(), &ac);
    let idx_bc = SubIndexer::new(&u, t_u.cards(), &bc);
    let idx_c = SubIndexer::new(&u, t_u.cards(), &cs);
    let mut sum = 0.0f64;
    for (i, &n) in t_u.counts().iter().enumerate() {
        if n > 0 {
            let n = n as f64;
            let n_ac = t_ac.counts()[idx_ac.project(i)] as f64;
            let n_bc = t_bc.counts()[idx_bc.project(i)] as f64;
            let n_c = t_c.counts()[idx_c.project(i)] as f64;
            sum += n * ((n * n_c) / (n_ac * n_bc)).ln();
        }
    }
    Ok(clamp_entropy(sum / ctx.n_rows() as f64, "empirical cross entropy"))
}

/// Log likelihood of the data restricted to one family: counts times log
/// count ratios at the maximum-likelihood estimate. Always ≤ 0.
pub fn family_log_likelihood(
    ctx: &EmpiricalContext,
    child: usize,
    parents: &[usize],
) -> Result<f64> {
    let vars = ctx.variables();
    let parents = normalized_scope(vars, parents)?;
    if parents.contains(&child) {
        return Err(Error::invalid(format!(
            "node {child} cannot be its own parent"
        )));
    }
    vars.check_scope(&[child])?;
    let mut family = parents.clone();
    family.push(child);
    family.sort_unstable();
    let fam = ctx.marginal_counts(&family)?;
    let pa = ctx.marginal_counts(&parents)?;
    let to_row = SubIndexer::new(&family, fam.cards(), &parents);
    let mut sum = 0.0f64;
    for (i, &n) in fam.counts().iter().enumerate() {
        if n > 0 {
            let n_pa = pa.counts()[to_row.project(i)];
            sum += n as f64 * (n as f64 / n_pa as f64).ln();
        }
    }
    debug_assert!(sum <= 0.0);
    Ok(sum)
}

/// Log likelihood of the data under the maximum-likelihood fit of `dag`:
/// the sum of the family terms in ascending node order.
pub fn log_likelihood(ctx: &EmpiricalContext, dag: &OrderedDag) -> Result<f64> {
    if dag.n_nodes() != ctx.variables().len() {
        return Err(Error::invalid(format!(
            "DAG has {} nodes, dataset has {} variables",
            dag.n_nodes(),
            ctx.variables().len()
        )));
    }
    let mut total = 0.0f64;
    for i in 0..dag.n_nodes() {
        total += family_log_likelihood(ctx, i, dag.parents(i))?;
    }
    Ok(total)
}

/// Log-likelihood ratio at node `i` between the fits with parent sets
/// `pa_new` and `pa_old`, where the old set must be contained in the new
/// one. Nonnegative up to round-off, which is clamped to zero.
pub fn log_likelihood_ratio(
    ctx: &EmpiricalContext,
    i: usize,
    pa_old: &[usize],
    pa_new: &[usize],
) -> Result<f64> {
    nested_difference(i, pa_old, pa_new)?;
    let new = family_log_likelihood(ctx, i, pa_new)?;
    let old = family_log_likelihood(ctx, i, pa_old)?;
    Ok(clamp_entropy(new - old, "log-likelihood ratio"))
}

/// Number of extra free parameters when node `i`'s parents grow from
/// `pa_old` to `pa_new`.
pub fn dof_delta(vars: &Variables, i: usize, pa_old: &[usize], pa_new: &[usize]) -> Result<u64> {
    nested_difference(i, pa_old, pa_new)?;
    vars.check_scope(&[i])?;
    let old = normalized_scope(vars, pa_old)?;
    let new = normalized_scope(vars, pa_new)?;
    let rows_old = vars.state_space_size(&old);
    let rows_new = vars.state_space_size(&new);
    let extra = (vars.cardinality(i) as u128 - 1) * (rows_new - rows_old);
    u64::try_from(extra).map_err(|_| Error::OutOfRange {
        detail: format!("parameter count difference {extra} exceeds u64"),
    })
}
