//! Structure learning for discrete Bayesian networks under a fixed node
//! ordering.
//!
//! Given complete data, or an exactly known joint distribution, and an
//! ordering of the variables, the crate selects a parent set for every node
//! with a greedy grow/thin search. Each decision can be framed two ways:
//! as a conditional independence test (is the candidate set irrelevant given
//! the current parents?) or as a score comparison (does the larger family
//! improve the model?). Both framings are implemented as separate numerical
//! code paths, and the [`duality`] module checks at run time that they make
//! identical decisions and select identical structures.
//!
//! Modules:
//! - [`model`]: variables, orderings, DAGs, CPTs, datasets, count tables.
//! - [`exact`]: joint probability tables, KL divergence, projections,
//!   conditional cross entropy, ancestral sampling.
//! - [`empirical`]: count caches, maximum-likelihood estimates, empirical
//!   cross entropy, log likelihoods.
//! - [`scoring`]: decision rules, chi-squared tail areas, AIC, Dirichlet
//!   marginal likelihoods and Bayes factors.
//! - [`search`]: grow/thin parent selection and exhaustive reference search.
//! - [`duality`]: identity checks and the dual-engine search harness.
//! - [`synth`]: random instance generators for tests and verification runs.
//! - [`io`]: JSON model/distribution documents and CSV datasets.
//! - [`cli`]: the `daglearn` command line.

pub mod cli;
pub mod duality;
pub mod empirical;
pub mod error;
pub mod exact;
pub mod io;
pub mod model;
pub mod scoring;
pub mod search;
pub mod synth;

#[cfg(test)]
pub(crate) mod testsupport;

pub use duality::{
    dual_search, verify_bayes_identity, verify_kl_identity, verify_llr_identity, DualInput,
    DualSearchReport, IdentityReport,
};
pub use empirical::{
    dof_delta, empirical_cce, empirical_joint, family_log_likelihood, log_likelihood,
    log_likelihood_ratio, mle_cpt, EmpiricalContext,
};
pub use error::{Error, Result};
pub use exact::{
    ancestral_sample, conditional_cross_entropy, delta_kl, joint_from_bayesnet, kl_decomposed,
    kl_divergence, marginalize, project_to_dag, JointTable, KlDecomposition, ProbTable,
    MAX_JOINT_CELLS,
};
pub use io::{
    canonical_states, encode_dataset_csv, parse_dataset_csv, read_distribution, read_model,
    write_dataset_csv, write_distribution, write_model, DistributionDocument, ModelDocument,
};
pub use model::{
    config_from_index, config_index, family_config_from_index, family_config_index,
    num_free_parameters, validate_dag, BayesNet, CountTable, Cpt, Dataset, NodeOrdering,
    OrderedDag, VariableSpec, Variables,
};
pub use scoring::{
    aic_score, bayes_independence_test, ch_family_log_marginal, chi2_sf, deviance_difference,
    evaluate_rule, log_bayes_factor, log_gamma, log_marginal_likelihood, posterior_mean_cpt,
    DecisionRule, DirichletPrior, TestOutcome,
};
pub use search::{
    exhaustive_parents, grow_parents, grow_parents_with, learn_structure, learn_structure_with,
    recover_from_distribution, thin_parents, EmpiricalEvaluator, EvaluatorKind, ExactEvaluator,
    NodeEvaluator, Phase, SearchConfig, SearchStep, SearchTrace,
};
pub use synth::{
    random_ci_triple, random_dag, random_dataset, random_joint, random_nested_pair, random_net,
};
