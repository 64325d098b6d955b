//! Command line front end. Five subcommands cover the library surface:
//! `learn` fits a structure to CSV data, `sample` draws rows from a model,
//! `score` prints a model's fit to data, `verify` checks the paired-engine
//! identities on the user's own input, and `recover` reads an exact
//! distribution and returns its minimal structure.
//!
//! Exit codes: 0 on success, 1 on runtime errors or a failed verification,
//! 2 on usage errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::num::NonZeroUsize;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::thread;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::duality::{
    dual_search, verify_bayes_identity, verify_kl_identity, verify_llr_identity, DualInput,
    DualSearchReport, IdentityReport,
};
use crate::empirical::{log_likelihood, mle_cpt, EmpiricalContext};
use crate::error::Error;
use crate::exact::{ancestral_sample, project_to_dag, JointTable};
use crate::io::{
    encode_dataset_csv, parse_dataset_csv, read_distribution, read_model, write_dataset_csv,
    write_json, write_model, ModelDocument,
};
use crate::model::{BayesNet, NodeOrdering};
use crate::scoring::{
    aic_score, log_marginal_likelihood, posterior_mean_cpt, DecisionRule, DirichletPrior,
};
use crate::search::{learn_structure, recover_from_distribution, EmpiricalEvaluator};
use crate::synth::{random_ci_triple, random_dag, random_nested_pair};

const EXIT_OK: i32 = 0;
const EXIT_FAILURE: i32 = 1;
const EXIT_USAGE: i32 = 2;

/// Runs the command line interface on the given arguments and returns the
/// process exit code. The first argument is the program name.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Learn(args) => run_learn(args),
        Command::Sample(args) => run_sample(args),
        Command::Score(args) => run_score(args),
        Command::Verify(args) => run_verify(args),
        Command::Recover(args) => run_recover(args),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            EXIT_USAGE
        }
        Err(CliError::Run(err)) => {
            eprintln!("error: {err}");
            EXIT_FAILURE
        }
    }
}

enum CliError {
    Usage(String),
    Run(Error),
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::Run(err)
    }
}

fn usage(err: Error) -> CliError {
    CliError::Usage(err.to_string())
}

#[derive(Parser)]
#[command(
    name = "daglearn",
    version,
    about = "Structure learning for discrete Bayesian networks under a fixed node ordering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a network from CSV data and write it as a model document.
    Learn(LearnArgs),
    /// Draw rows from a model by ancestral sampling and write them as CSV.
    Sample(SampleArgs),
    /// Score a model against CSV data and print the scalar.
    Score(ScoreArgs),
    /// Check that the independence-test and score-based engines agree on
    /// the given input, both statistic by statistic and as full searches.
    Verify(VerifyArgs),
    /// Read an exact distribution and recover its minimal structure for
    /// the given ordering.
    Recover(RecoverArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Conditional cross entropy against a fixed threshold.
    CiEpsilon,
    /// Likelihood-ratio chi-squared test.
    Chi2,
    /// Penalized log-likelihood improvement.
    Aic,
    /// Log Bayes factor against a zero threshold.
    Bayes,
}

#[derive(Args)]
struct RuleArgs {
    /// Decision rule for accepting a candidate parent.
    #[arg(long, value_enum)]
    method: Method,
    /// Dependence threshold for ci-epsilon.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Significance level for chi2.
    #[arg(long)]
    alpha: Option<f64>,
    /// Dirichlet cell pseudo-count for bayes [default: 1].
    #[arg(long)]
    prior_alpha: Option<f64>,
}

impl RuleArgs {
    fn build(&self) -> Result<DecisionRule, CliError> {
        let forbid = |name: &str, present: bool| {
            if present {
                Err(CliError::Usage(format!(
                    "--{name} does not apply to --method {}",
                    self.method.label()
                )))
            } else {
                Ok(())
            }
        };
        match self.method {
            Method::CiEpsilon => {
                forbid("alpha", self.alpha.is_some())?;
                forbid("prior-alpha", self.prior_alpha.is_some())?;
                let epsilon = self.epsilon.ok_or_else(|| {
                    CliError::Usage("--method ci-epsilon requires --epsilon".into())
                })?;
                DecisionRule::epsilon(epsilon).map_err(usage)
            }
            Method::Chi2 => {
                forbid("epsilon", self.epsilon.is_some())?;
                forbid("prior-alpha", self.prior_alpha.is_some())?;
                let alpha = self
                    .alpha
                    .ok_or_else(|| CliError::Usage("--method chi2 requires --alpha".into()))?;
                DecisionRule::chi_squared(alpha).map_err(usage)
            }
            Method::Aic => {
                forbid("epsilon", self.epsilon.is_some())?;
                forbid("alpha", self.alpha.is_some())?;
                forbid("prior-alpha", self.prior_alpha.is_some())?;
                Ok(DecisionRule::aic())
            }
            Method::Bayes => {
                forbid("epsilon", self.epsilon.is_some())?;
                forbid("alpha", self.alpha.is_some())?;
                DecisionRule::bayes(self.prior()?, 0.0).map_err(usage)
            }
        }
    }

    fn prior(&self) -> Result<DirichletPrior, CliError> {
        DirichletPrior::uniform(self.prior_alpha.unwrap_or(1.0)).map_err(usage)
    }
}

impl Method {
    fn label(self) -> &'static str {
        match self {
            Method::CiEpsilon => "ci-epsilon",
            Method::Chi2 => "chi2",
            Method::Aic => "aic",
            Method::Bayes => "bayes",
        }
    }
}

fn parse_order(text: &str, n_vars: usize) -> Result<NodeOrdering, CliError> {
    if text == "file-order" {
        return Ok(NodeOrdering::identity(n_vars));
    }
    let mut order = Vec::new();
    for part in text.split(',') {
        let index: usize = part.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "--order must be 'file-order' or comma-separated indices, got '{text}'"
            ))
        })?;
        order.push(index);
    }
    if order.len() != n_vars {
        return Err(CliError::Usage(format!(
            "--order lists {} nodes but the input has {n_vars} variables",
            order.len()
        )));
    }
    NodeOrdering::new(order).map_err(usage)
}

fn open_input(path: &Path) -> Result<BufReader<File>, CliError> {
    match File::open(path) {
        Ok(file) => Ok(BufReader::new(file)),
        Err(err) => Err(CliError::Run(Error::invalid(format!(
            "cannot open {}: {err}",
            path.display()
        )))),
    }
}

fn create_output(path: &Path) -> Result<BufWriter<File>, CliError> {
    match File::create(path) {
        Ok(file) => Ok(BufWriter::new(file)),
        Err(err) => Err(CliError::Run(Error::invalid(format!(
            "cannot create {}: {err}",
            path.display()
        )))),
    }
}

#[derive(Args)]
struct LearnArgs {
    /// Input CSV dataset.
    #[arg(long)]
    data: PathBuf,
    /// Node ordering: 'file-order' or comma-separated column indices.
    #[arg(long)]
    order: String,
    #[command(flatten)]
    rule: RuleArgs,
    /// Accept single-valued columns by widening them to two states.
    #[arg(long)]
    allow_constant: bool,
    /// Write the step-by-step search trace as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Output model document path.
    #[arg(long)]
    out: PathBuf,
}

fn run_learn(args: LearnArgs) -> Result<i32, CliError> {
    let rule = args.rule.build()?;
    let (dataset, states) = parse_dataset_csv(open_input(&args.data)?, args.allow_constant)?;
    let ordering = parse_order(&args.order, dataset.variables().len())?;
    let ctx = EmpiricalContext::new(dataset);
    let eval = EmpiricalEvaluator::cross_entropy(&ctx);
    let (dag, trace) = learn_structure(&eval, &ordering, &rule)?;
    let mut cpts = Vec::with_capacity(dag.n_nodes());
    for v in 0..dag.n_nodes() {
        let cpt = if args.rule.method == Method::Bayes {
            posterior_mean_cpt(&ctx, v, dag.parents(v), &args.rule.prior()?)?
        } else {
            mle_cpt(&ctx, v, dag.parents(v))?
        };
        cpts.push(cpt);
    }
    let edges: usize = dag.parent_sets().iter().map(Vec::len).sum();
    let net = BayesNet::new(ctx.variables().clone(), dag, cpts)?;
    let doc = ModelDocument::from_network(&net, &states)?;
    write_model(&doc, create_output(&args.out)?)?;
    if let Some(path) = &args.trace {
        write_json(&trace, create_output(path)?)?;
    }
    eprintln!(
        "learned {} nodes, {edges} edges; model written to {}",
        net.variables().len(),
        args.out.display()
    );
    Ok(EXIT_OK)
}

#[derive(Args)]
struct SampleArgs {
    /// Input model document.
    #[arg(long)]
    model: PathBuf,
    /// Number of rows to draw.
    #[arg(long)]
    n: usize,
    /// Seed for the generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

fn run_sample(args: SampleArgs) -> Result<i32, CliError> {
    let doc = read_model(open_input(&args.model)?)?;
    let net = doc.to_network()?.with_uniform_fallback_rows();
    let dataset = ancestral_sample(&net, args.n, args.seed)?;
    write_dataset_csv(&dataset, &doc.states(), create_output(&args.out)?)?;
    eprintln!("{} rows written to {}", args.n, args.out.display());
    Ok(EXIT_OK)
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScoreKind {
    /// Maximized log likelihood.
    Loglik,
    /// Akaike information criterion, lower is better.
    Aic,
    /// Log marginal likelihood under a uniform Dirichlet prior.
    Bde,
}

#[derive(Args)]
struct ScoreArgs {
    /// Input CSV dataset; the header must match the model's variables.
    #[arg(long)]
    data: PathBuf,
    /// Input model document.
    #[arg(long)]
    model: PathBuf,
    /// Score to print.
    #[arg(long, value_enum)]
    score: ScoreKind,
    /// Dirichlet cell pseudo-count for bde [default: 1].
    #[arg(long)]
    prior_alpha: Option<f64>,
}

fn run_score(args: ScoreArgs) -> Result<i32, CliError> {
    if args.prior_alpha.is_some() && args.score != ScoreKind::Bde {
        return Err(CliError::Usage(
            "--prior-alpha only applies to --score bde".into(),
        ));
    }
    let doc = read_model(open_input(&args.model)?)?;
    let net = doc.to_network()?;
    let dataset = encode_dataset_csv(open_input(&args.data)?, net.variables(), &doc.states())?;
    let ctx = EmpiricalContext::new(dataset);
    let value = match args.score {
        ScoreKind::Loglik => log_likelihood(&ctx, net.dag())?,
        ScoreKind::Aic => aic_score(&ctx, net.dag())?,
        ScoreKind::Bde => {
            let prior = DirichletPrior::uniform(args.prior_alpha.unwrap_or(1.0)).map_err(usage)?;
            log_marginal_likelihood(&ctx, net.dag(), &prior)?
        }
    };
    println!("{value:.16e}");
    Ok(EXIT_OK)
}

#[derive(Args)]
struct VerifyArgs {
    /// Input CSV dataset; checks the finite-data identities.
    #[arg(long, conflicts_with = "dist")]
    data: Option<PathBuf>,
    /// Input distribution document; checks the exact identity.
    #[arg(long)]
    dist: Option<PathBuf>,
    /// Node ordering: 'file-order' or comma-separated column indices.
    #[arg(long)]
    order: String,
    #[command(flatten)]
    rule: RuleArgs,
    /// Random identity instances to draw.
    #[arg(long, default_value_t = 100)]
    instances: usize,
    /// Largest discrepancy accepted as agreement.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Seed for the instance draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Accept single-valued columns by widening them to two states.
    #[arg(long)]
    allow_constant: bool,
    /// Write the full report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Serialize)]
struct VerifyReport {
    identities: Vec<IdentityReport>,
    dual: DualSearchReport,
    pass: bool,
}

fn run_verify(args: VerifyArgs) -> Result<i32, CliError> {
    let rule = args.rule.build()?;
    let (identities, dual) = match (&args.data, &args.dist) {
        (Some(path), None) => {
            let (dataset, _) = parse_dataset_csv(open_input(path)?, args.allow_constant)?;
            let ordering = parse_order(&args.order, dataset.variables().len())?;
            let ctx = EmpiricalContext::new(dataset);
            let identities = empirical_identity_batch(
                &ctx,
                args.instances,
                args.seed,
                args.tol,
                &args.rule.prior()?,
            )?;
            let dual = dual_search(DualInput::Empirical(&ctx), &ordering, &rule, args.tol)?;
            (identities, dual)
        }
        (None, Some(path)) => {
            if !matches!(rule, DecisionRule::EpsilonThreshold { .. }) {
                return Err(CliError::Usage(
                    "--dist verification requires --method ci-epsilon; count-based rules need --data".into(),
                ));
            }
            let joint = read_distribution(open_input(path)?)?.to_joint()?;
            let ordering = parse_order(&args.order, joint.variables().len())?;
            let identities = exact_identity_batch(&joint, args.instances, args.seed, args.tol)?;
            let dual = dual_search(DualInput::Exact(&joint), &ordering, &rule, args.tol)?;
            (identities, dual)
        }
        _ => {
            return Err(CliError::Usage(
                "verify needs exactly one of --data or --dist".into(),
            ))
        }
    };
    let pass = identities.iter().all(|r| r.pass) && dual.pass;
    for r in &identities {
        println!(
            "identity {}: {} instances, max discrepancy {:.3e} (tolerance {:.3e}): {}",
            r.identity,
            r.instances,
            r.max_discrepancy,
            r.tolerance,
            if r.pass { "pass" } else { "FAIL" }
        );
    }
    println!(
        "dual search: structures {}, steps {}, max step discrepancy {:.3e} (tolerance {:.3e}): {}",
        if dual.structures_equal { "equal" } else { "DIFFER" },
        if dual.steps_aligned { "aligned" } else { "MISALIGNED" },
        dual.max_step_discrepancy,
        dual.tolerance,
        if dual.pass { "pass" } else { "FAIL" }
    );
    println!("verify: {}", if pass { "PASS" } else { "FAIL" });
    if let Some(path) = &args.report {
        write_json(&VerifyReport { identities, dual, pass }, create_output(path)?)?;
    }
    Ok(if pass { EXIT_OK } else { EXIT_FAILURE })
}

/// Splits `total` instances into contiguous chunks, one per worker thread.
fn split_instances(total: usize) -> Vec<Range<usize>> {
    let workers = thread::available_parallelism()
        .map(NonZeroUsize::get)
        .unwrap_or(1)
        .clamp(1, 8)
        .min(total.max(1));
    let per = total.div_ceil(workers);
    (0..workers)
        .map(|w| (w * per).min(total)..((w + 1) * per).min(total))
        .filter(|range| !range.is_empty())
        .collect()
}

/// Draws `instances` random nested parent pairs and independence triples on
/// the dataset and checks the likelihood-ratio and Bayes identities on each,
/// fanning the work out across threads. Instance `t` is seeded with
/// `seed + t`, so the draw is independent of the thread count.
fn empirical_identity_batch(
    ctx: &EmpiricalContext,
    instances: usize,
    seed: u64,
    tol: f64,
    prior: &DirichletPrior,
) -> Result<Vec<IdentityReport>, CliError> {
    let n_vars = ctx.variables().len();
    let mut llr = IdentityReport::new("llr-vs-conditional-cross-entropy", tol);
    let mut bayes = IdentityReport::new("bayes-test-vs-bayes-factor", tol);
    let batches = run_instance_workers(instances, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let (i, pa_old, pa_new) = random_nested_pair(n_vars, &mut rng);
        let llr_part = verify_llr_identity(ctx, i, &pa_old, &pa_new, tol)?;
        let bayes_part = if n_vars >= 2 {
            let (i, s, c) = random_ci_triple(n_vars, &mut rng);
            Some(verify_bayes_identity(ctx, i, &s, &c, prior, tol)?)
        } else {
            None
        };
        Ok((llr_part, bayes_part))
    })?;
    for (llr_part, bayes_part) in batches {
        llr.merge(&llr_part);
        if let Some(part) = bayes_part {
            bayes.merge(&part);
        }
    }
    Ok(vec![llr, bayes])
}

/// Draws `instances` random orderings and dags on the distribution and
/// checks the per-node divergence identity on each.
fn exact_identity_batch(
    joint: &JointTable,
    instances: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<IdentityReport>, CliError> {
    let n_vars = joint.variables().len();
    let mut kl = IdentityReport::new("kl-decomposition-vs-direct-sum", tol);
    let batches = run_instance_workers(instances, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
        let mut order: Vec<usize> = (0..n_vars).collect();
        order.shuffle(&mut rng);
        let ordering = NodeOrdering::new(order)?;
        let dag = random_dag(&ordering, 0.5, &mut rng)?;
        verify_kl_identity(joint, &dag, tol)
    })?;
    for part in batches {
        kl.merge(&part);
    }
    Ok(vec![kl])
}

/// Runs `check` for every instance index on a scoped thread pool and
/// collects the results in instance order.
fn run_instance_workers<R, F>(instances: usize, check: F) -> Result<Vec<R>, CliError>
where
    R: Send,
    F: Fn(usize) -> Result<R, Error> + Sync,
{
    let chunks = split_instances(instances);
    let check = &check;
    let outcomes: Vec<Result<Vec<R>, Error>> = thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|range| scope.spawn(move || range.map(check).collect::<Result<Vec<R>, Error>>()))
            .collect();
        handles
            .into_iter()
            .map(|handle| handle.join().expect("identity worker panicked"))
            .collect()
    });
    let mut results = Vec::with_capacity(instances);
    for outcome in outcomes {
        results.extend(outcome?);
    }
    Ok(results)
}

#[derive(Args)]
struct RecoverArgs {
    /// Input distribution document.
    #[arg(long)]
    dist: PathBuf,
    /// Node ordering: 'file-order' or comma-separated column indices.
    #[arg(long)]
    order: String,
    /// Dependence threshold treated as zero.
    #[arg(long)]
    epsilon: f64,
    /// Output model document path.
    #[arg(long)]
    out: PathBuf,
}

fn run_recover(args: RecoverArgs) -> Result<i32, CliError> {
    let doc = read_distribution(open_input(&args.dist)?)?;
    let joint = doc.to_joint()?;
    let ordering = parse_order(&args.order, joint.variables().len())?;
    let dag = recover_from_distribution(&joint, &ordering, args.epsilon)?;
    let edges: usize = dag.parent_sets().iter().map(Vec::len).sum();
    let net = project_to_dag(&joint, &dag)?;
    let model = ModelDocument::from_network(&net, &doc.states())?;
    write_model(&model, create_output(&args.out)?)?;
    eprintln!(
        "recovered {} nodes, {edges} edges; model written to {}",
        joint.variables().len(),
        args.out.display()
    );
    Ok(EXIT_OK)
}
