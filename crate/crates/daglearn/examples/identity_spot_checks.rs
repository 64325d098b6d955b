//! Spot-check the three test-versus-score identities on random instances.
//!
//! Each identity equates a quantity computed by the independence-testing
//! code path with one computed by the scoring code path:
//! per-node divergence terms against directly summed cross entropies,
//! log-likelihood ratios per row against count-based cross entropies, and
//! Bayesian independence tests against log Bayes factors. The reports
//! carry the largest observed discrepancy.

use daglearn::{
    random_ci_triple, random_dag, random_dataset, random_joint, random_nested_pair,
    verify_bayes_identity, verify_kl_identity, verify_llr_identity, DirichletPrior,
    EmpiricalContext, IdentityReport, NodeOrdering,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let tol = 1e-10;

    let mut kl = IdentityReport::new("kl-decomposition-vs-direct-sum", tol);
    for _ in 0..50 {
        let joint = random_joint(&[2, 3, 2], &mut rng).unwrap();
        let dag = random_dag(&NodeOrdering::identity(3), 0.5, &mut rng).unwrap();
        kl.merge(&verify_kl_identity(&joint, &dag, tol).unwrap());
    }

    let data = random_dataset(&[2, 2, 3, 2], 0.4, 300, &mut rng).unwrap();
    let ctx = EmpiricalContext::new(data);
    let prior = DirichletPrior::uniform(1.0).unwrap();
    let mut llr = IdentityReport::new("llr-vs-conditional-cross-entropy", tol);
    let mut bayes = IdentityReport::new("bayes-test-vs-bayes-factor", tol);
    for _ in 0..50 {
        let (i, pa_old, pa_new) = random_nested_pair(4, &mut rng);
        llr.merge(&verify_llr_identity(&ctx, i, &pa_old, &pa_new, tol).unwrap());
        let (i, s, c) = random_ci_triple(4, &mut rng);
        bayes.merge(&verify_bayes_identity(&ctx, i, &s, &c, &prior, tol).unwrap());
    }

    for report in [kl, llr, bayes] {
        println!(
            "{}: {} instances, max discrepancy {:.3e}, pass: {}",
            report.identity, report.instances, report.max_discrepancy, report.pass
        );
    }
}
