//! Shared fixtures for the integration tests.

#![allow(dead_code)]

use daglearn::{BayesNet, Cpt, NodeOrdering, OrderedDag, Variables};
use std::path::PathBuf;
use std::process::Command;

/// Three binary nodes in a chain x0 -> x1 -> x2, the network behind the
/// shipped chain fixtures.
pub fn chain_net() -> BayesNet {
    let vars = Variables::binary(3);
    let dag = OrderedDag::new(NodeOrdering::identity(3), vec![vec![], vec![0], vec![1]]).unwrap();
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
    BayesNet::new(vars, dag, cpts).unwrap()
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn daglearn_cmd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_daglearn"))
}
