//! Shared fixtures for the unit tests.

use crate::model::{BayesNet, Cpt, Dataset, NodeOrdering, OrderedDag, Variables};

/// Three binary nodes in a chain x0 -> x1 -> x2 with fixed, non-degenerate
/// conditionals.
pub(crate) fn chain_net() -> BayesNet {
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

/// Four rows over two binary columns where the second column copies the
/// first: two (0,0) rows and two (1,1) rows.
pub(crate) fn copy_dataset() -> Dataset {
    Dataset::new(
        Variables::binary(2),
        vec![vec![0, 0], vec![0, 0], vec![1, 1], vec![1, 1]],
    )
    .unwrap()
}
