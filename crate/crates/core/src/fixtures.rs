//! Small reference networks used by tests, audits and the command-line tool.

use crate::network::Network;

/// Three-node directed cycle: weight 1 along `x1 -> x2 -> x3 -> x1`,
/// weight 2 against it. Grafting with cut 3 fails to scale linearly here.
pub fn cycle_network() -> Network {
    Network::unlabeled(vec![
        vec![0.0, 1.0, 2.0],
        vec![2.0, 0.0, 1.0],
        vec![1.0, 2.0, 0.0],
    ])
    .expect("valid fixture")
}

/// Four-node network on which semi-reciprocal clustering with `t = 3` is not
/// excisive: `x1, x3` merge at 1 through `x2` or `x4`, but merge at 2 once
/// excised. The pair `x2, x4` is completed with weight 2 in both directions.
pub fn excision_counterexample() -> Network {
    //        x1   x2   x3   x4
    Network::unlabeled(vec![
        vec![0.0, 1.0, 2.0, 2.0],
        vec![2.0, 0.0, 1.0, 2.0],
        vec![2.0, 2.0, 0.0, 1.0],
        vec![1.0, 2.0, 2.0, 0.0],
    ])
    .expect("valid fixture")
}

/// Two-node network with `A(p, q) = alpha`, `A(q, p) = beta`.
pub fn two_node(alpha: f64, beta: f64) -> crate::Result<Network> {
    Network::from_rows(
        vec!["p".into(), "q".into()],
        vec![vec![0.0, alpha], vec![beta, 0.0]],
    )
}
