//! Min-max path primitives over the `(min, max)` semiring.
//!
//! Every output entry is one of the input values, so results can be compared
//! with exact equality.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::network::{Network, Ultrametric};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostRole {
    DirectedChainCost,
    BoundedHopCost,
    Symmetrized,
}

/// A square grid of non-negative costs with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CostGrid {
    n: usize,
    values: Vec<f64>,
    role: CostRole,
}

impl CostGrid {
    pub(crate) fn new(n: usize, values: Vec<f64>, role: CostRole) -> Self {
        debug_assert_eq!(values.len(), n * n);
        CostGrid { n, values, role }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn role(&self) -> CostRole {
        self.role
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values
            .chunks(self.n.max(1))
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `max(g(i,j), g(j,i))` entrywise.
    pub fn max_symmetrized(&self) -> CostGrid {
        let n = self.n;
        let values = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                self.get(i, j).max(self.get(j, i))
            })
            .collect();
        CostGrid::new(n, values, CostRole::Symmetrized)
    }

    /// Attaches labels, producing a network. Fails if any off-diagonal cost is zero.
    pub fn to_network(&self, labels: &[String]) -> Result<Network> {
        Network::new(labels.to_vec(), self.values.clone())
    }
}

/// Below this size the rayon fan-out costs more than it saves.
pub(crate) const PAR_MIN_NODES: usize = 96;

/// In-place minimax closure (Floyd-Warshall with `min`/`max`).
fn minimax_closure(n: usize, d: &mut [f64]) {
    for k in 0..n {
        let row_k: Vec<f64> = d[k * n..(k + 1) * n].to_vec();
        let relax = |row: &mut [f64]| {
            let dik = row[k];
            for (j, v) in row.iter_mut().enumerate() {
                let via = dik.max(row_k[j]);
                if via < *v {
                    *v = via;
                }
            }
        };
        if n >= PAR_MIN_NODES {
            d.par_chunks_mut(n).for_each(relax);
        } else {
            d.chunks_mut(n).for_each(relax);
        }
    }
}

/// Minimum over all chains from `i` to `j` of the largest link dissimilarity.
pub fn directed_minimax(net: &Network) -> CostGrid {
    let n = net.size();
    let mut d = net.values().to_vec();
    minimax_closure(n, &mut d);
    CostGrid::new(n, d, CostRole::DirectedChainCost)
}

/// Minimax cost restricted to chains with at most `max_nodes` nodes
/// (so `max_nodes - 1` links). `max_nodes = 2` returns the input grid.
pub fn bounded_hop_minimax(net: &Network, max_nodes: usize) -> Result<CostGrid> {
    if max_nodes < 2 {
        return Err(Error::InvalidHopBound(max_nodes));
    }
    let n = net.size();
    let a = net.values();
    let mut cur = a.to_vec();
    // Chains longer than n - 1 links never improve on a simple chain.
    let links = (max_nodes - 1).min(n.saturating_sub(1).max(1));
    for _ in 1..links {
        cur = extend_one_link(n, &cur, a);
    }
    Ok(CostGrid::new(n, cur, CostRole::BoundedHopCost))
}

/// `next(i,j) = min_k max(cur(i,k), a(k,j))`; `k = j` keeps `cur(i,j)`.
pub(crate) fn extend_one_link(n: usize, cur: &[f64], a: &[f64]) -> Vec<f64> {
    let mut next = vec![0.0; n * n];
    let fill = |(i, row): (usize, &mut [f64])| {
        for (j, out) in row.iter_mut().enumerate() {
            let mut best = f64::INFINITY;
            for k in 0..n {
                let c = cur[i * n + k].max(a[k * n + j]);
                if c < best {
                    best = c;
                }
            }
            *out = best;
        }
    };
    if n >= PAR_MIN_NODES {
        next.par_chunks_mut(n).enumerate().for_each(fill);
    } else {
        next.chunks_mut(n).enumerate().for_each(fill);
    }
    next
}

/// `max(A(x,x'), A(x',x))` for every pair.
pub fn max_symmetrize(net: &Network) -> Network {
    let n = net.size();
    let values = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            net.get(i, j).max(net.get(j, i))
        })
        .collect();
    Network::new(net.labels().to_vec(), values).expect("max of positive entries stays valid")
}

/// Single linkage: minimax path closure of a symmetric network.
pub fn single_linkage(net: &Network) -> Result<Ultrametric> {
    let n = net.size();
    for i in 0..n {
        for j in i + 1..n {
            if net.get(i, j) != net.get(j, i) {
                return Err(Error::NotSymmetric(i, j));
            }
        }
    }
    let mut d = net.values().to_vec();
    minimax_closure(n, &mut d);
    let closed = Network::new(net.labels().to_vec(), d)?;
    Ok(Ultrametric::from_network_unchecked(closed))
}

/// Single linkage over a symmetric cost grid with labels.
pub fn single_linkage_grid(grid: &CostGrid, labels: &[String]) -> Result<Ultrametric> {
    single_linkage(&grid.to_network(labels)?)
}
