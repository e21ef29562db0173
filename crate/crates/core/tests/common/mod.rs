//! Brute-force reference implementations shared by the integration tests.
//! None of these reuse the library's algorithms; they only read networks.
#![allow(dead_code)]

use netclust::Network;

/// Minimum over chains `i = c0, .., c_l = j` with at most `max_nodes` nodes
/// of the largest link `A(c_r, c_{r+1})`, by depth-first enumeration of
/// simple chains. Revisiting a node never lowers a chain's cost, so simple
/// chains suffice.
pub fn chain_cost(net: &Network, i: usize, j: usize, max_nodes: usize) -> f64 {
    chain_cost_by(net.size(), i, j, max_nodes, &|a, b| net.get(a, b))
}

/// As [`chain_cost`], with links in both directions at once.
pub fn bidirectional_chain_cost(net: &Network, i: usize, j: usize) -> f64 {
    let n = net.size();
    chain_cost_by(n, i, j, n, &|a, b| net.get(a, b).max(net.get(b, a)))
}

pub fn chain_cost_by(
    n: usize,
    i: usize,
    j: usize,
    max_nodes: usize,
    link: &dyn Fn(usize, usize) -> f64,
) -> f64 {
    if i == j {
        return 0.0;
    }
    #[allow(clippy::too_many_arguments)]
    fn walk(
        n: usize,
        at: usize,
        target: usize,
        nodes: usize,
        max_nodes: usize,
        cost: f64,
        visited: &mut Vec<bool>,
        link: &dyn Fn(usize, usize) -> f64,
        best: &mut f64,
    ) {
        if nodes >= max_nodes {
            return;
        }
        for next in 0..n {
            if visited[next] {
                continue;
            }
            let c = cost.max(link(at, next));
            if c >= *best {
                continue;
            }
            if next == target {
                *best = c;
                continue;
            }
            visited[next] = true;
            walk(
                n,
                next,
                target,
                nodes + 1,
                max_nodes,
                c,
                visited,
                link,
                best,
            );
            visited[next] = false;
        }
    }
    let mut visited = vec![false; n];
    visited[i] = true;
    let mut best = f64::INFINITY;
    walk(n, i, j, 1, max_nodes, 0.0, &mut visited, link, &mut best);
    best
}

pub fn all_pairs(n: usize, f: impl Fn(usize, usize) -> f64) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect()
}

/// Single linkage via a minimum spanning tree (Prim) and the largest edge
/// on the tree path between each pair.
pub fn mst_single_linkage(n: usize, w: &dyn Fn(usize, usize) -> f64) -> Vec<Vec<f64>> {
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    best[0] = 0.0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .unwrap();
        in_tree[v] = true;
        if parent[v] != usize::MAX {
            adj[v].push((parent[v], best[v]));
            adj[parent[v]].push((v, best[v]));
        }
        for u in 0..n {
            if !in_tree[u] && w(v, u) < best[u] {
                best[u] = w(v, u);
                parent[u] = v;
            }
        }
    }
    let mut out = vec![vec![0.0; n]; n];
    for (s, row) in out.iter_mut().enumerate() {
        let mut stack = vec![(s, usize::MAX, 0.0f64)];
        while let Some((v, from, m)) = stack.pop() {
            row[v] = m;
            for &(u, c) in &adj[v] {
                if u != from {
                    stack.push((u, v, m.max(c)));
                }
            }
        }
    }
    out
}

pub fn reciprocal_oracle(net: &Network) -> Vec<Vec<f64>> {
    all_pairs(net.size(), |i, j| bidirectional_chain_cost(net, i, j))
}

pub fn nonreciprocal_oracle(net: &Network) -> Vec<Vec<f64>> {
    let n = net.size();
    all_pairs(n, |i, j| {
        chain_cost(net, i, j, n).max(chain_cost(net, j, i, n))
    })
}

pub fn semi_reciprocal_oracle(net: &Network, t: usize) -> Vec<Vec<f64>> {
    let n = net.size();
    let sym = all_pairs(n, |i, j| {
        chain_cost(net, i, j, t).max(chain_cost(net, j, i, t))
    });
    mst_single_linkage(n, &|i, j| sym[i][j])
}

/// A representer as `(k, [(src, dst, weight)])`.
pub type Template = (usize, Vec<(usize, usize, f64)>);

/// Optimal multiples by trying every map from the template's nodes into the
/// network.
pub fn multiples_oracle(t: &Template, net: &Network) -> Vec<Vec<f64>> {
    let (k, edges) = t;
    let n = net.size();
    let mut lam = vec![vec![f64::INFINITY; n]; n];
    let total = n.pow(*k as u32);
    let mut phi = vec![0usize; *k];
    for code in 0..total {
        let mut c = code;
        for slot in phi.iter_mut() {
            *slot = c % n;
            c /= n;
        }
        let l = edges
            .iter()
            .map(|&(a, b, w)| {
                let d = if phi[a] == phi[b] {
                    0.0
                } else {
                    net.get(phi[a], phi[b])
                };
                d / w
            })
            .fold(0.0, f64::max);
        for &x in &phi {
            for &y in &phi {
                if l < lam[x][y] {
                    lam[x][y] = l;
                }
            }
        }
    }
    for (i, row) in lam.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    lam
}

pub fn representable_oracle(family: &[Template], net: &Network) -> Vec<Vec<f64>> {
    let n = net.size();
    let mut lam = vec![vec![f64::INFINITY; n]; n];
    for t in family {
        let m = multiples_oracle(t, net);
        for i in 0..n {
            for j in 0..n {
                lam[i][j] = lam[i][j].min(m[i][j]);
            }
        }
    }
    mst_single_linkage(n, &|i, j| lam[i][j])
}

pub fn omega_r() -> Template {
    (2, vec![(0, 1, 1.0), (1, 0, 1.0)])
}

pub fn three_cycle_third() -> Template {
    (
        3,
        vec![
            (0, 1, 1.0),
            (1, 2, 1.0),
            (2, 0, 1.0),
            (1, 0, 3.0),
            (2, 1, 3.0),
            (0, 2, 3.0),
        ],
    )
}

pub fn directed_cycle(k: usize) -> Template {
    (k, (0..k).map(|a| (a, (a + 1) % k, 1.0)).collect())
}

/// Half the smallest distortion over every relation in `X x Y` that covers
/// both sides.
pub fn distance_oracle(x: &Network, y: &Network) -> f64 {
    let (n, m) = (x.size(), y.size());
    let cells: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..m).map(move |b| (a, b))).collect();
    assert!(cells.len() <= 20, "oracle is exponential in |X||Y|");
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << cells.len()) {
        let r: Vec<(usize, usize)> = (0..cells.len())
            .filter(|&c| mask >> c & 1 == 1)
            .map(|c| cells[c])
            .collect();
        let covers_x = (0..n).all(|a| r.iter().any(|p| p.0 == a));
        let covers_y = (0..m).all(|b| r.iter().any(|p| p.1 == b));
        if !covers_x || !covers_y {
            continue;
        }
        let mut d: f64 = 0.0;
        for &(a, b) in &r {
            for &(a2, b2) in &r {
                d = d.max((x.get(a, a2) - y.get(b, b2)).abs());
            }
        }
        best = best.min(d);
    }
    best / 2.0
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs())
}

pub fn rows_close(a: &[Vec<f64>], b: &[Vec<f64>], rel: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(r, s)| r.len() == s.len() && r.iter().zip(s).all(|(&p, &q)| close(p, q, rel)))
}

/// Networks with continuous random weights in `[0.1, 10)`; complements the
/// tie-heavy discrete weights of the library's probe generator.
pub fn continuous_network(rng: &mut impl rand::Rng, n: usize) -> Network {
    let values = (0..n * n)
        .map(|k| {
            if k / n == k % n {
                0.0
            } else {
                rng.random_range(0.1..10.0)
            }
        })
        .collect();
    let labels = (1..=n).map(|i| format!("x{i}")).collect();
    Network::new(labels, values).unwrap()
}
