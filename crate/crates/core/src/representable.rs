//! Representable clustering.
//!
//! A representer is a small, possibly partially defined network used as a
//! template for what a cluster looks like. For every pair of nodes the
//! *optimal multiple* is the smallest factor by which a representer must be
//! inflated so that it maps into the network with both nodes in its image
//! without increasing any dissimilarity. Single linkage over the entrywise
//! minimum of those multiples across a family gives the clustering.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::minimax::{extend_one_link, single_linkage_grid, CostGrid, CostRole};
use crate::network::{Network, Ultrametric};

/// Default cap on representer size for exhaustive map enumeration.
pub const DEFAULT_MAX_REPRESENTER_SIZE: usize = 5;

/// Node-map counts at or above this are enumerated in parallel.
const PAR_MIN_MAPS: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: f64,
}

/// A template network whose dissimilarities are defined only on `edges`.
#[derive(Debug, Clone, PartialEq)]
pub struct Representer {
    name: Option<String>,
    k: usize,
    edges: Vec<Edge>,
}

impl Representer {
    pub fn new(k: usize, edges: Vec<Edge>, name: Option<String>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidSize(k));
        }
        let mut seen = HashSet::new();
        for e in &edges {
            if e.src >= k || e.dst >= k {
                return Err(Error::InvalidRepresenter(format!(
                    "edge {}->{} outside 0..{k}",
                    e.src, e.dst
                )));
            }
            if e.src == e.dst {
                return Err(Error::InvalidRepresenter(format!("self-pair at {}", e.src)));
            }
            if !(e.weight > 0.0) || !e.weight.is_finite() {
                return Err(Error::NonPositiveWeight(e.weight));
            }
            if !seen.insert((e.src, e.dst)) {
                return Err(Error::InvalidRepresenter(format!(
                    "edge {}->{} defined twice",
                    e.src, e.dst
                )));
            }
        }
        let r = Representer { name, k, edges };
        if !r.is_weakly_connected() {
            return Err(Error::NotWeaklyConnected);
        }
        Ok(r)
    }

    /// Convenience constructor from `(src, dst, weight)` triples.
    pub fn from_triples(k: usize, triples: &[(usize, usize, f64)]) -> Result<Self> {
        let edges = triples
            .iter()
            .map(|&(src, dst, weight)| Edge { src, dst, weight })
            .collect();
        Representer::new(k, edges, None)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn size(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn separation(&self) -> f64 {
        self.edges
            .iter()
            .map(|e| e.weight)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).fold(0.0, f64::max)
    }

    fn is_weakly_connected(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.k).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.src), find(&mut parent, e.dst));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        (0..self.k).all(|i| find(&mut parent, i) == root)
    }

    /// If this is a directed `k`-cycle `0 -> 1 -> ... -> k-1 -> 0` with one
    /// common weight and nothing else, returns that weight.
    pub fn uniform_cycle_weight(&self) -> Option<f64> {
        if self.edges.len() != self.k {
            return None;
        }
        let w = self.edges[0].weight;
        let all_forward = self
            .edges
            .iter()
            .all(|e| e.dst == (e.src + 1) % self.k && e.weight == w);
        // Duplicates are rejected at construction, so k forward edges cover the cycle.
        all_forward.then_some(w)
    }
}

/// Directed `k`-cycle with `forward` weights on `i -> i+1` and, if given,
/// `backward` weights on `i+1 -> i`. For `k = 2` the two directions are the
/// two forward links and `backward` replaces the weight of `1 -> 0`.
pub fn cycle_representer(k: usize, forward: f64, backward: Option<f64>) -> Result<Representer> {
    if k < 2 {
        return Err(Error::InvalidSize(k));
    }
    let mut edges: Vec<Edge> = (0..k)
        .map(|i| Edge {
            src: i,
            dst: (i + 1) % k,
            weight: forward,
        })
        .collect();
    if let Some(b) = backward {
        if k == 2 {
            edges[1].weight = b;
        } else {
            edges.extend((0..k).map(|i| Edge {
                src: (i + 1) % k,
                dst: i,
                weight: b,
            }));
        }
    }
    let name = match backward {
        Some(b) => format!("cycle{k}_{forward}_{b}"),
        None => format!("cycle{k}_{forward}"),
    };
    Representer::new(k, edges, Some(name))
}

/// A map from representer nodes to network node indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeMap(Vec<usize>);

impl NodeMap {
    pub fn new(assignment: Vec<usize>, network_size: usize) -> Result<Self> {
        if let Some(&bad) = assignment.iter().find(|&&i| i >= network_size) {
            return Err(Error::InvalidNodeMap(format!(
                "index {bad} out of range for {network_size} nodes"
            )));
        }
        Ok(NodeMap(assignment))
    }

    pub fn assignment(&self) -> &[usize] {
        &self.0
    }
}

/// Largest ratio `A(phi z, phi z') / w(z, z')` over defined representer edges.
pub fn expansion_constant(phi: &NodeMap, omega: &Representer, net: &Network) -> Result<f64> {
    if phi.0.len() != omega.k {
        return Err(Error::InvalidNodeMap(format!(
            "map has {} entries, representer has {} nodes",
            phi.0.len(),
            omega.k
        )));
    }
    if let Some(&bad) = phi.0.iter().find(|&&i| i >= net.size()) {
        return Err(Error::InvalidNodeMap(format!("index {bad} out of range")));
    }
    Ok(omega
        .edges
        .iter()
        .map(|e| net.get(phi.0[e.src], phi.0[e.dst]) / e.weight)
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultipleOptions {
    /// Largest representer enumerated exhaustively.
    pub max_representer_size: usize,
}

impl Default for MultipleOptions {
    fn default() -> Self {
        MultipleOptions {
            max_representer_size: DEFAULT_MAX_REPRESENTER_SIZE,
        }
    }
}

/// Optimal multiples `lambda(x, x')` of one representer.
///
/// Uniform directed cycles are evaluated through bounded-hop closed walks in
/// polynomial time and are not subject to the size cap; every other
/// representer is enumerated over all `n^k` node maps.
pub fn optimal_multiples(omega: &Representer, net: &Network) -> Result<CostGrid> {
    optimal_multiples_with(omega, net, &MultipleOptions::default())
}

pub fn optimal_multiples_with(
    omega: &Representer,
    net: &Network,
    opts: &MultipleOptions,
) -> Result<CostGrid> {
    match omega.uniform_cycle_weight() {
        Some(w) => Ok(cycle_multiples(net, omega.k, w)),
        None => optimal_multiples_enumerated(omega, net, opts.max_representer_size),
    }
}

/// Optimal multiples by exhaustive enumeration of node maps.
///
/// Every map is visited once; its expansion constant min-updates every pair
/// of nodes in its image. Work is `O(n^k k^2)`.
pub fn optimal_multiples_enumerated(
    omega: &Representer,
    net: &Network,
    max_size: usize,
) -> Result<CostGrid> {
    let k = omega.k;
    if k > max_size {
        return Err(Error::RepresenterTooLarge { k, cap: max_size });
    }
    let n = net.size();
    // Edges grouped by the later of their two endpoints, so each is scored
    // as soon as both ends are assigned.
    let mut closing: Vec<Vec<Edge>> = vec![Vec::new(); k];
    for e in &omega.edges {
        closing[e.src.max(e.dst)].push(*e);
    }
    let search = MapSearch {
        n,
        k,
        a: net.values(),
        closing: &closing,
    };
    let total = (n as f64).powi(k as i32);
    let grid = if total >= PAR_MIN_MAPS as f64 {
        (0..n)
            .into_par_iter()
            .map(|first| search.run_from(first))
            .reduce(|| vec![f64::INFINITY; n * n], min_merge)
    } else {
        (0..n)
            .map(|first| search.run_from(first))
            .fold(vec![f64::INFINITY; n * n], min_merge)
    };
    let mut grid = grid;
    for i in 0..n {
        grid[i * n + i] = 0.0;
    }
    Ok(CostGrid::new(n, grid, CostRole::Symmetrized))
}

fn min_merge(mut a: Vec<f64>, b: Vec<f64>) -> Vec<f64> {
    for (x, y) in a.iter_mut().zip(b) {
        if y < *x {
            *x = y;
        }
    }
    a
}

struct MapSearch<'a> {
    n: usize,
    k: usize,
    a: &'a [f64],
    closing: &'a [Vec<Edge>],
}

impl MapSearch<'_> {
    fn run_from(&self, first: usize) -> Vec<f64> {
        let mut lambda = vec![f64::INFINITY; self.n * self.n];
        let mut phi = vec![0usize; self.k];
        phi[0] = first;
        let start = self.score(&phi, 0, 0.0);
        self.descend(&mut phi, 1, start, &mut lambda);
        lambda
    }

    fn score(&self, phi: &[usize], z: usize, running: f64) -> f64 {
        self.closing[z].iter().fold(running, |acc, e| {
            acc.max(self.a[phi[e.src] * self.n + phi[e.dst]] / e.weight)
        })
    }

    fn descend(&self, phi: &mut [usize], z: usize, running: f64, lambda: &mut [f64]) {
        if z == self.k {
            let mut image: Vec<usize> = phi.to_vec();
            image.sort_unstable();
            image.dedup();
            for &x in &image {
                for &y in &image {
                    let slot = &mut lambda[x * self.n + y];
                    if running < *slot {
                        *slot = running;
                    }
                }
            }
            return;
        }
        for x in 0..self.n {
            phi[z] = x;
            let next = self.score(phi, z, running);
            self.descend(phi, z + 1, next, lambda);
        }
    }
}

/// Optimal multiples of a uniform `k`-cycle with weight `w`.
///
/// A node map of the cycle is a closed walk of `k` steps in which repeated
/// nodes cost nothing, so `lambda(x, x')` is the best split of `k` steps into
/// a walk `x -> x'` and a walk `x' -> x`, each scored by its largest link.
fn cycle_multiples(net: &Network, k: usize, w: f64) -> CostGrid {
    let n = net.size();
    let a = net.values();
    // hops[h - 1] = minimax cost over walks of at most h links.
    let useful = (k - 1).min(n.saturating_sub(1)).max(1);
    let mut hops = vec![a.to_vec()];
    for _ in 1..useful {
        let next = extend_one_link(n, hops.last().unwrap(), a);
        hops.push(next);
    }
    let h = |links: usize, i: usize, j: usize| hops[links.min(useful) - 1][i * n + j];
    let mut grid = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let best = (1..k)
                .map(|there| h(there, i, j).max(h(k - there, j, i)))
                .fold(f64::INFINITY, f64::min);
            grid[i * n + j] = best / w;
        }
    }
    CostGrid::new(n, grid, CostRole::Symmetrized)
}

/// Specialized optimal multiples for the three-node cycle with unit forward
/// weights and backward weights `c`, in `O(n^3)`.
///
/// `B(i,j) = min_k max(A(i,j), A(j,k), A(k,i), A(j,i)/c, A(k,j)/c, A(i,k)/c)`
/// and the result is `min(B, B^T)`.
pub fn three_cycle_kernel(net: &Network, c: f64) -> Result<CostGrid> {
    if !(c >= 1.0) || !c.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "kernel ratio {c} must be at least 1"
        )));
    }
    let n = net.size();
    let a = |i: usize, j: usize| net.get(i, j);
    let mut b = vec![0.0; n * n];
    b.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, row)| {
        for (j, out) in row.iter_mut().enumerate() {
            let fixed = a(i, j).max(a(j, i) / c);
            *out = (0..n)
                .map(|k| {
                    fixed
                        .max(a(j, k))
                        .max(a(k, i))
                        .max(a(k, j) / c)
                        .max(a(i, k) / c)
                })
                .fold(f64::INFINITY, f64::min);
        }
    });
    let lambda = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            b[i * n + j].min(b[j * n + i])
        })
        .collect();
    Ok(CostGrid::new(n, lambda, CostRole::Symmetrized))
}

/// A validated, finite family of representers.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresenterFamily {
    name: String,
    members: Vec<Representer>,
    sep: f64,
    bound: f64,
    practical: bool,
}

impl RepresenterFamily {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn members(&self) -> &[Representer] {
        &self.members
    }

    /// Smallest defined weight over all members.
    pub fn separation(&self) -> f64 {
        self.sep
    }

    /// Largest defined weight over all members.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn is_practical(&self) -> bool {
        self.practical
    }

    /// Stability constant `1 / sep`.
    pub fn lipschitz_constant(&self) -> f64 {
        1.0 / self.sep
    }

    /// All defined weights equal 1, so optimal multiples involve no rounding.
    pub fn is_unit_weight(&self) -> bool {
        self.members
            .iter()
            .all(|m| m.edges.iter().all(|e| e.weight == 1.0))
    }

    pub fn max_member_size(&self) -> usize {
        self.members.iter().map(|m| m.k).max().unwrap_or(0)
    }

    /// Unit-weight directed cycles of every length in `2..=max_len`.
    pub fn cycles(max_len: usize) -> Result<Self> {
        let members = (2..=max_len)
            .map(|k| cycle_representer(k, 1.0, None))
            .collect::<Result<Vec<_>>>()?;
        Ok(validate_family(members)?.with_name(format!("cycles2..{max_len}")))
    }

    /// Cycle family that reproduces nonreciprocal clustering exactly on
    /// networks with at most `n` nodes.
    pub fn nonreciprocal_for(n: usize) -> Result<Self> {
        RepresenterFamily::cycles((2 * n).max(2))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(parse_family(&text)?.with_name(path.display().to_string()))
    }

    /// Renders in the line-based family file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let name = m.name.clone().unwrap_or_else(|| format!("r{i}"));
            let _ = writeln!(out, "representer {} {}", name, m.k);
            for e in &m.edges {
                let _ = writeln!(out, "edge {} {} {}", e.src, e.dst, e.weight);
            }
        }
        out
    }
}

/// Checks a representer list and derives its separation and bound.
pub fn validate_family(members: Vec<Representer>) -> Result<RepresenterFamily> {
    if members.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let sep = members
        .iter()
        .map(Representer::separation)
        .fold(f64::INFINITY, f64::min);
    let bound = members
        .iter()
        .map(Representer::max_weight)
        .fold(0.0, f64::max);
    let name = members
        .iter()
        .enumerate()
        .map(|(i, m)| m.name.clone().unwrap_or_else(|| format!("r{i}")))
        .collect::<Vec<_>>()
        .join("+");
    Ok(RepresenterFamily {
        name,
        members,
        sep,
        bound,
        practical: sep > 0.0 && sep.is_finite(),
    })
}

fn parse_weight(tok: &str) -> Result<f64> {
    let bad = || Error::Parse(format!("bad weight `{tok}`"));
    match tok.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            Ok(p / q)
        }
        None => tok.parse().map_err(|_| bad()),
    }
}

/// Parses the line-based family format:
///
/// ```text
/// # comment
/// representer omega 3
/// edge 0 1 1
/// edge 1 0 1/3
/// ```
///
/// Members are separated by blank lines or a new `representer` header.
pub fn parse_family(text: &str) -> Result<RepresenterFamily> {
    struct Pending {
        name: String,
        k: usize,
        edges: Vec<Edge>,
    }
    fn finish(p: Option<Pending>, out: &mut Vec<Representer>) -> Result<()> {
        if let Some(p) = p {
            out.push(Representer::new(p.k, p.edges, Some(p.name))?);
        }
        Ok(())
    }
    let mut members = Vec::new();
    let mut current: Option<Pending> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let at = |msg: &str| Error::Parse(format!("line {}: {msg}", lineno + 1));
        if line.is_empty() {
            if raw.trim().is_empty() {
                finish(current.take(), &mut members)?;
            }
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["representer", name, k] => {
                finish(current.take(), &mut members)?;
                let k = k.parse().map_err(|_| at("bad node count"))?;
                current = Some(Pending {
                    name: name.to_string(),
                    k,
                    edges: Vec::new(),
                });
            }
            ["edge", s, d, w] => {
                let p = current
                    .as_mut()
                    .ok_or_else(|| at("edge before representer header"))?;
                let src = s.parse().map_err(|_| at("bad source index"))?;
                let dst = d.parse().map_err(|_| at("bad target index"))?;
                p.edges.push(Edge {
                    src,
                    dst,
                    weight: parse_weight(w)?,
                });
            }
            _ => return Err(at(&format!("unrecognized line `{line}`"))),
        }
    }
    finish(current, &mut members)?;
    validate_family(members)
}

/// Entrywise minimum of the members' optimal multiples.
pub fn family_multiples(family: &RepresenterFamily, net: &Network) -> Result<CostGrid> {
    family_multiples_with(family, net, &MultipleOptions::default())
}

pub fn family_multiples_with(
    family: &RepresenterFamily,
    net: &Network,
    opts: &MultipleOptions,
) -> Result<CostGrid> {
    let n = net.size();
    let mut acc = vec![f64::INFINITY; n * n];
    for m in &family.members {
        let grid = optimal_multiples_with(m, net, opts)?;
        acc = min_merge(acc, grid.values().to_vec());
    }
    Ok(CostGrid::new(n, acc, CostRole::Symmetrized))
}

/// Single linkage over the family's optimal multiples.
pub fn cluster_representable(family: &RepresenterFamily, net: &Network) -> Result<Ultrametric> {
    cluster_representable_with(family, net, &MultipleOptions::default())
}

pub fn cluster_representable_with(
    family: &RepresenterFamily,
    net: &Network,
    opts: &MultipleOptions,
) -> Result<Ultrametric> {
    let lambda = family_multiples_with(family, net, opts)?;
    single_linkage_grid(&lambda, net.labels())
}
