//! Networks, ultrametrics, dendrograms and partitions.
//!
//! A [`Network`] is a finite set of labelled nodes with a (possibly
//! asymmetric) dissimilarity that is zero on the diagonal and strictly
//! positive elsewhere. An [`Ultrametric`] is a symmetric network that also
//! satisfies the strong triangle inequality, and is interchangeable with a
//! [`Dendrogram`].

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Read access to a square, labelled dissimilarity grid.
pub trait Dissimilarity {
    fn len(&self) -> usize;
    fn at(&self, i: usize, j: usize) -> f64;
    fn labels(&self) -> &[String];

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn check_labels(labels: &[String]) -> Result<()> {
    if labels.is_empty() {
        return Err(Error::EmptyNetwork);
    }
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

fn check_grid(n: usize, values: &[f64]) -> Result<()> {
    if values.len() != n * n {
        return Err(Error::ShapeMismatch(format!(
            "{} labels but {} entries",
            n,
            values.len()
        )));
    }
    for i in 0..n {
        for j in 0..n {
            let v = values[i * n + j];
            if !v.is_finite() {
                return Err(Error::NonFinite(i, j));
            }
            if i == j {
                if v != 0.0 {
                    return Err(Error::NonZeroDiagonal(i, v));
                }
            } else if v <= 0.0 {
                return Err(Error::NonPositiveOffDiagonal(i, j, v));
            }
        }
    }
    Ok(())
}

/// A validated dissimilarity network `(X, A_X)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNetwork", into = "RawNetwork")]
pub struct Network {
    labels: Vec<String>,
    dissim: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawNetwork {
    labels: Vec<String>,
    dissim: Vec<Vec<f64>>,
}

impl TryFrom<RawNetwork> for Network {
    type Error = Error;
    fn try_from(raw: RawNetwork) -> Result<Self> {
        Network::from_rows(raw.labels, raw.dissim)
    }
}

impl From<Network> for RawNetwork {
    fn from(n: Network) -> Self {
        RawNetwork {
            dissim: n.rows(),
            labels: n.labels,
        }
    }
}

impl Network {
    /// Builds a network from labels and a row-major `n*n` grid.
    pub fn new(labels: Vec<String>, dissim: Vec<f64>) -> Result<Self> {
        check_labels(&labels)?;
        check_grid(labels.len(), &dissim)?;
        Ok(Network { labels, dissim })
    }

    /// Builds a network from labels and nested rows.
    pub fn from_rows(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::ShapeMismatch(format!(
                "expected a {n}x{n} grid for {n} labels"
            )));
        }
        Network::new(labels, rows.into_iter().flatten().collect())
    }

    /// Builds a network labelled `x1, x2, ...`.
    pub fn unlabeled(rows: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (1..=rows.len()).map(|i| format!("x{i}")).collect();
        Network::from_rows(labels, rows)
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dissim[i * self.size() + j]
    }

    /// Row-major view of the grid.
    pub fn values(&self) -> &[f64] {
        &self.dissim
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.dissim
            .chunks(self.size())
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn is_symmetric(&self) -> bool {
        self.asymmetry().is_none()
    }

    fn asymmetry(&self) -> Option<(usize, usize)> {
        let n = self.size();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .find(|&(i, j)| self.get(i, j) != self.get(j, i))
    }

    /// The multiple `alpha * N`.
    pub fn scale(&self, alpha: f64) -> Result<Network> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::NonPositiveScale(alpha));
        }
        let dissim: Vec<f64> = self.dissim.iter().map(|v| v * alpha).collect();
        Network::new(self.labels.clone(), dissim)
    }

    /// Induced subnetwork on the given labels, in this network's label order.
    pub fn restrict<S: AsRef<str>>(&self, subset: &[S]) -> Result<Network> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut wanted = HashSet::new();
        for s in subset {
            let s = s.as_ref();
            if self.index_of(s).is_none() {
                return Err(Error::UnknownLabel(s.to_string()));
            }
            wanted.insert(s);
        }
        let idx: Vec<usize> = (0..self.size())
            .filter(|&i| wanted.contains(self.labels[i].as_str()))
            .collect();
        Ok(self.restrict_indices(&idx))
    }

    /// Induced subnetwork on node indices; order follows `idx`.
    pub fn restrict_indices(&self, idx: &[usize]) -> Network {
        let labels = idx.iter().map(|&i| self.labels[i].clone()).collect();
        let dissim = idx
            .iter()
            .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        Network { labels, dissim }
    }

    /// Minimum off-diagonal dissimilarity.
    pub fn separation(&self) -> Result<f64> {
        let n = self.size();
        if n < 2 {
            return Err(Error::SingletonNetwork);
        }
        Ok((0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .fold(f64::INFINITY, f64::min))
    }

    /// Largest off-diagonal dissimilarity (0 for one node).
    pub fn max_value(&self) -> f64 {
        self.dissim.iter().copied().fold(0.0, f64::max)
    }

    /// Same grid under new labels.
    pub fn relabel(&self, labels: Vec<String>) -> Result<Network> {
        Network::new(labels, self.dissim.clone())
    }

    /// Reorders nodes: node `i` of the result is node `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Network> {
        let mut seen = vec![false; self.size()];
        if perm.len() != self.size() {
            return Err(Error::ShapeMismatch("permutation length".into()));
        }
        for &p in perm {
            if p >= self.size() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
        }
        Ok(self.restrict_indices(perm))
    }
}

impl Dissimilarity for Network {
    fn len(&self) -> usize {
        self.size()
    }
    fn at(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
    fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// A finite ultrametric space: the canonical output of every clustering method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNetwork", into = "RawNetwork")]
pub struct Ultrametric {
    inner: Network,
}

impl TryFrom<RawNetwork> for Ultrametric {
    type Error = Error;
    fn try_from(raw: RawNetwork) -> Result<Self> {
        Ultrametric::from_network(Network::try_from(raw)?)
    }
}

impl From<Ultrametric> for RawNetwork {
    fn from(u: Ultrametric) -> Self {
        u.inner.into()
    }
}

impl Ultrametric {
    pub fn new(labels: Vec<String>, dist: Vec<f64>) -> Result<Self> {
        Ultrametric::from_network(Network::new(labels, dist)?)
    }

    pub fn from_rows(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        Ultrametric::from_network(Network::from_rows(labels, rows)?)
    }

    /// Validates symmetry and the strong triangle inequality exactly.
    pub fn from_network(net: Network) -> Result<Self> {
        if let Some((i, j)) = net.asymmetry() {
            return Err(Error::NotSymmetric(i, j));
        }
        let n = net.size();
        for i in 0..n {
            for j in i + 1..n {
                let d = net.get(i, j);
                for k in 0..n {
                    if d > net.get(i, k).max(net.get(k, j)) {
                        return Err(Error::NotUltrametric(i, j, k));
                    }
                }
            }
        }
        Ok(Ultrametric { inner: net })
    }

    pub(crate) fn from_network_unchecked(net: Network) -> Self {
        debug_assert!(Ultrametric::from_network(net.clone()).is_ok());
        Ultrametric { inner: net }
    }

    pub fn size(&self) -> usize {
        self.inner.size()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner.get(i, j)
    }

    pub fn labels(&self) -> &[String] {
        &self.inner.labels
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.rows()
    }

    pub fn as_network(&self) -> &Network {
        &self.inner
    }

    pub fn into_network(self) -> Network {
        self.inner
    }

    /// Ultrametric restricted to the given indices (still an ultrametric).
    pub fn restrict_indices(&self, idx: &[usize]) -> Ultrametric {
        Ultrametric {
            inner: self.inner.restrict_indices(idx),
        }
    }

    pub fn scale(&self, alpha: f64) -> Result<Ultrametric> {
        Ok(Ultrametric {
            inner: self.inner.scale(alpha)?,
        })
    }

    /// Distinct positive values in increasing order.
    pub fn resolutions(&self) -> Vec<f64> {
        let mut vals: Vec<f64> = self
            .inner
            .dissim
            .iter()
            .copied()
            .filter(|&v| v > 0.0)
            .collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        vals
    }

    /// Blocks of the equivalence relation `u <= delta`.
    pub fn partition_at(&self, delta: f64) -> Partition {
        let n = self.size();
        let mut assigned = vec![false; n];
        let mut blocks = Vec::new();
        for i in 0..n {
            if assigned[i] {
                continue;
            }
            let block: Vec<usize> = (i..n)
                .filter(|&j| !assigned[j] && self.get(i, j) <= delta)
                .collect();
            for &j in &block {
                assigned[j] = true;
            }
            blocks.push(block);
        }
        Partition { blocks }
    }

    pub fn to_dendrogram(&self) -> Dendrogram {
        let merges = self
            .resolutions()
            .into_iter()
            .map(|r| Merge {
                resolution: r,
                partition: self.partition_at(r),
            })
            .collect();
        Dendrogram {
            labels: self.labels().to_vec(),
            merges,
        }
    }
}

impl Dissimilarity for Ultrametric {
    fn len(&self) -> usize {
        self.size()
    }
    fn at(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
    }
    fn labels(&self) -> &[String] {
        &self.inner.labels
    }
}

/// Disjoint, covering blocks of node indices. Blocks are sorted internally
/// and ordered by their smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Validates and canonicalizes a set of blocks over `0..n`.
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::InvalidDendrogram("empty block".into()));
            }
            b.sort_unstable();
            for &i in b.iter() {
                if i >= n || std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidDendrogram(format!(
                        "node {i} is out of range or in two blocks"
                    )));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidDendrogram(
                "blocks do not cover all nodes".into(),
            ));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(Partition { blocks })
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            blocks: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Blocks translated into labels.
    pub fn labeled(&self, labels: &[String]) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&i| labels[i].clone()).collect())
            .collect()
    }

    /// Block index of every node.
    pub fn block_of(&self) -> Vec<usize> {
        let n = self.blocks.iter().map(Vec::len).sum();
        let mut out = vec![0; n];
        for (bi, b) in self.blocks.iter().enumerate() {
            for &i in b {
                out[i] = bi;
            }
        }
        out
    }

    /// True if every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        let owner = coarser.block_of();
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&i| owner[i] == owner[b[0]]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Merge {
    pub resolution: f64,
    pub partition: Partition,
}

/// Nested partitions indexed by resolution. Resolution 0 is implicitly the
/// all-singletons partition; the last merge joins every node.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    labels: Vec<String>,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn new(labels: Vec<String>, merges: Vec<Merge>) -> Result<Self> {
        check_labels(&labels)?;
        let n = labels.len();
        let mut prev = Partition::singletons(n);
        let mut prev_res = 0.0;
        for m in &merges {
            if !(m.resolution > prev_res) || !m.resolution.is_finite() {
                return Err(Error::InvalidDendrogram(format!(
                    "resolution {} does not strictly increase",
                    m.resolution
                )));
            }
            let p = Partition::new(n, m.partition.blocks.clone())?;
            if !prev.refines(&p) || p.len() >= prev.len() {
                return Err(Error::InvalidDendrogram(format!(
                    "partition at {} does not strictly coarsen the previous one",
                    m.resolution
                )));
            }
            prev = p;
            prev_res = m.resolution;
        }
        if prev.len() != 1 {
            return Err(Error::InvalidDendrogram(
                "final partition is not a single block".into(),
            ));
        }
        Ok(Dendrogram { labels, merges })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// `u(x, x')` is the smallest resolution at which both share a block.
    pub fn to_ultrametric(&self) -> Ultrametric {
        let n = self.labels.len();
        let mut dist = vec![f64::NAN; n * n];
        for i in 0..n {
            dist[i * n + i] = 0.0;
        }
        for m in &self.merges {
            for b in m.partition.blocks() {
                for &i in b {
                    for &j in b {
                        if dist[i * n + j].is_nan() {
                            dist[i * n + j] = m.resolution;
                        }
                    }
                }
            }
        }
        Ultrametric::from_network_unchecked(Network {
            labels: self.labels.clone(),
            dissim: dist,
        })
    }

    /// Newick rendering of the merge tree. Branch lengths are differences of
    /// merge resolutions, so every leaf sits at depth equal to the root height.
    pub fn to_newick(&self) -> String {
        let n = self.labels.len();
        // Each current block is a rendered subtree with its height.
        let mut subtree: HashMap<usize, (String, f64)> = (0..n)
            .map(|i| (i, (newick_label(&self.labels[i]), 0.0)))
            .collect();
        let mut current = Partition::singletons(n);
        for m in &self.merges {
            let owner = m.partition.block_of();
            let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
            for b in current.blocks() {
                groups.entry(owner[b[0]]).or_default().push(b[0]);
            }
            let mut next = HashMap::new();
            for (_, children) in groups {
                let rep = *children.iter().min().unwrap();
                if children.len() == 1 {
                    next.insert(rep, subtree.remove(&rep).unwrap());
                    continue;
                }
                let parts: Vec<String> = children
                    .iter()
                    .map(|c| {
                        let (s, h) = subtree.remove(c).unwrap();
                        format!("{}:{}", s, format_sig(m.resolution - h))
                    })
                    .collect();
                next.insert(rep, (format!("({})", parts.join(",")), m.resolution));
            }
            subtree = next;
            current = m.partition.clone();
        }
        let (root, _) = subtree.remove(&0).unwrap();
        format!("{root};")
    }

    /// The partition in force at `delta`.
    pub fn partition_at(&self, delta: f64) -> Partition {
        self.merges
            .iter()
            .take_while(|m| m.resolution <= delta)
            .last()
            .map(|m| m.partition.clone())
            .unwrap_or_else(|| Partition::singletons(self.labels.len()))
    }
}

fn newick_label(l: &str) -> String {
    if l.chars().any(|c| "()[]':;, \t".contains(c)) {
        format!("'{}'", l.replace('\'', "''"))
    } else {
        l.to_string()
    }
}

/// Formats with nine significant digits, trimming trailing zeros.
pub fn format_sig(x: f64) -> String {
    let rounded: f64 = format!("{x:.8e}").parse().unwrap_or(x);
    format!("{rounded}")
}

#[derive(Serialize, Deserialize)]
struct MergeJson {
    resolution: f64,
    partition: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct DendrogramJson {
    labels: Vec<String>,
    merges: Vec<MergeJson>,
}

impl Serialize for Dendrogram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DendrogramJson {
            labels: self.labels.clone(),
            merges: self
                .merges
                .iter()
                .map(|m| MergeJson {
                    resolution: m.resolution,
                    partition: m.partition.labeled(&self.labels),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dendrogram {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = DendrogramJson::deserialize(d)?;
        let index: HashMap<&str, usize> = raw
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let mut merges = Vec::with_capacity(raw.merges.len());
        for m in &raw.merges {
            let mut blocks = Vec::new();
            for b in &m.partition {
                let mut block = Vec::new();
                for l in b {
                    let i = index
                        .get(l.as_str())
                        .ok_or_else(|| D::Error::custom(format!("unknown label `{l}`")))?;
                    block.push(*i);
                }
                blocks.push(block);
            }
            let partition = Partition::new(raw.labels.len(), blocks).map_err(D::Error::custom)?;
            merges.push(Merge {
                resolution: m.resolution,
                partition,
            });
        }
        Dendrogram::new(raw.labels, merges).map_err(D::Error::custom)
    }
}

/// Labels of a subset, as a sorted set (used for comparisons in tests and audits).
pub fn label_set(labels: &[String], idx: &[usize]) -> BTreeSet<String> {
    idx.iter().map(|&i| labels[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("n{i}")).collect()
    }

    #[test]
    fn validate_accepts_and_rejects() {
        assert!(Network::from_rows(labels(1), vec![vec![0.0]]).is_ok());
        assert!(Network::from_rows(labels(2), vec![vec![0.0, 2.0], vec![5.0, 0.0]]).is_ok());
        assert_eq!(
            Network::from_rows(labels(2), vec![vec![0.0, 0.0], vec![5.0, 0.0]]),
            Err(Error::NonPositiveOffDiagonal(0, 1, 0.0))
        );
        assert_eq!(
            Network::from_rows(labels(2), vec![vec![1.0, 2.0], vec![5.0, 0.0]]),
            Err(Error::NonZeroDiagonal(0, 1.0))
        );
        assert_eq!(
            Network::from_rows(labels(2), vec![vec![0.0, f64::NAN], vec![5.0, 0.0]]),
            Err(Error::NonFinite(0, 1))
        );
        assert_eq!(
            Network::from_rows(
                vec!["a".into(), "a".into()],
                vec![vec![0.0, 1.0], vec![1.0, 0.0]]
            ),
            Err(Error::DuplicateLabel("a".into()))
        );
        assert!(matches!(
            Network::from_rows(labels(2), vec![vec![0.0, 1.0]]),
            Err(Error::ShapeMismatch(_))
        ));
        assert_eq!(Network::new(vec![], vec![]), Err(Error::EmptyNetwork));
    }

    #[test]
    fn scale_and_separation() {
        let n = Network::from_rows(labels(2), vec![vec![0.0, 2.0], vec![5.0, 0.0]]).unwrap();
        assert_eq!(n.scale(1.0).unwrap(), n);
        assert_eq!(
            n.scale(2.0).unwrap().rows(),
            vec![vec![0.0, 4.0], vec![10.0, 0.0]]
        );
        assert_eq!(n.scale(0.0), Err(Error::NonPositiveScale(0.0)));
        assert_eq!(n.scale(-1.0), Err(Error::NonPositiveScale(-1.0)));
        assert_eq!(n.separation(), Ok(2.0));
        assert_eq!(n.scale(3.0).unwrap().separation(), Ok(6.0));
        let one = Network::from_rows(labels(1), vec![vec![0.0]]).unwrap();
        assert_eq!(one.separation(), Err(Error::SingletonNetwork));
    }

    #[test]
    fn restrict_cases() {
        let n = Network::unlabeled(vec![
            vec![0.0, 1.0, 2.0],
            vec![3.0, 0.0, 4.0],
            vec![5.0, 6.0, 0.0],
        ])
        .unwrap();
        assert_eq!(n.restrict(&["x1", "x2", "x3"]).unwrap(), n);
        // Order is inherited from the network, not from the request.
        let sub = n.restrict(&["x3", "x1"]).unwrap();
        assert_eq!(sub.labels(), &["x1".to_string(), "x3".to_string()]);
        assert_eq!(sub.rows(), vec![vec![0.0, 2.0], vec![5.0, 0.0]]);
        assert_eq!(n.restrict(&["x2"]).unwrap().rows(), vec![vec![0.0]]);
        assert_eq!(n.restrict::<&str>(&[]), Err(Error::EmptySubset));
        assert_eq!(n.restrict(&["zz"]), Err(Error::UnknownLabel("zz".into())));
    }

    #[test]
    fn dendrogram_to_ultrametric_cases() {
        let d = Dendrogram::new(
            vec!["a".into(), "b".into()],
            vec![Merge {
                resolution: 3.0,
                partition: Partition::new(2, vec![vec![0, 1]]).unwrap(),
            }],
        )
        .unwrap();
        assert_eq!(d.to_ultrametric().get(0, 1), 3.0);

        let single = Dendrogram::new(vec!["a".into()], vec![]).unwrap();
        assert_eq!(single.to_ultrametric().rows(), vec![vec![0.0]]);

        let d = Dendrogram::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                Merge {
                    resolution: 1.0,
                    partition: Partition::new(3, vec![vec![0, 1], vec![2]]).unwrap(),
                },
                Merge {
                    resolution: 2.0,
                    partition: Partition::new(3, vec![vec![0, 1, 2]]).unwrap(),
                },
            ],
        )
        .unwrap();
        let u = d.to_ultrametric();
        assert_eq!(u.get(0, 1), 1.0);
        assert_eq!(u.get(0, 2), 2.0);
        assert_eq!(u.get(1, 2), 2.0);
        assert_eq!(u.to_dendrogram(), d);
    }

    #[test]
    fn dendrogram_rejects_bad_sequences() {
        let p = |blocks: Vec<Vec<usize>>| Partition::new(3, blocks).unwrap();
        let labels = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let not_increasing = vec![
            Merge {
                resolution: 2.0,
                partition: p(vec![vec![0, 1], vec![2]]),
            },
            Merge {
                resolution: 2.0,
                partition: p(vec![vec![0, 1, 2]]),
            },
        ];
        assert!(Dendrogram::new(labels.clone(), not_increasing).is_err());
        let not_nested = vec![
            Merge {
                resolution: 1.0,
                partition: p(vec![vec![0, 1], vec![2]]),
            },
            Merge {
                resolution: 2.0,
                partition: p(vec![vec![0], vec![1, 2]]),
            },
            Merge {
                resolution: 3.0,
                partition: p(vec![vec![0, 1, 2]]),
            },
        ];
        assert!(Dendrogram::new(labels.clone(), not_nested).is_err());
        let unfinished = vec![Merge {
            resolution: 1.0,
            partition: p(vec![vec![0, 1], vec![2]]),
        }];
        assert!(Dendrogram::new(labels, unfinished).is_err());
    }

    #[test]
    fn ultrametric_validation() {
        let l = labels(3);
        assert!(Ultrametric::from_rows(
            l.clone(),
            vec![
                vec![0.0, 1.0, 2.0],
                vec![1.0, 0.0, 2.0],
                vec![2.0, 2.0, 0.0]
            ]
        )
        .is_ok());
        assert_eq!(
            Ultrametric::from_rows(
                l.clone(),
                vec![
                    vec![0.0, 1.0, 3.0],
                    vec![1.0, 0.0, 2.0],
                    vec![3.0, 2.0, 0.0]
                ]
            ),
            Err(Error::NotUltrametric(0, 2, 1))
        );
        assert_eq!(
            Ultrametric::from_rows(
                l,
                vec![
                    vec![0.0, 1.0, 2.0],
                    vec![1.5, 0.0, 2.0],
                    vec![2.0, 2.0, 0.0]
                ]
            ),
            Err(Error::NotSymmetric(0, 1))
        );
    }

    #[test]
    fn partition_boundaries() {
        let u = Ultrametric::from_rows(
            labels(3),
            vec![
                vec![0.0, 1.0, 2.0],
                vec![1.0, 0.0, 2.0],
                vec![2.0, 2.0, 0.0],
            ],
        )
        .unwrap();
        assert_eq!(u.partition_at(0.0), Partition::singletons(3));
        assert_eq!(u.partition_at(5.0).len(), 1);
        assert_eq!(u.partition_at(1.5).blocks(), &[vec![0, 1], vec![2]]);
        let d = u.to_dendrogram();
        assert_eq!(d.partition_at(1.5), u.partition_at(1.5));
        assert_eq!(d.partition_at(0.5), Partition::singletons(3));
    }

    #[test]
    fn newick_export() {
        let u = Ultrametric::from_rows(
            vec!["a".into(), "b".into(), "c d".into()],
            vec![
                vec![0.0, 1.0, 2.0],
                vec![1.0, 0.0, 2.0],
                vec![2.0, 2.0, 0.0],
            ],
        )
        .unwrap();
        assert_eq!(u.to_dendrogram().to_newick(), "((a:1,b:1):1,'c d':2);");
        let one = Ultrametric::from_rows(vec!["a".into()], vec![vec![0.0]]).unwrap();
        assert_eq!(one.to_dendrogram().to_newick(), "a;");
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333");
        assert_eq!(format_sig(4.0), "4");
        assert_eq!(format_sig(123456789012.0), "123456789000");
    }

    #[test]
    fn json_round_trip() {
        let u = Ultrametric::from_rows(
            labels(3),
            vec![
                vec![0.0, 1.0, 2.0],
                vec![1.0, 0.0, 2.0],
                vec![2.0, 2.0, 0.0],
            ],
        )
        .unwrap();
        let d = u.to_dendrogram();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(
            s,
            r#"{"labels":["n0","n1","n2"],"merges":[{"resolution":1.0,"partition":[["n0","n1"],["n2"]]},{"resolution":2.0,"partition":[["n0","n1","n2"]]}]}"#
        );
        let back: Dendrogram = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        let bad = r#"{"labels":["a","b"],"merges":[{"resolution":1.0,"partition":[["a"],["b"]]}]}"#;
        assert!(serde_json::from_str::<Dendrogram>(bad).is_err());
    }
}
