//! Falsification audits for clustering methods.
//!
//! Each check runs a method on concrete inputs and either reports that the
//! property held on every probe, or returns a self-contained [`Witness`]
//! that reproduces the violation.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixtures::two_node;
use crate::methods::{nonreciprocal, reciprocal, MethodSpec};
use crate::metric::check_stability;
use crate::network::{Network, Ultrametric};

/// Relative tolerance used whenever a method divides.
pub const REL_TOL: f64 = 1e-9;

/// Default scale factors for the scale-preservation audit.
pub const DEFAULT_ALPHAS: [f64; 3] = [0.5, 2.0, 10.0];

/// Default finite weight set for random probes.
pub const DEFAULT_WEIGHTS: [f64; 5] = [1.0, 2.0, 3.0, 5.0, 8.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Excisive,
    Scale,
    Idempotent,
    Value,
    Transform,
    Sandwich,
    Stability,
}

impl Property {
    pub const ALL: [Property; 7] = [
        Property::Excisive,
        Property::Scale,
        Property::Idempotent,
        Property::Value,
        Property::Transform,
        Property::Sandwich,
        Property::Stability,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Property::Excisive => "excisive",
            Property::Scale => "scale",
            Property::Idempotent => "idempotent",
            Property::Value => "value",
            Property::Transform => "transform",
            Property::Sandwich => "sandwich",
            Property::Stability => "stability",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Property {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::UnknownProperty(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessDetail {
    Excision {
        resolution: f64,
        block: Vec<String>,
        pair: (String, String),
        clustered: f64,
        excised: f64,
    },
    Scale {
        alpha: f64,
        pair: (String, String),
        scaled: f64,
        expected: f64,
    },
    Idempotency {
        pair: (String, String),
        first: f64,
        second: f64,
    },
    Value {
        alpha: f64,
        beta: f64,
        merged: f64,
    },
    Transformation {
        target: Network,
        map: Vec<usize>,
        pair: (String, String),
        source_value: f64,
        target_value: f64,
    },
    Sandwich {
        pair: (String, String),
        lower: f64,
        value: f64,
        upper: f64,
    },
    Stability {
        other: Network,
        input_distance: f64,
        output_distance: f64,
        bound: f64,
    },
}

/// Everything needed to rerun a failed probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub method: String,
    pub network: Network,
    #[serde(flatten)]
    pub detail: WitnessDetail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub property: Property,
    pub verdict: Verdict,
    pub probes: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

impl AuditReport {
    fn holds(property: Property, probes: usize) -> Self {
        AuditReport {
            property,
            verdict: Verdict::Holds,
            probes,
            witness: None,
        }
    }

    fn violated(property: Property, probes: usize, witness: Witness) -> Self {
        AuditReport {
            property,
            verdict: Verdict::Violated,
            probes,
            witness: Some(witness),
        }
    }

    pub fn is_holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    /// Folds a sequence of reports for one property: probe counts add up and
    /// the first violation wins.
    pub fn merge(property: Property, reports: impl IntoIterator<Item = AuditReport>) -> Self {
        let mut out = AuditReport::holds(property, 0);
        for r in reports {
            out.probes += r.probes;
            if out.witness.is_none() && r.witness.is_some() {
                out.verdict = Verdict::Violated;
                out.witness = r.witness;
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Equality used by audits: exact for division-free methods, relative
/// tolerance otherwise.
pub fn values_match(a: f64, b: f64, exact: bool) -> bool {
    a == b || (!exact && (a - b).abs() <= REL_TOL * a.abs().max(b.abs()))
}

fn at_most(a: f64, b: f64, exact: bool) -> bool {
    a <= b || values_match(a, b, exact)
}

fn pair(labels: &[String], i: usize, j: usize) -> (String, String) {
    (labels[i].clone(), labels[j].clone())
}

fn witness(method: &MethodSpec, net: &Network, detail: WitnessDetail) -> Witness {
    Witness {
        method: method.to_string(),
        network: net.clone(),
        detail,
    }
}

/// Re-clusters every multi-node block of every output partition and compares
/// it with the corresponding branch.
pub fn check_excisiveness(method: &MethodSpec, net: &Network) -> Result<AuditReport> {
    let exact = method.is_division_free();
    let u = method.run(net)?;
    let mut seen = HashSet::new();
    let mut probes = 0;
    for delta in u.resolutions() {
        for block in u.partition_at(delta).blocks() {
            if block.len() < 2 || !seen.insert(block.clone()) {
                continue;
            }
            probes += 1;
            let excised = method.run(&net.restrict_indices(block))?;
            for (a, &i) in block.iter().enumerate() {
                for (b, &j) in block.iter().enumerate().skip(a + 1) {
                    if !values_match(u.get(i, j), excised.get(a, b), exact) {
                        let detail = WitnessDetail::Excision {
                            resolution: delta,
                            block: block.iter().map(|&x| net.labels()[x].clone()).collect(),
                            pair: pair(net.labels(), i, j),
                            clustered: u.get(i, j),
                            excised: excised.get(a, b),
                        };
                        return Ok(AuditReport::violated(
                            Property::Excisive,
                            probes,
                            witness(method, net, detail),
                        ));
                    }
                }
            }
        }
    }
    Ok(AuditReport::holds(Property::Excisive, probes))
}

/// Compares `method(alpha * N)` with `alpha * method(N)` for every alpha.
pub fn check_scale_preservation(
    method: &MethodSpec,
    net: &Network,
    alphas: &[f64],
) -> Result<AuditReport> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("no scale factors given".into()));
    }
    let exact = method.is_division_free();
    let base = method.run(net)?;
    for (probe, &alpha) in alphas.iter().enumerate() {
        let scaled = method.run(&net.scale(alpha)?)?;
        if let Some((i, j)) = first_mismatch(&scaled, |i, j| alpha * base.get(i, j), exact) {
            let detail = WitnessDetail::Scale {
                alpha,
                pair: pair(net.labels(), i, j),
                scaled: scaled.get(i, j),
                expected: alpha * base.get(i, j),
            };
            return Ok(AuditReport::violated(
                Property::Scale,
                probe + 1,
                witness(method, net, detail),
            ));
        }
    }
    Ok(AuditReport::holds(Property::Scale, alphas.len()))
}

fn first_mismatch(
    u: &Ultrametric,
    expected: impl Fn(usize, usize) -> f64,
    exact: bool,
) -> Option<(usize, usize)> {
    let n = u.size();
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .find(|&(i, j)| !values_match(u.get(i, j), expected(i, j), exact))
}

/// Applies the method to its own output.
pub fn check_idempotency(method: &MethodSpec, net: &Network) -> Result<AuditReport> {
    let exact = method.is_division_free();
    let first = method.run(net)?;
    let second = method.run(first.as_network())?;
    if let Some((i, j)) = first_mismatch(&second, |i, j| first.get(i, j), exact) {
        let detail = WitnessDetail::Idempotency {
            pair: pair(net.labels(), i, j),
            first: first.get(i, j),
            second: second.get(i, j),
        };
        return Ok(AuditReport::violated(
            Property::Idempotent,
            1,
            witness(method, net, detail),
        ));
    }
    Ok(AuditReport::holds(Property::Idempotent, 1))
}

/// Two-node networks must merge at `max(alpha, beta)`.
pub fn check_value_axiom(method: &MethodSpec, pairs: &[(f64, f64)]) -> Result<AuditReport> {
    let exact = method.is_division_free();
    for (probe, &(alpha, beta)) in pairs.iter().enumerate() {
        let net = two_node(alpha, beta)?;
        let merged = method.run(&net)?.get(0, 1);
        if !values_match(merged, alpha.max(beta), exact) {
            let detail = WitnessDetail::Value {
                alpha,
                beta,
                merged,
            };
            return Ok(AuditReport::violated(
                Property::Value,
                probe + 1,
                witness(method, &net, detail),
            ));
        }
    }
    Ok(AuditReport::holds(Property::Value, pairs.len()))
}

/// Verifies `phi` is dissimilarity reducing, then that the outputs satisfy
/// `u_X(x, x') >= u_Y(phi x, phi x')`.
pub fn check_transformation_axiom(
    method: &MethodSpec,
    source: &Network,
    target: &Network,
    phi: &[usize],
) -> Result<AuditReport> {
    if phi.len() != source.size() || phi.iter().any(|&y| y >= target.size()) {
        return Err(Error::InvalidNodeMap(format!(
            "map must send {} source nodes into {} target nodes",
            source.size(),
            target.size()
        )));
    }
    let n = source.size();
    for i in 0..n {
        for j in 0..n {
            if source.get(i, j) < target.get(phi[i], phi[j]) {
                return Err(Error::NotDissimilarityReducing(i, j));
            }
        }
    }
    let exact = method.is_division_free();
    let ux = method.run(source)?;
    let uy = method.run(target)?;
    for i in 0..n {
        for j in i + 1..n {
            let (sv, tv) = (ux.get(i, j), uy.get(phi[i], phi[j]));
            if !at_most(tv, sv, exact) {
                let detail = WitnessDetail::Transformation {
                    target: target.clone(),
                    map: phi.to_vec(),
                    pair: pair(source.labels(), i, j),
                    source_value: sv,
                    target_value: tv,
                };
                return Ok(AuditReport::violated(
                    Property::Transform,
                    1,
                    witness(method, source, detail),
                ));
            }
        }
    }
    Ok(AuditReport::holds(Property::Transform, 1))
}

/// Entrywise `nonreciprocal <= method <= reciprocal`.
pub fn check_sandwich(method: &MethodSpec, net: &Network) -> Result<AuditReport> {
    let exact = method.is_division_free();
    let u = method.run(net)?;
    let lo = nonreciprocal(net);
    let hi = reciprocal(net);
    let n = net.size();
    for i in 0..n {
        for j in i + 1..n {
            let (l, v, h) = (lo.get(i, j), u.get(i, j), hi.get(i, j));
            if !at_most(l, v, exact) || !at_most(v, h, exact) {
                let detail = WitnessDetail::Sandwich {
                    pair: pair(net.labels(), i, j),
                    lower: l,
                    value: v,
                    upper: h,
                };
                return Ok(AuditReport::violated(
                    Property::Sandwich,
                    1,
                    witness(method, net, detail),
                ));
            }
        }
    }
    Ok(AuditReport::holds(Property::Sandwich, 1))
}

impl Witness {
    /// Reruns the failed comparison from scratch; true if it fails again.
    pub fn reproduces(&self, method: &MethodSpec) -> Result<bool> {
        let exact = method.is_division_free();
        let net = &self.network;
        let idx = |l: &str, n: &Network| {
            n.index_of(l)
                .ok_or_else(|| Error::UnknownLabel(l.to_string()))
        };
        match &self.detail {
            WitnessDetail::Excision { block, pair, .. } => {
                let u = method.run(net)?;
                let sub = net.restrict(block)?;
                let us = method.run(&sub)?;
                let full = u.get(idx(&pair.0, net)?, idx(&pair.1, net)?);
                let excised = us.get(idx(&pair.0, &sub)?, idx(&pair.1, &sub)?);
                Ok(!values_match(full, excised, exact))
            }
            WitnessDetail::Scale { alpha, pair, .. } => {
                let (i, j) = (idx(&pair.0, net)?, idx(&pair.1, net)?);
                let base = method.run(net)?.get(i, j);
                let scaled = method.run(&net.scale(*alpha)?)?.get(i, j);
                Ok(!values_match(scaled, alpha * base, exact))
            }
            WitnessDetail::Idempotency { pair, .. } => {
                let (i, j) = (idx(&pair.0, net)?, idx(&pair.1, net)?);
                let first = method.run(net)?;
                let second = method.run(first.as_network())?;
                Ok(!values_match(first.get(i, j), second.get(i, j), exact))
            }
            WitnessDetail::Value { alpha, beta, .. } => {
                let merged = method.run(&two_node(*alpha, *beta)?)?.get(0, 1);
                Ok(!values_match(merged, alpha.max(*beta), exact))
            }
            WitnessDetail::Transformation {
                target, map, pair, ..
            } => {
                let (i, j) = (idx(&pair.0, net)?, idx(&pair.1, net)?);
                let sv = method.run(net)?.get(i, j);
                let tv = method.run(target)?.get(map[i], map[j]);
                Ok(!at_most(tv, sv, exact))
            }
            WitnessDetail::Sandwich { pair, .. } => {
                let (i, j) = (idx(&pair.0, net)?, idx(&pair.1, net)?);
                let v = method.run(net)?.get(i, j);
                let (l, h) = (nonreciprocal(net).get(i, j), reciprocal(net).get(i, j));
                Ok(!at_most(l, v, exact) || !at_most(v, h, exact))
            }
            WitnessDetail::Stability { other, .. } => match method {
                MethodSpec::Representable(family) => {
                    Ok(
                        !check_stability(family, net, other, crate::metric::DEFAULT_EXACT_CAP)?
                            .is_holds(),
                    )
                }
                _ => Err(Error::InvalidMethod(
                    "stability is only defined for representable methods".into(),
                )),
            },
        }
    }
}

/// Seeded generator of random probe inputs. Weights come from a finite set so
/// every min/max comparison stays exact.
#[derive(Debug, Clone)]
pub struct ProbeGenerator {
    rng: ChaCha8Rng,
    weights: Vec<f64>,
}

impl ProbeGenerator {
    pub fn new(seed: u64) -> Self {
        ProbeGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            weights: DEFAULT_WEIGHTS.to_vec(),
        }
    }

    pub fn with_weights(seed: u64, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument(
                "probe weights must be positive and finite".into(),
            ));
        }
        Ok(ProbeGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            weights,
        })
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn weight(&mut self) -> f64 {
        *self
            .weights
            .choose(&mut self.rng)
            .expect("non-empty weight set")
    }

    fn labels(prefix: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }

    /// Random asymmetric network on `n` nodes labelled `x1..xn`.
    pub fn network(&mut self, n: usize) -> Network {
        let values = (0..n * n)
            .map(|k| if k / n == k % n { 0.0 } else { self.weight() })
            .collect();
        Network::new(Self::labels("x", n), values).expect("generated network is valid")
    }

    /// Random network with a size drawn uniformly from `lo..=hi`.
    pub fn network_in(&mut self, lo: usize, hi: usize) -> Network {
        let n = self.rng.random_range(lo..=hi);
        self.network(n)
    }

    pub fn symmetric_network(&mut self, n: usize) -> Network {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let w = self.weight();
                values[i * n + j] = w;
                values[j * n + i] = w;
            }
        }
        Network::new(Self::labels("x", n), values).expect("generated network is valid")
    }

    pub fn value_pairs(&mut self, count: usize) -> Vec<(f64, f64)> {
        (0..count).map(|_| (self.weight(), self.weight())).collect()
    }

    /// A random map from `source` into a new `target_size`-node network whose
    /// dissimilarities are scaled down from the smallest preimage value, so
    /// the map is dissimilarity reducing by construction.
    pub fn contraction(&mut self, source: &Network, target_size: usize) -> (Network, Vec<usize>) {
        let m = target_size.max(1);
        let n = source.size();
        let phi: Vec<usize> = (0..n).map(|_| self.rng.random_range(0..m)).collect();
        let mut bound = vec![f64::INFINITY; m * m];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let slot = &mut bound[phi[i] * m + phi[j]];
                    *slot = slot.min(source.get(i, j));
                }
            }
        }
        let shrink = [1.0, 0.5, 0.25];
        let mut values = vec![0.0; m * m];
        for y in 0..m {
            for y2 in 0..m {
                if y == y2 {
                    continue;
                }
                let b = bound[y * m + y2];
                values[y * m + y2] = if b.is_finite() {
                    b * *shrink.choose(&mut self.rng).unwrap()
                } else {
                    self.weight()
                };
            }
        }
        let target = Network::new(Self::labels("y", m), values).expect("positive by construction");
        (target, phi)
    }

    /// Copy of `net` with roughly half of the entries redrawn.
    pub fn perturb(&mut self, net: &Network) -> Network {
        let n = net.size();
        let values = (0..n * n)
            .map(|k| {
                let v = net.values()[k];
                if k / n != k % n && self.rng.random_bool(0.5) {
                    self.weight()
                } else {
                    v
                }
            })
            .collect();
        Network::new(net.labels().to_vec(), values).expect("positive by construction")
    }
}

/// Options for [`run_audit`].
#[derive(Debug, Clone)]
pub struct AuditOptions {
    pub seed: u64,
    /// Number of random probes for `value`, `transform` and `stability`.
    pub probes: usize,
    pub alphas: Vec<f64>,
    /// Exact-distance cap for `stability`.
    pub cap: usize,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            seed: 0,
            probes: 25,
            alphas: DEFAULT_ALPHAS.to_vec(),
            cap: crate::metric::DEFAULT_EXACT_CAP,
        }
    }
}

/// Runs one named audit against an input network, generating any auxiliary
/// probes from the seed.
pub fn run_audit(
    property: Property,
    method: &MethodSpec,
    net: &Network,
    opts: &AuditOptions,
) -> Result<AuditReport> {
    let mut gen = ProbeGenerator::new(opts.seed);
    match property {
        Property::Excisive => check_excisiveness(method, net),
        Property::Scale => check_scale_preservation(method, net, &opts.alphas),
        Property::Idempotent => check_idempotency(method, net),
        Property::Value => check_value_axiom(method, &gen.value_pairs(opts.probes)),
        Property::Transform => {
            let mut reports = Vec::with_capacity(opts.probes);
            for _ in 0..opts.probes {
                let m = gen.rng().random_range(1..=net.size());
                let (target, phi) = gen.contraction(net, m);
                let r = check_transformation_axiom(method, net, &target, &phi)?;
                let stop = !r.is_holds();
                reports.push(r);
                if stop {
                    break;
                }
            }
            Ok(AuditReport::merge(Property::Transform, reports))
        }
        Property::Sandwich => check_sandwich(method, net),
        Property::Stability => {
            let MethodSpec::Representable(family) = method else {
                return Err(Error::InvalidMethod(
                    "stability is only defined for representable methods".into(),
                ));
            };
            let mut reports = Vec::with_capacity(opts.probes);
            for _ in 0..opts.probes {
                let other = gen.perturb(net);
                let mut r = check_stability(family, net, &other, opts.cap)?;
                if let Some(w) = r.witness.as_mut() {
                    w.method = method.to_string();
                }
                let stop = !r.is_holds();
                reports.push(r);
                if stop {
                    break;
                }
            }
            Ok(AuditReport::merge(Property::Stability, reports))
        }
    }
}
