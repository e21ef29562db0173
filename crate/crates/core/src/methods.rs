//! The clustering methods: reciprocal, nonreciprocal, semi-reciprocal,
//! grafting, and representable (delegated to [`crate::representable`]).

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::minimax::{bounded_hop_minimax, directed_minimax, max_symmetrize, single_linkage};
use crate::network::{Network, Ultrametric};
use crate::representable::{cluster_representable, RepresenterFamily};

/// Which method to run, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodSpec {
    Reciprocal,
    Nonreciprocal,
    /// Hop bound counted in chain nodes, endpoints included.
    SemiReciprocal(usize),
    Grafting(f64),
    Representable(Arc<RepresenterFamily>),
}

impl MethodSpec {
    pub fn semi_reciprocal(t: usize) -> Result<Self> {
        if t < 2 {
            return Err(Error::InvalidHopBound(t));
        }
        Ok(MethodSpec::SemiReciprocal(t))
    }

    pub fn grafting(beta: f64) -> Result<Self> {
        if !(beta > 0.0) || beta.is_nan() {
            return Err(Error::InvalidMethod(format!(
                "grafting cut {beta} is not positive"
            )));
        }
        Ok(MethodSpec::Grafting(beta))
    }

    pub fn representable(family: RepresenterFamily) -> Self {
        MethodSpec::Representable(Arc::new(family))
    }

    /// Parses `reciprocal`, `nonreciprocal`, `semi:<t>`, `graft:<beta>` or
    /// `representable:<family-file>`; the file is read relative to the
    /// working directory.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (head, arg) = match text.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (text, None),
        };
        match (head, arg) {
            ("reciprocal", None) => Ok(MethodSpec::Reciprocal),
            ("nonreciprocal", None) => Ok(MethodSpec::Nonreciprocal),
            ("semi", Some(t)) => {
                let t: usize = t
                    .parse()
                    .map_err(|_| Error::InvalidMethod(format!("bad hop bound `{t}`")))?;
                MethodSpec::semi_reciprocal(t)
            }
            ("graft", Some(b)) => {
                let b: f64 = b
                    .parse()
                    .map_err(|_| Error::InvalidMethod(format!("bad grafting cut `{b}`")))?;
                MethodSpec::grafting(b)
            }
            ("representable", Some(path)) => {
                let family = RepresenterFamily::from_file(Path::new(path))?;
                Ok(MethodSpec::representable(family))
            }
            _ => Err(Error::InvalidMethod(format!(
                "unrecognized method `{text}`"
            ))),
        }
    }

    /// True when the method only composes `min`/`max` of input values, so
    /// outputs are exact and may be compared with `==`.
    pub fn is_division_free(&self) -> bool {
        match self {
            MethodSpec::Representable(f) => f.is_unit_weight(),
            _ => true,
        }
    }

    pub fn run(&self, net: &Network) -> Result<Ultrametric> {
        run_method(self, net)
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodSpec::Reciprocal => write!(f, "reciprocal"),
            MethodSpec::Nonreciprocal => write!(f, "nonreciprocal"),
            MethodSpec::SemiReciprocal(t) => write!(f, "semi:{t}"),
            MethodSpec::Grafting(b) => write!(f, "graft:{b}"),
            MethodSpec::Representable(fam) => write!(f, "representable:{}", fam.name()),
        }
    }
}

/// Single linkage of the max-symmetrized network.
pub fn reciprocal(net: &Network) -> Ultrametric {
    single_linkage(&max_symmetrize(net)).expect("max-symmetrized network is symmetric")
}

/// `max` of the two directed minimax chain costs.
pub fn nonreciprocal(net: &Network) -> Ultrametric {
    let directed = directed_minimax(net).max_symmetrized();
    let out = directed
        .to_network(net.labels())
        .expect("minimax of positive weights stays positive");
    Ultrametric::from_network_unchecked(out)
}

/// Reciprocal clustering over best directed chains of at most `max_nodes` nodes.
pub fn semi_reciprocal(net: &Network, max_nodes: usize) -> Result<Ultrametric> {
    let sym = bounded_hop_minimax(net, max_nodes)?.max_symmetrized();
    single_linkage(&sym.to_network(net.labels())?)
}

/// Nonreciprocal values where the reciprocal value is at most `beta`,
/// reciprocal values elsewhere.
pub fn grafting(net: &Network, beta: f64) -> Result<Ultrametric> {
    if !(beta > 0.0) || beta.is_nan() {
        return Err(Error::InvalidMethod(format!(
            "grafting cut {beta} is not positive"
        )));
    }
    let r = reciprocal(net);
    let nr = nonreciprocal(net);
    let n = net.size();
    let values = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            if r.get(i, j) <= beta {
                nr.get(i, j)
            } else {
                r.get(i, j)
            }
        })
        .collect();
    Ultrametric::new(net.labels().to_vec(), values)
}

pub fn run_method(spec: &MethodSpec, net: &Network) -> Result<Ultrametric> {
    match spec {
        MethodSpec::Reciprocal => Ok(reciprocal(net)),
        MethodSpec::Nonreciprocal => Ok(nonreciprocal(net)),
        MethodSpec::SemiReciprocal(t) => semi_reciprocal(net, *t),
        MethodSpec::Grafting(beta) => grafting(net, *beta),
        MethodSpec::Representable(family) => cluster_representable(family, net),
    }
}
