//! Hierarchical clustering of directed, weighted networks.
//!
//! The crate clusters asymmetric dissimilarity networks into ultrametrics
//! (equivalently, dendrograms) with a family of admissible methods:
//!
//! * [`methods::reciprocal`] and [`methods::nonreciprocal`], the extremes of
//!   every admissible method;
//! * [`methods::semi_reciprocal`] and [`methods::grafting`], admissible
//!   methods that are respectively not excisive and not scale preserving;
//! * representable methods ([`representable::cluster_representable`]),
//!   generated by families of template networks and factoring through single
//!   linkage.
//!
//! [`properties`] audits any method for excisiveness, linear scale
//! preservation, idempotency and the two admissibility axioms, and
//! [`metric`] computes the network distance used to certify stability.
//!
//! ```
//! use netclust::{fixtures, methods};
//!
//! let net = fixtures::cycle_network();
//! let u = methods::nonreciprocal(&net);
//! assert_eq!(u.get(0, 1), 1.0);
//! assert_eq!(methods::reciprocal(&net).get(0, 1), 2.0);
//! ```

// `!(x > 0.0)` is used deliberately: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fixtures;
pub mod io;
pub mod methods;
pub mod metric;
pub mod minimax;
pub mod network;
pub mod properties;
pub mod representable;

pub use error::{Error, Result};
pub use methods::{run_method, MethodSpec};
pub use network::{Dendrogram, Dissimilarity, Network, Partition, Ultrametric};
pub use properties::{AuditReport, Property, Verdict};
pub use representable::{Representer, RepresenterFamily};
