//! Friendship-paradox analytics for directed graphs.
//!
//! A link `u -> v` means `u` is a *friend* of `v` and `v` *follows* `u`:
//! information flows along the link. Out-degree counts followers and
//! in-degree counts friends.
//!
//! The crate covers
//!
//! * [`graph`]: an immutable CSR directed graph, edge-list and attribute
//!   ingestion, degree moments and the all-nonzero-degree core;
//! * [`sampling`]: random node / friend / follower samplers over seeded,
//!   reproducible random streams;
//! * [`paradox`]: the four directed friendship-paradox gaps and per-degree
//!   paradox curves;
//! * [`perception`]: global and local perception bias of binary attributes;
//! * [`polling`]: intent, node-perception and follower-perception polling,
//!   with exact and Monte-Carlo evaluation;
//! * [`spectral`]: the degree-discounted bibliographic coupling operator,
//!   its second eigenvalue and the follower-polling variance bound;
//! * [`synth`]: configuration-model graphs and planted attributes.
//!
//! ```
//! use dirparadox::graph::DirectedGraph;
//! use dirparadox::paradox::paradox_gaps;
//!
//! let g = DirectedGraph::from_labeled_edges(&[("a", "b"), ("a", "c")]);
//! let report = paradox_gaps(&g).unwrap();
//! assert!((report.out_friend.closed_form - 4.0 / 3.0).abs() < 1e-12);
//! ```

pub mod error;
pub mod graph;
pub mod paradox;
pub mod perception;
pub mod polling;
pub mod sampling;
pub mod spectral;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{Attribute, AttributeSet, DegreeSummary, DirectedGraph};

// The guide's chapters are compiled as doc-tests so their snippets stay in
// sync with the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/paradox.md")]
    mod paradox {}
    #[doc = include_str!("../../../book/src/perception.md")]
    mod perception {}
    #[doc = include_str!("../../../book/src/polling.md")]
    mod polling {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/synthetic.md")]
    mod synthetic {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
