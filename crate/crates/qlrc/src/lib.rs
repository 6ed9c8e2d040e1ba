//! Quantum locally recoverable codes with intersecting recovery sets.
//!
//! The crate builds and certifies CSS codes whose qubits each carry several
//! overlapping recovery sets:
//!
//! - [`gf2`]: bit-packed GF(2) linear algebra (rank, kernels, row spaces,
//!   kernel complements, tensor embeddings).
//! - [`tanner`]: bipartite Tanner graphs, the graph product, and the
//!   exact-(r, t, s) condition checker.
//! - [`bounds`]: exact-rational Singleton-like upper bounds on the code
//!   dimension and sweep tables comparing them.
//! - [`recovery`]: recovery-set families, U-sets under random orderings,
//!   recoverable sequences, and disjoint correctable set construction.
//! - [`codes`]: classical codes from parity checks, CSS construction,
//!   product-code certificates, distance oracles, and the Pauli-frame
//!   erasure-recovery simulation.
//! - [`cli`] and [`battery`]: the command-line front end and the bundled
//!   verification battery.
//!
//! The `examples/` directory has one runnable program per capability; start
//! with `cargo run --example quantum_hamming`.
//!
//! # Quick start
//!
//! ```
//! use qlrc::codes::{css_from_self_orthogonal, css_min_distance, hamming_7_4_parity};
//! use qlrc::tanner::BipartiteGraph;
//!
//! // The bundled 7x7 matrix: every row and column has weight 4.
//! let h = hamming_7_4_parity();
//! let graph = BipartiteGraph::from_matrix(&h);
//! assert!(graph.check_exact(3, 4, 1).is_exact);
//!
//! // Each qubit gets four overlapping recovery sets read off the graph.
//! let family = graph.recovery_family().unwrap();
//! assert_eq!(family.sets(0).len(), 4);
//!
//! // H is self-orthogonal, so it doubles as both CSS check matrices.
//! let css = css_from_self_orthogonal(&h, Some(family)).unwrap();
//! assert_eq!((css.n(), css.k()), (7, 1));
//! assert_eq!(css_min_distance(&css, 22).unwrap(), 3);
//! ```

pub mod battery;
pub mod bounds;
pub mod cli;
pub mod codes;
pub mod gf2;
pub mod pcm;
pub mod recovery;
pub mod tanner;

pub use bounds::{BoundKind, BoundParams, BoundTable, SweepVariable};
pub use codes::{CssCode, DistanceInfo, LinearCode, ProductCertificate};
pub use gf2::{BitMatrix, BitVec, SubspaceBasis};
pub use recovery::{RecoverableSequence, RecoveryFamily, SetConstructionVariant};
pub use tanner::{BipartiteGraph, ExactnessReport};
