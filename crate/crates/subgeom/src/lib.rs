//! Numerical differential geometry for Riemannian submersions from
//! almost contact metric manifolds.
//!
//! The crate models manifolds as single coordinate charts with smooth
//! metric-component functions, differentiates closed-form data exactly
//! through forward-mode dual numbers, and verifies geometric identities
//! as named residual checks over deterministically sampled points:
//!
//! - [`geometry`]: charts, metrics, Christoffel symbols, covariant
//!   derivatives, Lie brackets, metric Gram-Schmidt, divergence, gradient.
//! - [`contact`]: almost contact metric structures (φ, ξ, η, g), the
//!   Kenmotsu condition, and construction of Kenmotsu manifolds as
//!   exponentially warped products over Kaehler data.
//! - [`submersion`]: smooth maps, vertical/horizontal splitting,
//!   Riemannian and horizontally conformal predicates, anti-invariance.
//! - [`oneill`]: the fundamental tensors T and A, their identities, mean
//!   curvature, the second fundamental form of a map, tension field.
//! - [`warped`]: warped products g₁ ⊕ f²g₂, the warped-connection
//!   identities, compositions with fiber submersions.
//! - [`suite`]: named verification procedures and the aggregated report.
//! - [`builtins`]: the worked example structures and maps.
//!
//! # Quick start
//!
//! Verify the structure identities of the built-in 5-dimensional example
//! and split a tangent space along one of its submersions:
//!
//! ```
//! use subgeom::builtins::{example1_structure, example2_map};
//! use subgeom::config::Config;
//! use subgeom::contact::verify_almost_contact;
//! use subgeom::submersion::split;
//!
//! let cfg = Config { samples: 20, ..Config::default() };
//! let s = example1_structure();
//! assert!(verify_almost_contact(&s, &cfg).passed());
//!
//! let f = example2_map(&s.manifold);
//! let p = s.manifold.point(&[0.1, -0.2, 0.3, 0.0, 0.25]).unwrap();
//! let sp = split(&f, &p, &cfg).unwrap();
//! assert_eq!(sp.vertical_dim(), 2);
//! assert_eq!(sp.horizontal_dim(), 3);
//! ```
//!
//! Run the full report on a built-in configuration:
//!
//! ```
//! use subgeom::builtins::{example1_structure, example2_map};
//! use subgeom::config::Config;
//! use subgeom::suite::{run_all, RunOptions};
//!
//! let cfg = Config { samples: 5, ..Config::default() };
//! let s = example1_structure();
//! let f = example2_map(&s.manifold);
//! let report = run_all("example1", "example2", Some(&s), Some(&f), &cfg,
//!                      &RunOptions::default()).unwrap();
//! assert!(report.passed());
//! ```

pub mod builtins;
pub mod check;
pub mod cli;
pub mod config;
pub mod contact;
pub mod dual;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod oneill;
pub mod submersion;
pub mod suite;
pub mod warped;

pub use check::{CheckRecord, Verdict};
pub use config::Config;
pub use error::{GeomError, Result};
pub use suite::{RunOptions, VerificationReport};
