//! Behavioral models of classificatory and comparative sorites.
//!
//! A system maps stimuli to responses. Stimuli carry Fréchet vicinities
//! (the pre-topological notion of "close in some sense"). From these the
//! crate decides tolerance and V-connectedness exactly on finite spaces,
//! extracts witness chains, estimates threshold boundaries by oracle
//! bisection, reduces higher-order probability mixtures, and evaluates
//! Łukasiewicz connectives.
//!
//! Modules:
//! - [`pretopology`]: finite Fréchet spaces, covers, vicinity chains.
//! - [`system`]: response systems, tolerance, connectedness, soritical chains.
//! - [`threshold`]: deterministic threshold rules on `[0,1]` and bisection.
//! - [`probabilistic`]: response probabilities, mixtures, observation logs.
//! - [`fuzzy`]: Łukasiewicz connectives and the truth-value mismatch report.
//! - [`comparative`]: same/different matchers and comparative sequences.
//! - [`scenario`]: JSON scenario ingestion and canonical reports.
//!
//! ```
//! use sorites_core::pretopology::FrechetSpace;
//! use sorites_core::system::{assert_no_sorites, ResponseSystem, Verdict};
//!
//! # fn main() -> sorites_core::Result<()> {
//! let space = FrechetSpace::neighbor_grid(5);
//! let sys = ResponseSystem::from_indices(space, vec!["r0".into(), "r1".into()], vec![0, 0, 0, 1, 1])?;
//! match assert_no_sorites(&sys, 1 << 20)? {
//!     Verdict::ToleranceFails { points, .. } => assert_eq!(points, vec![2, 3]),
//!     other => panic!("unexpected {other:?}"),
//! }
//! # Ok(())
//! # }
//! ```

pub mod comparative;
pub mod error;
pub mod fuzzy;
pub mod pretopology;
pub mod probabilistic;
pub mod scenario;
pub mod system;
pub mod threshold;

pub use error::{Result, SoritesError};
