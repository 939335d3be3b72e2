//! Contextual transformation groups and generalized interval systems over `Z_m`.
//!
//! This library models pitch-class segments mod `m`, the affine maps and voice
//! permutations that act on them, finite permutation groups with dual-group
//! computation, generalized interval systems with morphisms, the contextual
//! (neo-Riemannian) groups attached to a segment's `T/I`-orbit, sub dual
//! systems over the octatonic collections, simply transitive covers,
//! retrograde-refined serial systems, and a declarative network format with
//! verification and DOT export. The `gis` binary exposes all of it on the
//! command line.
//!
//! ```
//! use gis_core::contextual::{contextual_group, ti_orbit};
//! use gis_core::groupcore::{dual_group, is_simply_transitive};
//! use gis_core::pcmath::{Modulus, PcSegment};
//!
//! let major = PcSegment::parse("0,4,7", Modulus::TWELVE)?;
//! let orbit = ti_orbit(&major)?;
//! assert_eq!(orbit.len(), 24);
//!
//! // The P/L/R group of consonant triads is the dual of the T/I action.
//! let plr = contextual_group(&orbit);
//! assert!(is_simply_transitive(&plr));
//! assert_eq!(dual_group(&orbit.ti_perm_group())?, plr);
//!
//! // R sends the C major triad to its relative minor.
//! assert_eq!(orbit.op_r(&major)?, PcSegment::parse("4,0,9", Modulus::TWELVE)?);
//! # Ok::<(), gis_core::Error>(())
//! ```

pub mod cli;
pub mod contextual;
pub mod covers;
pub mod error;
pub mod gis;
pub mod groupcore;
pub mod netio;
pub mod pcmath;
pub mod serial;
pub mod subdual;

pub use error::{Error, Result};
