//! Modal analysis of a plate coupled to an electrical network with
//! fractional damping and rotational inertia.
//!
//! The generator decouples into one 4×4 block per eigenvalue σ of the
//! underlying positive operator. Everything here works block by block:
//! construction and spectra ([`block`]), the resolvent along the imaginary
//! axis ([`resolvent`]), growth exponents and the (θ, β) regime map
//! ([`regularity`]), and explicit lower-bound sequences ([`witness`]).

// `!(x > tol)` is used on purpose so NaN takes the failure branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod block;
pub mod decay;
pub mod error;
pub mod linalg;
pub mod params;
pub mod regularity;
pub mod resolvent;
pub mod spectrum;
pub mod witness;

pub use block::{build_mode_block, ModeBlock, StateVec};
pub use error::{Error, Result};
pub use params::SystemParams;
pub use regularity::{
    classify_point, region_sweep, ClassifySettings, RegionReport, SpectrumPolicy, Verdict,
};
pub use resolvent::{resolvent_curve, resolvent_norm, ModeSource, ResolventCurve, Spacing};
pub use spectrum::{ModeSpectrum, SigmaBand};
pub use witness::{witness_sequence, Normalization, WitnessCase, WitnessPoint};
