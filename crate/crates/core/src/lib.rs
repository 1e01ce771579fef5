//! Numerical laboratory for the Cahn–Hilliard equation on surfaces with
//! conical tips.
//!
//! The crate covers rotationally symmetric model surfaces and their graded
//! radial meshes ([`geometry`]), fields in an angular Fourier basis
//! ([`field`]), discrete cone operators ([`operators`]), weighted norms
//! ([`spaces`]), exact indicial-root bookkeeping ([`indicial`]), the
//! energy-stable semiflow ([`dynamics`]) and the long-time experiments built
//! on top of it ([`analysis`]).

pub mod exact;
pub mod field;
pub mod geometry;
pub mod linalg;
pub mod operators;
pub mod spaces;
pub mod indicial;
pub mod dynamics;
pub mod analysis;
pub mod cli;
