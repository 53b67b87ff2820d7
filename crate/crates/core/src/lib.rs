//! Affine fractal interpolation functions whose pieces may overlap.
//!
//! The crate is organised bottom-up:
//!
//! - [`scalar`]: exact rational and floating backends behind one trait;
//! - [`affine`]: lower-triangular plane maps, their line projections and words;
//! - [`system`] and [`attractor`]: systems of maps, validation, sampling and
//!   evaluation of the interpolated function;
//! - [`separation`]: enumeration of `G⁻¹∘G` and the bounded-depth weak
//!   separation search, in one and two dimensions;
//! - [`orbit`] and [`fit`]: ε-nets from orbits of near-identity elements,
//!   closed-form orbit curves and the parabola detector;
//! - [`io`]: the plain-text system format, CSV/SVG emitters and run reports.

pub mod affine;
pub mod attractor;
pub mod error;
pub mod examples;
pub mod fit;
pub mod io;
pub mod orbit;
pub mod scalar;
pub mod separation;
pub mod system;

pub use affine::{Affine1, Affine2, FixedPoint1d, Word};
pub use attractor::{
    evaluate_f, evaluate_f_exact, evaluate_f_via_branch, modulus_of_continuity, sample_attractor,
    validate, GraphSample, SampleOptions, ValidationOptions, ValidationReport,
};
pub use error::{FifError, Result};
pub use fit::{detect_parabola, ParabolaFit};
pub use io::{parse_spec, AnySystem, RunReport, SpecFile};
pub use orbit::{
    classify_orbit_curve, epsilon_net, epsilon_net_auto, verify_orbit_on_curve, CurveKind,
    CurveModel, OrbitTrace,
};
pub use scalar::{Rational, Scalar};
pub use separation::{
    enumerate_family_1d, lemma4_transport_check, near_identity_family_1d, wsp_check_1d,
    wsp_check_2d, FamilyElement, GapEntry, WspOptions, WspStatus, WspVerdict,
};
pub use system::IfsSystem;

// lets the shared strategies under tests/ name this crate from unit tests
#[cfg(test)]
extern crate self as fif_core;

#[cfg(test)]
#[path = "../tests/common/mod.rs"]
mod test_support;
