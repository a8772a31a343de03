//! Special functions: exact Wigner 3j symbols, spherical Bessel functions,
//! the scaled complementary error function, and hydrogenoid radial wave
//! functions. Everything here is pure and reentrant.

mod bessel;
mod erf;
mod hydrogen;
mod wigner;

pub use bessel::spherical_bessel_j;
pub use erf::{dawson, erfcx, erfcx_real};
pub use hydrogen::hydrogen_radial;
pub use wigner::{wigner3j, wigner3j_int, HalfInt, SignedSqrtRational, Wigner3jArgs};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecFunError {
    #[error("j = {j} and m = {m} (doubled: {two_j}/{two_m}) differ in integrality")]
    MismatchedIntegrality { j: f64, m: f64, two_j: i32, two_m: i32 },
    #[error("angular momenta do not couple to an integer total: 2j = ({0}, {1}, {2})")]
    NonIntegerCoupling(i32, i32, i32),
    #[error("negative angular momentum: 2j = {0}")]
    NegativeJ(i32),
    #[error("spherical Bessel argument must be non-negative and finite, got {0}")]
    BadBesselArgument(f64),
    #[error("non-finite argument")]
    NonFiniteArgument,
    #[error("orbital quantum number l = {l} out of range for n = {n}")]
    OrbitalOutOfRange { n: u32, l: u32 },
    #[error("radial coordinate must be non-negative and finite, got {0}")]
    BadRadialArgument(f64),
    #[error("Bohr radius must be positive, got {0}")]
    BadBohrRadius(f64),
}
