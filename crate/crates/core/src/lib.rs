//! Finite-precision building blocks for the constructive side of supersingular
//! local Iwasawa theory.
//!
//! The crate is organized around five kinds of objects:
//!
//! * [`padic`] — elements of `Z_p`/`Q_p` carried modulo `p^N` with explicit
//!   valuation and precision bookkeeping;
//! * [`series`] — truncated power series over those scalars (the computational
//!   stand-in for the Iwasawa algebra `Λ = Z_p[[X]]`), including composition,
//!   reversion and μ/λ invariant extraction;
//! * [`lubin_tate`] and [`honda`] — the good Frobenius lift, its Lubin–Tate
//!   formal group, and the supersingular elliptic formal group with its
//!   logarithm, distinguished points and trace relations;
//! * [`tower`] and [`cyclotomic`] — explicit quotient-ring models of the
//!   ramified division towers and the `p`-power cyclotomic tower, with Galois
//!   action, field traces and fractional valuations;
//! * [`modules`] and [`growth`] — Smith normal form over `Z_p` and over the
//!   cyclotomic DVRs, the presented-module oracles for trace kernels and
//!   quotient sizes, and the corank/size growth calculators.

pub mod cyclotomic;
pub mod error;
pub mod growth;
pub mod honda;
pub mod intpoly;
pub mod lubin_tate;
pub mod modules;
pub mod padic;
pub mod series;
pub mod tower;

pub use error::{Error, Result};
pub use padic::{PadicContext, PadicScalar, Valuation};
pub use series::{BivariateSeries, IwasawaSeries};
