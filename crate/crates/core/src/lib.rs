//! Secret-key rate engine for simultaneous quantum-classical communication
//! (SQCC) over Gaussian-modulated coherent-state CV-QKD.
//!
//! A QPSK classical symbol rides on top of the Gaussian quantum modulation.
//! Bob decides the classical symbol by quadrant, re-displaces his outcome and
//! rescales it so that the second moments describe a physical Gaussian
//! channel. The crate provides:
//!
//! * [`specfn`]: error functions, incomplete beta and their inverses,
//! * [`gaussian`]: two-mode Gaussian states, symplectic spectra, entropies,
//! * [`channel`]: the lossy thermal channel and the earlier excess-noise model,
//! * [`sqcc`]: postprocessed moments, renormalisation and effective channels,
//! * [`keyrate`]: asymptotic rates and the optimisation over modulation variance,
//! * [`finitekey`]: composable finite-size key length,
//! * [`mc`]: seeded Monte Carlo of the full receiver pipeline,
//! * [`cli`]: the `sqcc` command-line front end.
//!
//! All quadrature quantities are in shot-noise units (vacuum variance 1).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod cli;
mod error;
pub mod finitekey;
pub mod gaussian;
pub mod keyrate;
pub mod mc;
pub mod optimize;
pub mod specfn;
pub mod sqcc;

pub use error::{Error, Result};
