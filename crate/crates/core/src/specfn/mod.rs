//! Special functions used throughout the crate.
//!
//! Everything here is a pure function of its arguments. Iterative routines
//! take their stopping rule from a [`Tolerance`].

mod beta;
mod erf;
mod gamma;

pub use beta::{beta_inv_cdf_symmetric, beta_reg, normal_branch, BetaQuantile, DEFAULT_NORMAL_THRESHOLD};
pub use erf::{erf, erfc, erfc_inv, normal_cdf, normal_quantile};
pub use gamma::{ln_beta, ln_gamma};

use crate::{Error, Result};

/// Stopping rule for iterative solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_iter: 200,
        }
    }
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, max_iter: usize) -> Result<Self> {
        let tol = Tolerance {
            abs_tol,
            rel_tol,
            max_iter,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) || self.max_iter == 0 {
            return Err(Error::domain(
                "Tolerance",
                format!(
                    "need abs_tol > 0, rel_tol > 0, max_iter >= 1 (got {}, {}, {})",
                    self.abs_tol, self.rel_tol, self.max_iter
                ),
            ));
        }
        Ok(())
    }
}
