//! Named tolerances used by the residual suites and the classifier.
//!
//! Residuals are grouped into tiers by how much numerical differentiation
//! they stack. Identities that reduce to pointwise algebra of exactly
//! evaluated quantities sit in the tightest tier; each layer of central
//! differencing loosens the tier by roughly the square root of machine
//! epsilon's influence on that layer.

use serde::{Deserialize, Serialize};

/// How a residual's numbers were obtained, which bounds how small it can
/// honestly be expected to be. Ordered from tightest to loosest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tier {
    /// Pure algebra of exactly evaluated quantities (expression jets,
    /// linear solves). Limited only by rounding.
    Algebraic,
    /// One layer of Richardson-extrapolated central differencing.
    OneFd,
    /// Two stacked layers of numerical differentiation.
    TwoFd,
}

impl Tier {
    /// One more finite-difference layer, saturating at [`Tier::TwoFd`].
    pub fn bump(self) -> Tier {
        bump(self)
    }
}

/// Default residual tolerance for pure-algebra identities.
pub const ALGEBRAIC: f64 = 1e-10;

/// Default residual tolerance with one finite-difference layer.
pub const ONE_FD: f64 = 1e-7;

/// Default residual tolerance with two stacked finite-difference layers.
pub const TWO_FD: f64 = 1e-5;

/// Relative spread below which a sampled scalar field is reported constant.
pub const CONSTANCY_REL: f64 = 1e-6;

/// Relative residual below which a proportionality fit counts as exact.
pub const CONFORMAL_FIT: f64 = 1e-6;

/// Relative residual above which a proportionality fit counts as refuted
/// (between the two bounds the verdict is "inconclusive").
pub const CONFORMAL_REFUTED: f64 = 1e-2;

/// Absolute-plus-relative gap used when grouping eigenvalues.
pub const EIGEN_GROUP: f64 = 1e-6;

/// Bound on |dλ(W)| for "eigenvalue constant along the screen".
pub const EIGEN_SCREEN_DERIV: f64 = 1e-5;

/// Absolute bound under which an algebraically computed form counts as
/// identically zero (Killing co-screen, vanishing second forms,
/// irrotational defects).
pub const KILLING_TOL: f64 = 1e-8;

/// Default step scale for central differences: `h = FD_STEP * (1 + |u|)`
/// per coordinate.
pub const FD_STEP: f64 = 1e-4;

/// Active tolerance set, one value per tier, overridable from the CLI.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    pub algebraic: f64,
    pub one_fd: f64,
    pub two_fd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebraic: ALGEBRAIC,
            one_fd: ONE_FD,
            two_fd: TWO_FD,
        }
    }
}

impl Tolerances {
    /// A uniform tolerance for every tier (CLI `--tol`).
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            algebraic: tol,
            one_fd: tol,
            two_fd: tol,
        }
    }

    pub fn for_tier(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Algebraic => self.algebraic,
            Tier::OneFd => self.one_fd,
            Tier::TwoFd => self.two_fd,
        }
    }
}

/// Bump a tier by one finite-difference layer, saturating at [`Tier::TwoFd`].
pub fn bump(tier: Tier) -> Tier {
    match tier {
        Tier::Algebraic => Tier::OneFd,
        Tier::OneFd | Tier::TwoFd => Tier::TwoFd,
    }
}
