//! Parameter identification for networks of diffusively coupled
//! FitzHugh–Nagumo neurons from membrane potentials alone.
//!
//! The network is rewritten as a linear regression `y* = θ*ᵀ z` whose
//! regressors come from a second-order filter-differentiator applied to
//! `Σy_k` and `Σy_k³`; the speed-gradient law `θ̇ = −Γ δ z` then drives the
//! estimates to θ*. Diagnostics check persistent excitation of `z` and the
//! coupling-strength condition `σ < εb/r`.
//!
//! - [`model`]: network, couplings, θ ↔ `(a, b, c, ε)` maps
//! - [`integrate`]: fixed-step RK4
//! - [`filters`]: filter-differentiator realization
//! - [`identify`]: adaptive law, residual, Lyapunov monitor
//! - [`simulate`]: closed-loop and data-driven runs
//! - [`analysis`]: PE sweeps, coupling bounds, energy, error norms, topology search
//! - [`io`]: config files, signal CSVs, run artifacts
//! - [`cli`]: command implementations behind the `fhn-ident` binary

pub mod analysis;
pub mod cli;
pub mod error;
pub mod filters;
pub mod identify;
pub mod integrate;
pub mod io;
pub mod model;
pub mod simulate;

pub use error::{Error, Result};
