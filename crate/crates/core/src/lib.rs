//! Non-bilinear Dirichlet forms on finite weighted measure spaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`measure`]: finite measure spaces and real fields over them.
//! - [`contraction`]: canonical piecewise-linear 1-Lipschitz functions, the
//!   alternating families `F_k`, composition, factorisation into `F_2`
//!   pieces, and Lipschitz envelopes.
//! - [`lattice`]: pointwise lattice operators, the band clamp `H_α`, and the
//!   explicit projections onto the order cone and the band.
//! - [`forms`]: concrete convex energies (graph quadratic, nonlocal, local 1D).
//! - [`flow`]: implicit-Euler (proximal) gradient flow.
//! - [`verifier`]: sampling harness for the Dirichlet criteria, the normal
//!   contraction property and the intermediate inequalities of its proof.

pub mod contraction;
pub mod error;
pub mod flow;
pub mod forms;
pub mod lattice;
pub mod measure;
pub mod rng;
pub mod sampling;
pub mod verifier;

pub use contraction::{ContractionClass, Decomposition, PlFunction};
pub use error::{Error, Result};
pub use forms::{eval_form, make_form, Edge, ExtendedEnergy, FormInstance, FormKind, Integrand, Psi};
pub use flow::{evolve, prox_step, FlowConfig, FlowTrace, ProxOptions, ProxOutcome};
pub use lattice::{BandParam, ConstraintSet};
pub use verifier::{CheckResult, SuiteConfig, Witness};
pub use measure::{Field, MeasureSpace};

