//! pdkit: a primal-dual optimization toolkit.
//!
//! The crate combines a continuous and a discrete layer around one theme,
//! solving a problem jointly with its dual:
//!
//! - [`linop`]: vectors, linear operators with adjoints, certified
//!   spectral-norm bounds by power iteration, graph incidence operators.
//! - [`prox`]: the proximity-operator catalog, Fenchel conjugation rules,
//!   and Moreau's decomposition.
//! - [`solvers`]: ADMM and the forward-backward / forward-backward-forward /
//!   projection-based primal-dual splitting algorithms over
//!   `min f(x) + sum_m g_m(L_m x) + h(x)`, with step-size guards and
//!   KKT-residual diagnostics.
//! - [`lp`]: LP primal/dual pairs, weak duality, complementary-slackness
//!   certificates and approximation certificates.
//! - [`setcover`]: the primal-dual ascent algorithm for set cover with its
//!   frequency-factor guarantee.
//! - [`mrf`]: pairwise MRF energies, exact tree min-sum, projected-subgradient
//!   dual decomposition, and max-flow/min-cut solving of binary submodular
//!   models.
//! - [`io`]: the text file formats and trace/certificate emission used by the
//!   `pdkit` command-line tool.

pub mod cli;
pub mod dense;
pub mod error;
pub mod extreal;
pub mod io;
pub mod linop;
pub mod lp;
pub mod mrf;
pub mod prox;
pub mod setcover;
pub mod solvers;
pub mod vector;

pub use error::{PdError, Result};
pub use extreal::ExtReal;
pub use vector::Vector;
