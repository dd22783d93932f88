//! Divergence and information measures on finite distributions.
//!
//! Conventions, fixed once and verified by the decomposition identities in
//! [`js_mixture_decomposition`] and [`renyi_geometric_decomposition`]:
//!
//! - `kl(p, q) = Σ p_i log(p_i/q_i)` with `0 log 0 = 0` and
//!   `p log(p/0) = +inf`.
//! - `js_div(p, q, α) = α KL(q‖m) + (1-α) KL(p‖m)` with mixture
//!   `m = α q + (1-α) p`; the first argument carries weight `1-α`.
//! - `renyi_div(p, q, α) = (1/(α-1)) log Σ q_i^α p_i^{1-α}`; the first
//!   argument carries exponent `1-α`.
//!
//! Extended reals are ordinary values: a failed absolute-continuity check
//! yields `+inf`, never an error.

mod divergence;
mod info;
mod types;

pub use divergence::{
    binary_entropy, js_div, js_mixture_decomposition, kl, renyi_div, renyi_geometric_decomposition,
};
pub use info::{info_measure, sibson_alpha_info, InfoKind};
pub use types::{Alpha, JointDist, ProbVec};
