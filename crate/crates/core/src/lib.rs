//! Exact geometry of the box 𝓑(p,N) ⊂ ℤ[ω], ω = e^{2πi/p}: normalized
//! distances, closed-form distance moments with exhaustive oracles,
//! concentration experiments, poles, visibility and SVG scenes.

pub mod cli;
pub mod concentration;
pub mod cyclo;
pub mod error;
pub mod moments;
pub mod poles;
pub mod prime;
pub mod rational;
pub mod render;
pub mod report;
pub mod sampling;
pub mod visibility;

pub use cyclo::{
    cos_central_angle, dist_sq, inner_product, normalized_dist_sq, BoxSpec, CentralAngle,
    CyclotomicInt, TraceVector,
};
pub use error::{Error, Result};
pub use rational::ExactRational;
