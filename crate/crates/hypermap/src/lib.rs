//! Samplers, skeleton codec and verification suite for type-I hyperbolic
//! random planar triangulations `T_λ`, `0 < λ ≤ λ_c`.

pub mod experiments;
pub mod geodesics;
pub mod model;
pub mod planarmap;
pub mod samplers;
pub mod series;
pub mod skeleton;
