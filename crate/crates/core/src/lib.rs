//! Exact computations with the integral Burau representation of braid
//! groups, the symplectic groups it lands in, and their finite quotients.

pub mod braid;
pub mod cache;
pub mod engine;
pub mod lab;
pub mod lifting;
pub mod matrix;
pub mod modmatrix;
pub mod orders;
pub mod perm;
pub mod presentation;
pub mod report;
pub mod symplectic;

pub use braid::{burau, burau_sigma, reduced_burau, reduced_burau_sigma, BraidError, BraidWord};
pub use lab::{member, Lab, LabError, Membership};
pub use engine::{sp_group, CloseLimits, EngineError, GroupSet};
pub use matrix::{IntMatrix, MatrixError};
pub use modmatrix::{permutation_image, reduce, Code, ModMatrix};
pub use perm::Permutation;
pub use presentation::{find_presentation_section, SnPresentation};
pub use report::{Status, VerificationReport};
pub use symplectic::{in_gamma, psi, psi_section, BasisData, Family, FormSpec, SubgroupSpec, SymplecticError};
