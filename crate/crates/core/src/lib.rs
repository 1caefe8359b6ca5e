//! Stable-equivalence index of even G-equivariant quantum cellular automata on
//! Z₂-graded quantum chains.

pub mod condexp;
pub mod error;
pub mod group;
pub mod gsystem;
pub mod linalg;
pub mod nearincl;
pub mod qca;
pub mod superalg;

pub use error::{Error, Result};

/// Scalar type used throughout. Only `f64` is supported: the algebra tolerances sit
/// below single-precision resolution.
pub type Real = f64;
pub type Complex = linalg::C64;
pub type Matrix = linalg::CMat;

/// Numerical tolerances and size caps shared by all computations.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub tol_alg: f64,
    pub tol_snap: f64,
    pub tol_cocycle: f64,
    pub hom_cap: usize,
    pub h2_group_cap: usize,
    pub h2_modulus_cap: usize,
    pub max_ambient: usize,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        let max_ambient = std::env::var("SQCA_MAX_AMBIENT").ok().and_then(|s| s.parse().ok()).unwrap_or(4096);
        Config {
            tol_alg: 1e-9,
            tol_snap: 1e-6,
            tol_cocycle: 1e-9,
            hom_cap: 24,
            h2_group_cap: 8,
            h2_modulus_cap: 4,
            max_ambient,
            seed: 0,
        }
    }
}
