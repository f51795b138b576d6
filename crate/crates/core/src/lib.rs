//! Exact minimization of univariate higher-order Mumford-Shah and Potts
//! functionals.
//!
//! Given samples `f_1..f_N`, order `k`, elasticity `beta` and segment penalty
//! `gamma`, [`solve`] finds a partition of `1..=N` and a signal `u` minimizing
//!
//! ```text
//! sum_n (u_n - f_n)^2 + beta^(2k) sum_I |D_k u_I|^2 + gamma |partition|
//! ```
//!
//! where `D_k` takes k-th order differences inside each segment. With
//! `beta = inf` (Potts) every segment is a polynomial of degree `< k`.
//!
//! ```
//! use homs::{solve, ModelParams, Pruning, Signal};
//!
//! let f = Signal::new(vec![-1.0, -1.0, 1.0, 1.0]).unwrap();
//! let res = solve(&f, &ModelParams::potts(2, 0.5).unwrap(), Pruning::Both).unwrap();
//! assert_eq!(res.partition.starts(), vec![3]);
//! ```

pub mod dp;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod reconstruct;
pub mod signals;

#[doc = include_str!("../../../docs/tuning.md")]
pub mod guide {}

pub use dp::{backtrack, solve, Pruning, Solver};
pub use engine::{ErrorEngine, ErrorState, Rotation, RotationTable, TableMode};
pub use error::{Error, Result};
pub use metrics::{rand_index, rel_l2_error};
pub use model::{functional_value, kth_difference, ModelParams, Partition, Segment, Signal, SolveResult, MAX_ORDER};
pub use reconstruct::{fit_segment_poly, fit_segment_spline, reconstruct};
