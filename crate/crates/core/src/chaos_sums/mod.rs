//! Weighted sum processes of second- and third-order Wiener chaos elements,
//! their exact second moments and the supporting oracles.

pub mod isserlis;
pub mod q;
pub mod rho_bound;
pub mod stats;
pub mod sums;
pub mod third;

pub use isserlis::{isserlis_moment, poly_covariance, CellPairOracle, Poly};
pub use q::{exact_second_moment_q, q_processes, QCovariance, QKind, QProcesses, Resolution};
pub use rho_bound::{rho_sum_bound_verify, Assignment, Normalization, RhoSequence};
pub use stats::{ks_normal, mean_se, KsResult, MeanSe};
pub use sums::{holder_norm, weighted_levy_sum, weighted_product_sum, SumProcess, WeightSeries};
pub use third::{exact_cov_k, third_order_sums, KFamily, KPattern};
