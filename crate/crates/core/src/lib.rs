pub mod chaos_sums;
pub mod error;
pub mod experiments;
pub mod fbm_sim;
pub mod gaussian_core;
pub mod numerics;
pub mod rde;
pub mod rough_lift;
pub mod young;

pub use error::{Error, Result};
