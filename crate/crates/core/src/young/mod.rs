//! Multidimensional Young integration on grid-like partitions: variation
//! norms, discrete integrals and checks of the associated estimates.

pub mod checks;
pub mod grid;
pub mod integral;
pub mod variation;

pub use checks::{
    fgh_check, fv_sandwich, fv_sandwich_corpus, iterated_a_corpus, product_pvar_separable, product_pvar_shared,
    psi_variation_ratio, towghi_check, towghi_corpus, zeta, zeta_sum_check, ControlFunction, FghReport, FghShape,
    ProductReport, SandwichReport, TowghiCorpus, TowghiReport, ZetaReport,
};
pub use grid::{AxisSel, GridFunction, GridPartition};
pub use integral::{discrete_young_integral, iterated_a, psi, young_compose_h, IteratedA};
pub use variation::{bar_vp, controlled_pvar, tilde_vp, vp, ControlledMode, Variation, VpMode};
