//! Numerical realization of the modular spectral triple on truncations.

pub mod hilbert;
pub mod kernel;
pub mod ladder;
pub mod pdc;
pub mod resolvent;
pub mod zeta;

pub use hilbert::*;
pub use kernel::{kernel_index, kernel_index_with, range_vector, KernelReport};
pub use pdc::{pdc_check, pdc_norm, PdcReport, PdcSample};
pub use resolvent::{resolvent_phi0_numeric, ResolventReport, ResolventSample};
pub use zeta::{
    expected_zeta_residue, spectral_dimension_probe, zeta_residue, zeta_residue_fit, zeta_series,
    DimensionProbe, DimensionReport, ResidueFit,
};
