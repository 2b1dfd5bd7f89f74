//! Comparator detectors and comfort scales.

pub mod expose;
pub mod iso;
pub mod relative_entropy;

pub use expose::{Expose, ExposeConfig};
pub use iso::{iso_comfort, relabel, Relabel, ISO_BANDS};
pub use relative_entropy::{chi_square_cdf, RelativeEntropy, RelativeEntropyConfig};
