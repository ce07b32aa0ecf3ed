//! Photon pairs in a one-dimensional waveguide with a contact interaction.
//!
//! The crate models thermal photon pairs near a linear dispersion band and
//! provides the pieces needed to locate the pair binding transition and to
//! quantify the two-photon interaction phase:
//!
//! * [`physics`]: waveguide and thermal parameters, Bose factors, unit helpers.
//! * [`quad`]: adaptive Gauss-Kronrod quadrature used by the integral kernels.
//! * [`keldysh`]: spectral-function utilities (Lorentzian spectra, retarded
//!   reconstruction, fluctuation-dissipation components, time-domain checks).
//! * [`tmatrix`]: the retarded pair T-matrix, the regularized coth integral,
//!   denominator scans, and the critical temperature.
//! * [`boundstate`]: bound-pair amplitudes, the two-photon product
//!   wavefunction, and the nonlinear crossing phase from pair propagation.
//! * [`gate`]: small dense gate matrices built from the crossing phase.

pub mod boundstate;
pub mod error;
pub mod gate;
pub mod keldysh;
pub mod physics;
pub mod quad;
pub mod tmatrix;

pub use error::{Error, Result};
