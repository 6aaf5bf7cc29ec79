//! Discrete embedding spectra as a desk-scale compactness proxy: Neumann-type
//! forms on masks, a blocked eigensolver, interpolation-margin checks, the
//! finite-dimensional c(eps) criterion, and the composite dossier.

mod c_epsilon;
mod condition2;
mod dossier;
pub mod forms;
mod lobpcg;
mod multigrid;

pub use c_epsilon::{find_c_epsilon, sobolev_triple, NormTriple, MAX_TRIPLE_DIM};
pub use condition2::{condition2_check, Condition2Report};
pub use dossier::{compactness_dossier, CompactnessDossier};
pub use forms::DiscreteForms;
pub use lobpcg::{lowest_eigenvalues, mask_spectrum, SpectrumReport};
pub use multigrid::MgPreconditioner;
