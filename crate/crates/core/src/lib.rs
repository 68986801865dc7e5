//! Gelfand-type problems `-Delta_m u = lambda f(u)` with zero Dirichlet data on
//! finite random walk spaces.
//!
//! The crate is organized bottom-up:
//!
//! * [`rws`] weighted graphs, Dirichlet domains, the m-Laplacian and a
//!   convolution-kernel discretization;
//! * [`spectral`] Dirichlet eigenpairs and shifted spectra;
//! * [`scalar`] Lambert W, nonlinearities and envelope inverses;
//! * [`solver`] linear solves, the monotone iteration, Newton, stability and energy;
//! * [`branch`] extremal parameter, sweeps, continuation and diagrams;
//! * [`corpus`], [`io`] and [`cli`] the worked-example table and the command line.

pub mod branch;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod io;
pub mod linalg;
pub mod rws;
pub mod scalar;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use rws::{build_kernel_space, DirichletDomain, GraphBuilder, KernelSpace, WeightedGraph};
