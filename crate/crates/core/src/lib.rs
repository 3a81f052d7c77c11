//! Quadratic numerical range (QNR) of a complex 2x2 block matrix
//! `[A B; C D]`.
//!
//! The QNR is the union over unit vectors `x`, `y` of the spectra of the
//! reduced 2x2 matrices `[<Ax,x> <By,x>; <Cx,y> <Dy,y>]`. This crate
//! computes point clouds of it two ways:
//!
//! * [`driver::compute_qnr`]: boundary-seeking ascent on the product of
//!   spheres, seeded from a box grid over the current cloud, under a wall
//!   clock or iteration budget;
//! * [`driver::random_sampling_baseline`]: plain random vector sampling.
//!
//! [`concentration`] quantifies why the baseline clusters in high
//! dimension, and [`zoo`] provides the standard test matrices.

pub mod cli;
pub mod concentration;
pub mod driver;
pub mod error;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod seeker;
pub mod svg;
pub mod zoo;

pub use error::{Error, Result};
pub use linalg::{BlockMatrix, ComplexMatrix, UnitPair, C64};
