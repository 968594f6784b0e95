//! Nonnegative matrices whose pattern is a (permuted) irreducible tridiagonal
//! or Hessenberg matrix, recognized through entries of their primitive
//! idempotents, and the resulting P- and Q-polynomial tests for symmetric
//! association schemes.

pub mod digraph;
pub mod io;
pub mod linalg;
pub mod scheme;
pub mod selftest;
pub mod spectra;
pub mod symmetrize;
pub mod theorems;

pub use linalg::{Matrix, Tolerance};
