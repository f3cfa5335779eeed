//! Semi-orthogonal tribonacci wavelets and a quasilinearization collocation
//! solver for nonlinear singular boundary value problems.

pub mod approx;
pub mod basis;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod par;
pub mod polyalg;
pub mod problems;
pub mod quadrature;
pub mod report;
pub mod solver;
