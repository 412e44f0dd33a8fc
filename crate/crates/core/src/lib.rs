//! Synchronization of coupled unit vectors on weighted digraphs.
//!
//! Each agent `i` carries a state `rᵢ ∈ Sⁿ⁻¹` and follows
//! `ṙᵢ = Σⱼ aᵢⱼ (rⱼ − (rᵢᵀrⱼ) rᵢ)`, where `aᵢⱼ` is the weight of the edge
//! from `j` into `i`. The crate provides:
//!
//! - [`graph`]: digraphs, Laplacians, the spanning-tree test and graph families;
//! - [`spectra`]: the linearized error operator, its invariant subspaces and
//!   numerical / exact checks of its predicted spectrum;
//! - [`dynamics`]: RK4 integration of the sphere flow, the pairwise error
//!   (Riccati) flow and the scalar phase model;
//! - [`rate`]: empirical decay-rate fits compared with `Re λ₂(L)`.
//!
//! Everything numeric is generic over [`scalar::Real`] (or [`scalar::Field`]
//! for exact arithmetic); the aliases below fix the scalar to `f64`.

pub mod assignment;
pub mod dynamics;
pub mod graph;
pub mod linalg;
pub mod rate;
pub mod scalar;
pub mod spectra;

use num_rational::BigRational;

pub type Digraph64 = graph::Digraph<f64>;
pub type Laplacian64 = graph::Laplacian<f64>;
pub type Matrix64 = linalg::Matrix<f64>;
pub type ExactMatrix = linalg::Matrix<BigRational>;
pub type Spectrum64 = spectra::Spectrum<f64>;
pub type Configuration64 = dynamics::SphereConfiguration<f64>;
pub type ErrorMatrix64 = dynamics::ErrorMatrix<f64>;
