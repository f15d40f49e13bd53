//! Gate fidelity of quantum channels, computed and compared through Choi
//! matrices.
//!
//! The central object is the compression `K = P_S (T ⊗ id)(C) P_S` of a
//! channel's Choi matrix `C` onto the symmetric subspace. It determines the
//! gate fidelity completely: two maps have the same fidelity function exactly
//! when their compressions agree, the average fidelity is a scaled trace of
//! `K`, and the minimum fidelity is `λ₁ − ‖λ₁ P_S − K‖_{S(1)}` where `λ₁` is
//! the top eigenvalue of `K` and `‖·‖_{S(1)}` maximizes over product states.
//! For qubits that norm is an SDP over PPT states, solved by [`sdp`].

pub mod channel;
pub mod cli;
pub mod error;
pub mod fidelity;
pub mod linalg;
pub mod s1norm;
pub mod sampling;
pub mod sdp;
pub mod symmetry;

pub use channel::{Choi, DensityMatrix, KrausSet, PureState, ValidationReport};
pub use error::{Error, Result};
pub use fidelity::{FidelityReport, MinFidelityMethod, QubitDecomposition};
pub use linalg::{CMat, Subsystem, C64};
pub use sampling::RngStream;
pub use symmetry::Compression;
