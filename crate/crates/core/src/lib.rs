//! Simulation and bound checking for verification of quantum computation
//! where the verifier only emits phase-randomized coherent light.

pub mod cli;
pub mod error;
pub mod hamiltonian;
pub mod i1dc;
pub mod phasernd;
pub mod photonics;
pub mod protocol1;
pub mod protocol2;
pub mod qcore;
pub mod seeding;
pub mod selftest;

pub use error::{Error, Result};
