//! Toy block ciphers and the cryptanalytic tooling used against them:
//! difference tables and counting attacks, a genetic-algorithm key search,
//! neural-network key ranking, the interpolation attack, and the I-CRYPT
//! neural-core Feistel cipher with its quality harness.

pub mod diffcrypt;
pub mod evolve;
pub mod finite_math;
pub mod ga_attack;
pub mod icrypt;
pub mod interpolation;
pub mod modes;
pub mod neuralnet;
pub mod nn_attack;
pub mod report;
pub mod toyciphers;
