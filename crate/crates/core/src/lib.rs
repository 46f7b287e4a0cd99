//! Numerical toolkit for quantum channel capacities and superactivation analysis.
//!
//! The crate is organized bottom-up:
//!
//! | module            | contents                                                      |
//! |-------------------|---------------------------------------------------------------|
//! | [`matops`]        | dense complex matrices, Hermitian eigendecomposition, tensors |
//! | [`states`]        | density matrices, ensembles, von Neumann entropy              |
//! | [`channels`]      | Kraus-operator channels, Stinespring dilation, channel zoo    |
//! | [`measures`]      | relative entropy, Holevo quantity, coherent information       |
//! | [`capacity`]      | single-use capacity optimizers and joint-channel variants     |
//! | [`superactivation`] | operator Schmidt analysis, negativity, additivity verdicts  |
//! | [`cli`]           | command implementations and JSON run reports                  |
//!
//! All entropic quantities are in bits (logarithms base 2). Every randomized
//! routine takes an explicit seed and is deterministic for a fixed seed.

#![forbid(unsafe_code)]

pub mod capacity;
pub mod channels;
pub mod cli;
pub mod matops;
pub mod measures;
mod optim;
pub mod states;
pub mod superactivation;
