//! File formats, verification harness and command-line front end for
//! [`hermite_mult_core`].

pub mod cli;
pub mod formats;
pub mod verify;
