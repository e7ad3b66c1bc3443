//! Support crate for the `sefpp` binary: config reading, trace export and
//! reference-table reports live here so integration tests can call the same
//! code paths the binary uses.

pub mod config;
pub mod export;
pub mod tables;
