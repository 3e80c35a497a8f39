//! Command-line companion to `suita-core`: JSON domain specs, CSV output,
//! parallel scans and the self-test suite.

pub mod cli;
pub mod domain_json;
pub mod selftest;
pub mod threads;
