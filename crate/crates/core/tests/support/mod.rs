//! Shared test support: seeded generators and brute-force oracles.
#![allow(dead_code)]

pub mod gen;
pub mod oracles;
