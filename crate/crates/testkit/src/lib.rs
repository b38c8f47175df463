//! Reference implementations used as independent oracles in tests.
//!
//! Everything here is deliberately naive: brute-force scans, O(n^2) rank
//! statistics, an exact min-cost-flow transport solver. None of it depends
//! on the main crate, so a test that compares the two is comparing two
//! genuinely independent routes to the same answer.

pub mod checksum;
pub mod scan;
pub mod separability;
pub mod stats;
pub mod transport;
