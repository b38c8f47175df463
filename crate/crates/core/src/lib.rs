//! Privacy-audit toolkit for synthetic network traffic.
//!
//! Given a training packet corpus and a synthetic corpus produced by any
//! traffic generator, this crate quantifies privacy leakage through several
//! attack surfaces and applies mitigations to training data:
//!
//! - [`capture`]: pcap parsing/writing, flow assembly, segmentation, and
//!   train/auxiliary/non-training dataset splits.
//! - [`token`]: captures rendered as bit/hex/byte token sequences plus an
//!   n-gram index for verbatim lookup.
//! - [`extraction`]: verbatim training-data extraction rates and
//!   per-position extractability curves.
//! - [`identifier`]: output coverage/confidence of IP and MAC memorization
//!   and frequency-stratified histograms.
//! - [`property`]: normalized earth mover's distance between sensitive
//!   header-field distributions.
//! - [`topology`]: communication-graph reconstruction and comparison.
//! - [`mia`]: membership-inference harness (signals, attack models, ROC).
//! - [`mitigate`]: anonymization (CA/PS/PP) and DP-noise perturbation.
//! - [`utility`]: fidelity distances and downstream task accuracy deltas.
//! - [`audit`]: configuration, orchestration, and report emission.
//!
//! The inner loops (per-sequence extraction decisions, per-capture
//! tokenization, per-packet mitigation) are data-parallel and fan out via
//! rayon when the default `parallel` feature is enabled; building with
//! `--no-default-features` selects the sequential fallback.

pub mod audit;
pub mod capture;
pub mod corpus;
pub mod exec;
pub mod extraction;
pub mod identifier;
pub mod mia;
pub mod mitigate;
pub mod property;
pub mod token;
pub mod topology;
pub mod utility;
