//! ACIDE — cluster-based peer-to-peer livestream distribution.
//!
//! A base station serving `n` co-located listeners of the same livestream
//! can group them into a cluster, split each media package into `n` blocks,
//! send each peer one block, and let the peers exchange the rest among
//! themselves. Only one copy of the package crosses the base-station link,
//! so the allocated bandwidth approaches the single-listener ratio instead
//! of growing with the audience.
//!
//! The crate covers the full planning surface of that model:
//!
//! - [`optimizer`]: optimal block sizes, phase times, per-peer bandwidths,
//!   and the minimum total bandwidth for a fixed cluster.
//! - [`admission`]: the largest peer set servable under a reserved budget,
//!   with an exhaustive oracle for small instances.
//! - [`dynamic`]: per-package planning under churn, folding the notification
//!   overhead of membership changes into the delay bound.
//! - [`schedule`]: a deterministic simulator of the mesh and star exchange
//!   procedures that times every transfer and checks interface constraints.
//! - [`scenario`]: seeded random clusters and figure-style experiment
//!   sweeps.
//! - [`config`], [`report`], [`cli`]: the configuration document format,
//!   CSV/JSON emission, and the command-line front end.
//!
//! Internally everything is SI — bits, seconds, bits/second. See the
//! `examples/` directory for one runnable walkthrough per capability.

#![forbid(unsafe_code)]

pub mod admission;
pub mod cli;
pub mod config;
pub mod dynamic;
pub mod model;
pub mod optimizer;
pub mod report;
pub mod rng;
pub mod scenario;
pub mod schedule;

pub use admission::{
    admit_max_peers, brute_force_admission, single_removal_comparison, AdmissionResult,
};
pub use dynamic::{
    notification_size_bits, plan_package, run_stream, ChurnEvent, DynamicPlan, PeerListSnapshot,
};
pub use model::{validate, AssumptionViolation, Cluster, Peer, StreamParams, Topology};
pub use optimizer::{
    alpha_coefficients, closed_form_block_sizes, minimize_bandwidth, per_peer_bandwidth,
    phase_times, solve_block_sizes, unicast_baseline, Allocation,
};
pub use scenario::{fixed_average_cluster, generate_cluster, sweep, ScenarioSpec, SweepResultRow};
pub use schedule::{
    assert_two_phase_separation, mesh_schedule, simulate, star_schedule, ScheduleReport,
    TransferEvent,
};
