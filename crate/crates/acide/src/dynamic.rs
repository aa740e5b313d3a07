//! Package planning under peer churn.
//!
//! A livestream is a sequence of packages. While package `k` is being
//! exchanged, the base station folds join/leave requests and capacity changes
//! into the peer list for package `k+1` and precomputes its plan. When the
//! list changed, the delay bound is split three ways: a notification phase
//! `T0` (each peer learns its position and the new cluster size: two fields
//! of ceil(log2 n) bits each), the download phase `T1`, and the exchange
//! phase `T2`. The notification and download phases run at the same
//! base-station bandwidth,
//!
//! ```text
//! bw0 = bw1 = (S + 2 n ceil(log2 n)) / (T - T2)
//! T0  = 2 n ceil(log2 n) * (T - T2) / (2 n ceil(log2 n) + S)
//! ```
//!
//! which is what makes the split optimal. An unchanged list skips the
//! notification phase entirely (`T0 = 0`) and the plan collapses to the
//! static allocation.

use crate::model::{Cluster, Peer, StreamParams};
use crate::optimizer::{
    minimize_bandwidth, per_peer_bandwidth, phase_times, solve_block_sizes, OptimizerError,
    MIN_PHASE1_S,
};
use std::fmt;
use std::time::Instant;

/// The peer list in force while one package is distributed.
#[derive(Debug, Clone, PartialEq)]
pub struct PeerListSnapshot {
    /// 1-based package index this list applies to.
    pub package_index: u32,
    pub peers: Vec<Peer>,
}

impl PeerListSnapshot {
    pub fn new(package_index: u32, peers: Vec<Peer>) -> Result<Self, DynamicError> {
        if package_index == 0 {
            return Err(DynamicError::BadPackageIndex);
        }
        // Same structural rules as a cluster: nonempty, unique ids.
        let probe = Cluster::new(peers, StreamParams::new(1.0, 1.0).unwrap())
            .map_err(|e| DynamicError::BadPeerList(e.to_string()))?;
        Ok(Self {
            package_index,
            peers: probe.peers,
        })
    }

    fn same_list(&self, other: &PeerListSnapshot) -> bool {
        self.peers.len() == other.peers.len()
            && self.peers.iter().zip(&other.peers).all(|(a, b)| {
                a.id == b.id && a.download_bps == b.download_bps && a.upload_bps == b.upload_bps
            })
    }
}

/// Distribution plan for one package.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicPlan {
    pub package_index: u32,
    /// Total notification payload, `2 n ceil(log2 n)` bits; 0 when the list
    /// is unchanged (no notifications are sent).
    pub notification_bits: f64,
    pub phase0_s: f64,
    pub phase1_s: f64,
    pub phase2_s: f64,
    /// Base-station bandwidth during the notification phase; 0 when
    /// unchanged. Equals `bw1_bps` whenever notifications are sent.
    pub bw0_bps: f64,
    /// Base-station bandwidth during the download phase. No base-station
    /// bandwidth is used during the exchange phase.
    pub bw1_bps: f64,
    pub block_bits: Vec<f64>,
    pub peer_bw_bps: Vec<f64>,
    /// Whether the peer list differs from the previous package's.
    pub changed: bool,
    /// Wall-clock time of the planning computation itself. Informational
    /// only — the model requires planning to finish within the previous
    /// package's exchange phase, which desk-scale solves beat by orders of
    /// magnitude. Excluded from serialized output to keep runs byte-stable.
    pub solve_wall_s: f64,
}

/// Membership and capacity changes taking effect at one package.
#[derive(Debug, Clone, PartialEq)]
pub struct ChurnEvent {
    /// Package whose peer list incorporates this event; must be >= 2 (the
    /// initial list defines package 1).
    pub at_package: u32,
    pub joins: Vec<Peer>,
    pub leaves: Vec<u32>,
    pub capacity_updates: Vec<CapacityUpdate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityUpdate {
    pub peer_id: u32,
    pub download_bps: f64,
    pub upload_bps: f64,
}

/// Total notification payload for a cluster of `n` peers: each of the `n`
/// parallel notifications carries two fields of `ceil(log2 n)` bits. A
/// single-peer cluster needs no exchange coordination, so the size is 0.
pub fn notification_size_bits(n: usize) -> f64 {
    (2 * n * ceil_log2(n)) as f64
}

fn ceil_log2(n: usize) -> usize {
    debug_assert!(n >= 1);
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Plan one package given the previous and current peer lists.
pub fn plan_package(
    previous: &PeerListSnapshot,
    current: &PeerListSnapshot,
    stream: &StreamParams,
) -> Result<DynamicPlan, DynamicError> {
    if current.package_index != previous.package_index + 1 {
        return Err(DynamicError::NonConsecutiveSnapshots {
            previous: previous.package_index,
            current: current.package_index,
        });
    }
    let changed = !previous.same_list(current);
    plan_current(current, stream, changed)
}

fn plan_current(
    current: &PeerListSnapshot,
    stream: &StreamParams,
    changed: bool,
) -> Result<DynamicPlan, DynamicError> {
    let started = Instant::now();
    let cluster = Cluster::new(current.peers.clone(), *stream)
        .map_err(|e| DynamicError::BadPeerList(e.to_string()))?;

    if !changed {
        let alloc = minimize_bandwidth(&cluster).map_err(DynamicError::Optimizer)?;
        return Ok(DynamicPlan {
            package_index: current.package_index,
            notification_bits: 0.0,
            phase0_s: 0.0,
            phase1_s: alloc.phase1_s,
            phase2_s: alloc.phase2_s,
            bw0_bps: 0.0,
            bw1_bps: alloc.total_bw_bps,
            block_bits: alloc.block_bits,
            peer_bw_bps: alloc.peer_bw_bps,
            changed: false,
            solve_wall_s: started.elapsed().as_secs_f64(),
        });
    }

    // Changed list: reuse the optimizer's refusal rules by running it first,
    // then carve the notification phase out of what the static case calls
    // Phase 1.
    let n = cluster.len();
    let _ = minimize_bandwidth(&cluster).map_err(DynamicError::Optimizer)?;
    let block_bits = solve_block_sizes(&cluster).map_err(DynamicError::Optimizer)?;
    let (_, phase2_s) = phase_times(&cluster, &block_bits).map_err(DynamicError::Optimizer)?;

    let notif = notification_size_bits(n);
    let s_bits = stream.package_bits;
    let t = stream.delay_bound_s;
    let phase0_s = notif * (t - phase2_s) / (notif + s_bits);
    let phase1_s = t - phase0_s - phase2_s;
    if phase1_s <= MIN_PHASE1_S {
        return Err(DynamicError::Optimizer(OptimizerError::Infeasible {
            phase2_s: phase0_s + phase2_s,
            delay_bound_s: t,
        }));
    }
    let bw01 = (s_bits + notif) / (t - phase2_s);
    let peer_bw_bps = per_peer_bandwidth(&block_bits, phase1_s);

    Ok(DynamicPlan {
        package_index: current.package_index,
        notification_bits: notif,
        phase0_s,
        phase1_s,
        phase2_s,
        bw0_bps: bw01,
        bw1_bps: bw01,
        block_bits,
        peer_bw_bps,
        changed: true,
        solve_wall_s: started.elapsed().as_secs_f64(),
    })
}

/// Outcome of planning a whole stream: one plan per package until done or
/// until a package cannot meet the delay bound.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamPlan {
    pub plans: Vec<DynamicPlan>,
    /// Set when planning halted early; holds the failing package index and
    /// its error.
    pub halted: Option<(u32, String)>,
}

/// Plan `num_packages` packages from an initial list, applying churn events
/// as their packages come up.
///
/// The initial snapshot defines package 1 and is distributed without a
/// notification phase. Events must be sorted by package and may not target
/// package 1; events beyond `num_packages` are ignored. An infeasible
/// package stops the stream and is recorded in [`StreamPlan::halted`].
pub fn run_stream(
    initial: &PeerListSnapshot,
    events: &[ChurnEvent],
    stream: &StreamParams,
    num_packages: u32,
) -> Result<StreamPlan, DynamicError> {
    if initial.package_index != 1 {
        return Err(DynamicError::BadInitialSnapshot(initial.package_index));
    }
    if num_packages == 0 {
        return Err(DynamicError::NoPackages);
    }
    for w in events.windows(2) {
        if w[0].at_package > w[1].at_package {
            return Err(DynamicError::UnsortedEvents);
        }
    }
    if let Some(e) = events.iter().find(|e| e.at_package < 2) {
        return Err(DynamicError::EventTargetsInitialPackage(e.at_package));
    }

    let mut plans = Vec::with_capacity(num_packages as usize);
    let mut halted = None;
    let mut current = initial.clone();

    match plan_current(&current, stream, false) {
        Ok(plan) => plans.push(plan),
        Err(e) => {
            return Ok(StreamPlan {
                plans,
                halted: Some((1, e.to_string())),
            })
        }
    }

    for k in 2..=num_packages {
        let mut peers = current.peers.clone();
        let mut changed = false;
        for event in events.iter().filter(|e| e.at_package == k) {
            apply_event(&mut peers, event)?;
            changed = true;
        }
        let next = PeerListSnapshot::new(k, peers)?;
        // Capacity updates writing back identical values leave the list
        // literally equal, which counts as unchanged.
        let effectively_changed = changed && !current.same_list(&next);
        match plan_current(&next, stream, effectively_changed) {
            Ok(plan) => plans.push(plan),
            Err(e) => {
                halted = Some((k, e.to_string()));
                break;
            }
        }
        current = next;
    }

    Ok(StreamPlan { plans, halted })
}

fn apply_event(peers: &mut Vec<Peer>, event: &ChurnEvent) -> Result<(), DynamicError> {
    for leave in &event.leaves {
        let idx = peers
            .iter()
            .position(|p| p.id == *leave)
            .ok_or(DynamicError::UnknownPeer {
                at_package: event.at_package,
                peer_id: *leave,
            })?;
        peers.remove(idx);
    }
    for update in &event.capacity_updates {
        let peer =
            peers
                .iter_mut()
                .find(|p| p.id == update.peer_id)
                .ok_or(DynamicError::UnknownPeer {
                    at_package: event.at_package,
                    peer_id: update.peer_id,
                })?;
        *peer = Peer::new(peer.id, update.download_bps, update.upload_bps)
            .map_err(|e| DynamicError::BadPeerList(e.to_string()))?;
    }
    for join in &event.joins {
        if peers.iter().any(|p| p.id == join.id) {
            return Err(DynamicError::DuplicateJoin {
                at_package: event.at_package,
                peer_id: join.id,
            });
        }
        peers.push(join.clone());
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum DynamicError {
    BadPackageIndex,
    BadInitialSnapshot(u32),
    NoPackages,
    UnsortedEvents,
    EventTargetsInitialPackage(u32),
    NonConsecutiveSnapshots { previous: u32, current: u32 },
    UnknownPeer { at_package: u32, peer_id: u32 },
    DuplicateJoin { at_package: u32, peer_id: u32 },
    BadPeerList(String),
    Optimizer(OptimizerError),
}

impl fmt::Display for DynamicError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicError::BadPackageIndex => write!(f, "package indices start at 1"),
            DynamicError::BadInitialSnapshot(k) => {
                write!(f, "initial snapshot must be package 1, got {}", k)
            }
            DynamicError::NoPackages => write!(f, "num_packages must be at least 1"),
            DynamicError::UnsortedEvents => write!(f, "churn events must be sorted by package"),
            DynamicError::EventTargetsInitialPackage(k) => {
                write!(f, "churn events start at package 2, got {}", k)
            }
            DynamicError::NonConsecutiveSnapshots { previous, current } => write!(
                f,
                "snapshots must be consecutive packages, got {} then {}",
                previous, current
            ),
            DynamicError::UnknownPeer {
                at_package,
                peer_id,
            } => write!(f, "package {}: unknown peer id {}", at_package, peer_id),
            DynamicError::DuplicateJoin {
                at_package,
                peer_id,
            } => write!(
                f,
                "package {}: joining peer id {} already present",
                at_package, peer_id
            ),
            DynamicError::BadPeerList(e) => write!(f, "bad peer list: {}", e),
            DynamicError::Optimizer(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for DynamicError {}
