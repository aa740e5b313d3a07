//! Deterministic step-by-step simulation of the block distribution
//! procedures.
//!
//! Peers are numbered 1..n by their position in the cluster. Phase 1 sends
//! block `i` from the base station to peer `i`, all transfers in parallel.
//! Phase 2 runs `n - 1` sequential steps with a strict barrier between steps;
//! within a step all transfers are parallel.
//!
//! Mesh: in step `k` every peer `i` unicasts its own block to peer
//! `((i + k - 1) mod n) + 1` — a rotating shift, so each peer talks to a new
//! partner every step over one upload and one download interface.
//!
//! Star: in step `k` peer 1 unicasts its block to peer `k+1` while peer `k+1`
//! broadcasts its own block to all other peers. The broadcast occupies the
//! sender's single upload interface once, regardless of receiver count.
//!
//! Transfer times use the general `s / min(sender_up, receiver_down)` form,
//! so the simulator evaluates arbitrary allocations — including ones that
//! violate the cluster assumptions — and thereby cross-checks the optimizer's
//! simplifications independently.

use crate::model::{Cluster, Topology};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Phase1,
    Phase2,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Phase1 => write!(f, "1"),
            Phase::Phase2 => write!(f, "2"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sender {
    BaseStation,
    /// 1-based peer position in the cluster.
    Peer(u32),
}

impl fmt::Display for Sender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sender::BaseStation => write!(f, "bs"),
            Sender::Peer(i) => write!(f, "{}", i),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferMode {
    Unicast,
    Broadcast,
}

impl fmt::Display for TransferMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransferMode::Unicast => write!(f, "unicast"),
            TransferMode::Broadcast => write!(f, "broadcast"),
        }
    }
}

/// One block transfer. Broadcasts appear as one event per receiver sharing
/// the same sender; they count as a single upload activity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferEvent {
    pub phase: Phase,
    /// 0 for Phase 1; 1..=n-1 for Phase 2.
    pub step: u32,
    pub sender: Sender,
    /// 1-based peer position of the receiver.
    pub receiver: u32,
    /// 1-based block index; equals the sender position in Phase 2.
    pub block: u32,
    pub mode: TransferMode,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A peer finished without one of the blocks.
    MissingBlock { peer: u32, block: u32 },
    /// A peer had more than one upload activity in a step (a broadcast is
    /// one activity).
    MultipleUploads { step: u32, peer: u32 },
    /// A peer was receiving from more than one sender in a step.
    MultipleInboundSenders { step: u32, peer: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingBlock { peer, block } => {
                write!(f, "peer {} missing block {} at completion", peer, block)
            }
            Violation::MultipleUploads { step, peer } => {
                write!(f, "step {}: peer {} uploads more than once", step, peer)
            }
            Violation::MultipleInboundSenders { step, peer } => {
                write!(
                    f,
                    "step {}: peer {} receives from multiple senders",
                    step, peer
                )
            }
        }
    }
}

/// Timed simulation outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleReport {
    pub events: Vec<TransferEvent>,
    /// Durations of the Phase-2 steps, in order.
    pub step_durations_s: Vec<f64>,
    pub phase1_s: f64,
    pub phase2_s: f64,
    pub completion_s: f64,
    /// Blocks held by each peer (by position) at completion.
    pub blocks_held: Vec<BTreeSet<u32>>,
    pub violations: Vec<Violation>,
}

/// Phase-1 plus rotating-shift Phase-2 events for a mesh of `n >= 2` peers.
pub fn mesh_schedule(n: usize) -> Vec<TransferEvent> {
    assert!(n >= 2, "mesh schedule needs at least 2 peers");
    let mut events = phase1_events(n);
    for step in 1..n {
        for i in 1..=n {
            let receiver = ((i + step - 1) % n) + 1;
            events.push(TransferEvent {
                phase: Phase::Phase2,
                step: step as u32,
                sender: Sender::Peer(i as u32),
                receiver: receiver as u32,
                block: i as u32,
                mode: TransferMode::Unicast,
            });
        }
    }
    events
}

/// Phase-1 plus per-step broadcast Phase-2 events for a star of `n >= 2`
/// peers.
pub fn star_schedule(n: usize) -> Vec<TransferEvent> {
    assert!(n >= 2, "star schedule needs at least 2 peers");
    let mut events = phase1_events(n);
    for step in 1..n {
        let hub = step + 1; // the peer broadcasting its block this step
        events.push(TransferEvent {
            phase: Phase::Phase2,
            step: step as u32,
            sender: Sender::Peer(1),
            receiver: hub as u32,
            block: 1,
            mode: TransferMode::Unicast,
        });
        for receiver in 1..=n {
            if receiver == hub {
                continue;
            }
            events.push(TransferEvent {
                phase: Phase::Phase2,
                step: step as u32,
                sender: Sender::Peer(hub as u32),
                receiver: receiver as u32,
                block: hub as u32,
                mode: TransferMode::Broadcast,
            });
        }
    }
    events
}

fn phase1_events(n: usize) -> Vec<TransferEvent> {
    (1..=n)
        .map(|i| TransferEvent {
            phase: Phase::Phase1,
            step: 0,
            sender: Sender::BaseStation,
            receiver: i as u32,
            block: i as u32,
            mode: TransferMode::Unicast,
        })
        .collect()
}

/// Run the schedule for the given topology and time every transfer.
///
/// The allocation need not be optimal; the report exposes whatever step
/// times and violations the inputs produce. Phase-2 steps are strictly
/// sequential: a step starts only when every transfer of the previous step
/// has finished.
pub fn simulate(
    cluster: &Cluster,
    block_bits: &[f64],
    peer_bw_bps: &[f64],
    topology: Topology,
) -> Result<ScheduleReport, ScheduleError> {
    let n = cluster.len();
    if block_bits.len() != n || peer_bw_bps.len() != n {
        return Err(ScheduleError::DimensionMismatch {
            peers: n,
            blocks: block_bits.len(),
            bandwidths: peer_bw_bps.len(),
        });
    }

    let events = match (n, topology) {
        (1, _) => phase1_events(1),
        (_, Topology::Mesh) => mesh_schedule(n),
        (_, Topology::Star) => star_schedule(n),
    };

    // Phase 1: parallel downloads from the base station.
    let phase1_s = events
        .iter()
        .filter(|e| e.phase == Phase::Phase1)
        .map(|e| event_duration(cluster, block_bits, peer_bw_bps, e))
        .fold(0.0, f64::max);

    let mut blocks_held: Vec<BTreeSet<u32>> = (1..=n as u32).map(|i| BTreeSet::from([i])).collect();
    let mut violations = Vec::new();
    let mut step_durations_s = Vec::with_capacity(n.saturating_sub(1));

    for step in 1..n as u32 {
        let step_events: Vec<&TransferEvent> = events
            .iter()
            .filter(|e| e.phase == Phase::Phase2 && e.step == step)
            .collect();

        // Interface constraints: one upload activity per sender (broadcasts
        // count once), one inbound sender per receiver.
        for peer in 1..=n as u32 {
            let mut unicasts = 0usize;
            let mut broadcast = false;
            let mut inbound: BTreeSet<u32> = BTreeSet::new();
            for e in &step_events {
                if e.sender == Sender::Peer(peer) {
                    match e.mode {
                        TransferMode::Unicast => unicasts += 1,
                        TransferMode::Broadcast => broadcast = true,
                    }
                }
                if e.receiver == peer {
                    if let Sender::Peer(s) = e.sender {
                        inbound.insert(s);
                    }
                }
            }
            let activities = unicasts + usize::from(broadcast);
            if activities > 1 {
                violations.push(Violation::MultipleUploads { step, peer });
            }
            if inbound.len() > 1 {
                violations.push(Violation::MultipleInboundSenders { step, peer });
            }
        }

        // Step duration: slowest transfer of the step, with the tightest
        // receiver governing a broadcast.
        let duration = step_events
            .iter()
            .map(|e| event_duration(cluster, block_bits, peer_bw_bps, e))
            .fold(0.0, f64::max);
        step_durations_s.push(duration);

        for e in &step_events {
            blocks_held[(e.receiver - 1) as usize].insert(e.block);
        }
    }

    for (idx, held) in blocks_held.iter().enumerate() {
        for block in 1..=n as u32 {
            if !held.contains(&block) {
                violations.push(Violation::MissingBlock {
                    peer: idx as u32 + 1,
                    block,
                });
            }
        }
    }

    let phase2_s: f64 = step_durations_s.iter().sum();
    Ok(ScheduleReport {
        events,
        step_durations_s,
        phase1_s,
        phase2_s,
        completion_s: phase1_s + phase2_s,
        blocks_held,
        violations,
    })
}

/// Time one transfer takes under the given allocation.
///
/// Phase-1 transfers run at `min(bw_i, d_i)`; exchanges run at
/// `min(u_sender, d_receiver)`. Broadcast rows share a sender, so the slowest
/// receiver's row governs the broadcast via the per-step maximum.
pub fn event_duration(
    cluster: &Cluster,
    block_bits: &[f64],
    peer_bw_bps: &[f64],
    event: &TransferEvent,
) -> f64 {
    let recv = (event.receiver - 1) as usize;
    match event.sender {
        Sender::BaseStation => {
            block_bits[recv] / peer_bw_bps[recv].min(cluster.peers[recv].download_bps)
        }
        Sender::Peer(i) => {
            let s = (i - 1) as usize;
            block_bits[s]
                / cluster.peers[s]
                    .upload_bps
                    .min(cluster.peers[recv].download_bps)
        }
    }
}

/// Executable form of the phases-do-not-overlap contract: every Phase-1 event
/// sits in step 0 and every Phase-2 event in a step at or after 1, so no
/// exchange can begin before the downloads are done. Holds by construction
/// for simulator output; false for hand-built overlapping event lists.
pub fn assert_two_phase_separation(report: &ScheduleReport) -> bool {
    report.events.iter().all(|e| match e.phase {
        Phase::Phase1 => e.step == 0,
        Phase::Phase2 => e.step >= 1,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleError {
    DimensionMismatch {
        peers: usize,
        blocks: usize,
        bandwidths: usize,
    },
}

impl fmt::Display for ScheduleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleError::DimensionMismatch {
                peers,
                blocks,
                bandwidths,
            } => write!(
                f,
                "{} peers but {} block sizes and {} bandwidths",
                peers, blocks, bandwidths
            ),
        }
    }
}

impl std::error::Error for ScheduleError {}
