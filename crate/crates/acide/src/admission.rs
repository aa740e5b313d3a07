//! Peer admission under a reserved bandwidth budget.
//!
//! Given `N` candidate users and a budget `BW`, admit as many as possible
//! while the minimized allocation stays within budget. The greedy strategy
//! starts from the full set and repeatedly drops the lowest-upload user; the
//! exhaustive search enumerates subsets and serves as the optimality oracle
//! at small `N`.

use crate::model::{validate, AssumptionViolation, Cluster, Peer, StreamParams};
use crate::optimizer::{minimize_bandwidth, Allocation, OptimizerError};
use std::fmt;

/// Largest user count accepted by the exhaustive search.
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissionResult {
    /// Admitted peers in their original relative order.
    pub admitted: Vec<Peer>,
    /// Allocation for the admitted set.
    pub allocation: Allocation,
    /// The budget the admission ran against.
    pub reserved_bw_bps: f64,
    /// Peers dropped by the greedy loop, in removal order.
    pub removed: Vec<Peer>,
    /// Number of bandwidth evaluations performed.
    pub iterations: usize,
}

/// Greedy admission: evaluate the full set, then drop the lowest-upload user
/// until the total fits the budget.
///
/// Clusters whose exchange phase alone exceeds the delay bound count as
/// over-budget and trigger a removal, so oversized low-upload sets shrink to
/// a feasible core instead of aborting. Ties on the lowest upload drop the
/// highest id, which keeps runs reproducible; the resulting bandwidth is the
/// same either way because the total depends only on the upload sum.
pub fn admit_max_peers(
    users: &[Peer],
    stream: &StreamParams,
    reserved_bw_bps: f64,
) -> Result<AdmissionResult, AdmissionError> {
    let mut candidates = check_users(users, stream)?;
    let mut removed = Vec::new();
    let mut iterations = 0;

    loop {
        let cluster = Cluster::new(candidates.clone(), *stream).expect("nonempty, unique ids");
        iterations += 1;
        match minimize_bandwidth(&cluster) {
            Ok(allocation) if allocation.total_bw_bps <= reserved_bw_bps => {
                return Ok(AdmissionResult {
                    admitted: candidates,
                    allocation,
                    reserved_bw_bps,
                    removed,
                    iterations,
                });
            }
            Ok(_) | Err(OptimizerError::Infeasible { .. }) => {
                if candidates.len() == 1 {
                    return Err(AdmissionError::NoFeasibleCluster {
                        reserved_bw_bps,
                        single_peer_bw_bps: stream.ratio_bps(),
                    });
                }
                let idx = lowest_upload_index(&candidates);
                removed.push(candidates.remove(idx));
            }
            Err(e) => return Err(AdmissionError::Optimizer(e)),
        }
    }
}

/// Exhaustive subset search, the oracle for the greedy strategy.
///
/// Returns a maximum-cardinality subset fitting the budget; among those, one
/// of minimum total bandwidth; remaining ties go to the lexicographically
/// smallest sorted id sequence.
pub fn brute_force_admission(
    users: &[Peer],
    stream: &StreamParams,
    reserved_bw_bps: f64,
) -> Result<AdmissionResult, AdmissionError> {
    let candidates = check_users(users, stream)?;
    let n = candidates.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(AdmissionError::SizeLimit {
            n,
            max: BRUTE_FORCE_LIMIT,
        });
    }

    let mut best: Option<(Vec<usize>, Allocation, Vec<u32>)> = None;
    let mut iterations = 0;
    for mask in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let peers: Vec<Peer> = subset.iter().map(|&i| candidates[i].clone()).collect();
        let cluster = Cluster::new(peers, *stream).expect("nonempty, unique ids");
        iterations += 1;
        let allocation = match minimize_bandwidth(&cluster) {
            Ok(a) if a.total_bw_bps <= reserved_bw_bps => a,
            Ok(_) | Err(OptimizerError::Infeasible { .. }) => continue,
            Err(e) => return Err(AdmissionError::Optimizer(e)),
        };
        let mut ids: Vec<u32> = subset.iter().map(|&i| candidates[i].id).collect();
        ids.sort_unstable();
        let better = match &best {
            None => true,
            Some((cur, cur_alloc, cur_ids)) => {
                subset.len() > cur.len()
                    || (subset.len() == cur.len()
                        && (allocation.total_bw_bps < cur_alloc.total_bw_bps
                            || (allocation.total_bw_bps == cur_alloc.total_bw_bps
                                && ids < *cur_ids)))
            }
        };
        if better {
            best = Some((subset, allocation, ids));
        }
    }

    match best {
        Some((subset, allocation, _)) => {
            let admitted: Vec<Peer> = subset.iter().map(|&i| candidates[i].clone()).collect();
            let removed: Vec<Peer> = (0..n)
                .filter(|i| !subset.contains(i))
                .map(|i| candidates[i].clone())
                .collect();
            Ok(AdmissionResult {
                admitted,
                allocation,
                reserved_bw_bps,
                removed,
                iterations,
            })
        }
        None => Err(AdmissionError::NoFeasibleCluster {
            reserved_bw_bps,
            single_peer_bw_bps: stream.ratio_bps(),
        }),
    }
}

/// Resulting total bandwidth after removing each peer in turn.
///
/// Infeasible remainders report `f64::INFINITY`. The row with the smallest
/// total always belongs to a peer of minimum upload.
pub fn single_removal_comparison(
    users: &[Peer],
    stream: &StreamParams,
) -> Result<Vec<RemovalOutcome>, AdmissionError> {
    let candidates = check_users(users, stream)?;
    if candidates.len() < 2 {
        return Err(AdmissionError::NeedAtLeastTwo);
    }
    let mut rows = Vec::with_capacity(candidates.len());
    for skip in 0..candidates.len() {
        let peers: Vec<Peer> = candidates
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, p)| p.clone())
            .collect();
        let cluster = Cluster::new(peers, *stream).expect("nonempty, unique ids");
        let total = match minimize_bandwidth(&cluster) {
            Ok(a) => a.total_bw_bps,
            Err(OptimizerError::Infeasible { .. }) => f64::INFINITY,
            Err(e) => return Err(AdmissionError::Optimizer(e)),
        };
        rows.push(RemovalOutcome {
            removed_id: candidates[skip].id,
            removed_upload_bps: candidates[skip].upload_bps,
            total_bw_bps: total,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemovalOutcome {
    pub removed_id: u32,
    pub removed_upload_bps: f64,
    pub total_bw_bps: f64,
}

fn check_users(users: &[Peer], stream: &StreamParams) -> Result<Vec<Peer>, AdmissionError> {
    if users.is_empty() {
        return Err(AdmissionError::NoUsers);
    }
    let cluster = Cluster::new(users.to_vec(), *stream)
        .map_err(|e| AdmissionError::BadUsers(e.to_string()))?;
    let blocking: Vec<AssumptionViolation> = validate(&cluster)
        .into_iter()
        .filter(|v| matches!(v.code(), "A1" | "A2"))
        .collect();
    if !blocking.is_empty() {
        return Err(AdmissionError::Optimizer(
            OptimizerError::AssumptionsViolated(blocking),
        ));
    }
    Ok(cluster.peers)
}

/// Index of the peer to drop: minimum upload, ties resolved to the highest
/// id.
fn lowest_upload_index(peers: &[Peer]) -> usize {
    let mut best = 0;
    for (i, p) in peers.iter().enumerate().skip(1) {
        let b = &peers[best];
        if p.upload_bps < b.upload_bps || (p.upload_bps == b.upload_bps && p.id > b.id) {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub enum AdmissionError {
    /// Even a single peer needs more than the reserved budget.
    NoFeasibleCluster {
        reserved_bw_bps: f64,
        single_peer_bw_bps: f64,
    },
    /// Exhaustive search refused: too many subsets.
    SizeLimit {
        n: usize,
        max: usize,
    },
    NoUsers,
    NeedAtLeastTwo,
    BadUsers(String),
    Optimizer(OptimizerError),
}

impl fmt::Display for AdmissionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdmissionError::NoFeasibleCluster {
                reserved_bw_bps,
                single_peer_bw_bps,
            } => write!(
                f,
                "no feasible cluster: one peer needs {} bps but only {} bps are reserved",
                single_peer_bw_bps, reserved_bw_bps
            ),
            AdmissionError::SizeLimit { n, max } => {
                write!(
                    f,
                    "{} users exceed the exhaustive-search limit of {}",
                    n, max
                )
            }
            AdmissionError::NoUsers => write!(f, "no candidate users"),
            AdmissionError::NeedAtLeastTwo => {
                write!(f, "need at least two users to compare removals")
            }
            AdmissionError::BadUsers(e) => write!(f, "bad candidate users: {}", e),
            AdmissionError::Optimizer(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for AdmissionError {}
