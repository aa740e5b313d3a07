//! Domain types shared by every module: peers, stream parameters, clusters,
//! and the cluster assumption checks.
//!
//! All quantities are SI internally — bits, seconds, bits/second. The kbps/ms
//! figures familiar from radio planning appear only in display-mode output.

use std::fmt;

/// One cluster member: identity plus download/upload capacity.
///
/// Capacities must be strictly positive and finite; whether the peer also
/// satisfies the cluster assumptions (upload not exceeding download, etc.) is
/// reported by [`validate`], not enforced at construction, so that violating
/// inputs can be inspected rather than rejected outright.
#[derive(Debug, Clone, PartialEq)]
pub struct Peer {
    pub id: u32,
    pub download_bps: f64,
    pub upload_bps: f64,
}

impl Peer {
    pub fn new(id: u32, download_bps: f64, upload_bps: f64) -> Result<Self, ModelError> {
        if id == 0 {
            return Err(ModelError::BadPeerId);
        }
        for (name, v) in [("download_bps", download_bps), ("upload_bps", upload_bps)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::BadCapacity {
                    peer_id: id,
                    field: name,
                    value: v,
                });
            }
        }
        Ok(Self {
            id,
            download_bps,
            upload_bps,
        })
    }
}

/// Livestream package parameters: package size `S` and delay bound `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamParams {
    pub package_bits: f64,
    pub delay_bound_s: f64,
}

impl StreamParams {
    pub fn new(package_bits: f64, delay_bound_s: f64) -> Result<Self, ModelError> {
        if !(package_bits.is_finite() && package_bits > 0.0) {
            return Err(ModelError::BadStreamParam {
                field: "package_bits",
                value: package_bits,
            });
        }
        if !(delay_bound_s.is_finite() && delay_bound_s > 0.0) {
            return Err(ModelError::BadStreamParam {
                field: "delay_bound_s",
                value: delay_bound_s,
            });
        }
        Ok(Self {
            package_bits,
            delay_bound_s,
        })
    }

    /// Livestream ratio S/T: the bandwidth one unicast listener would need.
    pub fn ratio_bps(&self) -> f64 {
        self.package_bits / self.delay_bound_s
    }
}

/// Ordered peer collection plus stream parameters; the unit of optimization.
///
/// Peer order is preserved exactly as given. Modules that need a particular
/// order (admission, scenario generation) sort explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub peers: Vec<Peer>,
    pub stream: StreamParams,
}

impl Cluster {
    pub fn new(peers: Vec<Peer>, stream: StreamParams) -> Result<Self, ModelError> {
        if peers.is_empty() {
            return Err(ModelError::EmptyCluster);
        }
        let mut ids: Vec<u32> = peers.iter().map(|p| p.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            let dup = ids
                .windows(2)
                .find(|w| w[0] == w[1])
                .map(|w| w[0])
                .unwrap_or(0);
            return Err(ModelError::DuplicatePeerId(dup));
        }
        Ok(Self { peers, stream })
    }

    pub fn len(&self) -> usize {
        self.peers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peers.is_empty()
    }

    /// Mean upload bandwidth of the cluster.
    pub fn upload_avg_bps(&self) -> f64 {
        self.peers.iter().map(|p| p.upload_bps).sum::<f64>() / self.peers.len() as f64
    }

    pub fn upload_sum_bps(&self) -> f64 {
        self.peers.iter().map(|p| p.upload_bps).sum()
    }

    pub fn download_sum_bps(&self) -> f64 {
        self.peers.iter().map(|p| p.download_bps).sum()
    }
}

/// Phase-2 interconnect pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Mesh,
    Star,
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Mesh => write!(f, "mesh"),
            Topology::Star => write!(f, "star"),
        }
    }
}

/// A violated cluster assumption, reported by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum AssumptionViolation {
    /// A1: some peer uploads faster than it can download.
    UploadExceedsDownload { peer_ids: Vec<u32> },
    /// A2: the fastest upload exceeds the slowest download, so some P2P
    /// transfer would be receiver-limited.
    UploadExceedsClusterDownload {
        max_upload_bps: f64,
        min_download_bps: f64,
    },
    /// The livestream ratio S/T exceeds the cluster's mean upload, the upper
    /// bound beyond which cluster distribution loses to plain unicast.
    RatioExceedsUploadAverage { ratio_bps: f64, upload_avg_bps: f64 },
}

impl AssumptionViolation {
    /// Short stable name for reports: `A1`, `A2`, or `RATIO`.
    pub fn code(&self) -> &'static str {
        match self {
            AssumptionViolation::UploadExceedsDownload { .. } => "A1",
            AssumptionViolation::UploadExceedsClusterDownload { .. } => "A2",
            AssumptionViolation::RatioExceedsUploadAverage { .. } => "RATIO",
        }
    }
}

impl fmt::Display for AssumptionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssumptionViolation::UploadExceedsDownload { peer_ids } => {
                write!(f, "A1: upload exceeds download for peers {:?}", peer_ids)
            }
            AssumptionViolation::UploadExceedsClusterDownload {
                max_upload_bps,
                min_download_bps,
            } => write!(
                f,
                "A2: max upload {} bps exceeds min download {} bps",
                max_upload_bps, min_download_bps
            ),
            AssumptionViolation::RatioExceedsUploadAverage {
                ratio_bps,
                upload_avg_bps,
            } => write!(
                f,
                "RATIO: livestream ratio {} bps exceeds mean upload {} bps",
                ratio_bps, upload_avg_bps
            ),
        }
    }
}

/// Check the cluster assumptions and report every violation.
///
/// Pure and report-style: an empty list means the cluster is admissible for
/// the optimizer. The aggregate-download check (A3) depends on the optimized
/// Phase-1 time and is therefore flagged by the optimizer after the solve,
/// not here.
pub fn validate(cluster: &Cluster) -> Vec<AssumptionViolation> {
    let mut report = Vec::new();

    let offenders: Vec<u32> = cluster
        .peers
        .iter()
        .filter(|p| p.upload_bps > p.download_bps)
        .map(|p| p.id)
        .collect();
    if !offenders.is_empty() {
        report.push(AssumptionViolation::UploadExceedsDownload {
            peer_ids: offenders,
        });
    }

    let max_u = cluster
        .peers
        .iter()
        .map(|p| p.upload_bps)
        .fold(f64::NEG_INFINITY, f64::max);
    let min_d = cluster
        .peers
        .iter()
        .map(|p| p.download_bps)
        .fold(f64::INFINITY, f64::min);
    if max_u > min_d {
        report.push(AssumptionViolation::UploadExceedsClusterDownload {
            max_upload_bps: max_u,
            min_download_bps: min_d,
        });
    }

    let ratio = cluster.stream.ratio_bps();
    let u_avg = cluster.upload_avg_bps();
    if ratio > u_avg {
        report.push(AssumptionViolation::RatioExceedsUploadAverage {
            ratio_bps: ratio,
            upload_avg_bps: u_avg,
        });
    }

    report
}

/// Structural construction errors for the domain types.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    BadPeerId,
    BadCapacity {
        peer_id: u32,
        field: &'static str,
        value: f64,
    },
    BadStreamParam {
        field: &'static str,
        value: f64,
    },
    EmptyCluster,
    DuplicatePeerId(u32),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::BadPeerId => write!(f, "peer id must be a positive integer"),
            ModelError::BadCapacity {
                peer_id,
                field,
                value,
            } => write!(
                f,
                "peer {}: {} must be finite and > 0, got {}",
                peer_id, field, value
            ),
            ModelError::BadStreamParam { field, value } => {
                write!(f, "{} must be finite and > 0, got {}", field, value)
            }
            ModelError::EmptyCluster => write!(f, "a cluster needs at least one peer"),
            ModelError::DuplicatePeerId(id) => write!(f, "duplicate peer id {}", id),
        }
    }
}

impl std::error::Error for ModelError {}
