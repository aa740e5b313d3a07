//! Seeded scenario generation and experiment sweeps.
//!
//! Clusters are drawn with uploads and downloads uniform on configured
//! ranges, uploads sorted ascending and downloads clamped to at least the
//! largest upload, so every generated cluster satisfies the optimizer's
//! assumptions by construction. The same seed always reproduces the same
//! cluster (see [`crate::rng`] for the generator identity).

use crate::model::{Cluster, Peer, StreamParams};
use crate::optimizer::minimize_bandwidth;
use crate::rng::SplitMix64;
use std::fmt;

/// Recipe for one random cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub n: usize,
    /// Closed range uploads are drawn from, bits/second.
    pub upload_range_bps: (f64, f64),
    /// Closed range downloads are drawn from, bits/second.
    pub download_range_bps: (f64, f64),
    pub stream: StreamParams,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.n == 0 {
            return Err(ScenarioError::EmptySpec);
        }
        let (ulo, uhi) = self.upload_range_bps;
        let (dlo, dhi) = self.download_range_bps;
        if !(ulo > 0.0 && ulo <= uhi) || !(dlo > 0.0 && dlo <= dhi) {
            return Err(ScenarioError::BadRange);
        }
        // Downloads must be able to sit at or above every upload.
        if dhi < uhi {
            return Err(ScenarioError::RangeConflict {
                upload_hi_bps: uhi,
                download_hi_bps: dhi,
            });
        }
        Ok(())
    }
}

/// One sweep grid point: a cluster size/ratio pair and its optimized figures.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResultRow {
    pub n: usize,
    pub ratio_bps: f64,
    pub u_avg_bps: f64,
    pub total_bw_bps: f64,
    pub phase1_s: f64,
    pub phase2_s: f64,
    /// False when the exchange phase alone exceeds the delay bound; the
    /// bandwidth and Phase-1 columns are zeroed in that case, the exchange
    /// time is still reported.
    pub feasible: bool,
}

/// Draw a cluster from the spec: `n` uploads then `n` downloads, uploads
/// sorted ascending, downloads clamped to the largest upload, ids 1..n.
pub fn generate_cluster(spec: &ScenarioSpec) -> Result<Cluster, ScenarioError> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.seed);
    let (ulo, uhi) = spec.upload_range_bps;
    let (dlo, dhi) = spec.download_range_bps;

    let mut uploads: Vec<f64> = (0..spec.n).map(|_| rng.next_range(ulo, uhi)).collect();
    let downloads: Vec<f64> = (0..spec.n).map(|_| rng.next_range(dlo, dhi)).collect();
    uploads.sort_by(f64::total_cmp);
    let max_u = *uploads.last().expect("n >= 1");

    let peers: Vec<Peer> = uploads
        .iter()
        .zip(&downloads)
        .enumerate()
        .map(|(i, (&u, &d))| Peer::new(i as u32 + 1, d.max(max_u), u).expect("positive draws"))
        .collect();
    Cluster::new(peers, spec.stream).map_err(|e| ScenarioError::Internal(e.to_string()))
}

/// All uploads pinned to the given mean. The minimum total bandwidth depends
/// on the cluster only through `n` and the mean upload, so this reproduces
/// any figure stated in those terms exactly. Downloads sit at a comfortable
/// constant covering both the cross-peer bound and the aggregate-download
/// check.
pub fn fixed_average_cluster(n: usize, u_avg_bps: f64, stream: &StreamParams) -> Cluster {
    assert!(n >= 1, "cluster size must be at least 1");
    assert!(u_avg_bps > 0.0, "mean upload must be positive");
    let download = u_avg_bps.max(n as f64 * stream.ratio_bps());
    let peers = (1..=n as u32)
        .map(|id| Peer::new(id, download, u_avg_bps).expect("positive capacities"))
        .collect();
    Cluster::new(peers, *stream).expect("ids unique by construction")
}

/// Evaluate every (spec, ratio) grid point: the package size becomes
/// `ratio * T` with the spec's delay bound, the spec's cluster is generated
/// once and reused across ratios.
pub fn sweep(
    specs: &[ScenarioSpec],
    ratios_bps: &[f64],
) -> Result<Vec<SweepResultRow>, ScenarioError> {
    let mut rows = Vec::with_capacity(specs.len() * ratios_bps.len());
    for spec in specs {
        let cluster = generate_cluster(spec)?;
        for &ratio in ratios_bps {
            rows.push(evaluate_point(&cluster, ratio, spec.stream.delay_bound_s));
        }
    }
    Ok(rows)
}

/// Sweep companion for figure-style grid points stated as (n, mean upload).
pub fn sweep_fixed_average(
    points: &[(usize, f64)],
    stream: &StreamParams,
    ratios_bps: &[f64],
) -> Vec<SweepResultRow> {
    let mut rows = Vec::with_capacity(points.len() * ratios_bps.len());
    for &(n, u_avg) in points {
        let cluster = fixed_average_cluster(n, u_avg, stream);
        for &ratio in ratios_bps {
            rows.push(evaluate_point(&cluster, ratio, stream.delay_bound_s));
        }
    }
    rows
}

fn evaluate_point(cluster: &Cluster, ratio_bps: f64, delay_bound_s: f64) -> SweepResultRow {
    let stream = StreamParams::new(ratio_bps * delay_bound_s, delay_bound_s)
        .expect("positive ratio and delay bound");
    let scaled = Cluster::new(cluster.peers.clone(), stream).expect("same peers");
    let n = scaled.len();
    let u_avg_bps = scaled.upload_avg_bps();
    match minimize_bandwidth(&scaled) {
        Ok(alloc) => SweepResultRow {
            n,
            ratio_bps,
            u_avg_bps,
            total_bw_bps: alloc.total_bw_bps,
            phase1_s: alloc.phase1_s,
            phase2_s: alloc.phase2_s,
            feasible: true,
        },
        Err(_) => {
            let phase2_s = (n as f64 - 1.0) / n as f64 * stream.package_bits / u_avg_bps;
            SweepResultRow {
                n,
                ratio_bps,
                u_avg_bps,
                total_bw_bps: 0.0,
                phase1_s: 0.0,
                phase2_s,
                feasible: false,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioError {
    EmptySpec,
    BadRange,
    /// Clamping downloads to the largest upload is impossible.
    RangeConflict {
        upload_hi_bps: f64,
        download_hi_bps: f64,
    },
    Internal(String),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::EmptySpec => write!(f, "scenario needs n >= 1"),
            ScenarioError::BadRange => write!(f, "ranges must be positive with lo <= hi"),
            ScenarioError::RangeConflict {
                upload_hi_bps,
                download_hi_bps,
            } => write!(
                f,
                "download range top {} bps is below upload range top {} bps",
                download_hi_bps, upload_hi_bps
            ),
            ScenarioError::Internal(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for ScenarioError {}
