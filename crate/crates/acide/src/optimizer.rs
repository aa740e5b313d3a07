//! Minimum-bandwidth block allocation for a fixed cluster.
//!
//! A package of `S` bits is split into one block per peer. Phase 1: the base
//! station sends block `i` to peer `i` with bandwidth `bw_i`, all in parallel,
//! finishing in `T1`. Phase 2: peers exchange blocks over `n - 1` steps,
//! finishing in `T2`, with no base-station bandwidth. The total allocated
//! bandwidth `Σ bw_i` is minimized subject to `T1 + T2 <= T`.
//!
//! The minimum is reached when every Phase-1 transfer takes the same time and
//! every transfer within a Phase-2 step takes the same time, which pins the
//! block sizes to the upper-triangular system
//!
//! ```text
//! | 1   1   ...  1    1  | |s_1|   |S|
//! | 0  a_2  ...  1    1  | |s_2|   |S|
//! | ...                  | |...| = |.|        a_k = (u_1 + ... + u_k) / u_k
//! | 0   0  ... a_n-1  1  | |   |   |S|
//! | 0   0  ...  0    a_n | |s_n|   |S|
//! ```
//!
//! solved by back-substitution, and yields
//!
//! ```text
//! T2 = (n-1) * s_i / u_i          (equal for every i)
//! T1 = T - T2
//! bw_i = s_i / T1
//! bw   = S / T1 = S / (T - ((n-1)/n) * S / u_avg)
//! ```

use crate::model::{validate, AssumptionViolation, Cluster, StreamParams};
use std::fmt;

/// Phase-1 times at or below this are treated as infeasible rather than
/// producing astronomically large bandwidths.
pub const MIN_PHASE1_S: f64 = 1e-12;

/// Optimizer output: block sizes, per-peer bandwidths, phase times, total.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    /// Block sizes `s_i` in bits, one per peer, summing to the package size.
    pub block_bits: Vec<f64>,
    /// Phase-1 bandwidth `bw_i` per peer, bits/second.
    pub peer_bw_bps: Vec<f64>,
    /// Phase-1 duration in seconds.
    pub phase1_s: f64,
    /// Phase-2 duration in seconds.
    pub phase2_s: f64,
    /// Total allocated bandwidth `Σ bw_i`, bits/second.
    pub total_bw_bps: f64,
    /// Set when the aggregate download capacity cannot absorb the package in
    /// `T1` (`Σ d_i < S / T1`). The allocation itself remains well-defined;
    /// this is a modeling flag, not an error.
    pub a3_violated: bool,
}

/// Diagonal coefficients of the block-size system.
///
/// `values[0]` is the row-1 diagonal, which is 1 (row 1 is the conservation
/// row `Σ s_i = S`). For `k >= 2`, `values[k-1] = (u_1 + ... + u_k) / u_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaCoefficients {
    pub values: Vec<f64>,
}

pub fn alpha_coefficients(cluster: &Cluster) -> AlphaCoefficients {
    let n = cluster.len();
    let mut values = Vec::with_capacity(n);
    values.push(1.0);
    let mut prefix = cluster.peers[0].upload_bps;
    for peer in &cluster.peers[1..] {
        prefix += peer.upload_bps;
        values.push(prefix / peer.upload_bps);
    }
    AlphaCoefficients { values }
}

/// Solve the triangular block-size system by back-substitution, bottom row up.
///
/// Row `n` gives `s_n = S / a_n`; each row above contributes
/// `s_k = (S - s_{k+1} - ... - s_n) / a_k`. The trailing sums make this
/// O(n^2), matching the structure of the system; no general solver is used.
pub fn solve_block_sizes(cluster: &Cluster) -> Result<Vec<f64>, OptimizerError> {
    let n = cluster.len();
    let alpha = alpha_coefficients(cluster);
    for (i, &a) in alpha.values.iter().enumerate() {
        if a == 0.0 || !a.is_finite() {
            return Err(OptimizerError::Singular { row: i + 1 });
        }
    }
    let s_total = cluster.stream.package_bits;
    let mut sizes = vec![0.0; n];
    for k in (0..n).rev() {
        let trailing: f64 = sizes[k + 1..].iter().sum();
        sizes[k] = (s_total - trailing) / alpha.values[k];
    }
    Ok(sizes)
}

/// Proportional-share block sizes `s_i = S * u_i / Σ u_j`.
///
/// This is the closed form the triangular solve must agree with; it is kept
/// as a separate code path so the two can check each other.
pub fn closed_form_block_sizes(cluster: &Cluster) -> Vec<f64> {
    let sum_u = cluster.upload_sum_bps();
    cluster
        .peers
        .iter()
        .map(|p| cluster.stream.package_bits * p.upload_bps / sum_u)
        .collect()
}

/// Phase times `(T1, T2)` for proportional block sizes.
///
/// `T2 = (n-1) * s_i / u_i` with any `i` (the ratios are equal by
/// construction); `T1 = T - T2` and must stay positive.
pub fn phase_times(cluster: &Cluster, block_bits: &[f64]) -> Result<(f64, f64), OptimizerError> {
    if block_bits.len() != cluster.len() {
        return Err(OptimizerError::DimensionMismatch {
            expected: cluster.len(),
            got: block_bits.len(),
        });
    }
    let n = cluster.len();
    let phase2_s = (n as f64 - 1.0) * block_bits[0] / cluster.peers[0].upload_bps;
    let phase1_s = cluster.stream.delay_bound_s - phase2_s;
    if phase1_s <= MIN_PHASE1_S {
        return Err(OptimizerError::Infeasible {
            phase2_s,
            delay_bound_s: cluster.stream.delay_bound_s,
        });
    }
    Ok((phase1_s, phase2_s))
}

/// Per-peer Phase-1 bandwidth `bw_i = s_i / T1`.
pub fn per_peer_bandwidth(block_bits: &[f64], phase1_s: f64) -> Vec<f64> {
    debug_assert!(phase1_s > 0.0);
    block_bits.iter().map(|&s| s / phase1_s).collect()
}

/// Full bandwidth minimization for one cluster.
///
/// Refuses clusters that violate the per-peer (A1) or cross-peer (A2) upload
/// bounds; the schedule simulator still accepts those via the general
/// `min(u_i, d_j)` forms. The livestream-ratio bound is not required up
/// front — a ratio above the mean upload either comes back infeasible or
/// yields a bandwidth above the unicast baseline, both informative.
pub fn minimize_bandwidth(cluster: &Cluster) -> Result<Allocation, OptimizerError> {
    let blocking: Vec<AssumptionViolation> = validate(cluster)
        .into_iter()
        .filter(|v| matches!(v.code(), "A1" | "A2"))
        .collect();
    if !blocking.is_empty() {
        return Err(OptimizerError::AssumptionsViolated(blocking));
    }

    let block_bits = solve_block_sizes(cluster)?;
    let (phase1_s, phase2_s) = phase_times(cluster, &block_bits)?;
    let peer_bw_bps = per_peer_bandwidth(&block_bits, phase1_s);
    let total_bw_bps = peer_bw_bps.iter().sum();
    let a3_violated = cluster.download_sum_bps() < cluster.stream.package_bits / phase1_s;

    Ok(Allocation {
        block_bits,
        peer_bw_bps,
        phase1_s,
        phase2_s,
        total_bw_bps,
        a3_violated,
    })
}

/// Bandwidth needed to serve `n` listeners without clustering: `n * S / T`.
pub fn unicast_baseline(n: usize, stream: &StreamParams) -> f64 {
    n as f64 * stream.ratio_bps()
}

#[derive(Debug, Clone, PartialEq)]
pub enum OptimizerError {
    /// Phase 2 alone meets or exceeds the delay bound.
    Infeasible {
        phase2_s: f64,
        delay_bound_s: f64,
    },
    /// A zero diagonal in the block-size system (unreachable for positive
    /// uploads; kept as a guard).
    Singular {
        row: usize,
    },
    /// The cluster fails A1/A2 and the optimizer's simplifications do not
    /// apply.
    AssumptionsViolated(Vec<AssumptionViolation>),
    DimensionMismatch {
        expected: usize,
        got: usize,
    },
}

impl fmt::Display for OptimizerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptimizerError::Infeasible {
                phase2_s,
                delay_bound_s,
            } => write!(
                f,
                "infeasible: block exchange needs {} s of the {} s delay bound",
                phase2_s, delay_bound_s
            ),
            OptimizerError::Singular { row } => {
                write!(f, "singular block-size system at row {}", row)
            }
            OptimizerError::AssumptionsViolated(list) => {
                write!(f, "cluster assumptions violated:")?;
                for v in list {
                    write!(f, " [{}]", v)?;
                }
                Ok(())
            }
            OptimizerError::DimensionMismatch { expected, got } => {
                write!(f, "expected {} block sizes, got {}", expected, got)
            }
        }
    }
}

impl std::error::Error for OptimizerError {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Peer;
    use proptest::prelude::*;

    const REL_TOL: f64 = 1e-9;

    fn rel_close(a: f64, b: f64) -> bool {
        let scale = a.abs().max(b.abs()).max(1e-300);
        (a - b).abs() / scale <= REL_TOL
    }

    fn cluster(uploads_kbps: &[f64], download_kbps: f64, s_bits: f64, t_s: f64) -> Cluster {
        let peers = uploads_kbps
            .iter()
            .enumerate()
            .map(|(i, &u)| Peer::new(i as u32 + 1, download_kbps * 1e3, u * 1e3).unwrap())
            .collect();
        Cluster::new(peers, StreamParams::new(s_bits, t_s).unwrap()).unwrap()
    }

    fn worked_cluster() -> Cluster {
        cluster(&[15.0, 17.0, 18.0, 19.0, 20.0], 20.0, 2000.0, 0.2)
    }

    #[test]
    fn alpha_values_for_worked_cluster() {
        let alpha = alpha_coefficients(&worked_cluster());
        assert_eq!(alpha.values.len(), 5);
        assert_eq!(alpha.values[0], 1.0);
        assert!(rel_close(alpha.values[1], 32.0 / 17.0));
        assert!(rel_close(alpha.values[4], 89.0 / 20.0));
    }

    #[test]
    fn alpha_equal_uploads_count_rows() {
        let c = cluster(&[7.0, 7.0, 7.0, 7.0], 10.0, 100.0, 1.0);
        let alpha = alpha_coefficients(&c);
        for (k, &a) in alpha.values.iter().enumerate().skip(1) {
            assert!(rel_close(a, (k + 1) as f64));
        }
    }

    #[test]
    fn alpha_single_peer() {
        let c = cluster(&[9.0], 10.0, 100.0, 1.0);
        assert_eq!(alpha_coefficients(&c).values, vec![1.0]);
    }

    #[test]
    fn worked_cluster_block_sizes() {
        // Independent proportional-share evaluation: s_i = 2000 * u_i / 89.
        let expected = [
            337.07865168539325,
            382.02247191011236,
            404.4943820224719,
            426.96629213483146,
            449.438202247191,
        ];
        let c = worked_cluster();
        let solved = solve_block_sizes(&c).unwrap();
        let closed = closed_form_block_sizes(&c);
        for i in 0..5 {
            assert!(
                rel_close(solved[i], expected[i]),
                "solved[{i}]={}",
                solved[i]
            );
            assert!(rel_close(closed[i], expected[i]));
        }
        let floored: Vec<i64> = solved.iter().map(|&s| s.floor() as i64).collect();
        assert_eq!(floored, vec![337, 382, 404, 426, 449]);
    }

    #[test]
    fn equal_uploads_split_evenly() {
        let c = cluster(&[20.0; 4], 20.0, 2000.0, 0.2);
        let solved = solve_block_sizes(&c).unwrap();
        for s in solved {
            assert!(rel_close(s, 500.0));
        }
    }

    #[test]
    fn single_peer_takes_whole_package() {
        let c = cluster(&[10.0], 10.0, 2000.0, 0.2);
        assert!(rel_close(solve_block_sizes(&c).unwrap()[0], 2000.0));
        assert!(rel_close(closed_form_block_sizes(&c)[0], 2000.0));
    }

    #[test]
    fn closed_form_is_proportional() {
        let c = cluster(&[1.0, 3.0], 3.0, 4.0, 10.0);
        let s = closed_form_block_sizes(&c);
        assert!(rel_close(s[0], 1.0));
        assert!(rel_close(s[1], 3.0));
    }

    #[test]
    fn worked_cluster_phase_times() {
        let c = worked_cluster();
        let s = solve_block_sizes(&c).unwrap();
        let (t1, t2) = phase_times(&c, &s).unwrap();
        assert!(rel_close(t2, 0.0898876404494382));
        assert!(rel_close(t1, 0.11011235955056181));
    }

    #[test]
    fn single_peer_has_no_phase_two() {
        let c = cluster(&[10.0], 10.0, 2000.0, 0.2);
        let s = solve_block_sizes(&c).unwrap();
        let (t1, t2) = phase_times(&c, &s).unwrap();
        assert_eq!(t2, 0.0);
        assert!(rel_close(t1, 0.2));
    }

    #[test]
    fn sixty_peer_fixed_average_times() {
        // n=60 at 51.7 kbps mean upload, ratio 10 kbps.
        let c = cluster(&[51.7; 60], 600.0, 2000.0, 0.2);
        let s = solve_block_sizes(&c).unwrap();
        let (t1, t2) = phase_times(&c, &s).unwrap();
        assert!((t2 - 0.03804).abs() < 5e-5, "t2={t2}");
        assert!((t1 - 0.16196).abs() < 5e-5, "t1={t1}");
    }

    #[test]
    fn infeasible_when_exchange_exhausts_delay_bound() {
        // Two peers at 1 kbps must exchange 1000-bit blocks: 1 s > 0.2 s.
        let c = cluster(&[1.0, 1.0], 1.0, 2000.0, 0.2);
        let s = solve_block_sizes(&c).unwrap();
        match phase_times(&c, &s) {
            Err(OptimizerError::Infeasible { phase2_s, .. }) => assert!(phase2_s >= 0.2),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn worked_cluster_bandwidths() {
        let expected_bw = [
            3061.224489795918,
            3469.3877551020405,
            3673.4693877551013,
            3877.551020408163,
            4081.6326530612237,
        ];
        let alloc = minimize_bandwidth(&worked_cluster()).unwrap();
        for (computed, expected) in alloc.peer_bw_bps.iter().zip(&expected_bw) {
            assert!(rel_close(*computed, *expected));
        }
        assert!(rel_close(alloc.total_bw_bps, 18163.26530612245));
        assert!(!alloc.a3_violated);
    }

    #[test]
    fn equal_upload_bandwidths() {
        let alloc = minimize_bandwidth(&cluster(&[20.0; 4], 20.0, 2000.0, 0.2)).unwrap();
        assert!(rel_close(alloc.phase2_s, 0.075));
        assert!(rel_close(alloc.phase1_s, 0.125));
        for bw in &alloc.peer_bw_bps {
            assert!(rel_close(*bw, 4000.0));
        }
    }

    #[test]
    fn single_peer_bandwidth_is_ratio() {
        let alloc = minimize_bandwidth(&cluster(&[10.0], 10.0, 2000.0, 0.2)).unwrap();
        assert!(rel_close(alloc.peer_bw_bps[0], 10_000.0));
        assert!(rel_close(alloc.total_bw_bps, 10_000.0));
    }

    #[test]
    fn optimizer_refuses_a2_violations() {
        let peers = vec![
            Peer::new(1, 35e3, 30e3).unwrap(),
            Peer::new(2, 50e3, 40e3).unwrap(),
        ];
        let c = Cluster::new(peers, StreamParams::new(2000.0, 0.2).unwrap()).unwrap();
        match minimize_bandwidth(&c) {
            Err(OptimizerError::AssumptionsViolated(list)) => {
                assert!(list.iter().any(|v| v.code() == "A2"));
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn a3_flag_raised_when_downloads_cannot_keep_up() {
        // Downloads barely above uploads, so Σ d_i < S / T1.
        let peers = vec![
            Peer::new(1, 10.2e3, 10e3).unwrap(),
            Peer::new(2, 10.2e3, 10e3).unwrap(),
        ];
        // T2 = 2000/20000 = 0.1 s, T1 = 0.02 s, S/T1 = 100 kbps > 20.4 kbps.
        let c = Cluster::new(peers, StreamParams::new(2000.0, 0.12).unwrap()).unwrap();
        let alloc = minimize_bandwidth(&c).unwrap();
        assert!(alloc.a3_violated);
    }

    #[test]
    fn unicast_baseline_values() {
        let s = StreamParams::new(2000.0, 0.2).unwrap();
        assert!(rel_close(unicast_baseline(5, &s), 50_000.0));
        assert!(rel_close(unicast_baseline(1, &s), 10_000.0));
        assert!(rel_close(unicast_baseline(60, &s), 600_000.0));
    }

    #[test]
    fn total_exceeds_ratio_for_multi_peer_clusters() {
        let alloc = minimize_bandwidth(&worked_cluster()).unwrap();
        assert!(alloc.total_bw_bps > 10_000.0);
    }

    #[test]
    fn joining_peer_above_threshold_lowers_total() {
        // Threshold is Σu / (n-1): above it strictly helps, at it T2 is
        // unchanged.
        let base = cluster(&[10.0, 20.0, 30.0], 100.0, 2000.0, 0.2);
        let before = minimize_bandwidth(&base).unwrap();
        let threshold = 60.0 / 2.0; // kbps

        let mut above = base.peers.clone();
        above.push(Peer::new(4, 100e3, (threshold + 0.5) * 1e3).unwrap());
        let above = Cluster::new(above, base.stream).unwrap();
        let after = minimize_bandwidth(&above).unwrap();
        assert!(after.total_bw_bps < before.total_bw_bps);

        let mut at = base.peers.clone();
        at.push(Peer::new(4, 100e3, threshold * 1e3).unwrap());
        let at = Cluster::new(at, base.stream).unwrap();
        let at_alloc = minimize_bandwidth(&at).unwrap();
        assert!(rel_close(at_alloc.phase2_s, before.phase2_s));
    }

    #[test]
    fn bw_perturbations_of_equal_budget_miss_the_deadline() {
        let alloc = minimize_bandwidth(&worked_cluster()).unwrap();
        let mut rng = crate::rng::SplitMix64::new(0x0511);
        for _ in 0..100 {
            let jitter: Vec<f64> = alloc
                .peer_bw_bps
                .iter()
                .map(|&bw| bw * (1.0 + rng.next_range(-0.3, 0.3)))
                .collect();
            let scale = alloc.total_bw_bps / jitter.iter().sum::<f64>();
            let perturbed: Vec<f64> = jitter.iter().map(|&b| b * scale).collect();
            let max_dev = perturbed
                .iter()
                .zip(&alloc.peer_bw_bps)
                .map(|(p, o)| ((p - o) / o).abs())
                .fold(0.0, f64::max);
            let phase1 = alloc
                .block_bits
                .iter()
                .zip(&perturbed)
                .map(|(&s, &bw)| s / bw)
                .fold(0.0, f64::max);
            if max_dev > 1e-9 {
                assert!(phase1 > alloc.phase1_s);
            } else {
                assert!(phase1 >= alloc.phase1_s * (1.0 - REL_TOL));
            }
        }
    }

    proptest! {
        #[test]
        fn solve_matches_closed_form(
            uploads in proptest::collection::vec(1.0f64..500.0, 1..40),
            s_bits in 100.0f64..10_000.0,
        ) {
            let peers: Vec<Peer> = uploads
                .iter()
                .enumerate()
                .map(|(i, &u)| Peer::new(i as u32 + 1, 600e3, u * 1e3).unwrap())
                .collect();
            let c = Cluster::new(peers, StreamParams::new(s_bits, 1.0).unwrap()).unwrap();
            let solved = solve_block_sizes(&c).unwrap();
            let closed = closed_form_block_sizes(&c);
            for (a, b) in solved.iter().zip(&closed) {
                prop_assert!(rel_close(*a, *b));
            }
            let sum: f64 = solved.iter().sum();
            prop_assert!(rel_close(sum, s_bits));
        }

        #[test]
        fn allocation_invariants_hold(
            uploads in proptest::collection::vec(5.0f64..200.0, 2..30),
        ) {
            let peers: Vec<Peer> = uploads
                .iter()
                .enumerate()
                .map(|(i, &u)| Peer::new(i as u32 + 1, 300e3, u * 1e3).unwrap())
                .collect();
            let c = Cluster::new(peers, StreamParams::new(2000.0, 0.2).unwrap()).unwrap();
            let alloc = minimize_bandwidth(&c).unwrap();
            let n = alloc.block_bits.len();

            // Conservation and the time partition.
            prop_assert!(rel_close(alloc.block_bits.iter().sum::<f64>(), 2000.0));
            prop_assert!(rel_close(alloc.phase1_s + alloc.phase2_s, 0.2));
            prop_assert!(rel_close(
                alloc.total_bw_bps,
                alloc.peer_bw_bps.iter().sum::<f64>()
            ));

            // Equal-time ratios in both phases.
            let t0 = alloc.block_bits[0] / alloc.peer_bw_bps[0];
            let r0 = alloc.block_bits[0] / c.peers[0].upload_bps;
            for i in 0..n {
                prop_assert!(rel_close(alloc.block_bits[i] / alloc.peer_bw_bps[i], t0));
                prop_assert!(rel_close(alloc.block_bits[i] / c.peers[i].upload_bps, r0));
            }

            // Strictly above the multicast floor for n >= 2.
            prop_assert!(alloc.total_bw_bps > 10_000.0);

            // Below the unicast ceiling whenever the ratio respects the mean
            // upload.
            if c.stream.ratio_bps() <= c.upload_avg_bps() {
                prop_assert!(alloc.total_bw_bps <= unicast_baseline(n, &c.stream) * (1.0 + REL_TOL));
            }
        }
    }
}
