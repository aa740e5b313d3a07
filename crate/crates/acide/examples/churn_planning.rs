//! Per-package planning while the cluster grows from 5 to 120 peers.
//!
//! ```bash
//! cargo run -p acide --example churn_planning
//! ```

use acide::{
    minimize_bandwidth, run_stream, ChurnEvent, Cluster, Peer, PeerListSnapshot, StreamParams,
};

fn peers(count: usize, upload_bps: f64, first_id: u32) -> Vec<Peer> {
    (0..count as u32)
        .map(|i| Peer::new(first_id + i, 1920e3, upload_bps).unwrap())
        .collect()
}

fn main() {
    let stream = StreamParams::new(2000.0, 0.2).unwrap();

    // Five peers to start; 55 more join for package 2, another 60 for
    // package 3. Upload means follow the reference per-size figures.
    let initial = PeerListSnapshot::new(1, peers(5, 17.8e3, 1)).unwrap();
    let events = vec![
        ChurnEvent {
            at_package: 2,
            joins: peers(55, 54.79e3, 6), // lifts the mean to ~51.7 kbps
            leaves: vec![],
            capacity_updates: vec![],
        },
        ChurnEvent {
            at_package: 3,
            joins: peers(60, 86.1e3, 61), // lifts the mean to ~68.9 kbps
            leaves: vec![],
            capacity_updates: vec![],
        },
    ];

    let run = run_stream(&initial, &events, &stream, 3).unwrap();
    println!("package   n  notif[bits]  T0[ms]  T1[ms]  T2[ms]  bw0[kbps]  bw1[kbps]");
    for plan in &run.plans {
        println!(
            "{:>7} {:>3} {:>12} {:>7.2} {:>7.2} {:>7.2} {:>10.3} {:>10.3}",
            plan.package_index,
            plan.block_bits.len(),
            plan.notification_bits,
            plan.phase0_s * 1e3,
            plan.phase1_s * 1e3,
            plan.phase2_s * 1e3,
            plan.bw0_bps / 1e3,
            plan.bw1_bps / 1e3,
        );
    }
    if let Some((package, error)) = &run.halted {
        println!("halted at package {package}: {error}");
    }

    // The notification phase is what separates the dynamic plan from the
    // static allocation of the same cluster.
    let p2 = &run.plans[1];
    let same_cluster = Cluster::new(
        [peers(5, 17.8e3, 1), peers(55, 54.79e3, 6)].concat(),
        stream,
    )
    .unwrap();
    let static_alloc = minimize_bandwidth(&same_cluster).unwrap();
    println!(
        "\npackage 2 static vs dynamic: {:.3} kbps -> {:.3} kbps \
         (notifying {} peers costs {:.2} ms of download time)",
        static_alloc.total_bw_bps / 1e3,
        p2.bw1_bps / 1e3,
        p2.block_bits.len(),
        p2.phase0_s * 1e3,
    );
    println!(
        "exchange time is identical in both cases: {:.4} ms",
        p2.phase2_s * 1e3
    );
    println!(
        "planning work per package: ~{:.1} microseconds of wall time",
        run.plans.iter().map(|p| p.solve_wall_s).sum::<f64>() / 3.0 * 1e6
    );
}
