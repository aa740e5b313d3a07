//! Step-by-step simulation of the two exchange topologies.
//!
//! ```bash
//! cargo run -p acide --example mesh_star_simulation
//! ```

use acide::schedule::{Phase, Sender};
use acide::{
    assert_two_phase_separation, minimize_bandwidth, simulate, Cluster, Peer, StreamParams,
    Topology,
};

fn main() {
    let stream = StreamParams::new(2000.0, 0.2).unwrap();
    let peers: Vec<Peer> = [15e3, 17e3, 18e3, 19e3, 20e3]
        .iter()
        .enumerate()
        .map(|(i, &u)| Peer::new(i as u32 + 1, 20e3, u).unwrap())
        .collect();
    let cluster = Cluster::new(peers, stream).unwrap();
    let alloc = minimize_bandwidth(&cluster).unwrap();

    for topology in [Topology::Mesh, Topology::Star] {
        let report = simulate(&cluster, &alloc.block_bits, &alloc.peer_bw_bps, topology).unwrap();
        println!("== {topology} ==");
        println!("download phase: {:.4} ms", report.phase1_s * 1e3);
        for (i, t) in report.step_durations_s.iter().enumerate() {
            let senders: Vec<String> = report
                .events
                .iter()
                .filter(|e| e.phase == Phase::Phase2 && e.step == i as u32 + 1)
                .map(|e| match e.sender {
                    Sender::Peer(p) => format!("{}->{}", p, e.receiver),
                    Sender::BaseStation => "bs".into(),
                })
                .collect();
            println!("step {}: {:.4} ms  [{}]", i + 1, t * 1e3, senders.join(" "));
        }
        println!(
            "completion {:.4} ms against the 200 ms bound; violations: {}; \
             phases separated: {}",
            report.completion_s * 1e3,
            report.violations.len(),
            assert_two_phase_separation(&report),
        );
        println!(
            "every peer holds all blocks: {}\n",
            report.blocks_held.iter().all(|h| h.len() == cluster.len())
        );
    }

    // The same total split unevenly misses the deadline: the slowest sender
    // stretches every exchange step.
    let lopsided = vec![800.0, 300.0, 300.0, 300.0, 300.0];
    let bw: Vec<f64> = lopsided.iter().map(|s| s / alloc.phase1_s).collect();
    let report = simulate(&cluster, &lopsided, &bw, Topology::Mesh).unwrap();
    println!(
        "lopsided 800/300/300/300/300 split: completion {:.2} ms (> 200 ms deadline)",
        report.completion_s * 1e3
    );
}
