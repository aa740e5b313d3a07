//! Minimum-bandwidth allocation for a five-peer cluster.
//!
//! ```bash
//! cargo run -p acide --example optimize_cluster
//! ```

use acide::{
    alpha_coefficients, closed_form_block_sizes, minimize_bandwidth, solve_block_sizes,
    unicast_baseline, validate, Cluster, Peer, StreamParams,
};

fn main() {
    // 2000-bit packages under a 200 ms playback deadline: a 10 kbps stream.
    let stream = StreamParams::new(2000.0, 0.2).unwrap();
    let peers: Vec<Peer> = [15e3, 17e3, 18e3, 19e3, 20e3]
        .iter()
        .enumerate()
        .map(|(i, &u)| Peer::new(i as u32 + 1, 20e3, u).unwrap())
        .collect();
    let cluster = Cluster::new(peers, stream).unwrap();

    let report = validate(&cluster);
    println!("assumption violations: {}", report.len());

    let alpha = alpha_coefficients(&cluster);
    println!("\ndiagonal coefficients of the block-size system:");
    for (k, a) in alpha.values.iter().enumerate() {
        println!("  a_{} = {:.5}", k + 1, a);
    }

    // Two independent routes to the block sizes.
    let solved = solve_block_sizes(&cluster).unwrap();
    let closed = closed_form_block_sizes(&cluster);
    println!("\nblock sizes (triangular solve vs proportional closed form):");
    for i in 0..cluster.len() {
        println!(
            "  s_{} = {:10.4} bits   | {:10.4} bits",
            i + 1,
            solved[i],
            closed[i]
        );
    }

    let alloc = minimize_bandwidth(&cluster).unwrap();
    println!("\nphase split of the 200 ms deadline:");
    println!("  download phase T1 = {:.3} ms", alloc.phase1_s * 1e3);
    println!("  exchange phase T2 = {:.3} ms", alloc.phase2_s * 1e3);

    println!("\nper-peer base-station bandwidth:");
    for (i, bw) in alloc.peer_bw_bps.iter().enumerate() {
        println!("  bw_{} = {:.3} kbps", i + 1, bw / 1e3);
    }
    println!("\ntotal allocated: {:.3} kbps", alloc.total_bw_bps / 1e3);
    println!(
        "unicast would need: {:.1} kbps ({:.1}x more)",
        unicast_baseline(cluster.len(), &stream) / 1e3,
        unicast_baseline(cluster.len(), &stream) / alloc.total_bw_bps
    );
    println!(
        "aggregate download check: {}",
        if alloc.a3_violated { "VIOLATED" } else { "ok" }
    );
}
