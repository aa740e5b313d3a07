//! How many peers fit under a reserved bandwidth budget.
//!
//! ```bash
//! cargo run -p acide --example admission_budget
//! ```

use acide::{
    admit_max_peers, brute_force_admission, single_removal_comparison, Peer, StreamParams,
};

fn main() {
    let stream = StreamParams::new(2000.0, 0.2).unwrap();
    let users: Vec<Peer> = [10e3, 20e3, 30e3]
        .iter()
        .enumerate()
        .map(|(i, &u)| Peer::new(i as u32 + 1, 30e3, u).unwrap())
        .collect();

    println!("three candidates with uploads 10/20/30 kbps, 10 kbps stream\n");
    for budget_kbps in [17.0, 14.0, 9.0] {
        let budget = budget_kbps * 1e3;
        print!("budget {budget_kbps:>4.0} kbps -> ");
        match admit_max_peers(&users, &stream, budget) {
            Ok(result) => {
                let ids: Vec<u32> = result.admitted.iter().map(|p| p.id).collect();
                println!(
                    "{} peers {:?}, total {:.3} kbps, {} evaluation(s)",
                    result.admitted.len(),
                    ids,
                    result.allocation.total_bw_bps / 1e3,
                    result.iterations
                );
            }
            Err(e) => println!("{e}"),
        }
    }

    println!("\nremoval comparison (who hurts least to drop?):");
    for row in single_removal_comparison(&users, &stream).unwrap() {
        println!(
            "  drop peer {} (u = {:.0} kbps) -> total {:.3} kbps",
            row.removed_id,
            row.removed_upload_bps / 1e3,
            row.total_bw_bps / 1e3
        );
    }
    println!("  (dropping the slowest uploader always wins)");

    // Greedy against the exhaustive oracle on a bigger instance.
    let mut rng = acide::rng::SplitMix64::new(2024);
    let many: Vec<Peer> = (1..=12u32)
        .map(|id| Peer::new(id, 70e3, rng.next_range(8e3, 60e3)).unwrap())
        .collect();
    let budget = 13e3;
    let greedy = admit_max_peers(&many, &stream, budget).unwrap();
    let brute = brute_force_admission(&many, &stream, budget).unwrap();
    println!(
        "\n12 random candidates at 13 kbps: greedy admits {}, exhaustive admits {} \
         (evaluations: {} vs {})",
        greedy.admitted.len(),
        brute.admitted.len(),
        greedy.iterations,
        brute.iterations
    );
}
