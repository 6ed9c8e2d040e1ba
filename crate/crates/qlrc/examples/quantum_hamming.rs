//! Build the 7-qubit code from the bundled parity-check matrix and walk
//! erased-qubit errors through its recovery channels.

use qlrc::codes::{
    css_from_self_orthogonal, css_min_distance, hamming_7_4_parity, simulate_erasure_recovery,
    DEFAULT_DISTANCE_CAP,
};
use qlrc::tanner::BipartiteGraph;

fn main() {
    let h = hamming_7_4_parity();
    let graph = BipartiteGraph::from_matrix(&h);
    println!(
        "Tanner graph: {} bits, {} checks, exact (3,4,1): {}",
        graph.bit_count(),
        graph.check_count(),
        graph.check_exact(3, 4, 1).is_exact
    );

    let family = graph.recovery_family().unwrap();
    let css = css_from_self_orthogonal(&h, Some(family.clone())).unwrap();
    let distance = css_min_distance(&css, DEFAULT_DISTANCE_CAP).unwrap();
    println!("CSS code: n={} k={} d={}", css.n(), css.k(), distance);

    let qubit = 2;
    println!("recovery sets of qubit {qubit}: {:?}", family.sets(qubit));
    for l in 0..family.sets(qubit).len() {
        let outcomes: Vec<String> = [
            (false, false, "I"),
            (true, false, "X"),
            (false, true, "Z"),
            (true, true, "Y"),
        ]
        .into_iter()
        .map(|(a, b, label)| {
            let recovered = simulate_erasure_recovery(&css, qubit, l, a, b).unwrap();
            format!("{label}:{}", if recovered { "ok" } else { "FAIL" })
        })
        .collect();
        println!("  set {l}: {}", outcomes.join(" "));
    }
}
