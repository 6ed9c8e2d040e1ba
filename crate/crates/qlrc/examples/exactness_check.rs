//! Exactness reports for a few graphs: the smallest exact instance, the
//! bundled 7x7 instance, and a deliberately broken one with its witness.

use qlrc::codes::hamming_7_4_parity;
use qlrc::tanner::BipartiteGraph;

fn report(name: &str, graph: &BipartiteGraph, r: usize, t: usize, s: usize) {
    let result = graph.check_exact(r, t, s);
    print!(
        "{name}: regular={} exact=({r},{t},{s})? {}",
        result.is_regular, result.is_exact
    );
    match result.violations.first() {
        Some(witness) => println!("  first violation: {witness}"),
        None => println!(),
    }
}

fn main() {
    // Complete bipartite graph on 2+2 nodes: every pair of checks shares
    // both bits, so pairwise overlaps are exactly s + 1 = 2.
    let k22 = BipartiteGraph::new(2, vec![vec![0, 1], vec![0, 1]]);
    report("k22", &k22, 1, 2, 1);

    let hamming = BipartiteGraph::from_matrix(&hamming_7_4_parity());
    report("hamming", &hamming, 3, 4, 1);
    report("hamming transpose", &hamming.transpose(), 3, 4, 1);

    // The product is exact with the composed parameters.
    let product = hamming.product(&k22);
    report("hamming x k22", &product, 5, 6, 1);

    // Asking for the wrong overlap yields a concrete pair witness.
    report("hamming with s=2", &hamming, 3, 4, 2);

    // A ragged graph fails regularity before anything else.
    let ragged = BipartiteGraph::new(3, vec![vec![0, 1, 2], vec![0]]);
    report("ragged", &ragged, 2, 2, 0);
}
