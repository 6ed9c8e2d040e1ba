//! Product identities and exactness preservation across a pool of exact
//! graphs generated by iterating the product.

use qlrc::codes::{build_product_code, css_min_distance, hamming_7_4_parity, DEFAULT_DISTANCE_CAP};
use qlrc::gf2::BitMatrix;
use qlrc::tanner::BipartiteGraph;

fn hamming_graph() -> BipartiteGraph {
    BipartiteGraph::from_matrix(&hamming_7_4_parity())
}

fn k22() -> BipartiteGraph {
    BipartiteGraph::new(2, vec![vec![0, 1], vec![0, 1]])
}

/// Exact graphs with their locality, all satisfying the product theorem's
/// hypotheses (graph and transpose both (r, r+1, 1)-exact, r odd).
fn pool() -> Vec<(String, BipartiteGraph, usize)> {
    let k = k22();
    let h = hamming_graph();
    let kk = k.product(&k);
    let hk = h.product(&k);
    vec![
        ("k22".into(), k, 1),
        ("hamming".into(), h, 3),
        ("k22 x k22".into(), kk, 3),
        ("hamming x k22".into(), hk, 5),
    ]
}

#[test]
fn pool_members_are_exact_both_ways() {
    for (name, graph, r) in pool() {
        assert!(
            graph.check_exact(r, r + 1, 1).is_exact,
            "{name} is not ({r},{},1)-exact",
            r + 1
        );
        assert!(
            graph.transpose().check_exact(r, r + 1, 1).is_exact,
            "{name} transpose is not exact"
        );
    }
}

#[test]
fn products_of_pool_pairs_stay_exact() {
    let pool = pool();
    for (name_a, a, r_a) in &pool {
        for (name_b, b, r_b) in &pool {
            if a.bit_count() * b.bit_count() > 200 {
                continue; // keep the largest exhaustive checks tractable
            }
            let r = r_a + r_b + 1;
            let product = a.product(b);
            assert!(
                product.check_exact(r, r + 1, 1).is_exact,
                "{name_a} x {name_b} is not ({r},{},1)-exact",
                r + 1
            );
            assert!(
                product.transpose().check_exact(r, r + 1, 1).is_exact,
                "transpose of {name_a} x {name_b} is not exact"
            );
        }
    }
}

#[test]
fn product_edge_count_formula_holds_on_pool_pairs() {
    let pool = pool();
    for (_, a, _) in &pool {
        for (_, b, _) in &pool {
            let expected = a.edge_count() * (b.bit_count() + b.check_count())
                + b.edge_count() * (a.bit_count() + a.check_count());
            assert_eq!(a.product(b).edge_count(), expected);
        }
    }
}

/// Transposing the product equals taking the product with the first factor
/// transposed, as an exact matrix identity in the fixed node ordering.
#[test]
fn transpose_of_product_is_product_with_transposed_first_factor() {
    let pool = pool();
    for (name_a, a, _) in &pool {
        for (name_b, b, _) in &pool {
            let lhs = a.product(b).transpose().to_matrix();
            let rhs = a.transpose().product(b).to_matrix();
            assert_eq!(lhs, rhs, "identity failed for {name_a} x {name_b}");
        }
    }
}

/// Transposing both factors reproduces the original product after the
/// canonical block swap of bit and check labels.
#[test]
fn product_of_transposed_factors_is_block_swap_of_product() {
    let pool = pool();
    for (name_a, a, _) in &pool {
        for (name_b, b, _) in &pool {
            let (n1, m1) = (a.bit_count(), a.check_count());
            let (n2, m2) = (b.bit_count(), b.check_count());
            let plain = a.product(b).to_matrix();
            let swapped = a.transpose().product(&b.transpose()).to_matrix();
            let map_bit = |bit: usize| {
                if bit < n1 * n2 {
                    m1 * m2 + bit
                } else {
                    bit - n1 * n2
                }
            };
            let map_check = |check: usize| {
                if check < m1 * n2 {
                    n1 * m2 + check
                } else {
                    check - m1 * n2
                }
            };
            let mut relabeled = BitMatrix::zeros(plain.row_count(), plain.col_count());
            for check in 0..plain.row_count() {
                for bit in 0..plain.col_count() {
                    if plain.get(check, bit) {
                        relabeled.set(map_check(check), map_bit(bit), true);
                    }
                }
            }
            assert_eq!(
                relabeled, swapped,
                "block swap failed for {name_a} x {name_b}"
            );
        }
    }
}

#[test]
fn k22_times_hamming_distance_meets_certificate_bound() {
    let (css, cert) =
        build_product_code(&k22(), &hamming_graph(), 1, 2, 3, 4, DEFAULT_DISTANCE_CAP)
            .expect("factors satisfy the preconditions");
    assert_eq!(css.n(), 28);
    assert!(cert.appendix_all_pass());
    let d_lower = cert.d_lower.expect("factor distances are computable");
    assert_eq!(d_lower, 2);
    let kernel_dim = css.n() - css.matrix().rank();
    if kernel_dim <= DEFAULT_DISTANCE_CAP {
        let exact = css_min_distance(&css, DEFAULT_DISTANCE_CAP).unwrap();
        assert!(exact >= d_lower, "exact distance {exact} below {d_lower}");
    }
}

#[test]
fn iterated_product_parameters_follow_the_doubling_rule() {
    // One product step on the 7-node instance: r_2 = 2^2 + ... = 7,
    // n = 7^2 * 2 = 98, and the certificate dimension bound is 2^1 = 2.
    let h = hamming_graph();
    let (css, cert) = build_product_code(&h, &h, 3, 4, 3, 4, DEFAULT_DISTANCE_CAP).unwrap();
    assert_eq!(css.n(), 98);
    assert_eq!(cert.k_lower, 2);
    assert!(cert.product_exact.is_exact && cert.product_exact.r == 7);
    assert!(cert.d_lower == Some(3));
}
