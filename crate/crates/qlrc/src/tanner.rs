//! Bipartite (Tanner) graphs: construction from parity-check matrices,
//! transposition, the bipartite graph product, and the exactness checker.
//!
//! A graph holds `bit_count` bit nodes (matrix columns) and one sorted
//! adjacency list per check node (matrix row). Node indices are fixed, so
//! `to_matrix . from_matrix` is the identity.

use thiserror::Error;

use crate::gf2::BitMatrix;
use crate::recovery::RecoveryFamily;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TannerError {
    #[error("bit node {bit} has no incident check")]
    IsolatedBitNode { bit: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    bit_count: usize,
    checks: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    /// Builds a graph from per-check adjacency lists. Lists are sorted;
    /// duplicate edges are rejected.
    pub fn new(bit_count: usize, mut checks: Vec<Vec<usize>>) -> Self {
        for adj in &mut checks {
            adj.sort_unstable();
            assert!(adj.windows(2).all(|w| w[0] != w[1]), "duplicate edge");
            if let Some(&last) = adj.last() {
                assert!(last < bit_count, "bit index out of range");
            }
        }
        Self { bit_count, checks }
    }

    pub fn from_matrix(h: &BitMatrix) -> Self {
        let checks = h.row_iter().map(|row| row.support()).collect();
        Self {
            bit_count: h.col_count(),
            checks,
        }
    }

    pub fn to_matrix(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.checks.len(), self.bit_count);
        for (i, adj) in self.checks.iter().enumerate() {
            for &j in adj {
                m.set(i, j, true);
            }
        }
        m
    }

    pub fn bit_count(&self) -> usize {
        self.bit_count
    }

    pub fn check_count(&self) -> usize {
        self.checks.len()
    }

    pub fn check_neighbors(&self, check: usize) -> &[usize] {
        &self.checks[check]
    }

    pub fn edge_count(&self) -> usize {
        self.checks.iter().map(Vec::len).sum()
    }

    /// Checks incident to each bit node, sorted by check index.
    pub fn bit_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bit_count];
        for (i, neighbors) in self.checks.iter().enumerate() {
            for &j in neighbors {
                adj[j].push(i);
            }
        }
        adj
    }

    /// Swaps bit and check roles: `to_matrix(transpose(G)) = to_matrix(G)^T`.
    pub fn transpose(&self) -> Self {
        Self {
            bit_count: self.checks.len(),
            checks: self.bit_adjacency(),
        }
    }

    /// Bipartite graph product.
    ///
    /// Bit nodes are `V1 x V2` followed by `W1 x W2`, check nodes `W1 x V2`
    /// followed by `V1 x W2`, each block in lexicographic order. A bit
    /// `(x1, x2)` joins a check `(y1, y2)` iff the first coordinates agree
    /// and `x2 ~ y2` in the second factor, or the second coordinates agree
    /// and `x1 ~ y1` in the first factor.
    pub fn product(&self, other: &BipartiteGraph) -> BipartiteGraph {
        let n1 = self.bit_count;
        let m1 = self.check_count();
        let n2 = other.bit_count;
        let m2 = other.check_count();
        let bit_adj1 = self.bit_adjacency();
        let bit_adj2 = other.bit_adjacency();

        let vv = |v1: usize, v2: usize| v1 * n2 + v2;
        let ww = |w1: usize, w2: usize| n1 * n2 + w1 * m2 + w2;

        let mut checks = Vec::with_capacity(m1 * n2 + n1 * m2);
        // Block W1 x V2: G1-edges into V1 x V2, G2-edges into W1 x W2.
        for w1 in 0..m1 {
            for (v2, incident2) in bit_adj2.iter().enumerate() {
                let mut row = Vec::new();
                for &v1 in &self.checks[w1] {
                    row.push(vv(v1, v2));
                }
                for &w2 in incident2 {
                    row.push(ww(w1, w2));
                }
                row.sort_unstable();
                checks.push(row);
            }
        }
        // Block V1 x W2: G2-edges into V1 x V2, G1-edges into W1 x W2.
        for (v1, incident1) in bit_adj1.iter().enumerate() {
            for w2 in 0..m2 {
                let mut row = Vec::new();
                for &v2 in &other.checks[w2] {
                    row.push(vv(v1, v2));
                }
                for &w1 in incident1 {
                    row.push(ww(w1, w2));
                }
                row.sort_unstable();
                checks.push(row);
            }
        }
        BipartiteGraph {
            bit_count: n1 * n2 + m1 * m2,
            checks,
        }
    }

    /// Verifies the exact-(r, t, s) conditions by exhaustive enumeration:
    /// (t, r+1)-regularity, pairwise common neighbor counts in {0, s+1},
    /// and triple common neighbor counts in {0, 1}.
    pub fn check_exact(&self, r: usize, t: usize, s: usize) -> ExactnessReport {
        let mut violations = Vec::new();
        for (j, degree) in self.bit_degrees().into_iter().enumerate() {
            if degree != t {
                violations.push(ExactnessViolation::BitDegree { bit: j, degree });
            }
        }
        for (i, adj) in self.checks.iter().enumerate() {
            if adj.len() != r + 1 {
                violations.push(ExactnessViolation::CheckDegree {
                    check: i,
                    degree: adj.len(),
                });
            }
        }
        let is_regular = violations.is_empty();

        let m = self.checks.len();
        let mut overlapping_pairs = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                let common = sorted_intersection(&self.checks[i], &self.checks[j]);
                if !common.is_empty() && common.len() != s + 1 {
                    violations.push(ExactnessViolation::PairOverlap {
                        checks: (i, j),
                        common: common.len(),
                    });
                }
                if common.len() >= 2 {
                    overlapping_pairs.push((i, j, common));
                }
            }
        }
        // A triple with >= 2 common neighbors contains a pair with >= 2, so
        // extending those pairs by a third check covers every violation.
        for (i, j, common) in &overlapping_pairs {
            for k in j + 1..m {
                let triple = common
                    .iter()
                    .filter(|&&b| self.checks[k].binary_search(&b).is_ok())
                    .count();
                if triple >= 2 {
                    violations.push(ExactnessViolation::TripleOverlap {
                        checks: (*i, *j, k),
                        common: triple,
                    });
                }
            }
        }

        let is_exact = is_regular && violations.is_empty();
        ExactnessReport {
            is_regular,
            is_exact,
            r,
            t,
            s,
            violations,
        }
    }

    fn bit_degrees(&self) -> Vec<usize> {
        let mut degrees = vec![0usize; self.bit_count];
        for adj in &self.checks {
            for &j in adj {
                degrees[j] += 1;
            }
        }
        degrees
    }

    /// Recovery sets read off the graph: for every bit node `j`, the family
    /// lists the supports of the checks incident to `j`, in check order.
    pub fn recovery_family(&self) -> Result<RecoveryFamily, TannerError> {
        let bit_adj = self.bit_adjacency();
        if let Some(bit) = bit_adj.iter().position(Vec::is_empty) {
            return Err(TannerError::IsolatedBitNode { bit });
        }
        let gamma = bit_adj
            .into_iter()
            .map(|incident| {
                incident
                    .into_iter()
                    .map(|check| self.checks[check].clone())
                    .collect()
            })
            .collect();
        Ok(RecoveryFamily::new(self.bit_count, gamma))
    }
}

fn sorted_intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[x]);
                x += 1;
                y += 1;
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactnessViolation {
    BitDegree {
        bit: usize,
        degree: usize,
    },
    CheckDegree {
        check: usize,
        degree: usize,
    },
    PairOverlap {
        checks: (usize, usize),
        common: usize,
    },
    TripleOverlap {
        checks: (usize, usize, usize),
        common: usize,
    },
}

impl std::fmt::Display for ExactnessViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::BitDegree { bit, degree } => {
                write!(f, "bit-degree bit={bit} degree={degree}")
            }
            Self::CheckDegree { check, degree } => {
                write!(f, "check-degree check={check} degree={degree}")
            }
            Self::PairOverlap { checks, common } => write!(
                f,
                "pair-overlap checks=({},{}) common={common}",
                checks.0, checks.1
            ),
            Self::TripleOverlap { checks, common } => write!(
                f,
                "triple-overlap checks=({},{},{}) common={common}",
                checks.0, checks.1, checks.2
            ),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExactnessReport {
    pub is_regular: bool,
    pub is_exact: bool,
    pub r: usize,
    pub t: usize,
    pub s: usize,
    pub violations: Vec<ExactnessViolation>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;
    use rand_core::{RngCore, SeedableRng};

    fn hamming_matrix() -> BitMatrix {
        BitMatrix::from_01_strings(&[
            "1111000", "1100011", "1010101", "1001110", "0110110", "0101101", "0011011",
        ])
    }

    /// Complete bipartite graph on 2+2 nodes; the smallest (1,2,1)-exact graph.
    fn k22() -> BipartiteGraph {
        BipartiteGraph::new(2, vec![vec![0, 1], vec![0, 1]])
    }

    #[test]
    fn hamming_graph_has_expected_shape() {
        let g = BipartiteGraph::from_matrix(&hamming_matrix());
        assert_eq!(g.bit_count(), 7);
        assert_eq!(g.check_count(), 7);
        assert_eq!(g.edge_count(), 28);
    }

    #[test]
    fn zero_matrix_gives_edgeless_graph() {
        let g = BipartiteGraph::from_matrix(&BitMatrix::zeros(3, 5));
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.bit_count(), 5);
        assert_eq!(g.check_count(), 3);
    }

    #[test]
    fn matrix_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let mut m = BitMatrix::zeros(4, 6);
            for i in 0..4 {
                for j in 0..6 {
                    if rng.next_u64() & 1 == 1 {
                        m.set(i, j, true);
                    }
                }
            }
            assert_eq!(BipartiteGraph::from_matrix(&m).to_matrix(), m);
        }
    }

    #[test]
    fn transpose_is_involution_and_preserves_edges() {
        let g = BipartiteGraph::from_matrix(&hamming_matrix());
        let gt = g.transpose();
        assert_eq!(gt.edge_count(), g.edge_count());
        assert_eq!(gt.transpose(), g);
        assert_eq!(gt.to_matrix(), g.to_matrix().transposed());
    }

    #[test]
    fn hamming_graph_is_isomorphic_to_its_transpose() {
        // The matrix itself is not symmetric; the graph isomorphism is
        // found by exhaustive search over bit relabelings.
        let g = BipartiteGraph::from_matrix(&hamming_matrix());
        let gt = g.transpose();
        let mut row_supports: Vec<Vec<usize>> =
            (0..7).map(|i| g.check_neighbors(i).to_vec()).collect();
        row_supports.sort();
        let mut found = false;
        crate::recovery::for_each_permutation(7, |alpha| {
            if found {
                return;
            }
            let mut relabeled: Vec<Vec<usize>> = (0..7)
                .map(|j| {
                    let mut support: Vec<usize> =
                        gt.check_neighbors(j).iter().map(|&i| alpha[i]).collect();
                    support.sort_unstable();
                    support
                })
                .collect();
            relabeled.sort();
            if relabeled == row_supports {
                found = true;
            }
        });
        assert!(found, "no relabeling maps the transpose onto the graph");
    }

    #[test]
    fn product_node_counts() {
        let g = BipartiteGraph::from_matrix(&hamming_matrix());
        let p = g.product(&g);
        // |V1||V2| + |W1||W2| = 49 + 49
        assert_eq!(p.bit_count(), 98);
        assert_eq!(p.check_count(), 98);
    }

    #[test]
    fn product_edge_count_formula() {
        let g = BipartiteGraph::from_matrix(&hamming_matrix());
        let h = k22();
        let p = g.product(&h);
        let expected = g.edge_count() * (h.bit_count() + h.check_count())
            + h.edge_count() * (g.bit_count() + g.check_count());
        assert_eq!(p.edge_count(), expected);
    }

    #[test]
    fn product_with_isolated_vertex_factors() {
        // One isolated bit node and one isolated check node on each side.
        let a = BipartiteGraph::new(1, vec![vec![]]);
        let b = BipartiteGraph::from_matrix(&hamming_matrix());
        let p = a.product(&b);
        assert_eq!(p.bit_count(), 7 + 7);
        assert_eq!(p.check_count(), 7 + 7);
        // Every check (w1, v2) keeps only its G2-side edges into W1 x W2 and
        // every check (v1, w2) keeps only its G2-edges into V1 x V2, so the
        // edge count collapses to |E2| * (|V1| + |W1|).
        assert_eq!(p.edge_count(), b.edge_count() * 2);
    }

    #[test]
    fn hamming_is_341_exact_both_ways() {
        let g = BipartiteGraph::from_matrix(&hamming_matrix());
        assert!(g.check_exact(3, 4, 1).is_exact);
        assert!(g.transpose().check_exact(3, 4, 1).is_exact);
    }

    #[test]
    fn hamming_product_is_781_exact() {
        let g = BipartiteGraph::from_matrix(&hamming_matrix());
        let p = g.product(&g);
        assert!(p.check_exact(7, 8, 1).is_exact);
        assert!(p.transpose().check_exact(7, 8, 1).is_exact);
    }

    #[test]
    fn k22_is_121_exact() {
        let report = k22().check_exact(1, 2, 1);
        assert!(report.is_regular);
        assert!(report.is_exact);
    }

    #[test]
    fn wrong_s_reports_pair_witness() {
        let g = BipartiteGraph::from_matrix(&hamming_matrix());
        let report = g.check_exact(3, 4, 2);
        assert!(!report.is_exact);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, ExactnessViolation::PairOverlap { common: 2, .. })));
    }

    #[test]
    fn non_regular_graph_reports_degrees() {
        let g = BipartiteGraph::new(3, vec![vec![0, 1, 2], vec![0]]);
        let report = g.check_exact(2, 2, 0);
        assert!(!report.is_regular);
        assert!(!report.is_exact);
        assert!(report.violations.iter().any(|v| matches!(
            v,
            ExactnessViolation::CheckDegree {
                check: 1,
                degree: 1
            }
        )));
    }

    #[test]
    fn check_exact_is_label_order_insensitive() {
        let g = BipartiteGraph::from_matrix(&hamming_matrix());
        // Relabel bits and checks by a fixed permutation.
        let perm = [3usize, 5, 0, 6, 2, 1, 4];
        let relabeled = BipartiteGraph::new(
            7,
            perm.iter()
                .map(|&i| g.check_neighbors(i).iter().map(|&j| perm[j]).collect())
                .collect(),
        );
        assert!(relabeled.check_exact(3, 4, 1).is_exact);
    }

    #[test]
    fn recovery_family_matches_row_supports() {
        let g = BipartiteGraph::from_matrix(&hamming_matrix());
        let family = g.recovery_family().unwrap();
        // Bit 0 is covered by the first four rows, each of weight 4.
        let sets = family.sets(0);
        assert_eq!(sets.len(), 4);
        for set in sets {
            assert_eq!(set.len(), 4);
            assert!(set.contains(&0));
        }
        assert_eq!(sets[0], vec![0, 1, 2, 3]);
    }

    #[test]
    fn recovery_family_single_full_check() {
        let g = BipartiteGraph::new(4, vec![vec![0, 1, 2, 3]]);
        let family = g.recovery_family().unwrap();
        for j in 0..4 {
            assert_eq!(family.sets(j), &[vec![0, 1, 2, 3]]);
        }
    }

    #[test]
    fn isolated_bit_node_is_an_error() {
        let g = BipartiteGraph::new(3, vec![vec![0, 2]]);
        assert_eq!(
            g.recovery_family(),
            Err(TannerError::IsolatedBitNode { bit: 1 })
        );
    }
}
