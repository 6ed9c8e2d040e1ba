//! Classical linear codes, CSS code construction from self-orthogonal
//! parity checks, the graph-product code with its certificate, subspace
//! certification of the product kernel, distance oracles, and the
//! Pauli-frame erasure-recovery simulation.

use thiserror::Error;

use crate::gf2::{tensor_vector, BitMatrix, BitVec, SubspaceBasis};
use crate::recovery::RecoveryFamily;
use crate::tanner::{BipartiteGraph, ExactnessReport};

/// Largest dimension enumerated exactly by the distance oracles.
pub const DEFAULT_DISTANCE_CAP: usize = 22;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodesError {
    #[error("enumeration dimension {dim} exceeds the cap of {cap}")]
    TooLarge { dim: usize, cap: usize },
    #[error("matrix is not self-orthogonal (H * H^T != 0)")]
    NotSelfOrthogonal,
    #[error("code carries no recovery family")]
    NoRecoveryFamily,
    #[error("index out of range: {what}")]
    IndexOutOfRange { what: String },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
}

/// The bundled 7x7 parity-check matrix whose rows and columns all have
/// weight 4; its kernel is the classical (7,4,3) Hamming code.
pub fn hamming_7_4_parity() -> BitMatrix {
    crate::pcm::parse_pcm(include_str!("../data/hamming7.pcm")).expect("bundled matrix parses")
}

/// A classical binary linear code presented by a parity-check matrix.
#[derive(Clone, Debug)]
pub struct LinearCode {
    n: usize,
    parity: BitMatrix,
    dimension: usize,
    generator: SubspaceBasis,
}

impl LinearCode {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn parity(&self) -> &BitMatrix {
        &self.parity
    }

    pub fn generator(&self) -> &SubspaceBasis {
        &self.generator
    }
}

/// The code `ker(H)` with dimension `cols - rank(H)`.
pub fn classical_from_parity(h: &BitMatrix) -> LinearCode {
    let generator = h.kernel_basis();
    LinearCode {
        n: h.col_count(),
        dimension: generator.dim(),
        parity: h.clone(),
        generator,
    }
}

/// Minimum Hamming weight over all nonzero codewords by Gray-code
/// enumeration. A dimension-0 code gets the sentinel `n + 1` ("infinite").
pub fn min_distance(code: &LinearCode, cap: usize) -> Result<usize, CodesError> {
    if code.dimension == 0 {
        return Ok(code.n + 1);
    }
    // 63 is a hard ceiling: the Gray walk indexes combinations in a u64.
    if code.dimension > cap.min(63) {
        return Err(CodesError::TooLarge {
            dim: code.dimension,
            cap,
        });
    }
    let basis = code.generator.vectors();
    let mut current = BitVec::zeros(code.n);
    let mut best = usize::MAX;
    for step in 1u64..1u64 << code.dimension {
        current.xor_assign(&basis[step.trailing_zeros() as usize]);
        best = best.min(current.weight());
    }
    Ok(best)
}

/// Static local-recoverability criterion: for every position `j` and every
/// recovery set, some vector of the parity row space is supported inside
/// the set and nonzero at `j`. When the static criterion holds it is
/// re-validated dynamically by reconstructing random codewords.
pub fn verify_lrc(code: &LinearCode, family: &RecoveryFamily) -> bool {
    assert_eq!(
        family.position_count(),
        code.n,
        "family and code must agree on length"
    );
    let mut local_checks: Vec<(usize, BitVec)> = Vec::new();
    for j in 0..code.n {
        for set in family.sets(j) {
            match local_check_vector(&code.parity, set, j) {
                Some(h) => local_checks.push((j, h)),
                None => return false,
            }
        }
    }
    dynamic_reconstruction_check(code, &local_checks)
}

/// A vector of `row(H)` supported inside `set` with a 1 at `j`, when one
/// exists. Coefficient vectors `y` with `supp(y^T H) ⊆ set` form the kernel
/// of the outside columns; the functional `y -> (y^T H)[j]` is nonzero on
/// that kernel iff it is nonzero on some basis element.
fn local_check_vector(parity: &BitMatrix, set: &[usize], j: usize) -> Option<BitVec> {
    let inside = |col: usize| set.binary_search(&col).is_ok();
    let outside: Vec<usize> = (0..parity.col_count()).filter(|&c| !inside(c)).collect();
    let mut outside_t = BitMatrix::zeros(outside.len(), parity.row_count());
    for (row, &col) in outside.iter().enumerate() {
        for i in 0..parity.row_count() {
            if parity.get(i, col) {
                outside_t.set(row, i, true);
            }
        }
    }
    for y in outside_t.kernel_basis().vectors() {
        let mut h = BitVec::zeros(parity.col_count());
        for i in y.support() {
            h.xor_assign(parity.row(i));
        }
        if h.get(j) {
            return Some(h);
        }
    }
    None
}

fn dynamic_reconstruction_check(code: &LinearCode, local_checks: &[(usize, BitVec)]) -> bool {
    use rand_core::{RngCore, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x1c0de);
    for _ in 0..100 {
        let mut word = BitVec::zeros(code.n);
        for basis_vector in code.generator.vectors() {
            if rng.next_u64() & 1 == 1 {
                word.xor_assign(basis_vector);
            }
        }
        for (j, h) in local_checks {
            let mut parity = false;
            for i in h.support() {
                if i != *j {
                    parity ^= word.get(i);
                }
            }
            if parity != word.get(*j) {
                return false;
            }
        }
    }
    true
}

/// Exact distance or a certified lower bound with its origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DistanceInfo {
    Exact(usize),
    LowerBound { value: usize, provenance: String },
}

/// A CSS code with identical X and Z parity checks.
#[derive(Clone, Debug)]
pub struct CssCode {
    n: usize,
    h: BitMatrix,
    k: usize,
    pub distance: Option<DistanceInfo>,
    recovery: Option<RecoveryFamily>,
}

impl CssCode {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.h
    }

    pub fn recovery(&self) -> Option<&RecoveryFamily> {
        self.recovery.as_ref()
    }
}

/// CSS code with `H_X = H_Z = H`; requires `H H^T = 0`. The dimension is
/// `k = n - 2 rank(H)`.
pub fn css_from_self_orthogonal(
    h: &BitMatrix,
    recovery: Option<RecoveryFamily>,
) -> Result<CssCode, CodesError> {
    if !h.is_self_orthogonal() {
        return Err(CodesError::NotSelfOrthogonal);
    }
    if let Some(family) = &recovery {
        assert_eq!(
            family.position_count(),
            h.col_count(),
            "recovery family length mismatch"
        );
    }
    let n = h.col_count();
    let k = n - 2 * h.rank();
    Ok(CssCode {
        n,
        h: h.clone(),
        k,
        distance: None,
        recovery,
    })
}

/// Minimum weight over `ker(H) \ row(H)`. With `H_X = H_Z` the X and Z
/// sides coincide, so this single value is the code distance. Enumerates
/// `2^(dim ker H)` words; the cap guards the kernel dimension. `k = 0`
/// codes get the sentinel `n + 1`.
pub fn css_min_distance(css: &CssCode, cap: usize) -> Result<usize, CodesError> {
    if css.k == 0 {
        return Ok(css.n + 1);
    }
    let kernel_dim = css.n - css.h.rank();
    // 63 is a hard ceiling: both Gray walks index combinations in a u64.
    if kernel_dim > cap.min(63) {
        return Err(CodesError::TooLarge {
            dim: kernel_dim,
            cap,
        });
    }
    let complement = css
        .h
        .complement_in_kernel()
        .expect("CSS matrix is self-orthogonal");
    let rows = css.h.row_space_basis();
    let mut best = usize::MAX;
    let mut logical = BitVec::zeros(css.n);
    // Every element of ker(H) \ row(H) is uniquely (nonzero complement
    // part) + (row-space part); Gray-walk both factors.
    for outer in 1u64..1u64 << complement.dim() {
        logical.xor_assign(&complement.vectors()[outer.trailing_zeros() as usize]);
        let mut word = logical.clone();
        best = best.min(word.weight());
        for inner in 1u64..1u64 << rows.dim() {
            word.xor_assign(&rows.vectors()[inner.trailing_zeros() as usize]);
            best = best.min(word.weight());
        }
    }
    Ok(best)
}

/// Commutation-parity syndromes `(s_z, s_x)` of the error `X_j^a Z_j^b`
/// against the stabilizer pair built from the `l`-th check row incident to
/// `j`: the Z-type copy flags the X component (`s_z = a * h[j]`) and the
/// X-type copy flags the Z component (`s_x = b * h[j]`).
pub fn erasure_syndrome(
    css: &CssCode,
    j: usize,
    l: usize,
    x_part: bool,
    z_part: bool,
) -> Result<(bool, bool), CodesError> {
    let family = css.recovery.as_ref().ok_or(CodesError::NoRecoveryFamily)?;
    if j >= css.n {
        return Err(CodesError::IndexOutOfRange {
            what: format!("position {j} of {}", css.n),
        });
    }
    if l >= family.sets(j).len() {
        return Err(CodesError::IndexOutOfRange {
            what: format!("recovery index {l} of {}", family.sets(j).len()),
        });
    }
    let incident: Vec<usize> = (0..css.h.row_count())
        .filter(|&i| css.h.get(i, j))
        .collect();
    let Some(&row) = incident.get(l) else {
        return Err(CodesError::IndexOutOfRange {
            what: format!("check row {l} incident to position {j}"),
        });
    };
    debug_assert_eq!(css.h.row(row).support(), family.sets(j)[l]);
    let h_j = css.h.get(row, j);
    Ok((x_part && h_j, z_part && h_j))
}

/// Pauli-frame simulation of one erasure-recovery channel.
///
/// The four eigenvalue patterns of the measured stabilizer pair
/// distinguish I, X, Y, Z on the erased qubit; the decoder reads the
/// error off the syndromes and applies its inverse. Returns whether the
/// residual error is trivial.
pub fn simulate_erasure_recovery(
    css: &CssCode,
    j: usize,
    l: usize,
    x_part: bool,
    z_part: bool,
) -> Result<bool, CodesError> {
    let (syndrome_z, syndrome_x) = erasure_syndrome(css, j, l, x_part, z_part)?;
    let inferred = (syndrome_z, syndrome_x);
    let residual = (x_part ^ inferred.0, z_part ^ inferred.1);
    Ok(residual == (false, false))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AppendixLemma {
    /// `row(H) ⊆ ker(H)` for the product matrix.
    RowSpaceInKernel,
    /// Both embedded tensor spaces land inside `ker(H)`.
    TensorEmbeddingsInKernel,
    /// The embedded spaces meet each other and `row(H)` only in 0.
    TrivialIntersections,
    /// `n - 2 rank(H)` is at least the sum of the embedded dimensions.
    RankInequality,
}

impl std::fmt::Display for AppendixLemma {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::RowSpaceInKernel => "row-space-in-kernel",
            Self::TensorEmbeddingsInKernel => "tensor-embeddings-in-kernel",
            Self::TrivialIntersections => "trivial-intersections",
            Self::RankInequality => "rank-inequality",
        })
    }
}

#[derive(Clone, Debug)]
pub struct AppendixCheck {
    pub id: AppendixLemma,
    pub pass: bool,
    pub dims: Vec<usize>,
}

/// Certificate for a product code: the node-count identity, dimension
/// bounds, factor-distance lower bound, exactness of the product and its
/// transpose, and the kernel-subspace report.
#[derive(Clone, Debug)]
pub struct ProductCertificate {
    pub n_formula_ok: bool,
    pub k_lower: usize,
    pub k_actual: usize,
    /// `None` when some factor distance was above the enumeration cap.
    pub d_lower: Option<usize>,
    pub product_exact: ExactnessReport,
    pub transpose_exact: ExactnessReport,
    pub appendix: Vec<AppendixCheck>,
}

impl ProductCertificate {
    pub fn appendix_all_pass(&self) -> bool {
        self.appendix.iter().all(|check| check.pass)
    }
}

fn require_exact_factor(
    name: &str,
    graph: &BipartiteGraph,
    r: usize,
    t: usize,
) -> Result<(), CodesError> {
    let report = graph.check_exact(r, t, 1);
    if !report.is_exact {
        let detail = report
            .violations
            .first()
            .map(|v| v.to_string())
            .unwrap_or_else(|| "not regular".to_string());
        return Err(CodesError::PreconditionFailed(format!(
            "{name} is not ({r},{t},1)-exact: {detail}"
        )));
    }
    Ok(())
}

/// Builds the CSS code of the product graph and certifies its parameters.
///
/// Both factors and their transposes must be `(r_i, t_i = r_i + 1, 1)`-exact
/// with odd `r_i`. The certificate records `n = |W1||W2| + |V1||V2|`, the
/// dimension bound, a distance lower bound from the four factor codes, the
/// exactness of the product with `(r1+r2+1, r1+r2+2, 1)`, and the appendix
/// subspace report.
pub fn build_product_code(
    g1: &BipartiteGraph,
    g2: &BipartiteGraph,
    r1: usize,
    t1: usize,
    r2: usize,
    t2: usize,
    distance_cap: usize,
) -> Result<(CssCode, ProductCertificate), CodesError> {
    if t1 != r1 + 1 || t2 != r2 + 1 {
        return Err(CodesError::PreconditionFailed(format!(
            "availability must equal r + 1: got (r1={r1}, t1={t1}), (r2={r2}, t2={t2})"
        )));
    }
    if r1.is_multiple_of(2) || r2.is_multiple_of(2) {
        return Err(CodesError::PreconditionFailed(format!(
            "factor localities must be odd: r1={r1}, r2={r2}"
        )));
    }
    require_exact_factor("first factor", g1, r1, t1)?;
    require_exact_factor("first factor transpose", &g1.transpose(), r1, t1)?;
    require_exact_factor("second factor", g2, r2, t2)?;
    require_exact_factor("second factor transpose", &g2.transpose(), r2, t2)?;

    let product = g1.product(g2);
    let h = product.to_matrix();
    let family = product
        .recovery_family()
        .expect("product of exact factors has no isolated bit");

    let r = r1 + r2 + 1;
    let product_exact = product.check_exact(r, r + 1, 1);
    let transpose_exact = product.transpose().check_exact(r, r + 1, 1);

    let h1 = g1.to_matrix();
    let h2 = g2.to_matrix();
    let (n1, m1) = (g1.bit_count(), g1.check_count());
    let (n2, m2) = (g2.bit_count(), g2.check_count());
    let (rank1, rank2) = (h1.rank(), h2.rank());
    let k_lower = (n1 - 2 * rank1) * (m1 - 2 * rank1) + (n2 - 2 * rank2) * (m2 - 2 * rank2);

    let factor_distances: Vec<Option<usize>> = [&h1, &h2, &h1.transposed(), &h2.transposed()]
        .into_iter()
        .map(|m| min_distance(&classical_from_parity(m), distance_cap).ok())
        .collect();
    let d_lower = factor_distances
        .iter()
        .copied()
        .collect::<Option<Vec<usize>>>()
        .map(|ds| ds.into_iter().min().expect("four factor codes"));

    let appendix = appendix_checks(&h, &h1, &h2)?;
    let mut css = css_from_self_orthogonal(&h, Some(family))?;
    css.distance = d_lower.map(|value| DistanceInfo::LowerBound {
        value,
        provenance: "minimum distance over the four factor codes".to_string(),
    });
    let certificate = ProductCertificate {
        n_formula_ok: css.n == m1 * m2 + n1 * n2,
        k_lower,
        k_actual: css.k,
        d_lower,
        product_exact,
        transpose_exact,
        appendix,
    };
    Ok((css, certificate))
}

/// Runs the kernel-subspace certification for the product of two graphs.
pub fn verify_appendix_subspaces(
    g1: &BipartiteGraph,
    g2: &BipartiteGraph,
) -> Result<Vec<AppendixCheck>, CodesError> {
    let h1 = g1.to_matrix();
    let h2 = g2.to_matrix();
    let h = g1.product(g2).to_matrix();
    appendix_checks(&h, &h1, &h2)
}

/// Embeds a length `n1*n2` vector into the leading product coordinates.
fn embed_vv(v: &BitVec, total: usize) -> BitVec {
    let mut out = BitVec::zeros(total);
    for i in v.support() {
        out.set(i, true);
    }
    out
}

/// Embeds a length `m1*m2` vector into the trailing product coordinates.
fn embed_ww(v: &BitVec, total: usize, offset: usize) -> BitVec {
    let mut out = BitVec::zeros(total);
    for i in v.support() {
        out.set(offset + i, true);
    }
    out
}

/// The four kernel-subspace checks against an explicitly given product
/// matrix; separated from the graph entry point so corrupted matrices can
/// be audited directly.
pub(crate) fn appendix_checks(
    h: &BitMatrix,
    h1: &BitMatrix,
    h2: &BitMatrix,
) -> Result<Vec<AppendixCheck>, CodesError> {
    let (n1, m1) = (h1.col_count(), h1.row_count());
    let (n2, m2) = (h2.col_count(), h2.row_count());
    let total = h.col_count();
    assert_eq!(total, n1 * n2 + m1 * m2, "product shape mismatch");
    let offset = n1 * n2;

    let rank_h = h.rank();
    let mut checks = Vec::with_capacity(4);
    checks.push(AppendixCheck {
        id: AppendixLemma::RowSpaceInKernel,
        pass: h.is_self_orthogonal(),
        dims: vec![rank_h, total - rank_h],
    });

    let not_self_orthogonal =
        |_| CodesError::PreconditionFailed("factor matrix is not self-orthogonal".to_string());
    let u1 = h1.complement_in_kernel().map_err(not_self_orthogonal)?;
    let u2 = h2.complement_in_kernel().map_err(not_self_orthogonal)?;
    let u1t = h1
        .transposed()
        .complement_in_kernel()
        .map_err(not_self_orthogonal)?;
    let u2t = h2
        .transposed()
        .complement_in_kernel()
        .map_err(not_self_orthogonal)?;

    let vv_vectors: Vec<BitVec> = u1
        .vectors()
        .iter()
        .flat_map(|a| {
            u2.vectors()
                .iter()
                .map(|b| embed_vv(&tensor_vector(a, b), total))
        })
        .collect();
    let ww_vectors: Vec<BitVec> = u1t
        .vectors()
        .iter()
        .flat_map(|a| {
            u2t.vectors()
                .iter()
                .map(|b| embed_ww(&tensor_vector(a, b), total, offset))
        })
        .collect();
    let embeddings_in_kernel = vv_vectors
        .iter()
        .chain(&ww_vectors)
        .all(|v| h.mul_vec(v).is_zero());
    checks.push(AppendixCheck {
        id: AppendixLemma::TensorEmbeddingsInKernel,
        pass: embeddings_in_kernel,
        dims: vec![vv_vectors.len(), ww_vectors.len()],
    });

    let embedded_vv = SubspaceBasis::new(total, vv_vectors);
    let embedded_ww = SubspaceBasis::new(total, ww_vectors);
    let mutual = embedded_vv
        .intersection_dim(&embedded_ww)
        .expect("same ambient space");
    let stacked = BitMatrix::stacked(&embedded_vv.to_matrix(), &embedded_ww.to_matrix());
    let combined_dim = stacked.rank();
    let with_rows = BitMatrix::stacked(&stacked, &h.row_space_basis().to_matrix());
    let against_rows = combined_dim + rank_h - with_rows.rank();
    checks.push(AppendixCheck {
        id: AppendixLemma::TrivialIntersections,
        pass: mutual == 0 && against_rows == 0,
        dims: vec![mutual, against_rows],
    });

    let k_actual = total - 2 * rank_h.min(total / 2);
    let embedded_total = embedded_vv.dim() + embedded_ww.dim();
    checks.push(AppendixCheck {
        id: AppendixLemma::RankInequality,
        pass: total >= 2 * rank_h && k_actual >= embedded_total,
        dims: vec![k_actual, embedded_total],
    });
    Ok(checks)
}
