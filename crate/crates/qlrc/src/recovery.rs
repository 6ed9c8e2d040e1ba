//! Recovery-set families and the randomized constructions behind the
//! bounds: U-sets under random total orderings, recoverable sequences,
//! disjoint correctable sets, and small-union subset selection.
//!
//! Every randomized routine is driven by a seeded ChaCha stream with
//! sub-seeds derived per restart, so identical seeds give identical output.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::bounds::{self, BoundsError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RecoveryError {
    #[error("exhaustive enumeration over {size} elements exceeds the cap of {cap}")]
    ExhaustiveTooLarge { size: usize, cap: usize },
    #[error("no sampled ordering reached the target within {attempts} restarts")]
    RestartsExhausted { attempts: usize },
    #[error("sampling reached union size {achieved}; the guaranteed bound is {bound}")]
    BoundNotMet { achieved: usize, bound: usize },
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// Default cap on the union size for exhaustive ordering enumeration.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 10;

/// Default cap on `C(M, N)` below which subset selection is exhaustive.
pub const DEFAULT_SUBSET_EXHAUSTIVE_CAP: u64 = 100_000;

const SUBSET_SAMPLE_BUDGET: usize = 4096;

/// Restart budget used by the sequence searches unless overridden.
pub fn default_restart_budget(n: usize) -> usize {
    64 * n.max(1)
}

/// Splitmix step combining a base seed with a stream index.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform draw from `[0, bound)` by rejection; depends only on the raw
/// ChaCha word stream, so results are stable across library versions.
fn uniform_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let limit = u64::MAX - u64::MAX % bound;
    loop {
        let x = rng.next_u64();
        if x < limit {
            return x % bound;
        }
    }
}

fn shuffle<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = uniform_below(rng, i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

/// Random total ordering of `[0, n)` as a rank array: `ranks[x]` is the
/// position of `x` in the ordering.
pub fn random_ranks(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    shuffle(&mut order, rng);
    let mut ranks = vec![0usize; n];
    for (position, &element) in order.iter().enumerate() {
        ranks[element] = position;
    }
    ranks
}

/// Visits every permutation of `0..k` exactly once (Heap's algorithm).
pub fn for_each_permutation(k: usize, mut visit: impl FnMut(&[usize])) {
    let mut items: Vec<usize> = (0..k).collect();
    let mut state = vec![0usize; k];
    visit(&items);
    let mut i = 0;
    while i < k {
        if state[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(state[i], i);
            }
            visit(&items);
            state[i] += 1;
            i = 0;
        } else {
            state[i] = 0;
            i += 1;
        }
    }
}

/// Visits every `k`-subset of `0..m` in lexicographic order.
pub fn for_each_combination(m: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        visit(&combo);
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if combo[i] < m - (k - i) {
                combo[i] += 1;
                for j in i + 1..k {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn binomial_u128(m: usize, k: usize) -> u128 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut acc = 1u128;
    for i in 1..=k {
        acc = acc.saturating_mul((m - k + i) as u128) / i as u128;
    }
    acc
}

/// The recovery sets `Γ_l(j)` for every position `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveryFamily {
    n: usize,
    gamma: Vec<Vec<Vec<usize>>>,
}

impl RecoveryFamily {
    /// `gamma[j]` lists the recovery sets of position `j` as subsets of
    /// `[0, n)`; sets are sorted and deduplicated here. Membership of `j`
    /// in its own sets is a `validate_family` concern, not a constructor
    /// panic.
    pub fn new(n: usize, mut gamma: Vec<Vec<Vec<usize>>>) -> Self {
        assert_eq!(gamma.len(), n, "one set list per position required");
        for sets in &mut gamma {
            for set in sets.iter_mut() {
                set.sort_unstable();
                set.dedup();
                if let Some(&max) = set.last() {
                    assert!(max < n, "recovery set element out of range");
                }
            }
        }
        Self { n, gamma }
    }

    pub fn position_count(&self) -> usize {
        self.n
    }

    /// Declared availability `t`: the largest set count of any position.
    pub fn availability(&self) -> usize {
        self.gamma.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn sets(&self, position: usize) -> &[Vec<usize>] {
        &self.gamma[position]
    }

    /// Largest recovery set size minus one.
    pub fn inferred_locality(&self) -> usize {
        self.gamma
            .iter()
            .flatten()
            .map(Vec::len)
            .max()
            .unwrap_or(1)
            .saturating_sub(1)
    }

    /// Largest pairwise overlap of two sets at one position, minus one.
    pub fn inferred_overlap(&self) -> usize {
        let mut largest = 0;
        for sets in &self.gamma {
            for (i, a) in sets.iter().enumerate() {
                for b in &sets[i + 1..] {
                    largest = largest.max(sorted_overlap(a, b));
                }
            }
        }
        largest.saturating_sub(1)
    }
}

fn sorted_overlap(a: &[usize], b: &[usize]) -> usize {
    let (mut x, mut y, mut count) = (0, 0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                x += 1;
                y += 1;
            }
        }
    }
    count
}

fn sorted_intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter()
        .filter(|x| b.binary_search(x).is_ok())
        .copied()
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValidationMode {
    /// Sizes at most r+1, pairwise overlaps at most s+1.
    General,
    /// Sizes exactly r+1, pairwise overlaps exactly s+1, triples meet in
    /// the position alone, and r >= s(t-1).
    Exact,
    /// Any two sets of a position intersect in exactly that position.
    Star,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyViolation {
    MissingSelf {
        position: usize,
        set: usize,
    },
    WrongSetSize {
        position: usize,
        set: usize,
        size: usize,
    },
    WrongAvailability {
        position: usize,
        count: usize,
    },
    PairOverlap {
        position: usize,
        sets: (usize, usize),
        overlap: usize,
    },
    TripleIntersection {
        position: usize,
        sets: (usize, usize, usize),
    },
    ExactParameters {
        r: usize,
        s: usize,
        t: usize,
    },
}

impl std::fmt::Display for FamilyViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::MissingSelf { position, set } => {
                write!(f, "position {position} missing from its set {set}")
            }
            Self::WrongSetSize {
                position,
                set,
                size,
            } => {
                write!(f, "set {set} of position {position} has size {size}")
            }
            Self::WrongAvailability { position, count } => {
                write!(f, "position {position} has {count} sets")
            }
            Self::PairOverlap {
                position,
                sets,
                overlap,
            } => write!(
                f,
                "sets ({}, {}) of position {position} overlap in {overlap} elements",
                sets.0, sets.1
            ),
            Self::TripleIntersection { position, sets } => write!(
                f,
                "sets ({}, {}, {}) of position {position} meet outside the position",
                sets.0, sets.1, sets.2
            ),
            Self::ExactParameters { r, s, t } => {
                write!(f, "exact condition needs r >= s(t-1): r={r}, s={s}, t={t}")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct FamilyValidation {
    pub mode: ValidationMode,
    pub ok: bool,
    pub violations: Vec<FamilyViolation>,
}

/// Checks the size, membership, pairwise and triple intersection conditions
/// of the requested mode. Violations are data, not errors.
pub fn validate_family(
    family: &RecoveryFamily,
    r: usize,
    s: usize,
    mode: ValidationMode,
) -> FamilyValidation {
    let t = family.availability();
    let mut violations = Vec::new();
    if mode == ValidationMode::Exact && t >= 1 && r < s * (t - 1) {
        violations.push(FamilyViolation::ExactParameters { r, s, t });
    }
    for position in 0..family.position_count() {
        let sets = family.sets(position);
        if sets.len() != t {
            violations.push(FamilyViolation::WrongAvailability {
                position,
                count: sets.len(),
            });
        }
        for (index, set) in sets.iter().enumerate() {
            if set.binary_search(&position).is_err() {
                violations.push(FamilyViolation::MissingSelf {
                    position,
                    set: index,
                });
            }
            let size_ok = match mode {
                ValidationMode::Exact => set.len() == r + 1,
                ValidationMode::General | ValidationMode::Star => set.len() <= r + 1,
            };
            if !size_ok {
                violations.push(FamilyViolation::WrongSetSize {
                    position,
                    set: index,
                    size: set.len(),
                });
            }
        }
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                let meet = sorted_intersection(&sets[i], &sets[j]);
                let pair_ok = match mode {
                    ValidationMode::General => meet.len() <= s + 1,
                    ValidationMode::Exact => meet.len() == s + 1,
                    ValidationMode::Star => meet == [position],
                };
                if !pair_ok {
                    violations.push(FamilyViolation::PairOverlap {
                        position,
                        sets: (i, j),
                        overlap: meet.len(),
                    });
                }
                if mode == ValidationMode::Exact {
                    for (k, third) in sets.iter().enumerate().skip(j + 1) {
                        let triple = sorted_intersection(&meet, third);
                        if triple != [position] {
                            violations.push(FamilyViolation::TripleIntersection {
                                position,
                                sets: (i, j, k),
                            });
                        }
                    }
                }
            }
        }
    }
    FamilyValidation {
        mode,
        ok: violations.is_empty(),
        violations,
    }
}

/// 1-based ranks of the non-excluded positions under `ranks`.
fn surviving_ranks(n: usize, ranks: &[usize], excluded: &BTreeSet<usize>) -> Vec<usize> {
    let mut alive: Vec<usize> = (0..n).filter(|j| !excluded.contains(j)).collect();
    alive.sort_by_key(|&j| ranks[j]);
    let mut rank1 = vec![0usize; n];
    for (index, &j) in alive.iter().enumerate() {
        rank1[j] = index + 1;
    }
    rank1
}

/// Smallest recovery index of `j` whose set, restricted to the non-excluded
/// positions, lies entirely after `j` in the ordering.
fn witness_alpha(
    family: &RecoveryFamily,
    ranks: &[usize],
    excluded: &BTreeSet<usize>,
    j: usize,
) -> Option<usize> {
    family.sets(j).iter().position(|set| {
        set.iter()
            .all(|&i| i == j || excluded.contains(&i) || ranks[i] > ranks[j])
    })
}

/// The U-set of a total ordering: every non-excluded position whose 1-based
/// rank among the survivors is below `d_grace`, or for which some recovery
/// set (restricted to the survivors) lies entirely later in the ordering.
/// `d_grace = 0` gives the plain construction.
pub fn u_set(
    family: &RecoveryFamily,
    ranks: &[usize],
    excluded: &BTreeSet<usize>,
    d_grace: usize,
) -> BTreeSet<usize> {
    let n = family.position_count();
    assert_eq!(ranks.len(), n, "rank array must cover every position");
    let rank1 = surviving_ranks(n, ranks, excluded);
    let mut selected = BTreeSet::new();
    for (j, &rank) in rank1.iter().enumerate() {
        if excluded.contains(&j) {
            continue;
        }
        if rank < d_grace || witness_alpha(family, ranks, excluded, j).is_some() {
            selected.insert(j);
        }
    }
    selected
}

/// Exact membership probability `Pr(j in U)` by enumerating all relative
/// orderings of the union of j's restricted recovery sets.
pub fn membership_probability_exhaustive(
    family: &RecoveryFamily,
    j: usize,
    excluded: &BTreeSet<usize>,
    cap: usize,
) -> Result<BigRational, RecoveryError> {
    assert!(!excluded.contains(&j), "position must not be excluded");
    let (union, restricted) = restricted_union(family, j, excluded);
    if union.len() > cap {
        return Err(RecoveryError::ExhaustiveTooLarge {
            size: union.len(),
            cap,
        });
    }
    let j_index = union.binary_search(&j).expect("j is in its own union");
    let mut favorable: u64 = 0;
    let mut total: u64 = 0;
    for_each_permutation(union.len(), |ranks| {
        total += 1;
        if hits_union_predicate(&restricted, ranks, j_index) {
            favorable += 1;
        }
    });
    Ok(BigRational::new(
        BigInt::from(favorable),
        BigInt::from(total),
    ))
}

/// Monte Carlo estimate of the same probability with its binomial standard
/// error.
pub fn membership_probability_monte_carlo(
    family: &RecoveryFamily,
    j: usize,
    excluded: &BTreeSet<usize>,
    trials: usize,
    seed: u64,
) -> (f64, f64) {
    assert!(trials > 0);
    assert!(!excluded.contains(&j), "position must not be excluded");
    let (union, restricted) = restricted_union(family, j, excluded);
    let j_index = union.binary_search(&j).expect("j is in its own union");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..union.len()).collect();
    let mut ranks = vec![0usize; union.len()];
    let mut hits = 0usize;
    for _ in 0..trials {
        shuffle(&mut order, &mut rng);
        for (position, &element) in order.iter().enumerate() {
            ranks[element] = position;
        }
        if hits_union_predicate(&restricted, &ranks, j_index) {
            hits += 1;
        }
    }
    let estimate = hits as f64 / trials as f64;
    let stderr = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    (estimate, stderr)
}

/// Union of j's recovery sets restricted to the non-excluded positions,
/// plus the sets re-expressed as indices into that union (without j).
fn restricted_union(
    family: &RecoveryFamily,
    j: usize,
    excluded: &BTreeSet<usize>,
) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut union: BTreeSet<usize> = BTreeSet::new();
    union.insert(j);
    for set in family.sets(j) {
        union.extend(set.iter().filter(|i| !excluded.contains(i)));
    }
    let union: Vec<usize> = union.into_iter().collect();
    let restricted = family
        .sets(j)
        .iter()
        .map(|set| {
            set.iter()
                .filter(|&&i| i != j && !excluded.contains(&i))
                .map(|i| union.binary_search(i).expect("set element is in the union"))
                .collect()
        })
        .collect();
    (union, restricted)
}

fn hits_union_predicate(restricted: &[Vec<usize>], ranks: &[usize], j_index: usize) -> bool {
    restricted
        .iter()
        .any(|set| set.iter().all(|&i| ranks[i] > ranks[j_index]))
}

/// A sequence `j_1 .. j_N` whose tail entries each carry a recovery set
/// disjoint from everything earlier. Entries before `prefix_free_from` are
/// the graced prefix and carry no witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoverableSequence {
    pub positions: Vec<usize>,
    pub alphas: Vec<Option<usize>>,
    pub prefix_free_from: usize,
}

impl RecoverableSequence {
    pub fn empty() -> Self {
        Self {
            positions: Vec::new(),
            alphas: Vec::new(),
            prefix_free_from: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Independent re-check of the defining invariant: positions distinct
    /// and outside `excluded`; every entry past the graced prefix has a
    /// witnessing set disjoint from all earlier entries.
    pub fn verify(&self, family: &RecoveryFamily, excluded: &BTreeSet<usize>) -> bool {
        if self.positions.len() != self.alphas.len() {
            return false;
        }
        let mut seen = BTreeSet::new();
        for (k, (&j, alpha)) in self.positions.iter().zip(&self.alphas).enumerate() {
            if j >= family.position_count() || excluded.contains(&j) || !seen.insert(j) {
                return false;
            }
            if k < self.prefix_free_from {
                continue;
            }
            let Some(alpha) = alpha else { return false };
            let Some(set) = family.sets(j).get(*alpha) else {
                return false;
            };
            if set.iter().any(|i| self.positions[..k].contains(i)) {
                return false;
            }
        }
        true
    }
}

/// Samples random orderings until some U-set reaches `target`, then returns
/// the first `target` elements of that U-set in ordering order together
/// with their witnesses.
pub fn find_recoverable_sequence(
    family: &RecoveryFamily,
    excluded: &BTreeSet<usize>,
    target: usize,
    d_grace: usize,
    seed: u64,
    max_restarts: usize,
) -> Result<RecoverableSequence, RecoveryError> {
    if target == 0 {
        return Ok(RecoverableSequence::empty());
    }
    let n = family.position_count();
    for attempt in 0..max_restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, attempt as u64));
        let ranks = random_ranks(n, &mut rng);
        let selected = u_set(family, &ranks, excluded, d_grace);
        if selected.len() < target {
            continue;
        }
        let mut positions: Vec<usize> = selected.into_iter().collect();
        positions.sort_by_key(|&j| ranks[j]);
        positions.truncate(target);
        let rank1 = surviving_ranks(n, &ranks, excluded);
        let alphas: Vec<Option<usize>> = positions
            .iter()
            .map(|&j| {
                if rank1[j] < d_grace {
                    None
                } else {
                    Some(witness_alpha(family, &ranks, excluded, j).expect("member of U"))
                }
            })
            .collect();
        let prefix_free_from = alphas.iter().take_while(|a| a.is_none()).count();
        debug_assert!(alphas[prefix_free_from..].iter().all(Option::is_some));
        return Ok(RecoverableSequence {
            positions,
            alphas,
            prefix_free_from,
        });
    }
    Err(RecoveryError::RestartsExhausted {
        attempts: max_restarts,
    })
}

/// Which theorem's set sizes the disjoint-set construction should realize.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetConstructionVariant {
    P2,
    Pe,
    M1M2,
    Rts2,
}

impl SetConstructionVariant {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "p2" => Some(Self::P2),
            "pe" => Some(Self::Pe),
            "m1m2" => Some(Self::M1M2),
            "rts2" => Some(Self::Rts2),
            _ => None,
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Self::P2 => "p2",
            Self::Pe => "pe",
            Self::M1M2 => "m1m2",
            Self::Rts2 => "rts2",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DisjointCorrectableSets {
    pub a: BTreeSet<usize>,
    pub b: BTreeSet<usize>,
    pub cert_a: RecoverableSequence,
    pub cert_b: RecoverableSequence,
    /// `n - |A| - |B|`, the dimension bound this pair of sets witnesses.
    pub k_bound: usize,
}

/// Builds two disjoint correctable sets with the sizes of the chosen
/// theorem: A on the full position set, then B on the complement of A.
/// The locality parameters are inferred from the family itself.
pub fn disjoint_correctable_sets(
    family: &RecoveryFamily,
    variant: SetConstructionVariant,
    d: u64,
    seed: u64,
    max_restarts: usize,
) -> Result<DisjointCorrectableSets, RecoveryError> {
    let n = family.position_count();
    let empty = BTreeSet::new();
    let cert_a = construction_phase(
        family,
        &empty,
        variant,
        d,
        derive_seed(seed, 0),
        max_restarts,
    )?;
    let a: BTreeSet<usize> = cert_a.positions.iter().copied().collect();
    let cert_b = construction_phase(family, &a, variant, d, derive_seed(seed, 1), max_restarts)?;
    let b: BTreeSet<usize> = cert_b.positions.iter().copied().collect();
    debug_assert!(a.is_disjoint(&b));
    Ok(DisjointCorrectableSets {
        k_bound: n - a.len() - b.len(),
        a,
        b,
        cert_a,
        cert_b,
    })
}

fn construction_phase(
    family: &RecoveryFamily,
    excluded: &BTreeSet<usize>,
    variant: SetConstructionVariant,
    d: u64,
    seed: u64,
    max_restarts: usize,
) -> Result<RecoverableSequence, RecoveryError> {
    let n = family.position_count();
    let m = (n - excluded.len()) as u64;
    let r = family.inferred_locality() as u64;
    let s = family.inferred_overlap() as u64;
    let t = family.availability() as u64;
    match variant {
        SetConstructionVariant::P2 => {
            let p = bounds::p2(r, t, s)?;
            let target = ceil_times(m, &p);
            find_recoverable_sequence(family, excluded, target, 0, seed, max_restarts)
        }
        SetConstructionVariant::Pe => {
            let p = bounds::pe(r, t, s)?;
            let target = ceil_times(m, &p);
            find_recoverable_sequence(family, excluded, target, 0, seed, max_restarts)
        }
        SetConstructionVariant::M1M2 => {
            // Degenerate remainder: too small for the selection lemma.
            if m < (r + 1).max(d.saturating_sub(1)) {
                return Ok(RecoverableSequence::empty());
            }
            let p = bounds::pe(r, t, s)?;
            let base_target = ceil_times(m, &p);
            let pick = bounds::n1(m, r, d, base_target as u64) as usize;
            let base = find_recoverable_sequence(
                family,
                excluded,
                base_target,
                0,
                derive_seed(seed, 0),
                max_restarts,
            )?;
            small_union_phase(family, excluded, &base, pick, d, r as usize, seed)
        }
        SetConstructionVariant::Rts2 => {
            if m < d {
                return Ok(RecoverableSequence::empty());
            }
            let extra = bounds::cal_n1(m, d - 1, r, t, s) as usize;
            let target = (d as usize - 1) + extra;
            if target == 0 {
                return Ok(RecoverableSequence::empty());
            }
            find_recoverable_sequence(family, excluded, target, d as usize, seed, max_restarts)
        }
    }
}

/// The selection step behind the distance-aware sizes: keep `pick` base
/// entries whose padded recovery sets have a small union, then prepend
/// `d - 1` positions outside that union.
fn small_union_phase(
    family: &RecoveryFamily,
    excluded: &BTreeSet<usize>,
    base: &RecoverableSequence,
    pick: usize,
    d: u64,
    r: usize,
    seed: u64,
) -> Result<RecoverableSequence, RecoveryError> {
    let n = family.position_count();
    let alive: Vec<usize> = (0..n).filter(|j| !excluded.contains(j)).collect();
    let m = alive.len();
    let free_count = d.saturating_sub(1) as usize;

    // Pad each witnessed set inside the survivors up to size r + 1.
    let mut padded: Vec<Vec<usize>> = Vec::with_capacity(base.len());
    for (&j, alpha) in base.positions.iter().zip(&base.alphas) {
        let alpha = alpha.expect("base sequence has no graced prefix");
        let mut set: Vec<usize> = family.sets(j)[alpha]
            .iter()
            .filter(|i| !excluded.contains(i))
            .copied()
            .collect();
        for &candidate in &alive {
            if set.len() > r {
                break;
            }
            if !set.contains(&candidate) {
                set.push(candidate);
            }
        }
        set.sort_unstable();
        padded.push(set);
    }

    let chosen = if pick == 0 {
        Vec::new()
    } else {
        select_small_union_subset(
            m,
            &padded,
            pick,
            derive_seed(seed, 2),
            DEFAULT_SUBSET_EXHAUSTIVE_CAP,
        )?
        .chosen
    };
    let union: BTreeSet<usize> = chosen
        .iter()
        .flat_map(|&k| padded[k].iter().copied())
        .collect();

    let mut positions: Vec<usize> = alive
        .iter()
        .filter(|j| !union.contains(j))
        .take(free_count)
        .copied()
        .collect();
    debug_assert_eq!(positions.len(), free_count, "selection left enough room");
    let mut alphas: Vec<Option<usize>> = vec![None; positions.len()];
    let prefix_free_from = positions.len();
    for &k in &chosen {
        positions.push(base.positions[k]);
        alphas.push(base.alphas[k]);
    }
    Ok(RecoverableSequence {
        positions,
        alphas,
        prefix_free_from,
    })
}

fn ceil_times(m: u64, p: &BigRational) -> usize {
    let v = (BigRational::from_integer(BigInt::from(m)) * p)
        .ceil()
        .to_integer();
    if v.is_negative() {
        0
    } else {
        v.to_u64().expect("target fits in u64") as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallUnionSelection {
    pub chosen: Vec<usize>,
    pub union_size: usize,
}

/// Guaranteed union bound for picking `pick` of `m` sets of size `set_size`
/// over a ground set of `ground_size` elements:
/// `pick*(r+1) - ceil(pick(pick-1)/(m(m-1)) * (m(r+1) - ground))`.
/// The correction term is taken as 0 when `m <= 1`.
pub fn union_bound(ground_size: usize, m: usize, set_size: usize, pick: usize) -> usize {
    let base = (pick * set_size) as i128;
    let correction = if m <= 1 || pick == 0 {
        0
    } else {
        let numer = (pick as i128)
            * (pick as i128 - 1)
            * (m as i128 * set_size as i128 - ground_size as i128);
        ceil_div(numer, m as i128 * (m as i128 - 1))
    };
    (base - correction).max(0) as usize
}

fn ceil_div(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    a.div_euclid(b) + i128::from(a.rem_euclid(b) != 0)
}

/// Selects `pick` sets whose union meets the guaranteed bound: exhaustively
/// when `C(m, pick)` is at most `exhaustive_cap`, otherwise by seeded
/// best-of sampling. Sampling reports `BoundNotMet` when the budget runs
/// out before the bound is reached.
pub fn select_small_union_subset(
    ground_size: usize,
    sets: &[Vec<usize>],
    pick: usize,
    seed: u64,
    exhaustive_cap: u64,
) -> Result<SmallUnionSelection, RecoveryError> {
    let m = sets.len();
    assert!(pick <= m, "cannot pick more sets than provided");
    if pick == 0 {
        return Ok(SmallUnionSelection {
            chosen: Vec::new(),
            union_size: 0,
        });
    }
    let set_size = sets[0].len();
    for set in sets {
        assert_eq!(set.len(), set_size, "sets must share a single size");
    }
    let bound = union_bound(ground_size, m, set_size, pick);

    let union_of = |combo: &[usize]| -> usize {
        let mut union = BTreeSet::new();
        for &k in combo {
            union.extend(sets[k].iter().copied());
        }
        union.len()
    };

    if binomial_u128(m, pick) <= u128::from(exhaustive_cap) {
        let mut best: Option<(usize, Vec<usize>)> = None;
        for_each_combination(m, pick, |combo| {
            let size = union_of(combo);
            if best.as_ref().is_none_or(|(b, _)| size < *b) {
                best = Some((size, combo.to_vec()));
            }
        });
        let (union_size, chosen) = best.expect("pick >= 1 yields a combination");
        assert!(
            union_size <= bound,
            "exhaustive minimum {union_size} exceeds the guaranteed bound {bound}"
        );
        Ok(SmallUnionSelection { chosen, union_size })
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pool: Vec<usize> = (0..m).collect();
        let mut best: Option<(usize, Vec<usize>)> = None;
        for _ in 0..SUBSET_SAMPLE_BUDGET {
            // Partial Fisher-Yates: the first `pick` entries are the sample.
            for i in 0..pick {
                let j = i + uniform_below(&mut rng, (m - i) as u64) as usize;
                pool.swap(i, j);
            }
            let mut combo = pool[..pick].to_vec();
            combo.sort_unstable();
            let size = union_of(&combo);
            if best.as_ref().is_none_or(|(b, _)| size < *b) {
                best = Some((size, combo));
            }
            if best.as_ref().is_some_and(|(b, _)| *b <= bound) {
                break;
            }
        }
        let (union_size, chosen) = best.expect("budget is positive");
        if union_size <= bound {
            Ok(SmallUnionSelection { chosen, union_size })
        } else {
            Err(RecoveryError::BoundNotMet {
                achieved: union_size,
                bound,
            })
        }
    }
}

/// Exhaustive maximum number of edges induced by an `m`-vertex subset of a
/// multigraph; used to verify the subgraph-edge estimate.
pub fn max_induced_edge_count(vertex_count: usize, edges: &[(usize, usize)], m: usize) -> usize {
    if m > vertex_count {
        return edges.len();
    }
    let mut best = 0;
    for_each_combination(vertex_count, m, |combo| {
        let inside = |v: usize| combo.binary_search(&v).is_ok();
        let count = edges
            .iter()
            .filter(|(a, b)| inside(*a) && inside(*b))
            .count();
        best = best.max(count);
    });
    best
}

/// `ceil(m(m-1)/(V(V-1)) * |E|)`: the induced-edge count some `m`-subset
/// must reach. Zero when `m < 2`.
pub fn induced_edge_lower_bound(vertex_count: usize, edge_count: usize, m: usize) -> usize {
    if m < 2 || vertex_count < 2 {
        return 0;
    }
    let numer = (m as i128) * (m as i128 - 1) * (edge_count as i128);
    ceil_div(numer, vertex_count as i128 * (vertex_count as i128 - 1)) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BitMatrix;
    use crate::tanner::BipartiteGraph;

    fn hamming_family() -> RecoveryFamily {
        let h = BitMatrix::from_01_strings(&[
            "1111000", "1100011", "1010101", "1001110", "0110110", "0101101", "0011011",
        ]);
        BipartiteGraph::from_matrix(&h).recovery_family().unwrap()
    }

    fn ratio(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn identity_ranks(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    #[test]
    fn hamming_family_is_341_exact() {
        let family = hamming_family();
        assert_eq!(family.availability(), 4);
        assert_eq!(family.inferred_locality(), 3);
        assert_eq!(family.inferred_overlap(), 1);
        let report = validate_family(&family, 3, 1, ValidationMode::Exact);
        assert!(report.ok, "violations: {:?}", report.violations);
    }

    #[test]
    fn availability_one_family_is_vacuously_exact() {
        let family = RecoveryFamily::new(
            4,
            vec![
                vec![vec![0, 1]],
                vec![vec![1, 2]],
                vec![vec![2, 3]],
                vec![vec![3, 0]],
            ],
        );
        let report = validate_family(&family, 1, 0, ValidationMode::Exact);
        assert!(report.ok);
    }

    #[test]
    fn duplicated_sets_violate_exactness() {
        let family = RecoveryFamily::new(
            4,
            vec![
                vec![vec![0, 1, 2], vec![0, 1, 2]],
                vec![vec![0, 1, 2], vec![1, 2, 3]],
                vec![vec![0, 1, 2], vec![1, 2, 3]],
                vec![vec![1, 2, 3], vec![0, 2, 3]],
            ],
        );
        let report = validate_family(&family, 2, 1, ValidationMode::Exact);
        assert!(!report.ok);
        assert!(report.violations.iter().any(|v| matches!(
            v,
            FamilyViolation::PairOverlap {
                position: 0,
                sets: (0, 1),
                overlap: 3
            }
        )));
    }

    #[test]
    fn star_mode_checks_pairwise_singletons() {
        let family = RecoveryFamily::new(
            5,
            vec![
                vec![vec![0, 1], vec![0, 2]],
                vec![vec![1, 0], vec![1, 2]],
                vec![vec![2, 0], vec![2, 1]],
                vec![vec![3, 0], vec![3, 1]],
                vec![vec![4, 0], vec![4, 1]],
            ],
        );
        assert!(validate_family(&family, 1, 0, ValidationMode::Star).ok);
        let overlapping = RecoveryFamily::new(
            3,
            vec![
                vec![vec![0, 1, 2], vec![0, 1]],
                vec![vec![0, 1]],
                vec![vec![2]],
            ],
        );
        assert!(!validate_family(&overlapping, 2, 1, ValidationMode::Star).ok);
    }

    #[test]
    fn first_position_of_identity_ordering_is_selected() {
        let family = hamming_family();
        let selected = u_set(&family, &identity_ranks(7), &BTreeSet::new(), 0);
        assert!(selected.contains(&0));
    }

    #[test]
    fn full_support_sets_select_only_the_minimum() {
        let sets = vec![vec![(0..5).collect::<Vec<_>>(); 3]; 5];
        let family = RecoveryFamily::new(5, sets);
        let ranks = vec![2, 0, 4, 1, 3];
        let selected = u_set(&family, &ranks, &BTreeSet::new(), 0);
        assert_eq!(selected.into_iter().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn average_u_set_size_over_all_orderings_matches_pe() {
        let family = hamming_family();
        let mut total = 0usize;
        let mut count = 0usize;
        for_each_permutation(7, |ranks| {
            total += u_set(&family, ranks, &BTreeSet::new(), 0).len();
            count += 1;
        });
        assert_eq!(count, 5040);
        // E|U| = n * pe(3,4,1) = 7 * 3/7 = 3 exactly.
        assert_eq!(
            BigRational::new(BigInt::from(total), BigInt::from(count)),
            BigRational::from_integer(3.into())
        );
    }

    #[test]
    fn exhaustive_membership_probability_is_three_sevenths() {
        let family = hamming_family();
        for j in 0..7 {
            let p = membership_probability_exhaustive(&family, j, &BTreeSet::new(), 10).unwrap();
            assert_eq!(p, ratio(3, 7));
        }
    }

    #[test]
    fn single_set_membership_probability() {
        let family = RecoveryFamily::new(4, vec![vec![vec![0, 1, 2, 3]]; 4]);
        let p = membership_probability_exhaustive(&family, 2, &BTreeSet::new(), 10).unwrap();
        assert_eq!(p, ratio(1, 4));
    }

    #[test]
    fn exhaustive_cap_is_enforced() {
        let family = RecoveryFamily::new(12, vec![vec![(0..12).collect::<Vec<_>>()]; 12]);
        assert_eq!(
            membership_probability_exhaustive(&family, 0, &BTreeSet::new(), 10),
            Err(RecoveryError::ExhaustiveTooLarge { size: 12, cap: 10 })
        );
    }

    #[test]
    fn monte_carlo_agrees_with_exhaustive_within_three_sigma() {
        let family = hamming_family();
        let exact = 3.0 / 7.0;
        let (estimate, stderr) =
            membership_probability_monte_carlo(&family, 3, &BTreeSet::new(), 100_000, 7);
        assert!((estimate - exact).abs() <= 3.0 * stderr.max(1e-9));
    }

    #[test]
    fn membership_probability_ignores_exclusions_outside_the_union() {
        let mut sets: Vec<Vec<Vec<usize>>> = (0..6)
            .map(|j| vec![vec![j, (j + 1) % 6, (j + 2) % 6]])
            .collect();
        sets[0] = vec![vec![0, 1, 2], vec![0, 3, 4]];
        let family = RecoveryFamily::new(6, sets);
        let plain = membership_probability_exhaustive(&family, 0, &BTreeSet::new(), 10).unwrap();
        let excluded: BTreeSet<usize> = [5].into_iter().collect();
        let reduced = membership_probability_exhaustive(&family, 0, &excluded, 10).unwrap();
        assert_eq!(plain, reduced);
    }

    #[test]
    fn recoverable_sequence_on_hamming() {
        let family = hamming_family();
        let excluded = BTreeSet::new();
        let seq = find_recoverable_sequence(&family, &excluded, 3, 0, 1, 448).unwrap();
        assert_eq!(seq.len(), 3);
        assert!(seq.verify(&family, &excluded));
    }

    #[test]
    fn single_target_always_succeeds_quickly() {
        let family = hamming_family();
        let seq = find_recoverable_sequence(&family, &BTreeSet::new(), 1, 0, 99, 1).unwrap();
        assert_eq!(seq.len(), 1);
        assert!(seq.verify(&family, &BTreeSet::new()));
    }

    #[test]
    fn impossible_target_exhausts_restarts() {
        let family = hamming_family();
        assert_eq!(
            find_recoverable_sequence(&family, &BTreeSet::new(), 8, 0, 5, 16),
            Err(RecoveryError::RestartsExhausted { attempts: 16 })
        );
    }

    #[test]
    fn sequences_are_seed_deterministic() {
        let family = hamming_family();
        let excluded = BTreeSet::new();
        let a = find_recoverable_sequence(&family, &excluded, 3, 0, 1234, 448).unwrap();
        let b = find_recoverable_sequence(&family, &excluded, 3, 0, 1234, 448).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn disjoint_sets_pe_variant_sizes() {
        let family = hamming_family();
        let result =
            disjoint_correctable_sets(&family, SetConstructionVariant::Pe, 3, 5, 448).unwrap();
        assert_eq!(result.a.len(), 3, "|A| = ceil(7 * 3/7)");
        assert_eq!(result.b.len(), 2, "|B| = ceil(4 * 3/7)");
        assert!(result.a.is_disjoint(&result.b));
        assert!(result.cert_a.verify(&family, &BTreeSet::new()));
        assert!(result.cert_b.verify(&family, &result.a));
        assert_eq!(result.k_bound, 2);
        assert_eq!(result.a.len() + result.b.len() + result.k_bound, 7);
    }

    #[test]
    fn disjoint_sets_m1m2_variant_matches_bound_sizes() {
        let family = hamming_family();
        let result =
            disjoint_correctable_sets(&family, SetConstructionVariant::M1M2, 3, 11, 448).unwrap();
        // M1 = 2 + n1(7,3,3,3) = 3 and M2 = 2 + n1(4,3,3,2) = 2.
        assert_eq!(result.a.len(), 3);
        assert_eq!(result.b.len(), 2);
        assert!(result.cert_a.verify(&family, &BTreeSet::new()));
        assert!(result.cert_b.verify(&family, &result.a));
        assert_eq!(result.cert_a.prefix_free_from, 2);
    }

    #[test]
    fn disjoint_sets_rts2_variant() {
        let family = hamming_family();
        let result =
            disjoint_correctable_sets(&family, SetConstructionVariant::Rts2, 3, 17, 448).unwrap();
        // (d-1) + cal_n1(7,2,3,4,1) = 3, then cal_n1(4,2,3,4,1) = 0 gives 2.
        assert_eq!(result.a.len(), 3);
        assert_eq!(result.b.len(), 2);
        assert!(result.cert_a.verify(&family, &BTreeSet::new()));
        assert!(result.cert_b.verify(&family, &result.a));
    }

    #[test]
    fn degenerate_second_phase_yields_empty_b() {
        // Availability 1 on a tiny ground set: after phase A the remainder
        // is below r + 1, so the selection lemma no longer applies.
        let family = RecoveryFamily::new(
            3,
            vec![
                vec![vec![0, 1, 2]],
                vec![vec![0, 1, 2]],
                vec![vec![0, 1, 2]],
            ],
        );
        let result =
            disjoint_correctable_sets(&family, SetConstructionVariant::M1M2, 2, 3, 448).unwrap();
        assert!(result.b.is_empty());
        assert_eq!(result.k_bound, 3 - result.a.len());
    }

    #[test]
    fn small_union_on_hamming_rows() {
        // Supports of the first four rows: any two overlap in 2 positions.
        let sets = vec![
            vec![0, 1, 2, 3],
            vec![0, 1, 5, 6],
            vec![0, 2, 4, 6],
            vec![0, 3, 4, 5],
        ];
        let selection = select_small_union_subset(7, &sets, 2, 1, 10_000).unwrap();
        assert_eq!(selection.union_size, 6);
        assert_eq!(union_bound(7, 4, 4, 2), 6);
    }

    #[test]
    fn picking_all_sets_is_vacuous() {
        let sets = vec![vec![0, 1], vec![1, 2], vec![2, 3]];
        let selection = select_small_union_subset(4, &sets, 3, 1, 10_000).unwrap();
        assert_eq!(selection.chosen, vec![0, 1, 2]);
        assert_eq!(selection.union_size, 4);
        assert_eq!(union_bound(4, 3, 2, 3), 4);
    }

    #[test]
    fn exhaustive_result_never_worse_than_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..50 {
            let n = 6 + (rng.next_u64() % 7) as usize;
            let m = 3 + (rng.next_u64() % 4) as usize;
            let r_plus_1 = 2 + (rng.next_u64() % 3) as usize;
            if r_plus_1 > n {
                continue;
            }
            let sets: Vec<Vec<usize>> = (0..m)
                .map(|_| {
                    let mut pool: Vec<usize> = (0..n).collect();
                    shuffle(&mut pool, &mut rng);
                    let mut set = pool[..r_plus_1].to_vec();
                    set.sort_unstable();
                    set
                })
                .collect();
            let pick = 1 + (rng.next_u64() % m as u64) as usize;
            let exhaustive = select_small_union_subset(n, &sets, pick, trial, 1_000_000).unwrap();
            let sampled = select_small_union_subset(n, &sets, pick, trial, 0);
            if let Ok(sampled) = sampled {
                assert!(exhaustive.union_size <= sampled.union_size);
            }
        }
    }

    #[test]
    fn induced_edge_bound_on_random_multigraphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        for _ in 0..100 {
            let v = 3 + (rng.next_u64() % 8) as usize;
            let e = 1 + (rng.next_u64() % 20) as usize;
            let edges: Vec<(usize, usize)> = (0..e)
                .map(|_| {
                    let a = uniform_below(&mut rng, v as u64) as usize;
                    let mut b = uniform_below(&mut rng, v as u64) as usize;
                    while b == a {
                        b = uniform_below(&mut rng, v as u64) as usize;
                    }
                    (a, b)
                })
                .collect();
            let m = 2 + (rng.next_u64() % (v as u64 - 1)) as usize;
            let achieved = max_induced_edge_count(v, &edges, m);
            let needed = induced_edge_lower_bound(v, edges.len(), m);
            assert!(achieved >= needed, "v={v} m={m} edges={edges:?}");
        }
    }

    #[test]
    fn derive_seed_separates_streams() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }

    #[test]
    fn families_and_sequences_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<RecoveryFamily>();
        assert_send_sync::<RecoverableSequence>();
        assert_send_sync::<DisjointCorrectableSets>();
    }
}
