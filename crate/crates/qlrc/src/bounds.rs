//! Closed-form quantities and Singleton-like upper bounds on the code
//! dimension `k`, plus parameter sweeps.
//!
//! All probability-like quantities (`p1`, `p2`, `pe`, `f_tilde`) are
//! evaluated in exact rational arithmetic; ceilings and floors are applied
//! only where the defining expressions apply them. No bound value ever
//! passes through floating point.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("lower union-size estimate is undefined for s = 0")]
    DivisionByZero,
    #[error("exact condition requires r >= s(t-1): r={r}, t={t}, s={s}")]
    ExactConditionViolated { r: u64, t: u64, s: u64 },
    #[error("inapplicable parameters: {reason}")]
    InapplicableParams { reason: String },
}

fn inapplicable(reason: impl Into<String>) -> BoundsError {
    BoundsError::InapplicableParams {
        reason: reason.into(),
    }
}

/// Binomial coefficient as a big integer; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1u8);
    for i in 1..=k {
        acc = acc * BigInt::from(n - k + i) / BigInt::from(i);
    }
    acc
}

/// Binomial with the convention C(a, b) = 0 for a < 0 or a < b.
fn binomial_signed(a: i128, b: u64) -> BigInt {
    if a < 0 || (a as u64) < b {
        BigInt::zero()
    } else {
        binomial(a as u64, b)
    }
}

fn big(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Upper estimate for the union of L recovery sets: `L*r + 1`.
pub fn n_upper(r: u64, big_l: u64, _s: u64) -> u64 {
    big_l * r + 1
}

/// Lower estimate `(2r - (x-1)s)/2 * x + 1` with `x = min(L, floor(r/s)+1)`.
/// Undefined for `s = 0`.
pub fn n_lower(r: u64, big_l: u64, s: u64) -> Result<u64, BoundsError> {
    if s == 0 {
        return Err(BoundsError::DivisionByZero);
    }
    let x = big_l.min(r / s + 1) as i128;
    let value = (2 * r as i128 - (x - 1) * s as i128) * x;
    debug_assert!(value >= 0 && value % 2 == 0);
    Ok((value / 2 + 1) as u64)
}

/// Exact union size `(2r - (L-1)s)/2 * L + 1` for a family satisfying the
/// exact condition; requires `r >= s(L-1)`. `N_e(r, 0, s)` is taken as 1.
pub fn n_exact(r: u64, big_l: u64, s: u64) -> u64 {
    if big_l == 0 {
        return 1;
    }
    let value = (2 * r as i128 - (big_l as i128 - 1) * s as i128) * big_l as i128;
    assert!(
        value >= 0,
        "N_e(r={r}, L={big_l}, s={s}) requires r >= s(L-1)"
    );
    debug_assert_eq!(value % 2, 0, "union size formula is always integral");
    (value / 2 + 1) as u64
}

/// The three union-size estimates `(lower, exact, upper)` together.
pub fn union_size_bounds(r: u64, big_l: u64, s: u64) -> Result<(u64, u64, u64), BoundsError> {
    Ok((
        n_lower(r, big_l, s)?,
        n_exact(r, big_l, s),
        n_upper(r, big_l, s),
    ))
}

/// `p1(r, t) = 1 - 1 / prod_{l=1..t} (1 + 1/(l r))`, exact.
pub fn p1(r: u64, t: u64) -> BigRational {
    assert!(r >= 1 && t >= 1, "p1 requires r, t >= 1");
    let mut product = BigRational::from_integer(1.into());
    for l in 1..=t {
        product *= BigRational::new(BigInt::from(l * r), BigInt::from(l * r + 1));
    }
    BigRational::from_integer(1.into()) - product
}

/// Alternating estimate with the upper union size on odd terms and the
/// lower one on even terms; requires `s >= 1`.
pub fn p2(r: u64, t: u64, s: u64) -> Result<BigRational, BoundsError> {
    assert!(r >= 1 && t >= 1, "p2 requires r, t >= 1");
    let mut acc = BigRational::zero();
    for big_l in 1..=t {
        let coeff = BigRational::from_integer(binomial(t, big_l));
        if big_l % 2 == 1 {
            acc += coeff / big(n_upper(r, big_l, s));
        } else {
            acc -= coeff / big(n_lower(r, big_l, s)?);
        }
    }
    Ok(acc)
}

/// Inclusion-exclusion over the exact union sizes:
/// `sum_L (-1)^(L+1) C(t, L) / N_e(r, L, s)`; requires `r >= s(t-1)`.
pub fn pe(r: u64, t: u64, s: u64) -> Result<BigRational, BoundsError> {
    assert!(r >= 1 && t >= 1, "pe requires r, t >= 1");
    if r < s.saturating_mul(t - 1) {
        return Err(BoundsError::ExactConditionViolated { r, t, s });
    }
    let mut acc = BigRational::zero();
    for big_l in 1..=t {
        let term = BigRational::from_integer(binomial(t, big_l)) / big(n_exact(r, big_l, s));
        if big_l % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// `sum_L (-1)^(L+1) C(t, L) * C(n - N_e, d)/C(n, d) * 1/N_e`, with the
/// convention C(a, b) = 0 for a < b, and 0 when `t = 0`.
pub fn f_tilde(n: u64, d: u64, r: u64, t: u64, s: u64) -> BigRational {
    if t == 0 || d > n {
        return BigRational::zero();
    }
    let denom = binomial(n, d);
    let mut acc = BigRational::zero();
    for big_l in 1..=t {
        let ne = n_exact(r, big_l, s);
        let numer = binomial_signed(n as i128 - ne as i128, d);
        let term = BigRational::from_integer(binomial(t, big_l))
            * BigRational::new(numer, denom.clone())
            / big(ne);
        if big_l % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Largest `N` in `[0, M]` whose union estimate fits under `n - (d-1)`:
/// `N(r+1) - N(N-1)/(M(M-1)) * (M(r+1) - n) <= n - (d-1)`.
///
/// Returns 0 when `n < max(r+1, d-1)`. For `M <= 1` the quadratic
/// correction is taken as 0. Evaluation is exact rational.
pub fn n1(n: u64, r: u64, d: u64, m: u64) -> u64 {
    if n < (r + 1).max(d.saturating_sub(1)) {
        return 0;
    }
    let budget = BigRational::from_integer(BigInt::from(n - (d - 1).min(n)));
    for candidate in (0..=m).rev() {
        let linear = big(candidate * (r + 1));
        let correction = if m <= 1 || candidate == 0 {
            BigRational::zero()
        } else {
            let numer = BigInt::from(candidate)
                * BigInt::from(candidate - 1)
                * (BigInt::from(m) * BigInt::from(r + 1) - BigInt::from(n));
            BigRational::new(numer, BigInt::from(m) * BigInt::from(m - 1))
        };
        if linear - correction <= budget {
            return candidate;
        }
    }
    0
}

/// `max over 0 <= T <= t with N_e(r, T, s) <= m of ceil(m * f_tilde(m, d-1, r, T, s))`.
///
/// `T = 0` contributes 0 and `N_e(r, 0, s)` is taken as 1, so the result is
/// 0 whenever `m` is too small for any union to fit. The filter also skips
/// `T` with `r < s(T-1)`, where no exact subfamily of size `T` exists.
pub fn cal_n1(m: u64, d_minus_1: u64, r: u64, t: u64, s: u64) -> u64 {
    if m == 0 {
        return 0;
    }
    let mut best = 0u64;
    for cap_t in 1..=t {
        if s.saturating_mul(cap_t - 1) > r {
            break;
        }
        if n_exact(r, cap_t, s) > m {
            continue;
        }
        let value = ceil_times(m, &f_tilde(m, d_minus_1, r, cap_t, s));
        best = best.max(value);
    }
    best
}

/// `ceil(n * q)` clamped below at 0.
fn ceil_times(n: u64, q: &BigRational) -> u64 {
    let v = (big(n) * q).ceil().to_integer();
    if v.is_negative() {
        0
    } else {
        v.to_u64().expect("bound value fits in u64")
    }
}

/// The repeated two-set construction: `n - ceil(n q) - ceil((n - ceil(n q)) q)`.
fn two_phase(n: u64, q: &BigRational) -> u64 {
    let a = ceil_times(n, q).min(n);
    let b = ceil_times(n - a, q).min(n - a);
    n - a - b
}

/// Parameter record for the bound evaluators. `k` is carried for context
/// only; no bound reads it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundParams {
    pub n: u64,
    pub k: Option<u64>,
    pub d: u64,
    pub r: u64,
    pub t: u64,
    pub s: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// Two-set construction driven by the general estimate `p2`.
    ThmP2,
    /// Best-prefix variant of `ThmP2`: maximizes `p2(r, t', s)` over `t' <= t`.
    ThmP2Best,
    /// Two-set construction driven by the exact estimate `pe`.
    ThmPe,
    /// Distance-aware two-phase bound `n - M1 - M2` built from `n1` and `pe`.
    ThmM1M2,
    /// Distance-aware bound built from the graced estimate `cal_n1`.
    ThmRts2,
    /// Classical availability bound `n - (d-1) - n1(n, r, d, ceil(n p1))`.
    ThmClassical,
    /// Two-floor locality bound for quantum codes.
    Gg23,
    /// Quantum Singleton bound `k <= n - 2(d-1)`.
    QSingleton,
    /// Generalized Singleton bound `d <= n - k - ceil(k/r) + 2`, inverted for k.
    Ghsy,
    /// Availability bound `d <= n - sum_i floor((k-1)/r^i)`, inverted for k.
    Btv,
}

impl BoundKind {
    pub const ALL: [BoundKind; 10] = [
        BoundKind::ThmP2,
        BoundKind::ThmP2Best,
        BoundKind::ThmPe,
        BoundKind::ThmM1M2,
        BoundKind::ThmRts2,
        BoundKind::ThmClassical,
        BoundKind::Gg23,
        BoundKind::QSingleton,
        BoundKind::Ghsy,
        BoundKind::Btv,
    ];

    pub fn id(self) -> &'static str {
        match self {
            BoundKind::ThmP2 => "thm_p2",
            BoundKind::ThmP2Best => "thm_p2_best",
            BoundKind::ThmPe => "thm_pe",
            BoundKind::ThmM1M2 => "thm_m1m2",
            BoundKind::ThmRts2 => "thm_rts2",
            BoundKind::ThmClassical => "thm_classical",
            BoundKind::Gg23 => "gg23",
            BoundKind::QSingleton => "q_singleton",
            BoundKind::Ghsy => "ghsy",
            BoundKind::Btv => "btv",
        }
    }

    pub fn parse(id: &str) -> Option<BoundKind> {
        Self::ALL.into_iter().find(|k| k.id() == id)
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Upper bound on `k` for the given parameters, floored at 0.
pub fn evaluate_bound(kind: BoundKind, p: &BoundParams) -> Result<u64, BoundsError> {
    if p.n == 0 {
        return Err(inapplicable("n must be at least 1"));
    }
    match kind {
        BoundKind::ThmP2 => {
            require_rt(p)?;
            require_s_positive(p)?;
            let q = p2(p.r, p.t, p.s).expect("s >= 1 checked");
            Ok(two_phase(p.n, &q))
        }
        BoundKind::ThmP2Best => {
            require_rt(p)?;
            require_s_positive(p)?;
            let q = (1..=p.t)
                .map(|t| p2(p.r, t, p.s).expect("s >= 1 checked"))
                .max()
                .expect("t >= 1");
            Ok(two_phase(p.n, &q))
        }
        BoundKind::ThmPe => {
            require_rt(p)?;
            let q = require_exact_condition(p)?;
            Ok(two_phase(p.n, &q))
        }
        BoundKind::ThmM1M2 => {
            require_rt(p)?;
            require_d(p)?;
            let q = require_exact_condition(p)?;
            let m1 = (p.d - 1) + n1(p.n, p.r, p.d, ceil_times(p.n, &q));
            let rest = p.n.saturating_sub(m1);
            let m2 = (p.d - 1) + n1(rest, p.r, p.d, ceil_times(rest, &q));
            Ok(p.n.saturating_sub(m1 + m2))
        }
        BoundKind::ThmRts2 => {
            require_rt(p)?;
            require_d(p)?;
            if p.r < p.s.saturating_mul(p.t - 1) {
                return Err(inapplicable(format!(
                    "requires r >= s(t-1): r={}, t={}, s={}",
                    p.r, p.t, p.s
                )));
            }
            let first = cal_n1(p.n, p.d - 1, p.r, p.t, p.s);
            let rest = p.n.saturating_sub(p.d - 1).saturating_sub(first);
            let second = cal_n1(rest, p.d - 1, p.r, p.t, p.s);
            Ok(p.n.saturating_sub(2 * (p.d - 1) + first + second))
        }
        BoundKind::ThmClassical => {
            require_rt(p)?;
            require_d(p)?;
            if p.n < (p.r + 1).max(p.d.saturating_sub(1)) {
                return Err(inapplicable(format!(
                    "requires n >= max(r+1, d-1): n={}, r={}, d={}",
                    p.n, p.r, p.d
                )));
            }
            let q = p1(p.r, p.t);
            let selected = n1(p.n, p.r, p.d, ceil_times(p.n, &q));
            Ok(p.n.saturating_sub((p.d - 1) + selected))
        }
        BoundKind::Gg23 => {
            require_d(p)?;
            if p.r == 0 {
                return Err(inapplicable("r must be at least 1"));
            }
            let n = p.n as i128;
            let d1 = p.d as i128 - 1;
            let r1 = p.r as i128 + 1;
            let first_floor = (n - d1).div_euclid(r1);
            let second_floor = (n - 2 * d1 - first_floor).div_euclid(r1);
            Ok((n - 2 * d1 - first_floor - second_floor).max(0) as u64)
        }
        BoundKind::QSingleton => {
            require_d(p)?;
            Ok(p.n.saturating_sub(2 * (p.d - 1)))
        }
        BoundKind::Ghsy => {
            require_d(p)?;
            if p.r == 0 {
                return Err(inapplicable("r must be at least 1"));
            }
            // The d-form is monotone in k, so the first k from above wins.
            for k in (0..=p.n).rev() {
                let ceil_kr = k.div_ceil(p.r) as i128;
                if (p.d as i128) <= p.n as i128 - k as i128 - ceil_kr + 2 {
                    return Ok(k);
                }
            }
            Ok(0)
        }
        BoundKind::Btv => {
            require_rt(p)?;
            require_d(p)?;
            for k in (1..=p.n).rev() {
                let mut sum = 0i128;
                let mut power = 1u128;
                for _ in 0..=p.t {
                    sum += ((k - 1) as u128 / power) as i128;
                    if power > (k - 1) as u128 {
                        break;
                    }
                    power = power.saturating_mul(p.r as u128);
                }
                if (p.d as i128) <= p.n as i128 - sum {
                    return Ok(k);
                }
            }
            Ok(0)
        }
    }
}

fn require_rt(p: &BoundParams) -> Result<(), BoundsError> {
    if p.r == 0 || p.t == 0 {
        Err(inapplicable("r and t must be at least 1"))
    } else {
        Ok(())
    }
}

fn require_d(p: &BoundParams) -> Result<(), BoundsError> {
    if p.d == 0 {
        Err(inapplicable("d must be at least 1"))
    } else {
        Ok(())
    }
}

fn require_s_positive(p: &BoundParams) -> Result<(), BoundsError> {
    if p.s == 0 {
        Err(inapplicable("s must be at least 1 for the p2 estimate"))
    } else {
        Ok(())
    }
}

fn require_exact_condition(p: &BoundParams) -> Result<BigRational, BoundsError> {
    pe(p.r, p.t, p.s).map_err(|_| {
        inapplicable(format!(
            "requires r >= s(t-1): r={}, t={}, s={}",
            p.r, p.t, p.s
        ))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVariable {
    N,
    D,
    R,
    T,
    S,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::N => "n",
            SweepVariable::D => "d",
            SweepVariable::R => "r",
            SweepVariable::T => "t",
            SweepVariable::S => "s",
        }
    }

    pub fn parse(name: &str) -> Option<SweepVariable> {
        match name {
            "n" => Some(SweepVariable::N),
            "d" => Some(SweepVariable::D),
            "r" => Some(SweepVariable::R),
            "t" => Some(SweepVariable::T),
            "s" => Some(SweepVariable::S),
            _ => None,
        }
    }

    fn apply(self, params: &mut BoundParams, value: u64) {
        match self {
            SweepVariable::N => params.n = value,
            SweepVariable::D => params.d = value,
            SweepVariable::R => params.r = value,
            SweepVariable::T => params.t = value,
            SweepVariable::S => params.s = value,
        }
    }
}

/// One sweep row: the variable value and one cell per requested bound,
/// `None` marking an inapplicable parameter combination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub value: u64,
    pub cells: Vec<Option<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundTable {
    pub sweep_variable: SweepVariable,
    pub kinds: Vec<BoundKind>,
    pub rows: Vec<SweepRow>,
}

impl BoundTable {
    /// Cell lookup by bound kind; `None` when the kind was not requested or
    /// the cell is inapplicable.
    pub fn cell(&self, row: &SweepRow, kind: BoundKind) -> Option<u64> {
        let idx = self.kinds.iter().position(|&k| k == kind)?;
        row.cells[idx]
    }
}

/// Evaluates every requested bound over an inclusive range of one variable.
/// Rows are independent; results are deterministic in any evaluation order.
pub fn sweep(
    kinds: &[BoundKind],
    template: &BoundParams,
    variable: SweepVariable,
    lo: u64,
    hi: u64,
) -> BoundTable {
    let rows = (lo..=hi)
        .map(|value| {
            let mut params = template.clone();
            variable.apply(&mut params, value);
            SweepRow {
                value,
                cells: kinds
                    .iter()
                    .map(|&kind| evaluate_bound(kind, &params).ok())
                    .collect(),
            }
        })
        .collect();
    BoundTable {
        sweep_variable: variable,
        kinds: kinds.to_vec(),
        rows,
    }
}
