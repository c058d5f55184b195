//! Constraint systems for joint, successive and generalized successive
//! decoding, and the cut-set outer bound.
//!
//! Constraints are enumerated with the user subset `T` in the outer loop and
//! the BS subset `S` in the inner loop, both by increasing bitmask, so indices
//! are stable across runs.

use alloc::vec;
use alloc::vec::Vec;

use crate::gaussinfo::{self, InfoError, Var, WhitenedChannel};
use crate::linalg::{self, CMat};
use crate::lp;
use crate::model::{NetworkInstance, QuantizerB};
use crate::subset::{self, Mask};

/// Tolerance for membership and fronthaul feasibility.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    Jd,
    SdRate,
    SdFronthaul,
    GsdRate,
    GsdFronthaul,
    Cutset,
}

impl ConstraintKind {
    pub fn label(self) -> &'static str {
        match self {
            ConstraintKind::Jd => "jd",
            ConstraintKind::SdRate => "sd-rate",
            ConstraintKind::SdFronthaul => "sd-fronthaul",
            ConstraintKind::GsdRate => "gsd-rate",
            ConstraintKind::GsdFronthaul => "gsd-fronthaul",
            ConstraintKind::Cutset => "cutset",
        }
    }
}

/// `Σ_{k∈T} R_k ≤ rhs`, indexed by `(T, S)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsetConstraint {
    pub kind: ConstraintKind,
    pub users: Mask,
    pub bss: Mask,
    pub rhs: f64,
    /// The raw right-hand side was negative and has been clamped to 0.
    pub clamped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub max_users: usize,
    pub max_bss: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Self { max_users: 6, max_bss: 6 }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegionError {
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error("{what} = {value} exceeds the enumeration cap {cap}")]
    CapExceeded { what: &'static str, value: usize, cap: usize },
    #[error("decoding order is not a permutation of {users} messages and {bss} quantizations")]
    InvalidOrder { users: usize, bss: usize },
    #[error("rate point has {found} entries, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("linear program failed: {0}")]
    Lp(#[from] lp::LpError),
}

impl Caps {
    pub fn check(&self, instance: &NetworkInstance) -> Result<(), RegionError> {
        if instance.users() > self.max_users {
            return Err(RegionError::CapExceeded { what: "K", value: instance.users(), cap: self.max_users });
        }
        if instance.bss() > self.max_bss {
            return Err(RegionError::CapExceeded { what: "L", value: instance.bss(), cap: self.max_bss });
        }
        Ok(())
    }
}

/// A rate-fronthaul point in bits per complex dimension. Fronthaul entries may
/// be `+∞` when a quantizer is noiseless.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFronthaulTuple {
    pub rates: Vec<f64>,
    pub fronthaul: Vec<f64>,
}

impl RateFronthaulTuple {
    pub fn sum_rate(&self) -> f64 {
        self.rates.iter().sum()
    }

    pub fn sum_fronthaul(&self) -> f64 {
        self.fronthaul.iter().sum()
    }

    /// `Σ_i w_i · p_i`.
    pub fn mix(points: &[(f64, &RateFronthaulTuple)]) -> RateFronthaulTuple {
        let k = points.first().map_or(0, |p| p.1.rates.len());
        let l = points.first().map_or(0, |p| p.1.fronthaul.len());
        let mut rates = vec![0.0; k];
        let mut fronthaul = vec![0.0; l];
        for (w, p) in points {
            if *w == 0.0 {
                continue;
            }
            for (a, r) in rates.iter_mut().zip(&p.rates) {
                *a += w * r;
            }
            for (a, c) in fronthaul.iter_mut().zip(&p.fronthaul) {
                *a += w * c;
            }
        }
        RateFronthaulTuple { rates, fronthaul }
    }
}

/// Raw JD right-hand side `Σ_{ℓ∈S}[C_ℓ − I(Y_ℓ;Ŷ_ℓ|X_K)] + I(X_T;Ŷ_{S^c}|X_{T^c})`,
/// possibly negative or `−∞`.
pub(crate) fn jd_rhs_raw(instance: &NetworkInstance, wc: &WhitenedChannel, bt: &[CMat], penalties: &[f64], users: Mask, bss: Mask) -> f64 {
    let cut: f64 = subset::members(bss).map(|l| instance.fronthaul(l) - penalties[l]).sum();
    let observed = subset::complement(bss, instance.bss());
    cut + wc.info(bt, users, observed)
}

/// `I(Y_ℓ; Ŷ_ℓ | X_K)` per base station.
pub fn penalties(b: &QuantizerB) -> Vec<f64> {
    b.whitened_matrices().iter().map(gaussinfo::penalty_whitened).collect()
}

pub fn jd_constraints(instance: &NetworkInstance, b: &QuantizerB) -> Result<Vec<SubsetConstraint>, RegionError> {
    jd_constraints_capped(instance, b, Caps::default())
}

pub fn jd_constraints_capped(instance: &NetworkInstance, b: &QuantizerB, caps: Caps) -> Result<Vec<SubsetConstraint>, RegionError> {
    caps.check(instance)?;
    let wc = WhitenedChannel::new(instance)?;
    if b.bss() != instance.bss() {
        return Err(InfoError::QuantizerMismatch { expected: instance.bss(), found: b.bss() }.into());
    }
    let pen = penalties(b);
    let mut out = Vec::with_capacity(((1usize << instance.users()) - 1) << instance.bss());
    for t in 1..=subset::full(instance.users()) {
        for s in 0..=subset::full(instance.bss()) {
            let raw = jd_rhs_raw(instance, &wc, b.whitened_matrices(), &pen, t, s);
            let clamped = raw < 0.0 || raw.is_nan();
            out.push(SubsetConstraint {
                kind: ConstraintKind::Jd,
                users: t,
                bss: s,
                rhs: if clamped { 0.0 } else { raw },
                clamped,
            });
        }
    }
    Ok(out)
}

/// Fronthaul feasibility of one BS subset under successive decoding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FronthaulCheck {
    pub bss: Mask,
    /// `I(Y_S; Ŷ_S | Ŷ_{S^c})`.
    pub usage: f64,
    /// `Σ_{ℓ∈S} C_ℓ`.
    pub capacity: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdRegion {
    pub rates: Vec<SubsetConstraint>,
    pub fronthaul: Vec<FronthaulCheck>,
    pub feasible: bool,
}

pub fn sd_constraints(instance: &NetworkInstance, b: &QuantizerB) -> Result<SdRegion, RegionError> {
    sd_constraints_capped(instance, b, Caps::default())
}

pub fn sd_constraints_capped(instance: &NetworkInstance, b: &QuantizerB, caps: Caps) -> Result<SdRegion, RegionError> {
    caps.check(instance)?;
    let wc = WhitenedChannel::new(instance)?;
    let bt = b.whitened_matrices();
    let all_bss = subset::full(instance.bss());
    let rates = (1..=subset::full(instance.users()))
        .map(|t| SubsetConstraint {
            kind: ConstraintKind::SdRate,
            users: t,
            bss: 0,
            rhs: wc.info(bt, t, all_bss),
            clamped: false,
        })
        .collect();
    let fronthaul: Vec<FronthaulCheck> = (1..=all_bss)
        .map(|s| {
            let usage = gaussinfo::sd_usage_with(&wc, bt, s);
            let capacity: f64 = subset::members(s).map(|l| instance.fronthaul(l)).sum();
            FronthaulCheck { bss: s, usage, capacity, satisfied: usage <= capacity + MEMBERSHIP_TOL }
        })
        .collect();
    let feasible = fronthaul.iter().all(|f| f.satisfied);
    Ok(SdRegion { rates, fronthaul, feasible })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Codeword {
    Quantization(usize),
    Message(usize),
}

/// Decoding sequence of all `L` quantization and `K` message codewords.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecodingOrder {
    items: Vec<Codeword>,
}

impl DecodingOrder {
    pub fn new(items: Vec<Codeword>, users: usize, bss: usize) -> Result<Self, RegionError> {
        let mut seen_u = vec![false; users];
        let mut seen_b = vec![false; bss];
        let bad = RegionError::InvalidOrder { users, bss };
        if items.len() != users + bss {
            return Err(bad);
        }
        for it in &items {
            let slot = match *it {
                Codeword::Message(k) if k < users => &mut seen_u[k],
                Codeword::Quantization(l) if l < bss => &mut seen_b[l],
                _ => return Err(bad),
            };
            if *slot {
                return Err(bad);
            }
            *slot = true;
        }
        Ok(Self { items })
    }

    /// All quantizations along `bs_order`, then all messages along `user_order`.
    pub fn successive(bs_order: &[usize], user_order: &[usize]) -> Result<Self, RegionError> {
        let items = bs_order
            .iter()
            .map(|&l| Codeword::Quantization(l))
            .chain(user_order.iter().map(|&k| Codeword::Message(k)))
            .collect();
        Self::new(items, user_order.len(), bs_order.len())
    }

    pub fn items(&self) -> &[Codeword] {
        &self.items
    }

    /// Every order of `users` messages and `bss` quantizations, in lexicographic
    /// order of positions.
    pub fn all(users: usize, bss: usize) -> Vec<DecodingOrder> {
        let total = users + bss;
        let code = |i: usize| if i < bss { Codeword::Quantization(i) } else { Codeword::Message(i - bss) };
        subset::permutations(total)
            .into_iter()
            .map(|p| DecodingOrder { items: p.into_iter().map(code).collect() })
            .collect()
    }
}

impl core::fmt::Display for DecodingOrder {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for (i, it) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match it {
                Codeword::Quantization(l) => write!(f, "Yq{}", l + 1)?,
                Codeword::Message(k) => write!(f, "X{}", k + 1)?,
            }
        }
        Ok(())
    }
}

/// Rates and fronthaul requirements of generalized successive decoding.
///
/// `R_k = I(X_k; Ŷ_J | X_I)` and `C_ℓ = I(Y_ℓ; Ŷ_ℓ | Ŷ_J, X_I)`, where `I` and
/// `J` are the messages and quantizations decoded earlier.
pub fn gsd_rates(instance: &NetworkInstance, b: &QuantizerB, order: &DecodingOrder) -> Result<RateFronthaulTuple, RegionError> {
    let jc = gaussinfo::extended_covariance(instance, b)?;
    gsd_rates_with(&jc, instance.users(), instance.bss(), order)
}

pub fn gsd_rates_with(
    jc: &gaussinfo::JointCovariance,
    users: usize,
    bss: usize,
    order: &DecodingOrder,
) -> Result<RateFronthaulTuple, RegionError> {
    if order.items.len() != users + bss {
        return Err(RegionError::InvalidOrder { users, bss });
    }
    let mut rates = vec![0.0; users];
    let mut fronthaul = vec![0.0; bss];
    let mut decoded: Vec<Var> = Vec::new();
    let mut quantized: Vec<Var> = Vec::new();
    for it in &order.items {
        match *it {
            Codeword::Message(k) => {
                let messages: Vec<Var> = decoded.iter().copied().filter(|v| matches!(v, Var::User(_))).collect();
                rates[k] = gaussinfo::cond_mutual_info(jc, &[Var::User(k)], &quantized, &messages)?.max(0.0);
                decoded.push(Var::User(k));
            }
            Codeword::Quantization(l) => {
                fronthaul[l] = gaussinfo::cond_mutual_info(jc, &[Var::Received(l)], &[Var::Quantized(l)], &decoded)?.max(0.0);
                decoded.push(Var::Quantized(l));
                quantized.push(Var::Quantized(l));
            }
        }
    }
    Ok(RateFronthaulTuple { rates, fronthaul })
}

/// Largest GSD sum rate over all decoding orders whose fronthaul requirements
/// fit the capacities; exhaustive, so only for `K + L ≤ 7`.
pub fn gsd_max_sum_rate(instance: &NetworkInstance, b: &QuantizerB) -> Result<Option<(f64, DecodingOrder)>, RegionError> {
    let total = instance.users() + instance.bss();
    if total > 7 {
        return Err(RegionError::CapExceeded { what: "K+L", value: total, cap: 7 });
    }
    let jc = gaussinfo::extended_covariance(instance, b)?;
    let mut best: Option<(f64, DecodingOrder)> = None;
    for order in DecodingOrder::all(instance.users(), instance.bss()) {
        let t = gsd_rates_with(&jc, instance.users(), instance.bss(), &order)?;
        let fits = t.fronthaul.iter().zip(instance.fronthauls()).all(|(u, c)| *u <= c + MEMBERSHIP_TOL);
        if fits && best.as_ref().is_none_or(|(v, _)| t.sum_rate() > *v) {
            best = Some((t.sum_rate(), order));
        }
    }
    Ok(best)
}

/// Cut-set bound at the instance's input covariances:
/// `Σ_{k∈T} R_k ≤ Σ_{ℓ∈S} C_ℓ + I(X_T; Y_{S^c} | X_{T^c})`.
pub fn cutset_constraints(instance: &NetworkInstance) -> Result<Vec<SubsetConstraint>, RegionError> {
    cutset_constraints_capped(instance, Caps::default())
}

pub fn cutset_constraints_capped(instance: &NetworkInstance, caps: Caps) -> Result<Vec<SubsetConstraint>, RegionError> {
    caps.check(instance)?;
    let wc = WhitenedChannel::new(instance)?;
    let n = instance.rx_antennas();
    let unit: Vec<CMat> = (0..instance.bss()).map(|_| linalg::identity(n)).collect();
    let mut out = Vec::new();
    for t in 1..=subset::full(instance.users()) {
        for s in 0..=subset::full(instance.bss()) {
            let cut: f64 = subset::members(s).map(|l| instance.fronthaul(l)).sum();
            let observed = subset::complement(s, instance.bss());
            out.push(SubsetConstraint {
                kind: ConstraintKind::Cutset,
                users: t,
                bss: s,
                rhs: cut + wc.info(&unit, t, observed),
                clamped: false,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// `min (rhs − Σ_{k∈T} R_k)` over all constraints; `+∞` for an empty list.
    pub min_slack: f64,
    /// The constraint attaining the minimum slack when the point is outside.
    pub violated: Option<SubsetConstraint>,
}

pub fn membership(rates: &[f64], constraints: &[SubsetConstraint]) -> Membership {
    let mut min_slack = f64::INFINITY;
    let mut worst = None;
    for c in constraints {
        let used: f64 = subset::members(c.users).map(|k| rates[k]).sum();
        let slack = c.rhs - used;
        if slack < min_slack {
            min_slack = slack;
            worst = Some(*c);
        }
    }
    let member = min_slack >= -MEMBERSHIP_TOL;
    Membership { member, min_slack, violated: if member { None } else { worst } }
}

/// `max(0, min_S { Σ_{ℓ∈S}[C_ℓ − I(Y_ℓ;Ŷ_ℓ|X_K)] + I(X_K; Ŷ_{S^c}) })`.
pub fn jd_sum_rate_fixed_b(instance: &NetworkInstance, b: &QuantizerB) -> Result<f64, RegionError> {
    Caps::default().check(instance)?;
    let wc = WhitenedChannel::new(instance)?;
    Ok(jd_sum_rate_with(instance, &wc, b))
}

pub(crate) fn jd_sum_rate_with(instance: &NetworkInstance, wc: &WhitenedChannel, b: &QuantizerB) -> f64 {
    let pen = penalties(b);
    let all = subset::full(instance.users());
    (0..=subset::full(instance.bss()))
        .map(|s| jd_rhs_raw(instance, wc, b.whitened_matrices(), &pen, all, s))
        .fold(f64::INFINITY, f64::min)
        .max(0.0)
}

/// Weighted-rate maximization over a polymatroid-style constraint list.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedRate {
    pub rates: Vec<f64>,
    pub value: f64,
    /// Dual multiplier per user subset `T` (index `T − 1`), attached to the
    /// tightest `S` for that `T`.
    pub duals: Vec<(SubsetConstraint, f64)>,
}

/// `max Σ μ_k R_k` subject to `Σ_{k∈T} R_k ≤ rhs(T,S)` and `R ≥ 0`.
///
/// Only the tightest `S` per `T` enters the LP.
pub fn max_weighted_rate(users: usize, constraints: &[SubsetConstraint], weights: &[f64]) -> Result<WeightedRate, RegionError> {
    if weights.len() != users {
        return Err(RegionError::Dimension { expected: users, found: weights.len() });
    }
    let mut tightest: Vec<Option<SubsetConstraint>> = vec![None; 1 << users];
    for c in constraints {
        let slot = &mut tightest[c.users as usize];
        if slot.is_none_or(|s| c.rhs < s.rhs) {
            *slot = Some(*c);
        }
    }
    let rows: Vec<SubsetConstraint> = tightest.into_iter().flatten().filter(|c| c.rhs.is_finite()).collect();
    let a: Vec<Vec<f64>> = rows
        .iter()
        .map(|c| (0..users).map(|k| if subset::contains(c.users, k) { 1.0 } else { 0.0 }).collect())
        .collect();
    let rhs: Vec<f64> = rows.iter().map(|c| c.rhs.max(0.0)).collect();
    let sol = lp::maximize(weights, &a, &rhs)?;
    Ok(WeightedRate {
        rates: sol.x,
        value: sol.value,
        duals: rows.into_iter().zip(sol.duals).collect(),
    })
}

/// Pareto boundary of a two-user region, as vertices sorted by increasing `R_1`.
pub fn boundary_2d(constraints: &[SubsetConstraint], directions: usize) -> Result<Vec<[f64; 2]>, RegionError> {
    let mut pts: Vec<[f64; 2]> = Vec::new();
    let steps = directions.max(2);
    for i in 0..steps {
        let phi = core::f64::consts::FRAC_PI_2 * i as f64 / (steps - 1) as f64;
        let w = [libm::cos(phi).max(0.0), libm::sin(phi).max(0.0)];
        // Break ties toward the axis so corner points are reached.
        let w = [w[0] + 1e-9 * w[1], w[1] + 1e-9 * w[0]];
        let sol = max_weighted_rate(2, constraints, &w)?;
        pts.push([sol.rates[0], sol.rates[1]]);
    }
    // Axis intercepts complete the polyline.
    let r1 = max_weighted_rate(2, constraints, &[1.0, 0.0])?.value;
    let r2 = max_weighted_rate(2, constraints, &[0.0, 1.0])?.value;
    pts.push([0.0, r2]);
    pts.push([r1, 0.0]);
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(b[1].total_cmp(&a[1])));
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
    Ok(pts)
}
