//! Set functions on small ground sets: sub/supermodularity checks, greedy
//! extreme points of the associated polyhedra, and the two set functions that
//! describe sum-fronthaul JD extreme points and SD fronthaul allocations.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::gaussinfo::{InfoError, WhitenedChannel};
use crate::linalg::CMat;
use crate::model::{NetworkInstance, QuantizerB};
use crate::regions;
use crate::subset::{self, Mask};

/// Absolute tolerance for every set-function comparison.
pub const SET_TOL: f64 = 1e-9;
/// Largest ground set for brute-force pair checks.
pub const MAX_CHECK: usize = 12;
/// Largest ground set a memo table is allocated for.
pub const MAX_GROUND: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum SetFunctionError {
    #[error("ground set of size {n} exceeds the brute-force limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("ordering is not a permutation of the ground set")]
    BadOrdering,
}

/// A real function on subsets of `{0..n-1}`, memoized by bitmask.
pub struct SetFunction<'a> {
    n: usize,
    eval: Box<dyn Fn(Mask) -> f64 + 'a>,
    memo: RefCell<Vec<Option<f64>>>,
}

impl<'a> SetFunction<'a> {
    pub fn new(n: usize, eval: impl Fn(Mask) -> f64 + 'a) -> Self {
        assert!(n <= MAX_GROUND, "ground set too large for a memo table");
        Self { n, eval: Box::new(eval), memo: RefCell::new(vec![None; 1 << n]) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, s: Mask) -> f64 {
        if let Some(v) = self.memo.borrow()[s as usize] {
            return v;
        }
        let v = (self.eval)(s);
        self.memo.borrow_mut()[s as usize] = Some(v);
        v
    }

    /// All `2^n` values, indexed by bitmask.
    pub fn table(&self) -> Vec<f64> {
        (0..1u32 << self.n).map(|s| self.value(s)).collect()
    }
}

impl core::fmt::Debug for SetFunction<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("SetFunction").field("n", &self.n).finish_non_exhaustive()
    }
}

/// Result of a brute-force modularity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularityCheck {
    pub holds: bool,
    /// First violating pair `(S, T)` in enumeration order, with the amount by
    /// which the inequality fails.
    pub witness: Option<(Mask, Mask, f64)>,
    /// Smallest margin over all pairs (negative when violated).
    pub worst_margin: f64,
}

fn pair_check(f: &SetFunction<'_>, margin: impl Fn(f64, f64, f64, f64) -> f64) -> Result<ModularityCheck, SetFunctionError> {
    if f.n > MAX_CHECK {
        return Err(SetFunctionError::TooLarge { n: f.n, limit: MAX_CHECK });
    }
    let table = f.table();
    let top = 1u32 << f.n;
    let mut witness = None;
    let mut worst = f64::INFINITY;
    for s in 0..top {
        for t in (s + 1)..top {
            let m = margin(table[s as usize], table[t as usize], table[(s | t) as usize], table[(s & t) as usize]);
            if m.is_nan() {
                continue;
            }
            worst = worst.min(m);
            if m < -SET_TOL && witness.is_none() {
                witness = Some((s, t, -m));
            }
        }
    }
    Ok(ModularityCheck { holds: witness.is_none(), witness, worst_margin: worst })
}

/// `f(S) + f(T) ≥ f(S∪T) + f(S∩T)` for all pairs, within [`SET_TOL`].
pub fn is_submodular(f: &SetFunction<'_>) -> Result<ModularityCheck, SetFunctionError> {
    pair_check(f, |fs, ft, fu, fi| {
        if fs == ft && fs.is_infinite() {
            return 0.0;
        }
        (fs + ft) - (fu + fi)
    })
}

/// `g(S) + g(T) ≤ g(S∪T) + g(S∩T)` for all pairs, within [`SET_TOL`].
pub fn is_supermodular(g: &SetFunction<'_>) -> Result<ModularityCheck, SetFunctionError> {
    pair_check(g, |gs, gt, gu, gi| {
        if gu == gi && gu.is_infinite() {
            return 0.0;
        }
        (gu + gi) - (gs + gt)
    })
}

/// Increments `v_{o_j} = f({o_1..o_j}) − f({o_1..o_{j-1}})` along `ordering`.
pub fn chain_increments(f: &SetFunction<'_>, ordering: &[usize]) -> Result<Vec<f64>, SetFunctionError> {
    if !subset::is_permutation(ordering, f.n) {
        return Err(SetFunctionError::BadOrdering);
    }
    let chain = subset::chain(ordering);
    let mut out = vec![0.0; f.n];
    for (j, &i) in ordering.iter().enumerate() {
        out[i] = f.value(chain[j + 1]) - f.value(chain[j]);
    }
    Ok(out)
}

/// Extreme point of `P(f) = {x : x(S) ≤ f(S) ∀S}` for submodular `f`.
///
/// Submodularity is not checked here; on other functions the result is just
/// the chain increments, which [`polyhedron_check`] will flag.
pub fn greedy_extreme_point(f: &SetFunction<'_>, ordering: &[usize]) -> Result<Vec<f64>, SetFunctionError> {
    chain_increments(f, ordering)
}

/// Extreme point of `{x : x(S) ≥ g(S) ∀S}` for supermodular `g`.
pub fn supermodular_extreme_point(g: &SetFunction<'_>, ordering: &[usize]) -> Result<Vec<f64>, SetFunctionError> {
    chain_increments(g, ordering)
}

/// Which side of the set function the polyhedron lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `x(S) ≤ f(S)`.
    AtMost,
    /// `x(S) ≥ f(S)`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedronCheck {
    /// Minimum slack over all `2^n` constraints (negative means outside).
    pub min_slack: f64,
    /// Nonempty sets whose constraint holds with equality (within [`SET_TOL`]).
    pub tight: Vec<Mask>,
}

pub fn polyhedron_check(f: &SetFunction<'_>, x: &[f64], side: Side) -> PolyhedronCheck {
    let mut min_slack = f64::INFINITY;
    let mut tight = Vec::new();
    for s in 0..1u32 << f.n {
        let xs: f64 = subset::members(s).map(|i| x[i]).sum();
        let slack = match side {
            Side::AtMost => f.value(s) - xs,
            Side::AtLeast => xs - f.value(s),
        };
        if s != 0 || slack.is_finite() {
            min_slack = min_slack.min(slack);
        }
        if s != 0 && slack.abs() <= SET_TOL {
            tight.push(s);
        }
    }
    PolyhedronCheck { min_slack, tight }
}

/// Number of nonempty prefixes of `ordering` whose constraint is tight at `x`.
pub fn tight_chain_count(f: &SetFunction<'_>, x: &[f64], ordering: &[usize]) -> usize {
    subset::chain(ordering)
        .into_iter()
        .skip(1)
        .filter(|&s| {
            let xs: f64 = subset::members(s).map(|i| x[i]).sum();
            (f.value(s) - xs).abs() <= SET_TOL
        })
        .count()
}

/// Components shared by the two set functions below.
struct Parts {
    wc: WhitenedChannel,
    bt: Vec<CMat>,
    penalties: Vec<f64>,
}

fn parts(instance: &NetworkInstance, b: &QuantizerB) -> Result<Parts, InfoError> {
    if b.bss() != instance.bss() {
        return Err(InfoError::QuantizerMismatch { expected: instance.bss(), found: b.bss() });
    }
    Ok(Parts {
        wc: WhitenedChannel::new(instance)?,
        bt: b.whitened_matrices().to_vec(),
        penalties: regions::penalties(b),
    })
}

/// `f(T) = min{C − Σ_ℓ I(Y_ℓ;Ŷ_ℓ|X_K), I(X_T; Ŷ_L | X_{T^c})}` over users.
pub fn f_jd_sumfronthaul(instance: &NetworkInstance, b: &QuantizerB, csum: f64) -> Result<SetFunction<'static>, InfoError> {
    let p = parts(instance, b)?;
    let reduced = csum - p.penalties.iter().sum::<f64>();
    let all_bss = subset::full(instance.bss());
    Ok(SetFunction::new(instance.users(), move |t| reduced.min(p.wc.info(&p.bt, t, all_bss))))
}

/// `g(S) = R + Σ_{ℓ∈S} I(Y_ℓ;Ŷ_ℓ|X_K) − I(X_K; Ŷ_{S^c})` over BSs, and `g⁺ = max{g, 0}`.
pub fn g_fronthaul(instance: &NetworkInstance, b: &QuantizerB, rate: f64) -> Result<(SetFunction<'static>, SetFunction<'static>), InfoError> {
    let make = |clamp: bool| -> Result<SetFunction<'static>, InfoError> {
        let p = parts(instance, b)?;
        let (users, bss) = (subset::full(instance.users()), instance.bss());
        Ok(SetFunction::new(bss, move |s| {
            let pen: f64 = subset::members(s).map(|l| p.penalties[l]).sum();
            let v = rate + pen - p.wc.info(&p.bt, users, subset::complement(s, bss));
            if clamp {
                v.max(0.0)
            } else {
                v
            }
        }))
    };
    Ok((make(false)?, make(true)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::random_instance;

    fn card(n: usize) -> SetFunction<'static> {
        SetFunction::new(n, |s| s.count_ones() as f64)
    }

    #[test]
    fn modular_and_quadratic() {
        assert!(is_submodular(&card(4)).unwrap().holds);
        let sq = SetFunction::new(2, |s| (s.count_ones() as f64).powi(2));
        let c = is_submodular(&sq).unwrap();
        assert!(!c.holds);
        assert_eq!(c.witness.map(|w| (w.0, w.1)), Some((0b01, 0b10)));
        assert!(is_supermodular(&sq).unwrap().holds);
        let root = SetFunction::new(2, |s| libm::sqrt(s.count_ones() as f64));
        assert!(!is_supermodular(&root).unwrap().holds);
    }

    #[test]
    fn size_limit() {
        let big = SetFunction::new(13, |_| 0.0);
        assert_eq!(is_submodular(&big), Err(SetFunctionError::TooLarge { n: 13, limit: 12 }));
    }

    #[test]
    fn greedy_simple_functions() {
        let zero = SetFunction::new(3, |_| 0.0);
        assert_eq!(greedy_extreme_point(&zero, &[2, 0, 1]).unwrap(), vec![0.0; 3]);
        assert_eq!(greedy_extreme_point(&card(3), &[1, 2, 0]).unwrap(), vec![1.0; 3]);
        assert!(greedy_extreme_point(&card(3), &[1, 1, 0]).is_err());
    }

    #[test]
    fn memo_avoids_reevaluation() {
        let calls = RefCell::new(0);
        let f = SetFunction::new(3, |s| {
            *calls.borrow_mut() += 1;
            s as f64
        });
        f.table();
        f.table();
        assert_eq!(*calls.borrow(), 8);
    }

    #[test]
    fn scalar_f_value() {
        let inst = NetworkInstance::scalar(1.0, 1.0, 1.0, 2.0);
        let b = QuantizerB::half_inverse_noise(&inst).unwrap();
        let f = f_jd_sumfronthaul(&inst, &b, 1.2).unwrap();
        assert!((f.value(1) - 0.2).abs() < 1e-12);
        assert_eq!(f.value(0), 0.0);
        let f = f_jd_sumfronthaul(&inst, &b, 1e6).unwrap();
        assert!((f.value(1) - libm::log2(1.5)).abs() < 1e-12);
    }

    #[test]
    fn g_at_full_rate_vanishes_on_empty() {
        let inst = random_instance(2, 2, 3, 1, 1, 10.0);
        let b = QuantizerB::half_inverse_noise(&inst).unwrap();
        let rate = crate::gaussinfo::i_x_yhat_cond(&inst, &b, 0b11, 0b111).unwrap();
        let (g, gp) = g_fronthaul(&inst, &b, rate).unwrap();
        assert!(g.value(0).abs() < 1e-12);
        assert!(is_supermodular(&g).unwrap().holds);
        assert!(is_supermodular(&gp).unwrap().holds);
        let zero = QuantizerB::zero(&inst);
        let (g, _) = g_fronthaul(&inst, &zero, 0.0).unwrap();
        assert!(g.table().iter().all(|&v| v == 0.0));
    }
}
