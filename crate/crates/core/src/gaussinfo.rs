//! Gaussian mutual-information quantities of the compress-and-forward uplink.
//!
//! Two independent evaluation paths exist on purpose:
//!
//! * a generic one, [`JointCovariance`] + [`cond_mutual_info`], which builds the
//!   joint law of inputs, received signals and quantized signals and conditions
//!   by Schur complements;
//! * closed forms in whitened coordinates ([`i_y_yhat_given_x`],
//!   [`i_x_yhat_cond`], [`sd_fronthaul_usage`]) written as
//!   `log2 det(I + G† B̃ G)` with `G = Σ^{-1/2} H K^{1/2}`, so singular input
//!   covariances never need inverting.
//!
//! Infinite information (a quantizer with `B_ℓ = Σ_ℓ⁻¹`, i.e. no quantization
//! noise) is returned as `f64::INFINITY`.

use alloc::vec::Vec;
use core::ops::Range;

use crate::linalg::{self, CMat};
use crate::model::{self, ModelError, NetworkInstance, QuantizerB};
use crate::subset::{self, Mask};

/// Whitened eigenvalues at or above `1 - SATURATION` count as noiseless quantization.
pub const SATURATION: f64 = 1e-12;
/// Directions with conditional variance below this fraction of the block scale
/// are treated as deterministic.
const SUPPORT_REL: f64 = 1e-11;
/// Conditional variance below this fraction signals infinite information.
const INFINITE_REL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InfoError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("quantizer has {found} matrices for {expected} base stations")]
    QuantizerMismatch { expected: usize, found: usize },
    #[error("the user subset must be nonempty")]
    EmptyUsers,
    #[error("the base-station subset must be nonempty")]
    EmptyBaseStations,
    #[error("variable {0:?} appears in more than one argument")]
    Overlap(Var),
    #[error("variable {0:?} is not part of this covariance")]
    UnknownVariable(Var),
}

/// A logical block of the joint Gaussian vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// Input `X_k`.
    User(usize),
    /// Received signal `Y_ℓ`.
    Received(usize),
    /// Quantized signal `Ŷ_ℓ`.
    Quantized(usize),
}

/// How `Ŷ_ℓ` is represented: `Ŷ_ℓ = W_ℓ Y_ℓ + q_ℓ`, `q_ℓ ~ CN(0, noise)`.
///
/// For invertible `B_ℓ` this is the literal test channel (`W = I`,
/// `noise = B⁻¹ − Σ`). For singular `B_ℓ` the quantization noise is infinite on
/// the null space, and only the informative coordinates are kept:
/// `W = D^{1/2} U† Σ^{-1/2}` with `B̃ = U D U†`, noise `I − D`.
#[derive(Debug, Clone)]
struct TestChannel {
    w: CMat,
    noise: CMat,
}

fn test_channel(instance: &NetworkInstance, b: &QuantizerB, bs: usize) -> Result<TestChannel, InfoError> {
    let n = instance.rx_antennas();
    let (values, vectors) = linalg::herm_eig(b.whitened(bs));
    let root = model::sigma_sqrt(instance, bs)?;
    if values[0] > SATURATION {
        // Q = Σ^{1/2} (B̃⁻¹ − I) Σ^{1/2}, clipped at zero for saturated directions.
        let inner = linalg::herm_map(b.whitened(bs), |x| (1.0 / x - 1.0).max(0.0));
        return Ok(TestChannel { w: linalg::identity(n), noise: linalg::hermitize(&(&root * inner * &root)) });
    }
    let inv_root = model::sigma_inv_sqrt(instance, bs)?;
    let kept: Vec<usize> = (0..n).filter(|&i| values[i] > SATURATION).collect();
    let r = kept.len();
    let mut w = linalg::zeros(r, n);
    let mut noise = linalg::zeros(r, r);
    for (row, &i) in kept.iter().enumerate() {
        let d = values[i].min(1.0);
        let u = vectors.column(i).adjoint() * &inv_root;
        for c in 0..n {
            w[(row, c)] = u[(0, c)] * libm::sqrt(d);
        }
        noise[(row, row)] = linalg::ONE * (1.0 - d);
    }
    Ok(TestChannel { w, noise })
}

/// Covariance of the stacked Gaussian vector with a block map.
#[derive(Debug, Clone)]
pub struct JointCovariance {
    cov: CMat,
    /// `cov = factor · factorᴴ`; conditioning works on rows of the factor so
    /// the condition number is not squared.
    factor: CMat,
    blocks: Vec<(Var, Range<usize>)>,
}

impl JointCovariance {
    pub fn matrix(&self) -> &CMat {
        &self.cov
    }

    pub fn dim(&self) -> usize {
        self.cov.nrows()
    }

    pub fn block(&self, var: Var) -> Option<Range<usize>> {
        self.blocks.iter().find(|(v, _)| *v == var).map(|(_, r)| r.clone())
    }

    pub fn variables(&self) -> impl Iterator<Item = Var> + '_ {
        self.blocks.iter().map(|(v, _)| *v)
    }

    fn indices(&self, vars: &[Var]) -> Result<Vec<usize>, InfoError> {
        let mut out = Vec::new();
        for &v in vars {
            out.extend(self.block(v).ok_or(InfoError::UnknownVariable(v))?);
        }
        Ok(out)
    }
}

fn check_quantizer(instance: &NetworkInstance, b: &QuantizerB) -> Result<(), InfoError> {
    if b.bss() != instance.bss() {
        return Err(InfoError::QuantizerMismatch { expected: instance.bss(), found: b.bss() });
    }
    Ok(())
}

fn build(instance: &NetworkInstance, b: &QuantizerB, with_received: bool) -> Result<JointCovariance, InfoError> {
    check_quantizer(instance, b)?;
    let (k_users, l_bss, m, n) = (instance.users(), instance.bss(), instance.tx_antennas(), instance.rx_antennas());
    let channels = (0..l_bss).map(|l| test_channel(instance, b, l)).collect::<Result<Vec<_>, _>>()?;

    // Every variable is a linear map of the independent sources (X_1..X_K, Z_1..Z_L, q_1..q_L).
    let q_dims: Vec<usize> = channels.iter().map(|t| t.noise.nrows()).collect();
    let x_off = |k: usize| k * m;
    let z_off = |l: usize| k_users * m + l * n;
    let q_base = k_users * m + l_bss * n;
    let q_off = |l: usize| q_base + q_dims[..l].iter().sum::<usize>();
    let src_dim = q_base + q_dims.iter().sum::<usize>();

    let mut src_sqrt = linalg::zeros(src_dim, src_dim);
    for k in 0..k_users {
        linalg::put_block(&mut src_sqrt, x_off(k), x_off(k), &linalg::psd_sqrt(instance.input(k)));
    }
    for l in 0..l_bss {
        linalg::put_block(&mut src_sqrt, z_off(l), z_off(l), &linalg::psd_sqrt(instance.noise(l)));
        linalg::put_block(&mut src_sqrt, q_off(l), q_off(l), &linalg::psd_sqrt(&channels[l].noise));
    }

    let received_map = |l: usize| {
        let mut a = linalg::zeros(n, src_dim);
        for k in 0..k_users {
            linalg::put_block(&mut a, 0, x_off(k), instance.channel(l, k));
        }
        linalg::put_block(&mut a, 0, z_off(l), &linalg::identity(n));
        a
    };

    let mut maps: Vec<(Var, CMat)> = Vec::new();
    for k in 0..k_users {
        let mut a = linalg::zeros(m, src_dim);
        linalg::put_block(&mut a, 0, x_off(k), &linalg::identity(m));
        maps.push((Var::User(k), a));
    }
    if with_received {
        for l in 0..l_bss {
            maps.push((Var::Received(l), received_map(l)));
        }
    }
    for l in 0..l_bss {
        let mut a = &channels[l].w * received_map(l);
        linalg::put_block(&mut a, 0, q_off(l), &linalg::identity(q_dims[l]));
        maps.push((Var::Quantized(l), a));
    }

    let mut stacked_rows = 0;
    let mut blocks = Vec::with_capacity(maps.len());
    for (v, a) in &maps {
        blocks.push((*v, stacked_rows..stacked_rows + a.nrows()));
        stacked_rows += a.nrows();
    }
    let mut stacked = linalg::zeros(stacked_rows, src_dim);
    for ((_, a), (_, r)) in maps.iter().zip(&blocks) {
        linalg::put_block(&mut stacked, r.start, 0, a);
    }
    let factor = stacked * src_sqrt;
    let cov = linalg::hermitize(&(&factor * factor.adjoint()));
    Ok(JointCovariance { cov, factor, blocks })
}

/// Joint covariance of `(X_1..X_K, Ŷ_1..Ŷ_L)`.
///
/// A base station whose `B_ℓ` is singular is represented by its informative
/// coordinates only (fewer than `N` rows, none when `B_ℓ = 0`).
pub fn joint_covariance(instance: &NetworkInstance, b: &QuantizerB) -> Result<JointCovariance, InfoError> {
    build(instance, b, false)
}

/// Joint covariance of `(X_1..X_K, Y_1..Y_L, Ŷ_1..Ŷ_L)`.
pub fn extended_covariance(instance: &NetworkInstance, b: &QuantizerB) -> Result<JointCovariance, InfoError> {
    build(instance, b, true)
}

/// Result of [`cond_mutual_info_detailed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondInfo {
    pub bits: f64,
    /// Some directions of `A` were deterministic given `C` and were dropped
    /// before taking determinants.
    pub reduced: bool,
}

fn conditional(factor: &CMat, a: &[usize], c: &[usize]) -> CMat {
    let cols: Vec<usize> = (0..factor.ncols()).collect();
    let fa = linalg::select(factor, a, &cols);
    if c.is_empty() {
        return linalg::hermitize(&(&fa * fa.adjoint()));
    }
    let basis = linalg::row_space(&linalg::select(factor, c, &cols), 1e-10);
    let residual = &fa - (&fa * &basis) * basis.adjoint();
    linalg::hermitize(&(&residual * residual.adjoint()))
}

/// `I(A; B | C)` in bits.
pub fn cond_mutual_info(jc: &JointCovariance, a: &[Var], b: &[Var], c: &[Var]) -> Result<f64, InfoError> {
    cond_mutual_info_detailed(jc, a, b, c).map(|r| r.bits)
}

/// `I(A; B | C) = log2 det cov(A|C) − log2 det cov(A|B,C)`.
///
/// Conditioning uses pseudo-inverses, so degenerate conditioning variables are
/// fine. Directions of `A` that are deterministic given `C` carry no
/// information and are projected out. A direction that becomes deterministic
/// only once `B` is known yields `+∞`.
pub fn cond_mutual_info_detailed(jc: &JointCovariance, a: &[Var], b: &[Var], c: &[Var]) -> Result<CondInfo, InfoError> {
    for (i, v) in a.iter().chain(b).chain(c).enumerate() {
        if a.iter().chain(b).chain(c).skip(i + 1).any(|w| w == v) {
            return Err(InfoError::Overlap(*v));
        }
    }
    let ia = jc.indices(a)?;
    let ib = jc.indices(b)?;
    let ic = jc.indices(c)?;
    let zero = CondInfo { bits: 0.0, reduced: false };
    if ia.is_empty() || ib.is_empty() {
        return Ok(zero);
    }
    let scale = linalg::max_eig(&linalg::select(&jc.cov, &ia, &ia));
    if !(scale > 0.0) {
        return Ok(zero);
    }
    let given_c = conditional(&jc.factor, &ia, &ic);
    let mut ibc = ib.clone();
    ibc.extend_from_slice(&ic);
    let given_bc = conditional(&jc.factor, &ia, &ibc);

    let (values, vectors) = linalg::herm_eig(&given_c);
    let keep: Vec<usize> = (0..values.len()).filter(|&i| values[i] > SUPPORT_REL * scale).collect();
    if keep.is_empty() {
        return Ok(zero);
    }
    let reduced = keep.len() < values.len();
    let (before, after) = if reduced {
        let p = linalg::select(&vectors, &(0..values.len()).collect::<Vec<_>>(), &keep);
        let before: f64 = keep.iter().map(|&i| libm::log2(values[i])).sum();
        (before, linalg::hermitize(&(p.adjoint() * given_bc * &p)))
    } else {
        let before = linalg::logdet2(&given_c).unwrap_or_else(|| values.iter().map(|&v| libm::log2(v)).sum());
        (before, given_bc)
    };
    let top = keep.iter().map(|&i| values[i]).fold(0.0, f64::max);
    let after_min = linalg::min_eig(&after);
    if after_min <= INFINITE_REL * top {
        return Ok(CondInfo { bits: f64::INFINITY, reduced });
    }
    let after_logdet = linalg::logdet2(&after).expect("positive definite after support check");
    Ok(CondInfo { bits: before - after_logdet, reduced })
}

/// Channel factors `G_{ℓ,k} = Σ_ℓ^{-1/2} H_{ℓ,k} K_k^{1/2}` for repeated closed-form evaluation.
#[derive(Debug, Clone)]
pub struct WhitenedChannel {
    users: usize,
    bss: usize,
    tx: usize,
    rx: usize,
    g: Vec<CMat>,
}

impl WhitenedChannel {
    pub fn new(instance: &NetworkInstance) -> Result<Self, InfoError> {
        let (k_users, l_bss) = (instance.users(), instance.bss());
        let roots: Vec<CMat> = (0..k_users).map(|k| linalg::psd_sqrt(instance.input(k))).collect();
        let mut g = Vec::with_capacity(k_users * l_bss);
        for l in 0..l_bss {
            let inv_root = model::sigma_inv_sqrt(instance, l)?;
            for k in 0..k_users {
                g.push(&inv_root * instance.channel(l, k) * &roots[k]);
            }
        }
        Ok(Self {
            users: k_users,
            bss: l_bss,
            tx: instance.tx_antennas(),
            rx: instance.rx_antennas(),
            g,
        })
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn bss(&self) -> usize {
        self.bss
    }

    pub fn rx_antennas(&self) -> usize {
        self.rx
    }

    /// `[G_{ℓ,k}]_{k∈T}`, size `N × |T|M`.
    pub fn stacked(&self, bs: usize, users: Mask) -> CMat {
        let cols: Vec<usize> = subset::members(users).collect();
        let mut out = linalg::zeros(self.rx, cols.len() * self.tx);
        for (j, &k) in cols.iter().enumerate() {
            linalg::put_block(&mut out, 0, j * self.tx, &self.g[bs * self.users + k]);
        }
        out
    }

    /// `log2 det(I + Σ_{ℓ∈Sc} G_{ℓ,T}† B̃_ℓ G_{ℓ,T})` for whitened quantizers `bt`.
    pub fn info(&self, bt: &[CMat], users: Mask, observed: Mask) -> f64 {
        self.info_matrix(bt, users, observed).map_or(0.0, |a| linalg::logdet2_i_plus(&a))
    }

    /// `Σ_{ℓ∈Sc} G_{ℓ,T}† B̃_ℓ G_{ℓ,T}`, `None` when `T` or `Sc` is empty.
    pub fn info_matrix(&self, bt: &[CMat], users: Mask, observed: Mask) -> Option<CMat> {
        if users == 0 || observed == 0 {
            return None;
        }
        let dim = subset::size(users) * self.tx;
        let mut acc = linalg::zeros(dim, dim);
        for l in subset::members(observed) {
            let g = self.stacked(l, users);
            acc += g.adjoint() * &bt[l] * g;
        }
        Some(linalg::hermitize(&acc))
    }
}

/// `−log2 det(I − B̃)`, `+∞` when `B̃` has an eigenvalue at 1.
pub fn penalty_whitened(bt: &CMat) -> f64 {
    let mut acc = 0.0;
    for v in linalg::eigenvalues(bt) {
        if v >= 1.0 - SATURATION {
            return f64::INFINITY;
        }
        acc -= libm::log2(1.0 - v.max(0.0));
    }
    acc
}

/// `I(Y_ℓ; Ŷ_ℓ | X_K) = log2 det Σ_ℓ⁻¹ − log2 det(Σ_ℓ⁻¹ − B_ℓ)`.
pub fn i_y_yhat_given_x(instance: &NetworkInstance, b: &QuantizerB, bs: usize) -> Result<f64, InfoError> {
    check_quantizer(instance, b)?;
    Ok(penalty_whitened(b.whitened(bs)))
}

/// `I(X_T; Ŷ_{Sc} | X_{T^c})`, as `log2 det(I + K_T^{1/2} (Σ_{ℓ∈Sc} H†_{ℓ,T} B_ℓ H_{ℓ,T}) K_T^{1/2})`.
pub fn i_x_yhat_cond(instance: &NetworkInstance, b: &QuantizerB, users: Mask, observed: Mask) -> Result<f64, InfoError> {
    check_quantizer(instance, b)?;
    if users == 0 {
        return Err(InfoError::EmptyUsers);
    }
    let wc = WhitenedChannel::new(instance)?;
    Ok(wc.info(b.whitened_matrices(), users, observed))
}

/// `I(Y_S; Ŷ_S | Ŷ_{S^c})` in closed form:
/// `I(X_K;Ŷ_L) − I(X_K;Ŷ_{S^c}) + Σ_{ℓ∈S} I(Y_ℓ;Ŷ_ℓ|X_K)`.
pub fn sd_fronthaul_usage(instance: &NetworkInstance, b: &QuantizerB, bss: Mask) -> Result<f64, InfoError> {
    check_quantizer(instance, b)?;
    if bss == 0 {
        return Err(InfoError::EmptyBaseStations);
    }
    let wc = WhitenedChannel::new(instance)?;
    Ok(sd_usage_with(&wc, b.whitened_matrices(), bss))
}

pub(crate) fn sd_usage_with(wc: &WhitenedChannel, bt: &[CMat], bss: Mask) -> f64 {
    let all_users = subset::full(wc.users());
    let all_bss = subset::full(wc.bss());
    let penalty: f64 = subset::members(bss).map(|l| penalty_whitened(&bt[l])).sum();
    if penalty.is_infinite() {
        return f64::INFINITY;
    }
    let rest = subset::complement(bss, wc.bss());
    wc.info(bt, all_users, all_bss) - wc.info(bt, all_users, rest) + penalty
}

pub fn users_vars(users: Mask) -> Vec<Var> {
    subset::members(users).map(Var::User).collect()
}

pub fn quantized_vars(bss: Mask) -> Vec<Var> {
    subset::members(bss).map(Var::Quantized).collect()
}

pub fn received_vars(bss: Mask) -> Vec<Var> {
    subset::members(bss).map(Var::Received).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::random_instance;

    fn scalar_half() -> (NetworkInstance, QuantizerB) {
        let inst = NetworkInstance::scalar(1.0, 1.0, 1.0, 2.0);
        let b = QuantizerB::half_inverse_noise(&inst).unwrap();
        (inst, b)
    }

    #[test]
    fn scalar_joint_covariance() {
        let (inst, b) = scalar_half();
        let jc = joint_covariance(&inst, &b).unwrap();
        let expect = linalg::from_real(2, 2, &[1.0, 1.0, 1.0, 3.0]);
        assert!(linalg::max_abs(&(jc.matrix() - expect)) < 1e-12);
    }

    #[test]
    fn scalar_information_values() {
        let (inst, b) = scalar_half();
        let jc = joint_covariance(&inst, &b).unwrap();
        let i = cond_mutual_info(&jc, &[Var::User(0)], &[Var::Quantized(0)], &[]).unwrap();
        assert!((i - libm::log2(1.5)).abs() < 1e-12);
        assert!((i_y_yhat_given_x(&inst, &b, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!((i_x_yhat_cond(&inst, &b, 1, 1).unwrap() - libm::log2(1.5)).abs() < 1e-12);
        assert_eq!(i_x_yhat_cond(&inst, &b, 1, 0).unwrap(), 0.0);
        assert!((sd_fronthaul_usage(&inst, &b, 1).unwrap() - libm::log2(3.0)).abs() < 1e-12);
    }

    #[test]
    fn two_antenna_penalty() {
        let s = |x: f64| linalg::scaled_identity(2, x);
        let inst = NetworkInstance::new(
            1, 1, 2, 2,
            alloc::vec![alloc::vec![s(1.0)]],
            alloc::vec![s(1.0)],
            alloc::vec![s(0.5)],
            alloc::vec![1.0],
            alloc::vec![4.0],
        )
        .unwrap();
        let b = QuantizerB::from_noise(&inst, &[s(1.0)]).unwrap();
        assert!((i_y_yhat_given_x(&inst, &b, 0).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn saturated_quantizer_is_infinite() {
        let inst = NetworkInstance::scalar(1.0, 1.0, 1.0, 2.0);
        let b = QuantizerB::scaled_inverse_noise(&inst, 1.0).unwrap();
        assert_eq!(i_y_yhat_given_x(&inst, &b, 0).unwrap(), f64::INFINITY);
        let jc = extended_covariance(&inst, &b).unwrap();
        let i = cond_mutual_info(&jc, &[Var::Received(0)], &[Var::Quantized(0)], &[Var::User(0)]).unwrap();
        assert_eq!(i, f64::INFINITY);
        // Information about X stays finite: log2(1 + P/Σ).
        assert!((i_x_yhat_cond(&inst, &b, 1, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_quantizer_carries_nothing() {
        let inst = random_instance(3, 2, 2, 2, 2, 10.0);
        let b = QuantizerB::zero(&inst);
        let jc = joint_covariance(&inst, &b).unwrap();
        assert_eq!(jc.dim(), 4);
        assert_eq!(i_y_yhat_given_x(&inst, &b, 1).unwrap(), 0.0);
        assert_eq!(sd_fronthaul_usage(&inst, &b, 0b11).unwrap(), 0.0);
        let i = cond_mutual_info(&jc, &users_vars(0b11), &quantized_vars(0b11), &[]).unwrap();
        assert_eq!(i, 0.0);
    }

    #[test]
    fn no_signal_gives_block_diagonal() {
        let inst = random_instance(4, 2, 2, 1, 1, 0.0);
        let inst = inst.with_inputs(alloc::vec![linalg::zeros(1, 1), linalg::zeros(1, 1)]);
        let b = QuantizerB::half_inverse_noise(&inst).unwrap();
        let jc = joint_covariance(&inst, &b).unwrap();
        let expect = linalg::from_real(4, 4, &[
            0.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 0.0,
            0.0, 0.0, 2.0, 0.0,
            0.0, 0.0, 0.0, 2.0,
        ]);
        assert!(linalg::max_abs(&(jc.matrix() - expect)) < 1e-12);
    }

    #[test]
    fn partial_rank_quantizer_matches_closed_form() {
        let inst = random_instance(8, 2, 2, 2, 2, 10.0);
        let mut w: Vec<CMat> = (0..2).map(|_| linalg::zeros(2, 2)).collect();
        w[0][(0, 0)] = linalg::ONE * 0.6;
        w[1] = linalg::scaled_identity(2, 0.3);
        let b = QuantizerB::from_whitened(&inst, w).unwrap();
        let jc = joint_covariance(&inst, &b).unwrap();
        assert_eq!(jc.dim(), 2 * 2 + 1 + 2);
        for t in 1..4u32 {
            for sc in 0..4u32 {
                let rest = subset::complement(t, 2);
                let schur = cond_mutual_info(&jc, &users_vars(t), &quantized_vars(sc), &users_vars(rest)).unwrap();
                let closed = i_x_yhat_cond(&inst, &b, t, sc).unwrap();
                assert!((schur - closed).abs() < 1e-10, "T={t} Sc={sc}: {schur} vs {closed}");
            }
        }
    }

    #[test]
    fn rejects_overlapping_sets() {
        let (inst, b) = scalar_half();
        let jc = joint_covariance(&inst, &b).unwrap();
        assert!(cond_mutual_info(&jc, &[Var::User(0)], &[Var::User(0)], &[]).is_err());
        assert!(cond_mutual_info(&jc, &[Var::Received(0)], &[Var::User(0)], &[]).is_err());
    }
}
