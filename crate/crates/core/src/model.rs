//! Uplink network description, quantizer parameterization and random instances.
//!
//! Each base station ℓ observes `Y_ℓ = Σ_k H_{ℓ,k} X_k + Z_ℓ` with Gaussian
//! noise `Z_ℓ ~ CN(0, Σ_ℓ)` and independent Gaussian inputs `X_k ~ CN(0, K_k)`.
//! A quantizer with test channel `Ŷ_ℓ = Y_ℓ + q_ℓ`, `q_ℓ ~ CN(0, Q_ℓ)`, is
//! described by `B_ℓ = (Σ_ℓ + Q_ℓ)⁻¹`, which ranges over `0 ⪯ B_ℓ ⪯ Σ_ℓ⁻¹`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{self, CMat};

/// Relative asymmetry accepted (and symmetrized away) in Hermitian inputs.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Slack on the whitened eigenvalues when checking `0 ⪯ B ⪯ Σ⁻¹`.
pub const LOEWNER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("dimensions must be at least 1 (K={users}, L={bss}, M={tx}, N={rx})")]
    EmptyDimension { users: usize, bss: usize, tx: usize, rx: usize },
    #[error("{field}: expected {expected} entries, found {found}")]
    Count { field: &'static str, expected: usize, found: usize },
    #[error("{field}{index}: expected {expected_rows}x{expected_cols}, found {rows}x{cols}")]
    Shape {
        field: &'static str,
        index: String,
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("{field}{index}: not Hermitian (asymmetry {asymmetry:e})")]
    NotHermitian { field: &'static str, index: String, asymmetry: f64 },
    #[error("{field}{index}: non-finite entry")]
    NonFinite { field: &'static str, index: String },
    #[error("noise covariance Sigma[{bs}] is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NoiseNotPositiveDefinite { bs: usize, min_eigenvalue: f64 },
    #[error("quantization noise is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    QuantizationNoiseNotPsd { min_eigenvalue: f64 },
    #[error("matrix is numerically singular")]
    Singular,
    #[error("B[{bs}] outside [0, Sigma^-1]: whitened eigenvalues span [{min_eigenvalue}, {max_eigenvalue}]")]
    OutsideLoewnerInterval { bs: usize, min_eigenvalue: f64, max_eigenvalue: f64 },
}

fn idx1(i: usize) -> String {
    format!("[{i}]")
}

fn idx2(i: usize, j: usize) -> String {
    format!("[{i}][{j}]")
}

fn check_shape(field: &'static str, index: String, a: &CMat, rows: usize, cols: usize) -> Result<(), ModelError> {
    if a.nrows() != rows || a.ncols() != cols {
        return Err(ModelError::Shape {
            field,
            index,
            expected_rows: rows,
            expected_cols: cols,
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if !linalg::is_finite(a) {
        return Err(ModelError::NonFinite { field, index });
    }
    Ok(())
}

fn checked_hermitian(field: &'static str, index: String, a: &CMat) -> Result<CMat, ModelError> {
    let asym = linalg::asymmetry(a);
    if asym > HERMITIAN_TOL * linalg::max_abs(a).max(1.0) {
        return Err(ModelError::NotHermitian { field, index, asymmetry: asym });
    }
    Ok(linalg::hermitize(a))
}

/// The full channel: dimensions, matrices and fronthaul capacities.
///
/// Construction checks shapes and Hermitian symmetry only; the remaining
/// invariants are reported by [`NetworkInstance::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkInstance {
    users: usize,
    bss: usize,
    tx: usize,
    rx: usize,
    channel: Vec<CMat>,
    noise: Vec<CMat>,
    input: Vec<CMat>,
    power: Vec<f64>,
    fronthaul: Vec<f64>,
}

impl NetworkInstance {
    /// `channel` is indexed `[ℓ][k]`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        users: usize,
        bss: usize,
        tx: usize,
        rx: usize,
        channel: Vec<Vec<CMat>>,
        noise: Vec<CMat>,
        input: Vec<CMat>,
        power: Vec<f64>,
        fronthaul: Vec<f64>,
    ) -> Result<Self, ModelError> {
        if users == 0 || bss == 0 || tx == 0 || rx == 0 {
            return Err(ModelError::EmptyDimension { users, bss, tx, rx });
        }
        let count = |field, expected, found| {
            if expected == found {
                Ok(())
            } else {
                Err(ModelError::Count { field, expected, found })
            }
        };
        count("H", bss, channel.len())?;
        for (l, row) in channel.iter().enumerate() {
            if row.len() != users {
                return Err(ModelError::Shape {
                    field: "H",
                    index: idx1(l),
                    expected_rows: users,
                    expected_cols: 1,
                    rows: row.len(),
                    cols: 1,
                });
            }
            for (k, h) in row.iter().enumerate() {
                check_shape("H", idx2(l, k), h, rx, tx)?;
            }
        }
        count("Sigma", bss, noise.len())?;
        count("Kx", users, input.len())?;
        count("P", users, power.len())?;
        count("C", bss, fronthaul.len())?;
        let mut sym_noise = Vec::with_capacity(bss);
        for (l, s) in noise.iter().enumerate() {
            check_shape("Sigma", idx1(l), s, rx, rx)?;
            sym_noise.push(checked_hermitian("Sigma", idx1(l), s)?);
        }
        let mut sym_input = Vec::with_capacity(users);
        for (k, s) in input.iter().enumerate() {
            check_shape("Kx", idx1(k), s, tx, tx)?;
            sym_input.push(checked_hermitian("Kx", idx1(k), s)?);
        }
        for (k, p) in power.iter().enumerate() {
            if !p.is_finite() {
                return Err(ModelError::NonFinite { field: "P", index: idx1(k) });
            }
        }
        for (l, c) in fronthaul.iter().enumerate() {
            if c.is_nan() {
                return Err(ModelError::NonFinite { field: "C", index: idx1(l) });
            }
        }
        Ok(Self {
            users,
            bss,
            tx,
            rx,
            channel: channel.into_iter().flatten().collect(),
            noise: sym_noise,
            input: sym_input,
            power,
            fronthaul,
        })
    }

    /// Single user, single BS, unit channel, unit noise, unit power.
    pub fn scalar(h: f64, sigma: f64, power: f64, fronthaul: f64) -> Self {
        let s = |x: f64| linalg::from_real(1, 1, &[x]);
        Self::new(
            1,
            1,
            1,
            1,
            alloc::vec![alloc::vec![s(h)]],
            alloc::vec![s(sigma)],
            alloc::vec![s(power)],
            alloc::vec![power],
            alloc::vec![fronthaul],
        )
        .expect("scalar instance is well formed")
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn bss(&self) -> usize {
        self.bss
    }

    pub fn tx_antennas(&self) -> usize {
        self.tx
    }

    pub fn rx_antennas(&self) -> usize {
        self.rx
    }

    pub fn channel(&self, bs: usize, user: usize) -> &CMat {
        &self.channel[bs * self.users + user]
    }

    pub fn noise(&self, bs: usize) -> &CMat {
        &self.noise[bs]
    }

    pub fn input(&self, user: usize) -> &CMat {
        &self.input[user]
    }

    pub fn power(&self, user: usize) -> f64 {
        self.power[user]
    }

    pub fn fronthaul(&self, bs: usize) -> f64 {
        self.fronthaul[bs]
    }

    pub fn fronthauls(&self) -> &[f64] {
        &self.fronthaul
    }

    /// Same channel with different fronthaul capacities.
    pub fn with_fronthaul(&self, fronthaul: Vec<f64>) -> Self {
        assert_eq!(fronthaul.len(), self.bss);
        Self { fronthaul, ..self.clone() }
    }

    /// Same channel with every H scaled by `factor`.
    pub fn with_channel_scale(&self, factor: f64) -> Self {
        Self { channel: self.channel.iter().map(|h| h.scale(factor)).collect(), ..self.clone() }
    }

    /// Same channel with new input covariances (already Hermitian).
    pub fn with_inputs(&self, input: Vec<CMat>) -> Self {
        assert_eq!(input.len(), self.users);
        Self { input: input.iter().map(linalg::hermitize).collect(), ..self.clone() }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (l, s) in self.noise.iter().enumerate() {
            let min = linalg::min_eig(s);
            if !(min > 0.0) {
                violations.push(Violation::NoiseNotPositiveDefinite { bs: l, min_eigenvalue: min });
            }
        }
        for (k, kx) in self.input.iter().enumerate() {
            let min = linalg::min_eig(kx);
            if min < -HERMITIAN_TOL * linalg::max_abs(kx).max(1.0) {
                violations.push(Violation::InputNotPsd { user: k, min_eigenvalue: min });
            }
            let trace = linalg::trace_re(kx);
            if self.power[k] < 0.0 || trace > self.power[k] * (1.0 + 1e-12) + 1e-12 {
                violations.push(Violation::PowerExceeded { user: k, trace, budget: self.power[k] });
            }
        }
        for (l, &c) in self.fronthaul.iter().enumerate() {
            if !(c >= 0.0) {
                violations.push(Violation::NegativeFronthaul { bs: l, capacity: c });
            }
        }
        ValidationReport { violations }
    }
}

/// One violated instance invariant with its evidence.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoiseNotPositiveDefinite { bs: usize, min_eigenvalue: f64 },
    InputNotPsd { user: usize, min_eigenvalue: f64 },
    PowerExceeded { user: usize, trace: f64, budget: f64 },
    NegativeFronthaul { bs: usize, capacity: f64 },
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Violation::NoiseNotPositiveDefinite { bs, min_eigenvalue } => {
                write!(f, "Sigma[{bs}] not positive definite (min eigenvalue {min_eigenvalue:e})")
            }
            Violation::InputNotPsd { user, min_eigenvalue } => {
                write!(f, "Kx[{user}] not positive semidefinite (min eigenvalue {min_eigenvalue:e})")
            }
            Violation::PowerExceeded { user, trace, budget } => {
                write!(f, "power constraint: trace(Kx[{user}]) = {trace} exceeds P[{user}] = {budget}")
            }
            Violation::NegativeFronthaul { bs, capacity } => write!(f, "C[{bs}] = {capacity} is negative"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `B = (Σ + Q)⁻¹`.
pub fn b_from_q(q: &CMat, sigma: &CMat) -> Result<CMat, ModelError> {
    let min = linalg::min_eig(q);
    if min < -LOEWNER_TOL * linalg::max_abs(q).max(1.0) {
        return Err(ModelError::QuantizationNoiseNotPsd { min_eigenvalue: min });
    }
    let total = linalg::hermitize(&(sigma + q));
    let eig = linalg::eigenvalues(&total);
    let top = eig.last().copied().unwrap_or(0.0);
    if !(eig[0] > 1e-14 * top.max(f64::MIN_POSITIVE)) {
        return Err(ModelError::Singular);
    }
    linalg::pd_inverse(&total).ok_or(ModelError::Singular)
}

/// `Q = B⁻¹ − Σ`; fails when `B` is singular (infinite quantization noise).
pub fn q_from_b(b: &CMat, sigma: &CMat) -> Result<CMat, ModelError> {
    let eig = linalg::eigenvalues(b);
    let top = eig.last().copied().unwrap_or(0.0);
    if !(eig[0] > 1e-14 * top.max(f64::MIN_POSITIVE)) {
        return Err(ModelError::Singular);
    }
    let inv = linalg::pd_inverse(b).ok_or(ModelError::Singular)?;
    Ok(linalg::hermitize(&(inv - sigma)))
}

/// Per-BS quantizer matrices `B_ℓ` together with their whitened forms
/// `B̃_ℓ = Σ_ℓ^{1/2} B_ℓ Σ_ℓ^{1/2}`, whose eigenvalues lie in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerB {
    b: Vec<CMat>,
    whitened: Vec<CMat>,
}

impl QuantizerB {
    /// Checks shapes and the Loewner interval (within [`LOEWNER_TOL`]).
    pub fn new(instance: &NetworkInstance, b: Vec<CMat>) -> Result<Self, ModelError> {
        if b.len() != instance.bss() {
            return Err(ModelError::Count { field: "B", expected: instance.bss(), found: b.len() });
        }
        let n = instance.rx_antennas();
        let mut sym = Vec::with_capacity(b.len());
        let mut whitened = Vec::with_capacity(b.len());
        for (l, bl) in b.iter().enumerate() {
            check_shape("B", idx1(l), bl, n, n)?;
            let bl = checked_hermitian("B", idx1(l), bl)?;
            let root = sigma_sqrt(instance, l)?;
            let w = linalg::hermitize(&(&root * &bl * &root));
            let eig = linalg::eigenvalues(&w);
            let (lo, hi) = (eig[0], eig[eig.len() - 1]);
            if lo < -LOEWNER_TOL || hi > 1.0 + LOEWNER_TOL {
                return Err(ModelError::OutsideLoewnerInterval { bs: l, min_eigenvalue: lo, max_eigenvalue: hi });
            }
            sym.push(bl);
            whitened.push(w);
        }
        Ok(Self { b: sym, whitened })
    }

    /// Build from whitened matrices `B̃_ℓ` (eigenvalues in `[0, 1]`).
    pub fn from_whitened(instance: &NetworkInstance, whitened: Vec<CMat>) -> Result<Self, ModelError> {
        let mut b = Vec::with_capacity(whitened.len());
        for (l, w) in whitened.iter().enumerate() {
            let n = instance.rx_antennas();
            check_shape("B", idx1(l), w, n, n)?;
            let inv_root = sigma_inv_sqrt(instance, l)?;
            b.push(linalg::hermitize(&(&inv_root * w * &inv_root)));
        }
        Self::new(instance, b)
    }

    /// From quantization-noise covariances `Q_ℓ`.
    pub fn from_noise(instance: &NetworkInstance, q: &[CMat]) -> Result<Self, ModelError> {
        let b = q
            .iter()
            .enumerate()
            .map(|(l, ql)| b_from_q(ql, instance.noise(l)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(instance, b)
    }

    /// Every whitened matrix equal to `s·I`, i.e. `B_ℓ = s·Σ_ℓ⁻¹`.
    pub fn scaled_inverse_noise(instance: &NetworkInstance, s: f64) -> Result<Self, ModelError> {
        let n = instance.rx_antennas();
        Self::from_whitened(instance, (0..instance.bss()).map(|_| linalg::scaled_identity(n, s)).collect())
    }

    /// `B_ℓ = ½Σ_ℓ⁻¹`: quantization noise at the background noise level.
    pub fn half_inverse_noise(instance: &NetworkInstance) -> Result<Self, ModelError> {
        Self::scaled_inverse_noise(instance, 0.5)
    }

    pub fn zero(instance: &NetworkInstance) -> Self {
        let n = instance.rx_antennas();
        let z: Vec<CMat> = (0..instance.bss()).map(|_| linalg::zeros(n, n)).collect();
        Self { b: z.clone(), whitened: z }
    }

    /// Random interior point: whitened eigenvalues uniform in `[lo, hi]`,
    /// eigenvectors from a random Hermitian matrix.
    pub fn random(instance: &NetworkInstance, seed: u64, lo: f64, hi: f64) -> Result<Self, ModelError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = instance.rx_antennas();
        let mut whitened = Vec::with_capacity(instance.bss());
        for _ in 0..instance.bss() {
            let g = gaussian_matrix(&mut rng, n, n, 1.0);
            let (_, basis) = linalg::herm_eig(&(&g + g.adjoint()));
            let eig: Vec<f64> = (0..n).map(|_| lo + (hi - lo) * uniform(&mut rng)).collect();
            let mut d = linalg::zeros(n, n);
            for (i, &e) in eig.iter().enumerate() {
                d[(i, i)] = Complex64::new(e, 0.0);
            }
            whitened.push(linalg::hermitize(&(&basis * d * basis.adjoint())));
        }
        Self::from_whitened(instance, whitened)
    }

    /// Copy with `B_ℓ = 0` for every BS outside `active`.
    pub fn restricted(&self, active: crate::subset::Mask) -> Self {
        let mut out = self.clone();
        for l in 0..self.b.len() {
            if !crate::subset::contains(active, l) {
                let n = self.b[l].nrows();
                out.b[l] = linalg::zeros(n, n);
                out.whitened[l] = linalg::zeros(n, n);
            }
        }
        out
    }

    pub fn bss(&self) -> usize {
        self.b.len()
    }

    pub fn b(&self, bs: usize) -> &CMat {
        &self.b[bs]
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.b
    }

    pub fn whitened(&self, bs: usize) -> &CMat {
        &self.whitened[bs]
    }

    pub fn whitened_matrices(&self) -> &[CMat] {
        &self.whitened
    }
}

pub(crate) fn sigma_sqrt(instance: &NetworkInstance, bs: usize) -> Result<CMat, ModelError> {
    let s = instance.noise(bs);
    let min = linalg::min_eig(s);
    if !(min > 0.0) {
        return Err(ModelError::NoiseNotPositiveDefinite { bs, min_eigenvalue: min });
    }
    Ok(linalg::psd_sqrt(s))
}

pub(crate) fn sigma_inv_sqrt(instance: &NetworkInstance, bs: usize) -> Result<CMat, ModelError> {
    let s = instance.noise(bs);
    let min = linalg::min_eig(s);
    if !(min > 0.0) {
        return Err(ModelError::NoiseNotPositiveDefinite { bs, min_eigenvalue: min });
    }
    Ok(linalg::pd_inv_sqrt(s))
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Entries i.i.d. `CN(0, variance)`.
fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, variance: f64) -> CMat {
    let scale = libm::sqrt(variance / 2.0);
    let mut out = linalg::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            out[(r, c)] = Complex64::new(scale * re, scale * im);
        }
    }
    out
}

/// Random instance with unit noise, unit power budgets and white inputs
/// `K_k = (P_k/M)·I`.
///
/// Every link matrix `H_{ℓ,k}` has an i.i.d. circular Gaussian direction and is
/// rescaled so that the per-antenna receive SNR `tr(H K H†)/N` equals
/// `10^{snr_db/10}` exactly. Fronthaul capacities are drawn around the
/// single-link air-interface rate.
pub fn random_instance(seed: u64, users: usize, bss: usize, tx: usize, rx: usize, snr_db: f64) -> NetworkInstance {
    random_instance_with_fronthaul(seed, users, bss, tx, rx, snr_db, None)
}

/// As [`random_instance`], optionally with fixed capacities. The default draws
/// each `C_ℓ` uniformly from `[0.25, 1.75]·(N·log2(1+snr) + 1)`.
pub fn random_instance_with_fronthaul(
    seed: u64,
    users: usize,
    bss: usize,
    tx: usize,
    rx: usize,
    snr_db: f64,
    fronthaul: Option<Vec<f64>>,
) -> NetworkInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let snr = libm::pow(10.0, snr_db / 10.0);
    let power = 1.0;
    let target = snr * (rx * tx) as f64 / power;
    let mut channel = Vec::with_capacity(bss);
    for _ in 0..bss {
        let mut row = Vec::with_capacity(users);
        for _ in 0..users {
            let g = gaussian_matrix(&mut rng, rx, tx, 1.0);
            let norm2: f64 = g.iter().map(|z| z.norm_sqr()).sum();
            row.push(g.scale(libm::sqrt(target / norm2)));
        }
        channel.push(row);
    }
    let default_c = rx as f64 * libm::log2(1.0 + snr) + 1.0;
    let fronthaul = fronthaul.unwrap_or_else(|| {
        (0..bss).map(|_| default_c * (0.25 + 1.5 * uniform(&mut rng))).collect()
    });
    NetworkInstance::new(
        users,
        bss,
        tx,
        rx,
        channel,
        (0..bss).map(|_| linalg::identity(rx)).collect(),
        (0..users).map(|_| linalg::scaled_identity(tx, power / tx as f64)).collect(),
        alloc::vec![power; users],
        fronthaul,
    )
    .expect("generated instance is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_instance_validates() {
        assert!(NetworkInstance::scalar(1.0, 1.0, 1.0, 2.0).validate().passed());
    }

    #[test]
    fn zero_noise_fails_validation() {
        let inst = NetworkInstance::scalar(1.0, 0.0, 1.0, 2.0);
        let report = inst.validate();
        assert!(matches!(report.violations[..], [Violation::NoiseNotPositiveDefinite { bs: 0, .. }]));
    }

    #[test]
    fn power_violation_reported() {
        let s = |x: f64| linalg::from_real(1, 1, &[x]);
        let inst = NetworkInstance::new(
            1, 1, 1, 1,
            alloc::vec![alloc::vec![s(1.0)]],
            alloc::vec![s(1.0)],
            alloc::vec![s(2.0)],
            alloc::vec![1.0],
            alloc::vec![2.0],
        )
        .unwrap();
        let report = inst.validate();
        assert!(matches!(report.violations[..], [Violation::PowerExceeded { user: 0, .. }]));
    }

    #[test]
    fn shape_errors_carry_indices() {
        let s = |x: f64| linalg::from_real(1, 1, &[x]);
        let err = NetworkInstance::new(
            2, 1, 1, 1,
            alloc::vec![alloc::vec![s(1.0), linalg::zeros(2, 1)]],
            alloc::vec![s(1.0)],
            alloc::vec![s(1.0), s(1.0)],
            alloc::vec![1.0, 1.0],
            alloc::vec![1.0],
        )
        .unwrap_err();
        assert_eq!(alloc::format!("{err}"), "H[0][1]: expected 1x1, found 2x1");
    }

    #[test]
    fn b_from_q_examples() {
        let b = b_from_q(&linalg::identity(2), &linalg::identity(2)).unwrap();
        assert!(linalg::max_abs(&(b - linalg::scaled_identity(2, 0.5))) < 1e-15);
        let b = b_from_q(&linalg::zeros(2, 2), &linalg::identity(2)).unwrap();
        assert!(linalg::max_abs(&(b - linalg::identity(2))) < 1e-15);
        let b = b_from_q(&linalg::from_real(1, 1, &[3.0]), &linalg::from_real(1, 1, &[1.0])).unwrap();
        assert!((b[(0, 0)].re - 0.25).abs() < 1e-15);
        assert!(b_from_q(&linalg::from_real(1, 1, &[-1.0]), &linalg::from_real(1, 1, &[0.5])).is_err());
    }

    #[test]
    fn random_instance_snr_is_exact() {
        let inst = random_instance(1, 1, 1, 1, 1, 0.0);
        let h = inst.channel(0, 0)[(0, 0)];
        assert!((h.norm_sqr() * inst.input(0)[(0, 0)].re - 1.0).abs() < 1e-12);
        assert_eq!(inst, random_instance(1, 1, 1, 1, 1, 0.0));
        assert!(random_instance(2, 2, 2, 1, 2, 10.0).validate().passed());
    }

    #[test]
    fn loewner_interval_is_enforced() {
        let inst = NetworkInstance::scalar(1.0, 2.0, 1.0, 1.0);
        assert!(QuantizerB::new(&inst, alloc::vec![linalg::from_real(1, 1, &[0.5])]).is_ok());
        assert!(QuantizerB::new(&inst, alloc::vec![linalg::from_real(1, 1, &[0.6])]).is_err());
        assert!(QuantizerB::new(&inst, alloc::vec![linalg::from_real(1, 1, &[-0.1])]).is_err());
    }

    #[test]
    fn random_quantizer_is_interior() {
        let inst = random_instance(5, 2, 2, 2, 2, 10.0);
        let q = QuantizerB::random(&inst, 9, 0.1, 0.9).unwrap();
        for l in 0..2 {
            let eig = linalg::eigenvalues(q.whitened(l));
            assert!(eig[0] >= 0.1 - 1e-12 && eig[1] <= 0.9 + 1e-12);
        }
    }
}
