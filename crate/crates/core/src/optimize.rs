//! Quantizer optimization over the whitened Loewner box `0 ⪯ B̃_ℓ ⪯ I`.
//!
//! Every program here maximizes a linear objective in rates (and, for the
//! rate-fronthaul tradeoff, fronthaul capacities) subject to constraints of the
//! form `linear(y) ≤ Σ_{ℓ∈S}[C_ℓ − pen_ℓ(B̃)] + I(X_T; Ŷ_U)`, where `pen_ℓ` is
//! convex and the information term concave in `B̃`. The default solver is a
//! log-barrier interior-point method with analytic log-det derivatives; a
//! projected supergradient method on the concave value function is kept as an
//! alternate, and [`grid_oracle`] is a brute-force check for small problems.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::gaussinfo::{self, WhitenedChannel};
use crate::linalg::{self, CMat};
use crate::model::{ModelError, NetworkInstance, QuantizerB};
use crate::regions::{self, Caps, RegionError};
use crate::subset::{self, Mask};

const LN2: f64 = core::f64::consts::LN_2;

/// Eigenvalue margin used by [`project_loewner`] and the grid oracle.
pub const PROJECTION_EPS: f64 = 1e-9;
/// Upper limit on scalar degrees of freedom for [`grid_oracle`].
pub const ORACLE_MAX_DOF: usize = 3;
pub const ORACLE_MAX_RESOLUTION: usize = 400;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OptimizeError {
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid oracle supports at most {cap} scalar degrees of freedom, problem has {dof}")]
    TooManyDegreesOfFreedom { dof: usize, cap: usize },
    #[error("grid resolution must be between 1 and {cap}, got {found}")]
    Resolution { found: usize, cap: usize },
    #[error("the supergradient method does not handle fronthaul variables")]
    Unsupported,
    #[error("no strictly feasible starting point")]
    NoInteriorPoint,
}

impl From<gaussinfo::InfoError> for OptimizeError {
    fn from(e: gaussinfo::InfoError) -> Self {
        OptimizeError::Region(e.into())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// `max Σ μ_k R_k` over the JD region.
    JdWeighted { weights: Vec<f64> },
    /// `max R` under successive decoding with individual fronthaul capacities.
    SdSum,
    /// `max R` under successive decoding with a sum fronthaul budget.
    SdSumFronthaul { csum: f64 },
    /// `max Σ μ_k R_k − γ Σ ν_ℓ C_ℓ` with `C_ℓ` free subject to `Σ ν_ℓ C_ℓ ≤ Csum`.
    Tradeoff { weights: Vec<f64>, prices: Vec<f64>, gamma: f64, csum: f64 },
}

impl Objective {
    pub fn label(&self) -> &'static str {
        match self {
            Objective::JdWeighted { .. } => "jd-weighted",
            Objective::SdSum => "sd-sum",
            Objective::SdSumFronthaul { .. } => "sd-sum-sumfronthaul",
            Objective::Tradeoff { .. } => "rate-fronthaul-tradeoff",
        }
    }

    fn validate(&self, instance: &NetworkInstance) -> Result<(), OptimizeError> {
        let bad = |s: &str| Err(OptimizeError::InvalidParameter(s.into()));
        let weights_ok = |w: &[f64]| w.len() == instance.users() && w.iter().all(|x| x.is_finite() && *x >= 0.0);
        match self {
            Objective::JdWeighted { weights } if !weights_ok(weights) => bad("weights must be one finite nonnegative value per user"),
            Objective::SdSumFronthaul { csum } if !(csum.is_finite() && *csum >= 0.0) => bad("sum fronthaul must be finite and nonnegative"),
            Objective::Tradeoff { weights, prices, gamma, csum } => {
                if !weights_ok(weights) {
                    bad("weights must be one finite nonnegative value per user")
                } else if prices.len() != instance.bss() || prices.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
                    bad("fronthaul prices must be one finite positive value per base station")
                } else if !(gamma.is_finite() && *gamma >= 0.0) {
                    bad("gamma must be finite and nonnegative")
                } else if !(csum.is_finite() && *csum >= 0.0) {
                    bad("sum fronthaul must be finite and nonnegative")
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Barrier,
    Supergradient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub method: Method,
    /// Newton steps (barrier) or ascent steps (supergradient).
    pub max_iters: usize,
    /// Target duality-gap bound for the barrier method, relative change for
    /// the supergradient method.
    pub tolerance: f64,
    pub trace: bool,
    /// Known optimal value; switches the supergradient method to Polyak steps.
    pub polyak_target: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { method: Method::Barrier, max_iters: 20_000, tolerance: 1e-10, trace: false, polyak_target: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub value: f64,
    pub step: f64,
    /// Smallest constraint slack at the iterate.
    pub min_slack: f64,
}

/// Slack of one `(T, S)` constraint at the solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slack {
    pub users: Mask,
    pub bss: Mask,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub objective: Objective,
    pub b_star: QuantizerB,
    /// Objective re-evaluated through the region module at `b_star`.
    pub value: f64,
    /// Objective of the solver's own iterate.
    pub solver_value: f64,
    pub rates: Vec<f64>,
    /// Fronthaul capacities, for the tradeoff objective only.
    pub fronthaul: Option<Vec<f64>>,
    pub slacks: Vec<Slack>,
    pub iterations: usize,
    pub converged: bool,
    /// Upper bound on `optimum − solver_value` (barrier method only).
    pub gap_estimate: Option<f64>,
    pub method: Method,
    pub trace: Vec<TraceRow>,
}

pub fn maximize_weighted_sum_jd(instance: &NetworkInstance, weights: &[f64]) -> Result<SolveResult, OptimizeError> {
    solve(instance, &Objective::JdWeighted { weights: weights.to_vec() }, &SolverOptions::default())
}

pub fn maximize_sum_sd_individual(instance: &NetworkInstance) -> Result<SolveResult, OptimizeError> {
    solve(instance, &Objective::SdSum, &SolverOptions::default())
}

pub fn maximize_sum_sd_sumfronthaul(instance: &NetworkInstance, csum: f64) -> Result<SolveResult, OptimizeError> {
    solve(instance, &Objective::SdSumFronthaul { csum }, &SolverOptions::default())
}

pub fn weighted_rate_fronthaul_tradeoff(
    instance: &NetworkInstance,
    weights: &[f64],
    prices: &[f64],
    gamma: f64,
    csum: f64,
) -> Result<SolveResult, OptimizeError> {
    let objective = Objective::Tradeoff { weights: weights.to_vec(), prices: prices.to_vec(), gamma, csum };
    solve(instance, &objective, &SolverOptions::default())
}

pub fn solve(instance: &NetworkInstance, objective: &Objective, options: &SolverOptions) -> Result<SolveResult, OptimizeError> {
    Caps::default().check(instance)?;
    objective.validate(instance)?;
    if !(options.tolerance > 0.0) {
        return Err(OptimizeError::InvalidParameter("tolerance must be positive".into()));
    }
    let wc = WhitenedChannel::new(instance)?;
    match options.method {
        Method::Barrier => barrier(instance, &wc, objective, options),
        Method::Supergradient => supergradient(instance, &wc, objective, options),
    }
}

// ---------------------------------------------------------------------------
// Evaluation through the region module

struct Evaluation {
    value: f64,
    rates: Vec<f64>,
    slacks: Vec<Slack>,
}

/// Exact objective at fixed `b` (and fixed fronthaul for the tradeoff).
/// `−∞` when some constraint cannot be met with nonnegative rates.
fn evaluate(instance: &NetworkInstance, objective: &Objective, b: &QuantizerB, fronthaul: Option<&[f64]>) -> Result<Evaluation, OptimizeError> {
    let k_users = instance.users();
    let infeasible = || Evaluation { value: f64::NEG_INFINITY, rates: vec![0.0; k_users], slacks: Vec::new() };
    match objective {
        Objective::JdWeighted { weights } => jd_weighted_eval(instance, b, weights),
        Objective::Tradeoff { weights, prices, gamma, csum } => {
            let c = fronthaul.ok_or_else(|| OptimizeError::InvalidParameter("tradeoff evaluation needs fronthaul values".into()))?;
            let spent: f64 = c.iter().zip(prices).map(|(c, p)| c * p).sum();
            if c.iter().any(|&x| x < 0.0) || spent > csum + 1e-12 {
                return Ok(infeasible());
            }
            let mut e = jd_weighted_eval(&instance.with_fronthaul(c.to_vec()), b, weights)?;
            e.value -= gamma * spent;
            Ok(e)
        }
        Objective::SdSum => {
            let all = subset::full(k_users);
            let wc = WhitenedChannel::new(instance)?;
            let pen = regions::penalties(b);
            let slack_rows: Vec<(Mask, f64)> = (0..=subset::full(instance.bss()))
                .map(|s| (s, regions::jd_rhs_raw(instance, &wc, b.whitened_matrices(), &pen, all, s)))
                .collect();
            let r = slack_rows.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
            if !(r >= 0.0) {
                return Ok(infeasible());
            }
            let slacks = slack_rows.iter().map(|&(s, rhs)| Slack { users: all, bss: s, value: rhs - r }).collect();
            Ok(Evaluation { value: r, rates: split_sum(r, k_users), slacks })
        }
        Objective::SdSumFronthaul { csum } => {
            let all = subset::full(k_users);
            let all_bss = subset::full(instance.bss());
            let info = gaussinfo::i_x_yhat_cond(instance, b, all, all_bss)?;
            let budget = csum - regions::penalties(b).iter().sum::<f64>();
            let r = info.min(budget);
            if !(r >= 0.0) {
                return Ok(infeasible());
            }
            let slacks = vec![Slack { users: all, bss: 0, value: info - r }, Slack { users: all, bss: all_bss, value: budget - r }];
            Ok(Evaluation { value: r, rates: split_sum(r, k_users), slacks })
        }
    }
}

fn split_sum(r: f64, users: usize) -> Vec<f64> {
    let mut v = vec![0.0; users];
    if let Some(first) = v.first_mut() {
        *first = r;
    }
    v
}

fn jd_weighted_eval(instance: &NetworkInstance, b: &QuantizerB, weights: &[f64]) -> Result<Evaluation, OptimizeError> {
    let constraints = regions::jd_constraints(instance, b)?;
    if constraints.iter().any(|c| c.clamped) {
        return Ok(Evaluation { value: f64::NEG_INFINITY, rates: vec![0.0; instance.users()], slacks: Vec::new() });
    }
    let sol = regions::max_weighted_rate(instance.users(), &constraints, weights)?;
    let slacks = constraints
        .iter()
        .map(|c| Slack {
            users: c.users,
            bss: c.bss,
            value: c.rhs - subset::members(c.users).map(|k| sol.rates[k]).sum::<f64>(),
        })
        .collect();
    Ok(Evaluation { value: sol.value, rates: sol.rates, slacks })
}

/// Objective value at fixed `b`; `−∞` where the program is infeasible. Concave
/// in `b` for every objective. The tradeoff objective is evaluated at the
/// instance's own fronthaul capacities.
pub fn value_function(instance: &NetworkInstance, objective: &Objective, b: &QuantizerB) -> Result<f64, OptimizeError> {
    Caps::default().check(instance)?;
    objective.validate(instance)?;
    Ok(evaluate(instance, objective, b, Some(instance.fronthauls()))?.value)
}

/// `λ·b0 + (1−λ)·b1`, formed in the whitened domain.
pub fn mix_quantizers(instance: &NetworkInstance, b0: &QuantizerB, b1: &QuantizerB, lambda: f64) -> Result<QuantizerB, OptimizeError> {
    let w = b0
        .whitened_matrices()
        .iter()
        .zip(b1.whitened_matrices())
        .map(|(x, y)| linalg::hermitize(&(x.scale(lambda) + y.scale(1.0 - lambda))))
        .collect();
    Ok(QuantizerB::from_whitened(instance, w)?)
}

/// Smallest `val(λb0 + (1−λ)b1) − λ·val(b0) − (1−λ)·val(b1)` over `lambdas`;
/// `+∞` when an endpoint is infeasible.
pub fn segment_concavity(
    instance: &NetworkInstance,
    objective: &Objective,
    b0: &QuantizerB,
    b1: &QuantizerB,
    lambdas: &[f64],
) -> Result<f64, OptimizeError> {
    let v0 = value_function(instance, objective, b0)?;
    let v1 = value_function(instance, objective, b1)?;
    if !v0.is_finite() || !v1.is_finite() {
        return Ok(f64::INFINITY);
    }
    let mut worst = f64::INFINITY;
    for &lambda in lambdas {
        let mid = mix_quantizers(instance, b0, b1, lambda)?;
        let vm = value_function(instance, objective, &mid)?;
        worst = worst.min(vm - lambda * v0 - (1.0 - lambda) * v1);
    }
    Ok(worst)
}

/// Clip whitened eigenvalues to `[ε, 1−ε]`.
pub fn project_whitened(bt: &CMat) -> CMat {
    linalg::herm_map(bt, |x| x.clamp(PROJECTION_EPS, 1.0 - PROJECTION_EPS))
}

/// Euclidean projection (in the whitened metric) onto the Loewner box.
pub fn project_loewner(instance: &NetworkInstance, b: &QuantizerB) -> Result<QuantizerB, OptimizeError> {
    let w = b.whitened_matrices().iter().map(project_whitened).collect();
    Ok(QuantizerB::from_whitened(instance, w)?)
}

/// Quantizer from whitened coordinates in [`linalg::hermitian_basis`], `N²` per BS.
pub fn quantizer_from_coords(instance: &NetworkInstance, coords: &[f64]) -> Result<QuantizerB, OptimizeError> {
    let n = instance.rx_antennas();
    let per = n * n;
    if coords.len() != per * instance.bss() {
        return Err(OptimizeError::InvalidParameter("coordinate vector has the wrong length".into()));
    }
    let w = coords.chunks(per).map(|c| linalg::from_hermitian_coords(n, c)).collect();
    Ok(QuantizerB::from_whitened(instance, w)?)
}

pub fn quantizer_coords(b: &QuantizerB) -> Vec<f64> {
    b.whitened_matrices().iter().flat_map(linalg::hermitian_coords).collect()
}

/// Gradient of the JD right-hand side `rhs(T, S)` with respect to the whitened
/// coordinates of every BS (layout of [`quantizer_coords`]).
pub fn jd_rhs_gradient(instance: &NetworkInstance, b: &QuantizerB, users: Mask, bss: Mask) -> Result<Vec<f64>, OptimizeError> {
    let wc = WhitenedChannel::new(instance)?;
    let n = instance.rx_antennas();
    let basis = linalg::hermitian_basis(n);
    let observed = subset::complement(bss, instance.bss());
    Ok(rhs_gradient_with(&wc, &basis, b.whitened_matrices(), users, bss, observed))
}

fn rhs_gradient_with(wc: &WhitenedChannel, basis: &[CMat], bt: &[CMat], users: Mask, penalized: Mask, observed: Mask) -> Vec<f64> {
    let per = basis.len();
    let mut grad = vec![0.0; per * bt.len()];
    for l in subset::members(penalized) {
        let n = bt[l].nrows();
        let w = linalg::pd_inverse(&(linalg::identity(n) - &bt[l])).unwrap_or_else(|| linalg::scaled_identity(n, f64::INFINITY));
        for (a, e) in basis.iter().enumerate() {
            grad[l * per + a] -= linalg::inner(e, &w) / LN2;
        }
    }
    if let Some(d) = InfoDerivatives::compute(wc, basis, bt, users, observed, false) {
        for (l, g) in d.grad {
            for a in 0..per {
                grad[l * per + a] += g[a];
            }
        }
    }
    grad
}

/// Gradient and Hessian of `log2 det(I + Σ_{ℓ∈U} G_{ℓ,T}† B̃_ℓ G_{ℓ,T})`.
struct InfoDerivatives {
    /// Per observed BS: gradient over its basis coordinates.
    grad: Vec<(usize, Vec<f64>)>,
    /// Blocks `(ℓ, m, H)` with `H[a][b] = ∂²/∂b̃_{ℓ,a}∂b̃_{m,b}`.
    hess: Vec<(usize, usize, DMatrix<f64>)>,
}

impl InfoDerivatives {
    fn compute(wc: &WhitenedChannel, basis: &[CMat], bt: &[CMat], users: Mask, observed: Mask, hessian: bool) -> Option<Self> {
        if users == 0 || observed == 0 {
            return None;
        }
        let bss: Vec<usize> = subset::members(observed).collect();
        let gs: Vec<CMat> = bss.iter().map(|&l| wc.stacked(l, users)).collect();
        let dim = gs[0].ncols();
        let mut a = linalg::identity(dim);
        for (g, &l) in gs.iter().zip(&bss) {
            a += g.adjoint() * &bt[l] * g;
        }
        let a = linalg::hermitize(&a);
        let ainv = linalg::pd_inverse(&a)?;
        let per = basis.len();
        // P_{ij} = G_i A⁻¹ G_j†
        let p = |i: usize, j: usize| &gs[i] * &ainv * gs[j].adjoint();
        let mut grad = Vec::with_capacity(bss.len());
        for (i, &l) in bss.iter().enumerate() {
            let pii = linalg::hermitize(&p(i, i));
            grad.push((l, basis.iter().map(|e| linalg::inner(e, &pii) / LN2).collect()));
        }
        let mut hess = Vec::new();
        if hessian {
            for i in 0..bss.len() {
                for j in i..bss.len() {
                    let pij = p(i, j);
                    let pji = pij.adjoint();
                    let mut h = DMatrix::zeros(per, per);
                    for (bi, eb) in basis.iter().enumerate() {
                        let m = &pij * eb * &pji;
                        for (ai, ea) in basis.iter().enumerate() {
                            h[(ai, bi)] = -linalg::inner(ea, &m) / LN2;
                        }
                    }
                    hess.push((bss[i], bss[j], h));
                }
            }
        }
        Some(Self { grad, hess })
    }
}

/// `Re tr(E_a X E_b X)` for all basis pairs.
fn quadratic_form(basis: &[CMat], x: &CMat) -> DMatrix<f64> {
    let per = basis.len();
    let mut h = DMatrix::zeros(per, per);
    for (bi, eb) in basis.iter().enumerate() {
        let m = x * eb * x;
        for (ai, ea) in basis.iter().enumerate() {
            h[(ai, bi)] = linalg::inner(ea, &m);
        }
    }
    h
}

// ---------------------------------------------------------------------------
// Barrier method

/// One constraint `constant + Σ coef·y − Σ_{ℓ∈pen} pen_ℓ + I(T;U) ≥ 0`.
#[derive(Debug, Clone)]
struct Row {
    constant: f64,
    linear: Vec<(usize, f64)>,
    penalized: Mask,
    info: Option<usize>,
}

struct Program {
    n: usize,
    bss: usize,
    free: Vec<usize>,
    linear_vars: usize,
    objective: Vec<f64>,
    rows: Vec<Row>,
    info_keys: Vec<(Mask, Mask)>,
    /// Per free BS, the starting whitened scale.
    start_scale: Vec<f64>,
    start_linear: Vec<f64>,
}

/// Users whose effective channel to every BS in `observed` is zero.
fn silent_users(wc: &WhitenedChannel, observed: Mask) -> Mask {
    let mut out = 0;
    for k in 0..wc.users() {
        let energy: f64 = subset::members(observed).map(|l| linalg::max_abs(&wc.stacked(l, subset::singleton(k)))).fold(0.0, f64::max);
        if energy <= 1e-150 {
            out |= subset::singleton(k);
        }
    }
    out
}

fn start_scale(pen_target: f64, n: usize) -> f64 {
    (1.0 - libm::exp2(-pen_target / n as f64)).min(0.5)
}

impl Program {
    fn key(keys: &mut Vec<(Mask, Mask)>, users: Mask, observed: Mask) -> Option<usize> {
        if users == 0 || observed == 0 {
            return None;
        }
        Some(keys.iter().position(|&k| k == (users, observed)).unwrap_or_else(|| {
            keys.push((users, observed));
            keys.len() - 1
        }))
    }

    /// `None` when the optimum is trivially zero with `B = 0`.
    fn build(instance: &NetworkInstance, wc: &WhitenedChannel, objective: &Objective) -> Option<Program> {
        let (k_users, l_bss, n) = (instance.users(), instance.bss(), instance.rx_antennas());
        let mut keys = Vec::new();
        let mut rows = Vec::new();
        match objective {
            Objective::JdWeighted { .. } | Objective::SdSum => {
                let free_mask = (0..l_bss).filter(|&l| instance.fronthaul(l) > 0.0).fold(0, |m, l| m | subset::singleton(l));
                let free: Vec<usize> = subset::members(free_mask).collect();
                let speaking = subset::full(k_users) & !silent_users(wc, free_mask);
                if free.is_empty() || speaking == 0 {
                    return None;
                }
                let user_sets: Vec<Mask> = match objective {
                    Objective::SdSum => vec![speaking],
                    _ => (1..=speaking).filter(|t| t & !speaking == 0).collect(),
                };
                let rate_index: Vec<usize> = subset::members(speaking).collect();
                let linear_vars = if matches!(objective, Objective::SdSum) { 1 } else { rate_index.len() };
                for &t in &user_sets {
                    let mut s = 0;
                    loop {
                        let constant = subset::members(s).map(|l| instance.fronthaul(l)).sum();
                        let linear = if matches!(objective, Objective::SdSum) {
                            vec![(0, -1.0)]
                        } else {
                            rate_index.iter().enumerate().filter(|(_, &k)| subset::contains(t, k)).map(|(i, _)| (i, -1.0)).collect()
                        };
                        let info = Self::key(&mut keys, t, free_mask & !s);
                        rows.push(Row { constant, linear, penalized: s, info });
                        s = (s.wrapping_sub(free_mask)) & free_mask;
                        if s == 0 {
                            break;
                        }
                    }
                }
                if speaking != subset::full(k_users) && !matches!(objective, Objective::SdSum) {
                    let mut s = free_mask;
                    while s != 0 {
                        let constant = subset::members(s).map(|l| instance.fronthaul(l)).sum();
                        rows.push(Row { constant, linear: Vec::new(), penalized: s, info: None });
                        s = (s - 1) & free_mask;
                    }
                }
                let objective_vec = match objective {
                    Objective::JdWeighted { weights } => rate_index.iter().map(|&k| weights[k]).collect(),
                    _ => vec![1.0],
                };
                let start_scale = free.iter().map(|&l| start_scale(instance.fronthaul(l) / 2.0, n)).collect();
                Some(Program {
                    n,
                    bss: l_bss,
                    free,
                    linear_vars,
                    objective: objective_vec,
                    rows,
                    info_keys: keys,
                    start_scale,
                    start_linear: Vec::new(),
                })
            }
            Objective::SdSumFronthaul { csum } => {
                let all_bss = subset::full(l_bss);
                let speaking = subset::full(k_users) & !silent_users(wc, all_bss);
                if *csum <= 0.0 || speaking == 0 {
                    return None;
                }
                let info = Self::key(&mut keys, speaking, all_bss);
                rows.push(Row { constant: 0.0, linear: vec![(0, -1.0)], penalized: 0, info });
                rows.push(Row { constant: *csum, linear: vec![(0, -1.0)], penalized: all_bss, info: None });
                Some(Program {
                    n,
                    bss: l_bss,
                    free: (0..l_bss).collect(),
                    linear_vars: 1,
                    objective: vec![1.0],
                    rows,
                    info_keys: keys,
                    start_scale: vec![start_scale(csum / (2.0 * l_bss as f64), n); l_bss],
                    start_linear: Vec::new(),
                })
            }
            Objective::Tradeoff { weights, prices, gamma, csum } => {
                let all_bss = subset::full(l_bss);
                let speaking = subset::full(k_users) & !silent_users(wc, all_bss);
                if *csum <= 0.0 || speaking == 0 {
                    return None;
                }
                let rate_index: Vec<usize> = subset::members(speaking).collect();
                let nr = rate_index.len();
                for t in (1..=speaking).filter(|t| t & !speaking == 0) {
                    for s in 0..=all_bss {
                        let mut linear: Vec<(usize, f64)> =
                            rate_index.iter().enumerate().filter(|(_, &k)| subset::contains(t, k)).map(|(i, _)| (i, -1.0)).collect();
                        linear.extend(subset::members(s).map(|l| (nr + l, 1.0)));
                        let info = Self::key(&mut keys, t, all_bss & !s);
                        rows.push(Row { constant: 0.0, linear, penalized: s, info });
                    }
                }
                if speaking != subset::full(k_users) {
                    for s in 1..=all_bss {
                        let linear = subset::members(s).map(|l| (nr + l, 1.0)).collect();
                        rows.push(Row { constant: 0.0, linear, penalized: s, info: None });
                    }
                }
                let budget = (0..l_bss).map(|l| (nr + l, -prices[l])).collect();
                rows.push(Row { constant: *csum, linear: budget, penalized: 0, info: None });
                let mut objective_vec: Vec<f64> = rate_index.iter().map(|&k| weights[k]).collect();
                objective_vec.extend(prices.iter().map(|p| -gamma * p));
                let c0: Vec<f64> = prices.iter().map(|p| csum / (2.0 * l_bss as f64 * p)).collect();
                let start_scale = c0.iter().map(|c| start_scale(c / 2.0, n)).collect();
                let mut start_linear = vec![0.0; nr];
                start_linear.extend_from_slice(&c0);
                Some(Program {
                    n,
                    bss: l_bss,
                    free: (0..l_bss).collect(),
                    linear_vars: nr + l_bss,
                    objective: objective_vec,
                    rows,
                    info_keys: keys,
                    start_scale,
                    start_linear,
                })
            }
        }
    }

    fn per(&self) -> usize {
        self.n * self.n
    }

    fn dim(&self) -> usize {
        self.free.len() * self.per() + self.linear_vars
    }

    /// Barrier parameter count: one per scalar inequality, `N` per log-det term.
    fn barrier_degree(&self) -> f64 {
        (self.rows.len() + self.linear_vars + 2 * self.n * self.free.len()) as f64
    }

    fn whitened(&self, z: &[f64]) -> Vec<CMat> {
        let mut bt: Vec<CMat> = (0..self.bss).map(|_| linalg::zeros(self.n, self.n)).collect();
        for (i, &l) in self.free.iter().enumerate() {
            bt[l] = linalg::from_hermitian_coords(self.n, &z[i * self.per()..(i + 1) * self.per()]);
        }
        bt
    }

    fn start(&self, wc: &WhitenedChannel) -> Option<Vec<f64>> {
        let per = self.per();
        let mut z = vec![0.0; self.dim()];
        for (i, &s) in self.start_scale.iter().enumerate() {
            // Identity has coordinate 1 on each diagonal basis element.
            for d in 0..self.n {
                z[i * per + d] = s;
            }
        }
        let offset = self.free.len() * per;
        for (j, &v) in self.start_linear.iter().enumerate() {
            z[offset + j] = v;
        }
        // Rate variables start at zero; lift them into the interior.
        let rate_vars: Vec<usize> = (0..self.linear_vars).filter(|&j| self.start_linear.get(j).is_none_or(|&v| v == 0.0)).collect();
        let h = self.row_values(wc, &z)?;
        let mut lift = f64::INFINITY;
        for (row, hv) in self.rows.iter().zip(&h) {
            if *hv <= 0.0 {
                return None;
            }
            let count = row.linear.iter().filter(|(j, c)| rate_vars.contains(j) && *c < 0.0).count();
            if count > 0 {
                lift = lift.min(hv / (2.0 * count as f64));
            }
        }
        let lift = if lift.is_finite() { lift } else { 1.0 };
        for &j in &rate_vars {
            z[offset + j] = lift;
        }
        self.row_values(wc, &z)?.iter().all(|&v| v > 0.0).then_some(z)
    }

    fn row_values(&self, wc: &WhitenedChannel, z: &[f64]) -> Option<Vec<f64>> {
        let bt = self.whitened(z);
        let pens: Vec<f64> = bt.iter().map(gaussinfo::penalty_whitened).collect();
        let infos: Vec<f64> = self.info_keys.iter().map(|&(t, u)| wc.info(&bt, t, u)).collect();
        let offset = self.free.len() * self.per();
        let vals: Vec<f64> = self
            .rows
            .iter()
            .map(|r| {
                r.constant + r.linear.iter().map(|&(j, c)| c * z[offset + j]).sum::<f64>() - subset::members(r.penalized).map(|l| pens[l]).sum::<f64>()
                    + r.info.map_or(0.0, |i| infos[i])
            })
            .collect();
        vals.iter().all(|v| v.is_finite()).then_some(vals)
    }

    fn linear_objective(&self, z: &[f64]) -> f64 {
        let offset = self.free.len() * self.per();
        self.objective.iter().zip(&z[offset..]).map(|(c, y)| c * y).sum()
    }

    /// Barrier value `−t·cᵀy − Σ ln h − Σ ln y − Σ ln det B̃ − Σ ln det(I − B̃)`;
    /// `None` outside the domain.
    fn barrier_value(&self, wc: &WhitenedChannel, z: &[f64], t: f64) -> Option<f64> {
        let bt = self.whitened(z);
        let mut phi = -t * self.linear_objective(z);
        for &l in &self.free {
            let lo = linalg::logdet2(&bt[l])?;
            let hi = linalg::logdet2(&(linalg::identity(self.n) - &bt[l]))?;
            phi -= (lo + hi) * LN2;
        }
        let offset = self.free.len() * self.per();
        for &y in &z[offset..] {
            if !(y > 0.0) {
                return None;
            }
            phi -= libm::log(y);
        }
        for h in self.row_values(wc, z)? {
            if !(h > 0.0) {
                return None;
            }
            phi -= libm::log(h);
        }
        phi.is_finite().then_some(phi)
    }

    fn barrier_derivatives(&self, wc: &WhitenedChannel, basis: &[CMat], z: &[f64], t: f64) -> Option<(DVector<f64>, DMatrix<f64>)> {
        let per = self.per();
        let dim = self.dim();
        let offset = self.free.len() * per;
        let bt = self.whitened(z);
        let slot = |l: usize| self.free.iter().position(|&f| f == l);
        let mut grad = DVector::zeros(dim);
        let mut hess = DMatrix::zeros(dim, dim);
        for (j, c) in self.objective.iter().enumerate() {
            grad[offset + j] -= t * c;
        }
        // Penalty derivatives and the box barrier.
        let mut pen_grad = vec![Vec::new(); self.bss];
        let mut pen_hess = vec![DMatrix::zeros(0, 0); self.bss];
        for (i, &l) in self.free.iter().enumerate() {
            let v = linalg::pd_inverse(&bt[l])?;
            let w = linalg::pd_inverse(&(linalg::identity(self.n) - &bt[l]))?;
            let qv = quadratic_form(basis, &v);
            let qw = quadratic_form(basis, &w);
            for (a, e) in basis.iter().enumerate() {
                grad[i * per + a] += -linalg::inner(e, &v) + linalg::inner(e, &w);
            }
            hess.view_mut((i * per, i * per), (per, per)).add_assign(&(&qv + &qw));
            pen_grad[l] = basis.iter().map(|e| linalg::inner(e, &w) / LN2).collect::<Vec<f64>>();
            pen_hess[l] = qw / LN2;
        }
        for (j, &y) in z[offset..].iter().enumerate() {
            grad[offset + j] -= 1.0 / y;
            hess[(offset + j, offset + j)] += 1.0 / (y * y);
        }
        let infos: Vec<InfoDerivatives> = self
            .info_keys
            .iter()
            .map(|&(tu, u)| InfoDerivatives::compute(wc, basis, &bt, tu, u, true))
            .collect::<Option<Vec<_>>>()?;
        let h = self.row_values(wc, z)?;
        for (row, &hv) in self.rows.iter().zip(&h) {
            if !(hv > 0.0) {
                return None;
            }
            let mut g = DVector::zeros(dim);
            let mut curv = DMatrix::zeros(dim, dim); // −∇²h, positive semidefinite
            for l in subset::members(row.penalized) {
                if let Some(i) = slot(l) {
                    for a in 0..per {
                        g[i * per + a] -= pen_grad[l][a];
                    }
                    curv.view_mut((i * per, i * per), (per, per)).add_assign(&pen_hess[l]);
                }
            }
            if let Some(k) = row.info {
                let d = &infos[k];
                for (l, gl) in &d.grad {
                    let i = slot(*l)?;
                    for a in 0..per {
                        g[i * per + a] += gl[a];
                    }
                }
                for (l, m, block) in &d.hess {
                    let (i, j) = (slot(*l)?, slot(*m)?);
                    curv.view_mut((i * per, j * per), (per, per)).sub_assign(block);
                    if i != j {
                        curv.view_mut((j * per, i * per), (per, per)).sub_assign(&block.transpose());
                    }
                }
            }
            for &(j, c) in &row.linear {
                g[offset + j] += c;
            }
            grad -= &g / hv;
            hess += (&g * g.transpose()) / (hv * hv) + curv / hv;
        }
        Some((grad, hess))
    }
}

trait AddAssignView {
    fn add_assign(&mut self, m: &DMatrix<f64>);
    fn sub_assign(&mut self, m: &DMatrix<f64>);
}

impl AddAssignView for nalgebra::DMatrixViewMut<'_, f64> {
    fn add_assign(&mut self, m: &DMatrix<f64>) {
        *self += m;
    }
    fn sub_assign(&mut self, m: &DMatrix<f64>) {
        *self -= m;
    }
}

fn newton_direction(grad: &DVector<f64>, hess: &DMatrix<f64>) -> Option<DVector<f64>> {
    let scale = hess.diagonal().iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    let mut jitter = 0.0;
    for _ in 0..8 {
        let mut h = hess.clone();
        if jitter > 0.0 {
            for i in 0..h.nrows() {
                h[(i, i)] += jitter;
            }
        }
        if let Some(ch) = Cholesky::new(h) {
            return Some(-ch.solve(grad));
        }
        jitter = if jitter == 0.0 { 1e-14 * scale } else { jitter * 100.0 };
    }
    None
}

fn trivial_result(instance: &NetworkInstance, objective: &Objective, method: Method) -> Result<SolveResult, OptimizeError> {
    let b = QuantizerB::zero(instance);
    let fronthaul = matches!(objective, Objective::Tradeoff { .. }).then(|| vec![0.0; instance.bss()]);
    finish(instance, objective, b, fronthaul, 0.0, 0, true, Some(0.0), method, Vec::new())
}

#[allow(clippy::too_many_arguments)]
fn finish(
    instance: &NetworkInstance,
    objective: &Objective,
    b_star: QuantizerB,
    fronthaul: Option<Vec<f64>>,
    solver_value: f64,
    iterations: usize,
    converged: bool,
    gap_estimate: Option<f64>,
    method: Method,
    trace: Vec<TraceRow>,
) -> Result<SolveResult, OptimizeError> {
    let fh = fronthaul.clone().unwrap_or_else(|| instance.fronthauls().to_vec());
    let e = evaluate(instance, objective, &b_star, Some(&fh))?;
    Ok(SolveResult {
        objective: objective.clone(),
        b_star,
        value: e.value,
        solver_value,
        rates: e.rates,
        fronthaul,
        slacks: e.slacks,
        iterations,
        converged,
        gap_estimate,
        method,
        trace,
    })
}

fn barrier(instance: &NetworkInstance, wc: &WhitenedChannel, objective: &Objective, options: &SolverOptions) -> Result<SolveResult, OptimizeError> {
    let Some(program) = Program::build(instance, wc, objective) else {
        return trivial_result(instance, objective, Method::Barrier);
    };
    let basis = linalg::hermitian_basis(program.n);
    let mut z = program.start(wc).ok_or(OptimizeError::NoInteriorPoint)?;
    let degree = program.barrier_degree();
    let mut t = 1.0;
    let mut iterations = 0;
    let mut trace = Vec::new();
    let mut converged = false;
    'outer: loop {
        // Centering.
        for _ in 0..200 {
            if iterations >= options.max_iters {
                break 'outer;
            }
            let Some((grad, hess)) = program.barrier_derivatives(wc, &basis, &z, t) else { break };
            let Some(dir) = newton_direction(&grad, &hess) else { break };
            let decrement = -grad.dot(&dir);
            if decrement / 2.0 <= 1e-11 {
                break;
            }
            let phi = program.barrier_value(wc, &z, t).ok_or(OptimizeError::NoInteriorPoint)?;
            let mut step = 1.0;
            let mut accepted = None;
            while step > 1e-14 {
                let cand: Vec<f64> = z.iter().zip(dir.iter()).map(|(a, d)| a + step * d).collect();
                if let Some(v) = program.barrier_value(wc, &cand, t) {
                    if v <= phi - 0.25 * step * decrement {
                        accepted = Some(cand);
                        break;
                    }
                }
                step *= 0.5;
            }
            iterations += 1;
            let Some(next) = accepted else { break };
            z = next;
            if options.trace {
                let min_slack = program.row_values(wc, &z).map_or(f64::NAN, |h| h.iter().copied().fold(f64::INFINITY, f64::min));
                trace.push(TraceRow { iteration: iterations, value: program.linear_objective(&z), step, min_slack });
            }
        }
        if degree / t <= options.tolerance {
            converged = true;
            break;
        }
        t *= 8.0;
    }
    let bt = program.whitened(&z);
    let b_star = QuantizerB::from_whitened(instance, bt)?;
    let offset = program.free.len() * program.per();
    let fronthaul = matches!(objective, Objective::Tradeoff { .. }).then(|| {
        let nr = program.linear_vars - instance.bss();
        z[offset + nr..].to_vec()
    });
    let solver_value = program.linear_objective(&z);
    finish(instance, objective, b_star, fronthaul, solver_value, iterations, converged, Some(degree / t), Method::Barrier, trace)
}

// ---------------------------------------------------------------------------
// Projected supergradient method

/// Value and a supergradient of the value function (whitened coordinates).
fn value_and_supergradient(
    instance: &NetworkInstance,
    wc: &WhitenedChannel,
    basis: &[CMat],
    objective: &Objective,
    b: &QuantizerB,
) -> Result<(f64, Vec<f64>), OptimizeError> {
    let bt = b.whitened_matrices();
    let all_bss = subset::full(instance.bss());
    let all_users = subset::full(instance.users());
    let grad_of = |users: Mask, penalized: Mask, observed: Mask| rhs_gradient_with(wc, basis, bt, users, penalized, observed);
    match objective {
        Objective::JdWeighted { weights } => {
            let constraints = regions::jd_constraints(instance, b)?;
            let sol = regions::max_weighted_rate(instance.users(), &constraints, weights)?;
            let mut g = vec![0.0; basis.len() * instance.bss()];
            for (c, y) in &sol.duals {
                if *y > 0.0 {
                    let gc = grad_of(c.users, c.bss, all_bss & !c.bss);
                    for (a, b) in g.iter_mut().zip(gc) {
                        *a += y * b;
                    }
                }
            }
            Ok((sol.value, g))
        }
        Objective::SdSum => {
            let pen = regions::penalties(b);
            let (s, v) = (0..=all_bss)
                .map(|s| (s, regions::jd_rhs_raw(instance, wc, bt, &pen, all_users, s)))
                .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
            Ok((v, grad_of(all_users, s, all_bss & !s)))
        }
        Objective::SdSumFronthaul { csum } => {
            let info = wc.info(bt, all_users, all_bss);
            let budget = csum - regions::penalties(b).iter().sum::<f64>();
            if info <= budget {
                Ok((info, grad_of(all_users, 0, all_bss)))
            } else {
                Ok((budget, grad_of(0, all_bss, 0)))
            }
        }
        Objective::Tradeoff { .. } => Err(OptimizeError::Unsupported),
    }
}

fn supergradient(instance: &NetworkInstance, wc: &WhitenedChannel, objective: &Objective, options: &SolverOptions) -> Result<SolveResult, OptimizeError> {
    if matches!(objective, Objective::Tradeoff { .. }) {
        return Err(OptimizeError::Unsupported);
    }
    let n = instance.rx_antennas();
    let basis = linalg::hermitian_basis(n);
    let per = basis.len();
    let fixed_zero: Vec<bool> = match objective {
        Objective::SdSumFronthaul { .. } => vec![false; instance.bss()],
        _ => (0..instance.bss()).map(|l| instance.fronthaul(l) <= 0.0).collect(),
    };
    let project = |coords: &[f64]| -> Result<QuantizerB, OptimizeError> {
        let w = coords
            .chunks(per)
            .enumerate()
            .map(|(l, c)| if fixed_zero[l] { linalg::zeros(n, n) } else { project_whitened(&linalg::from_hermitian_coords(n, c)) })
            .collect();
        Ok(QuantizerB::from_whitened(instance, w)?)
    };
    let mut b = project(&quantizer_coords(&QuantizerB::half_inverse_noise(instance)?))?;
    let mut x = quantizer_coords(&b);
    let mut avg = x.clone();
    let (mut best_v, mut best_b) = (f64::NEG_INFINITY, b.clone());
    let mut history: Vec<f64> = Vec::new();
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < options.max_iters {
        iterations += 1;
        let (v, g) = value_and_supergradient(instance, wc, &basis, objective, &b)?;
        if v > best_v {
            best_v = v;
            best_b = b.clone();
        }
        history.push(best_v);
        if history.len() > 50 {
            let old = history[history.len() - 51];
            if (best_v - old).abs() <= options.tolerance * best_v.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        let norm = libm::sqrt(g.iter().map(|x| x * x).sum::<f64>());
        if norm == 0.0 {
            converged = true;
            break;
        }
        let step = match options.polyak_target {
            Some(target) => ((target - v).max(0.0) / (norm * norm)).max(1e-12),
            None => 0.5 / (libm::sqrt(iterations as f64) * norm),
        };
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi += step * gi;
        }
        b = project(&x)?;
        x = quantizer_coords(&b);
        let w = 1.0 / (iterations as f64 + 1.0);
        for (a, xi) in avg.iter_mut().zip(&x) {
            *a += w * (xi - *a);
        }
        if options.trace {
            trace.push(TraceRow { iteration: iterations, value: v, step, min_slack: f64::NAN });
        }
    }
    let averaged = project(&avg)?;
    let (va, _) = value_and_supergradient(instance, wc, &basis, objective, &averaged)?;
    if va > best_v {
        best_v = va;
        best_b = averaged;
    }
    finish(instance, objective, best_b, None, best_v, iterations, converged, None, Method::Supergradient, trace)
}

// ---------------------------------------------------------------------------
// Grid oracle

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    pub b: QuantizerB,
    pub fronthaul: Option<Vec<f64>>,
    pub evaluations: usize,
}

/// Scalar degrees of freedom the oracle would search: diagonal whitened
/// entries, plus one capacity per BS for the tradeoff objective.
pub fn oracle_dof(instance: &NetworkInstance, objective: &Objective) -> usize {
    let c = if matches!(objective, Objective::Tradeoff { .. }) { instance.bss() } else { 0 };
    instance.bss() * instance.rx_antennas() + c
}

/// Brute force over diagonal whitened quantizers on a `resolution`-point grid
/// per axis, refined by repeated zooming around the incumbent. Each point is
/// evaluated exactly through the region module. With `resolution == 1` only
/// the centre `B̃ = ½I` (and `C_ℓ` at half the budget) is evaluated.
pub fn grid_oracle(instance: &NetworkInstance, objective: &Objective, resolution: usize) -> Result<OracleResult, OptimizeError> {
    Caps::default().check(instance)?;
    objective.validate(instance)?;
    let dof = oracle_dof(instance, objective);
    if dof > ORACLE_MAX_DOF {
        return Err(OptimizeError::TooManyDegreesOfFreedom { dof, cap: ORACLE_MAX_DOF });
    }
    if resolution == 0 || resolution > ORACLE_MAX_RESOLUTION {
        return Err(OptimizeError::Resolution { found: resolution, cap: ORACLE_MAX_RESOLUTION });
    }
    let (l_bss, n) = (instance.bss(), instance.rx_antennas());
    let nb = l_bss * n;
    let mut lo = vec![PROJECTION_EPS; dof];
    let mut hi = vec![1.0 - PROJECTION_EPS; dof];
    if let Objective::Tradeoff { prices, csum, .. } = objective {
        for l in 0..l_bss {
            lo[nb + l] = 0.0;
            hi[nb + l] = csum / prices[l];
        }
    }
    let mut evaluations = 0;
    let mut eval = |p: &[f64]| -> Result<(f64, QuantizerB, Option<Vec<f64>>), OptimizeError> {
        evaluations += 1;
        let w: Vec<CMat> = (0..l_bss)
            .map(|l| {
                let mut m = linalg::zeros(n, n);
                for i in 0..n {
                    m[(i, i)] = num_complex::Complex64::new(p[l * n + i], 0.0);
                }
                m
            })
            .collect();
        let b = QuantizerB::from_whitened(instance, w)?;
        let fh = matches!(objective, Objective::Tradeoff { .. }).then(|| p[nb..].to_vec());
        let fh_ref = fh.clone().unwrap_or_else(|| instance.fronthauls().to_vec());
        let v = evaluate(instance, objective, &b, Some(&fh_ref))?.value;
        Ok((v, b, fh))
    };
    let centre: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    if resolution == 1 || dof == 0 {
        let (value, b, fronthaul) = eval(&centre)?;
        return Ok(OracleResult { value, b, fronthaul, evaluations: 1 });
    }
    let mut best = (f64::NEG_INFINITY, centre.clone());
    let (mut box_lo, mut box_hi) = (lo.clone(), hi.clone());
    for _round in 0..200 {
        let mut idx = vec![0usize; dof];
        let mut improved = best.clone();
        loop {
            let p: Vec<f64> = (0..dof)
                .map(|d| box_lo[d] + (box_hi[d] - box_lo[d]) * idx[d] as f64 / (resolution - 1) as f64)
                .collect();
            let (v, _, _) = eval(&p)?;
            if v > improved.0 {
                improved = (v, p);
            }
            // Odometer increment.
            let mut d = 0;
            while d < dof {
                idx[d] += 1;
                if idx[d] < resolution {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == dof {
                break;
            }
        }
        best = improved;
        let mut widest: f64 = 0.0;
        for d in 0..dof {
            // Shrink by at most half per round so ridges can be followed.
            let width = box_hi[d] - box_lo[d];
            let half = (2.0 * width / (resolution - 1) as f64).max(width / 4.0);
            box_lo[d] = (best.1[d] - half).max(lo[d]);
            box_hi[d] = (best.1[d] + half).min(hi[d]);
            widest = widest.max(box_hi[d] - box_lo[d]);
        }
        if widest < 1e-11 {
            break;
        }
    }
    let (value, b, fronthaul) = eval(&best.1)?;
    Ok(OracleResult { value, b, fronthaul, evaluations })
}
