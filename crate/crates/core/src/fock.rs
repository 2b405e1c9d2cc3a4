//! Truncated single-mode bosonic Hilbert space.
//!
//! States are built in a padded working space (twice the requested
//! dimension) and then projected back, so that the truncation of the
//! displacement and squeeze generators never reaches the levels that are
//! kept. A state is accepted only if its weight in the top [`TAIL_BUFFER`]
//! kept levels plus the discarded weight stays below [`TAIL_EPS`].

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::linalg::{eigh, CMatrix, Complex, EighResult, ONE, ZERO};

pub const DEFAULT_DIM: usize = 64;
/// Upper bound for automatic dimension raising.
pub const MAX_AUTO_DIM: usize = 512;
/// Number of top basis levels that must stay (nearly) empty.
pub const TAIL_BUFFER: usize = 8;
pub const TAIL_EPS: f64 = 1e-10;
const NORM_TOL: f64 = 1e-10;

/// Physical constants and truncation for one bosonic mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeConfig {
    pub dim: usize,
    pub hbar: f64,
    pub mass: f64,
    pub omega: f64,
}

impl Default for ModeConfig {
    fn default() -> Self {
        Self {
            dim: DEFAULT_DIM,
            hbar: 1.0,
            mass: 1.0,
            omega: 1.0,
        }
    }
}

impl ModeConfig {
    /// Natural units (`ħ = m = ω = 1`) at the given truncation.
    pub fn new(dim: usize) -> Result<Self> {
        Self::with_units(dim, 1.0, 1.0, 1.0)
    }

    pub fn with_units(dim: usize, hbar: f64, mass: f64, omega: f64) -> Result<Self> {
        let cfg = Self {
            dim,
            hbar,
            mass,
            omega,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidConfig(format!(
                "dim must be >= 2, got {}",
                self.dim
            )));
        }
        for (name, v) in [
            ("hbar", self.hbar),
            ("mass", self.mass),
            ("omega", self.omega),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn with_dim(&self, dim: usize) -> Self {
        Self { dim, ..*self }
    }

    /// Same physical constants, ignoring truncation.
    pub fn same_units(&self, other: &ModeConfig) -> bool {
        self.hbar == other.hbar && self.mass == other.mass && self.omega == other.omega
    }

    /// `excitation + 5·√excitation + buffer < dim`, the a-priori guard for a
    /// state with mean excitation `excitation`.
    pub fn admits_excitation(&self, excitation: f64) -> bool {
        excitation + 5.0 * excitation.sqrt() + (TAIL_BUFFER as f64) < self.dim as f64
    }

    fn mass_omega(&self) -> f64 {
        self.mass * self.omega
    }
}

/// Ladder operators and number operator.
#[derive(Clone, Debug)]
pub struct LadderOps {
    pub a: CMatrix,
    pub adag: CMatrix,
    pub n: CMatrix,
}

pub fn ladder_ops(config: &ModeConfig) -> Result<LadderOps> {
    config.validate()?;
    let a = annihilation(config.dim);
    let adag = a.adjoint();
    let n = CMatrix::from_real_diag(&(0..config.dim).map(|k| k as f64).collect::<Vec<_>>());
    Ok(LadderOps { a, adag, n })
}

fn annihilation(dim: usize) -> CMatrix {
    let mut a = CMatrix::zeros(dim, dim);
    for k in 1..dim {
        a[(k - 1, k)] = Complex::new((k as f64).sqrt(), 0.0);
    }
    a
}

#[derive(Clone, Debug)]
pub struct Quadratures {
    pub q: CMatrix,
    pub p: CMatrix,
}

/// `q = √(ħ/2mω)(a + a†)`, `p = i√(ħmω/2)(a† − a)`.
pub fn quadratures(config: &ModeConfig) -> Result<Quadratures> {
    let LadderOps { a, adag, .. } = ladder_ops(config)?;
    let q_scale = (config.hbar / (2.0 * config.mass_omega())).sqrt();
    let p_scale = (config.hbar * config.mass_omega() / 2.0).sqrt();
    let q = &(&a + &adag) * q_scale;
    let p = &(&adag - &a) * Complex::new(0.0, p_scale);
    Ok(Quadratures { q, p })
}

/// Common interface of pure and mixed states.
pub trait QuantumState {
    fn config(&self) -> &ModeConfig;

    fn dim(&self) -> usize {
        self.config().dim
    }

    /// `⟨A⟩`.
    fn expect(&self, a: &CMatrix) -> Result<Complex>;

    /// `⟨AB⟩`.
    fn correlation(&self, a: &CMatrix, b: &CMatrix) -> Result<Complex>;

    fn is_mixed(&self) -> bool;

    fn check_operator(&self, op: &'static str, a: &CMatrix) -> Result<()> {
        let d = self.dim();
        if a.rows() != d || a.cols() != d {
            return Err(Error::DimensionMismatch {
                op,
                left_rows: a.rows(),
                left_cols: a.cols(),
                right_rows: d,
                right_cols: d,
            });
        }
        Ok(())
    }
}

/// Normalized pure state on the truncated space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    config: ModeConfig,
    amplitudes: Vec<Complex>,
}

impl StateVector {
    /// Validates length, finiteness, normalization and the tail guard.
    pub fn new(config: ModeConfig, amplitudes: Vec<Complex>) -> Result<Self> {
        config.validate()?;
        if amplitudes.len() != config.dim {
            return Err(Error::BadLength {
                expected: config.dim,
                got: amplitudes.len(),
            });
        }
        if !amplitudes
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(Error::NonFinite { op: "StateVector" });
        }
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState {
                op: "StateVector",
                reason: format!("norm^2 = {norm_sqr}, expected 1"),
            });
        }
        let state = Self { config, amplitudes };
        state.check_tail("StateVector", 0.0)?;
        Ok(state)
    }

    /// Normalizes `amplitudes` first; fails on (near) zero norm.
    pub fn normalized(config: ModeConfig, mut amplitudes: Vec<Complex>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm <= 1e-12 {
            return Err(Error::InvalidState {
                op: "normalize",
                reason: format!("norm {norm:e} too small to normalize"),
            });
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Self::new(config, amplitudes)
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Weight in the top [`TAIL_BUFFER`] levels.
    pub fn tail_weight(&self) -> f64 {
        let start = self.config.dim.saturating_sub(TAIL_BUFFER);
        self.amplitudes[start..].iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::ConfigMismatch { op: "inner" });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn check_tail(&self, op: &'static str, discarded: f64) -> Result<()> {
        let weight = self.tail_weight() + discarded;
        if weight > TAIL_EPS {
            return Err(Error::TailGuard {
                op,
                weight,
                limit: TAIL_EPS,
                dim: self.config.dim,
            });
        }
        Ok(())
    }
}

impl QuantumState for StateVector {
    fn config(&self) -> &ModeConfig {
        &self.config
    }

    fn expect(&self, a: &CMatrix) -> Result<Complex> {
        self.check_operator("expect", a)?;
        let av = a.mul_vec(&self.amplitudes)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&av)
            .map(|(x, y)| x.conj() * y)
            .sum())
    }

    fn correlation(&self, a: &CMatrix, b: &CMatrix) -> Result<Complex> {
        self.check_operator("correlation", a)?;
        self.check_operator("correlation", b)?;
        // ⟨ψ|AB|ψ⟩ = (A†ψ)†(Bψ)
        let left = a.adjoint().mul_vec(&self.amplitudes)?;
        let right = b.mul_vec(&self.amplitudes)?;
        Ok(left.iter().zip(&right).map(|(x, y)| x.conj() * y).sum())
    }

    fn is_mixed(&self) -> bool {
        false
    }
}

/// Mixed state on the truncated space.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    config: ModeConfig,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace, positivity and the tail guard.
    pub fn new(config: ModeConfig, matrix: CMatrix) -> Result<Self> {
        config.validate()?;
        if matrix.rows() != config.dim || !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                op: "DensityMatrix",
                left_rows: matrix.rows(),
                left_cols: matrix.cols(),
                right_rows: config.dim,
                right_cols: config.dim,
            });
        }
        matrix.ensure_hermitian("DensityMatrix")?;
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > NORM_TOL || trace.im.abs() > NORM_TOL {
            return Err(Error::InvalidState {
                op: "DensityMatrix",
                reason: format!("trace = {trace}, expected 1"),
            });
        }
        let min_eig = eigh(&matrix)?.eigenvalues[0];
        if min_eig < -1e-10 {
            return Err(Error::InvalidState {
                op: "DensityMatrix",
                reason: format!("negative eigenvalue {min_eig:e}"),
            });
        }
        let rho = Self { config, matrix };
        let weight = rho.tail_weight();
        if weight > TAIL_EPS {
            return Err(Error::TailGuard {
                op: "DensityMatrix",
                weight,
                limit: TAIL_EPS,
                dim: config.dim,
            });
        }
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &StateVector) -> Self {
        let v = psi.amplitudes();
        let n = v.len();
        Self {
            config: psi.config,
            matrix: CMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj()),
        }
    }

    /// `Σ w_k |ψ_k⟩⟨ψ_k|` with non-negative weights summing to one.
    pub fn mixture(states: &[StateVector], weights: &[f64]) -> Result<Self> {
        if states.is_empty() || states.len() != weights.len() {
            return Err(Error::InvalidArgument {
                op: "mixture",
                reason: "need one weight per state and at least one state".into(),
            });
        }
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::InvalidArgument {
                op: "mixture",
                reason: "weights must be finite and non-negative".into(),
            });
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument {
                op: "mixture",
                reason: format!("weights sum to {total}, expected 1"),
            });
        }
        let config = states[0].config;
        if states.iter().any(|s| s.config != config) {
            return Err(Error::ConfigMismatch { op: "mixture" });
        }
        let mut matrix = CMatrix::zeros(config.dim, config.dim);
        for (s, &w) in states.iter().zip(weights) {
            matrix = &matrix + &(&DensityMatrix::from_pure(s).matrix * w);
        }
        Self::new(config, matrix)
    }

    /// Thermal state with mean occupation `nbar`, optionally displaced by
    /// `alpha`.
    pub fn thermal(config: &ModeConfig, nbar: f64, alpha: Complex) -> Result<Self> {
        config.validate()?;
        if !nbar.is_finite() || nbar < 0.0 {
            return Err(Error::InvalidArgument {
                op: "thermal",
                reason: format!("nbar must be finite and >= 0, got {nbar}"),
            });
        }
        let excitation = nbar + alpha.norm_sqr();
        if !config.admits_excitation(excitation) {
            return Err(excitation_guard("thermal", excitation, config.dim));
        }
        let work = working_dim(config.dim);
        let populations: Vec<f64> = if nbar == 0.0 {
            (0..work).map(|k| if k == 0 { 1.0 } else { 0.0 }).collect()
        } else {
            let ratio = nbar / (1.0 + nbar);
            (0..work)
                .map(|k| ratio.powi(k as i32) / (1.0 + nbar))
                .collect()
        };
        let mut rho = CMatrix::from_real_diag(&populations);
        if alpha != ZERO {
            let d = displacement_matrix(work, alpha);
            rho = &(&d * &rho) * &d.adjoint();
        }
        let dim = config.dim;
        // geometric weight beyond the working space plus the top kept levels
        let lost = if nbar == 0.0 {
            0.0
        } else {
            (nbar / (1.0 + nbar)).powi(work as i32)
        };
        let tail: f64 = (dim - TAIL_BUFFER.min(dim)..work)
            .map(|k| rho[(k, k)].re)
            .sum();
        let weight = tail + lost;
        if weight > TAIL_EPS {
            return Err(Error::TailGuard {
                op: "thermal",
                weight,
                limit: TAIL_EPS,
                dim,
            });
        }
        let trace: f64 = (0..dim).map(|k| rho[(k, k)].re).sum();
        let matrix = CMatrix::from_fn(dim, dim, |i, j| rho[(i, j)] / trace);
        Self::new(*config, matrix)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn tail_weight(&self) -> f64 {
        let d = self.config.dim;
        (d.saturating_sub(TAIL_BUFFER)..d)
            .map(|k| self.matrix[(k, k)].re)
            .sum()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }
}

impl QuantumState for DensityMatrix {
    fn config(&self) -> &ModeConfig {
        &self.config
    }

    fn expect(&self, a: &CMatrix) -> Result<Complex> {
        self.check_operator("expect", a)?;
        Ok(trace_of_product(&self.matrix, a))
    }

    fn correlation(&self, a: &CMatrix, b: &CMatrix) -> Result<Complex> {
        self.check_operator("correlation", a)?;
        self.check_operator("correlation", b)?;
        Ok(trace_of_product(&self.matrix.matmul(a)?, b))
    }

    fn is_mixed(&self) -> bool {
        true
    }
}

/// `Tr(XY)` without forming the product.
fn trace_of_product(x: &CMatrix, y: &CMatrix) -> Complex {
    let n = x.rows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += x[(i, j)] * y[(j, i)];
        }
    }
    acc
}

/// Either kind of state, for callers that decide at runtime.
#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl QuantumState for State {
    fn config(&self) -> &ModeConfig {
        match self {
            State::Pure(s) => s.config(),
            State::Mixed(s) => s.config(),
        }
    }

    fn expect(&self, a: &CMatrix) -> Result<Complex> {
        match self {
            State::Pure(s) => s.expect(a),
            State::Mixed(s) => s.expect(a),
        }
    }

    fn correlation(&self, a: &CMatrix, b: &CMatrix) -> Result<Complex> {
        match self {
            State::Pure(s) => s.correlation(a, b),
            State::Mixed(s) => s.correlation(a, b),
        }
    }

    fn is_mixed(&self) -> bool {
        matches!(self, State::Mixed(_))
    }
}

/// Displacement `α`, squeeze magnitude `r ≥ 0` and squeeze phase
/// `θ ∈ [0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianParams {
    pub alpha: Complex,
    pub r: f64,
    pub theta: f64,
}

impl GaussianParams {
    /// Validates finiteness and `r ≥ 0`; wraps `theta` into `[0, 2π)`.
    pub fn new(alpha: Complex, r: f64, theta: f64) -> Result<Self> {
        if !(alpha.re.is_finite() && alpha.im.is_finite() && r.is_finite() && theta.is_finite()) {
            return Err(Error::InvalidArgument {
                op: "GaussianParams",
                reason: "parameters must be finite".into(),
            });
        }
        if r < 0.0 {
            return Err(Error::InvalidArgument {
                op: "GaussianParams",
                reason: format!("squeeze magnitude must be >= 0, got {r}"),
            });
        }
        let mut theta = theta.rem_euclid(TAU);
        if theta >= TAU {
            theta = 0.0;
        }
        Ok(Self { alpha, r, theta })
    }

    pub fn coherent(alpha: Complex) -> Self {
        Self {
            alpha,
            r: 0.0,
            theta: 0.0,
        }
    }

    /// Mean excitation `|α|² + sinh² r`.
    pub fn excitation(&self) -> f64 {
        self.alpha.norm_sqr() + self.r.sinh().powi(2)
    }
}

pub fn vacuum(config: &ModeConfig) -> Result<StateVector> {
    fock_state(config, 0)
}

/// Number state `|k⟩`; requires `k < dim − buffer`.
pub fn fock_state(config: &ModeConfig, k: usize) -> Result<StateVector> {
    config.validate()?;
    if k + TAIL_BUFFER >= config.dim {
        return Err(excitation_guard("fock_state", k as f64, config.dim));
    }
    let mut amplitudes = vec![ZERO; config.dim];
    amplitudes[k] = ONE;
    StateVector::new(*config, amplitudes)
}

/// Glauber coherent state `exp(α a† − α* a)|0⟩`.
pub fn coherent(config: &ModeConfig, alpha: Complex) -> Result<StateVector> {
    config.validate()?;
    let excitation = alpha.norm_sqr();
    if !config.admits_excitation(excitation) {
        return Err(excitation_guard("coherent", excitation, config.dim));
    }
    let work = working_dim(config.dim);
    let mut v = basis(work, 0);
    v = apply_displacement(&*generators(work)?, alpha, v)?;
    project("coherent", config, v)
}

/// `D(α)·S(ζ)|0⟩` with `ζ = r·e^{iθ}` and `S(ζ) = exp((ζ* a² − ζ a†²)/2)`.
pub fn squeezed(config: &ModeConfig, params: &GaussianParams) -> Result<StateVector> {
    config.validate()?;
    let excitation = params.excitation();
    if !config.admits_excitation(excitation) {
        return Err(excitation_guard("squeezed", excitation, config.dim));
    }
    let work = working_dim(config.dim);
    let gens = generators(work)?;
    let mut v = basis(work, 0);
    if params.r != 0.0 {
        // S(r e^{iθ}) = R(θ/2) S(r) R(−θ/2), and R fixes the vacuum
        v = gens.squeeze.exp_i_apply(params.r, &v)?;
        rotate(&mut v, params.theta / 2.0);
    }
    v = apply_displacement(&gens, params.alpha, v)?;
    project("squeezed", config, v)
}

/// Normalized `Σ w_k |ψ_k⟩`.
pub fn superpose(states: &[StateVector], weights: &[Complex]) -> Result<StateVector> {
    if states.is_empty() || states.len() != weights.len() {
        return Err(Error::InvalidArgument {
            op: "superpose",
            reason: "need one weight per state and at least one state".into(),
        });
    }
    let config = states[0].config;
    if states.iter().any(|s| s.config != config) {
        return Err(Error::ConfigMismatch { op: "superpose" });
    }
    let mut sum = vec![ZERO; config.dim];
    for (s, &w) in states.iter().zip(weights) {
        for (acc, &c) in sum.iter_mut().zip(s.amplitudes()) {
            *acc += w * c;
        }
    }
    StateVector::normalized(config, sum).map_err(|e| match e {
        Error::InvalidState { reason, .. } => Error::InvalidState {
            op: "superpose",
            reason,
        },
        other => other,
    })
}

/// Runs `build` at `config.dim`, doubling the dimension (power-of-two
/// steps, up to [`MAX_AUTO_DIM`]) while the tail guard rejects the state.
pub fn fit_dim<T>(
    config: &ModeConfig,
    mut build: impl FnMut(&ModeConfig) -> Result<T>,
) -> Result<T> {
    let mut cfg = *config;
    loop {
        match build(&cfg) {
            Err(e @ (Error::TailGuard { .. } | Error::ExcitationGuard { .. }))
                if cfg.dim >= MAX_AUTO_DIM =>
            {
                return Err(e)
            }
            Err(Error::TailGuard { .. } | Error::ExcitationGuard { .. }) => {
                cfg.dim = (cfg.dim + 1).next_power_of_two().min(MAX_AUTO_DIM);
            }
            other => return other,
        }
    }
}

fn excitation_guard(op: &'static str, excitation: f64, dim: usize) -> Error {
    Error::ExcitationGuard {
        op,
        excitation,
        dim,
    }
}

fn working_dim(dim: usize) -> usize {
    2 * dim
}

fn basis(dim: usize, k: usize) -> Vec<Complex> {
    let mut v = vec![ZERO; dim];
    v[k] = ONE;
    v
}

/// `R(φ) = e^{iφn}` applied in place.
fn rotate(v: &mut [Complex], phi: f64) {
    if phi == 0.0 {
        return;
    }
    for (k, z) in v.iter_mut().enumerate() {
        *z *= Complex::from_polar(1.0, phi * k as f64);
    }
}

/// `D(α) = R(φ) D(|α|) R(−φ)` with `α = |α| e^{iφ}`.
fn apply_displacement(
    gens: &Generators,
    alpha: Complex,
    mut v: Vec<Complex>,
) -> Result<Vec<Complex>> {
    if alpha == ZERO {
        return Ok(v);
    }
    let (x, phi) = alpha.to_polar();
    rotate(&mut v, -phi);
    let mut v = gens.displacement.exp_i_apply(x, &v)?;
    rotate(&mut v, phi);
    Ok(v)
}

fn displacement_matrix(work: usize, alpha: Complex) -> CMatrix {
    let ladder = ladder_ops(&ModeConfig::new(work).expect("valid working dim")).expect("valid");
    let gen = &(&ladder.adag * alpha) - &(&ladder.a * alpha.conj());
    // exp(G) = exp(i·1·(−iG))
    let h = &gen * Complex::new(0.0, -1.0);
    crate::linalg::expm_skew(&h, 1.0).expect("displacement generator is Hermitian")
}

fn project(op: &'static str, config: &ModeConfig, v: Vec<Complex>) -> Result<StateVector> {
    let dim = config.dim;
    let discarded: f64 = v[dim..].iter().map(|z| z.norm_sqr()).sum();
    let tail: f64 = v[dim - TAIL_BUFFER.min(dim)..dim]
        .iter()
        .map(|z| z.norm_sqr())
        .sum();
    let weight = discarded + tail;
    if weight > TAIL_EPS {
        return Err(Error::TailGuard {
            op,
            weight,
            limit: TAIL_EPS,
            dim,
        });
    }
    StateVector::normalized(*config, v[..dim].to_vec())
}

/// Eigendecompositions of the unit displacement generator `i(a − a†)` and
/// the unit squeeze generator `−i(a² − a†²)/2`, shared per dimension.
struct Generators {
    displacement: EighResult,
    squeeze: EighResult,
}

fn generators(dim: usize) -> Result<Arc<Generators>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Generators>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(g) = cache.lock().expect("generator cache poisoned").get(&dim) {
        return Ok(Arc::clone(g));
    }
    let a = annihilation(dim);
    let adag = a.adjoint();
    let displacement = eigh(&(&(&a - &adag) * Complex::new(0.0, 1.0)))?;
    let a2 = &a * &a;
    let adag2 = &adag * &adag;
    let squeeze = eigh(&(&(&a2 - &adag2) * Complex::new(0.0, -0.5)))?;
    let gens = Arc::new(Generators {
        displacement,
        squeeze,
    });
    cache
        .lock()
        .expect("generator cache poisoned")
        .insert(dim, Arc::clone(&gens));
    Ok(gens)
}
