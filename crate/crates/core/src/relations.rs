//! Uncertainty-relation evaluators and the symplectic machinery behind the
//! trace-class relations.
//!
//! Every evaluator returns a [`RelationReport`] with `gap = lhs − rhs`.
//! A relation is *satisfied* when `gap ≥ −ε_rel·scale` and *saturated* when
//! `|gap| ≤ ε_sat·scale`, with `scale = max(|lhs|, |rhs|, 1)`.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::fock::{quadratures, QuantumState};
use crate::linalg::{char_coeffs, eigh, CMatrix, Complex};
use crate::moments::{
    commutator_matrix, commutator_mean, covariance, covariance_matrix, variance, CommutatorMatrix,
    CovarianceMatrix, Observable,
};

pub const EPS_REL: f64 = 1e-9;
pub const EPS_SAT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub sat: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rel: EPS_REL,
            sat: EPS_SAT,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelationReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub satisfied: bool,
    pub saturated: bool,
    /// Evaluated on a mixed state.
    pub mixed: bool,
}

impl RelationReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::with_tolerances(name, lhs, rhs, Tolerances::default())
    }

    pub fn with_tolerances(name: impl Into<String>, lhs: f64, rhs: f64, tol: Tolerances) -> Self {
        let mut report = Self {
            name: name.into(),
            lhs,
            rhs,
            gap: lhs - rhs,
            satisfied: false,
            saturated: false,
            mixed: false,
        };
        report.apply_tolerances(tol);
        report
    }

    /// Recomputes the verdict flags under different tolerances.
    pub fn apply_tolerances(&mut self, tol: Tolerances) {
        let scale = self.scale();
        self.satisfied = self.gap >= -tol.rel * scale;
        self.saturated = self.gap.abs() <= tol.sat * scale;
    }

    pub fn scale(&self) -> f64 {
        self.lhs.abs().max(self.rhs.abs()).max(1.0)
    }

    fn mixed(mut self, mixed: bool) -> Self {
        self.mixed = mixed;
        self
    }
}

impl fmt::Display for RelationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: lhs = {}, rhs = {}, gap = {} ({}{})",
            self.name,
            self.lhs,
            self.rhs,
            self.gap,
            if self.satisfied {
                "satisfied"
            } else {
                "VIOLATED"
            },
            if self.saturated { ", saturated" } else { "" }
        )
    }
}

fn check_pair(a: &CMatrix, b: &CMatrix) -> Result<()> {
    a.ensure_hermitian("relation")?;
    b.ensure_hermitian("relation")
}

/// `ΔA·ΔB ≥ |⟨[A, B]⟩|/2`.
pub fn heisenberg(state: &impl QuantumState, a: &CMatrix, b: &CMatrix) -> Result<RelationReport> {
    check_pair(a, b)?;
    let va = variance(a, state)?.max(0.0);
    let vb = variance(b, state)?.max(0.0);
    let comm = commutator_mean(a, b, state)?;
    Ok(
        RelationReport::new("heisenberg", (va * vb).sqrt(), comm.norm() / 2.0)
            .mixed(state.is_mixed()),
    )
}

/// `Var(A)·Var(B) − Cov²(A, B) ≥ |⟨[A, B]⟩/2|²`, i.e. `det σ ≥ |⟨[A,B]⟩/2|²`.
pub fn schrodinger(state: &impl QuantumState, a: &CMatrix, b: &CMatrix) -> Result<RelationReport> {
    check_pair(a, b)?;
    let va = variance(a, state)?;
    let vb = variance(b, state)?;
    let cov = covariance(a, b, state)?;
    let half = commutator_mean(a, b, state)?.norm() / 2.0;
    Ok(
        RelationReport::new("schrodinger", va * vb - cov * cov, half * half)
            .mixed(state.is_mixed()),
    )
}

/// `C_r(σ) ≥ C_r(C)` for `r = 1..n`, one report per `r`.
pub fn characteristic_ur(
    state: &impl QuantumState,
    obs: &[Observable],
) -> Result<Vec<RelationReport>> {
    let sigma = covariance_matrix(obs, state)?;
    let comm = commutator_matrix(obs, state)?;
    let lhs = char_coeffs(&sigma.to_cmatrix())?;
    let rhs = char_coeffs(&comm.to_cmatrix())?;
    Ok(lhs
        .iter()
        .zip(&rhs)
        .enumerate()
        .map(|(k, (&l, &r))| {
            RelationReport::new(format!("characteristic[r={}]", k + 1), l, r)
                .mixed(state.is_mixed())
        })
        .collect())
}

/// `Var(A) + Var(B) ≥ √(|⟨[A, B]⟩|² + 4·Cov²(A, B))`.
pub fn sum_ur(state: &impl QuantumState, a: &CMatrix, b: &CMatrix) -> Result<RelationReport> {
    check_pair(a, b)?;
    let va = variance(a, state)?;
    let vb = variance(b, state)?;
    let cov = covariance(a, b, state)?;
    let comm = commutator_mean(a, b, state)?.norm();
    let rhs = (comm * comm + 4.0 * cov * cov).sqrt();
    Ok(RelationReport::new("sum", va + vb, rhs).mixed(state.is_mixed()))
}

/// `mω·Var(q) + Var(p)/(mω) ≥ ħ` for the canonical quadratures of the
/// state's mode.
pub fn canonical_sum(state: &impl QuantumState) -> Result<RelationReport> {
    let cfg = *state.config();
    let quad = quadratures(&cfg)?;
    let mw = cfg.mass * cfg.omega;
    let lhs = mw * variance(&quad.q, state)? + variance(&quad.p, state)? / mw;
    Ok(RelationReport::new("canonical-sum", lhs, cfg.hbar).mixed(state.is_mixed()))
}

/// Two-state relation
/// `½[Var_ψ(q)Var_φ(p) + Var_φ(q)Var_ψ(p)] − |Cov_ψ(q,p)·Cov_φ(q,p)| ≥ ħ²/4`.
pub fn two_state_ur(psi: &impl QuantumState, phi: &impl QuantumState) -> Result<RelationReport> {
    if psi.config() != phi.config() {
        return Err(Error::ConfigMismatch { op: "two_state_ur" });
    }
    let cfg = *psi.config();
    let quad = quadratures(&cfg)?;
    let (q, p) = (&quad.q, &quad.p);
    let vq_psi = variance(q, psi)?;
    let vp_psi = variance(p, psi)?;
    let vq_phi = variance(q, phi)?;
    let vp_phi = variance(p, phi)?;
    let cov_psi = covariance(q, p, psi)?;
    let cov_phi = covariance(q, p, phi)?;
    let lhs = 0.5 * (vq_psi * vp_phi + vq_phi * vp_psi) - (cov_psi * cov_phi).abs();
    let rhs = cfg.hbar * cfg.hbar / 4.0;
    Ok(RelationReport::new("two-state", lhs, rhs).mixed(psi.is_mixed() || phi.is_mixed()))
}

/// Block symplectic form `J = [[0, −I], [I, 0]]` for `(q₁…q_N, p₁…p_N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticForm {
    pub n_modes: usize,
    pub matrix: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn new(n_modes: usize) -> Self {
        let dim = 2 * n_modes;
        let mut m = DMatrix::zeros(dim, dim);
        for j in 0..n_modes {
            m[(j, n_modes + j)] = -1.0;
            m[(n_modes + j, j)] = 1.0;
        }
        Self { n_modes, matrix: m }
    }
}

#[derive(Clone, Debug)]
pub struct WilliamsonResult {
    /// Symplectic `Λ` with `ΛσΛᵀ = diag(ν, ν)`.
    pub lambda: DMatrix<f64>,
    /// Symplectic eigenvalues, descending.
    pub nus: Vec<f64>,
}

/// Williamson diagonalization of a positive-definite `2N×2N` covariance
/// matrix.
///
/// With `K = σ^{-1/2} J σ^{-1/2}` (antisymmetric), an orthogonal `O` brings
/// `K` to `J·diag(1/ν, 1/ν)`; then `Λ = diag(√ν, √ν)·Oᵀ·σ^{-1/2}` satisfies
/// `ΛJΛᵀ = J` and `ΛσΛᵀ = diag(ν, ν)`. The columns of `O` are the real and
/// imaginary parts of the positive-eigenvalue eigenvectors of the Hermitian
/// matrix `iK`.
pub fn williamson(sigma: &CovarianceMatrix) -> Result<WilliamsonResult> {
    let dim = sigma.dim();
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(Error::InvalidArgument {
            op: "williamson",
            reason: format!("dimension must be even and positive, got {dim}"),
        });
    }
    let n = dim / 2;
    let eig = SymmetricEigen::new(sigma.matrix.clone());
    let max_eig = eig.eigenvalues.amax();
    let min_eig = eig.eigenvalues.min();
    if min_eig.is_nan() || min_eig <= 1e-14 * max_eig {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min_eig,
        });
    }
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let sigma_inv_half = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.transpose();
    let j = SymplecticForm::new(n).matrix;
    let k = &sigma_inv_half * &j * &sigma_inv_half;
    let ik = CMatrix::from_fn(dim, dim, |r, c| Complex::new(0.0, k[(r, c)]));
    let decomposition = eigh(&ik)?;

    let mut o = DMatrix::zeros(dim, dim);
    let mut nus = Vec::with_capacity(n);
    for mode in 0..n {
        // ascending positive eigenvalues d give descending ν = 1/d
        let col = n + mode;
        let d = decomposition.eigenvalues[col];
        nus.push(1.0 / d);
        let v: Vec<Complex> = (0..dim)
            .map(|r| decomposition.eigenvectors[(r, col)])
            .collect();
        let phase = gauge_phase(&v, mode);
        for (r, z) in v.iter().enumerate() {
            let z = z * phase;
            o[(r, mode)] = std::f64::consts::SQRT_2 * z.re;
            o[(r, n + mode)] = std::f64::consts::SQRT_2 * z.im;
        }
    }
    let scale = DMatrix::from_fn(
        dim,
        dim,
        |r, c| {
            if r == c {
                nus[r % n].sqrt()
            } else {
                0.0
            }
        },
    );
    let lambda = scale * o.transpose() * sigma_inv_half;
    Ok(WilliamsonResult { lambda, nus })
}

/// Phase that makes a reference component real and positive: the `q`-slot
/// of the mode when it is not small, otherwise the largest component.
fn gauge_phase(v: &[Complex], mode: usize) -> Complex {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = if v[mode].norm() >= 0.5 * max {
        mode
    } else {
        v.iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    };
    let z = v[pivot];
    if z.norm() == 0.0 {
        Complex::new(1.0, 0.0)
    } else {
        z.conj() / z.norm()
    }
}

/// Trace-class relation `Tr((iσJ)^{2k}) = 2^{1−2k} Σ_j |⟨[X'_j, X'_{N+j}]⟩|^{2k}`
/// with `X' = ΛX` from the Williamson transform of σ.
///
/// The primed commutator means come from `ΛCΛᵀ`, since
/// `⟨[X'_a, X'_b]⟩ = 2i (ΛCΛᵀ)_{ab}`. The report is read as an equality
/// check: `saturated` flags equality.
pub fn trace_class_ur(
    sigma: &CovarianceMatrix,
    comm: &CommutatorMatrix,
    k: usize,
) -> Result<RelationReport> {
    if k == 0 {
        return Err(Error::InvalidArgument {
            op: "trace_class_ur",
            reason: "k must be >= 1".into(),
        });
    }
    if sigma.dim() != comm.dim() {
        return Err(Error::DimensionMismatch {
            op: "trace_class_ur",
            left_rows: sigma.dim(),
            left_cols: sigma.dim(),
            right_rows: comm.dim(),
            right_cols: comm.dim(),
        });
    }
    let w = williamson(sigma)?;
    let n = sigma.dim() / 2;
    let j = SymplecticForm::new(n).matrix;
    let sj = &sigma.matrix * &j;
    let mut power = DMatrix::identity(2 * n, 2 * n);
    for _ in 0..2 * k {
        power = &power * &sj;
    }
    // (iσJ)^{2k} = (−1)^k (σJ)^{2k}
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let lhs = sign * power.trace();

    let primed = &w.lambda * &comm.matrix * w.lambda.transpose();
    let exponent = 2 * k as i32;
    let sum: f64 = (0..n)
        .map(|mode| (2.0 * primed[(mode, n + mode)]).abs().powi(exponent))
        .sum();
    let rhs = 2f64.powi(1 - exponent) * sum;
    Ok(RelationReport::new(format!("trace-class[k={k}]"), lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent, fock_state, squeezed, vacuum, GaussianParams, ModeConfig};
    use crate::linalg::ZERO;
    use std::f64::consts::{E, FRAC_PI_2};

    fn cfg() -> ModeConfig {
        ModeConfig::default()
    }

    fn sq(r: f64, theta: f64) -> crate::fock::StateVector {
        squeezed(&cfg(), &GaussianParams::new(ZERO, r, theta).unwrap()).unwrap()
    }

    #[test]
    fn report_flags() {
        let r = RelationReport::new("x", 1.0, 1.0 + 1e-7);
        assert!(!r.satisfied);
        assert!(r.saturated);
        let r = RelationReport::new("x", 2.0, 1.0);
        assert!(r.satisfied && !r.saturated);
        let r = RelationReport::new("x", 1.0, 1.0 + 1e-10);
        assert!(r.satisfied && r.saturated);
    }

    #[test]
    fn heisenberg_cases() {
        let quad = quadratures(&cfg()).unwrap();
        let r = heisenberg(&vacuum(&cfg()).unwrap(), &quad.q, &quad.p).unwrap();
        assert!((r.lhs - 0.5).abs() < 1e-12 && (r.rhs - 0.5).abs() < 1e-12 && r.saturated);

        let r = heisenberg(&sq(0.5, FRAC_PI_2), &quad.q, &quad.p).unwrap();
        assert!((r.lhs - 0.5 * 1f64.cosh()).abs() < 1e-8);
        assert!(r.satisfied && !r.saturated);

        let r = heisenberg(&fock_state(&cfg(), 1).unwrap(), &quad.q, &quad.p).unwrap();
        assert!((r.lhs - 1.5).abs() < 1e-12 && (r.rhs - 0.5).abs() < 1e-12);
    }

    #[test]
    fn schrodinger_cases() {
        let quad = quadratures(&cfg()).unwrap();
        let r = schrodinger(&vacuum(&cfg()).unwrap(), &quad.q, &quad.p).unwrap();
        assert!((r.lhs - 0.25).abs() < 1e-12 && r.saturated);

        let r = schrodinger(&sq(0.5, FRAC_PI_2), &quad.q, &quad.p).unwrap();
        assert!((r.lhs - 0.25).abs() < 1e-8 && r.saturated);

        let r = schrodinger(&fock_state(&cfg(), 1).unwrap(), &quad.q, &quad.p).unwrap();
        assert!((r.lhs - 2.25).abs() < 1e-12 && (r.rhs - 0.25).abs() < 1e-12);
        assert!(!r.saturated);
    }

    #[test]
    fn characteristic_vacuum_and_reduction() {
        let quad = quadratures(&cfg()).unwrap();
        let obs = [
            Observable::new("q", quad.q.clone()),
            Observable::new("p", quad.p.clone()),
        ];
        let vac = vacuum(&cfg()).unwrap();
        let reports = characteristic_ur(&vac, &obs).unwrap();
        assert_eq!(reports.len(), 2);
        assert_eq!(reports[0].rhs, 0.0);
        assert!((reports[1].lhs - 0.25).abs() < 1e-12 && (reports[1].rhs - 0.25).abs() < 1e-12);
        assert!(reports[1].saturated);

        let s = sq(0.3, 1.0);
        let ch = characteristic_ur(&s, &obs).unwrap();
        let sch = schrodinger(&s, &quad.q, &quad.p).unwrap();
        assert!((ch[1].lhs - sch.lhs).abs() < 1e-12);
        assert!((ch[1].rhs - sch.rhs).abs() < 1e-12);
    }

    #[test]
    fn sum_and_canonical_cases() {
        let quad = quadratures(&cfg()).unwrap();
        let r = sum_ur(&vacuum(&cfg()).unwrap(), &quad.q, &quad.p).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && r.saturated);

        let r = sum_ur(&sq(0.5, 0.0), &quad.q, &quad.p).unwrap();
        assert!((r.lhs - 1f64.cosh()).abs() < 1e-8 && (r.rhs - 1.0).abs() < 1e-8);

        let r = sum_ur(&sq(0.5, FRAC_PI_2), &quad.q, &quad.p).unwrap();
        assert!((r.lhs - 1f64.cosh()).abs() < 1e-8 && r.saturated);

        assert!(canonical_sum(&vacuum(&cfg()).unwrap()).unwrap().saturated);
        let r = canonical_sum(&sq(0.5, 0.0)).unwrap();
        assert!((r.lhs - 1f64.cosh()).abs() < 1e-8);
        let r = canonical_sum(&coherent(&cfg(), Complex::new(2.0, 0.0)).unwrap()).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-9 && r.saturated);
    }

    #[test]
    fn two_state_cases() {
        let vac = vacuum(&cfg()).unwrap();
        let r = two_state_ur(&vac, &vac).unwrap();
        assert!((r.lhs - 0.25).abs() < 1e-12 && r.saturated);

        let r = two_state_ur(&vac, &sq(0.5, 0.0)).unwrap();
        let expected = 0.5 * (0.5 * E / 2.0 + (-1f64).exp() / 2.0 * 0.5);
        assert!((r.lhs - expected).abs() < 1e-8);
        assert!((r.lhs - 0.385770).abs() < 1e-5);

        let other = vacuum(&ModeConfig::new(32).unwrap()).unwrap();
        assert!(matches!(
            two_state_ur(&vac, &other),
            Err(Error::ConfigMismatch { .. })
        ));
    }

    #[test]
    fn symplectic_form_properties() {
        for n in 1..4 {
            let j = SymplecticForm::new(n).matrix;
            let dim = 2 * n;
            assert_eq!(&j * &j, -DMatrix::<f64>::identity(dim, dim));
            assert_eq!(j.transpose(), -j);
        }
    }

    #[test]
    fn williamson_small_cases() {
        let half = CovarianceMatrix::unlabeled(DMatrix::identity(2, 2) * 0.5).unwrap();
        let w = williamson(&half).unwrap();
        assert!((w.nus[0] - 0.5).abs() < 1e-12);
        assert!((&w.lambda - DMatrix::identity(2, 2)).amax() < 1e-12);

        let s = CovarianceMatrix::unlabeled(DMatrix::from_diagonal(&nalgebra::dvector![
            (-1f64).exp() / 2.0,
            E / 2.0
        ]))
        .unwrap();
        let w = williamson(&s).unwrap();
        assert!((w.nus[0] - 0.5).abs() < 1e-12);
        let expected = DMatrix::from_diagonal(&nalgebra::dvector![0.5f64.exp(), (-0.5f64).exp()]);
        assert!((&w.lambda - expected).amax() < 1e-10, "{}", w.lambda);
    }

    #[test]
    fn williamson_errors() {
        let odd = CovarianceMatrix::unlabeled(DMatrix::identity(3, 3)).unwrap();
        assert!(williamson(&odd).is_err());
        let singular =
            CovarianceMatrix::unlabeled(DMatrix::from_diagonal(&nalgebra::dvector![1.0, 0.0]))
                .unwrap();
        assert!(matches!(
            williamson(&singular),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn trace_class_single_mode() {
        let c = CommutatorMatrix::canonical(1, 1.0);
        let vac = CovarianceMatrix::unlabeled(DMatrix::identity(2, 2) * 0.5).unwrap();
        let r = trace_class_ur(&vac, &c, 1).unwrap();
        assert!((r.lhs - 0.5).abs() < 1e-14 && (r.rhs - 0.5).abs() < 1e-12 && r.saturated);
        let r = trace_class_ur(&vac, &c, 2).unwrap();
        assert!((r.lhs - 0.125).abs() < 1e-14 && (r.rhs - 0.125).abs() < 1e-12);
        assert!(trace_class_ur(&vac, &c, 0).is_err());
    }
}
