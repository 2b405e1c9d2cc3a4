//! Second-order quantum-statistical moments.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::QuantumState;
use crate::linalg::{CMatrix, Complex};

/// Imaginary residues on nominally real quantities above this (relative)
/// bound are reported as errors instead of being discarded.
pub const REAL_TOL: f64 = 1e-8;

/// A named Hermitian operator.
#[derive(Clone, Debug)]
pub struct Observable {
    pub label: String,
    pub op: CMatrix,
}

impl Observable {
    pub fn new(label: impl Into<String>, op: CMatrix) -> Self {
        Self {
            label: label.into(),
            op,
        }
    }
}

/// Symmetric covariance matrix σ of a list of observables.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    pub labels: Vec<String>,
    pub matrix: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Validates squareness, symmetry and non-negative diagonal.
    pub fn new(labels: Vec<String>, matrix: DMatrix<f64>) -> Result<Self> {
        check_square_real("CovarianceMatrix", &matrix)?;
        if labels.len() != matrix.nrows() {
            return Err(Error::BadLength {
                expected: matrix.nrows(),
                got: labels.len(),
            });
        }
        let n = matrix.nrows();
        let scale = matrix.amax().max(1.0);
        for i in 0..n {
            if matrix[(i, i)] < -1e-10 * scale {
                return Err(Error::InvalidArgument {
                    op: "CovarianceMatrix",
                    reason: format!("negative variance {} at index {i}", matrix[(i, i)]),
                });
            }
            for j in 0..i {
                if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-10 * scale {
                    return Err(Error::InvalidArgument {
                        op: "CovarianceMatrix",
                        reason: format!("not symmetric at ({i}, {j})"),
                    });
                }
            }
        }
        Ok(Self { labels, matrix })
    }

    /// Generic labels `X1, X2, …`.
    pub fn unlabeled(matrix: DMatrix<f64>) -> Result<Self> {
        let labels = (1..=matrix.nrows()).map(|k| format!("X{k}")).collect();
        Self::new(labels, matrix)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn to_cmatrix(&self) -> CMatrix {
        CMatrix::from_nalgebra_real(&self.matrix)
    }
}

/// Antisymmetric commutator matrix `C_jk = −(i/2)⟨[X_j, X_k]⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorMatrix {
    pub labels: Vec<String>,
    pub matrix: DMatrix<f64>,
}

impl CommutatorMatrix {
    /// Validates antisymmetry and a zero diagonal.
    pub fn new(labels: Vec<String>, matrix: DMatrix<f64>) -> Result<Self> {
        check_square_real("CommutatorMatrix", &matrix)?;
        if labels.len() != matrix.nrows() {
            return Err(Error::BadLength {
                expected: matrix.nrows(),
                got: labels.len(),
            });
        }
        let n = matrix.nrows();
        let scale = matrix.amax().max(1.0);
        for i in 0..n {
            if matrix[(i, i)].abs() > 1e-10 * scale {
                return Err(Error::InvalidArgument {
                    op: "CommutatorMatrix",
                    reason: format!("non-zero diagonal at index {i}"),
                });
            }
            for j in 0..i {
                if (matrix[(i, j)] + matrix[(j, i)]).abs() > 1e-10 * scale {
                    return Err(Error::InvalidArgument {
                        op: "CommutatorMatrix",
                        reason: format!("not antisymmetric at ({i}, {j})"),
                    });
                }
            }
        }
        Ok(Self { labels, matrix })
    }

    /// Canonical commutator matrix for `N` modes in `(q₁…q_N, p₁…p_N)`
    /// ordering: `C_{q_j p_j} = ħ/2`.
    pub fn canonical(n_modes: usize, hbar: f64) -> Self {
        let dim = 2 * n_modes;
        let mut m = DMatrix::zeros(dim, dim);
        for j in 0..n_modes {
            m[(j, n_modes + j)] = hbar / 2.0;
            m[(n_modes + j, j)] = -hbar / 2.0;
        }
        let labels = (1..=n_modes)
            .map(|j| format!("q{j}"))
            .chain((1..=n_modes).map(|j| format!("p{j}")))
            .collect();
        Self { labels, matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn to_cmatrix(&self) -> CMatrix {
        CMatrix::from_nalgebra_real(&self.matrix)
    }
}

fn check_square_real(op: &'static str, m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            op,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if !m.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite { op });
    }
    Ok(())
}

/// Quantum mean value `⟨A⟩` (pure: `⟨ψ|A|ψ⟩`, mixed: `Tr(ρA)`).
pub fn expect(a: &CMatrix, state: &impl QuantumState) -> Result<Complex> {
    state.expect(a)
}

/// `⟨A⟩` for Hermitian `A`, with the imaginary residue checked.
pub fn expect_real(a: &CMatrix, state: &impl QuantumState) -> Result<f64> {
    let z = state.expect(a)?;
    real_part("expect", z)
}

fn real_part(op: &'static str, z: Complex) -> Result<f64> {
    if z.im.abs() > REAL_TOL * z.re.abs().max(1.0) {
        return Err(Error::NotReal {
            op,
            residue: z.im.abs(),
        });
    }
    Ok(z.re)
}

/// `Cov(A, B) = ⟨AB + BA⟩/2 − ⟨A⟩⟨B⟩`; symmetric in `A, B` bit-for-bit.
pub fn covariance(a: &CMatrix, b: &CMatrix, state: &impl QuantumState) -> Result<f64> {
    a.ensure_hermitian("covariance")?;
    b.ensure_hermitian("covariance")?;
    covariance_unchecked(a, b, state)
}

fn covariance_unchecked(a: &CMatrix, b: &CMatrix, state: &impl QuantumState) -> Result<f64> {
    let ab = state.correlation(a, b)?;
    let ba = state.correlation(b, a)?;
    let sym = real_part("covariance", (ab + ba) * 0.5)?;
    let mean_a = real_part("covariance", state.expect(a)?)?;
    let mean_b = real_part("covariance", state.expect(b)?)?;
    Ok(sym - mean_a * mean_b)
}

/// `Var(A) = Cov(A, A)`.
pub fn variance(a: &CMatrix, state: &impl QuantumState) -> Result<f64> {
    covariance(a, a, state)
}

/// `⟨[A, B]⟩`, purely imaginary for Hermitian `A, B`.
pub fn commutator_mean(a: &CMatrix, b: &CMatrix, state: &impl QuantumState) -> Result<Complex> {
    Ok(state.correlation(a, b)? - state.correlation(b, a)?)
}

/// `−(i/2)⟨[A, B]⟩` as a real number; errors when `⟨[A, B]⟩` has a real
/// part beyond tolerance.
pub fn half_commutator(a: &CMatrix, b: &CMatrix, state: &impl QuantumState) -> Result<f64> {
    let m = commutator_mean(a, b, state)?;
    if m.re.abs() > REAL_TOL * m.im.abs().max(1.0) {
        return Err(Error::NotReal {
            op: "commutator_matrix",
            residue: m.re.abs(),
        });
    }
    Ok(m.im / 2.0)
}

fn check_observables(op: &'static str, obs: &[Observable]) -> Result<()> {
    for o in obs {
        o.op.ensure_hermitian(op)?;
    }
    Ok(())
}

/// σ_jk = ⟨(X_jX_k + X_kX_j)/2⟩ − ⟨X_j⟩⟨X_k⟩.
pub fn covariance_matrix(
    obs: &[Observable],
    state: &impl QuantumState,
) -> Result<CovarianceMatrix> {
    check_observables("covariance_matrix", obs)?;
    let n = obs.len();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            let c = covariance_unchecked(&obs[j].op, &obs[k].op, state)?;
            m[(j, k)] = c;
            m[(k, j)] = c;
        }
    }
    Ok(CovarianceMatrix {
        labels: obs.iter().map(|o| o.label.clone()).collect(),
        matrix: m,
    })
}

/// C_jk = −(i/2)⟨[X_j, X_k]⟩; exactly antisymmetric with zero diagonal.
pub fn commutator_matrix(
    obs: &[Observable],
    state: &impl QuantumState,
) -> Result<CommutatorMatrix> {
    check_observables("commutator_matrix", obs)?;
    let n = obs.len();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in j + 1..n {
            let c = half_commutator(&obs[j].op, &obs[k].op, state)?;
            m[(j, k)] = c;
            m[(k, j)] = -c;
        }
    }
    Ok(CommutatorMatrix {
        labels: obs.iter().map(|o| o.label.clone()).collect(),
        matrix: m,
    })
}

/// Quantum covariance function `⟨AB⟩ − ⟨A⟩⟨B⟩`: the real part is
/// `Cov(A, B)` and the imaginary part is `−(i/2)⟨[A, B]⟩`.
pub fn qcf(a: &CMatrix, b: &CMatrix, state: &impl QuantumState) -> Result<Complex> {
    a.ensure_hermitian("qcf")?;
    b.ensure_hermitian("qcf")?;
    let ab = state.correlation(a, b)?;
    let mean_a = real_part("qcf", state.expect(a)?)?;
    let mean_b = real_part("qcf", state.expect(b)?)?;
    Ok(ab - mean_a * mean_b)
}
