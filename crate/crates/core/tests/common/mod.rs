#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use uncertainty_lab::fock::{DensityMatrix, ModeConfig, StateVector};
use uncertainty_lab::{CMatrix, Complex};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, bound: f64) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| {
        Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let h = &(&a + &a.adjoint()) * 0.5;
    let norm = h.frobenius_norm();
    &h * (bound * rng.gen_range(0.1..1.0) / norm)
}

/// Random normalized state supported on the lowest `support` levels.
pub fn random_state(rng: &mut ChaCha8Rng, cfg: &ModeConfig, support: usize) -> StateVector {
    let mut amps = vec![Complex::new(0.0, 0.0); cfg.dim];
    for z in amps.iter_mut().take(support) {
        *z = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    StateVector::normalized(*cfg, amps).unwrap()
}

pub fn random_mixed(
    rng: &mut ChaCha8Rng,
    cfg: &ModeConfig,
    rank: usize,
    support: usize,
) -> DensityMatrix {
    let states: Vec<StateVector> = (0..rank).map(|_| random_state(rng, cfg, support)).collect();
    let mut weights: Vec<f64> = (0..rank).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    DensityMatrix::mixture(&states, &weights).unwrap()
}

/// Real symplectic matrix in `(q₁..q_N, p₁..p_N)` ordering, built as a
/// product of random phase-space rotations, single-mode squeezers and
/// beam splitters.
pub fn random_symplectic(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let dim = 2 * n;
    let mut s = DMatrix::<f64>::identity(dim, dim);
    for _ in 0..3 {
        for j in 0..n {
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let mut rot = DMatrix::<f64>::identity(dim, dim);
            rot[(j, j)] = phi.cos();
            rot[(j, n + j)] = -phi.sin();
            rot[(n + j, j)] = phi.sin();
            rot[(n + j, n + j)] = phi.cos();
            let r: f64 = rng.gen_range(-0.8..0.8);
            let mut sq = DMatrix::<f64>::identity(dim, dim);
            sq[(j, j)] = (-r).exp();
            sq[(n + j, n + j)] = r.exp();
            s = sq * rot * s;
        }
        for j in 0..n.saturating_sub(1) {
            let t: f64 = rng.gen_range(0.0..std::f64::consts::PI);
            let mut bs = DMatrix::<f64>::identity(dim, dim);
            for off in [0, n] {
                let (a, b) = (off + j, off + j + 1);
                bs[(a, a)] = t.cos();
                bs[(a, b)] = t.sin();
                bs[(b, a)] = -t.sin();
                bs[(b, b)] = t.cos();
            }
            s = bs * s;
        }
    }
    s
}

pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(k, n + k)] = -1.0;
        j[(n + k, k)] = 1.0;
    }
    j
}

/// Elementary symmetric polynomials `e_1..e_n` by the product recurrence.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (i, &x) in values.iter().enumerate() {
        for r in (1..=i + 1).rev() {
            e[r] += x * e[r - 1];
        }
    }
    e[1..].to_vec()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
