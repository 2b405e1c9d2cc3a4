//! Time evolution under the degenerate parametric amplifier Hamiltonian
//! `H = ħω(a†a + ½) + (ħχ/2)(e^{iφ}a² + e^{−iφ}a†²)`.
//!
//! `H` is time independent, so one eigendecomposition serves every time
//! point: `ψ(t) = V·e^{−iΛt/ħ}·V†·ψ(0)`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fock::{ladder_ops, quadratures, ModeConfig, QuantumState, StateVector};
use crate::linalg::{eigh, CMatrix, Complex, EighResult};
use crate::moments::{commutator_mean, covariance, variance};

pub const TRAJECTORY_HEADER: &str = "t,var_q,var_p,cov_qp,det_sigma,schrodinger_gap,heisenberg_gap";

#[derive(Clone, Debug, PartialEq)]
pub struct DpaConfig {
    pub mode: ModeConfig,
    /// Coupling in units of ω.
    pub chi: f64,
    pub pump_phase: f64,
    /// Ascending sample times in units of 1/ω.
    pub times: Vec<f64>,
}

impl DpaConfig {
    pub fn new(mode: ModeConfig, chi: f64, pump_phase: f64, times: Vec<f64>) -> Result<Self> {
        let cfg = Self {
            mode,
            chi,
            pump_phase,
            times,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// ω = 1, χ = 0.2, φ = 0, 201 points over `[0, 2]`, dim 128. The values
    /// are illustrative, not fitted to any experiment.
    pub fn illustrative() -> Self {
        Self {
            mode: ModeConfig::new(128).expect("valid"),
            chi: 0.2,
            pump_phase: 0.0,
            times: uniform_times(2.0, 200).expect("valid"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.mode.validate()?;
        let bad = |reason: String| Error::InvalidArgument {
            op: "DpaConfig",
            reason,
        };
        if !self.chi.is_finite() || !self.pump_phase.is_finite() {
            return Err(bad("chi and pump_phase must be finite".into()));
        }
        if self.times.is_empty() {
            return Err(bad("times must be non-empty".into()));
        }
        if self.times.iter().any(|t| !t.is_finite()) || self.times[0] < 0.0 {
            return Err(bad("times must be finite and start at t >= 0".into()));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(bad("times must be strictly ascending".into()));
        }
        Ok(())
    }
}

/// `steps + 1` equally spaced points on `[0, t_max]`.
pub fn uniform_times(t_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::InvalidArgument {
            op: "uniform_times",
            reason: "steps must be >= 1".into(),
        });
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::InvalidArgument {
            op: "uniform_times",
            reason: format!("t_max must be positive, got {t_max}"),
        });
    }
    Ok((0..=steps)
        .map(|k| t_max * k as f64 / steps as f64)
        .collect())
}

pub fn dpa_hamiltonian(cfg: &DpaConfig) -> Result<CMatrix> {
    cfg.validate()?;
    let m = &cfg.mode;
    let ops = ladder_ops(m)?;
    let hw = m.hbar * m.omega;
    let free = CMatrix::from_real_diag(
        &(0..m.dim)
            .map(|k| hw * (k as f64 + 0.5))
            .collect::<Vec<_>>(),
    );
    if cfg.chi == 0.0 {
        return Ok(free);
    }
    let pump = Complex::from_polar(1.0, cfg.pump_phase);
    let a2 = &ops.a * &ops.a;
    let adag2 = &ops.adag * &ops.adag;
    let coupling = &(&(&a2 * pump) + &(&adag2 * pump.conj())) * (m.hbar * cfg.chi * m.omega / 2.0);
    Ok(&free + &coupling)
}

/// Cached `exp(−iHt/ħ)` for a fixed Hermitian `H`.
#[derive(Clone, Debug)]
pub struct Propagator {
    eig: EighResult,
    hbar: f64,
}

impl Propagator {
    pub fn new(h: &CMatrix, hbar: f64) -> Result<Self> {
        Ok(Self {
            eig: eigh(h)?,
            hbar,
        })
    }

    /// `exp(−iHt/ħ)|ψ⟩`; fails if the evolved state leaks into the top
    /// levels.
    pub fn apply(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        let amplitudes = self.eig.exp_i_apply(-t / self.hbar, state.amplitudes())?;
        StateVector::new(*state.config(), amplitudes).map_err(|e| match e {
            Error::TailGuard {
                weight, limit, dim, ..
            } => Error::TailGuard {
                op: "evolve",
                weight,
                limit,
                dim,
            },
            other => other,
        })
    }
}

pub fn evolve(state: &StateVector, h: &CMatrix, t: f64) -> Result<StateVector> {
    Propagator::new(h, state.config().hbar)?.apply(state, t)
}

/// Per-time second moments of `(q, p)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MomentTrajectory {
    pub times: Vec<f64>,
    pub var_q: Vec<f64>,
    pub var_p: Vec<f64>,
    pub cov_qp: Vec<f64>,
    pub det_sigma: Vec<f64>,
    pub schrodinger_gap: Vec<f64>,
    pub heisenberg_gap: Vec<f64>,
    /// `|‖ψ(t)‖ − 1|`.
    pub norm_drift: Vec<f64>,
}

impl MomentTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_abs_cov(&self) -> f64 {
        max_abs(&self.cov_qp)
    }

    pub fn max_heisenberg_gap(&self) -> f64 {
        self.heisenberg_gap
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max_t |det σ(t) − ħ²/4|`.
    pub fn max_det_deviation(&self, hbar: f64) -> f64 {
        self.det_sigma
            .iter()
            .map(|d| (d - hbar * hbar / 4.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_norm_drift(&self) -> f64 {
        max_abs(&self.norm_drift)
    }

    /// CSV with [`TRAJECTORY_HEADER`], 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.len() + 1));
        out.push_str(TRAJECTORY_HEADER);
        out.push('\n');
        for k in 0..self.len() {
            let row = [
                self.times[k],
                self.var_q[k],
                self.var_p[k],
                self.cov_qp[k],
                self.det_sigma[k],
                self.schrodinger_gap[k],
                self.heisenberg_gap[k],
            ];
            let cells: Vec<String> = row.iter().map(|&x| format_sig17(x)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::write(path, self.to_csv())
    }
}

fn max_abs(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Fixed 17-significant-digit scientific notation, independent of locale.
pub fn format_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn moment_trajectory(cfg: &DpaConfig, initial: &StateVector) -> Result<MomentTrajectory> {
    cfg.validate()?;
    if *initial.config() != cfg.mode {
        return Err(Error::ConfigMismatch {
            op: "moment_trajectory",
        });
    }
    let h = dpa_hamiltonian(cfg)?;
    let propagator = Propagator::new(&h, cfg.mode.hbar)?;
    let quad = quadratures(&cfg.mode)?;
    let (q, p) = (&quad.q, &quad.p);
    let mut traj = MomentTrajectory::default();
    for &t in &cfg.times {
        let psi = if t == 0.0 {
            initial.clone()
        } else {
            propagator.apply(initial, t)?
        };
        let vq = variance(q, &psi)?;
        let vp = variance(p, &psi)?;
        let cov = covariance(q, p, &psi)?;
        let half = commutator_mean(q, p, &psi)?.norm() / 2.0;
        let det = vq * vp - cov * cov;
        traj.times.push(t);
        traj.var_q.push(vq);
        traj.var_p.push(vp);
        traj.cov_qp.push(cov);
        traj.det_sigma.push(det);
        traj.schrodinger_gap.push(det - half * half);
        traj.heisenberg_gap
            .push((vq.max(0.0) * vp.max(0.0)).sqrt() - half);
        traj.norm_drift.push((psi.norm() - 1.0).abs());
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent, vacuum};
    use crate::linalg::ONE;
    use std::f64::consts::PI;

    fn mode() -> ModeConfig {
        ModeConfig::new(64).unwrap()
    }

    fn dpa(chi: f64, phase: f64) -> DpaConfig {
        DpaConfig::new(mode(), chi, phase, uniform_times(2.0, 20).unwrap()).unwrap()
    }

    #[test]
    fn free_hamiltonian_is_diagonal() {
        let h = dpa_hamiltonian(&dpa(0.0, 0.0)).unwrap();
        for k in 0..64 {
            assert_eq!(h[(k, k)].re, k as f64 + 0.5);
        }
        assert_eq!(h.max_abs(), 63.5);
    }

    #[test]
    fn vacuum_energy_independent_of_chi() {
        let vac = vacuum(&mode()).unwrap();
        for chi in [0.0, 0.2, 0.7] {
            let h = dpa_hamiltonian(&dpa(chi, 1.0)).unwrap();
            let e = vac.expect(&h).unwrap();
            assert!((e - 0.5).norm() < 1e-15);
        }
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let h = dpa_hamiltonian(&dpa(0.2, PI / 3.0)).unwrap();
        assert!(h.is_hermitian());
    }

    #[test]
    fn evolve_identity_and_reversal() {
        let psi = coherent(&mode(), Complex::new(1.0, 0.3)).unwrap();
        let h = dpa_hamiltonian(&dpa(0.2, 0.4)).unwrap();
        let same = evolve(&psi, &h, 0.0).unwrap();
        let overlap = psi.inner(&same).unwrap();
        assert!((overlap - ONE).norm() < 1e-12);

        let prop = Propagator::new(&h, 1.0).unwrap();
        let fwd = prop.apply(&psi, 1.3).unwrap();
        assert!((fwd.norm() - 1.0).abs() < 1e-9);
        let back = prop.apply(&fwd, -1.3).unwrap();
        for (a, b) in back.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn free_evolution_keeps_coherent_moments() {
        let psi = coherent(&mode(), ONE).unwrap();
        let traj = moment_trajectory(&dpa(0.0, 0.0), &psi).unwrap();
        assert!(traj.max_abs_cov() <= 1e-8);
        for k in 0..traj.len() {
            assert!((traj.var_q[k] - 0.5).abs() < 1e-9);
            assert!((traj.var_p[k] - 0.5).abs() < 1e-9);
            assert!((traj.det_sigma[k] - 0.25).abs() < 1e-9);
        }
    }

    #[test]
    fn first_row_is_static_moments() {
        let psi = coherent(&mode(), ONE).unwrap();
        let traj = moment_trajectory(&dpa(0.2, 0.0), &psi).unwrap();
        let quad = quadratures(&mode()).unwrap();
        assert_eq!(traj.times[0], 0.0);
        assert_eq!(traj.var_q[0], variance(&quad.q, &psi).unwrap());
        assert_eq!(traj.cov_qp[0], covariance(&quad.q, &quad.p, &psi).unwrap());
    }

    #[test]
    fn config_validation() {
        assert!(DpaConfig::new(mode(), 0.2, 0.0, vec![]).is_err());
        assert!(DpaConfig::new(mode(), 0.2, 0.0, vec![1.0, 0.5]).is_err());
        assert!(DpaConfig::new(mode(), 0.2, 0.0, vec![-1.0, 0.5]).is_err());
        assert!(uniform_times(2.0, 0).is_err());
        assert_eq!(
            uniform_times(2.0, 4).unwrap(),
            vec![0.0, 0.5, 1.0, 1.5, 2.0]
        );
        let psi = coherent(&ModeConfig::new(32).unwrap(), ONE).unwrap();
        assert!(matches!(
            moment_trajectory(&dpa(0.2, 0.0), &psi),
            Err(Error::ConfigMismatch { .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let psi = coherent(&mode(), ONE).unwrap();
        let cfg = DpaConfig::new(mode(), 0.2, 0.0, vec![0.0, 0.5]).unwrap();
        let csv = moment_trajectory(&cfg, &psi).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], TRAJECTORY_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0.0000000000000000e0,"));
        assert_eq!(lines[1].split(',').count(), 7);
    }
}
