//! Scans over the displaced-squeezed family, derivative-free gap
//! minimization and the coherent / squeezed / covariance classification of
//! minimum-uncertainty states.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::dynamics::format_sig17;
use crate::error::{Error, Result};
use crate::fock::{fit_dim, quadratures, squeezed, GaussianParams, ModeConfig, QuantumState};
use crate::linalg::Complex;
use crate::moments::{covariance, variance};
use crate::relations::{heisenberg, schrodinger, sum_ur, RelationReport, Tolerances};

pub const SCAN_HEADER: &str = "alpha_re,alpha_im,r,theta,objective,label";
/// Relative threshold for "nonzero" covariance and variance asymmetry.
pub const EPS_COV: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassLabel {
    Coherent,
    Squeezed,
    Covariance,
    NotMinimal,
}

impl ClassLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::Coherent => "coherent",
            ClassLabel::Squeezed => "squeezed",
            ClassLabel::Covariance => "covariance",
            ClassLabel::NotMinimal => "not-minimal",
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify_smus(state: &impl QuantumState) -> Result<ClassLabel> {
    classify_smus_with(state, Tolerances::default())
}

/// Not saturating the Schrödinger relation gives `not-minimal`; otherwise a
/// nonzero `Cov(q, p)` gives `covariance`, unequal scaled variances give
/// `squeezed`, and the rest are `coherent`.
pub fn classify_smus_with(state: &impl QuantumState, tol: Tolerances) -> Result<ClassLabel> {
    let cfg = *state.config();
    let quad = quadratures(&cfg)?;
    let mut report = schrodinger(state, &quad.q, &quad.p)?;
    report.apply_tolerances(tol);
    if !report.saturated {
        return Ok(ClassLabel::NotMinimal);
    }
    let mw = cfg.mass * cfg.omega;
    let vq = mw * variance(&quad.q, state)?;
    let vp = variance(&quad.p, state)? / mw;
    let cov = covariance(&quad.q, &quad.p, state)?;
    let eps = EPS_COV * vq.abs().max(vp.abs());
    Ok(if cov.abs() > eps {
        ClassLabel::Covariance
    } else if (vq - vp).abs() > eps {
        ClassLabel::Squeezed
    } else {
        ClassLabel::Coherent
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GapKind {
    Schrodinger,
    Heisenberg,
    Sum,
}

impl GapKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GapKind::Schrodinger => "schrodinger",
            GapKind::Heisenberg => "heisenberg",
            GapKind::Sum => "sum",
        }
    }

    /// The named relation for `(q, p)` on `state`.
    pub fn report(self, state: &impl QuantumState) -> Result<RelationReport> {
        let quad = quadratures(state.config())?;
        match self {
            GapKind::Schrodinger => schrodinger(state, &quad.q, &quad.p),
            GapKind::Heisenberg => heisenberg(state, &quad.q, &quad.p),
            GapKind::Sum => sum_ur(state, &quad.q, &quad.p),
        }
    }
}

impl fmt::Display for GapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "schrodinger" => Ok(GapKind::Schrodinger),
            "heisenberg" => Ok(GapKind::Heisenberg),
            "sum" => Ok(GapKind::Sum),
            other => Err(Error::InvalidArgument {
                op: "GapKind",
                reason: format!(
                    "unknown objective {other:?}; expected schrodinger, heisenberg or sum"
                ),
            }),
        }
    }
}

/// Report for `squeezed(params)`, built at the smallest admissible
/// power-of-two dimension at or above `config.dim`.
pub fn gap_report(
    kind: GapKind,
    params: &GaussianParams,
    config: &ModeConfig,
) -> Result<RelationReport> {
    let state = fit_dim(config, |cfg| squeezed(cfg, params))?;
    kind.report(&state)
}

pub fn gap_objective(kind: GapKind, params: &GaussianParams, config: &ModeConfig) -> Result<f64> {
    Ok(gap_report(kind, params, config)?.gap)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Initial simplex offset along each axis.
    pub initial_step: f64,
    /// Stop once the simplex values span at most this much...
    pub f_tol: f64,
    /// ...and its vertices lie within this distance of the best one.
    pub x_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            initial_step: 0.1,
            f_tol: 1e-12,
            x_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub params: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// False when the evaluation budget ran out first.
    pub converged: bool,
}

/// Nelder–Mead simplex descent with the standard coefficients
/// (reflection 1, expansion 2, contraction ½, shrink ½). Non-finite
/// objective values are treated as `+∞`.
pub fn minimize(
    mut objective: impl FnMut(&[f64]) -> f64,
    start: &[f64],
    options: &NelderMeadOptions,
) -> Result<Minimum> {
    let n = start.len();
    if n == 0 {
        return Err(Error::InvalidArgument {
            op: "minimize",
            reason: "start must have at least one coordinate".into(),
        });
    }
    if start.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument {
            op: "minimize",
            reason: "start must be finite".into(),
        });
    }
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = objective(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let f0 = eval(start, &mut evals);
    if !f0.is_finite() {
        return Err(Error::InvalidArgument {
            op: "minimize",
            reason: "objective is not finite at start".into(),
        });
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(start.to_vec(), f0)];
    for i in 0..n {
        let mut x = start.to_vec();
        let step = if x[i] != 0.0 {
            options.initial_step * x[i].abs().max(1.0)
        } else {
            options.initial_step
        };
        x[i] += step;
        let f = eval(&x, &mut evals);
        simplex.push((x, f));
    }

    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        a.iter()
            .zip(b)
            .map(|(&ai, &bi)| ai + t * (bi - ai))
            .collect()
    };

    let mut converged = false;
    loop {
        // Stable sort keeps ties in insertion order, so runs are reproducible.
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0];
        let f_span = simplex[n].1 - best.1;
        let x_span = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&best.0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if f_span <= options.f_tol && x_span <= options.x_tol {
            converged = true;
            break;
        }
        if evals >= options.max_evals {
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let reflected = combine(&centroid, &worst.0, -1.0);
        let fr = eval(&reflected, &mut evals);

        if fr < simplex[0].1 {
            let expanded = combine(&centroid, &worst.0, -2.0);
            let fe = eval(&expanded, &mut evals);
            simplex[n] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < worst.1 {
                let x = combine(&centroid, &reflected, 0.5);
                let f = eval(&x, &mut evals);
                (x, f)
            } else {
                let x = combine(&centroid, &worst.0, 0.5);
                let f = eval(&x, &mut evals);
                (x, f)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (contracted, fc);
            } else {
                let anchor = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let x = combine(&anchor, &vertex.0, 0.5);
                    let f = eval(&x, &mut evals);
                    *vertex = (x, f);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (params, value) = simplex.swap_remove(0);
    Ok(Minimum {
        params,
        value,
        evaluations: evals,
        converged,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanPoint {
    pub objective: f64,
    pub report: RelationReport,
    pub label: ClassLabel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    pub params: GaussianParams,
    pub outcome: std::result::Result<ScanPoint, String>,
}

/// Evaluates every grid point independently; failures are kept in place.
pub fn scan_grid(kind: GapKind, grid: &[GaussianParams], config: &ModeConfig) -> Vec<ScanResult> {
    scan_grid_with(kind, grid, config, Tolerances::default())
}

pub fn scan_grid_with(
    kind: GapKind,
    grid: &[GaussianParams],
    config: &ModeConfig,
    tol: Tolerances,
) -> Vec<ScanResult> {
    grid.iter()
        .map(|params| {
            let outcome = scan_point(kind, params, config, tol).map_err(|e| e.to_string());
            ScanResult {
                params: *params,
                outcome,
            }
        })
        .collect()
}

fn scan_point(
    kind: GapKind,
    params: &GaussianParams,
    config: &ModeConfig,
    tol: Tolerances,
) -> Result<ScanPoint> {
    let state = fit_dim(config, |cfg| squeezed(cfg, params))?;
    let mut report = kind.report(&state)?;
    report.apply_tolerances(tol);
    Ok(ScanPoint {
        objective: report.gap,
        label: classify_smus_with(&state, tol)?,
        report,
    })
}

/// `steps` equally spaced points on `[lo, hi]`; a single step yields `lo`.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// Cartesian product in `(alpha, r, theta)` order, `theta` varying fastest.
pub fn param_grid(alphas: &[Complex], rs: &[f64], thetas: &[f64]) -> Result<Vec<GaussianParams>> {
    let mut grid = Vec::with_capacity(alphas.len() * rs.len() * thetas.len());
    for &alpha in alphas {
        for &r in rs {
            for &theta in thetas {
                grid.push(GaussianParams::new(alpha, r, theta)?);
            }
        }
    }
    Ok(grid)
}

/// CSV with [`SCAN_HEADER`]; failed points get `NaN` and label `error`.
pub fn scan_csv(results: &[ScanResult]) -> String {
    let mut out = String::with_capacity(96 * (results.len() + 1));
    out.push_str(SCAN_HEADER);
    out.push('\n');
    for res in results {
        let p = &res.params;
        let (objective, label) = match &res.outcome {
            Ok(point) => (format_sig17(point.objective), point.label.as_str()),
            Err(_) => ("NaN".to_string(), "error"),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            format_sig17(p.alpha.re),
            format_sig17(p.alpha.im),
            format_sig17(p.r),
            format_sig17(p.theta),
            objective,
            label
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent, superpose};
    use crate::linalg::{I, ONE, ZERO};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn cfg() -> ModeConfig {
        ModeConfig::new(64).unwrap()
    }

    fn gp(alpha: Complex, r: f64, theta: f64) -> GaussianParams {
        GaussianParams::new(alpha, r, theta).unwrap()
    }

    fn label(alpha: Complex, r: f64, theta: f64) -> ClassLabel {
        let state = fit_dim(&cfg(), |c| squeezed(c, &gp(alpha, r, theta))).unwrap();
        classify_smus(&state).unwrap()
    }

    #[test]
    fn labels_of_reference_states() {
        assert_eq!(
            label(Complex::new(1.0, 0.5), 0.0, 0.0),
            ClassLabel::Coherent
        );
        assert_eq!(label(ZERO, 0.5, 0.0), ClassLabel::Squeezed);
        assert_eq!(label(ZERO, 0.5, FRAC_PI_2), ClassLabel::Covariance);
        let cat = superpose(
            &[
                coherent(&cfg(), Complex::new(2.0, 0.0)).unwrap(),
                coherent(&cfg(), Complex::new(-2.0, 0.0)).unwrap(),
            ],
            &[ONE, ONE],
        )
        .unwrap();
        assert_eq!(classify_smus(&cat).unwrap(), ClassLabel::NotMinimal);
    }

    #[test]
    fn heisenberg_gap_closed_form() {
        let gap = gap_objective(GapKind::Heisenberg, &gp(ZERO, 0.5, FRAC_PI_2), &cfg()).unwrap();
        // ΔqΔp = ½cosh(2r) at θ = π/2.
        let oracle = 0.5 * 1.0f64.cosh() - 0.5;
        assert!((gap - oracle).abs() < 1e-9, "{gap} vs {oracle}");
        assert!((gap - 0.271540).abs() < 1e-6);
        let coh = gap_objective(
            GapKind::Heisenberg,
            &gp(Complex::new(0.7, -1.1), 0.0, 2.0),
            &cfg(),
        )
        .unwrap();
        assert!(coh.abs() < 1e-9);
    }

    #[test]
    fn schrodinger_gap_vanishes_on_family() {
        for (a, r, t) in [
            (ZERO, 0.0, 0.0),
            (I, 0.8, 1.0),
            (Complex::new(-1.5, 1.0), 1.0, PI),
        ] {
            let gap = gap_objective(GapKind::Schrodinger, &gp(a, r, t), &cfg()).unwrap();
            assert!(gap.abs() < 1e-6, "{gap}");
        }
    }

    #[test]
    fn minimize_quadratic_bowl() {
        let m = minimize(
            |x| (x[0] - 2.0).powi(2),
            &[0.0],
            &NelderMeadOptions::default(),
        )
        .unwrap();
        assert!(m.converged);
        assert!((m.params[0] - 2.0).abs() < 1e-5);
    }

    #[test]
    fn minimize_rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = minimize(f, &[-1.2, 1.0], &NelderMeadOptions::default()).unwrap();
        assert!(m.converged);
        assert!((m.params[0] - 1.0).abs() < 1e-4 && (m.params[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn minimize_budget_and_errors() {
        let opts = NelderMeadOptions {
            max_evals: 10,
            ..Default::default()
        };
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = minimize(f, &[-1.2, 1.0], &opts).unwrap();
        assert!(!m.converged);
        assert!(m.value <= f(&[-1.2, 1.0]));
        assert!(minimize(|x| x[0], &[], &opts).is_err());
        assert!(minimize(|_| f64::NAN, &[1.0], &opts).is_err());
    }

    #[test]
    fn minimize_heisenberg_gap_over_r() {
        let objective = |x: &[f64]| {
            let p = gp(ZERO, x[0].abs(), FRAC_PI_2);
            gap_objective(GapKind::Heisenberg, &p, &cfg()).unwrap_or(f64::INFINITY)
        };
        let m = minimize(objective, &[0.5], &NelderMeadOptions::default()).unwrap();
        assert!(m.params[0].abs() < 1e-3, "{:?}", m);
        assert!(m.value < 1e-6);
    }

    #[test]
    fn scan_orders_and_isolates_errors() {
        assert!(scan_grid(GapKind::Schrodinger, &[], &cfg()).is_empty());
        let grid = vec![gp(ZERO, 0.2, 0.0), gp(ZERO, 6.0, 0.0), gp(ONE, 0.0, 0.0)];
        let res = scan_grid(GapKind::Schrodinger, &grid, &cfg());
        assert_eq!(res.len(), 3);
        assert!(res[0].outcome.is_ok());
        assert!(res[1].outcome.is_err());
        assert_eq!(res[2].outcome.as_ref().unwrap().label, ClassLabel::Coherent);
        let csv = scan_csv(&res);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SCAN_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[2].ends_with(",NaN,error"));
    }

    #[test]
    fn objective_matches_recomputed_gap() {
        let grid = param_grid(
            &[ZERO, Complex::new(0.5, 0.5)],
            &linspace(0.0, 1.0, 3),
            &linspace(0.0, PI, 3),
        )
        .unwrap();
        for res in scan_grid(GapKind::Sum, &grid, &cfg()) {
            let point = res.outcome.unwrap();
            let again = gap_objective(GapKind::Sum, &res.params, &cfg()).unwrap();
            assert!((point.objective - again).abs() <= 1e-12);
        }
    }

    #[test]
    fn gap_kind_parsing() {
        assert_eq!("sum".parse::<GapKind>().unwrap(), GapKind::Sum);
        assert!("kennard".parse::<GapKind>().is_err());
        assert_eq!(linspace(0.0, 1.0, 1), vec![0.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }
}
