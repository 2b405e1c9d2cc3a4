use std::error::Error;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use uncertainty_lab::dynamics::{format_sig17, moment_trajectory, uniform_times, DpaConfig};
use uncertainty_lab::explorer::{
    classify_smus_with, linspace, param_grid, scan_csv, scan_grid_with, GapKind,
};
use uncertainty_lab::fock::{ladder_ops, quadratures, ModeConfig, QuantumState, State};
use uncertainty_lab::moments::{
    commutator_matrix, covariance_matrix, CovarianceMatrix, Observable,
};
use uncertainty_lab::relations::{
    canonical_sum, characteristic_ur, heisenberg, schrodinger, sum_ur, trace_class_ur,
    two_state_ur, williamson as williamson_decomposition, RelationReport, Tolerances,
};
use uncertainty_lab::Complex;

use crate::spec::{build, build_pure, Kind, ModeOverrides, StateSpec};
use crate::{GlobalOpts, DIM_ENV};

type CmdResult = Result<Outcome, Box<dyn Error>>;

const RELATIONS: [&str; 6] = [
    "heisenberg",
    "schrodinger",
    "characteristic",
    "sum",
    "canonical-sum",
    "trace-class",
];
const DEFAULT_DIM: usize = 64;
const EVOLVE_DEFAULT_DIM: usize = 128;

pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

fn fail(msg: impl Into<String>) -> Box<dyn Error> {
    msg.into().into()
}

fn tolerances(g: &GlobalOpts) -> Result<Tolerances, Box<dyn Error>> {
    let mut tol = Tolerances::default();
    if let Some(sat) = g.tol_sat {
        if sat <= 0.0 {
            return Err(fail(format!("--tol-sat must be positive, got {sat}")));
        }
        tol.sat = sat;
    }
    Ok(tol)
}

fn env_dim() -> Result<Option<usize>, Box<dyn Error>> {
    match std::env::var(DIM_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| fail(format!("{DIM_ENV}={v:?} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

/// Flag, then spec file, then environment, then the built-in default.
fn resolve_mode(
    g: &GlobalOpts,
    from_spec: ModeOverrides,
    default_dim: usize,
) -> Result<ModeConfig, Box<dyn Error>> {
    let flags = ModeOverrides {
        dim: g.dim,
        hbar: g.hbar,
        mass: g.mass,
        omega: g.omega,
    };
    let env = ModeOverrides {
        dim: env_dim()?,
        ..Default::default()
    };
    let m = flags.or(from_spec).or(env);
    Ok(ModeConfig::with_units(
        m.dim.unwrap_or(default_dim),
        m.hbar.unwrap_or(1.0),
        m.mass.unwrap_or(1.0),
        m.omega.unwrap_or(1.0),
    )?)
}

fn header(out: &mut String, cfg: &ModeConfig) {
    let _ = writeln!(out, "uncertainty-lab {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        out,
        "mode: dim={} hbar={} mass={} omega={}",
        cfg.dim, cfg.hbar, cfg.mass, cfg.omega
    );
}

fn dim_warning(out: &mut String, requested: usize, used: usize) {
    if used != requested {
        let _ = writeln!(
            out,
            "warning: fit_dim: dim raised from {requested} to {used} by the tail guard"
        );
    }
}

fn table(out: &mut String, reports: &[RelationReport]) {
    let _ = writeln!(
        out,
        "{:<22} {:>24} {:>24} {:>24}  status",
        "relation", "lhs", "rhs", "gap"
    );
    for r in reports {
        let status = match (r.satisfied, r.saturated) {
            (_, true) => "saturated",
            (true, false) => "satisfied",
            (false, false) => "VIOLATED",
        };
        let _ = writeln!(
            out,
            "{:<22} {:>24} {:>24} {:>24}  {status}",
            r.name,
            format_sig17(r.lhs),
            format_sig17(r.rhs),
            format_sig17(r.gap)
        );
    }
}

fn exit_code(reports: &[RelationReport]) -> u8 {
    if reports.iter().all(|r| r.satisfied) {
        0
    } else {
        2
    }
}

fn load(
    g: &GlobalOpts,
    path: &Path,
    default_dim: usize,
) -> Result<(StateSpec, ModeConfig), Box<dyn Error>> {
    let spec = StateSpec::read(path)?;
    let cfg = resolve_mode(g, spec.mode, default_dim)?;
    Ok((spec, cfg))
}

fn observable(name: &str, cfg: &ModeConfig) -> Result<Observable, Box<dyn Error>> {
    let quad = quadratures(cfg)?;
    Ok(match name {
        "q" => Observable::new("q", quad.q),
        "p" => Observable::new("p", quad.p),
        "n" => Observable::new("n", ladder_ops(cfg)?.n),
        other => {
            return Err(fail(format!(
                "unknown observable {other:?}; expected q, p or n"
            )))
        }
    })
}

pub fn check(
    g: &GlobalOpts,
    path: &Path,
    relations: &[String],
    observables: &[String],
    orders: &[usize],
) -> CmdResult {
    let tol = tolerances(g)?;
    let selected: Vec<&str> = if relations.is_empty() {
        RELATIONS.to_vec()
    } else {
        relations.iter().map(|s| s.trim()).collect()
    };
    for name in &selected {
        if !RELATIONS.contains(name) {
            return Err(fail(format!(
                "unknown relation {name:?}; valid names: {}",
                RELATIONS.join(", ")
            )));
        }
    }
    let (spec, cfg) = load(g, path, DEFAULT_DIM)?;
    let state = build(&spec.kind, &cfg)?;
    let used = *state.config();
    let quad = quadratures(&used)?;

    let mut reports = Vec::new();
    for name in &selected {
        match *name {
            "heisenberg" => reports.push(heisenberg(&state, &quad.q, &quad.p)?),
            "schrodinger" => reports.push(schrodinger(&state, &quad.q, &quad.p)?),
            "sum" => reports.push(sum_ur(&state, &quad.q, &quad.p)?),
            "canonical-sum" => reports.push(canonical_sum(&state)?),
            "characteristic" => {
                let obs = observables
                    .iter()
                    .map(|o| observable(o.trim(), &used))
                    .collect::<Result<Vec<_>, _>>()?;
                reports.extend(characteristic_ur(&state, &obs)?);
            }
            "trace-class" => {
                let obs = [observable("q", &used)?, observable("p", &used)?];
                let sigma = covariance_matrix(&obs, &state)?;
                let comm = commutator_matrix(&obs, &state)?;
                for &k in orders {
                    reports.push(trace_class_ur(&sigma, &comm, k)?);
                }
            }
            _ => unreachable!("validated above"),
        }
    }
    for r in &mut reports {
        r.apply_tolerances(tol);
    }

    let mut out = String::new();
    header(&mut out, &cfg);
    dim_warning(&mut out, cfg.dim, used.dim);
    let _ = writeln!(
        out,
        "state: {} ({})",
        describe(&spec.kind),
        if state.is_mixed() { "mixed" } else { "pure" }
    );
    table(&mut out, &reports);
    Ok(Outcome {
        code: exit_code(&reports),
        stdout: out,
    })
}

fn describe(kind: &Kind) -> String {
    match kind {
        Kind::Vacuum => "vacuum".into(),
        Kind::Fock { k } => format!("fock k={k}"),
        Kind::Coherent { alpha } => format!("coherent alpha={}", fmt_complex(*alpha)),
        Kind::Squeezed(p) => format!(
            "squeezed alpha={} r={} theta={}",
            fmt_complex(p.alpha),
            p.r,
            p.theta
        ),
        Kind::Superposition(terms) => format!("superposition of {} components", terms.len()),
        Kind::Thermal { nbar, alpha } => {
            format!("thermal-density nbar={nbar} alpha={}", fmt_complex(*alpha))
        }
    }
}

fn fmt_complex(z: Complex) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn rebuild(
    kind: &Kind,
    state: State,
    cfg: &ModeConfig,
    dim: usize,
) -> Result<State, Box<dyn Error>> {
    if state.dim() == dim {
        return Ok(state);
    }
    Ok(build(kind, &cfg.with_dim(dim))?)
}

pub fn two_state(g: &GlobalOpts, psi_path: &Path, phi_path: &Path) -> CmdResult {
    let tol = tolerances(g)?;
    let (psi_spec, psi_cfg) = load(g, psi_path, DEFAULT_DIM)?;
    let (phi_spec, phi_cfg) = load(g, phi_path, DEFAULT_DIM)?;
    if psi_cfg != phi_cfg {
        return Err(fail(format!(
            "mode configurations differ: {} has dim={} hbar={} mass={} omega={}, {} has dim={} hbar={} mass={} omega={}",
            psi_path.display(),
            psi_cfg.dim,
            psi_cfg.hbar,
            psi_cfg.mass,
            psi_cfg.omega,
            phi_path.display(),
            phi_cfg.dim,
            phi_cfg.hbar,
            phi_cfg.mass,
            phi_cfg.omega
        )));
    }
    let psi = build(&psi_spec.kind, &psi_cfg)?;
    let phi = build(&phi_spec.kind, &phi_cfg)?;
    let dim = psi.dim().max(phi.dim());
    let psi = rebuild(&psi_spec.kind, psi, &psi_cfg, dim)?;
    let phi = rebuild(&phi_spec.kind, phi, &phi_cfg, dim)?;

    let mut report = two_state_ur(&psi, &phi)?;
    report.apply_tolerances(tol);
    let mut out = String::new();
    header(&mut out, &psi_cfg);
    dim_warning(&mut out, psi_cfg.dim, dim);
    let _ = writeln!(out, "psi: {}", describe(&psi_spec.kind));
    let _ = writeln!(out, "phi: {}", describe(&phi_spec.kind));
    let reports = [report];
    table(&mut out, &reports);
    Ok(Outcome {
        code: exit_code(&reports),
        stdout: out,
    })
}

pub fn evolve(
    g: &GlobalOpts,
    path: &Path,
    chi: f64,
    pump_phase: f64,
    t_max: f64,
    steps: usize,
    out_path: &Path,
) -> CmdResult {
    let tol = tolerances(g)?;
    if chi < 0.0 {
        return Err(fail(format!("--chi must be >= 0, got {chi}")));
    }
    let times = uniform_times(t_max, steps)?;
    let (spec, cfg) = load(g, path, EVOLVE_DEFAULT_DIM)?;
    if !spec.kind.is_pure() {
        return Err(fail("evolve needs a pure initial state"));
    }
    let initial = build_pure(&spec.kind, &cfg)?;
    let used = *initial.config();
    let dpa = DpaConfig::new(used, chi, pump_phase, times)?;
    let traj = moment_trajectory(&dpa, &initial)?;
    traj.write_csv(out_path)
        .map_err(|e| fail(format!("cannot write {}: {e}", out_path.display())))?;

    let mut out = String::new();
    header(&mut out, &cfg);
    dim_warning(&mut out, cfg.dim, used.dim);
    let _ = writeln!(out, "state: {}", describe(&spec.kind));
    let _ = writeln!(
        out,
        "hamiltonian: dpa chi={chi} pump_phase={pump_phase} t_max={t_max} steps={steps}"
    );
    let _ = writeln!(out, "points: {}", traj.len());
    let _ = writeln!(out, "max |cov_qp|: {}", format_sig17(traj.max_abs_cov()));
    let _ = writeln!(
        out,
        "max heisenberg gap: {}",
        format_sig17(traj.max_heisenberg_gap())
    );
    let _ = writeln!(
        out,
        "max |det sigma - hbar^2/4|: {}",
        format_sig17(traj.max_det_deviation(used.hbar))
    );
    let _ = writeln!(
        out,
        "max norm drift: {}",
        format_sig17(traj.max_norm_drift())
    );
    let _ = writeln!(out, "csv: {}", out_path.display());

    let half = used.hbar / 2.0;
    let violated = (0..traj.len()).any(|k| {
        let s = RelationReport::with_tolerances("schrodinger", traj.det_sigma[k], half * half, tol);
        let h =
            RelationReport::with_tolerances("heisenberg", traj.heisenberg_gap[k] + half, half, tol);
        !(s.satisfied && h.satisfied)
    });
    if violated {
        let _ = writeln!(
            out,
            "VIOLATED: an uncertainty relation fails along the trajectory"
        );
    }
    Ok(Outcome {
        code: if violated { 2 } else { 0 },
        stdout: out,
    })
}

pub struct ScanArgs {
    pub objective: String,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub r: (f64, f64, usize),
    pub theta: (f64, f64, usize),
    pub out: Option<PathBuf>,
}

pub fn scan(g: &GlobalOpts, args: &ScanArgs) -> CmdResult {
    let tol = tolerances(g)?;
    let kind: GapKind = args.objective.parse()?;
    let cfg = resolve_mode(g, ModeOverrides::default(), DEFAULT_DIM)?;
    let (r_lo, r_hi, r_n) = args.r;
    let (t_lo, t_hi, t_n) = args.theta;
    if r_n == 0 || t_n == 0 {
        return Err(fail("--r-steps and --theta-steps must be >= 1"));
    }
    let grid = param_grid(
        &[Complex::new(args.alpha_re, args.alpha_im)],
        &linspace(r_lo, r_hi, r_n),
        &linspace(t_lo, t_hi, t_n),
    )?;
    let results = scan_grid_with(kind, &grid, &cfg, tol);
    let csv = scan_csv(&results);

    let errors: Vec<String> = results
        .iter()
        .enumerate()
        .filter_map(|(i, r)| {
            r.outcome
                .as_ref()
                .err()
                .map(|e| format!("warning: scan: point {i}: {e}"))
        })
        .collect();
    let violated = results
        .iter()
        .any(|r| r.outcome.as_ref().is_ok_and(|p| !p.report.satisfied));

    let mut out = String::new();
    match &args.out {
        Some(path) => {
            std::fs::write(path, &csv)
                .map_err(|e| fail(format!("cannot write {}: {e}", path.display())))?;
            header(&mut out, &cfg);
            let _ = writeln!(out, "objective: {kind}");
            let _ = writeln!(out, "points: {} ({} failed)", results.len(), errors.len());
            for e in &errors {
                let _ = writeln!(out, "{e}");
            }
            let _ = writeln!(out, "csv: {}", path.display());
        }
        None => {
            out = csv;
            for e in &errors {
                eprintln!("{e}");
            }
        }
    }
    let code = if !errors.is_empty() {
        1
    } else if violated {
        2
    } else {
        0
    };
    Ok(Outcome { stdout: out, code })
}

pub fn classify(g: &GlobalOpts, path: &Path) -> CmdResult {
    let tol = tolerances(g)?;
    let (spec, cfg) = load(g, path, DEFAULT_DIM)?;
    let label = match build(&spec.kind, &cfg)? {
        State::Pure(psi) => classify_smus_with(&psi, tol)?,
        State::Mixed(rho) => classify_smus_with(&rho, tol)?,
    };
    Ok(Outcome {
        stdout: format!("{label}\n"),
        code: 0,
    })
}

/// Comma-separated rows; blank lines and `#` comments are skipped, and a
/// non-numeric first row is taken as a header.
pub fn read_matrix_csv(text: &str) -> Result<DMatrix<f64>, Box<dyn Error>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut first = true;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> =
            line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        match parsed {
            Ok(row) if row.iter().all(|x| x.is_finite()) => rows.push(row),
            _ if first => {}
            _ => {
                return Err(fail(format!(
                    "line {}: not a row of finite numbers",
                    idx + 1
                )))
            }
        }
        first = false;
    }
    let n = rows.len();
    if n == 0 {
        return Err(fail("empty matrix"));
    }
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(fail(format!(
            "row {} has {} entries, expected {n}",
            i + 1,
            row.len()
        )));
    }
    Ok(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
}

pub fn williamson(g: &GlobalOpts, path: &Path) -> CmdResult {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(format!("cannot read {}: {e}", path.display())))?;
    let matrix = read_matrix_csv(&text).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    let hbar = g.hbar.unwrap_or(1.0);
    let sigma = CovarianceMatrix::unlabeled(matrix)?;
    let w = williamson_decomposition(&sigma)?;

    let mut out = String::new();
    let _ = writeln!(out, "uncertainty-lab {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "modes: {}", w.nus.len());
    let _ = writeln!(out, "symplectic eigenvalues (descending):");
    for (i, nu) in w.nus.iter().enumerate() {
        let _ = writeln!(out, "nu[{}] = {}", i + 1, format_sig17(*nu));
    }
    let _ = writeln!(out, "lambda:");
    for r in 0..w.lambda.nrows() {
        let row: Vec<String> = w.lambda.row(r).iter().map(|&x| format_sig17(x)).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    let floor = hbar / 2.0;
    let violated = w.nus.iter().any(|&nu| nu < floor * (1.0 - 1e-9));
    if violated {
        let _ = writeln!(
            out,
            "VIOLATED: some nu < hbar/2 = {floor}; not a physical covariance matrix"
        );
    }
    Ok(Outcome {
        stdout: out,
        code: if violated { 2 } else { 0 },
    })
}
