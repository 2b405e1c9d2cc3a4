//! Line-oriented state specification files.
//!
//! ```text
//! # comment
//! kind = squeezed
//! alpha_re = 0.5
//! r = 0.5
//! theta = pi/2
//! dim = 64
//! ```
//!
//! Superpositions list one `component = <kind> key=value ...` line per
//! term, with complex weights given as `weight_re` / `weight_im`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use uncertainty_lab::fock::{
    coherent, fit_dim, fock_state, squeezed, superpose, vacuum, DensityMatrix, GaussianParams,
    ModeConfig, State, StateVector,
};
use uncertainty_lab::Complex;

#[derive(Debug)]
pub struct SpecError(pub String);

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SpecError {}

fn err<T>(msg: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError(msg.into()))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Kind {
    Vacuum,
    Fock { k: usize },
    Coherent { alpha: Complex },
    Squeezed(GaussianParams),
    Superposition(Vec<(Kind, Complex)>),
    Thermal { nbar: f64, alpha: Complex },
}

impl Kind {
    pub fn is_pure(&self) -> bool {
        !matches!(self, Kind::Thermal { .. })
    }
}

/// Mode parameters a spec file may set; unset ones fall through to the
/// environment and built-in defaults.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ModeOverrides {
    pub dim: Option<usize>,
    pub hbar: Option<f64>,
    pub mass: Option<f64>,
    pub omega: Option<f64>,
}

impl ModeOverrides {
    /// `self` wins over `other`.
    pub fn or(self, other: ModeOverrides) -> ModeOverrides {
        ModeOverrides {
            dim: self.dim.or(other.dim),
            hbar: self.hbar.or(other.hbar),
            mass: self.mass.or(other.mass),
            omega: self.omega.or(other.omega),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateSpec {
    pub kind: Kind,
    pub mode: ModeOverrides,
}

impl StateSpec {
    pub fn read(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SpecError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| SpecError(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let mut keys: BTreeMap<String, (usize, String)> = BTreeMap::new();
        let mut components: Vec<(usize, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return err(format!(
                    "line {line_no}: expected `key = value`, got {line:?}"
                ));
            };
            let (key, value) = (key.trim(), value.trim());
            if key == "component" {
                components.push((line_no, value.to_string()));
                continue;
            }
            if keys
                .insert(key.to_string(), (line_no, value.to_string()))
                .is_some()
            {
                return err(format!("line {line_no}: duplicate key `{key}`"));
            }
        }

        let mut fields = Fields::new(keys);
        let mode = ModeOverrides {
            dim: fields.take_usize("dim")?,
            hbar: fields.take_f64("hbar")?,
            mass: fields.take_f64("mass")?,
            omega: fields.take_f64("omega")?,
        };
        let Some(kind_name) = fields.take_raw("kind") else {
            return err("missing key `kind`");
        };
        let kind = if kind_name == "superposition" {
            if components.is_empty() {
                return err("superposition needs at least one `component` line");
            }
            let mut terms = Vec::with_capacity(components.len());
            for (line_no, text) in &components {
                terms.push(
                    parse_component(text).map_err(|e| SpecError(format!("line {line_no}: {e}")))?,
                );
            }
            Kind::Superposition(terms)
        } else {
            if let Some((line_no, _)) = components.first() {
                return err(format!(
                    "line {line_no}: `component` is only valid for kind = superposition"
                ));
            }
            parse_kind(&kind_name, &mut fields)?
        };
        fields.finish()?;
        Ok(Self { kind, mode })
    }
}

fn parse_component(text: &str) -> Result<(Kind, Complex), SpecError> {
    let mut words = text.split_whitespace();
    let Some(kind_name) = words.next() else {
        return err("empty component");
    };
    let mut keys = BTreeMap::new();
    for word in words {
        let Some((k, v)) = word.split_once('=') else {
            return err(format!("component entry {word:?} is not `key=value`"));
        };
        if keys.insert(k.to_string(), (0, v.to_string())).is_some() {
            return err(format!("duplicate component key `{k}`"));
        }
    }
    let mut fields = Fields::new(keys);
    let weight = Complex::new(
        fields.take_f64("weight_re")?.unwrap_or(1.0),
        fields.take_f64("weight_im")?.unwrap_or(0.0),
    );
    if matches!(kind_name, "superposition" | "thermal-density") {
        return err(format!("component kind `{kind_name}` is not allowed"));
    }
    let kind = parse_kind(kind_name, &mut fields)?;
    fields.finish()?;
    Ok((kind, weight))
}

fn parse_kind(name: &str, fields: &mut Fields) -> Result<Kind, SpecError> {
    Ok(match name {
        "vacuum" => Kind::Vacuum,
        "fock" => Kind::Fock {
            k: fields.require_usize("k")?,
        },
        "coherent" => Kind::Coherent {
            alpha: fields.take_alpha()?,
        },
        "squeezed" => {
            let alpha = fields.take_alpha()?;
            let r = fields.require_f64("r")?;
            let theta = fields.take_f64("theta")?.unwrap_or(0.0);
            Kind::Squeezed(
                GaussianParams::new(alpha, r, theta).map_err(|e| SpecError(format!("key `r`: {e}")))?,
            )
        }
        "thermal-density" => {
            let nbar = fields.require_f64("nbar")?;
            if nbar < 0.0 {
                return err(format!("key `nbar`: must be >= 0, got {nbar}"));
            }
            Kind::Thermal {
                nbar,
                alpha: fields.take_alpha()?,
            }
        }
        other => {
            return err(format!(
                "key `kind`: unknown kind {other:?}; expected vacuum, fock, coherent, squeezed, superposition or thermal-density"
            ))
        }
    })
}

struct Fields {
    keys: BTreeMap<String, (usize, String)>,
}

impl Fields {
    fn new(keys: BTreeMap<String, (usize, String)>) -> Self {
        Self { keys }
    }

    fn take_raw(&mut self, key: &str) -> Option<String> {
        self.keys.remove(key).map(|(_, v)| v)
    }

    fn take_f64(&mut self, key: &str) -> Result<Option<f64>, SpecError> {
        self.take_raw(key)
            .map(|v| {
                parse_number(&v)
                    .ok_or_else(|| SpecError(format!("key `{key}`: {v:?} is not a finite number")))
            })
            .transpose()
    }

    fn take_usize(&mut self, key: &str) -> Result<Option<usize>, SpecError> {
        self.take_raw(key)
            .map(|v| {
                v.parse::<usize>().map_err(|_| {
                    SpecError(format!("key `{key}`: {v:?} is not a non-negative integer"))
                })
            })
            .transpose()
    }

    fn require_f64(&mut self, key: &str) -> Result<f64, SpecError> {
        self.take_f64(key)?
            .ok_or_else(|| SpecError(format!("missing key `{key}`")))
    }

    fn require_usize(&mut self, key: &str) -> Result<usize, SpecError> {
        self.take_usize(key)?
            .ok_or_else(|| SpecError(format!("missing key `{key}`")))
    }

    fn take_alpha(&mut self) -> Result<Complex, SpecError> {
        Ok(Complex::new(
            self.take_f64("alpha_re")?.unwrap_or(0.0),
            self.take_f64("alpha_im")?.unwrap_or(0.0),
        ))
    }

    fn finish(self) -> Result<(), SpecError> {
        match self.keys.into_iter().next() {
            None => Ok(()),
            Some((key, _)) => err(format!("unknown key `{key}`")),
        }
    }
}

/// A decimal number, or a multiple/fraction of `pi` such as `pi/2`,
/// `-pi`, `3*pi/4`.
pub fn parse_number(text: &str) -> Option<f64> {
    let t = text.trim();
    let value = if let Ok(v) = t.parse::<f64>() {
        v
    } else {
        let idx = t.find("pi")?;
        let (head, tail) = (t[..idx].trim(), t[idx + 2..].trim());
        let coef = match head.strip_suffix('*').map(str::trim).unwrap_or(head) {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().ok()?,
        };
        let den = match tail {
            "" => 1.0,
            d => d.strip_prefix('/')?.trim().parse::<f64>().ok()?,
        };
        coef * std::f64::consts::PI / den
    };
    value.is_finite().then_some(value)
}

/// Builds a pure state, raising the dimension as needed.
pub fn build_pure(kind: &Kind, cfg: &ModeConfig) -> uncertainty_lab::Result<StateVector> {
    fit_dim(cfg, |c| pure_at(kind, c))
}

fn pure_at(kind: &Kind, cfg: &ModeConfig) -> uncertainty_lab::Result<StateVector> {
    match kind {
        Kind::Vacuum => vacuum(cfg),
        Kind::Fock { k } => fock_state(cfg, *k),
        Kind::Coherent { alpha } => coherent(cfg, *alpha),
        Kind::Squeezed(params) => squeezed(cfg, params),
        Kind::Superposition(terms) => {
            let mut states = Vec::with_capacity(terms.len());
            let mut weights = Vec::with_capacity(terms.len());
            for (k, w) in terms {
                states.push(pure_at(k, cfg)?);
                weights.push(*w);
            }
            superpose(&states, &weights)
        }
        Kind::Thermal { .. } => Err(uncertainty_lab::Error::InvalidState {
            op: "spec",
            reason: "thermal-density is a mixed state".into(),
        }),
    }
}

pub fn build(kind: &Kind, cfg: &ModeConfig) -> uncertainty_lab::Result<State> {
    match kind {
        Kind::Thermal { nbar, alpha } => {
            fit_dim(cfg, |c| DensityMatrix::thermal(c, *nbar, *alpha)).map(State::Mixed)
        }
        pure => build_pure(pure, cfg).map(State::Pure),
    }
}
