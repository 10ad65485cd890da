//! Parsing of noise/channel/basis specifications and the key=value config
//! file.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use qudit_teleport::closed_form::{boundary_state, rank_state};
use qudit_teleport::noise::{NoiseKind, NoiseSpec};
use qudit_teleport::{Dim, MeasurementBasis, SchmidtChannel};

use crate::CliError;

/// Noise on one qudit: either a fixed fraction or a swept range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PAxis {
    Fixed(f64),
    /// start, stop, steps (inclusive endpoints, steps ≥ 2)
    Range(f64, f64, usize),
}

impl std::fmt::Display for PAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PAxis::Fixed(p) => write!(f, "{p}"),
            PAxis::Range(start, stop, steps) => write!(f, "{start}:{stop}:{steps}"),
        }
    }
}

impl PAxis {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            PAxis::Fixed(p) => vec![p],
            PAxis::Range(start, stop, steps) => (0..steps)
                .map(|i| start + (stop - start) * i as f64 / (steps - 1) as f64)
                .collect(),
        }
    }

    pub fn is_swept(&self) -> bool {
        matches!(self, PAxis::Range(..))
    }
}

/// Noise assignment for the three qudits, possibly with swept fractions.
#[derive(Debug, Clone)]
pub struct NoiseAssignment {
    pub kinds: [NoiseKind; 3],
    pub axes: [PAxis; 3],
}

impl NoiseAssignment {
    pub fn noiseless() -> Self {
        Self {
            kinds: [NoiseKind::None; 3],
            axes: [PAxis::Fixed(0.0); 3],
        }
    }

    pub fn scenario_at(&self, p: [f64; 3]) -> Result<qudit_teleport::ScenarioSpec, CliError> {
        let mk = |kind: NoiseKind, p: f64| {
            if kind == NoiseKind::None {
                Ok(NoiseSpec::none())
            } else {
                NoiseSpec::new(kind, p).map_err(CliError::from)
            }
        };
        Ok(qudit_teleport::ScenarioSpec::new(
            mk(self.kinds[0], p[0])?,
            mk(self.kinds[1], p[1])?,
            mk(self.kinds[2], p[2])?,
        ))
    }

    /// Fixed scenario; errors if any axis is a range.
    pub fn fixed_scenario(&self) -> Result<qudit_teleport::ScenarioSpec, CliError> {
        let mut p = [0.0; 3];
        for (i, axis) in self.axes.iter().enumerate() {
            match axis {
                PAxis::Fixed(v) => p[i] = *v,
                PAxis::Range(..) => {
                    return Err(CliError::Usage(
                        "swept noise ranges are only valid for `sweep`".into(),
                    ))
                }
            }
        }
        self.scenario_at(p)
    }

    pub fn swept_axes(&self) -> usize {
        self.axes.iter().filter(|a| a.is_swept()).count()
    }
}

/// Parse `--noise` tokens: each is `none` or `I|A|B=KIND[:p]` with p either
/// a number or `start:stop:steps`.
pub fn parse_noise(tokens: &[String]) -> Result<NoiseAssignment, CliError> {
    let mut out = NoiseAssignment::noiseless();
    if tokens.len() == 1 && tokens[0] == "none" {
        return Ok(out);
    }
    let mut seen = [false; 3];
    for token in tokens {
        let (qudit, rest) = token.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "noise token '{token}' must look like I|A|B=KIND:p (or 'none')"
            ))
        })?;
        let slot = match qudit {
            "I" | "i" => 0,
            "A" | "a" => 1,
            "B" | "b" => 2,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown qudit '{other}' in '{token}' (expected I, A or B)"
                )))
            }
        };
        if seen[slot] {
            return Err(CliError::Usage(format!(
                "qudit '{qudit}' assigned twice in --noise"
            )));
        }
        seen[slot] = true;

        let mut parts = rest.splitn(2, ':');
        let kind: NoiseKind = parts
            .next()
            .unwrap_or_default()
            .parse()
            .map_err(|e| CliError::Usage(format!("{e}")))?;
        let pspec = parts.next();
        let axis = match (kind, pspec) {
            (NoiseKind::None, None) => PAxis::Fixed(0.0),
            (NoiseKind::None, Some(_)) => {
                return Err(CliError::Usage(format!(
                    "'none' takes no fraction in '{token}'"
                )))
            }
            (_, None) => {
                return Err(CliError::Usage(format!(
                    "noise kind '{kind}' needs a fraction in '{token}'"
                )))
            }
            (_, Some(ps)) => parse_p_axis(ps, token)?,
        };
        out.kinds[slot] = kind;
        out.axes[slot] = axis;
    }
    Ok(out)
}

fn parse_p_axis(ps: &str, token: &str) -> Result<PAxis, CliError> {
    let fields: Vec<&str> = ps.split(':').collect();
    let bad = |what: &str| CliError::Usage(format!("{what} in noise token '{token}'"));
    match fields.len() {
        1 => {
            let p: f64 = fields[0].parse().map_err(|_| bad("invalid fraction"))?;
            check_p(p, token)?;
            Ok(PAxis::Fixed(p))
        }
        3 => {
            let start: f64 = fields[0].parse().map_err(|_| bad("invalid range start"))?;
            let stop: f64 = fields[1].parse().map_err(|_| bad("invalid range stop"))?;
            let steps: usize = fields[2].parse().map_err(|_| bad("invalid step count"))?;
            if steps < 2 {
                return Err(bad("a swept axis needs at least 2 steps"));
            }
            check_p(start, token)?;
            check_p(stop, token)?;
            Ok(PAxis::Range(start, stop, steps))
        }
        _ => Err(bad("fraction must be `p` or `start:stop:steps`")),
    }
}

fn check_p(p: f64, token: &str) -> Result<(), CliError> {
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(CliError::Usage(format!(
            "fraction {p} out of [0, 1] in '{token}'"
        )));
    }
    Ok(())
}

/// Parse a `--gamma` preset: max | rank:ν | boundary:μ:a | file:PATH.
pub fn parse_gamma(spec: &str, d: Dim) -> Result<SchmidtChannel, CliError> {
    if spec == "max" {
        return Ok(SchmidtChannel::maximally_entangled(d));
    }
    if let Some(rest) = spec.strip_prefix("rank:") {
        let nu: usize = rest
            .parse()
            .map_err(|_| CliError::Usage(format!("invalid rank in gamma spec '{spec}'")))?;
        return rank_state(d, nu).map_err(CliError::from);
    }
    if let Some(rest) = spec.strip_prefix("boundary:") {
        let (mu_s, a_s) = rest.split_once(':').ok_or_else(|| {
            CliError::Usage(format!("gamma spec '{spec}' must be boundary:μ:a"))
        })?;
        let mu: usize = mu_s
            .parse()
            .map_err(|_| CliError::Usage(format!("invalid μ in gamma spec '{spec}'")))?;
        let a: f64 = a_s
            .parse()
            .map_err(|_| CliError::Usage(format!("invalid a in gamma spec '{spec}'")))?;
        return boundary_state(d, mu, a).map_err(CliError::from);
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let values = read_floats(path.as_ref())?;
        let n = d.get();
        if values.len() != 2 * n {
            return Err(CliError::Usage(format!(
                "gamma file '{path}' holds {} numbers, expected {} (re im per coefficient)",
                values.len(),
                2 * n
            )));
        }
        let gamma: Array1<Complex64> = (0..n)
            .map(|k| Complex64::new(values[2 * k], values[2 * k + 1]))
            .collect();
        return SchmidtChannel::new(gamma).map_err(CliError::from);
    }
    Err(CliError::Usage(format!(
        "unknown gamma spec '{spec}' (expected max, rank:ν, boundary:μ:a or file:PATH)"
    )))
}

/// Parse a `--basis` preset: max | phased:φ1,φ2,… | file:PATH.
pub fn parse_basis(spec: &str, d: Dim) -> Result<MeasurementBasis, CliError> {
    if spec == "max" {
        return Ok(MeasurementBasis::max_entangled(d));
    }
    if let Some(rest) = spec.strip_prefix("phased:") {
        let phases: Result<Vec<f64>, _> = rest.split(',').map(|s| s.trim().parse()).collect();
        let phases = phases
            .map_err(|_| CliError::Usage(format!("invalid phase list in basis spec '{spec}'")))?;
        return MeasurementBasis::phased(d, &phases).map_err(CliError::from);
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let values = read_floats(path.as_ref())?;
        let n = d.get();
        if values.len() != 2 * n * n {
            return Err(CliError::Usage(format!(
                "basis file '{path}' holds {} numbers, expected {} (re im per entry, row-major)",
                values.len(),
                2 * n * n
            )));
        }
        let beta = Array2::from_shape_fn((n, n), |(k, m)| {
            let base = 2 * (k * n + m);
            Complex64::new(values[base], values[base + 1])
        });
        return MeasurementBasis::from_matrix(beta).map_err(CliError::from);
    }
    Err(CliError::Usage(format!(
        "unknown basis spec '{spec}' (expected max, phased:φ1,… or file:PATH)"
    )))
}

fn read_floats(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for tok in text.split_whitespace() {
        let v: f64 = tok.parse().map_err(|_| {
            CliError::Usage(format!("non-numeric token '{tok}' in {}", path.display()))
        })?;
        out.push(v);
    }
    Ok(out)
}

/// Plain key=value configuration file; '#' starts a comment. Flags always
/// take precedence over config values.
#[derive(Debug, Default, Clone)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    CliError::Usage(format!(
                        "{}:{}: expected key=value, got '{raw}'",
                        path.display(),
                        lineno + 1
                    ))
                })?;
                values.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn get_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s.parse::<T>().map(Some).map_err(|_| {
                CliError::Usage(format!("config key '{key}' has invalid value '{s}'"))
            }),
        }
    }
}
