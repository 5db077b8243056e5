//! Run configuration: `key = value` files with `[run]` / `[params]` sections,
//! overlaid by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use herglotz_core::scenarios::{self, InitialMotion, ScenarioParams};
use herglotz_core::{AlgebraVector, CoalgebraVector, Error as CoreError, LieMethod, Method};
use herglotz_core::nalgebra::{self, Matrix3};

/// Largest accepted `t_final / dt`.
pub const MAX_STEPS: f64 = 1e8;

pub const RUN_KEYS: [&str; 10] =
    ["scenario", "formulation", "dt", "t_final", "integrator", "lie_integrator", "reconstruct", "output", "format", "seed"];
pub const PARAM_KEYS: [&str; 8] = ["inertia", "gamma", "mgl", "chi", "xi0", "mu0", "z0", "alpha0"];

pub const SEED_ENV: &str = "HERGLOTZ_SEED";
pub const DEFAULT_SEED: u64 = herglotz_core::verify::DEFAULT_SEED;

/// Invalid configuration; `key` names the offending setting.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self { key: key.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid '{}': {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    Eph,
    Lpj,
    EphExt,
    LpjExt,
    Unreduced,
}

impl Formulation {
    pub fn name(self) -> &'static str {
        match self {
            Formulation::Eph => "eph",
            Formulation::Lpj => "lpj",
            Formulation::EphExt => "eph-ext",
            Formulation::LpjExt => "lpj-ext",
            Formulation::Unreduced => "unreduced",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "eph" => Formulation::Eph,
            "lpj" => Formulation::Lpj,
            "eph-ext" => Formulation::EphExt,
            "lpj-ext" => Formulation::LpjExt,
            "unreduced" => Formulation::Unreduced,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Raw settings keyed by canonical (underscore) name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings(BTreeMap<String, String>);

fn canonical(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl Settings {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    /// Parses the text of a config file.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut out = BTreeMap::new();
        let mut section: Option<&'static [&'static str]> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = i + 1;
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::new(line, format!("line {lineno}: unterminated section header")))?
                    .trim();
                section = match name {
                    "run" => Some(&RUN_KEYS),
                    "params" => Some(&PARAM_KEYS),
                    _ => return Err(ConfigError::new(name, format!("line {lineno}: unknown section (expected [run] or [params])"))),
                };
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::new(line, format!("line {lineno}: expected 'key = value'")))?;
            let key = canonical(k);
            let known = match section {
                Some(keys) => keys.contains(&key.as_str()),
                None => RUN_KEYS.contains(&key.as_str()) || PARAM_KEYS.contains(&key.as_str()),
            };
            if !known {
                return Err(ConfigError::new(key, format!("line {lineno}: unknown key in this section")));
            }
            if out.insert(key.clone(), v.trim().to_owned()).is_some() {
                return Err(ConfigError::new(key, format!("line {lineno}: duplicate key")));
            }
        }
        let settings = Settings(out);
        settings.check_initial_motion()?;
        Ok(settings)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn check_initial_motion(&self) -> Result<(), ConfigError> {
        if self.0.contains_key("xi0") && self.0.contains_key("mu0") {
            return Err(ConfigError::new("mu0", "give either xi0 or mu0, not both"));
        }
        Ok(())
    }

    /// Applies `overrides` on top of `self`. Setting one of `xi0`/`mu0` clears the other.
    pub fn overlay(mut self, overrides: Settings) -> Result<Self, ConfigError> {
        overrides.check_initial_motion()?;
        for (a, b) in [("xi0", "mu0"), ("mu0", "xi0")] {
            if overrides.0.contains_key(a) {
                self.0.remove(b);
            }
        }
        self.0.extend(overrides.0);
        Ok(self)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.0.insert(canonical(key), value.into());
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = v.trim().parse().map_err(|_| ConfigError::new(key, format!("'{v}' is not a number")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(ConfigError::new(key, format!("'{v}' is not finite")))
    }
}

/// Comma- or space-separated numbers, optionally wrapped in `()` or `[]`.
pub fn parse_numbers(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    let inner = v.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
    inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| parse_f64(key, s))
        .collect()
}

fn parse_vec3(key: &str, v: &str) -> Result<[f64; 3], ConfigError> {
    let xs = parse_numbers(key, v)?;
    <[f64; 3]>::try_from(xs.as_slice()).map_err(|_| ConfigError::new(key, format!("expected 3 numbers, got {}", xs.len())))
}

fn parse_inertia(v: &str) -> Result<Matrix3<f64>, ConfigError> {
    let xs = parse_numbers("inertia", v)?;
    match xs.len() {
        3 => Ok(Matrix3::from_diagonal(&nalgebra::Vector3::new(xs[0], xs[1], xs[2]))),
        9 => Ok(Matrix3::from_row_slice(&xs)),
        n => Err(ConfigError::new("inertia", format!("expected 3 (diagonal) or 9 (row-major) numbers, got {n}"))),
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(ConfigError::new(key, format!("'{v}' is not a boolean"))),
    }
}

pub fn parse_seed(key: &str, v: &str) -> Result<u64, ConfigError> {
    v.trim().parse().map_err(|_| ConfigError::new(key, format!("'{v}' is not an unsigned integer")))
}

/// Flag value, then `HERGLOTZ_SEED`, then the default.
pub fn resolve_seed(explicit: Option<&str>, env: Option<&str>) -> Result<u64, ConfigError> {
    match (explicit, env) {
        (Some(v), _) => parse_seed("seed", v),
        (None, Some(v)) => parse_seed(SEED_ENV, v),
        (None, None) => Ok(DEFAULT_SEED),
    }
}

/// Fully resolved `simulate` configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ScenarioParams,
    pub formulation: Formulation,
    pub dt: f64,
    pub t_final: f64,
    pub n_steps: usize,
    pub integrator: Method,
    pub lie_integrator: LieMethod,
    pub reconstruct: bool,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
}

fn map_core_error(e: CoreError) -> ConfigError {
    match e {
        CoreError::InertiaNotSymmetric(_) | CoreError::InertiaNotPositiveDefinite => {
            ConfigError::new("inertia", e.to_string())
        }
        CoreError::NonUnitChi(_) => ConfigError::new("chi", e.to_string()),
        CoreError::InvalidScenario { .. } => ConfigError::new("mgl", e.to_string()),
        CoreError::UnknownScenario(_) => ConfigError::new(
            "scenario",
            format!(
                "{e} (known: {})",
                scenarios::SCENARIOS.iter().map(|s| s.name).collect::<Vec<_>>().join(", ")
            ),
        ),
        other => ConfigError::new("scenario", other.to_string()),
    }
}

impl RunConfig {
    /// Resolves settings against the scenario registry. `env_seed` is the
    /// `HERGLOTZ_SEED` value, used when no seed is set.
    pub fn resolve(s: &Settings, env_seed: Option<&str>) -> Result<Self, ConfigError> {
        let name = s.get("scenario").unwrap_or("damped-rigid-body");
        let mut params = scenarios::defaults(name).map_err(map_core_error)?;
        if let Some(v) = s.get("inertia") {
            params.inertia = parse_inertia(v)?;
        }
        if let Some(v) = s.get("gamma") {
            params.gamma = parse_f64("gamma", v)?;
        }
        if let Some(v) = s.get("mgl") {
            params.mgl = parse_f64("mgl", v)?;
        }
        if let Some(v) = s.get("chi") {
            params.chi = AlgebraVector::from(parse_vec3("chi", v)?);
        }
        if let Some(v) = s.get("alpha0") {
            params.alpha0 = CoalgebraVector::from(parse_vec3("alpha0", v)?);
        }
        if let Some(v) = s.get("xi0") {
            params.initial = InitialMotion::Velocity(AlgebraVector::from(parse_vec3("xi0", v)?));
        }
        if let Some(v) = s.get("mu0") {
            params.initial = InitialMotion::Momentum(CoalgebraVector::from(parse_vec3("mu0", v)?));
        }
        if let Some(v) = s.get("z0") {
            params.z0 = parse_f64("z0", v)?;
        }
        let spec = scenarios::build(&params).map_err(map_core_error)?.spec;

        let formulation = match s.get("formulation") {
            Some(v) => Formulation::parse(v.trim()).ok_or_else(|| {
                ConfigError::new("formulation", format!("'{v}' (expected eph, lpj, eph-ext, lpj-ext or unreduced)"))
            })?,
            None if spec.is_symmetric() => Formulation::Lpj,
            None => Formulation::LpjExt,
        };
        if !spec.is_symmetric() && matches!(formulation, Formulation::Eph | Formulation::Lpj) {
            return Err(ConfigError::new(
                "formulation",
                format!(
                    "scenario '{}' has a potential (mgl = {}); {} needs an unbroken symmetry, use eph-ext, lpj-ext or unreduced",
                    params.name,
                    params.mgl,
                    formulation.name()
                ),
            ));
        }

        let dt = match s.get("dt") {
            Some(v) => parse_f64("dt", v)?,
            None => 1e-3,
        };
        if dt <= 0.0 {
            return Err(ConfigError::new("dt", format!("must be positive, got {dt}")));
        }
        let t_final = match s.get("t_final") {
            Some(v) => parse_f64("t_final", v)?,
            None => 10.0,
        };
        if t_final <= 0.0 {
            return Err(ConfigError::new("t_final", format!("must be positive, got {t_final}")));
        }
        let ratio = t_final / dt;
        if ratio > MAX_STEPS {
            return Err(ConfigError::new("t_final", format!("t_final/dt = {ratio:e} exceeds {MAX_STEPS:e}")));
        }
        let n_steps = (ratio.round() as usize).max(1);

        let integrator = match s.get("integrator").map(str::trim) {
            None | Some("rk4") => Method::Rk4,
            Some("euler") => Method::Euler,
            Some(v) => return Err(ConfigError::new("integrator", format!("'{v}' (expected euler or rk4)"))),
        };
        let lie_integrator = match s.get("lie_integrator").map(str::trim) {
            None | Some("rkmk4") => LieMethod::Rkmk4,
            Some("lie-euler") => LieMethod::LieEuler,
            Some(v) => return Err(ConfigError::new("lie_integrator", format!("'{v}' (expected lie-euler or rkmk4)"))),
        };
        let reconstruct = match s.get("reconstruct") {
            Some(v) => parse_bool("reconstruct", v)?,
            None => false,
        };
        let format = match s.get("format").map(str::trim) {
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(v) => return Err(ConfigError::new("format", format!("'{v}' (expected csv or json)"))),
        };
        let output = s.get("output").map(|v| PathBuf::from(v.trim())).filter(|p| p.as_os_str() != "-");
        let seed = resolve_seed(s.get("seed"), env_seed)?;

        Ok(Self { params, formulation, dt, t_final, n_steps, integrator, lie_integrator, reconstruct, output, format, seed })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(pairs: &[(&str, &str)]) -> Settings {
        let mut s = Settings::default();
        for (k, v) in pairs {
            s.set(k, *v);
        }
        s
    }

    #[test]
    fn parses_sections_and_comments() {
        let s = Settings::parse(
            "# run setup\nscenario = heavy-top\n[run]\ndt = 1e-2  # coarse\nt-final = 2\n\n[params]\ngamma = 0.3\nchi = (0, 0, 1)\n",
        )
        .unwrap();
        assert_eq!(s.get("scenario"), Some("heavy-top"));
        assert_eq!(s.get("t_final"), Some("2"));
        assert_eq!(s.get("chi"), Some("(0, 0, 1)"));
    }

    #[test]
    fn rejects_bad_files() {
        assert_eq!(Settings::parse("[physics]\n").unwrap_err().key, "physics");
        assert_eq!(Settings::parse("[params]\ndt = 1\n").unwrap_err().key, "dt");
        assert_eq!(Settings::parse("gamma = 1\ngamma = 2\n").unwrap_err().key, "gamma");
        assert_eq!(Settings::parse("xi0 = 1,1,1\nmu0 = 1,2,3\n").unwrap_err().key, "mu0");
        assert!(Settings::parse("just words\n").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = settings(&[("dt", "0.1"), ("xi0", "1,1,1")]);
        let merged = file.overlay(settings(&[("dt", "0.01"), ("mu0", "1 2 3")])).unwrap();
        assert_eq!(merged.get("dt"), Some("0.01"));
        assert_eq!(merged.get("xi0"), None);
        assert_eq!(merged.get("mu0"), Some("1 2 3"));
    }

    #[test]
    fn resolves_defaults() {
        let c = RunConfig::resolve(&Settings::default(), None).unwrap();
        assert_eq!(c.params.name, "damped-rigid-body");
        assert_eq!(c.formulation, Formulation::Lpj);
        assert_eq!(c.n_steps, 10_000);
        assert_eq!(c.seed, DEFAULT_SEED);
        let c = RunConfig::resolve(&settings(&[("scenario", "heavy-top")]), Some("7")).unwrap();
        assert_eq!(c.formulation, Formulation::LpjExt);
        assert_eq!(c.seed, 7);
    }

    #[test]
    fn errors_name_the_key() {
        let key = |pairs: &[(&str, &str)]| RunConfig::resolve(&settings(pairs), None).unwrap_err().key;
        assert_eq!(key(&[("t_final", "0")]), "t_final");
        assert_eq!(key(&[("dt", "-1")]), "dt");
        assert_eq!(key(&[("dt", "1e-9"), ("t_final", "1")]), "t_final");
        assert_eq!(key(&[("scenario", "heavy-top"), ("formulation", "eph")]), "formulation");
        assert_eq!(key(&[("scenario", "nope")]), "scenario");
        assert_eq!(key(&[("inertia", "1,-1,1")]), "inertia");
        assert_eq!(key(&[("inertia", "1,2")]), "inertia");
        assert_eq!(key(&[("mgl", "1")]), "mgl");
        assert_eq!(key(&[("scenario", "heavy-top"), ("chi", "1,1,0")]), "chi");
        assert_eq!(key(&[("gamma", "abc")]), "gamma");
        assert_eq!(key(&[("format", "xml")]), "format");
        assert_eq!(key(&[("seed", "-3")]), "seed");
        assert_eq!(RunConfig::resolve(&Settings::default(), Some("x")).unwrap_err().key, SEED_ENV);
    }

    #[test]
    fn overrides_apply() {
        let c = RunConfig::resolve(
            &settings(&[("inertia", "[2, 2, 2]"), ("gamma", "-0.5"), ("mu0", "2,4,6"), ("z0", "1.5")]),
            None,
        )
        .unwrap();
        assert_eq!(c.params.inertia, Matrix3::from_diagonal_element(2.0));
        assert_eq!(c.params.gamma, -0.5);
        assert_eq!(c.params.initial, InitialMotion::Momentum(CoalgebraVector::new(2.0, 4.0, 6.0)));
        assert_eq!(c.params.z0, 1.5);
    }
}
