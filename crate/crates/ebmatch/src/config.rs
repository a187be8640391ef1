//! Run configuration: command-line flags merged over an optional flat
//! `key = value` file, validated key by key.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ebmatch_core::sampling::Density;
use ebmatch_core::solvers::SolverMode;
use ebmatch_core::{Domain, ProblemKind};

use crate::error::{usage, Result};
use crate::experiments::growth::Layout;
use crate::experiments::mixture::BadRule;
use crate::io::{read_density_grid, read_input, read_polycube};

/// Keys accepted in configuration files and as `--key` flags.
pub const KEYS: &[&str] = &[
    "problem", "d", "p", "n-list", "trials", "seed", "workers", "density", "domain", "solver", "output", "timing", "side",
    "m", "eta", "h-rule", "layout", "x", "y",
];

/// Environment variable holding the fallback master seed.
pub const SEED_ENV: &str = "EB_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    RunScaling,
    RunD2log,
    RunSubadditivity,
    RunGrowth,
    RunConcentration,
    RunMixture,
    SolveOne,
    VerifyOracles,
}

impl Command {
    /// Ladder used when `n-list` is not given.
    fn default_ladder(self) -> Vec<usize> {
        match self {
            Command::RunD2log => (9..=14).map(|k| 1 << k).collect(),
            Command::RunGrowth => vec![100, 200, 400, 800, 1600],
            Command::RunMixture => vec![500, 1000, 2000, 4000],
            _ => vec![250, 500, 1000, 2000, 4000],
        }
    }

    fn default_trials(self) -> usize {
        match self {
            Command::RunConcentration => 100,
            Command::RunSubadditivity => 100,
            _ => 50,
        }
    }
}

/// Validated configuration of one command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub problem: ProblemKind,
    pub d: usize,
    pub p: f64,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub density: Density,
    pub solver: SolverMode,
    pub output: PathBuf,
    pub workers: usize,
    pub timing: bool,
    /// Subcube side of the subadditivity experiment.
    pub side: f64,
    /// Subcubes per axis of the subadditivity experiment.
    pub m: usize,
    pub eta: f64,
    pub h_rule: BadRule,
    pub layout: Layout,
    pub x: Option<PathBuf>,
    pub y: Option<PathBuf>,
}

/// Parses a flat `key = value` file; `#` starts a comment line.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| usage("config", format!("line {}: expected `key = value`", i + 1)))?;
        let key = key.trim().to_string();
        if !KEYS.contains(&key.as_str()) {
            return Err(usage(key, "unknown configuration key"));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

fn get<T: std::str::FromStr>(values: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    values
        .get(key)
        .map(|v| v.parse::<T>().map_err(|_| usage(key, format!("cannot parse `{v}`"))))
        .transpose()
}

fn parse_ladder(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| usage("n-list", format!("`{t}` is not a positive integer"))))
        .collect()
}

fn parse_bool(key: &str, text: &str) -> Result<bool> {
    match text {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(usage(key, "expected true or false")),
    }
}

fn parse_domain(text: &str, d: usize) -> Result<Domain> {
    let domain = if let Some(side) = text.strip_prefix("cube:") {
        let side: f64 = side.parse().map_err(|_| usage("domain", format!("bad cube side `{side}`")))?;
        Domain::cube(d, side).map_err(|e| usage("domain", e.to_string()))?
    } else if let Some(path) = text.strip_prefix("polycube:") {
        read_polycube(Path::new(path), "domain")?
    } else {
        return Err(usage("domain", "expected cube:<L> or polycube:<file>"));
    };
    if domain.dim() != d {
        return Err(usage("domain", format!("domain has dimension {}, expected {d}", domain.dim())));
    }
    Ok(domain)
}

fn parse_density(text: &str, domain: Domain, d: usize) -> Result<Density> {
    if text == "uniform" {
        return Ok(Density::Uniform(domain));
    }
    let path = text.strip_prefix("holder:").ok_or_else(|| usage("density", "expected uniform or holder:<file>"))?;
    let side = match domain {
        Domain::Cube { side, .. } => side,
        Domain::Polycube(_) => return Err(usage("density", "grid densities need a cube domain")),
    };
    let h = read_density_grid(Path::new(path), side, "density")?;
    if h.dim() != d {
        return Err(usage("density", format!("grid has dimension {}, expected {d}", h.dim())));
    }
    Ok(Density::Holder(h))
}

fn parse_solver(text: &str) -> Result<SolverMode> {
    match text {
        "auto" => Ok(SolverMode::Auto),
        "exact" => Ok(SolverMode::Exact),
        "heuristic" => Ok(SolverMode::Heuristic),
        "brute" => Ok(SolverMode::Brute),
        _ => Err(usage("solver", "expected auto, exact, heuristic or brute")),
    }
}

impl RunConfig {
    /// Merges `flags` over the file at `config_file` (if any), then validates.
    /// The seed falls back to `env_seed` and then to 0.
    pub fn resolve(
        command: Command,
        flags: BTreeMap<String, String>,
        config_file: Option<&Path>,
        env_seed: Option<String>,
    ) -> Result<RunConfig> {
        let mut values = match config_file {
            Some(path) => parse_config_text(&read_input(path, "config")?)?,
            None => BTreeMap::new(),
        };
        values.extend(flags);
        if !values.contains_key("seed") {
            if let Some(seed) = env_seed {
                values.insert("seed".into(), seed);
            }
        }
        Self::from_values(command, &values)
    }

    pub fn from_values(command: Command, values: &BTreeMap<String, String>) -> Result<RunConfig> {
        if let Some(key) = values.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(usage(key.clone(), "unknown configuration key"));
        }
        let problem = match values.get("problem") {
            Some(text) => text.parse::<ProblemKind>().map_err(|e| usage("problem", e.to_string()))?,
            None => ProblemKind::Matching,
        };
        let d: usize = get(values, "d")?.unwrap_or(2);
        if d == 0 {
            return Err(usage("d", "dimension must be positive"));
        }
        let p: f64 = get(values, "p")?.unwrap_or(1.0);
        if !(p.is_finite() && p >= 1.0) {
            return Err(usage("p", "exponent must be finite and at least 1"));
        }
        let n_grid = match values.get("n-list") {
            Some(text) => parse_ladder(text)?,
            None => command.default_ladder(),
        };
        if n_grid.is_empty() || n_grid.contains(&0) || n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(usage("n-list", "sizes must be positive and strictly increasing"));
        }
        let trials: usize = get(values, "trials")?.unwrap_or(command.default_trials());
        if trials == 0 {
            return Err(usage("trials", "need at least one trial"));
        }
        let workers: usize = get(values, "workers")?.unwrap_or(1);
        if workers == 0 {
            return Err(usage("workers", "need at least one worker"));
        }
        let domain = parse_domain(values.get("domain").map_or("cube:1", String::as_str), d)?;
        let density = parse_density(values.get("density").map_or("uniform", String::as_str), domain, d)?;
        let eta: f64 = get(values, "eta")?.unwrap_or(0.2);
        if !(eta > 0.0 && eta < 1.0) {
            return Err(usage("eta", "thinning probability must lie in (0, 1)"));
        }
        let side: f64 = get(values, "side")?.unwrap_or(4.0);
        if !(side.is_finite() && side > 0.0) {
            return Err(usage("side", "must be positive"));
        }
        let m: usize = get(values, "m")?.unwrap_or(2);
        if m == 0 {
            return Err(usage("m", "need at least one subcube per axis"));
        }
        Ok(RunConfig {
            command,
            problem,
            d,
            p,
            n_grid,
            trials,
            seed: get(values, "seed")?.unwrap_or(0),
            density,
            solver: values.get("solver").map_or(Ok(SolverMode::Auto), |s| parse_solver(s))?,
            output: values.get("output").map_or_else(|| PathBuf::from("ebmatch-out"), PathBuf::from),
            workers,
            timing: values.get("timing").map_or(Ok(false), |t| parse_bool("timing", t))?,
            side,
            m,
            eta,
            h_rule: values.get("h-rule").map_or(Ok(BadRule::Sqrt), |s| s.parse())?,
            layout: values.get("layout").map_or(Ok(Layout::Uniform), |s| s.parse())?,
            x: values.get("x").map(PathBuf::from),
            y: values.get("y").map(PathBuf::from),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn flags(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn scaling_flags_resolve() {
        let f = flags(&[("problem", "matching"), ("d", "3"), ("p", "1"), ("n-list", "250,500"), ("trials", "10"), ("seed", "7")]);
        let c = RunConfig::resolve(Command::RunScaling, f, None, None).unwrap();
        assert_eq!((c.d, c.p, c.trials, c.seed), (3, 1.0, 10, 7));
        assert_eq!(c.n_grid, vec![250, 500]);
        assert_eq!(c.density, Density::uniform_cube(3));
    }

    #[test]
    fn small_exponent_is_rejected_by_key() {
        let err = RunConfig::resolve(Command::RunScaling, flags(&[("p", "0.5")]), None, None).unwrap_err();
        assert!(matches!(&err, Error::Usage { key, .. } if key == "p"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn file_values_yield_to_flags() {
        let dir = std::env::temp_dir().join(format!("ebmatch-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        std::fs::write(&path, "# defaults\ntrials = 12\nd = 3\n").unwrap();
        let c = RunConfig::resolve(Command::RunScaling, flags(&[("trials", "5")]), Some(&path), None).unwrap();
        assert_eq!((c.trials, c.d), (5, 3));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn unknown_keys_and_bad_numbers_are_named() {
        assert!(matches!(parse_config_text("colour = red"), Err(Error::Usage { key, .. }) if key == "colour"));
        let err = RunConfig::resolve(Command::RunScaling, flags(&[("trials", "many")]), None, None).unwrap_err();
        assert!(matches!(err, Error::Usage { key, .. } if key == "trials"));
        let err = RunConfig::resolve(Command::RunScaling, flags(&[("n-list", "500,250")]), None, None).unwrap_err();
        assert!(matches!(err, Error::Usage { key, .. } if key == "n-list"));
    }

    #[test]
    fn seed_falls_back_to_the_environment_value() {
        let c = RunConfig::resolve(Command::RunScaling, BTreeMap::new(), None, Some("99".into())).unwrap();
        assert_eq!(c.seed, 99);
        let c = RunConfig::resolve(Command::RunScaling, flags(&[("seed", "3")]), None, Some("99".into())).unwrap();
        assert_eq!(c.seed, 3);
        let c = RunConfig::resolve(Command::RunScaling, BTreeMap::new(), None, None).unwrap();
        assert_eq!(c.seed, 0);
    }

    #[test]
    fn missing_config_file_is_a_usage_error() {
        let err = RunConfig::resolve(Command::RunScaling, BTreeMap::new(), Some(Path::new("/nonexistent/run.conf")), None).unwrap_err();
        assert!(matches!(err, Error::Usage { key, .. } if key == "config"));
    }
}
