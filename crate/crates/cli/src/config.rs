//! Run configuration: a flat `key = value` file with `[chain]`, `[sector]`,
//! `[tolerances]` and `[output]` sections. Keys before the first section
//! header are global (`seed`, `draws`). Complex numbers are written `a+bi`.

use std::fmt;
use std::path::PathBuf;

use openxxz_core::bethe::{check_constraint, solve_theta_plus, Branch, SectorConfig, Sign};
use openxxz_core::boundary::BoundaryParams;
use openxxz_core::fusion::SpinLabel;
use openxxz_core::suite::Tolerances;
use openxxz_core::transfer::{ChainSpec, SpectrumConfig};
use openxxz_core::{c, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, key: &str, message: impl Into<String>) -> Self {
        ConfigError {
            line: Some(line),
            key: Some(key.to_string()),
            message: message.into(),
        }
    }

    pub fn plain(message: impl Into<String>) -> Self {
        ConfigError {
            line: None,
            key: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, &self.key) {
            (Some(l), Some(k)) => write!(f, "line {l}, key '{k}': {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "key '{k}': {}", self.message),
            (None, None) => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

/// Boundary parameter that may be left to the constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    AlphaMinus,
    BetaMinus,
    ThetaMinus,
    AlphaPlus,
    BetaPlus,
    ThetaPlus,
}

impl Param {
    const ALL: [(Param, &'static str); 6] = [
        (Param::AlphaMinus, "alpha_minus"),
        (Param::BetaMinus, "beta_minus"),
        (Param::ThetaMinus, "theta_minus"),
        (Param::AlphaPlus, "alpha_plus"),
        (Param::BetaPlus, "beta_plus"),
        (Param::ThetaPlus, "theta_plus"),
    ];

    fn from_key(key: &str) -> Option<Param> {
        Self::ALL.iter().find(|(_, k)| *k == key).map(|(p, _)| *p)
    }

    pub fn key(self) -> &'static str {
        Self::ALL.iter().find(|(p, _)| *p == self).map(|(_, k)| *k).unwrap()
    }

    fn slot(self, b: &mut BoundaryParams) -> &mut C64 {
        match self {
            Param::AlphaMinus => &mut b.alpha_minus,
            Param::BetaMinus => &mut b.beta_minus,
            Param::ThetaMinus => &mut b.theta_minus,
            Param::AlphaPlus => &mut b.alpha_plus,
            Param::BetaPlus => &mut b.beta_plus,
            Param::ThetaPlus => &mut b.theta_plus,
        }
    }

    // d(constraint residual)/d(param)
    fn slope(self, s: &SectorConfig) -> f64 {
        match self {
            Param::AlphaMinus => 1.0,
            Param::BetaMinus => s.eps1.value(),
            Param::AlphaPlus => s.eps2.value(),
            Param::BetaPlus => s.eps3.value(),
            Param::ThetaMinus => -s.eps0.value(),
            Param::ThetaPlus => s.eps0.value(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_sites: usize,
    pub spin: SpinLabel,
    pub eta: C64,
    /// Parameters as written; a solved parameter holds 0 until [`RunConfig::boundary_for`].
    pub boundary: BoundaryParams,
    pub solve: Option<Param>,
    pub u0: C64,
    pub sector: SectorConfig,
    pub tolerances: Tolerances,
    pub fit_tol: f64,
    pub constraint_tol: f64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub draws: usize,
    pub max_dim: usize,
}

pub const DEFAULT_SEED: u64 = 20_240_611;

/// Built-in configuration: two spin-1 sites with the parameters of the
/// spin-1 energy tables, `θ₊` solved from the constraint.
pub const DEFAULT_CONFIG: &str = "\
seed = 20240611
draws = 20

[chain]
n = 2
spin = 1
eta = 0+0.3i
alpha_minus = 0+0.7i
beta_minus = 0.2
theta_minus = 0+0.5i
alpha_plus = 0+1.2i
beta_plus = -0.2
theta_plus = solve

[sector]
branch = +
eps0 = +
eps1 = +
eps2 = +
eps3 = +
k = 1
";

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::parse(DEFAULT_CONFIG).expect("built-in config parses")
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let zero = C64::new(0.0, 0.0);
        let mut cfg = RunConfig {
            n_sites: 2,
            spin: SpinLabel::ONE,
            eta: c(0.0, 0.3),
            boundary: BoundaryParams {
                alpha_minus: zero,
                beta_minus: zero,
                theta_minus: zero,
                alpha_plus: zero,
                beta_plus: zero,
                theta_plus: zero,
            },
            solve: None,
            u0: SpectrumConfig::default().u0,
            sector: SectorConfig::new(Branch::Plus, 1),
            tolerances: Tolerances::default(),
            fit_tol: 1e-8,
            constraint_tol: 1e-10,
            output: None,
            format: Format::Csv,
            seed: DEFAULT_SEED,
            draws: 20,
            max_dim: openxxz_core::DEFAULT_MAX_DIM,
        };
        let mut eps = [Sign::Plus; 4];
        let mut section = String::new();
        let mut seen: Vec<(String, String)> = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError {
                        line: Some(line_no),
                        key: None,
                        message: "unterminated section header".into(),
                    })?
                    .trim();
                if !["chain", "sector", "tolerances", "output"].contains(&name) {
                    return Err(ConfigError {
                        line: Some(line_no),
                        key: None,
                        message: format!("unknown section [{name}]"),
                    });
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError {
                line: Some(line_no),
                key: None,
                message: "expected 'key = value'".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            if seen.iter().any(|(s, k)| *s == section && k == key) {
                return Err(ConfigError::at(line_no, key, "duplicate key"));
            }
            seen.push((section.clone(), key.to_string()));
            let err = |m: &str| ConfigError::at(line_no, key, m);

            match (section.as_str(), key) {
                ("", "seed") => cfg.seed = value.parse().map_err(|_| err("expected a non-negative integer"))?,
                ("", "draws") => {
                    cfg.draws = value.parse().map_err(|_| err("expected a positive integer"))?;
                    if cfg.draws == 0 {
                        return Err(err("expected a positive integer"));
                    }
                }
                ("chain", "n") => {
                    cfg.n_sites = value.parse().map_err(|_| err("expected a positive integer"))?;
                    if cfg.n_sites == 0 {
                        return Err(err("expected a positive integer"));
                    }
                }
                ("chain", "spin") => cfg.spin = parse_spin(value).ok_or_else(|| err("expected 1/2, 1, 3/2, ..."))?,
                ("chain", "eta") => cfg.eta = parse_complex(value).ok_or_else(|| err("expected a complex number a+bi"))?,
                ("chain", "u0") => cfg.u0 = parse_complex(value).ok_or_else(|| err("expected a complex number a+bi"))?,
                ("chain", k) if Param::from_key(k).is_some() => {
                    let p = Param::from_key(k).unwrap();
                    if value == "solve" {
                        if let Some(prev) = cfg.solve {
                            return Err(err(&format!("'{}' is already marked solve", prev.key())));
                        }
                        cfg.solve = Some(p);
                    } else {
                        *p.slot(&mut cfg.boundary) =
                            parse_complex(value).ok_or_else(|| err("expected a complex number a+bi or 'solve'"))?;
                    }
                }
                ("sector", "branch") => cfg.sector.branch = parse_sign(value).ok_or_else(|| err("expected + or -"))?,
                ("sector", "k") => cfg.sector.k = value.parse().map_err(|_| err("expected an integer"))?,
                ("sector", k @ ("eps0" | "eps1" | "eps2" | "eps3")) => {
                    let idx: usize = k[3..].parse().unwrap();
                    eps[idx] = parse_sign(value).ok_or_else(|| err("expected + or -"))?;
                }
                ("tolerances", name) => {
                    let v: f64 = value.parse().map_err(|_| err("expected a number"))?;
                    cfg.set_tolerance(name, v).map_err(|m| err(&m))?;
                }
                ("output", "path") => cfg.output = Some(PathBuf::from(value)),
                ("output", "format") => cfg.format = Format::parse(value).ok_or_else(|| err("expected csv or json"))?,
                _ => {
                    let where_ = if section.is_empty() { "top level".to_string() } else { format!("[{section}]") };
                    return Err(err(&format!("unknown key in {where_}")));
                }
            }
        }

        cfg.sector = SectorConfig::with_signs(cfg.sector.branch, eps, cfg.sector.k)
            .map_err(|e| ConfigError::plain(format!("[sector]: {e}")))?;
        Ok(cfg)
    }

    /// Sets a named tolerance. Besides the suite tolerances, `fit` is the
    /// Q-fit acceptance threshold and `constraint` the allowed constraint
    /// residual when no parameter is solved for.
    pub fn set_tolerance(&mut self, name: &str, value: f64) -> Result<(), String> {
        if !(value > 0.0 && value.is_finite()) {
            return Err("tolerances must be positive and finite".into());
        }
        match name {
            "fit" => self.fit_tol = value,
            "constraint" => self.constraint_tol = value,
            _ => self.tolerances.set(name, value).map_err(|_| {
                format!(
                    "unknown tolerance '{name}' (known: {}, fit, constraint)",
                    Tolerances::NAMES.join(", ")
                )
            })?,
        }
        Ok(())
    }

    /// Boundary parameters for sector `k`: the parameter marked `solve` is
    /// fixed by the constraint. Without one, the constraint must already hold.
    pub fn boundary_for(&self, k: i64) -> Result<BoundaryParams, String> {
        let sector = SectorConfig { k, ..self.sector };
        match self.solve {
            Some(Param::ThetaPlus) => Ok(BoundaryParams {
                theta_plus: solve_theta_plus(&self.boundary, &sector, self.eta),
                ..self.boundary
            }),
            Some(p) => {
                let mut b = self.boundary;
                let r = check_constraint(&b, &sector, self.eta);
                *p.slot(&mut b) -= r / p.slope(&sector);
                Ok(b)
            }
            None => {
                let r = check_constraint(&self.boundary, &sector, self.eta).norm();
                if r <= self.constraint_tol {
                    Ok(self.boundary)
                } else {
                    Err(format!(
                        "constraint residual {r:.3e} exceeds {:.1e} and no parameter is marked solve",
                        self.constraint_tol
                    ))
                }
            }
        }
    }

    /// Chain with the boundary for the configured `k`. The constraint is
    /// only enforced through a `solve` marker; otherwise parameters are used
    /// as written.
    pub fn chain(&self) -> Result<ChainSpec, String> {
        let boundary = match self.solve {
            Some(_) => self.boundary_for(self.sector.k)?,
            None => self.boundary,
        };
        self.chain_with(boundary)
    }

    pub fn chain_with(&self, boundary: BoundaryParams) -> Result<ChainSpec, String> {
        ChainSpec::with_cap(self.n_sites, self.spin, self.eta, boundary, self.max_dim).map_err(|e| e.to_string())
    }

    pub fn spectrum_config(&self) -> SpectrumConfig {
        SpectrumConfig {
            u0: self.u0,
            ..SpectrumConfig::default()
        }
    }
}

pub fn parse_sign(s: &str) -> Option<Sign> {
    match s {
        "+" | "+1" | "1" => Some(Sign::Plus),
        "-" | "-1" => Some(Sign::Minus),
        _ => None,
    }
}

pub fn parse_spin(s: &str) -> Option<SpinLabel> {
    let twice = match s.split_once('/') {
        Some((num, "2")) => num.trim().parse::<u32>().ok()?,
        Some(_) => return None,
        None => {
            let x: f64 = s.parse().ok()?;
            let t = 2.0 * x;
            if t.fract() != 0.0 || !(1.0..=64.0).contains(&t) {
                return None;
            }
            t as u32
        }
    };
    (twice >= 1).then(|| SpinLabel::from_twice(twice))
}

/// Parses `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i` (exponents allowed).
pub fn parse_complex(s: &str) -> Option<C64> {
    let s: String = s.chars().filter(|ch| !ch.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().ok().filter(|x| x.is_finite()).map(|x| c(x, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&j| (bytes[j] == b'+' || bytes[j] == b'-') && !matches!(bytes[j - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(j) => (&body[..j], &body[j..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().ok()?,
    };
    let re: f64 = re.parse().ok()?;
    (re.is_finite() && im.is_finite()).then(|| c(re, im))
}
